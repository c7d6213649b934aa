//! Pfaffians of real antisymmetric matrices.

use nalgebra::DMatrix;

/// Expansion along the first row is used up to this size; larger matrices
/// go through skew-symmetric Gaussian elimination with pivoting.
const EXPANSION_LIMIT: usize = 8;

pub fn pfaffian(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    if n % 2 == 1 {
        return 0.0;
    }
    if n <= EXPANSION_LIMIT {
        let idx: Vec<usize> = (0..n).collect();
        expand(m, &idx)
    } else {
        eliminate(m.clone())
    }
}

fn expand(m: &DMatrix<f64>, idx: &[usize]) -> f64 {
    match idx.len() {
        0 => 1.0,
        2 => m[(idx[0], idx[1])],
        _ => {
            let first = idx[0];
            let mut acc = 0.0;
            for (pos, &j) in idx.iter().enumerate().skip(1) {
                let a = m[(first, j)];
                if a == 0.0 {
                    continue;
                }
                let rest: Vec<usize> = idx.iter().enumerate().filter(|(p, _)| *p != 0 && *p != pos).map(|(_, &k)| k).collect();
                // sign (-1)^(pos + 1) with pos counted from 0
                let sign = if pos % 2 == 1 { 1.0 } else { -1.0 };
                acc += sign * a * expand(m, &rest);
            }
            acc
        }
    }
}

fn eliminate(mut a: DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut pf = 1.0;
    let mut k = 0;
    while k + 1 < n {
        let (mut kp, mut best) = (k + 1, a[(k + 1, k)].abs());
        for i in k + 2..n {
            if a[(i, k)].abs() > best {
                best = a[(i, k)].abs();
                kp = i;
            }
        }
        if best == 0.0 {
            return 0.0;
        }
        if kp != k + 1 {
            a.swap_rows(k + 1, kp);
            a.swap_columns(k + 1, kp);
            pf = -pf;
        }
        let pivot = a[(k, k + 1)];
        pf *= pivot;
        if k + 2 < n {
            let tau: Vec<f64> = (k + 2..n).map(|j| a[(k, j)] / pivot).collect();
            let col: Vec<f64> = (k + 2..n).map(|i| a[(i, k + 1)]).collect();
            for (r, i) in (k + 2..n).enumerate() {
                for (c, j) in (k + 2..n).enumerate() {
                    a[(i, j)] += tau[r] * col[c] - col[r] * tau[c];
                }
            }
        }
        k += 2;
    }
    pf
}

fn minor(m: &DMatrix<f64>, a: usize, b: usize) -> DMatrix<f64> {
    let keep: Vec<usize> = (0..m.nrows()).filter(|&k| k != a && k != b).collect();
    DMatrix::from_fn(keep.len(), keep.len(), |i, j| m[(keep[i], keep[j])])
}

/// Antisymmetric `G` with `dPf(M)[E] = Σ_ab G_ab E_ab` for antisymmetric `E`.
pub fn pfaffian_gradient(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    let mut g = DMatrix::zeros(n, n);
    if n % 2 == 1 {
        return g;
    }
    for a in 0..n {
        for b in a + 1..n {
            let sign = if (a + b + 1) % 2 == 0 { 1.0 } else { -1.0 };
            let d = sign * pfaffian(&minor(m, a, b));
            g[(a, b)] = 0.5 * d;
            g[(b, a)] = -0.5 * d;
        }
    }
    g
}
