//! Small dense helpers shared by the algebra, Cartan and Poisson code.

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;

pub(crate) const I: C64 = Complex { re: 0.0, im: 1.0 };

/// `-Re tr(AB)`, the invariant trace form on anti-Hermitian matrices.
pub fn trace_form(a: &CMatrix, b: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for k in 0..n {
            let x = a[(i, k)] * b[(k, i)];
            acc += x.re;
        }
    }
    -acc
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// Exponential of an anti-Hermitian matrix through the Hermitian eigenproblem
/// of `-iA`. The result is unitary to machine precision.
pub fn expm_anti_hermitian(a: &CMatrix) -> CMatrix {
    let h = a.map(|z| -I * z);
    // symmetrize away roundoff so the Hermitian solver sees an exact input
    let h = (&h + h.adjoint()).map(|z| z * 0.5);
    let eig = SymmetricEigen::new(h);
    let u = &eig.eigenvectors;
    let n = a.nrows();
    let mut d = CMatrix::zeros(n, n);
    for k in 0..n {
        let lam = eig.eigenvalues[k];
        d[(k, k)] = Complex::new(lam.cos(), lam.sin());
    }
    u * d * u.adjoint()
}

/// Numerical rank with a threshold relative to the largest singular value.
pub fn numerical_rank(m: &DMatrix<f64>, rel_tol: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.iter().cloned().fold(0.0_f64, f64::max);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * max).count()
}

/// Singular values sorted in decreasing order.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    let mut sv: Vec<f64> = m.clone().svd(false, false).singular_values.iter().cloned().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sv
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn scaled(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn mat_vec(m: &DMatrix<f64>, v: &[f64]) -> Vec<f64> {
    (m * DVector::from_column_slice(v)).iter().cloned().collect()
}

/// Least-squares solve through the SVD pseudo-inverse.
pub fn lstsq(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let svd = a.clone().svd(true, true);
    svd.solve(b, 1e-13).ok()
}

/// Determinant of a small real matrix.
pub fn det(m: &DMatrix<f64>) -> f64 {
    m.clone().determinant()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_of_zero_is_identity() {
        let z = CMatrix::zeros(3, 3);
        let e = expm_anti_hermitian(&z);
        assert!((e - CMatrix::identity(3, 3)).norm() < 1e-15);
    }

    #[test]
    fn exp_matches_rotation() {
        // [[0, -t], [t, 0]] exponentiates to a rotation by t
        let t = 0.7_f64;
        let mut a = CMatrix::zeros(2, 2);
        a[(0, 1)] = Complex::new(-t, 0.0);
        a[(1, 0)] = Complex::new(t, 0.0);
        let e = expm_anti_hermitian(&a);
        assert!((e[(0, 0)].re - t.cos()).abs() < 1e-14);
        assert!((e[(0, 1)].re + t.sin()).abs() < 1e-14);
        assert!((e[(1, 0)].re - t.sin()).abs() < 1e-14);
        assert!(e.iter().all(|z| z.im.abs() < 1e-14));
    }

    #[test]
    fn rank_of_projector() {
        let m = DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(numerical_rank(&m, 1e-9), 2);
        assert_eq!(numerical_rank(&DMatrix::zeros(2, 2), 1e-9), 0);
    }
}
