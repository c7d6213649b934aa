//! Generators of the invariant polynomials on `g*` and their restrictions
//! to `t*`.
//!
//! Every generator except the first is the harmonic part (on `t*`) of a
//! trace power, or the Pfaffian for the `D` family, scaled so that its
//! largest absolute value on the unit sphere is 1. The first generator is
//! always `|ξ|²`.

mod chart;
mod pfaffian;

use std::collections::HashMap;
use std::sync::Arc;

use nalgebra::{Complex, DMatrix};
use rand::Rng;
use serde::Serialize;

use crate::algebra::{Covector, Family, LieAlgebraData};
use crate::cartan::CartanData;
use crate::error::{check_dim, Error, Result};
use crate::linalg::{self, CMatrix, C64};
use crate::sampling;

pub use chart::{
    chamber_grid, delta_sample, verify_chevalley, verify_lemma2, ChamberGrid, DeltaCloud, DeltaKind,
};
pub use pfaffian::{pfaffian, pfaffian_gradient};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum GeneratorKind {
    /// Combination of `|ξ|^{2j} τ_m` terms built from trace powers.
    TracePower,
    Pfaffian,
}

/// `coeff · |ξ|^{2 radial} · τ_trace`, with `τ_0 := 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Term {
    pub coeff: f64,
    pub radial: u32,
    pub trace: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct Generator {
    pub degree: usize,
    pub kind: GeneratorKind,
    pub terms: Vec<Term>,
    pub scale: f64,
}

#[derive(Clone, Debug)]
pub struct InvariantSet {
    alg: Arc<LieAlgebraData>,
    cartan: CartanData,
    pub generators: Vec<Generator>,
    /// Diagonal entries of the Cartan generators over `i` (family A only):
    /// row `j` gives the `j`-th eigenvalue as a linear function of `t` coordinates.
    spectral: DMatrix<f64>,
}

/// Real trace power `τ_m` in normalization where `τ_2 = |ξ|²`.
fn trace_weight(family: Family, m: u32) -> C64 {
    match family {
        Family::A => match m % 4 {
            0 => Complex::new(1.0, 0.0),
            1 => Complex::new(0.0, -1.0),
            2 => Complex::new(-1.0, 0.0),
            _ => Complex::new(0.0, 1.0),
        },
        _ => {
            let k = (m / 2) as i32;
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            Complex::new(sign * 2f64.powi(k - 1), 0.0)
        }
    }
}

type Mono = (u32, u32);

fn canon(j: u32, m: u32) -> Option<Mono> {
    match m {
        1 => None,
        2 => Some((j + 1, 0)),
        _ => Some((j, m)),
    }
}

/// Laplacian on `t` of `|x|^{2j} τ_m`, where `Δτ_m = κ m(m-1) τ_{m-2}`.
fn laplacian(mono: Mono, kappa: f64, n: f64) -> Vec<(Mono, f64)> {
    let (j, m) = mono;
    let jf = j as f64;
    let mut out = Vec::new();
    if m >= 3 {
        if let Some(t) = canon(j, m - 2) {
            out.push((t, kappa * (m * (m - 1)) as f64));
        }
    }
    if j >= 1 {
        let c = 2.0 * jf * (2.0 * jf + n - 2.0) + 4.0 * jf * m as f64;
        out.push(((j - 1, m), c));
    }
    out
}

fn degree_basis(d: u32, from_radial: u32) -> Vec<Mono> {
    let mut out: Vec<Mono> = (from_radial..)
        .take_while(|j| d >= 2 * j + 3)
        .map(|j| (j, d - 2 * j))
        .collect();
    if d % 2 == 0 {
        out.push((d / 2, 0));
    }
    out
}

/// Harmonic part of `τ_d` on an `n`-dimensional Cartan subalgebra.
fn harmonic_terms(d: u32, kappa: f64, n: usize) -> Vec<Term> {
    if d == 2 {
        return vec![Term { coeff: 1.0, radial: 1, trace: 0 }];
    }
    let lead = (0, d);
    let unknowns = degree_basis(d, 1);
    let eqs = degree_basis(d - 2, 0);
    debug_assert_eq!(unknowns.len(), eqs.len());
    let k = unknowns.len();
    let index: HashMap<Mono, usize> = eqs.iter().enumerate().map(|(i, m)| (*m, i)).collect();
    let nf = n as f64;
    let mut a = DMatrix::zeros(k, k);
    let mut b = nalgebra::DVector::zeros(k);
    for (mono, c) in laplacian(lead, kappa, nf) {
        b[index[&mono]] -= c;
    }
    for (u, mono) in unknowns.iter().enumerate() {
        for (img, c) in laplacian(*mono, kappa, nf) {
            a[(index[&img], u)] += c;
        }
    }
    let coeffs = if k == 0 {
        nalgebra::DVector::zeros(0)
    } else {
        a.lu().solve(&b).expect("harmonic projection system is triangular")
    };
    let mut terms = vec![Term { coeff: 1.0, radial: 0, trace: d }];
    for (mono, c) in unknowns.iter().zip(coeffs.iter()) {
        if *c != 0.0 {
            terms.push(Term { coeff: *c, radial: mono.0, trace: mono.1 });
        }
    }
    terms
}

fn family_degrees(family: Family, l: usize) -> Vec<(usize, GeneratorKind)> {
    let tp = GeneratorKind::TracePower;
    let mut out: Vec<(usize, GeneratorKind)> = match family {
        Family::A => (2..=l + 1).map(|d| (d, tp)).collect(),
        Family::B | Family::C => (1..=l).map(|k| (2 * k, tp)).collect(),
        Family::D => {
            let mut v: Vec<_> = (1..l).map(|k| (2 * k, tp)).collect();
            v.push((l, GeneratorKind::Pfaffian));
            v
        }
    };
    // stable: trace powers stay ahead of the Pfaffian on equal degree
    out.sort_by_key(|(d, _)| *d);
    out
}

impl InvariantSet {
    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.generators.iter().map(|g| g.degree).collect()
    }

    pub fn scales(&self) -> Vec<f64> {
        self.generators.iter().map(|g| g.scale).collect()
    }

    pub fn algebra(&self) -> &Arc<LieAlgebraData> {
        &self.alg
    }

    pub fn cartan(&self) -> &CartanData {
        &self.cartan
    }

    fn max_trace(&self) -> u32 {
        self.generators
            .iter()
            .flat_map(|g| g.terms.iter().map(|t| t.trace))
            .max()
            .unwrap_or(0)
    }

    fn combine(&self, g: &Generator, r2: f64, tau: &[f64]) -> f64 {
        g.terms
            .iter()
            .map(|t| {
                let tr = if t.trace == 0 { 1.0 } else { tau[t.trace as usize] };
                t.coeff * r2.powi(t.radial as i32) * tr
            })
            .sum()
    }

    /// `p(ξ)` through the matrix realization.
    pub fn eval_p(&self, xi: &Covector) -> Result<Vec<f64>> {
        check_dim(self.alg.dim, xi.len())?;
        Ok(self.p(xi))
    }

    /// `p'(ξ) = (p_2, ..., p_l)`.
    pub fn eval_p_prime(&self, xi: &Covector) -> Result<Vec<f64>> {
        let mut p = self.eval_p(xi)?;
        p.remove(0);
        Ok(p)
    }

    pub(crate) fn p(&self, xi: &[f64]) -> Vec<f64> {
        let family = self.alg.family();
        let m = self.alg.matrix_of(xi);
        let r2 = linalg::dot(xi, xi);
        let top = self.max_trace();
        let mut tau = vec![0.0; top as usize + 1];
        let mut power = m.clone();
        for k in 1..=top {
            if k > 1 {
                power = &power * &m;
            }
            tau[k as usize] = (trace_weight(family, k) * power.trace()).re;
        }
        self.generators
            .iter()
            .map(|g| {
                let raw = match g.kind {
                    GeneratorKind::TracePower => self.combine(g, r2, &tau),
                    GeneratorKind::Pfaffian => pfaffian(&m.map(|z| z.re)),
                };
                g.scale * raw
            })
            .collect()
    }

    /// `q = p ∘ embed` on `t*` coordinates.
    pub fn q(&self, xi_t: &[f64]) -> Vec<f64> {
        self.p(&self.cartan.embed(xi_t))
    }

    pub fn q_prime(&self, xi_t: &[f64]) -> Vec<f64> {
        let mut q = self.q(xi_t);
        q.remove(0);
        q
    }

    /// Gradient of every generator with respect to the coordinates of `ξ`.
    pub fn gradients(&self, xi: &[f64]) -> Vec<Vec<f64>> {
        let alg = &self.alg;
        let family = alg.family();
        let m = alg.matrix_of(xi);
        let r2 = linalg::dot(xi, xi);
        let top = self.max_trace() as usize;
        // powers[k] = M^k
        let mut powers: Vec<CMatrix> = vec![CMatrix::identity(m.nrows(), m.nrows())];
        for k in 1..=top {
            powers.push(&powers[k - 1] * &m);
        }
        let tau: Vec<f64> = (0..=top)
            .map(|k| if k == 0 { 0.0 } else { (trace_weight(family, k as u32) * powers[k].trace()).re })
            .collect();
        // grad_tau[k][c] = Re(w_k k tr(M^{k-1} e_c))
        let mut grad_tau: Vec<Vec<f64>> = vec![Vec::new(); top + 1];
        for k in 1..=top {
            let w = trace_weight(family, k as u32) * (k as f64);
            let p = &powers[k - 1];
            grad_tau[k] = alg.basis.iter().map(|e| (w * trace_product(p, e)).re).collect();
        }
        let dim = alg.dim;
        self.generators
            .iter()
            .map(|g| {
                let mut grad = vec![0.0; dim];
                match g.kind {
                    GeneratorKind::TracePower => {
                        for t in &g.terms {
                            let j = t.radial as i32;
                            let (tr, dtr) = if t.trace == 0 {
                                (1.0, None)
                            } else {
                                (tau[t.trace as usize], Some(&grad_tau[t.trace as usize]))
                            };
                            if j > 0 {
                                let c = t.coeff * 2.0 * j as f64 * r2.powi(j - 1) * tr;
                                linalg::axpy(c, xi, &mut grad);
                            }
                            if let Some(d) = dtr {
                                linalg::axpy(t.coeff * r2.powi(j), d, &mut grad);
                            }
                        }
                    }
                    GeneratorKind::Pfaffian => {
                        let dpf = pfaffian_gradient(&m.map(|z| z.re));
                        for (c, e) in alg.basis.iter().enumerate() {
                            grad[c] = dpf.iter().zip(e.iter()).map(|(a, z)| a * z.re).sum::<f64>();
                        }
                    }
                }
                linalg::scaled(&grad, g.scale)
            })
            .collect()
    }

    /// `l x dim` Jacobian of `p` at `ξ`.
    pub fn jacobian(&self, xi: &[f64]) -> DMatrix<f64> {
        let g = self.gradients(xi);
        DMatrix::from_fn(g.len(), self.alg.dim, |i, j| g[i][j])
    }

    /// Unscaled generator values and `t`-gradients from the spectrum of `x`.
    fn raw_on_t(&self, x: &[f64]) -> Vec<(f64, Vec<f64>)> {
        let l = x.len();
        let family = self.alg.family();
        let r2 = linalg::dot(x, x);
        let top = self.max_trace() as usize;
        let eig: Vec<f64> = match family {
            Family::A => linalg::mat_vec(&self.spectral, x),
            _ => x.to_vec(),
        };
        let mut tau = vec![0.0; top + 1];
        let mut dtau = vec![vec![0.0; l]; top + 1];
        for k in 1..=top {
            tau[k] = eig.iter().map(|a| a.powi(k as i32)).sum();
            let de: Vec<f64> = eig.iter().map(|a| k as f64 * a.powi(k as i32 - 1)).collect();
            dtau[k] = match family {
                Family::A => linalg::mat_vec(&self.spectral.transpose(), &de),
                _ => de,
            };
        }
        self.generators
            .iter()
            .map(|g| match g.kind {
                GeneratorKind::TracePower => {
                    let mut grad = vec![0.0; l];
                    let mut val = 0.0;
                    for t in &g.terms {
                        let j = t.radial as i32;
                        let (tr, d) = if t.trace == 0 { (1.0, None) } else { (tau[t.trace as usize], Some(&dtau[t.trace as usize])) };
                        val += t.coeff * r2.powi(j) * tr;
                        if j > 0 {
                            linalg::axpy(t.coeff * 2.0 * j as f64 * r2.powi(j - 1) * tr, x, &mut grad);
                        }
                        if let Some(d) = d {
                            linalg::axpy(t.coeff * r2.powi(j), d, &mut grad);
                        }
                    }
                    (val, grad)
                }
                GeneratorKind::Pfaffian => {
                    let c = 2f64.powf(-(l as f64) / 2.0);
                    let val = c * x.iter().product::<f64>();
                    let grad = (0..l)
                        .map(|i| c * x.iter().enumerate().filter(|(k, _)| *k != i).map(|(_, v)| v).product::<f64>())
                        .collect();
                    (val, grad)
                }
            })
            .collect()
    }

    /// Closed-form `q` through the spectrum, bypassing the matrix realization.
    pub fn q_spectral(&self, x: &[f64]) -> Vec<f64> {
        self.raw_on_t(x)
            .into_iter()
            .zip(&self.generators)
            .map(|((v, _), g)| g.scale * v)
            .collect()
    }
}

/// `tr(A B)` without forming the product.
fn trace_product(a: &CMatrix, b: &CMatrix) -> C64 {
    let n = a.nrows();
    let mut acc = Complex::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// Maximizes `|f|` over the unit sphere by projected gradient ascent from
/// several starting points.
fn sphere_max_abs<F, R>(f: F, l: usize, rng: &mut R) -> f64
where
    F: Fn(&[f64]) -> (f64, Vec<f64>),
    R: Rng,
{
    let mut starts: Vec<Vec<f64>> = Vec::new();
    for k in 0..l {
        for s in [1.0, -1.0] {
            let mut e = vec![0.0; l];
            e[k] = s;
            starts.push(e);
        }
    }
    for _ in 0..48 {
        starts.push(sampling::unit_vec(rng, l));
    }
    let mut best = 0.0_f64;
    for mut x in starts {
        let (v0, _) = f(&x);
        let sign = if v0 >= 0.0 { 1.0 } else { -1.0 };
        let mut val = sign * v0;
        let mut eta = 0.1;
        for _ in 0..4000 {
            let (_, g) = f(&x);
            let radial = linalg::dot(&g, &x);
            let tang: Vec<f64> = g.iter().zip(&x).map(|(gi, xi)| sign * (gi - radial * xi)).collect();
            if linalg::norm(&tang) < 1e-15 {
                break;
            }
            let mut improved = false;
            while eta > 1e-16 {
                let mut y: Vec<f64> = x.iter().zip(&tang).map(|(a, b)| a + eta * b).collect();
                let n = linalg::norm(&y);
                y.iter_mut().for_each(|v| *v /= n);
                let fy = sign * f(&y).0;
                if fy > val {
                    x = y;
                    val = fy;
                    eta *= 1.5;
                    improved = true;
                    break;
                }
                eta *= 0.5;
            }
            if !improved {
                break;
            }
        }
        best = best.max(val.abs());
    }
    best
}

/// Builds `p_1, ..., p_l`, normalizes them and checks independence.
pub fn invariant_generators(alg: Arc<LieAlgebraData>, cartan: &CartanData) -> Result<InvariantSet> {
    let family = alg.family();
    let l = alg.rank;
    let n = alg.matrix_size;
    let kappa = match family {
        Family::A => 1.0 - 1.0 / n as f64,
        _ => 1.0,
    };
    let generators: Vec<Generator> = family_degrees(family, l)
        .into_iter()
        .map(|(d, kind)| Generator {
            degree: d,
            kind,
            terms: match kind {
                GeneratorKind::TracePower => harmonic_terms(d as u32, kappa, l),
                GeneratorKind::Pfaffian => Vec::new(),
            },
            scale: 1.0,
        })
        .collect();
    let spectral = match family {
        Family::A => DMatrix::from_fn(n, l, |j, c| alg.basis[alg.cartan_indices[c]][(j, j)].im),
        _ => DMatrix::zeros(0, 0),
    };
    let mut set = InvariantSet {
        alg: alg.clone(),
        cartan: cartan.clone(),
        generators,
        spectral,
    };

    let mut rng = sampling::trial_rng(0x1a2b_3c4d, 0);
    for i in 1..set.generators.len() {
        let peak = sphere_max_abs(
            |x| {
                let mut all = set.raw_on_t(x);
                all.swap_remove(i)
            },
            l,
            &mut rng,
        );
        if !(peak > 0.0) {
            return Err(Error::IndependenceCheckFailed(0.0));
        }
        set.generators[i].scale = 1.0 / peak;
    }

    let mut rng = sampling::trial_rng(0x1a2b_3c4d, 1);
    let xi = sampling::unit_vec(&mut rng, alg.dim);
    let sv = linalg::singular_values(&set.jacobian(&xi));
    let smallest = sv.last().cloned().unwrap_or(0.0);
    if sv.len() < l || !(smallest > 1e-8) {
        return Err(Error::IndependenceCheckFailed(smallest));
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{build_algebra, LieAlgebraSpec};
    use crate::cartan::compute_roots;
    use std::f64::consts::PI;

    fn inv(f: Family, r: usize) -> InvariantSet {
        let alg = Arc::new(build_algebra(&LieAlgebraSpec::new(f, r).unwrap()).unwrap());
        let (c, _) = compute_roots(&alg).unwrap();
        invariant_generators(alg, &c).unwrap()
    }

    #[test]
    fn degrees_per_family() {
        assert_eq!(family_degrees(Family::A, 3).iter().map(|d| d.0).collect::<Vec<_>>(), vec![2, 3, 4]);
        assert_eq!(family_degrees(Family::C, 3).iter().map(|d| d.0).collect::<Vec<_>>(), vec![2, 4, 6]);
        let d4 = family_degrees(Family::D, 4);
        assert_eq!(d4.iter().map(|d| d.0).collect::<Vec<_>>(), vec![2, 4, 4, 6]);
        assert_eq!(d4[1].1, GeneratorKind::TracePower);
        assert_eq!(d4[2].1, GeneratorKind::Pfaffian);
    }

    #[test]
    fn harmonic_sextic_in_four_variables() {
        // hand computation: Σx⁶ - (5/4) r² Σx⁴ + (5/16) r⁶ is harmonic in R⁴
        let t = harmonic_terms(6, 1.0, 4);
        let get = |j, m| t.iter().find(|x| x.radial == j && x.trace == m).map(|x| x.coeff).unwrap();
        assert!((get(0, 6) - 1.0).abs() < 1e-14);
        assert!((get(1, 4) + 1.25).abs() < 1e-14);
        assert!((get(3, 0) - 5.0 / 16.0).abs() < 1e-14);
    }

    #[test]
    fn harmonic_terms_have_zero_laplacian_numerically() {
        // oracle: five-point finite-difference Laplacian of Σx^m-based polynomial in R^3
        let terms = harmonic_terms(6, 1.0, 3);
        let f = |x: &[f64]| -> f64 {
            let r2: f64 = x.iter().map(|v| v * v).sum();
            terms
                .iter()
                .map(|t| {
                    let tr = if t.trace == 0 { 1.0 } else { x.iter().map(|v| v.powi(t.trace as i32)).sum() };
                    t.coeff * r2.powi(t.radial as i32) * tr
                })
                .sum()
        };
        let x = [0.3, -0.7, 0.5];
        let h = 1e-3;
        let mut lap = 0.0;
        for k in 0..3 {
            let mut a = x;
            let mut b = x;
            a[k] += h;
            b[k] -= h;
            lap += (f(&a) - 2.0 * f(&x) + f(&b)) / (h * h);
        }
        assert!(lap.abs() < 1e-5, "{lap}");
    }

    #[test]
    fn su3_generators_match_closed_forms() {
        let s = inv(Family::A, 2);
        assert!((s.generators[1].scale - 6f64.sqrt()).abs() < 1e-10);
        for &(r, th) in &[(1.0, 0.0), (1.0, PI / 6.0), (0.7, 0.3), (2.0, -0.4)] {
            let q = s.q(&[r * f64::cos(th), r * f64::sin(th)]);
            assert!((q[0] - r * r).abs() < 1e-12);
            assert!((q[1] - r.powi(3) * (3.0 * th).sin()).abs() < 1e-9);
        }
    }

    #[test]
    fn spectral_form_matches_matrix_form() {
        for (f, r) in [(Family::A, 3), (Family::B, 3), (Family::C, 2), (Family::D, 4), (Family::D, 3)] {
            let s = inv(f, r);
            let mut rng = sampling::trial_rng(5, 0);
            for _ in 0..10 {
                let x = sampling::normal_vec(&mut rng, r);
                let a = s.q(&x);
                let b = s.q_spectral(&x);
                for (u, v) in a.iter().zip(&b) {
                    assert!((u - v).abs() < 1e-12 * (1.0 + u.abs()), "{f}{r}: {a:?} vs {b:?}");
                }
            }
        }
    }

    #[test]
    fn gradients_match_finite_differences() {
        for (f, r) in [(Family::A, 2), (Family::B, 2), (Family::D, 4)] {
            let s = inv(f, r);
            let dim = s.alg.dim;
            let mut rng = sampling::trial_rng(9, 0);
            let xi = sampling::normal_vec(&mut rng, dim);
            let g = s.gradients(&xi);
            let h = 1e-6;
            for k in 0..dim {
                let mut a = xi.clone();
                let mut b = xi.clone();
                a[k] += h;
                b[k] -= h;
                let pa = s.p(&a);
                let pb = s.p(&b);
                for i in 0..s.rank() {
                    let fd = (pa[i] - pb[i]) / (2.0 * h);
                    assert!((fd - g[i][k]).abs() < 1e-6 * (1.0 + fd.abs()), "{f}{r} p{i} e{k}: {fd} vs {}", g[i][k]);
                }
            }
        }
    }

    #[test]
    fn normalized_peak_is_one() {
        for (f, r) in [(Family::B, 2), (Family::D, 4), (Family::A, 3)] {
            let s = inv(f, r);
            let mut rng = sampling::trial_rng(11, 0);
            for i in 1..s.rank() {
                let peak = sphere_max_abs(|x| s.raw_on_t(x).swap_remove(i), r, &mut rng);
                assert!((peak * s.generators[i].scale - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn zero_maps_to_zero() {
        for (f, r) in [(Family::A, 1), (Family::A, 2), (Family::C, 3), (Family::D, 2)] {
            let s = inv(f, r);
            assert!(s.p(&vec![0.0; s.alg.dim]).iter().all(|v| *v == 0.0));
        }
    }
}
