//! Symplectic area of the `su(2)` coadjoint spheres by quadrature.

use nalgebra::{DMatrix, Vector3};
use serde::Serialize;
use std::collections::HashMap;
use std::f64::consts::PI;

use crate::algebra::Family;
use crate::cartan::poisson_matrix;
use crate::error::{Error, Result};
use crate::linalg::{self, dot, expm_anti_hermitian};
use crate::report::{Check, VerificationReport};
use crate::LieSystem;

pub const DEFAULT_REFINEMENTS: usize = 5;

/// Icosahedron refined `k` times by edge midpoints pushed to the unit sphere.
/// Faces are oriented outward.
pub fn icosphere(k: usize) -> (Vec<Vector3<f64>>, Vec<[usize; 3]>) {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let mut v: Vec<Vector3<f64>> = [
        (-1.0, phi, 0.0),
        (1.0, phi, 0.0),
        (-1.0, -phi, 0.0),
        (1.0, -phi, 0.0),
        (0.0, -1.0, phi),
        (0.0, 1.0, phi),
        (0.0, -1.0, -phi),
        (0.0, 1.0, -phi),
        (phi, 0.0, -1.0),
        (phi, 0.0, 1.0),
        (-phi, 0.0, -1.0),
        (-phi, 0.0, 1.0),
    ]
    .iter()
    .map(|&(x, y, z)| Vector3::new(x, y, z).normalize())
    .collect();
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ];
    for _ in 0..k {
        let mut cache: HashMap<(usize, usize), usize> = HashMap::new();
        let mut mid = |a: usize, b: usize, v: &mut Vec<Vector3<f64>>| -> usize {
            let key = (a.min(b), a.max(b));
            *cache.entry(key).or_insert_with(|| {
                v.push(((v[a] + v[b]) * 0.5).normalize());
                v.len() - 1
            })
        };
        let mut next = Vec::with_capacity(faces.len() * 4);
        for [a, b, c] in faces {
            let ab = mid(a, b, &mut v);
            let bc = mid(b, c, &mut v);
            let ca = mid(c, a, &mut v);
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    for f in faces.iter_mut() {
        let n = (v[f[1]] - v[f[0]]).cross(&(v[f[2]] - v[f[0]]));
        if n.dot(&(v[f[0]] + v[f[1]] + v[f[2]])) < 0.0 {
            f.swap(1, 2);
        }
    }
    (v, faces)
}

// Six-point symmetric rule of degree 4 on the reference triangle.
const RULE: [(f64, f64, f64); 6] = [
    (0.445948490915965, 0.445948490915965, 0.223381589678011),
    (0.445948490915965, 0.108103018168070, 0.223381589678011),
    (0.108103018168070, 0.445948490915965, 0.223381589678011),
    (0.091576213509771, 0.091576213509771, 0.109951743655322),
    (0.091576213509771, 0.816847572980459, 0.109951743655322),
    (0.816847572980459, 0.091576213509771, 0.109951743655322),
];

/// Leaf symplectic form `ω(u, v) = a^T π b` where `π^T a = u`, `π^T b = v`.
fn leaf_form(pi: &DMatrix<f64>, u: &[f64], v: &[f64]) -> f64 {
    let pinv = pi.transpose().pseudo_inverse(1e-12 * pi.amax()).expect("svd converges");
    let a = linalg::mat_vec(&pinv, u);
    let b = linalg::mat_vec(&pinv, v);
    dot(&a, &linalg::mat_vec(pi, &b))
}

/// Smallest `s > 0` with `exp(s H) = 1` for the unit Cartan direction `H`
/// of `su(2)`.
pub fn minimal_lattice_time(sys: &LieSystem) -> f64 {
    let h = sys.alg.matrix_of(&sys.cartan.embed(&[1.0]));
    let top = h.iter().map(|z| z.norm()).fold(0.0, f64::max);
    2.0 * PI / top
}

#[derive(Clone, Debug, Serialize)]
pub struct PeriodResult {
    pub radius: f64,
    pub refinements: usize,
    pub triangles: usize,
    /// `∫ ω` over the orbit of radius `r`, outward orientation.
    pub area: f64,
    /// `ξ(X)` for `X` the minimal lattice element along `ξ`.
    pub xi_of_x: f64,
    pub relative_error: f64,
}

impl PeriodResult {
    pub fn to_report(&self) -> VerificationReport {
        let mut report = VerificationReport::new("su2-area", "su(2)", None);
        report.samples = self.triangles * RULE.len();
        report.tolerance = 1e-4;
        report.push(Check::below("relative_error", self.relative_error, 1e-4));
        report.max_residual = self.relative_error;
        report.worst_sample = Some(vec![self.radius, self.area, self.xi_of_x]);
        report
    }
}

/// Integrates the orbit symplectic form over the sphere of radius `r` and
/// compares with `ξ(X)`.
pub fn su2_period_check(sys: &LieSystem, r: f64, refinements: usize) -> Result<PeriodResult> {
    if sys.alg.family() != Family::A || sys.rank() != 1 {
        return Err(Error::InvalidInput(format!("period check needs su(2), got {}", sys.name())));
    }
    if refinements < 1 {
        return Err(Error::MeshTooCoarse(format!("{refinements} refinements, need at least 1")));
    }
    if !(r > 0.0) {
        return Err(Error::InvalidInput(format!("radius must be positive, got {r}")));
    }
    let s = minimal_lattice_time(sys);
    let x_elem = sys.cartan.embed(&[s]);
    let g = expm_anti_hermitian(&sys.alg.matrix_of(&x_elem));
    let n = g.nrows();
    let defect = (g - crate::linalg::CMatrix::identity(n, n)).norm();
    if defect > 1e-10 {
        return Err(Error::InvalidInput(format!("lattice element does not exponentiate to 1 ({defect:.2e})")));
    }
    let xi_dom = sys.cartan.embed(&[r]);
    let xi_of_x = dot(&xi_dom, &x_elem);

    let (v, faces) = icosphere(refinements);
    let mut area = 0.0;
    for [a, b, c] in &faces {
        let (p0, e1, e2) = (v[*a], v[*b] - v[*a], v[*c] - v[*a]);
        let mut acc = 0.0;
        for (s1, s2, w) in RULE {
            let y = p0 + e1 * s1 + e2 * s2;
            let ny = y.norm();
            let nrm = y / ny;
            let proj = |e: Vector3<f64>| (e - nrm * nrm.dot(&e)) * (r / ny);
            let (du, dv) = (proj(e1), proj(e2));
            let xi: Vec<f64> = (nrm * r).iter().cloned().collect();
            let pi = poisson_matrix(&sys.alg, &xi);
            let u: Vec<f64> = du.iter().cloned().collect();
            let vv: Vec<f64> = dv.iter().cloned().collect();
            acc += w * leaf_form(&pi, &u, &vv);
        }
        // the reference triangle has area 1/2
        area += 0.5 * acc;
    }
    let relative_error = (area - xi_of_x).abs() / xi_of_x.abs();
    Ok(PeriodResult {
        radius: r,
        refinements,
        triangles: faces.len(),
        area,
        xi_of_x,
        relative_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn icosphere_counts_and_orientation() {
        for k in 0..3 {
            let (v, f) = icosphere(k);
            assert_eq!(f.len(), 20 * 4usize.pow(k as u32));
            assert_eq!(v.len(), 10 * 4usize.pow(k as u32) + 2);
            for [a, b, c] in &f {
                let n = (v[*b] - v[*a]).cross(&(v[*c] - v[*a]));
                assert!(n.dot(&v[*a]) > 0.0);
            }
        }
    }

    #[test]
    fn rule_integrates_quartics_exactly() {
        // ∫_T x^a y^b over the reference triangle = a! b! / (a+b+2)!
        let fact = |n: u32| (1..=n).product::<u32>() as f64;
        for a in 0..=4u32 {
            for b in 0..=(4 - a) {
                let exact = fact(a) * fact(b) / fact(a + b + 2);
                let q: f64 = RULE.iter().map(|(x, y, w)| w * x.powi(a as i32) * y.powi(b as i32)).sum::<f64>() * 0.5;
                assert!((q - exact).abs() < 1e-14, "{a},{b}");
            }
        }
    }

    #[test]
    fn lattice_element_of_su2() {
        let s = LieSystem::new(Family::A, 1).unwrap();
        // H = diag(i, -i)/√2 so exp(sH) = 1 first at s = 2π√2
        assert!((minimal_lattice_time(&s) - 2.0 * PI * 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn coarse_mesh_rejected() {
        let s = LieSystem::new(Family::A, 1).unwrap();
        assert!(matches!(su2_period_check(&s, 1.0, 0), Err(Error::MeshTooCoarse(_))));
    }
}
