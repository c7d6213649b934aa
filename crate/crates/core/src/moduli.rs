//! Casimir functions on the sphere written as `h ∘ p'`, their
//! classification up to outer automorphisms, and the `su(3)` reference model.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::Family;
use crate::cartan::{is_regular, serialize_matrix, OuterGroupData};
use crate::error::{Error, Result};
use crate::expr::Expression;
use crate::invariants::{delta_sample, ChamberGrid};
use crate::linalg::{self, norm};
use crate::polynomial::Polynomial;
use crate::report::{Check, VerificationReport};
use crate::sampling;
use crate::LieSystem;

/// Values on a rectilinear grid, interpolated multilinearly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    /// Strictly increasing nodes per axis.
    pub axes: Vec<Vec<f64>>,
    /// Row-major values, last axis fastest.
    pub values: Vec<f64>,
}

const HULL_SLACK: f64 = 1e-9;

impl GridFunction {
    pub fn new(axes: Vec<Vec<f64>>, values: Vec<f64>) -> Result<Self> {
        let expected: usize = axes.iter().map(|a| a.len()).product();
        if axes.is_empty() || axes.iter().any(|a| a.len() < 2) {
            return Err(Error::GridEmpty);
        }
        if expected != values.len() {
            return Err(Error::DimensionMismatch { expected, got: values.len() });
        }
        if axes.iter().any(|a| a.windows(2).any(|w| !(w[1] > w[0]))) {
            return Err(Error::InvalidInput("grid axes must be strictly increasing".into()));
        }
        Ok(Self { axes, values })
    }

    /// Samples `f` on the tensor grid.
    pub fn sample(axes: Vec<Vec<f64>>, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let total: usize = axes.iter().map(|a| a.len()).product();
        let values = (0..total).map(|idx| f(&Self::node(&axes, idx))).collect();
        Self::new(axes, values)
    }

    fn node(axes: &[Vec<f64>], mut idx: usize) -> Vec<f64> {
        let mut x = vec![0.0; axes.len()];
        for (k, a) in axes.iter().enumerate().rev() {
            x[k] = a[idx % a.len()];
            idx /= a.len();
        }
        x
    }

    fn locate(&self, x: &[f64]) -> Result<Vec<(usize, f64)>> {
        self.axes
            .iter()
            .zip(x)
            .map(|(a, &v)| {
                let (lo, hi) = (a[0], a[a.len() - 1]);
                if v < lo - HULL_SLACK || v > hi + HULL_SLACK || v.is_nan() {
                    return Err(Error::DomainMismatch(format!("{v} outside [{lo}, {hi}]")));
                }
                let v = v.clamp(lo, hi);
                let i = a.partition_point(|node| *node <= v).clamp(1, a.len() - 1) - 1;
                Ok((i, (v - a[i]) / (a[i + 1] - a[i])))
            })
            .collect()
    }

    fn corner_value(&self, cell: &[(usize, f64)], mask: usize) -> f64 {
        let mut idx = 0;
        for (k, (i, _)) in cell.iter().enumerate() {
            let bit = (mask >> k) & 1;
            idx = idx * self.axes[k].len() + i + bit;
        }
        self.values[idx]
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        let cell = self.locate(x)?;
        let d = cell.len();
        let mut acc = 0.0;
        for mask in 0..(1usize << d) {
            let w: f64 = cell
                .iter()
                .enumerate()
                .map(|(k, (_, t))| if (mask >> k) & 1 == 1 { *t } else { 1.0 - t })
                .product();
            acc += w * self.corner_value(&cell, mask);
        }
        Ok(acc)
    }

    /// Gradient of the interpolant inside the cell containing `x`.
    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        let cell = self.locate(x)?;
        let d = cell.len();
        let mut g = vec![0.0; d];
        for (j, gj) in g.iter_mut().enumerate() {
            let (i, _) = cell[j];
            let width = self.axes[j][i + 1] - self.axes[j][i];
            for mask in 0..(1usize << d) {
                let w: f64 = cell
                    .iter()
                    .enumerate()
                    .map(|(k, (_, t))| {
                        let hi = (mask >> k) & 1 == 1;
                        if k == j {
                            if hi { 1.0 / width } else { -1.0 / width }
                        } else if hi {
                            *t
                        } else {
                            1.0 - t
                        }
                    })
                    .product();
                *gj += w * self.corner_value(&cell, mask);
            }
        }
        Ok(g)
    }
}

/// A function on `Δ'`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HFunction {
    Polynomial { polynomial: Polynomial },
    Grid { grid: GridFunction },
    Expression { expression: Expression },
}

impl HFunction {
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        match self {
            HFunction::Polynomial { polynomial } => Ok(polynomial.eval(x)),
            HFunction::Grid { grid } => grid.eval(x),
            HFunction::Expression { expression } => Ok(expression.eval(x)),
        }
    }

    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        match self {
            HFunction::Polynomial { polynomial } => Ok(polynomial.gradient(x)),
            HFunction::Grid { grid } => grid.gradient(x),
            HFunction::Expression { expression } => {
                let mut g = expression.eval_with_gradient(x).1;
                g.resize(x.len(), 0.0);
                Ok(g)
            }
        }
    }

    /// Number of `Δ'` coordinates the function needs.
    pub fn arity(&self) -> usize {
        match self {
            HFunction::Polynomial { polynomial } => polynomial.nvars,
            HFunction::Grid { grid } => grid.axes.len(),
            HFunction::Expression { expression } => expression.nvars(),
        }
    }
}

/// `f = h ∘ p'` on the unit sphere, or `e^{h ∘ p'}` when `exp_flag` is set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CasimirModel {
    pub h: HFunction,
    pub exp_flag: bool,
}

impl CasimirModel {
    pub fn new(h: HFunction) -> Self {
        Self { h, exp_flag: false }
    }

    pub fn exponential(h: HFunction) -> Self {
        Self { h, exp_flag: true }
    }

    pub fn polynomial(p: Polynomial) -> Self {
        Self::new(HFunction::Polynomial { polynomial: p })
    }

    pub fn expression(src: &str) -> Result<Self> {
        Ok(Self::new(HFunction::Expression { expression: Expression::parse(src)? }))
    }

    /// Checks the model against an algebra with `l - 1` coordinates on `Δ'`.
    pub fn check_arity(&self, coords: usize) -> Result<()> {
        let a = self.h.arity();
        if a > coords {
            return Err(Error::DimensionMismatch { expected: coords, got: a });
        }
        Ok(())
    }

    /// Value at a point of `Δ'`.
    pub fn value_on_delta(&self, x: &[f64]) -> Result<f64> {
        let h = self.h.eval(x)?;
        Ok(if self.exp_flag { h.exp() } else { h })
    }

    /// Value and gradient at a point of `Δ'`.
    pub fn value_and_gradient_on_delta(&self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        let h = self.h.eval(x)?;
        let mut g = self.h.gradient(x)?;
        if self.exp_flag {
            let e = h.exp();
            g.iter_mut().for_each(|v| *v *= e);
            return Ok((e, g));
        }
        Ok((h, g))
    }

    /// `f(ξ/|ξ|)`.
    pub fn eval(&self, sys: &LieSystem, xi: &[f64]) -> Result<f64> {
        let r = norm(xi);
        if r == 0.0 {
            return Err(Error::GradientUnavailable("Casimir is undefined at the origin".into()));
        }
        let mut p = sys.invariants.p(&linalg::scaled(xi, 1.0 / r));
        p.remove(0);
        self.value_on_delta(&p)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EquivalenceReport {
    pub equivalent: bool,
    /// Index into the outer group of the best representative.
    pub witness: usize,
    pub witness_label: String,
    #[serde(serialize_with = "serialize_matrix")]
    pub witness_matrix: DMatrix<f64>,
    /// Residual of the best representative.
    pub residual: f64,
    /// Residual per representative, in group order.
    pub residuals: Vec<f64>,
    pub tolerance: f64,
    pub grid_points: usize,
}

/// Human-readable label of an outer representative.
pub fn outer_label(out: &OuterGroupData, idx: usize) -> String {
    let perm = &out.elements[idx].permutation;
    if perm.iter().enumerate().all(|(i, p)| i == *p) {
        "identity".into()
    } else if out.order() == 2 {
        "γ".into()
    } else {
        format!("σ{perm:?}")
    }
}

/// Points of `Δ'` from a chamber-sphere grid.
pub fn delta_prime_grid(sys: &LieSystem, resolution: usize) -> Result<Vec<Vec<f64>>> {
    Ok(delta_sample(sys, &ChamberGrid::sphere(resolution))?.points)
}

/// Decides whether `f = g ∘ a` on the grid for some outer representative `a`.
pub fn classify_pair(f: &CasimirModel, g: &CasimirModel, out: &OuterGroupData, grid: &[Vec<f64>]) -> Result<EquivalenceReport> {
    if grid.is_empty() || out.elements.is_empty() {
        return Err(Error::GridEmpty);
    }
    let fv: Vec<f64> = grid.iter().map(|x| f.value_on_delta(x)).collect::<Result<_>>()?;
    let sup_g = grid
        .iter()
        .map(|x| g.value_on_delta(x).map(f64::abs))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let tolerance = 1e-6 * (1.0 + sup_g);
    let residuals: Vec<f64> = out
        .elements
        .iter()
        .map(|a| {
            let devs: Vec<f64> = grid
                .par_iter()
                .zip(&fv)
                .map(|(x, fx)| {
                    let y = linalg::mat_vec(&a.on_invariants, x);
                    g.value_on_delta(&y).map(|gy| (fx - gy).abs())
                })
                .collect::<Result<_>>()?;
            Ok(devs.into_iter().fold(0.0, |m: f64, v| if v.is_nan() { f64::NAN } else { m.max(v) }))
        })
        .collect::<Result<_>>()?;
    let (witness, residual) = residuals
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |(bi, bv), (i, v)| if *v < bv { (i, *v) } else { (bi, bv) });
    Ok(EquivalenceReport {
        equivalent: residual < tolerance,
        witness,
        witness_label: outer_label(out, witness),
        witness_matrix: out.elements[witness].on_invariants.clone(),
        residual,
        residuals,
        tolerance,
        grid_points: grid.len(),
    })
}

/// Lexicographically smallest value vector of `f ∘ a` over the outer group.
pub fn canonical_form(f: &CasimirModel, out: &OuterGroupData, grid: &[Vec<f64>]) -> Result<Vec<f64>> {
    if grid.is_empty() {
        return Err(Error::GridEmpty);
    }
    let mut best: Option<Vec<f64>> = None;
    for a in &out.elements {
        let v: Vec<f64> = grid
            .iter()
            .map(|x| f.value_on_delta(&linalg::mat_vec(&a.on_invariants, x)))
            .collect::<Result<_>>()?;
        let smaller = match &best {
            None => true,
            Some(b) => v.iter().zip(b).find(|(p, q)| p != q).is_some_and(|(p, q)| p < q),
        };
        if smaller {
            best = Some(v);
        }
    }
    Ok(best.unwrap_or_default())
}

/// Constants of the `su(3)` model.
#[derive(Clone, Debug, Serialize)]
pub struct Su3Reference {
    /// Chamber interval of the angle `θ` of `A(θ)`.
    pub theta_interval: (f64, f64),
    pub delta_prime: (f64, f64),
    pub weyl_order: usize,
    pub outer_order: usize,
    /// Action of the non-trivial outer automorphism on `Δ'`.
    pub gamma_on_delta_prime: f64,
}

pub fn su3_reference() -> Su3Reference {
    Su3Reference {
        theta_interval: (-PI / 6.0, PI / 6.0),
        delta_prime: (-1.0, 1.0),
        weyl_order: 6,
        outer_order: 2,
        gamma_on_delta_prime: -1.0,
    }
}

impl Su3Reference {
    /// `t*` coordinates of `A(θ)`.
    pub fn a_theta(&self, sys: &LieSystem, theta: f64) -> Vec<f64> {
        let (b, e) = sys.chamber_frame().expect("su(3) has rank 2");
        (0..2).map(|k| theta.cos() * b[k] + theta.sin() * e[k]).collect()
    }

    /// `γ(f)(x) = f(-x)` on functions of `Δ'`.
    pub fn gamma(&self, f: impl Fn(f64) -> f64) -> impl Fn(f64) -> f64 {
        move |x| f(-x)
    }
}

/// All six clauses of the `su(3)` model as one report.
pub fn su3_report(sys: &LieSystem, seed: u64) -> Result<VerificationReport> {
    if sys.alg.family() != Family::A || sys.rank() != 2 {
        return Err(Error::InvalidInput(format!("su(3) reference needs su(3), got {}", sys.name())));
    }
    let rf = su3_reference();
    let mut report = VerificationReport::new("su3", &sys.name(), Some(seed));
    report.tolerance = 1e-9;

    // (i) unit norm and unit speed of θ ↦ A(θ)
    let mut norm_dev: f64 = 0.0;
    let mut speed_dev: f64 = 0.0;
    let h = 1e-6;
    for k in 0..=100 {
        let th = -PI + 2.0 * PI * k as f64 / 100.0;
        let a = sys.cartan.embed(&rf.a_theta(sys, th));
        norm_dev = norm_dev.max((a.norm() - 1.0).abs());
        let ap = sys.cartan.embed(&rf.a_theta(sys, th + h));
        let am = sys.cartan.embed(&rf.a_theta(sys, th - h));
        let speed = norm(&linalg::sub(&ap, &am)) / (2.0 * h);
        speed_dev = speed_dev.max((speed - 1.0).abs());
    }
    report.push(Check::below("i_unit_norm", norm_dev, 1e-9));
    report.push(Check::below("i_unit_speed", speed_dev, 1e-6));

    // (ii) q(rA(θ)) = (r², r³ sin 3θ)
    let mut q_dev: f64 = 0.0;
    for i in 0..100 {
        let r = 2.0 * (i + 1) as f64 / 100.0;
        for j in 0..100 {
            let th = rf.theta_interval.0 + (rf.theta_interval.1 - rf.theta_interval.0) * j as f64 / 99.0;
            let q = sys.invariants.q(&linalg::scaled(&rf.a_theta(sys, th), r));
            q_dev = q_dev.max((q[0] - r * r).abs()).max((q[1] - r.powi(3) * (3.0 * th).sin()).abs());
        }
    }
    report.push(Check::below("ii_q_formulas", q_dev, 1e-9));

    // (iii) Δ = {x³ ≥ y²}
    let trials = 10_000;
    let worst_gap = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = sampling::trial_rng(seed, t as u64);
            let xi = sampling::normal_vec(&mut rng, sys.dim());
            let p = sys.invariants.p(&xi);
            (p[1] * p[1] - p[0].powi(3)).max(0.0)
        })
        .reduce(|| 0.0, f64::max);
    report.push(Check::below("iii_delta_inequality", worst_gap, 1e-9));
    report.samples = trials;

    // (iv) Δ' = [-1, 1]
    let cloud = delta_sample(sys, &ChamberGrid::sphere(1001))?;
    let lo = cloud.points.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
    let hi = cloud.points.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
    report.push(Check::below("iv_delta_prime_endpoints", (lo + 1.0).abs().max((hi - 1.0).abs()), 1e-6));

    // (v) Weyl group acts by permuting the diagonal entries
    let mut rng = sampling::trial_rng(seed, trials as u64);
    let x = sampling::normal_vec(&mut rng, 2);
    let diag = |v: &[f64]| -> Vec<f64> {
        let m = sys.alg.matrix_of(&sys.cartan.embed(v));
        (0..3).map(|k| m[(k, k)].im).collect()
    };
    let d0 = diag(&x);
    let mut perms = Vec::new();
    let mut perm_dev: f64 = 0.0;
    for w in &sys.weyl.elements {
        let d = diag(&linalg::mat_vec(&w.matrix, &x));
        // match each entry of d to an entry of d0
        let perm: Vec<usize> = d
            .iter()
            .map(|v| (0..3).min_by(|&a, &b| (d0[a] - v).abs().partial_cmp(&(d0[b] - v).abs()).unwrap()).unwrap())
            .collect();
        for (k, p) in perm.iter().enumerate() {
            perm_dev = perm_dev.max((d[k] - d0[*p]).abs());
        }
        perms.push(perm);
    }
    perms.sort();
    perms.dedup();
    let is_s3 = sys.weyl.order() == rf.weyl_order && perms.len() == 6 && perms.iter().all(|p| {
        let mut s = p.clone();
        s.sort();
        s == vec![0, 1, 2]
    });
    report.push(Check::below("v_weyl_permutations", if is_s3 { perm_dev } else { f64::INFINITY }, 1e-9));

    // (vi) γ: -1 times a Weyl element on t, x ↦ -x on Δ'
    let mut gamma_dev = f64::INFINITY;
    if sys.outer.order() == rf.outer_order {
        let g = &sys.outer.elements[1];
        let neg = -&g.on_t;
        let in_weyl = sys.weyl.find(&neg, 1e-9).is_some();
        let on_delta = (g.on_invariants[(0, 0)] - rf.gamma_on_delta_prime).abs();
        if in_weyl {
            gamma_dev = on_delta;
        }
    }
    report.push(Check::below("vi_gamma_action", gamma_dev, 1e-9));

    report.max_residual = report
        .checks
        .iter()
        .map(|c| c.value)
        .fold(0.0, |m: f64, v| if v.is_finite() { m.max(v) } else { f64::INFINITY });
    Ok(report)
}

/// Runs [`su3_report`] and raises `ReferenceMismatch` on the first failing clause.
pub fn verify_su3(sys: &LieSystem, seed: u64) -> Result<VerificationReport> {
    let report = su3_report(sys, seed)?;
    if let Some(c) = report.checks.iter().find(|c| !c.passed) {
        return Err(Error::ReferenceMismatch {
            clause: c.name.clone(),
            detail: format!("{:.3e} vs bound {:.3e}", c.value, c.bound),
        });
    }
    Ok(report)
}

/// Regularity helper used by the CLI and flows.
pub fn leaf_dimension(sys: &LieSystem, xi: &[f64]) -> usize {
    is_regular(&sys.alg, xi).leaf_dimension
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_interpolation_is_exact_on_multilinear() {
        let axes = vec![vec![-1.0, 0.0, 0.5, 1.0], vec![0.0, 1.0, 2.0]];
        let f = |x: &[f64]| 1.0 + 2.0 * x[0] - x[1] + 0.5 * x[0] * x[1];
        let g = GridFunction::sample(axes, f).unwrap();
        for x in [[0.3, 0.4], [-0.9, 1.7], [1.0, 2.0], [-1.0, 0.0]] {
            assert!((g.eval(&x).unwrap() - f(&x)).abs() < 1e-14);
            let grad = g.gradient(&x).unwrap();
            assert!((grad[0] - (2.0 + 0.5 * x[1])).abs() < 1e-13);
            assert!((grad[1] - (-1.0 + 0.5 * x[0])).abs() < 1e-13);
        }
    }

    #[test]
    fn grid_domain_checks() {
        let g = GridFunction::sample(vec![vec![-1.0, 1.0]], |x| x[0]).unwrap();
        assert!(g.eval(&[1.0 + 1e-10]).is_ok());
        assert!(matches!(g.eval(&[1.1]), Err(Error::DomainMismatch(_))));
        assert!(matches!(GridFunction::new(vec![vec![0.0]], vec![1.0]), Err(Error::GridEmpty)));
    }

    #[test]
    fn model_json_round_trip() {
        let m = CasimirModel::exponential(HFunction::Polynomial { polynomial: Polynomial::univariate(&[0.0, 0.25]) });
        let s = serde_json::to_string(&m).unwrap();
        let back: CasimirModel = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        assert!(s.contains("\"kind\":\"polynomial\""));
        assert!(s.contains("\"exp_flag\":true"));
    }
}
