//! Lie-Poisson bivector, conformal deformations `f·π` by Casimirs,
//! Hamiltonian flows and the numerical checks of the Poisson identities.

mod flow;
mod period;

use nalgebra::DMatrix;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::Covector;
use crate::cartan::poisson_matrix;
use crate::error::{check_dim, Error, Result};
use crate::linalg::{self, dot, norm};
use crate::moduli::CasimirModel;
use crate::polynomial::Polynomial;
use crate::report::{Check, VerificationReport, Worst};
use crate::sampling;
use crate::LieSystem;

pub use flow::{default_step, flow_csv, hamiltonian_flow, FlowState};
pub use period::{icosphere, minimal_lattice_time, su2_period_check, PeriodResult, DEFAULT_REFINEMENTS};

/// A smooth function on `g*` (or on the complement of the origin).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctionModel {
    Constant { value: f64 },
    Coordinate { index: usize },
    Linear { coeffs: Vec<f64> },
    Polynomial { polynomial: Polynomial },
    /// The generator `p_{index+1}`.
    Invariant { index: usize },
    /// `h ∘ p'` extended zero-homogeneously off the sphere.
    Casimir { model: CasimirModel },
    /// `F(ξ/|ξ|)`.
    ZeroHomogeneous { inner: Box<FunctionModel> },
    /// `F(ξ/|ξ|)·b(|ξ|)` with a smooth bump `b` equal to 1 for `||ξ| - 1| ≤ width/2`.
    RadialCutoff { inner: Box<FunctionModel>, width: f64 },
}

fn smooth_step(s: f64) -> f64 {
    let psi = |t: f64| if t > 0.0 { (-1.0 / t).exp() } else { 0.0 };
    if s <= 0.0 {
        0.0
    } else if s >= 1.0 {
        1.0
    } else {
        psi(s) / (psi(s) + psi(1.0 - s))
    }
}

fn bump(r: f64, width: f64) -> (f64, f64) {
    let half = 0.5 * width;
    let s = ((r - 1.0).abs() - half) / half;
    let b = 1.0 - smooth_step(s);
    // derivative by central difference of the scalar profile
    let h = 1e-7 * half;
    let bs = |r: f64| 1.0 - smooth_step(((r - 1.0).abs() - half) / half);
    (b, (bs(r + h) - bs(r - h)) / (2.0 * h))
}

impl FunctionModel {
    pub fn coordinate(index: usize) -> Self {
        Self::Coordinate { index }
    }

    pub fn invariant(index: usize) -> Self {
        Self::Invariant { index }
    }

    pub fn casimir(model: CasimirModel) -> Self {
        Self::Casimir { model }
    }

    pub fn constant(value: f64) -> Self {
        Self::Constant { value }
    }

    /// True for kinds whose gradient is exact rather than interpolated.
    pub fn is_polynomial(&self) -> bool {
        matches!(
            self,
            Self::Constant { .. } | Self::Coordinate { .. } | Self::Linear { .. } | Self::Polynomial { .. } | Self::Invariant { .. }
        )
    }

    pub fn validate(&self, sys: &LieSystem) -> Result<()> {
        let dim = sys.dim();
        match self {
            Self::Coordinate { index } if *index >= dim => {
                Err(Error::InvalidInput(format!("coordinate {index} out of range for dimension {dim}")))
            }
            Self::Linear { coeffs } => check_dim(dim, coeffs.len()),
            Self::Polynomial { polynomial } => check_dim(dim, polynomial.nvars),
            Self::Invariant { index } if *index >= sys.rank() => {
                Err(Error::InvalidInput(format!("invariant {index} out of range for rank {}", sys.rank())))
            }
            Self::Casimir { model } => model.check_arity(sys.rank() - 1),
            Self::ZeroHomogeneous { inner } | Self::RadialCutoff { inner, .. } => inner.validate(sys),
            _ => Ok(()),
        }
    }

    pub fn value(&self, sys: &LieSystem, xi: &[f64]) -> Result<f64> {
        Ok(self.value_and_gradient(sys, xi)?.0)
    }

    pub fn gradient(&self, sys: &LieSystem, xi: &[f64]) -> Result<Vec<f64>> {
        Ok(self.value_and_gradient(sys, xi)?.1)
    }

    pub fn value_and_gradient(&self, sys: &LieSystem, xi: &[f64]) -> Result<(f64, Vec<f64>)> {
        check_dim(sys.dim(), xi.len())?;
        let dim = xi.len();
        match self {
            Self::Constant { value } => Ok((*value, vec![0.0; dim])),
            Self::Coordinate { index } => {
                let mut g = vec![0.0; dim];
                *g.get_mut(*index).ok_or_else(|| Error::InvalidInput(format!("coordinate {index}")))? = 1.0;
                Ok((xi[*index], g))
            }
            Self::Linear { coeffs } => {
                check_dim(dim, coeffs.len())?;
                Ok((dot(coeffs, xi), coeffs.clone()))
            }
            Self::Polynomial { polynomial } => {
                check_dim(dim, polynomial.nvars)?;
                Ok((polynomial.eval(xi), polynomial.gradient(xi)))
            }
            Self::Invariant { index } => {
                let p = sys.invariants.p(xi);
                let v = *p.get(*index).ok_or_else(|| Error::InvalidInput(format!("invariant {index}")))?;
                Ok((v, sys.invariants.gradients(xi).swap_remove(*index)))
            }
            Self::Casimir { model } => {
                let (u, r) = unit(xi)?;
                let grads = sys.invariants.gradients(&u);
                let mut p = sys.invariants.p(&u);
                p.remove(0);
                let (v, dh) = model.value_and_gradient_on_delta(&p)?;
                let mut g = vec![0.0; dim];
                for (c, gp) in dh.iter().zip(&grads[1..]) {
                    linalg::axpy(*c, gp, &mut g);
                }
                Ok((v, tangential(&g, &u, r)))
            }
            Self::ZeroHomogeneous { inner } => {
                let (u, r) = unit(xi)?;
                let (v, g) = inner.value_and_gradient(sys, &u)?;
                Ok((v, tangential(&g, &u, r)))
            }
            Self::RadialCutoff { inner, width } => {
                let (u, r) = unit(xi)?;
                let (v, g) = inner.value_and_gradient(sys, &u)?;
                let (b, db) = bump(r, *width);
                let mut grad = linalg::scaled(&tangential(&g, &u, r), b);
                linalg::axpy(v * db, &u, &mut grad);
                Ok((v * b, grad))
            }
        }
    }
}

fn unit(xi: &[f64]) -> Result<(Vec<f64>, f64)> {
    let r = norm(xi);
    if r == 0.0 {
        return Err(Error::GradientUnavailable("zero-homogeneous function at the origin".into()));
    }
    Ok((linalg::scaled(xi, 1.0 / r), r))
}

/// Gradient of `F(ξ/|ξ|)` from the gradient `g` of `F` at `u = ξ/|ξ|`.
fn tangential(g: &[f64], u: &[f64], r: f64) -> Vec<f64> {
    let radial = dot(g, u);
    g.iter().zip(u).map(|(gi, ui)| (gi - radial * ui) / r).collect()
}

/// Conformal factor of a deformed bivector `f·π`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Deformation {
    pub factor: FunctionModel,
}

impl Deformation {
    /// `f = h ∘ p'` (or `e^{h ∘ p'}` if the model says so).
    pub fn casimir(model: CasimirModel) -> Self {
        Self { factor: FunctionModel::Casimir { model } }
    }

    /// An arbitrary factor, used for negative controls.
    pub fn arbitrary(factor: FunctionModel) -> Self {
        Self { factor }
    }

    pub fn value_and_gradient(&self, sys: &LieSystem, xi: &[f64]) -> Result<(f64, Vec<f64>)> {
        self.factor.value_and_gradient(sys, xi)
    }
}

fn factor_at(sys: &LieSystem, def: Option<&Deformation>, xi: &[f64]) -> Result<(f64, Vec<f64>)> {
    match def {
        None => Ok((1.0, vec![0.0; xi.len()])),
        Some(d) => d.value_and_gradient(sys, xi),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PoissonEvaluation {
    pub point: Covector,
    pub matrix: DMatrix<f64>,
    pub conformal_factor: f64,
}

impl PoissonEvaluation {
    pub fn new(sys: &LieSystem, xi: &Covector, deformation: Option<&Deformation>) -> Result<Self> {
        check_dim(sys.dim(), xi.len())?;
        let (f, _) = factor_at(sys, deformation, xi)?;
        Ok(Self {
            point: xi.clone(),
            matrix: poisson_matrix(&sys.alg, xi),
            conformal_factor: f,
        })
    }

    /// `f·π(ξ)`.
    pub fn scaled_matrix(&self) -> DMatrix<f64> {
        &self.matrix * self.conformal_factor
    }

    pub fn bracket(&self, df: &[f64], dg: &[f64]) -> f64 {
        let pg = linalg::mat_vec(&self.matrix, dg);
        self.conformal_factor * dot(df, &pg)
    }
}

/// `{F, G}(ξ) = f(ξ)·dF^T π(ξ) dG`.
pub fn bracket_functions(
    sys: &LieSystem,
    f: &FunctionModel,
    g: &FunctionModel,
    xi: &Covector,
    deformation: Option<&Deformation>,
) -> Result<f64> {
    let ev = PoissonEvaluation::new(sys, xi, deformation)?;
    let df = f.gradient(sys, xi)?;
    let dg = g.gradient(sys, xi)?;
    Ok(ev.bracket(&df, &dg))
}

/// `X_F = {F, ·}`: `ẋ_j = f·Σ_i ∂_i F π_ij`.
pub fn hamiltonian_vector(sys: &LieSystem, f: &FunctionModel, xi: &[f64], deformation: Option<&Deformation>) -> Result<Vec<f64>> {
    let (c, _) = factor_at(sys, deformation, xi)?;
    let df = f.gradient(sys, xi)?;
    let pi = poisson_matrix(&sys.alg, xi);
    Ok(linalg::scaled(&linalg::mat_vec(&pi.transpose(), &df), c))
}

const MAX_TRIPLES: usize = 4000;

fn triples(dim: usize, rng: &mut impl rand::Rng) -> Vec<(usize, usize, usize)> {
    let all = dim * (dim - 1) * (dim.saturating_sub(2)) / 6;
    if all <= MAX_TRIPLES {
        let mut out = Vec::with_capacity(all);
        for i in 0..dim {
            for j in i + 1..dim {
                for k in j + 1..dim {
                    out.push((i, j, k));
                }
            }
        }
        out
    } else {
        (0..MAX_TRIPLES)
            .map(|_| loop {
                let i = rng.random_range(0..dim);
                let j = rng.random_range(0..dim);
                let k = rng.random_range(0..dim);
                if i != j && j != k && i != k {
                    break (i, j, k);
                }
            })
            .collect()
    }
}

/// Jacobiator of the coordinate functions for `f·π` on the unit sphere.
///
/// With `v = π^T ∇f`, `{{x_i, x_j}, x_k} = f(π_ij v_k + f Σ_m c_ijm π_mk)`.
/// The Jacobiator is tensorial and `π` is tangent to the spheres, so the
/// coordinate functions stand in for their zero-homogeneous extensions.
pub fn verify_jacobi(sys: &LieSystem, deformation: Option<&Deformation>, samples: usize, seed: u64) -> Result<VerificationReport> {
    if samples == 0 {
        return Err(Error::InvalidInput("samples must be positive".into()));
    }
    if let Some(d) = deformation {
        d.factor.validate(sys)?;
    }
    let alg = &sys.alg;
    let dim = alg.dim;
    let results: Vec<Result<(Worst, f64, Vec<usize>)>> = (0..samples)
        .into_par_iter()
        .map(|s| {
            let mut rng = sampling::trial_rng(seed, s as u64);
            let xi = sampling::unit_vec(&mut rng, dim);
            let pi = poisson_matrix(alg, &xi);
            let (f, df) = factor_at(sys, deformation, &xi)?;
            let v = linalg::mat_vec(&pi.transpose(), &df);
            let scale = f * f * pi.amax();
            let mut worst = (0.0_f64, vec![0, 0, 0]);
            for (i, j, k) in triples(dim, &mut rng) {
                let mut lie = 0.0;
                for m in 0..dim {
                    lie += alg.c(i, j, m) * pi[(m, k)] + alg.c(j, k, m) * pi[(m, i)] + alg.c(k, i, m) * pi[(m, j)];
                }
                let conf = pi[(i, j)] * v[k] + pi[(j, k)] * v[i] + pi[(k, i)] * v[j];
                let jac = (f * conf + f * f * lie).abs();
                if jac > worst.0 || jac.is_nan() {
                    worst = (jac, vec![i, j, k]);
                }
            }
            Ok((Worst::of(worst.0, s, xi), scale, worst.1))
        })
        .collect();
    let mut worst = Worst::default();
    let mut normalized: f64 = 0.0;
    let mut triple = vec![0, 0, 0];
    for r in results {
        let (w, scale, t) = r?;
        let n = w.value / (1.0 + scale);
        if n > normalized || n.is_nan() {
            normalized = n;
        }
        if w.value > worst.value || (w.value == worst.value && w.index < worst.index) || w.value.is_nan() {
            triple = t;
        }
        worst = worst.merge(w);
    }
    let mut report = VerificationReport::new("jacobi", &sys.name(), Some(seed));
    report.samples = samples;
    report.tolerance = 1e-8;
    report.push(Check::below("jacobiator", normalized, 1e-8));
    report.max_residual = worst.value;
    report.worst_sample = worst.sample;
    report.witness = Some(triple);
    Ok(report)
}

/// `max_j |{f, x_j}(ξ)| / (1 + |ξ|)` over random points.
pub fn verify_casimir(sys: &LieSystem, f: &FunctionModel, samples: usize, seed: u64) -> Result<VerificationReport> {
    if samples == 0 {
        return Err(Error::InvalidInput("samples must be positive".into()));
    }
    f.validate(sys)?;
    let dim = sys.dim();
    let results: Vec<Result<Worst>> = (0..samples)
        .into_par_iter()
        .map(|s| {
            let mut rng = sampling::trial_rng(seed, s as u64);
            let r: f64 = rng.random_range(0.5..2.0);
            let xi = linalg::scaled(&sampling::unit_vec(&mut rng, dim), r);
            let df = f.gradient(sys, &xi)?;
            let pi = poisson_matrix(&sys.alg, &xi);
            let field = linalg::mat_vec(&pi.transpose(), &df);
            let m = field.iter().fold(0.0_f64, |a, b| a.max(b.abs()));
            Ok(Worst::of(m / (1.0 + r), s, xi))
        })
        .collect();
    let mut worst = Worst::default();
    for w in results {
        worst = worst.merge(w?);
    }
    let mut report = VerificationReport::new("casimir", &sys.name(), Some(seed));
    report.samples = samples;
    report.tolerance = 1e-9;
    report.push(Check::below("hamiltonian_field", worst.value, 1e-9));
    report.max_residual = worst.value;
    report.worst_sample = worst.sample;
    Ok(report)
}

/// `φ̃_f(ξ, t) = ξ / (t f(ξ))` for a unit vector `ξ`.
pub fn phi_tilde_f(sys: &LieSystem, f: &CasimirModel, xi: &Covector, t: f64) -> Result<Covector> {
    check_dim(sys.dim(), xi.len())?;
    if !(t > 0.0) {
        return Err(Error::InvalidInput(format!("t must be positive, got {t}")));
    }
    let fx = f.eval(sys, xi)?;
    if !(fx > 0.0) {
        return Err(Error::NonPositiveCasimir(fx));
    }
    Ok(Covector(linalg::scaled(xi, 1.0 / (t * fx))))
}

/// Checks that `φ̃_f` pulls the linear bracket back to `t f π_S`:
/// for linear `X = a·η`, `Y = b·η`,
/// `{X, Y}(φ̃_f(ξ, t)) = t f(ξ) ∇G_a^T π(ξ) ∇G_b` with `G_a = X ∘ φ̃_f`.
pub fn verify_lemma_b(sys: &LieSystem, f: &CasimirModel, samples: usize, seed: u64) -> Result<VerificationReport> {
    if samples == 0 {
        return Err(Error::InvalidInput("samples must be positive".into()));
    }
    f.check_arity(sys.rank() - 1)?;
    let dim = sys.dim();
    let model = FunctionModel::Casimir { model: f.clone() };
    let results: Vec<Result<Worst>> = (0..samples)
        .into_par_iter()
        .map(|s| {
            let mut rng = sampling::trial_rng(seed, s as u64);
            let xi = sampling::unit_vec(&mut rng, dim);
            let t: f64 = rng.random_range(0.25..4.0);
            let a = sampling::normal_vec(&mut rng, dim);
            let b = sampling::normal_vec(&mut rng, dim);
            let (fx, df) = model.value_and_gradient(sys, &xi)?;
            if !(fx > 0.0) {
                return Err(Error::NonPositiveCasimir(fx));
            }
            let eta = phi_tilde_f(sys, f, &Covector(xi.clone()), t)?;
            let lhs = dot(&a, &linalg::mat_vec(&poisson_matrix(&sys.alg, &eta), &b));
            let grad = |c: &[f64]| {
                let mut g = linalg::scaled(c, 1.0 / (t * fx));
                linalg::axpy(-dot(c, &xi) / (t * fx * fx), &df, &mut g);
                g
            };
            let (ga, gb) = (grad(&a), grad(&b));
            let pi = poisson_matrix(&sys.alg, &xi);
            let rhs = t * fx * dot(&ga, &linalg::mat_vec(&pi, &gb));
            Ok(Worst::of((lhs - rhs).abs(), s, xi))
        })
        .collect();
    let mut worst = Worst::default();
    for w in results {
        worst = worst.merge(w?);
    }
    let mut report = VerificationReport::new("lemma-b", &sys.name(), Some(seed));
    report.samples = samples;
    report.tolerance = 1e-8;
    report.push(Check::below("pullback_bracket", worst.value, 1e-8));
    report.max_residual = worst.value;
    report.worst_sample = worst.sample;
    Ok(report)
}
