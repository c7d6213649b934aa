//! Fixed-step RK4 integration of Hamiltonian vector fields.

use serde::Serialize;

use super::{hamiltonian_vector, Deformation, FunctionModel};
use crate::algebra::Covector;
use crate::error::{check_dim, Error, Result};
use crate::linalg::{self, dot};
use crate::LieSystem;

#[derive(Clone, Debug, Serialize)]
pub struct FlowState {
    pub time: f64,
    pub point: Covector,
    pub norm_sq: f64,
    pub invariants: Vec<f64>,
    pub hamiltonian: f64,
}

/// `10^-3 / ω` with `ω` the operator norm of `ad(∇F(ξ0))`, scaled by the factor.
pub fn default_step(sys: &LieSystem, f: &FunctionModel, xi0: &[f64], deformation: Option<&Deformation>) -> Result<f64> {
    let df = f.gradient(sys, xi0)?;
    let factor = match deformation {
        Some(d) => d.value_and_gradient(sys, xi0)?.0.abs(),
        None => 1.0,
    };
    let omega = factor * linalg::singular_values(&sys.alg.ad_matrix(&df)).first().cloned().unwrap_or(0.0);
    Ok(if omega > 0.0 { 1e-3 / omega } else { 1e-3 })
}

fn state(sys: &LieSystem, f: &FunctionModel, t: f64, xi: &[f64]) -> Result<FlowState> {
    Ok(FlowState {
        time: t,
        point: Covector(xi.to_vec()),
        norm_sq: dot(xi, xi),
        invariants: sys.invariants.p(xi),
        hamiltonian: f.value(sys, xi)?,
    })
}

/// Integrates `ξ̇ = X_F(ξ)` on `[0, t_end]`, logging every step.
///
/// Fails with `StepSizeRejected` when `|ξ|²`, any `p_i` or `F` drifts by
/// more than `10^-6 (1 + |initial|)`.
pub fn hamiltonian_flow(
    sys: &LieSystem,
    f: &FunctionModel,
    xi0: &Covector,
    t_end: f64,
    dt: Option<f64>,
    deformation: Option<&Deformation>,
) -> Result<Vec<FlowState>> {
    check_dim(sys.dim(), xi0.len())?;
    f.validate(sys)?;
    if !(t_end >= 0.0) {
        return Err(Error::InvalidInput(format!("final time must be non-negative, got {t_end}")));
    }
    let dt = match dt {
        Some(d) if d > 0.0 => d,
        Some(d) => return Err(Error::InvalidInput(format!("step must be positive, got {d}"))),
        None => default_step(sys, f, xi0, deformation)?,
    };
    let steps = ((t_end / dt).ceil() as usize).max(if t_end > 0.0 { 1 } else { 0 });
    let h = if steps > 0 { t_end / steps as f64 } else { 0.0 };
    let field = |x: &[f64]| hamiltonian_vector(sys, f, x, deformation);

    let mut x = xi0.0.clone();
    let first = state(sys, f, 0.0, &x)?;
    let mut out = Vec::with_capacity(steps + 1);
    out.push(first);
    for n in 0..steps {
        let k1 = field(&x)?;
        let mut y = x.clone();
        linalg::axpy(0.5 * h, &k1, &mut y);
        let k2 = field(&y)?;
        let mut y = x.clone();
        linalg::axpy(0.5 * h, &k2, &mut y);
        let k3 = field(&y)?;
        let mut y = x.clone();
        linalg::axpy(h, &k3, &mut y);
        let k4 = field(&y)?;
        for i in 0..x.len() {
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        out.push(state(sys, f, (n + 1) as f64 * h, &x)?);
    }

    let init = &out[0];
    let check = |name: String, a: f64, b: f64| -> Result<()> {
        let bound = 1e-6 * (1.0 + a.abs());
        let drift = (b - a).abs();
        if drift > bound || drift.is_nan() {
            return Err(Error::StepSizeRejected { quantity: name, drift, bound });
        }
        Ok(())
    };
    for s in &out[1..] {
        check("|xi|^2".into(), init.norm_sq, s.norm_sq)?;
        check("hamiltonian".into(), init.hamiltonian, s.hamiltonian)?;
        for (i, (a, b)) in init.invariants.iter().zip(&s.invariants).enumerate() {
            check(format!("p{}", i + 1), *a, *b)?;
        }
    }
    Ok(out)
}

/// CSV with time, coordinates, `|ξ|²`, the invariants and the Hamiltonian.
pub fn flow_csv(states: &[FlowState]) -> String {
    let Some(first) = states.first() else {
        return String::new();
    };
    let mut header = vec!["t".to_string()];
    header.extend((1..=first.point.len()).map(|k| format!("x{k}")));
    header.push("norm_sq".into());
    header.extend((1..=first.invariants.len()).map(|k| format!("p{k}")));
    header.push("hamiltonian".into());
    let mut out = header.join(",");
    out.push('\n');
    for s in states {
        let mut row = vec![s.time];
        row.extend(s.point.iter());
        row.push(s.norm_sq);
        row.extend(&s.invariants);
        row.push(s.hamiltonian);
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.17e}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}
