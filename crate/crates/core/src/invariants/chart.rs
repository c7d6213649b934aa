//! Chamber grids, the sampled images `Δ` and `Δ'`, and the numerical
//! checks of the restriction isomorphism and of the chart `q` on the chamber.

use rayon::prelude::*;
use serde::Serialize;

use crate::cartan::to_chamber;
use crate::error::{Error, Result};
use crate::linalg::{self, dot, norm};
use crate::report::{Check, VerificationReport, Worst};
use crate::sampling;
use crate::LieSystem;

/// Sampling of the closed chamber. `radii` empty means the unit sphere only.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChamberGrid {
    pub resolution: usize,
    pub radii: Vec<f64>,
}

impl ChamberGrid {
    pub fn sphere(resolution: usize) -> Self {
        Self { resolution, radii: Vec::new() }
    }

    /// `count` radii evenly spaced in `(0, max]`.
    pub fn cone(resolution: usize, count: usize, max: f64) -> Self {
        let radii = (1..=count).map(|k| max * k as f64 / count as f64).collect();
        Self { resolution, radii }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DeltaKind {
    /// `q(c̄)` in `R^l`
    Delta,
    /// `q'(S(c̄))` in `R^{l-1}`
    DeltaPrime,
}

#[derive(Clone, Debug, Serialize)]
pub struct DeltaCloud {
    pub kind: DeltaKind,
    pub grid: ChamberGrid,
    pub param_names: Vec<String>,
    pub params: Vec<Vec<f64>>,
    /// Chamber point in `t*` coordinates for each sample.
    pub chamber_points: Vec<Vec<f64>>,
    pub points: Vec<Vec<f64>>,
}

impl DeltaCloud {
    pub fn to_csv(&self) -> String {
        let width = self.points.first().map_or(0, |p| p.len());
        let offset = match self.kind {
            DeltaKind::Delta => 1,
            DeltaKind::DeltaPrime => 2,
        };
        let mut header: Vec<String> = self.param_names.clone();
        header.extend((0..width).map(|k| format!("p{}", k + offset)));
        let mut out = header.join(",");
        out.push('\n');
        for (p, v) in self.params.iter().zip(&self.points) {
            let row: Vec<String> = p.iter().chain(v.iter()).map(|x| format!("{x:.17e}")).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("cloud serializes")
    }
}

/// Points of the unit chamber sphere with their parameters.
///
/// Rank 2 uses the angle from the bisector of the two walls; higher ranks use
/// barycentric coordinates over the unit fundamental weights.
pub fn chamber_grid(sys: &LieSystem, resolution: usize) -> (Vec<String>, Vec<(Vec<f64>, Vec<f64>)>) {
    let l = sys.rank();
    let w: Vec<Vec<f64>> = sys
        .roots
        .fundamental_weights()
        .into_iter()
        .map(|v| linalg::scaled(&v, 1.0 / norm(&v)))
        .collect();
    match l {
        1 => (Vec::new(), vec![(Vec::new(), w[0].clone())]),
        2 => {
            let (bisector, normal) = sys.chamber_frame().expect("rank 2");
            let angle = |v: &[f64]| dot(v, &normal).atan2(dot(v, &bisector));
            let (a, b) = (angle(&w[0]), angle(&w[1]));
            let (lo, hi) = (a.min(b), a.max(b));
            let n = resolution.max(2);
            let pts = (0..n)
                .map(|k| {
                    let th = lo + (hi - lo) * k as f64 / (n - 1) as f64;
                    let x: Vec<f64> = (0..2).map(|c| th.cos() * bisector[c] + th.sin() * normal[c]).collect();
                    (vec![th], x)
                })
                .collect();
            (vec!["theta".into()], pts)
        }
        _ => {
            let n = resolution.max(1);
            let mut pts = Vec::new();
            let mut k = vec![0usize; l];
            simplex_points(n, 0, &mut k, &mut |k| {
                let bary: Vec<f64> = k.iter().map(|v| *v as f64 / n as f64).collect();
                let mut x = vec![0.0; l];
                for (c, wi) in bary.iter().zip(&w) {
                    linalg::axpy(*c, wi, &mut x);
                }
                let r = norm(&x);
                pts.push((bary, linalg::scaled(&x, 1.0 / r)));
            });
            let names = (1..=l).map(|i| format!("b{i}")).collect();
            (names, pts)
        }
    }
}

fn simplex_points(left: usize, pos: usize, k: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
    if pos + 1 == k.len() {
        k[pos] = left;
        f(k);
        return;
    }
    for v in 0..=left {
        k[pos] = v;
        simplex_points(left - v, pos + 1, k, f);
    }
}

/// Samples `Δ'` (unit sphere) or `Δ` (cone over the given radii).
pub fn delta_sample(sys: &LieSystem, grid: &ChamberGrid) -> Result<DeltaCloud> {
    if grid.resolution < 2 {
        return Err(Error::InvalidInput("chamber grid needs at least 2 points per axis".into()));
    }
    let (names, sphere) = chamber_grid(sys, grid.resolution);
    let inv = &sys.invariants;
    let mut cloud = DeltaCloud {
        kind: if grid.radii.is_empty() { DeltaKind::DeltaPrime } else { DeltaKind::Delta },
        grid: grid.clone(),
        param_names: Vec::new(),
        params: Vec::new(),
        chamber_points: Vec::new(),
        points: Vec::new(),
    };
    if grid.radii.is_empty() {
        cloud.param_names = names;
        for (p, x) in sphere {
            cloud.points.push(inv.q_prime(&x));
            cloud.params.push(p);
            cloud.chamber_points.push(x);
        }
    } else {
        cloud.param_names = std::iter::once("r".to_string()).chain(names).collect();
        for &r in &grid.radii {
            for (p, x) in &sphere {
                let y = linalg::scaled(x, r);
                cloud.points.push(inv.q(&y));
                cloud.params.push(std::iter::once(r).chain(p.iter().cloned()).collect());
                cloud.chamber_points.push(y);
            }
        }
    }
    Ok(cloud)
}

fn rel_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs() / (1.0 + x.abs()))
        .fold(0.0, f64::max)
}

/// Restriction isomorphism: `p(ξ) = q(ξ_dom)` for random `ξ`, and
/// `q(w ξ_t) = q(ξ_t)` for random `ξ_t` and `w`.
pub fn verify_chevalley(sys: &LieSystem, trials: usize, seed: u64) -> Result<VerificationReport> {
    if trials == 0 {
        return Err(Error::InvalidInput("trials must be positive".into()));
    }
    let dim = sys.alg.dim;
    let l = sys.rank();
    let order = sys.weyl.order();
    let inv = &sys.invariants;
    let results: Vec<Result<(Worst, Worst)>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = sampling::trial_rng(seed, t as u64);
            let xi = sampling::normal_vec(&mut rng, dim);
            let cp = to_chamber(&sys.alg, &sys.cartan, &sys.roots, &sys.weyl, &crate::Covector(xi.clone()))?;
            let r1 = rel_diff(&inv.p(&xi), &inv.q(&cp.xi_dom));
            let xt = sampling::normal_vec(&mut rng, l);
            let w = rand::Rng::random_range(&mut rng, 0..order);
            let img = linalg::mat_vec(&sys.weyl.elements[w].matrix, &xt);
            let r2 = rel_diff(&inv.q(&xt), &inv.q(&img));
            Ok((Worst::of(r1, t, xi), Worst::of(r2, t, xt)))
        })
        .collect();
    let mut orbit = Worst::default();
    let mut weyl = Worst::default();
    for r in results {
        let (a, b) = r?;
        orbit = orbit.merge(a);
        weyl = weyl.merge(b);
    }
    let mut report = VerificationReport::new("chevalley", &sys.name(), Some(seed));
    report.samples = trials;
    report.tolerance = 1e-8;
    report.push(Check::below("orbit_restriction", orbit.value, 1e-8));
    report.push(Check::below("weyl_invariance", weyl.value, 1e-10));
    report.max_residual = orbit.value.max(weyl.value);
    report.worst_sample = if orbit.value >= weyl.value { orbit.sample } else { weyl.sample };
    Ok(report)
}

fn fd_jacobian(sys: &LieSystem, x: &[f64]) -> nalgebra::DMatrix<f64> {
    let l = x.len();
    let h = 1e-5 * norm(x).max(1e-3);
    let mut jac = nalgebra::DMatrix::zeros(l, l);
    for k in 0..l {
        let mut a = x.to_vec();
        let mut b = x.to_vec();
        a[k] += h;
        b[k] -= h;
        let (qa, qb) = (sys.invariants.q(&a), sys.invariants.q(&b));
        for i in 0..l {
            jac[(i, k)] = (qa[i] - qb[i]) / (2.0 * h);
        }
    }
    jac
}

/// The chart `q` on the closed chamber: injective on an interior grid, with
/// non-degenerate Jacobian inside and degenerate Jacobian on the walls.
///
/// The grid uses cone coordinates `x = Σ c_i ω̂_i` with `c_i` at the
/// `resolution` cell midpoints of `(0, 1)`.
pub fn verify_lemma2(sys: &LieSystem, resolution: usize) -> Result<VerificationReport> {
    if resolution < 2 {
        return Err(Error::InvalidInput("lemma2 grid needs at least 2 points per axis".into()));
    }
    let l = sys.rank();
    let count = resolution.checked_pow(l as u32).filter(|c| *c <= 2_000_000).ok_or_else(|| {
        Error::InvalidInput(format!("grid of {resolution}^{l} points is too large"))
    })?;
    let w: Vec<Vec<f64>> = sys
        .roots
        .fundamental_weights()
        .into_iter()
        .map(|v| linalg::scaled(&v, 1.0 / norm(&v)))
        .collect();
    let mid = |k: usize| (k as f64 + 0.5) / resolution as f64;
    let point = |c: &[f64]| {
        let mut x = vec![0.0; l];
        for (ci, wi) in c.iter().zip(&w) {
            linalg::axpy(*ci, wi, &mut x);
        }
        x
    };
    let params: Vec<Vec<f64>> = (0..count)
        .map(|mut idx| {
            (0..l)
                .map(|_| {
                    let k = idx % resolution;
                    idx /= resolution;
                    mid(k)
                })
                .collect()
        })
        .collect();
    let images: Vec<Vec<f64>> = params.par_iter().map(|c| sys.invariants.q(&point(c))).collect();

    // injectivity: sweep over images sorted by their first coordinate
    let mut order: Vec<usize> = (0..count).collect();
    order.sort_by(|&a, &b| images[a][0].partial_cmp(&images[b][0]).unwrap());
    let mut collisions = 0usize;
    let mut first_collision = None;
    for (pos, &a) in order.iter().enumerate() {
        for &b in &order[pos + 1..] {
            if images[b][0] - images[a][0] > 1e-9 {
                break;
            }
            if linalg::max_abs_diff(&images[a], &images[b]) <= 1e-9 && linalg::max_abs_diff(&params[a], &params[b]) > 1e-6 {
                collisions += 1;
                first_collision.get_or_insert((a, b));
            }
        }
    }
    if let Some((a, b)) = first_collision {
        return Err(Error::InjectivityFailure(format!(
            "{collisions} colliding pairs, e.g. parameters {:?} and {:?}",
            params[a], params[b]
        )));
    }

    let dets: Vec<f64> = params.par_iter().map(|c| linalg::det(&fd_jacobian(sys, &point(c))).abs()).collect();
    let (min_idx, min_det) = dets
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |(bi, bv), (i, v)| if *v < bv { (i, *v) } else { (bi, bv) });
    if !(min_det > 1e-12) {
        return Err(Error::JacobianDegenerateInterior(min_det));
    }

    // wall samples: one coordinate zero, the others equal and interior
    let mut wall_ratio: f64 = 0.0;
    let mut wall_samples = 0;
    for i in 0..l {
        for k in 0..resolution {
            let c: Vec<f64> = (0..l).map(|j| if j == i { 0.0 } else { mid(k) }).collect();
            let sv = linalg::singular_values(&fd_jacobian(sys, &point(&c)));
            let ratio = if sv[0] == 0.0 { 0.0 } else { sv[l - 1] / sv[0] };
            wall_ratio = wall_ratio.max(ratio);
            wall_samples += 1;
        }
    }

    let mut report = VerificationReport::new("lemma2", &sys.name(), None);
    report.samples = count + wall_samples;
    report.tolerance = 1e-12;
    report.push(Check::below("injectivity_collisions", collisions as f64, 0.5));
    report.push(Check::above("interior_min_abs_det", min_det, 1e-12));
    report.push(Check::below("wall_singular_value_ratio", wall_ratio, 1e-6));
    report.max_residual = wall_ratio;
    report.worst_sample = Some(point(&params[min_idx]));
    Ok(report)
}
