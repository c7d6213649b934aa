//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use casimir_moduli::algebra::{build_algebra, Family, LieAlgebraSpec};
use casimir_moduli::invariants::{verify_chevalley, verify_lemma2};
use casimir_moduli::linalg::{max_abs_diff, scaled, singular_values};
use casimir_moduli::moduli::{classify_pair, delta_prime_grid, su3_reference, CasimirModel};
use casimir_moduli::poisson::{
    hamiltonian_flow, su2_period_check, verify_casimir, verify_jacobi, verify_lemma_b, Deformation, FunctionModel,
    DEFAULT_REFINEMENTS,
};
use casimir_moduli::polynomial::Polynomial;
use casimir_moduli::sampling::{normal_vec, random_word, trial_rng};
use casimir_moduli::{Covector, LieSystem};
use rand::Rng;

const SEED: u64 = 20_240_601;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn su3() -> LieSystem {
    LieSystem::new(Family::A, 2).unwrap()
}

fn golden_formulas() -> Outcome {
    let sys = su3();
    let rf = su3_reference();
    let mut dev: f64 = 0.0;
    for i in 0..100 {
        let r = 0.05 + 1.95 * i as f64 / 99.0;
        for j in 0..100 {
            let th = -PI / 6.0 + (PI / 3.0) * j as f64 / 99.0;
            let q = sys.invariants.q(&scaled(&rf.a_theta(&sys, th), r));
            dev = dev.max((q[0] - r * r).abs()).max((q[1] - r.powi(3) * (3.0 * th).sin()).abs());
        }
    }
    outcome(dev < 1e-9, format!("max deviation {dev:.3e} (bound 1e-9)"))
}

fn delta_description() -> Outcome {
    let sys = su3();
    let rf = su3_reference();
    let mut worst: f64 = 0.0;
    for t in 0..10_000u64 {
        let mut rng = trial_rng(SEED, t);
        let xi = Covector(normal_vec(&mut rng, sys.dim()));
        let p = sys.invariants.eval_p(&xi).unwrap();
        worst = worst.max(p[1] * p[1] - p[0].powi(3));
    }
    // walls of the chamber, moved around by random group elements
    let mut wall: f64 = 0.0;
    for t in 0..200u64 {
        let mut rng = trial_rng(SEED + 1, t);
        let r = rng.random_range(0.5..2.0);
        let th = if t % 2 == 0 { PI / 6.0 } else { -PI / 6.0 };
        let xi = sys.cartan.embed(&scaled(&rf.a_theta(&sys, th), r));
        let word = random_word(&mut rng, sys.dim(), 4);
        let xi = sys.alg.coadjoint_apply(&word, &xi).unwrap();
        let p = sys.invariants.eval_p(&xi).unwrap();
        wall = wall.max((p[0].powi(3) - p[1] * p[1]).abs());
    }
    outcome(
        worst <= 1e-9 && wall < 1e-6,
        format!("max(p2²-p1³) {worst:.3e} (bound 1e-9), wall gap {wall:.3e} (bound 1e-6)"),
    )
}

fn delta_prime_interval() -> Outcome {
    let sys = su3();
    let grid = delta_prime_grid(&sys, 1001).unwrap();
    let lo = grid.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
    let hi = grid.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
    let dev = (lo + 1.0).abs().max((hi - 1.0).abs());
    outcome(dev < 1e-6, format!("range [{lo:.9}, {hi:.9}]"))
}

fn structure_axioms() -> Outcome {
    let cases = [(Family::A, 1), (Family::A, 2), (Family::A, 3), (Family::B, 2), (Family::C, 2), (Family::D, 4)];
    let mut passed = true;
    let mut parts = Vec::new();
    for (family, rank) in cases {
        let spec = LieAlgebraSpec::new(family, rank).unwrap();
        let alg = build_algebra(&spec).unwrap();
        let anti = alg.antisymmetry_residual();
        let jac = alg.jacobi_residual();
        let inv = alg.invariance_residual();
        passed &= anti == 0.0 && jac < 1e-12 && inv < 1e-12;
        parts.push(format!("{} anti {anti:.0e} jacobi {jac:.1e} ad-inv {inv:.1e}", spec.name()));
    }
    outcome(passed, parts.join("; "))
}

fn chevalley() -> Outcome {
    let mut passed = true;
    let mut parts = Vec::new();
    for (family, rank) in [(Family::A, 2), (Family::B, 2)] {
        let sys = LieSystem::new(family, rank).unwrap();
        let report = verify_chevalley(&sys, 1000, SEED).unwrap();
        passed &= report.passed && report.samples == 1000 && report.max_residual < 1e-8;
        parts.push(format!("{} residual {:.2e}", sys.name(), report.max_residual));
    }
    outcome(passed, parts.join("; "))
}

fn lemma2() -> Outcome {
    let sys = su3();
    match verify_lemma2(&sys, 50) {
        Ok(report) => {
            let det = report.check("interior_min_abs_det").map(|c| c.value).unwrap_or(0.0);
            let wall = report.check("wall_singular_value_ratio").map(|c| c.value).unwrap_or(f64::INFINITY);
            outcome(
                report.passed && report.samples >= 2500 && det > 1e-12 && wall < 1e-6,
                format!("{} samples incl. walls, min |det| {det:.3e}, wall ratio {wall:.1e}", report.samples),
            )
        }
        Err(e) => outcome(false, e.to_string()),
    }
}

fn casimir_and_jacobi() -> Outcome {
    let mut passed = true;
    let mut parts = Vec::new();
    for (family, rank) in [(Family::A, 1), (Family::A, 2), (Family::B, 2)] {
        let sys = LieSystem::new(family, rank).unwrap();
        for i in 0..sys.rank() {
            let r = verify_casimir(&sys, &FunctionModel::invariant(i), 200, SEED).unwrap();
            passed &= r.passed && r.max_residual < 1e-9;
            parts.push(format!("{} p{} {:.1e}", sys.name(), i + 1, r.max_residual));
        }
    }
    let sys = su3();
    let linear = verify_jacobi(&sys, None, 50, SEED).unwrap();
    passed &= linear.passed;
    parts.push(format!("π {:.1e}", linear.max_residual));
    let hs = [
        Polynomial::univariate(&[0.0, 0.5]),
        Polynomial::univariate(&[1.0, 0.0, 0.5]),
        Polynomial::univariate(&[-0.3, 1.2, 0.0, -0.7]),
    ];
    for h in hs {
        let model = CasimirModel::exponential(casimir_moduli::moduli::HFunction::Polynomial { polynomial: h });
        let r = verify_jacobi(&sys, Some(&Deformation::casimir(model)), 50, SEED).unwrap();
        passed &= r.passed && r.max_residual < 1e-8;
        parts.push(format!("e^F π {:.1e}", r.max_residual));
    }
    let control = FunctionModel::Polynomial {
        polynomial: Polynomial::constant(sys.dim(), 1.0).add(&Polynomial::variable(sys.dim(), 0)),
    };
    let neg = verify_jacobi(&sys, Some(&Deformation::arbitrary(control)), 50, SEED).unwrap();
    passed &= !neg.passed && neg.max_residual > 1e-3;
    parts.push(format!("control (1+x1)π {:.2e} rejected={}", neg.max_residual, !neg.passed));
    outcome(passed, parts.join("; "))
}

fn lemma_b() -> Outcome {
    let sys = su3();
    let h = Polynomial::univariate(&[0.2, -0.8, 0.5]);
    let model = CasimirModel::exponential(casimir_moduli::moduli::HFunction::Polynomial { polynomial: h });
    let r = verify_lemma_b(&sys, &model, 500, SEED).unwrap();
    let one = CasimirModel::polynomial(Polynomial::constant(1, 1.0));
    let r1 = verify_lemma_b(&sys, &one, 500, SEED).unwrap();
    outcome(
        r.passed && r.samples == 500 && r.max_residual < 1e-8 && r1.max_residual < 1e-12,
        format!("exp(h∘p') {:.2e} (bound 1e-8), f≡1 {:.2e} (bound 1e-12)", r.max_residual, r1.max_residual),
    )
}

fn su2_period() -> Outcome {
    let sys = LieSystem::new(Family::A, 1).unwrap();
    let mut passed = true;
    let mut parts = Vec::new();
    for r in [0.5, 1.0, 2.0] {
        let res = su2_period_check(&sys, r, DEFAULT_REFINEMENTS).unwrap();
        passed &= res.relative_error < 1e-4 && res.area > 0.0;
        parts.push(format!("r={r}: area {:.10} vs {:.10} rel {:.1e}", res.area, res.xi_of_x, res.relative_error));
    }
    let errs: Vec<f64> = (1..=4).map(|k| su2_period_check(&sys, 1.0, k).unwrap().relative_error).collect();
    let ratios: Vec<f64> = errs.windows(2).map(|w| w[0] / w[1]).collect();
    passed &= ratios.iter().all(|q| *q >= 8.0);
    parts.push(format!("refinement ratios {:?}", ratios.iter().map(|q| format!("{q:.1}")).collect::<Vec<_>>()));
    outcome(passed, parts.join("; "))
}

fn group_structure() -> Outcome {
    let sys = su3();
    // Weyl elements act on the diagonal of the Cartan matrices by permutations
    let mut rng = trial_rng(SEED, 0);
    let x = normal_vec(&mut rng, 2);
    let diag = |v: &[f64]| -> Vec<f64> {
        let m = sys.alg.matrix_of(&sys.cartan.embed(v));
        (0..3).map(|k| m[(k, k)].im).collect()
    };
    let d0 = diag(&x);
    let mut seen = Vec::new();
    let mut perm_ok = true;
    for w in &sys.weyl.elements {
        let d = diag(&casimir_moduli::linalg::mat_vec(&w.matrix, &x));
        let perm = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]]
            .into_iter()
            .find(|p| (0..3).all(|k| (d[k] - d0[p[k]]).abs() < 1e-12));
        match perm {
            Some(p) => seen.push(p),
            None => perm_ok = false,
        }
    }
    seen.sort();
    seen.dedup();
    let orders: Vec<usize> = [(Family::A, 1), (Family::A, 2), (Family::D, 4)]
        .into_iter()
        .map(|(f, r)| LieSystem::new(f, r).unwrap().outer.order())
        .collect();
    outcome(
        sys.weyl.order() == 6 && perm_ok && seen.len() == 6 && orders == [1, 2, 6],
        format!("|W(su3)| = {}, distinct permutations {}, |Out| su2/su3/so8 = {orders:?}", sys.weyl.order(), seen.len()),
    )
}

fn reflect(h: &Polynomial) -> Polynomial {
    let mut out = h.clone();
    for t in &mut out.terms {
        if t.powers[0] % 2 == 1 {
            t.coeff = -t.coeff;
        }
    }
    out
}

fn classification() -> Outcome {
    let sys = su3();
    let grid = delta_prime_grid(&sys, 401).unwrap();
    let poly = |c: &[f64]| CasimirModel::polynomial(Polynomial::univariate(c));
    let a = classify_pair(&poly(&[0.0, 1.0]), &poly(&[0.0, -1.0]), &sys.outer, &grid).unwrap();
    let b = classify_pair(&poly(&[0.0, 1.0]), &poly(&[0.1, 1.0]), &sys.outer, &grid).unwrap();
    let min_b = b.residuals.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut passed = a.equivalent && a.witness_label == "γ" && a.residual < 1e-9;
    passed &= !b.equivalent && min_b > 1e-2;

    let mut consistent = 0;
    for t in 0..20u64 {
        let mut rng = trial_rng(SEED + 11, t);
        let deg = rng.random_range(1..=4);
        let hf = Polynomial::univariate(&normal_vec(&mut rng, deg + 1));
        // half the pairs are related by γ, the rest are independent
        let hg = if t % 2 == 0 { reflect(&hf) } else { Polynomial::univariate(&normal_vec(&mut rng, deg + 1)) };
        let f = CasimirModel::polynomial(hf.clone());
        let g = CasimirModel::polynomial(hg);
        let fg = classify_pair(&f, &g, &sys.outer, &grid).unwrap();
        let gf = classify_pair(&g, &f, &sys.outer, &grid).unwrap();
        let moved = classify_pair(&CasimirModel::polynomial(reflect(&hf)), &g, &sys.outer, &grid).unwrap();
        let expected = t % 2 == 0;
        if fg.equivalent == gf.equivalent && fg.equivalent == moved.equivalent && fg.equivalent == expected {
            consistent += 1;
        }
    }
    passed &= consistent == 20;
    outcome(
        passed,
        format!(
            "(x,-x) via {} residual {:.1e}; (x,x+0.1) min residual {min_b:.3e}; {consistent}/20 random pairs consistent",
            a.witness_label, a.residual
        ),
    )
}

fn flow_conservation() -> Outcome {
    let sys = su3();
    let mut rng = trial_rng(SEED, 99);
    let xi0 = Covector(normal_vec(&mut rng, sys.dim()));
    let f = FunctionModel::coordinate(0);
    let traj = match hamiltonian_flow(&sys, &f, &xi0, 10.0, None, None) {
        Ok(t) => t,
        Err(e) => return outcome(false, e.to_string()),
    };
    let s0 = &traj[0];
    let mut drift: f64 = 0.0;
    for s in &traj {
        drift = drift
            .max((s.norm_sq - s0.norm_sq).abs())
            .max((s.invariants[1] - s0.invariants[1]).abs())
            .max((s.hamiltonian - s0.hamiltonian).abs());
    }

    let su2 = LieSystem::new(Family::A, 1).unwrap();
    let x3 = FunctionModel::coordinate(2);
    let mut e3 = vec![0.0; 3];
    e3[2] = 1.0;
    let omega = singular_values(&su2.alg.ad_matrix(&e3))[0];
    let start = Covector(vec![0.3, -0.7, 0.4]);
    let period = 2.0 * PI / omega;
    let closure = match hamiltonian_flow(&su2, &x3, &start, period, None, None) {
        Ok(t) => max_abs_diff(&t.last().unwrap().point, &start),
        Err(_) => f64::INFINITY,
    };
    outcome(
        drift < 1e-6 && closure < 1e-6,
        format!("su3 drift {drift:.2e} over {} steps; su2 closure {closure:.2e} at T = {period:.6}", traj.len() - 1),
    )
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Outcome, u64);
    let criteria: [Criterion; 12] = [
        ("su(3) golden formulas", golden_formulas, 1),
        ("Δ description", delta_description, 5),
        ("Δ' = [-1, 1]", delta_prime_interval, 1),
        ("structure-constant axioms", structure_axioms, 10),
        ("Chevalley restriction", chevalley, 30),
        ("chart injectivity and Jacobian", lemma2, 10),
        ("Casimir and Jacobi suites", casimir_and_jacobi, 60),
        ("pullback bracket", lemma_b, 30),
        ("su(2) orbit area", su2_period, 30),
        ("Weyl and outer groups", group_structure, 10),
        ("classification", classification, 30),
        ("flow conservation", flow_conservation, 30),
    ];
    let mut failures = 0;
    for (n, (name, run, limit)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let elapsed = start.elapsed();
        let in_time = elapsed < Duration::from_secs(limit);
        let ok = out.passed && in_time;
        if !ok {
            failures += 1;
        }
        println!(
            "{} criterion {:>2} {name}: {} [{:.2}s, limit {limit}s{}]",
            if ok { "PASS" } else { "FAIL" },
            n + 1,
            out.detail,
            elapsed.as_secs_f64(),
            if in_time { "" } else { ", exceeded" },
        );
    }
    println!("acceptance: {} passed, {failures} failed", 12 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
