use std::sync::OnceLock;

use casimir_moduli::linalg::{dot, mat_vec, max_abs_diff, norm, scaled};
use casimir_moduli::moduli::{classify_pair, delta_prime_grid, leaf_dimension, CasimirModel};
use casimir_moduli::poisson::{bracket_functions, hamiltonian_flow, Deformation, FunctionModel};
use casimir_moduli::polynomial::Polynomial;
use casimir_moduli::sampling::{normal_vec, random_word, trial_rng};
use casimir_moduli::{Covector, Family, LieSystem};
use proptest::prelude::*;

fn systems() -> &'static [LieSystem] {
    static CELL: OnceLock<Vec<LieSystem>> = OnceLock::new();
    CELL.get_or_init(|| {
        [(Family::A, 1), (Family::A, 2), (Family::A, 3), (Family::B, 2), (Family::C, 3), (Family::D, 4)]
            .into_iter()
            .map(|(f, r)| LieSystem::new(f, r).unwrap())
            .collect()
    })
}

fn su3() -> &'static LieSystem {
    &systems()[1]
}

fn rel(a: &[f64], b: &[f64]) -> f64 {
    let scale = a.iter().chain(b).fold(1.0_f64, |m, v| m.max(v.abs()));
    max_abs_diff(a, b) / scale
}

fn sphere_poly(sys: &LieSystem) -> Polynomial {
    // |ξ|² - 1
    let n = sys.dim();
    let mut r2 = Polynomial::constant(n, -1.0);
    for k in 0..n {
        let x = Polynomial::variable(n, k);
        r2 = r2.add(&x.mul(&x));
    }
    r2
}

fn random_poly(sys: &LieSystem, seed: u64) -> Polynomial {
    let n = sys.dim();
    let mut rng = trial_rng(seed, 7);
    let c = normal_vec(&mut rng, 2 * n + 1);
    let mut p = Polynomial::constant(n, c[0]);
    for k in 0..n {
        let x = Polynomial::variable(n, k);
        p = p.add(&x.scale(c[1 + k]));
        let y = Polynomial::variable(n, (k + 1) % n);
        p = p.add(&x.mul(&y).scale(c[1 + n + k]));
    }
    p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn invariants_are_homogeneous(which in 0usize..6, seed in any::<u64>(), s in prop::sample::select(vec![0.5, 2.0, 3.0])) {
        let sys = &systems()[which];
        let xi = Covector(normal_vec(&mut trial_rng(seed, 0), sys.dim()));
        let p = sys.invariants.eval_p(&xi).unwrap();
        let ps = sys.invariants.eval_p(&Covector(scaled(&xi, s))).unwrap();
        let expect: Vec<f64> = p.iter().zip(sys.invariants.degrees()).map(|(v, d)| v * s.powi(d as i32)).collect();
        prop_assert!(rel(&ps, &expect) < 1e-10);
    }

    #[test]
    fn invariants_are_conjugation_invariant(which in 0usize..6, seed in any::<u64>()) {
        let sys = &systems()[which];
        let mut rng = trial_rng(seed, 1);
        let xi = Covector(normal_vec(&mut rng, sys.dim()));
        let word = random_word(&mut rng, sys.dim(), 3);
        let moved = sys.alg.coadjoint_apply(&word, &xi).unwrap();
        prop_assert!((norm(&moved) - norm(&xi)).abs() < 1e-10 * norm(&xi).max(1.0));
        let p = sys.invariants.eval_p(&xi).unwrap();
        let q = sys.invariants.eval_p(&moved).unwrap();
        prop_assert!(rel(&p, &q) < 1e-9);
    }

    #[test]
    fn coadjoint_action_composes(which in 0usize..6, seed in any::<u64>()) {
        let sys = &systems()[which];
        let mut rng = trial_rng(seed, 2);
        let xi = Covector(normal_vec(&mut rng, sys.dim()));
        let w1 = random_word(&mut rng, sys.dim(), 2);
        let w2 = random_word(&mut rng, sys.dim(), 2);
        let joined: Vec<_> = w1.iter().chain(&w2).cloned().collect();
        let once = sys.alg.coadjoint_apply(&joined, &xi).unwrap();
        let twice = sys.alg.coadjoint_apply(&w1, &sys.alg.coadjoint_apply(&w2, &xi).unwrap()).unwrap();
        prop_assert!(max_abs_diff(&once, &twice) < 1e-10);
    }

    #[test]
    fn restricted_invariants_are_weyl_invariant(which in 0usize..6, seed in any::<u64>()) {
        let sys = &systems()[which];
        let x = normal_vec(&mut trial_rng(seed, 3), sys.rank());
        let q = sys.invariants.q(&x);
        for w in &sys.weyl.elements {
            prop_assert!(rel(&sys.invariants.q(&mat_vec(&w.matrix, &x)), &q) < 1e-10);
        }
    }

    #[test]
    fn outer_action_is_linear_on_invariants(which in 0usize..6, seed in any::<u64>()) {
        let sys = &systems()[which];
        let x = normal_vec(&mut trial_rng(seed, 4), sys.rank());
        let q = sys.invariants.q_prime(&x);
        for a in &sys.outer.elements {
            let moved = sys.invariants.q_prime(&mat_vec(&a.on_t, &x));
            prop_assert!(rel(&moved, &mat_vec(&a.on_invariants, &q)) < 1e-8);
        }
    }

    #[test]
    fn chamber_point_reconstructs_input(which in 0usize..6, seed in any::<u64>()) {
        let sys = &systems()[which];
        let xi = Covector(normal_vec(&mut trial_rng(seed, 5), sys.dim()));
        let cp = sys.to_chamber(&xi).unwrap();
        prop_assert!(sys.roots.is_dominant(&cp.xi_dom, 1e-9));
        let back = sys.alg.coadjoint_apply(&cp.conjugator, &sys.cartan.embed(&cp.xi_dom)).unwrap();
        prop_assert!(max_abs_diff(&back, &xi) < 1e-8 * norm(&xi).max(1.0));
    }

    #[test]
    fn brackets_satisfy_leibniz(seed in any::<u64>()) {
        let sys = su3();
        let f = FunctionModel::Polynomial { polynomial: random_poly(sys, seed) };
        let g = random_poly(sys, seed ^ 1);
        let h = random_poly(sys, seed ^ 2);
        let gh = FunctionModel::Polynomial { polynomial: g.mul(&h) };
        let xi = Covector(normal_vec(&mut trial_rng(seed, 6), sys.dim()));
        let def = Deformation::casimir(CasimirModel::exponential(casimir_moduli::moduli::HFunction::Polynomial {
            polynomial: Polynomial::univariate(&[0.0, 0.7]),
        }));
        let lhs = bracket_functions(sys, &f, &gh, &xi, Some(&def)).unwrap();
        let fg = bracket_functions(sys, &f, &FunctionModel::Polynomial { polynomial: g.clone() }, &xi, Some(&def)).unwrap();
        let fh = bracket_functions(sys, &f, &FunctionModel::Polynomial { polynomial: h.clone() }, &xi, Some(&def)).unwrap();
        let rhs = fg * h.eval(&xi) + g.eval(&xi) * fh;
        prop_assert!((lhs - rhs).abs() < 1e-9 * (1.0 + lhs.abs()));
    }

    #[test]
    fn sphere_brackets_ignore_extension(which in 0usize..6, seed in any::<u64>()) {
        let sys = &systems()[which];
        let f = FunctionModel::Polynomial { polynomial: random_poly(sys, seed) };
        let g = random_poly(sys, seed ^ 3);
        let g_other = g.add(&sphere_poly(sys).mul(&random_poly(sys, seed ^ 4)));
        let mut rng = trial_rng(seed, 8);
        let v = normal_vec(&mut rng, sys.dim());
        let xi = Covector(scaled(&v, 1.0 / norm(&v)));
        let a = bracket_functions(sys, &f, &FunctionModel::Polynomial { polynomial: g }, &xi, None).unwrap();
        let b = bracket_functions(sys, &f, &FunctionModel::Polynomial { polynomial: g_other }, &xi, None).unwrap();
        prop_assert!((a - b).abs() < 1e-10 * (1.0 + a.abs()));
    }

    #[test]
    fn invariants_are_casimirs(which in 0usize..6, seed in any::<u64>()) {
        let sys = &systems()[which];
        let mut rng = trial_rng(seed, 9);
        let xi = Covector(normal_vec(&mut rng, sys.dim()));
        let g = FunctionModel::Linear { coeffs: normal_vec(&mut rng, sys.dim()) };
        for i in 0..sys.rank() {
            let b = bracket_functions(sys, &FunctionModel::invariant(i), &g, &xi, None).unwrap();
            let scale = norm(&sys.invariants.gradients(&xi)[i]) * norm(&xi);
            prop_assert!(b.abs() < 1e-10 * (1.0 + scale));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn flows_stay_on_one_leaf(seed in any::<u64>(), index in 0usize..8) {
        let sys = su3();
        let xi0 = Covector(normal_vec(&mut trial_rng(seed, 10), sys.dim()));
        let start = leaf_dimension(sys, &xi0);
        let traj = hamiltonian_flow(sys, &FunctionModel::coordinate(index), &xi0, 1.0, None, None).unwrap();
        for s in traj.iter().step_by(97) {
            prop_assert_eq!(leaf_dimension(sys, &s.point), start);
            prop_assert!((dot(&s.point, &s.point) - dot(&xi0, &xi0)).abs() < 1e-9);
        }
    }

    #[test]
    fn classification_is_symmetric_and_orbit_invariant(seed in any::<u64>(), deg in 1usize..5) {
        let sys = su3();
        static GRID: OnceLock<Vec<Vec<f64>>> = OnceLock::new();
        let grid = GRID.get_or_init(|| delta_prime_grid(su3(), 201).unwrap());
        let mut rng = trial_rng(seed, 11);
        let hf = Polynomial::univariate(&normal_vec(&mut rng, deg + 1));
        let hg = Polynomial::univariate(&normal_vec(&mut rng, deg + 1));
        let mut flipped = hf.clone();
        for t in &mut flipped.terms {
            if t.powers[0] % 2 == 1 {
                t.coeff = -t.coeff;
            }
        }
        let (f, g, fa) = (CasimirModel::polynomial(hf), CasimirModel::polynomial(hg), CasimirModel::polynomial(flipped));
        let fg = classify_pair(&f, &g, &sys.outer, grid).unwrap();
        let gf = classify_pair(&g, &f, &sys.outer, grid).unwrap();
        let moved = classify_pair(&fa, &g, &sys.outer, grid).unwrap();
        prop_assert_eq!(fg.equivalent, gf.equivalent);
        prop_assert_eq!(fg.equivalent, moved.equivalent);
        let self_pair = classify_pair(&f, &fa, &sys.outer, grid).unwrap();
        prop_assert!(self_pair.equivalent && self_pair.residual < 1e-9);
    }
}
