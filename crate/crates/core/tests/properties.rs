//! Cross-module invariants of the chain and its ergodic distribution.

use gravitation::choice::{entropy, gibbs};
use gravitation::inequality::{income_distribution, lorenz_gini};
use gravitation::kernel::{
    build_kernel, build_kernel_with, stationary_analytic, stationary_eigen, stationary_mean,
    stationary_power, StateDistribution,
};
use gravitation::{HalfRule, ModelParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn params(n: u32, t: f64) -> ModelParams {
    ModelParams::new(n, t).unwrap()
}

const GRID_N: [u32; 6] = [2, 3, 10, 11, 50, 101];
const GRID_T: [f64; 6] = [0.05, 0.2, 1.0, 3.0, 50.0, 1e4];

#[test]
fn every_solver_is_a_fixed_point() {
    for n in GRID_N {
        for t in GRID_T {
            let k = build_kernel(&params(n, t)).unwrap();
            for pi in [
                stationary_power(&k, 1e-12, 100_000).unwrap(),
                stationary_eigen(&k).unwrap(),
                stationary_analytic(k.params()).unwrap(),
            ] {
                assert!(k.residual(pi.probabilities()) <= 1e-8, "N={n} T={t}");
            }
        }
    }
}

#[test]
fn three_solvers_agree() {
    for n in [2u32, 7, 10, 64, 125, 200] {
        for t in [0.1, 0.5, 1.0, 5.0, 100.0] {
            let k = build_kernel(&params(n, t)).unwrap();
            let a = stationary_analytic(k.params()).unwrap();
            let e = stationary_eigen(&k).unwrap();
            let p = stationary_power(&k, 1e-12, 100_000).unwrap();
            assert!(a.tv_distance(&e) <= 1e-8, "N={n} T={t}");
            assert!(a.tv_distance(&p) <= 1e-8, "N={n} T={t}");
            assert!(e.tv_distance(&p) <= 1e-8, "N={n} T={t}");
        }
    }
}

#[test]
fn stationary_laws_are_mirror_symmetric_and_centred() {
    for n in GRID_N.iter().copied().chain([100, 200]) {
        for t in GRID_T {
            let k = build_kernel(&params(n, t)).unwrap();
            for pi in [stationary_analytic(k.params()).unwrap(), stationary_eigen(&k).unwrap()] {
                assert!(pi.asymmetry() <= 1e-10, "N={n} T={t}: {}", pi.asymmetry());
                assert!((stationary_mean(&pi) - 0.5).abs() <= 1e-9, "N={n} T={t}");
            }
        }
    }
}

#[test]
fn non_half_rules_break_symmetry_for_even_n_only() {
    let even = stationary_analytic_rule(10, 1.0, HalfRule::Low);
    assert!(even.asymmetry() > 1e-6);
    let odd = stationary_analytic_rule(11, 1.0, HalfRule::Low);
    assert!(odd.asymmetry() <= 1e-12);
}

fn stationary_analytic_rule(n: u32, t: f64, rule: HalfRule) -> StateDistribution {
    let k = build_kernel_with(&params(n, t), rule).unwrap();
    stationary_eigen(&k).unwrap()
}

#[test]
fn cold_limit_crowds_into_one_good() {
    let pi = stationary_analytic(&params(10, 0.01)).unwrap();
    let p = pi.probabilities();
    assert!(p[0] + p[10] >= 0.999);
}

#[test]
fn hot_limit_is_fair_coin() {
    for n in [10u32, 100] {
        let pi = stationary_analytic(&params(n, 1e6)).unwrap();
        let coin = StateDistribution::binomial(n, 0.5).unwrap();
        assert!(pi.tv_distance(&coin) <= 1e-5);
    }
}

#[test]
fn bimodal_to_unimodal_as_temperature_rises() {
    let temps = [0.05, 0.1, 0.25, 0.5, 1.0, 2.0, 3.0, 5.0, 10.0, 20.0];
    let counts: Vec<usize> = temps
        .iter()
        .map(|t| stationary_analytic(&params(100, *t)).unwrap().modes().len())
        .collect();
    assert_eq!(counts[0], 2);
    assert_eq!(*counts.last().unwrap(), 1);
    // Exactly one switch from two modes to one.
    let switches = counts.windows(2).filter(|w| w[0] != w[1]).count();
    assert_eq!(switches, 1, "{counts:?}");
    assert!(counts.iter().all(|c| *c == 1 || *c == 2));
}

#[test]
fn ergodic_gini_is_at_least_one_half() {
    for n in [2u32, 5, 10, 51, 100] {
        for t in [0.05, 0.3, 1.0, 4.0, 30.0, 1e3] {
            let p = params(n, t);
            let law = income_distribution(&p, &stationary_analytic(&p).unwrap()).unwrap();
            let g = lorenz_gini(law.p_win, 1.0, 0.0).unwrap();
            assert!(g.gini >= 0.5 - 1e-9, "N={n} T={t}: {}", g.gini);
        }
    }
}

#[test]
fn win_share_rises_and_gini_falls_with_temperature() {
    let mut last = (f64::NEG_INFINITY, f64::INFINITY);
    for t in [0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 100.0, 1e3] {
        let p = params(100, t);
        let law = income_distribution(&p, &stationary_analytic(&p).unwrap()).unwrap();
        let g = lorenz_gini(law.p_win, 1.0, 0.0).unwrap().gini;
        assert!(law.p_win >= last.0 - 1e-12 && g <= last.1 + 1e-12, "T={t}");
        last = (law.p_win, g);
    }
}

#[test]
fn gibbs_maximizes_payoff_at_its_entropy() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..200 {
        let k = rng.random_range(2..=8);
        let u: Vec<f64> = (0..k).map(|_| rng.random_range(-3.0..3.0)).collect();
        let t = 10f64.powf(rng.random_range(-1.0..1.0));
        let f = gibbs(&u, t).unwrap();
        let (h_star, best) = (f.entropy(), f.expected_payoff(&u));
        for _ in 0..500 {
            // Perturbations of the optimum probe the binding constraint.
            let g: Vec<f64> = f
                .frequencies()
                .iter()
                .map(|x| (x * (1.0 + rng.random_range(-0.2..0.2))).max(0.0))
                .collect();
            let s: f64 = g.iter().sum();
            let g: Vec<f64> = g.iter().map(|x| x / s).collect();
            if entropy(&g) >= h_star {
                let payoff: f64 = g.iter().zip(&u).map(|(a, b)| a * b).sum();
                assert!(payoff <= best + 1e-9);
            }
        }
    }
}
