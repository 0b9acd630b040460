use super::*;
use crate::canonical::Canonical;
use crate::levy_model::JumpSpec;
use crate::refracted_identities::Refracted;

fn m1() -> (LevyModel, RefractionConfig) {
    (Canonical::M1.model(), Canonical::M1.refraction())
}

fn exact(n: usize, horizon: f64) -> SimConfig {
    SimConfig::new(Scheme::ExactBV, horizon, n, 7)
}

#[test]
fn deterministic_path_without_jumps() {
    let m = LevyModel::with_linear_drift(2.0, 0.0, JumpSpec::NoJumps).unwrap();
    let r = RefractionConfig::new(0.5, 1.0);
    let p = simulate_exact_bv(&m, &r, 0.5, 2.0, 1).unwrap();
    assert_eq!(p.times.len(), 2);
    assert!((p.times[0] - 0.25).abs() < 1e-15);
    assert!((p.values[1] - 3.625).abs() < 1e-12);
    assert_eq!(p.slopes, vec![SlopeTag::Free, SlopeTag::Refracted]);
    let t = p.first_passage_above(3.0).unwrap();
    assert!((t - (0.25 + 2.0 / 1.5)).abs() < 1e-12);
    assert!(p.ruin.is_none());
}

#[test]
fn above_threshold_moves_at_reduced_slope() {
    let m = LevyModel::with_linear_drift(2.0, 0.0, JumpSpec::NoJumps).unwrap();
    let r = RefractionConfig::new(0.5, 1.0);
    let p = simulate_exact_bv(&m, &r, 1.5, 10.0, 1).unwrap();
    assert!((p.first_passage_above(4.5).unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn exact_paths_satisfy_the_equation() {
    let (m, r) = m1();
    for seed in 0..20 {
        let p = simulate_exact_bv(&m, &r, 1.3, 60.0, seed).unwrap();
        assert!(p.sde_residual(r.delta) < 1e-10, "seed {seed}: {}", p.sde_residual(r.delta));
        for i in 1..p.times.len() {
            assert!(p.running_sup[i] >= p.running_sup[i - 1]);
            assert!(p.running_inf[i] <= p.running_inf[i - 1]);
            let (prev, cur) = (p.slopes[i - 1], p.slopes[i]);
            if prev == SlopeTag::Free && cur == SlopeTag::Refracted {
                // the stretch before event i started at or below b
                assert!(p.values[i - 1] <= r.b + 1e-12);
            }
            if prev == SlopeTag::Refracted && cur == SlopeTag::Free {
                assert!(p.values[i - 1] < r.b, "left b without a jump");
            }
            if cur == SlopeTag::Refracted && p.left_values[i] == p.values[i] {
                assert!(p.values[i] >= r.b - 1e-12);
            }
        }
        if let Some(ruin) = p.ruin {
            assert!(ruin.undershoot >= 0.0 && ruin.overshoot < 0.0 && !ruin.creep);
        }
    }
}

#[test]
fn exact_scheme_rejects_unbounded_variation() {
    for c in [Canonical::M2, Canonical::M3] {
        let err = simulate_exact_bv(&c.model(), &c.refraction(), 1.0, 1.0, 0).unwrap_err();
        assert_eq!(err.kind(), "SchemeMismatch");
    }
}

#[test]
fn start_at_upper_level() {
    let (m, r) = m1();
    let e = estimate_functional(&m, &r, &Functional::TwoSidedUp { a: 2.0 }, 2.0, 0.1, &exact(100, 10.0)).unwrap();
    assert_eq!((e.mean, e.stderr), (1.0, 0.0));
}

#[test]
fn estimates_are_reproducible_across_thread_counts() {
    let (m, r) = m1();
    let f = Functional::Dividends;
    let sim = exact(5000, 80.0);
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| estimate_functional(&m, &r, &f, 2.0, 0.1, &sim).unwrap())
    };
    let a = run(1);
    let b = run(3);
    assert_eq!(a.mean.to_bits(), b.mean.to_bits());
    assert_eq!(a.stderr.to_bits(), b.stderr.to_bits());
}

#[test]
fn two_sided_exit_matches_identity() {
    let (m, r) = m1();
    let (x, a, q) = (2.0, 3.0, 0.1);
    let e = estimate_functional(&m, &r, &Functional::TwoSidedUp { a }, x, q, &exact(20_000, 100.0)).unwrap();
    let v = Refracted::new(&m, &r, q).unwrap().two_sided_up(x, a).unwrap().value;
    assert!(e.z_score(v).abs() < 3.0, "{e:?} vs {v}");
}

#[test]
fn ruin_is_certain_when_drift_is_too_small() {
    let m = Canonical::M1.model();
    let r = RefractionConfig::new(1.5, 1.0);
    let f = Functional::Ruin { level_cap: f64::INFINITY, completion: None };
    let e = estimate_functional(&m, &r, &f, 2.0, 0.0, &exact(2000, 2000.0)).unwrap();
    assert!(e.mean > 0.99, "{e:?}");
}

#[test]
fn level_cap_bias_is_enforced() {
    let (m, r) = m1();
    let f = Functional::Ruin { level_cap: 3.0, completion: None };
    let err = estimate_functional(&m, &r, &f, 2.0, 0.0, &exact(20_000, 1000.0)).unwrap_err();
    assert_eq!(err.kind(), "BiasBudgetExceeded");
}

#[test]
fn refracted_brownian_motion_is_exact_above_zero_threshold() {
    let m = LevyModel::with_linear_drift(1.0, 1.0, JumpSpec::NoJumps).unwrap();
    let r = RefractionConfig::new(0.5, 0.0);
    let sim = SimConfig::new(Scheme::StrongApprox { eps: 1.0, h: 0.01, gaussian: true }, 40.0, 20_000, 3);
    let q = 0.5;
    let e = estimate_functional(&m, &r, &Functional::OneSidedDown, 1.0, q, &sim).unwrap();
    let v = Refracted::new(&m, &r, q).unwrap().one_sided_down(1.0).unwrap().value;
    assert!(e.z_score(v).abs() < 3.0, "{e:?} vs {v}");
}

#[test]
fn strong_approximation_agrees_with_exact_scheme() {
    let (m, r) = m1();
    let f = Functional::TwoSidedDown { a: 3.0 };
    let n = 20_000;
    let ex = estimate_functional(&m, &r, &f, 1.5, 0.1, &exact(n, 100.0)).unwrap();
    let sim = SimConfig::new(Scheme::StrongApprox { eps: 1e-4, h: 0.05, gaussian: false }, 100.0, n, 11);
    let sa = estimate_functional(&m, &r, &f, 1.5, 0.1, &sim).unwrap();
    let joint = (ex.stderr.powi(2) + sa.stderr.powi(2)).sqrt();
    assert!((ex.mean - sa.mean).abs() < 3.0 * joint, "{ex:?} {sa:?}");
}

#[test]
fn occupation_of_linear_piece() {
    let p = Piece { t0: 1.0, t1: 3.0, u0: 0.0, u1: 4.0, refracted: false, noise: 0.0 };
    assert!((occupation(&p, 1.0, 2.0, 0.0) - 0.5).abs() < 1e-15);
    let v = occupation(&p, 1.0, 2.0, 0.3);
    assert!((v - ((-0.3f64 * 1.5).exp() - (-0.3f64 * 2.0).exp()) / 0.3).abs() < 1e-15);
}

#[test]
fn creep_weights_recover_intercept() {
    let w = creep_weights();
    let fit: f64 = w.iter().zip(CREEP_BANDS).map(|(w, e)| w * (0.3 + 2.0 * e)).sum();
    assert!((fit - 0.3).abs() < 1e-14);
}
