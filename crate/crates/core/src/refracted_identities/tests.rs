use super::*;
use crate::canonical::Canonical;
use crate::levy_model::JumpSpec;

fn m1() -> (LevyModel, RefractionConfig) {
    (Canonical::M1.model(), Canonical::M1.refraction())
}

fn m2() -> (LevyModel, RefractionConfig) {
    (Canonical::M2.model(), Canonical::M2.refraction())
}

#[test]
fn boundary_values_are_exact() {
    let (m, r) = m1();
    let q = ExitQuery::new(3.0, 3.0, 0.1, r);
    assert_eq!(two_sided_up(&m, &q).unwrap().value, 1.0);
    assert_eq!(one_sided_up(&m, 3.0, 3.0, 0.1, &r).unwrap().value, 1.0);
    let (m2, r2) = m2();
    let q = ExitQuery::new(0.0, 3.0, 0.2, r2);
    assert_eq!(two_sided_up(&m2, &q).unwrap().value, 0.0);
    assert_eq!(creeping(&m, 1.0, 0.1, &r).unwrap().value, 0.0);
}

#[test]
fn exit_values_in_range_and_monotone() {
    for (m, r) in [m1(), m2()] {
        let mut prev_up = -1.0;
        let mut prev_down = 2.0;
        for i in 0..=12 {
            let x = 0.25 * i as f64;
            let q = ExitQuery::new(x, 3.0, 0.1, r);
            let up = two_sided_up(&m, &q).unwrap().value;
            let down = two_sided_down(&m, &q).unwrap().value;
            let od = one_sided_down(&m, x, 0.1, &r).unwrap().value;
            assert!((0.0..=1.0).contains(&up) && (0.0..=1.0).contains(&down), "x={x}");
            assert!(up + down <= 1.0 + 1e-12);
            assert!(up >= prev_up - 1e-12 && od <= prev_down + 1e-12);
            let ou = one_sided_up(&m, x, 3.0, 0.1, &r).unwrap().value;
            assert!(ou >= up - 1e-12);
            prev_up = up;
            prev_down = od;
        }
    }
}

#[test]
fn small_delta_recovers_classical() {
    for (m, r) in [m1(), m2()] {
        let r = RefractionConfig::new(1e-8, r.b);
        for x in [0.3, 1.0, 2.0, 2.8] {
            let q = ExitQuery::new(x, 3.0, 0.4, r);
            let got = two_sided_up(&m, &q).unwrap().value;
            assert!((got - classical_two_sided(x, 3.0, 0.4, &m).unwrap()).abs() < 1e-6);
            let w = ScaleFunction::new(&m, 0.0, 0.4).unwrap();
            let classical_down = w.z(x) - 0.4 / w.root() * w.w(x);
            let od = one_sided_down(&m, x, 0.4, &r).unwrap().value;
            assert!((od - classical_down).abs() < 1e-6, "x={x}: {od} vs {classical_down}");
        }
    }
}

#[test]
fn ruin_with_zero_threshold_is_ruin_of_y() {
    let (m, _) = m1();
    let r = RefractionConfig::new(0.5, 0.0);
    let ww = ScaleFunction::new(&m, 0.5, 0.0).unwrap();
    for x in [0.0, 0.5, 3.0] {
        let got = ruin_probability(&m, x, &r).unwrap().value;
        let want = 1.0 - (m.mean() - 0.5) * ww.w(x);
        assert!((got - want).abs() < 1e-9, "x={x}: {got} vs {want}");
    }
    let err = ruin_probability(&m, 1.0, &RefractionConfig::new(1.2, 1.0)).unwrap_err();
    assert!(matches!(err, Error::DriftNotDominating { .. }));
}

#[test]
fn resolvent_masses_complement_exits() {
    for (m, r) in [m1(), m2()] {
        let q = 0.3;
        for x in [0.4, 1.0, 2.2] {
            let eq = ExitQuery::new(x, 3.0, q, r);
            let up = two_sided_up(&m, &eq).unwrap().value;
            let down = two_sided_down(&m, &eq).unwrap().value;
            let mass = resolvent_two_sided(&m, x, 3.0, q, &r).unwrap().total_mass().unwrap().value;
            assert!((q * mass + up + down - 1.0).abs() < 1e-8, "two-sided x={x}");

            let od = one_sided_down(&m, x, q, &r).unwrap().value;
            let mass = resolvent_killed_below(&m, x, q, &r).unwrap().total_mass().unwrap().value;
            assert!((q * mass + od - 1.0).abs() < 1e-8, "killed below x={x}: {}", q * mass + od);

            let ou = one_sided_up(&m, x, 3.0, q, &r).unwrap().value;
            let mass = resolvent_killed_above(&m, x, 3.0, q, &r).unwrap().total_mass().unwrap().value;
            assert!((q * mass + ou - 1.0).abs() < 1e-8, "killed above x={x}: {}", q * mass + ou);

            let mass = resolvent_free(&m, x, q, &r).unwrap().total_mass().unwrap().value;
            assert!((q * mass - 1.0).abs() < 1e-8, "free x={x}: {}", q * mass);
        }
    }
}

#[test]
fn resolvent_densities_are_non_negative() {
    let (m, r) = m2();
    let res = resolvent_free(&m, 1.5, 0.2, &r).unwrap();
    for i in 0..80 {
        let y = -6.0 + 0.15 * i as f64;
        assert!(res.density(y).unwrap() >= -1e-10, "y={y}");
    }
    let left = res.density(1.0 - 1e-9).unwrap();
    let right = res.density(1.0).unwrap();
    assert!((left - right).abs() < 1e-6);
}

#[test]
fn key_identity_holds() {
    let (m, r) = m1();
    for (u, v, mm, q) in [(1.0, 2.0, 0.5, 0.3), (1.5, 1.5, 0.0, 0.1), (2.0, 4.0, 0.2, 0.0)] {
        let res = verify_key_identity(u, v, mm, &m, &r, q).unwrap();
        assert!(res < 1e-8, "{u} {v} {mm} {q}: {res}");
    }
}

#[test]
fn creeping_from_zero_is_certain_with_gaussian_part() {
    let (m, r) = m2();
    let c = creeping(&m, 0.0, 0.2, &r).unwrap().value;
    assert!((c - 1.0).abs() < 1e-9, "{c}");
    let c = creeping(&m, 1.5, 0.2, &r).unwrap().value;
    let od = one_sided_down(&m, 1.5, 0.2, &r).unwrap().value;
    assert!(c > 0.0 && c < od);
}

#[test]
fn classical_overshoot_totals() {
    let m = LevyModel::with_linear_drift(2.0, 0.0, JumpSpec::single_exponential(1.0, 1.0)).unwrap();
    let total = classical_overshoot(1.0, 3.0, 0.0, &m, |_| 1.0, |_| 1.0).unwrap();
    let want = 1.0 - classical_two_sided(1.0, 3.0, 0.0, &m).unwrap();
    assert!((total - want).abs() < 1e-9);
}
