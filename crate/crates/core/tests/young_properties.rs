use anisoreg::young::{conjugation_audit, diamond_audit, GrowthCondition, Monotone, Verdict};
use anisoreg::ScalarYoungFunction;
use proptest::prelude::*;

const E2: f64 = 7.38905609893065;

fn analytic_catalog() -> Vec<ScalarYoungFunction> {
    vec![
        ScalarYoungFunction::power(1.5).unwrap(),
        ScalarYoungFunction::power(2.0).unwrap(),
        ScalarYoungFunction::power(3.0).unwrap(),
        ScalarYoungFunction::power_log(2.0, 1.0, E2).unwrap(),
        ScalarYoungFunction::power_log(1.5, -0.5, E2).unwrap(),
        ScalarYoungFunction::power_log(1.0, 1.0, E2).unwrap(),
        ScalarYoungFunction::exp_minus_linear(),
        ScalarYoungFunction::entropy(),
        ScalarYoungFunction::exp_power(1.0).unwrap(),
        ScalarYoungFunction::exp_power(1.5).unwrap(),
    ]
}

#[test]
fn analytic_conjugation_checks() {
    for a in analytic_catalog() {
        let r = conjugation_audit(&a, 1e-2, 1e4, 200, 100).unwrap();
        assert!(r.pass(), "{r:?}");
        assert!(r.involution_probes >= 50, "{r:?}");
    }
}

#[test]
fn sampled_conjugation_checks() {
    for a in [ScalarYoungFunction::power(3.0).unwrap(), ScalarYoungFunction::power_log(2.0, 1.0, E2).unwrap()] {
        let s = a.sampled(1e-4, 1e6, 2048).unwrap();
        let r = conjugation_audit(&s, 1e-2, 1e4, 200, 100).unwrap();
        assert!(r.pass(), "{r:?}");
        assert_eq!(r.involution_tolerance, 1e-3);
    }
}

#[test]
fn diamond_relations_for_catalog() {
    for a in analytic_catalog() {
        let r = diamond_audit(&a, 1e-2, 1e4, 200).unwrap();
        assert!(r.pass(), "{r:?}");
        assert!(r.probes > 100, "{r:?}");
    }
}

#[test]
fn exp_growth_breaks_doubling() {
    let e = ScalarYoungFunction::from_id("exp_power:beta=1").unwrap();
    assert_eq!(e.check_growth_condition(GrowthCondition::Delta2).verdict, Verdict::Fails);
    let tlog = ScalarYoungFunction::power_log(1.0, 1.0, 1.0).unwrap();
    assert_eq!(tlog.check_growth_condition(GrowthCondition::Nabla2).verdict, Verdict::Fails);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn young_inequality_for_powers(p in 1.05f64..6.0, ls in -4.0f64..4.0, lt in -4.0f64..4.0) {
        let a = ScalarYoungFunction::power(p).unwrap();
        let c = a.conjugate().unwrap();
        let (s, t) = (ls.exp(), lt.exp());
        prop_assert!(s * t <= (a.value(s) + c.value(t)) * (1.0 + 1e-12));
    }

    #[test]
    fn young_inequality_for_power_logs(p in 1.1f64..4.0, alpha in -0.5f64..3.0, ls in -3.0f64..6.0, lt in -3.0f64..5.0) {
        let a = ScalarYoungFunction::power_log(p, alpha, E2).unwrap();
        prop_assume!(a.convexity_certified());
        let c = a.conjugate().unwrap();
        let (s, t) = (ls.exp(), lt.exp());
        prop_assert!(s * t <= (a.value(s) + c.value(t)) * (1.0 + 1e-12));
    }

    #[test]
    fn inverse_is_left_continuous(p in 1.05f64..6.0, ly in -20.0f64..20.0) {
        let a = ScalarYoungFunction::power_log(p, 1.0, E2).unwrap();
        let y = ly.exp();
        let x = a.inverse(y).unwrap();
        prop_assert!(a.value(x) <= y * (1.0 + 1e-12));
        prop_assert!(a.value(x * (1.0 + 1e-9)) >= y);
    }

    #[test]
    fn psi_is_nondecreasing(p in 1.05f64..5.0, alpha in 0.0f64..3.0, lt in -5.0f64..8.0) {
        let a = ScalarYoungFunction::power_log(p, alpha, E2).unwrap();
        let psi = anisoreg::psi_of(&a).unwrap();
        let t = lt.exp();
        prop_assert!(psi.eval(t) <= psi.eval(t * 1.01));
    }

    #[test]
    fn powers_satisfy_doubling(p in 1.1f64..8.0) {
        let a = ScalarYoungFunction::power(p).unwrap();
        prop_assert_eq!(a.check_growth_condition(GrowthCondition::Delta2).verdict, Verdict::Holds);
        prop_assert_eq!(a.check_growth_condition(GrowthCondition::Nabla2).verdict, Verdict::Holds);
    }
}
