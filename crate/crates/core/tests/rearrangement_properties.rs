use anisoreg::rearrangement::{
    luxemburg_norm, maximal_rearrangement, orlicz_lorentz_norm, rearrange, LorentzVariant,
    RearrangedFunction,
};
use anisoreg::ScalarYoungFunction;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// ∫₀^∞ u* v* for two step functions.
fn product_integral(u: &RearrangedFunction, v: &RearrangedFunction) -> f64 {
    let mut cuts: Vec<f64> = u.breaks().iter().chain(v.breaks()).copied().collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    cuts.windows(2).map(|w| u.eval(w[0]) * v.eval(w[0]) * (w[1] - w[0])).sum()
}

/// Luxemburg norm straight from field values and cell measures.
fn direct_norm(a: &ScalarYoungFunction, values: &[f64], weights: &[f64]) -> f64 {
    let modular = |lam: f64| values.iter().zip(weights).map(|(u, w)| a.value(u.abs() / lam) * w).sum::<f64>();
    let (mut lo, mut hi) = (1e-12_f64, 1e12_f64);
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        if modular(mid) <= 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

#[test]
fn hardy_littlewood_on_random_fields() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let m = rng.gen_range(4..200);
        let w: Vec<f64> = (0..m).map(|_| rng.gen_range(0.01..1.0)).collect();
        let u: Vec<f64> = (0..m).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let v: Vec<f64> = (0..m).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let lhs: f64 = u.iter().zip(&v).zip(&w).map(|((a, b), c)| (a * b).abs() * c).sum();
        let rhs = product_integral(&rearrange(&u, &w).unwrap(), &rearrange(&v, &w).unwrap());
        assert!(lhs <= rhs * (1.0 + 1e-12), "{lhs} > {rhs}");
    }
}

#[test]
fn norm_equals_field_norm_for_steps() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let a = ScalarYoungFunction::power_log(2.0, 1.0, 7.38905609893065).unwrap();
    for _ in 0..10 {
        let m = rng.gen_range(3..40);
        let w: Vec<f64> = (0..m).map(|_| rng.gen_range(0.01..0.1)).collect();
        let u: Vec<f64> = (0..m).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let r = luxemburg_norm(&a, &rearrange(&u, &w).unwrap()).unwrap().value();
        let d = direct_norm(&a, &u, &w);
        assert!((r / d - 1.0).abs() < 1e-10, "{r} vs {d}");
    }
}

#[test]
fn lorentz_norm_of_power_matches_quadrature() {
    // A = t^q: ‖s^{1/r} u*‖_{L^q} = (∫ s^{q/r} u*^q ds)^{1/q}
    let u = RearrangedFunction::new(vec![0.0, 0.2, 0.5, 1.3], vec![4.0, 1.5, 0.25]).unwrap();
    let (q, r) = (3.0, 2.0);
    let a = ScalarYoungFunction::power_scaled(q, 1.0).unwrap();
    let norm = orlicz_lorentz_norm(&a, r, &u, LorentzVariant::Star).unwrap().value();
    let e = q / r + 1.0;
    let direct: f64 = u
        .breaks()
        .windows(2)
        .zip(u.values())
        .map(|(b, v)| v.powf(q) * (b[1].powf(e) - b[0].powf(e)) / e)
        .sum::<f64>()
        .powf(1.0 / q);
    assert!((norm / direct - 1.0).abs() < 1e-8, "{norm} vs {direct}");
}

fn step_strategy() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (2usize..60).prop_flat_map(|m| {
        (proptest::collection::vec(-10.0f64..10.0, m), proptest::collection::vec(0.001f64..1.0, m))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rearrangement_is_equimeasurable((u, w) in step_strategy(), t in 0.0f64..10.0) {
        let r = rearrange(&u, &w).unwrap();
        let direct: f64 = u.iter().zip(&w).filter(|(v, _)| v.abs() > t).map(|(_, c)| c).sum();
        prop_assert!((r.distribution(t) - direct).abs() <= 1e-12 * w.iter().sum::<f64>());
        prop_assert!((r.measure() - w.iter().sum::<f64>()).abs() <= 1e-12 * r.measure());
    }

    #[test]
    fn maximal_rearrangement_dominates((u, w) in step_strategy(), frac in 0.001f64..0.999) {
        let r = rearrange(&u, &w).unwrap();
        let ds = r.double_star();
        let s = frac * r.measure();
        let s2 = (s * 1.3).min(r.measure());
        prop_assert!(r.eval(s) <= ds.eval(s) * (1.0 + 1e-12));
        prop_assert!(ds.eval(s2) <= ds.eval(s) * (1.0 + 1e-12));
        prop_assert!(s * ds.eval(s) <= s2 * ds.eval(s2) * (1.0 + 1e-12));
        let m = maximal_rearrangement(&r, 8);
        prop_assert!(m.eval(s) >= r.eval(s) * (1.0 - 1e-12));
    }

    #[test]
    fn luxemburg_norm_is_homogeneous((u, w) in step_strategy(), c in 0.01f64..100.0) {
        let a = ScalarYoungFunction::power_log(1.5, 1.0, 7.38905609893065).unwrap();
        let r = rearrange(&u, &w).unwrap();
        prop_assume!(r.values()[0] > 0.0);
        let n1 = luxemburg_norm(&a, &r).unwrap().value();
        let n2 = luxemburg_norm(&a, &r.scaled(c)).unwrap().value();
        prop_assert!((n2 / (c * n1) - 1.0).abs() < 1e-10, "{} vs {}", n2, c * n1);
    }
}
