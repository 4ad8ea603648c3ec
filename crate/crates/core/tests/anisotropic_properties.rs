use anisoreg::anisotropic::{phi_circ_planar, MeasureOptions, Theta};
use anisoreg::{phi_circ, phi_diamond, AnisotropicYoungFunction, LevelLadder, ScalarYoungFunction};
use proptest::prelude::*;

fn pw(p: f64) -> ScalarYoungFunction {
    ScalarYoungFunction::power_scaled(p, 1.0).unwrap()
}

#[test]
fn shear_leaves_phi_circ_unchanged() {
    let split = AnisotropicYoungFunction::split(vec![pw(2.0), pw(4.0)]).unwrap();
    // ξ ↦ (ξ₁ + ξ₂, ξ₂) has determinant 1
    let sheared =
        AnisotropicYoungFunction::linear_combination(2, vec![(vec![1.0, 1.0], pw(2.0)), (vec![0.0, 1.0], pw(4.0))])
            .unwrap();
    let opts = MeasureOptions::default();
    for level in [1e-2, 0.3, 1.0, 7.0, 1e3] {
        let a = split.sublevel_measure(level, &opts).unwrap().value;
        let b = sheared.sublevel_measure(level, &opts).unwrap().value;
        assert!((a / b - 1.0).abs() < 1e-8, "level {level}: {a} vs {b}");
    }
}

#[test]
fn planar_area_matches_closed_form_and_cubature() {
    // split (2, 2) is the Euclidean square: Φ∘ = t²
    let sq = AnisotropicYoungFunction::split(vec![pw(2.0), pw(2.0)]).unwrap();
    let pc = phi_circ_planar(&sq, -23.0, 2e5).unwrap();
    for x in [-5.0, 0.0, 3.0, 100.0, 5e4] {
        assert!((pc.ln_value_at_ln(x) - 2.0 * x).abs() < 1e-10 * x.abs().max(1.0), "x={x}");
    }
    let trud = AnisotropicYoungFunction::linear_combination(
        2,
        vec![
            (vec![1.0, -1.0], pw(2.0)),
            (vec![1.0, 0.0], ScalarYoungFunction::power_log(2.0, 1.0, 7.38905609893065).unwrap()),
        ],
    )
    .unwrap();
    let planar = phi_circ_planar(&trud, -23.0, 600.0).unwrap();
    let cub = phi_circ(&trud, &LevelLadder { lo: 1e-2, hi: 1e6, count: 40 }, &MeasureOptions::default()).unwrap();
    for x in [0.0, 1.0, 2.0, 5.0] {
        let (a, b) = (planar.ln_value_at_ln(x), cub.function.ln_value_at_ln(x));
        assert!((a - b).abs() < 1e-5, "x={x}: {a} vs {b}");
    }
}

#[test]
fn equivalence_constants_are_stable() {
    let f = AnisotropicYoungFunction::split(vec![pw(2.0), pw(4.0)]).unwrap();
    let opts = MeasureOptions::default();
    let coarse = phi_circ(&f, &LevelLadder { lo: 1e-2, hi: 1e6, count: 96 }, &opts).unwrap();
    let fine = phi_circ(&f, &LevelLadder { lo: 1e-2, hi: 1e6, count: 192 }, &opts).unwrap();
    let (a, b) = (phi_diamond(&coarse.function).unwrap(), phi_diamond(&fine.function).unwrap());
    assert!(a.c1 > 0.0 && a.c1 <= a.c2 && a.c2.is_finite());
    assert!((a.c1 / b.c1 - 1.0).abs() < 0.1 && (a.c2 / b.c2 - 1.0).abs() < 0.1, "{a:?} {b:?}");
}

#[test]
fn theta_composition_recovers_phi() {
    let f = AnisotropicYoungFunction::split(vec![pw(2.0), pw(4.0)]).unwrap();
    let pc = phi_circ(&f, &LevelLadder { lo: 1e-4, hi: 1e8, count: 256 }, &MeasureOptions::default()).unwrap();
    let d = phi_diamond(&pc.function).unwrap();
    let theta = Theta::new(&f, &d.function).unwrap();
    let worst = theta.identity_residual(200, 0.2, 20.0, 3).unwrap();
    assert!(worst < 1e-8, "{worst}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn sublevel_measure_is_monotone(p1 in 1.2f64..5.0, p2 in 1.2f64..5.0, l in -3.0f64..6.0) {
        let f = AnisotropicYoungFunction::split(vec![pw(p1), pw(p2)]).unwrap();
        let opts = MeasureOptions::default();
        let a = f.sublevel_measure(l.exp(), &opts).unwrap().value;
        let b = f.sublevel_measure((l + 0.05).exp(), &opts).unwrap().value;
        prop_assert!(a <= b);
    }

    #[test]
    fn radial_phi_circ_is_its_generator(p in 1.2f64..4.0, alpha in 0.0f64..2.0) {
        let g = ScalarYoungFunction::power_log(p, alpha, 7.38905609893065).unwrap();
        let f = AnisotropicYoungFunction::radial(2, g.clone()).unwrap();
        let pc = phi_circ(&f, &LevelLadder { lo: 1e-8, hi: 1e16, count: 1024 }, &MeasureOptions::default()).unwrap();
        for t in [0.1, 1.0, 10.0, 1e3] {
            prop_assert!((pc.function.value(t) / g.value(t) - 1.0).abs() < 1e-4);
        }
    }
}
