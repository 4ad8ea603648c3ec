use anisoreg::fit::fit_power_log;
use anisoreg::sobolev::{classify_integral, modify_near_zero, sobolev_conjugate, Dichotomy, SobolevOptions};
use anisoreg::ScalarYoungFunction;

fn pw(p: f64) -> ScalarYoungFunction {
    ScalarYoungFunction::power_scaled(p, 1.0).unwrap()
}

fn slope(c: &anisoreg::sobolev::LogCurveFn, a: f64, b: f64) -> f64 {
    (c.ln_eval(b) - c.ln_eval(a)) / (b - a)
}

#[test]
fn verdict_is_dilation_invariant() {
    let cases = [
        (pw(1.5), 2),
        (pw(2.0), 2),
        (pw(3.0), 2),
        (pw(2.0), 3),
        (ScalarYoungFunction::power_log(2.0, 0.5, 7.38905609893065).unwrap(), 2),
        (ScalarYoungFunction::power_log(2.0, 1.0, 7.38905609893065).unwrap(), 2),
        (ScalarYoungFunction::power_log(2.0, 2.0, 7.38905609893065).unwrap(), 2),
    ];
    for (a, n) in cases {
        let v = classify_integral(&a, n).unwrap().verdict;
        for lambda in [0.5, 2.0] {
            let d = classify_integral(&a.scaled(lambda, 1.0).unwrap(), n).unwrap().verdict;
            assert_eq!(v, d, "{} n={n} λ={lambda}", a.id());
        }
    }
}

#[test]
fn power_exponents_match_closed_forms() {
    for (p, n) in [(1.5, 2usize), (2.0, 3), (3.0, 4)] {
        let nf = n as f64;
        let prof = sobolev_conjugate(&pw(p), n, &SobolevOptions::default()).unwrap();
        let (hlo, hhi) = prof.phi_n.ln_range();
        let phi_n = slope(&prof.phi_n, hhi - 3.0 * 10f64.ln(), hhi);
        let (vlo, vhi) = prof.vartheta.ln_range();
        let vt = slope(&prof.vartheta, vhi - 3.0 * 10f64.ln(), vhi);
        let (_, rhi) = prof.varrho.ln_range();
        let vr = slope(&prof.varrho, rhi - 3.0 * 10f64.ln(), rhi);
        let expect = [nf * p / (nf - p), nf * (p - 1.0) / (nf - p), nf * (p - 1.0) / (p * (nf - 1.0))];
        for (got, want) in [phi_n, vt, vr].iter().zip(expect) {
            assert!((got / want - 1.0).abs() < 0.02, "p={p} n={n}: {got} vs {want}");
        }
        assert!(hlo < hhi && vlo < vhi);
    }
}

#[test]
fn defining_identities_on_the_grid() {
    let a = ScalarYoungFunction::power_log(1.5, 1.0, 7.38905609893065).unwrap();
    let prof = sobolev_conjugate(&a, 2, &SobolevOptions::default()).unwrap();
    let np = prof.n_prime();
    let h = &prof.h.curve;
    for (x, lh) in h.xs().iter().zip(h.ys()) {
        // Φₙ(H(t)) = Φ∘(t)
        let lphi = prof.phi_circ.ln_value_at_ln(*x);
        assert!((prof.phi_n.ln_eval(*lh) - lphi).abs() < 1e-8 * lphi.abs().max(1.0));
        // ϑₙ(τ) = Φₙ(τ^{1/n'})/τ at τ = H^{n'}
        let lt = np * lh;
        assert!((prof.vartheta.ln_eval(lt) - (prof.phi_n.ln_eval(lt / np) - lt)).abs() < 1e-8 * lt.abs().max(1.0));
        // ϱₙ(y) = y/Φₙ⁻¹(y)^{n'} at y = Φ∘(t)
        let want = lphi - np * prof.phi_n.ln_inverse(lphi);
        assert!((prof.varrho.ln_eval(lphi) - want).abs() < 1e-8 * want.abs().max(1.0));
    }
}

#[test]
fn modification_point_does_not_matter() {
    // p = n = 2 needs the near-zero modification; moving the linearization point keeps
    // the verdict and the growth rate of ln Φₙ
    let a = pw(2.0);
    let opts = SobolevOptions { ln_t_hi: Some(2000.0), per_decade: 16, ..Default::default() };
    let prof = sobolev_conjugate(&a, 2, &opts).unwrap();
    assert!(prof.modification.applied);
    let (m, rec) = modify_near_zero(&a, 2).unwrap();
    let other = a.linearized_below(3.0 * rec.t1).unwrap();
    let alt = sobolev_conjugate(&other, 2, &opts).unwrap();
    assert!(!alt.modification.applied);
    assert_eq!(classify_integral(&m, 2).unwrap().verdict, Dichotomy::Divergent);
    assert_eq!(prof.dichotomy.verdict, alt.dichotomy.verdict);
    // ln Φₙ(s) ≈ c s², so d ln ln Φₙ / d ln s → 2
    let rate = |p: &anisoreg::EmbeddingProfile| {
        let (_, hi) = p.phi_n.ln_range();
        let xs: Vec<f64> = (0..64).map(|i| (hi - 3f64.ln()) + i as f64 * 3f64.ln() / 63.0).collect();
        let ys: Vec<f64> = xs.iter().map(|x| p.phi_n.ln_eval(*x).ln()).collect();
        (ys[63] - ys[0]) / (xs[63] - xs[0])
    };
    let (r1, r2) = (rate(&prof), rate(&alt));
    assert!((r1 / r2 - 1.0).abs() < 0.01, "{r1} vs {r2}");
    assert!((r1 - 2.0).abs() < 0.1, "{r1}");
}

#[test]
fn critical_power_log_fits_exponential_class() {
    // Φ∘ = t² log^{1/2}: exp L^2 regime, ln ϑ ≈ t^2 near infinity
    let a = ScalarYoungFunction::power_log(2.0, 0.5, 7.38905609893065).unwrap();
    let opts = SobolevOptions { ln_t_hi: Some(1e5), stretch_above: Some(50.0), ..Default::default() };
    let prof = sobolev_conjugate(&a, 2, &opts).unwrap();
    let (lo, hi) = prof.varrho.ln_range();
    let xs: Vec<f64> = (0..128).map(|i| (hi / 1000.0).max(lo) * (1000f64).powf(i as f64 / 127.0)).collect();
    let ys: Vec<f64> = xs.iter().map(|x| prof.varrho.ln_eval(*x)).collect();
    let fit = fit_power_log(&xs, &ys, 0.0).unwrap();
    // ϱₙ(s) ≈ s log^{−1/2} s
    assert!((fit.power - 1.0).abs() < 0.02 && (fit.log + 0.5).abs() < 0.15, "{fit:?}");
}
