//! Explicit solution of the symmetrized radial problem, its L∞ bound, and the a-priori
//! superlevel-set estimates for u and Φ(∇u).

use crate::anisotropic::Theta;
use crate::error::{Error, Result};
use crate::numeric::omega;
use crate::rearrangement::{boundedness_criterion, integrate_on, Improper, RearrangedFunction};
use crate::sobolev::{Dichotomy, EmbeddingProfile};
use crate::young::Monotone;
use rayon::prelude::*;
use serde::Serialize;
use std::cell::RefCell;

/// Default radial node count.
pub const RADIAL_NODES: usize = 4096;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialSolution {
    pub n: usize,
    pub measure: f64,
    /// ω_n Rⁿ = |Ω|
    pub radius: f64,
    pub r: Vec<f64>,
    /// nonincreasing, v(R) = 0
    pub v: Vec<f64>,
    /// |∇v|, nondecreasing
    pub g: Vec<f64>,
}

/// r_j = R sin(πj/(2(N−1))): clustered towards r = R.
pub fn radial_nodes(radius: f64, count: usize) -> Vec<f64> {
    let m = count.max(2) - 1;
    let mut r: Vec<f64> = (0..=m)
        .map(|j| radius * (std::f64::consts::FRAC_PI_2 * j as f64 / m as f64).sin())
        .collect();
    r[m] = radius;
    r
}

/// Integrand s ↦ (nω^{1/n} s^{1/n'})⁻¹ Ψ⁻¹(s^{1/n} f**(s)/(nω^{1/n})) together with the
/// first inversion error it met.
struct Kernel<'a, P: ?Sized> {
    psi: &'a P,
    ds: crate::rearrangement::DoubleStar<'a>,
    n: f64,
    c: f64,
    err: RefCell<Option<Error>>,
}

impl<'a, P: Monotone + ?Sized> Kernel<'a, P> {
    fn new(psi: &'a P, f: &'a RearrangedFunction, n: usize) -> Self {
        let nf = n as f64;
        Self {
            psi,
            ds: f.double_star(),
            n: nf,
            c: nf * omega(n).powf(1.0 / nf),
            err: RefCell::new(None),
        }
    }

    fn gradient_at(&self, s: f64) -> f64 {
        let w = self.ds.eval(s);
        if w == 0.0 || s == 0.0 {
            return 0.0;
        }
        let arg = s.powf(1.0 / self.n) * w / self.c;
        match self.psi.inverse(arg) {
            Ok(v) => v,
            Err(e) => {
                self.err.borrow_mut().get_or_insert(Error::OutOfRange {
                    what: format!("inverse of Psi ({e})"),
                    at: arg,
                    lo: 0.0,
                    hi: f64::MAX,
                });
                f64::NAN
            }
        }
    }

    fn density(&self, s: f64) -> f64 {
        if s == 0.0 {
            return 0.0;
        }
        let g = self.gradient_at(s);
        if g == 0.0 {
            return 0.0;
        }
        g * s.powf(1.0 / self.n - 1.0) / self.c
    }

    fn finish(self) -> Result<()> {
        match self.err.into_inner() {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }
}

/// v(r) = ∫_{ω rⁿ}^{|Ω|} (nω^{1/n} s^{1/n'})⁻¹ Ψ⋄⁻¹(s^{1/n} f**(s)/(nω^{1/n})) ds on the
/// default radial grid.
pub fn solve_radial<P: Monotone + ?Sized>(
    psi: &P,
    f: &RearrangedFunction,
    n: usize,
) -> Result<RadialSolution> {
    solve_radial_with(psi, f, n, RADIAL_NODES)
}

pub fn solve_radial_with<P: Monotone + ?Sized>(
    psi: &P,
    f: &RearrangedFunction,
    n: usize,
    nodes: usize,
) -> Result<RadialSolution> {
    if n < 2 {
        return Err(Error::invalid("dimension must be at least 2"));
    }
    let measure = f.measure();
    let w = omega(n);
    let radius = (measure / w).powf(1.0 / n as f64);
    let r = radial_nodes(radius, nodes);
    let mut s: Vec<f64> = r.iter().map(|x| w * x.powi(n as i32)).collect();
    *s.last_mut().unwrap() = measure;
    let segments: Vec<Result<(f64, f64)>> = (0..s.len())
        .into_par_iter()
        .map(|j| {
            let k = Kernel::new(psi, f, n);
            let seg = if j + 1 < s.len() {
                integrate_on(f, s[j], s[j + 1], &|x| k.density(x))
            } else {
                0.0
            };
            let g = k.gradient_at(s[j]);
            k.finish()?;
            Ok((seg, g))
        })
        .collect();
    let mut seg = Vec::with_capacity(s.len());
    let mut g = Vec::with_capacity(s.len());
    for item in segments {
        let (a, b) = item?;
        seg.push(a);
        g.push(b);
    }
    let mut v = vec![0.0; s.len()];
    for j in (0..s.len() - 1).rev() {
        v[j] = v[j + 1] + seg[j];
    }
    Ok(RadialSolution { n, measure, radius, r, v, g })
}

impl RadialSolution {
    /// v*(s), the decreasing rearrangement of the radial solution, by linear
    /// interpolation in r.
    pub fn v_star(&self, s: f64) -> f64 {
        if s >= self.measure {
            return 0.0;
        }
        let rr = (s.max(0.0) / omega(self.n)).powf(1.0 / self.n as f64);
        let k = self.r.partition_point(|x| *x <= rr).clamp(1, self.r.len() - 1);
        let (r0, r1) = (self.r[k - 1], self.r[k]);
        let t = ((rr - r0) / (r1 - r0)).clamp(0.0, 1.0);
        self.v[k - 1] + t * (self.v[k] - self.v[k - 1])
    }

    pub fn sup(&self) -> f64 {
        self.v[0]
    }

    pub fn rows(&self) -> impl Iterator<Item = [f64; 3]> + '_ {
        (0..self.r.len()).map(|j| [self.r[j], self.v[j], self.g[j]])
    }

    /// ∫_{B_R} Θ⋄(|∇v|) dx by the trapezoidal rule in r.
    pub fn theta_integral<T: Monotone + ?Sized>(&self, theta: &T) -> f64 {
        let nf = self.n as f64;
        let shell = nf * omega(self.n);
        let h: Vec<f64> = self
            .r
            .iter()
            .zip(&self.g)
            .map(|(r, g)| theta.eval(*g) * shell * r.powf(nf - 1.0))
            .collect();
        self.r.windows(2).zip(h.windows(2)).map(|(r, y)| 0.5 * (r[1] - r[0]) * (y[0] + y[1])).sum()
    }
}

/// Sharp sup bound: the same integral as v(0).
pub fn linf_bound<P: Monotone + ?Sized>(
    f: &RearrangedFunction,
    psi: &P,
    n: usize,
) -> Result<Improper> {
    boundedness_criterion(f, psi, n)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GradientL1Report {
    pub bound: f64,
    pub measured: f64,
    pub pass: bool,
}

/// 2ω_n^{−1/n}|Ω|^{1/n}‖f‖₁.
pub fn gradient_l1_constant(n: usize, measure: f64, f_l1: f64) -> f64 {
    let inv_n = 1.0 / n as f64;
    2.0 * omega(n).powf(-inv_n) * measure.powf(inv_n) * f_l1
}

/// Compares Σ Θ(∇u)·cell with the L¹ gradient bound; `gradients` is flattened with
/// stride n.
pub fn gradient_l1_bound(
    theta: &Theta,
    gradients: &[f64],
    cells: &[f64],
    measure: f64,
    f_l1: f64,
    n: usize,
) -> Result<GradientL1Report> {
    if gradients.len() != n * cells.len() {
        return Err(Error::invalid("gradient samples and cells disagree in length"));
    }
    let mut measured = 0.0;
    for (xi, c) in gradients.chunks(n).zip(cells) {
        measured += theta.eval(xi)? * c;
    }
    Ok(report(gradient_l1_constant(n, measure, f_l1), measured))
}

fn report(bound: f64, measured: f64) -> GradientL1Report {
    GradientL1Report { bound, measured, pass: measured <= bound * (1.0 + 1e-12) }
}

/// Radial version for a radial Φ = Φ⋄(|ξ|): measured ∫Θ⋄(|∇v|) on the ball.
pub fn gradient_l1_bound_radial<T: Monotone + ?Sized>(
    sol: &RadialSolution,
    theta: &T,
    f_l1: f64,
) -> GradientL1Report {
    report(gradient_l1_constant(sol.n, sol.measure, f_l1), sol.theta_integral(theta))
}

/// K + |Ω| when Φ was modified near zero, K otherwise.
pub fn effective_k(k: f64, profile: &EmbeddingProfile, measure: f64) -> f64 {
    if profile.modification.applied {
        k + measure
    } else {
        k
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCheck {
    /// bound(t) at every probe, NaN below the validity threshold
    pub bound: Vec<f64>,
    pub measured: Vec<f64>,
    /// max measured/bound over valid probes
    pub worst_ratio: f64,
    pub pass: bool,
}

fn check_against(probes: &[f64], measured: &[f64], bound: impl Fn(f64) -> Option<f64>) -> BoundCheck {
    let mut worst = 0.0f64;
    let b: Vec<f64> = probes
        .iter()
        .zip(measured)
        .map(|(t, m)| match bound(*t) {
            Some(v) => {
                if *m > 0.0 {
                    worst = worst.max(if v > 0.0 { m / v } else { f64::INFINITY });
                }
                v
            }
            None => f64::NAN,
        })
        .collect();
    BoundCheck {
        bound: b,
        measured: measured.to_vec(),
        worst_ratio: worst,
        pass: worst <= 1.0 + 1e-12,
    }
}

/// t ↦ Kt/Φₙ(κ₂ t^{1/n'} K^{−1/n}) for t > t₀.
#[derive(Debug, Clone)]
pub struct LevelSetBoundU<'a> {
    pub k: f64,
    pub t0: f64,
    pub kappa2: f64,
    profile: &'a EmbeddingProfile,
}

pub fn level_set_bound_u(
    k: f64,
    t0: f64,
    profile: &EmbeddingProfile,
    kappa2: f64,
) -> Result<LevelSetBoundU<'_>> {
    if profile.dichotomy.verdict == Dichotomy::Convergent {
        return Err(Error::Refused(
            "the convergent case has bounded solutions; no decay estimate applies".into(),
        ));
    }
    if !(k > 0.0) || !(kappa2 > 0.0) {
        return Err(Error::invalid("K and κ₂ must be positive"));
    }
    Ok(LevelSetBoundU { k, t0, kappa2, profile })
}

impl LevelSetBoundU<'_> {
    fn ln_bound_with(&self, t: f64, kappa2: f64) -> f64 {
        let nf = self.profile.n as f64;
        let x = kappa2.ln() + t.ln() / self.profile.n_prime() - self.k.ln() / nf;
        self.k.ln() + t.ln() - self.profile.phi_n.ln_eval(x)
    }

    pub fn ln_eval(&self, t: f64) -> f64 {
        self.ln_bound_with(t, self.kappa2)
    }

    pub fn eval(&self, t: f64) -> Option<f64> {
        (t > self.t0).then(|| self.ln_eval(t).exp())
    }

    /// μ_u(t) against the bound on the probe ladder.
    pub fn check(&self, t: &[f64], mu: &[f64]) -> BoundCheck {
        check_against(t, mu, |x| self.eval(x))
    }

    /// Largest κ₂ in [1e−12, 1e12] for which the bound holds on the probes.
    pub fn calibrate_kappa2(&self, t: &[f64], mu: &[f64]) -> Option<f64> {
        let holds = |kap: f64| {
            t.iter().zip(mu).filter(|(x, m)| **x > self.t0 && **m > 0.0).all(|(x, m)| {
                m.ln() <= self.ln_bound_with(*x, kap) + 1e-12
            })
        };
        let (mut lo, mut hi) = (1e-12f64.ln(), 1e12f64.ln());
        if !holds(lo.exp()) {
            return None;
        }
        if holds(hi.exp()) {
            return Some(hi.exp());
        }
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if holds(mid.exp()) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(lo.exp())
    }
}

/// s ↦ c₁ Φₙ⁻¹(s)^{n'}/s.
#[derive(Debug, Clone)]
pub struct LevelSetBoundGrad<'a> {
    pub k: f64,
    pub c1: f64,
    profile: &'a EmbeddingProfile,
}

pub fn level_set_bound_grad(k: f64, profile: &EmbeddingProfile, c1: f64) -> Result<LevelSetBoundGrad<'_>> {
    if profile.dichotomy.verdict == Dichotomy::Convergent {
        return Err(Error::Refused(
            "the convergent case has bounded solutions; no decay estimate applies".into(),
        ));
    }
    if !(k > 0.0) || !(c1 > 0.0) {
        return Err(Error::invalid("K and c₁ must be positive"));
    }
    Ok(LevelSetBoundGrad { k, c1, profile })
}

impl LevelSetBoundGrad<'_> {
    /// ln(Φₙ⁻¹(s)^{n'}/s)
    fn ln_shape(&self, s: f64) -> f64 {
        self.profile.n_prime() * self.profile.phi_n.ln_inverse(s.ln()) - s.ln()
    }

    pub fn eval(&self, s: f64) -> f64 {
        (self.c1.ln() + self.ln_shape(s)).exp()
    }

    /// 2(K/κ₂)^{n'}, the constant the proof produces.
    pub fn proof_constant(&self, kappa2: f64) -> f64 {
        2.0 * (self.k / kappa2).powf(self.profile.n_prime())
    }

    pub fn check(&self, s: &[f64], mu: &[f64]) -> BoundCheck {
        check_against(s, mu, |x| Some(self.eval(x)))
    }

    /// Smallest c₁ making the bound hold on the probes.
    pub fn calibrate_c1(&self, s: &[f64], mu: &[f64]) -> f64 {
        s.iter()
            .zip(mu)
            .filter(|(_, m)| **m > 0.0)
            .map(|(x, m)| (m.ln() - self.ln_shape(*x)).exp())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Quasinorm {
    Finite { value: f64 },
    Infinite { last_ratio: f64 },
}

/// inf{λ : sup_s u*(s)/ϱ⁻¹(λ/s) ≤ 1}. On a step, the constraint is tightest at its right
/// end, where it reads λ ≥ s_j ϱ(v_j); the quasinorm is the largest of these. A profile
/// resolved only down to some s is reported infinite when that largest value grows more
/// than tenfold across its last two decades.
pub fn marcinkiewicz_quasinorm<R: Monotone + ?Sized>(u: &RearrangedFunction, varrho: &R) -> Quasinorm {
    let b = u.breaks();
    let need: Vec<(f64, f64)> =
        u.values().iter().enumerate().map(|(j, v)| (b[j + 1], b[j + 1] * varrho.eval(*v))).collect();
    let sup = need.iter().map(|x| x.1).fold(0.0, f64::max);
    let floor = u.resolved_to();
    if floor > 0.0 {
        let max_above = |s: f64| need.iter().filter(|x| x.0 >= s).map(|x| x.1).fold(0.0, f64::max);
        let m2 = max_above(floor * 100.0);
        if m2 > 0.0 && sup > 10.0 * m2 {
            return Quasinorm::Infinite { last_ratio: sup / m2 };
        }
    }
    if sup.is_finite() {
        Quasinorm::Finite { value: sup }
    } else {
        Quasinorm::Infinite { last_ratio: f64::INFINITY }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::young::{psi_of, ScalarYoungFunction};
    use std::f64::consts::PI;

    fn psi_power(p: f64) -> crate::young::Psi {
        psi_of(&ScalarYoungFunction::power_scaled(p, 1.0).unwrap()).unwrap()
    }

    #[test]
    fn poisson_disk() {
        let f = RearrangedFunction::constant(1.0, PI).unwrap();
        let sol = solve_radial(&psi_power(2.0), &f, 2).unwrap();
        for (r, v) in sol.r.iter().zip(&sol.v) {
            assert!((v - (1.0 - r * r) / 4.0).abs() < 1e-12);
        }
        assert_eq!(*sol.v.last().unwrap(), 0.0);
        let b = linf_bound(&f, &psi_power(2.0), 2).unwrap();
        assert!((b.value - sol.sup()).abs() < 1e-10);
    }

    #[test]
    fn radial_p_laplace_gradient() {
        let p = 3.0;
        let f = RearrangedFunction::constant(1.0, PI).unwrap();
        let sol = solve_radial_with(&psi_power(p), &f, 2, 512).unwrap();
        for (r, g) in sol.r.iter().zip(&sol.g) {
            assert!((g - (r / 2.0).powf(1.0 / (p - 1.0))).abs() < 1e-12);
        }
        let v0 = (p - 1.0) / p * 2f64.powf(-1.0 / (p - 1.0));
        assert!((sol.sup() - v0).abs() < 1e-10, "{}", sol.sup());
    }

    #[test]
    fn zero_datum() {
        let f = RearrangedFunction::constant(0.0, 2.0).unwrap();
        let sol = solve_radial_with(&psi_power(2.0), &f, 3, 64).unwrap();
        assert!(sol.v.iter().chain(&sol.g).all(|x| *x == 0.0));
    }

    #[test]
    fn marcinkiewicz_power_profiles() {
        let q = 3.0;
        let rho = ScalarYoungFunction::power_scaled(q, 1.0).unwrap();
        let ok = RearrangedFunction::power_law(1.0, 1.0 / q, 1.0).unwrap();
        match marcinkiewicz_quasinorm(&ok, &rho) {
            // the head step holds the mean 1.5·s₁^{−1/3}
            Quasinorm::Finite { value } => assert!((1.0..=1.5f64.powi(3) + 1e-9).contains(&value), "{value}"),
            q => panic!("{q:?}"),
        }
        let bad = RearrangedFunction::power_law(1.0, 2.0 / q, 1.0).unwrap();
        assert!(matches!(marcinkiewicz_quasinorm(&bad, &rho), Quasinorm::Infinite { .. }));
    }

    fn profile_p2_n3() -> EmbeddingProfile {
        let phi = ScalarYoungFunction::power_scaled(2.0, 1.0).unwrap();
        crate::sobolev::sobolev_conjugate(&phi, 3, &Default::default()).unwrap()
    }

    #[test]
    fn level_set_decay_exponents() {
        let prof = profile_p2_n3();
        let u = level_set_bound_u(1.0, 0.0, &prof, 1.0).unwrap();
        let (a, b) = (1e3f64, 1e6f64);
        let slope = (u.ln_eval(b) - u.ln_eval(a)) / (b / a).ln();
        assert!((slope + 3.0).abs() < 1e-6, "{slope}");
        let g = level_set_bound_grad(1.0, &prof, 2.5).unwrap();
        let slope = (g.eval(b).ln() - g.eval(a).ln()) / (b / a).ln();
        assert!((slope + 0.75).abs() < 1e-6, "{slope}");
        for s in [10.0, 1e4, 1e9] {
            let shape = prof.phi_n.ln_inverse(f64::ln(s)).exp().powf(1.5) / s;
            assert!((g.eval(s) / shape - 2.5).abs() < 1e-9);
        }
        let probes = [1e2, 1e3, 1e4];
        let mu: Vec<f64> = probes.iter().map(|t| 3.0 * g.eval(*t) / 2.5).collect();
        assert!((g.calibrate_c1(&probes, &mu) - 3.0).abs() < 1e-9);
    }

    #[test]
    fn level_set_refuses_convergent() {
        let phi = ScalarYoungFunction::power_scaled(4.0, 1.0).unwrap();
        let mut prof = profile_p2_n3();
        prof.dichotomy = crate::sobolev::classify_integral(&phi, 3).unwrap();
        assert!(matches!(level_set_bound_u(1.0, 0.0, &prof, 1.0), Err(Error::Refused(_))));
    }

    #[test]
    fn kappa_calibration_is_sharp() {
        let prof = profile_p2_n3();
        let u = level_set_bound_u(1.0, 0.0, &prof, 1.0).unwrap();
        let t = [10.0, 100.0, 1000.0];
        let mu: Vec<f64> = t.iter().map(|x| u.eval(*x).unwrap() * 7.0).collect();
        let k = u.calibrate_kappa2(&t, &mu).unwrap();
        // μ = 7·bound₁ and bound_κ = κ^{−6}·bound₁
        assert!((k - 7f64.powf(-1.0 / 6.0)).abs() < 1e-6, "{k}");
    }

    #[test]
    fn sup_bound_of_inverse_square_root() {
        let f = RearrangedFunction::power_law(1.0, 0.5, 1.0).unwrap();
        let b = linf_bound(&f, &psi_power(2.0), 2).unwrap();
        // (2√π)⁻² ∫₀¹ 2 s^{−1/2} ds = 1/π
        assert!((b.value - 1.0 / PI).abs() < 1e-5, "{}", b.value);
        let sol = solve_radial_with(&psi_power(2.0), &f, 2, 512).unwrap();
        assert!((sol.sup() - b.value).abs() < 1e-9 * b.value);
    }

    #[test]
    fn radial_profile_is_consistent() {
        let f = RearrangedFunction::constant(2.0, 1.0).unwrap();
        let sol = solve_radial_with(&psi_power(1.5), &f, 3, 1024).unwrap();
        assert!(sol.v.windows(2).all(|w| w[1] <= w[0]));
        assert!(sol.g.windows(2).all(|w| w[1] >= w[0]));
        assert_eq!(sol.g[0], 0.0);
        let mut worst = 0.0f64;
        for j in 1..sol.r.len() - 1 {
            let d = (sol.v[j + 1] - sol.v[j - 1]) / (sol.r[j + 1] - sol.r[j - 1]);
            worst = worst.max((d + sol.g[j]).abs());
        }
        assert!(worst < 1e-2, "{worst}");
    }

    #[test]
    fn radial_gradient_integral_under_bound() {
        let f = RearrangedFunction::constant(1.0, PI).unwrap();
        let sol = solve_radial(&psi_power(2.0), &f, 2).unwrap();
        let theta = crate::young::theta_diamond(&ScalarYoungFunction::power_scaled(2.0, 1.0).unwrap()).unwrap();
        let rep = gradient_l1_bound_radial(&sol, &theta, PI);
        // Θ⋄(t) = 2t and |∇v| = r/2, so ∫Θ⋄ = 2π/3
        assert!((rep.measured - 2.0 * PI / 3.0).abs() < 1e-5, "{rep:?}");
        assert!((rep.bound - 2.0 * PI).abs() < 1e-12 && rep.pass);
    }
}
