//! Sobolev conjugate Φₙ = Φ∘∘H⁻¹, the integrability dichotomy at infinity, the
//! near-zero modification, the optimal target Φ̂∘, and the Marcinkiewicz functions
//! ϑₙ(t) = Φₙ(t^{1/n'})/t and ϱₙ(t) = t/Φₙ⁻¹(t)^{n'}.
//!
//! Every quantity lives on a grid in x = ln t and is carried as a logarithm, so
//! profiles reach far beyond the f64 range of t.

use crate::anisotropic::AnisotropicYoungFunction;
use crate::curve::LogLogCurve;
use crate::error::{Error, Result};
use crate::fit::{fit_power_log, isotonic_increasing, PowerLogFit};
use crate::numeric::{log_add_exp, LN_10};
use crate::quad::gl8;
use crate::young::{Monotone, ScalarYoungFunction};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Dichotomy {
    /// ∫^∞ (t/Φ∘)^{1/(n−1)} = ∞
    Divergent,
    /// ∫^∞ (t/Φ∘)^{1/(n−1)} < ∞
    Convergent,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassifyReport {
    pub verdict: Dichotomy,
    pub fit: PowerLogFit,
    /// (1 − p̂)/(n − 1)
    pub integrand_exponent: f64,
    /// log exponent of the integrand in the borderline case p̂ ≈ n
    pub borderline_log_exponent: Option<f64>,
    pub sigma_min: f64,
    pub sigma_max: f64,
}

const EXPONENT_MARGIN: f64 = 0.02;

/// Largest trusted ln t of a scalar function.
pub fn trusted_ln_hi(phi: &ScalarYoungFunction) -> f64 {
    if let Some(c) = phi.curve() {
        c.x_range().1
    } else if phi.extends_beyond_f64() {
        phi.probe_range().1.ln()
    } else {
        phi.domain().1.ln()
    }
}

/// Smallest trusted ln t of a scalar function.
pub fn trusted_ln_lo(phi: &ScalarYoungFunction) -> f64 {
    if let Some(c) = phi.curve() {
        c.x_range().0
    } else {
        -30.0 * LN_10
    }
}

/// Decides ∫^∞ (t/Φ∘(t))^{1/(n−1)} dt from the exponents fitted on the top two
/// trusted decades.
pub fn classify_integral(phi_circ: &ScalarYoungFunction, n: usize) -> Result<ClassifyReport> {
    classify_window(phi_circ, n, trusted_ln_hi(phi_circ))
}

fn classify_window(phi: &ScalarYoungFunction, n: usize, x_hi: f64) -> Result<ClassifyReport> {
    if n < 2 {
        return Err(Error::invalid("dimension must be at least 2"));
    }
    let x_lo = x_hi - 2.0 * LN_10;
    if x_lo <= 1.0 || x_lo < trusted_ln_lo(phi) {
        return Err(Error::Inconclusive(format!(
            "{} is trusted only up to t = e^{x_hi:.3}; two decades above e are needed",
            phi.id()
        )));
    }
    let m = 64;
    let xs: Vec<f64> = (0..m).map(|i| x_lo + (x_hi - x_lo) * i as f64 / (m - 1) as f64).collect();
    let ys: Vec<f64> = xs.iter().map(|x| phi.ln_value_at_ln(*x)).collect();
    let sig: Vec<f64> = xs.iter().map(|x| phi.log_slope_at_ln(*x)).collect();
    if ys.iter().chain(&sig).any(|v| !v.is_finite()) {
        return Err(Error::Inconclusive(format!(
            "{} is not finite on the fit window",
            phi.id()
        )));
    }
    let smin = sig.iter().copied().fold(f64::INFINITY, f64::min);
    let smax = sig.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let up = sig.windows(2).all(|w| w[1] >= w[0] - 1e-12);
    let down = sig.windows(2).all(|w| w[1] <= w[0] + 1e-12);
    if smax - smin > 0.1 && !(up || down) {
        return Err(Error::Inconclusive(format!(
            "local exponent of {} oscillates in [{smin:.4}, {smax:.4}]",
            phi.id()
        )));
    }
    let fit = fit_power_log(&xs, &ys, 0.0)?;
    let e = (1.0 - fit.power) / (n as f64 - 1.0);
    let (verdict, border) = if e > -1.0 + EXPONENT_MARGIN {
        (Dichotomy::Divergent, None)
    } else if e < -1.0 - EXPONENT_MARGIN {
        (Dichotomy::Convergent, None)
    } else {
        // integrand ≈ t^{-1} (log t)^{-γ}; the log exponent is refitted over two
        // decades of ln t when the trusted range allows it
        let wide_lo = x_hi / 100.0;
        let log_exp = if wide_lo > 1.0 && wide_lo >= trusted_ln_lo(phi) {
            let m = 128;
            let wx: Vec<f64> = (0..m).map(|i| wide_lo * 100f64.powf(i as f64 / (m - 1) as f64)).collect();
            let wy: Vec<f64> = wx.iter().map(|x| phi.ln_value_at_ln(*x)).collect();
            fit_power_log(&wx, &wy, 0.0)?.log
        } else {
            fit.log
        };
        let gamma = log_exp / (n as f64 - 1.0);
        if gamma <= 1.0 + 0.05 {
            (Dichotomy::Divergent, Some(gamma))
        } else if gamma > 1.1 {
            (Dichotomy::Convergent, Some(gamma))
        } else {
            return Err(Error::Inconclusive(format!(
                "borderline growth: power {:.4}, log exponent ratio {gamma:.4}",
                fit.power
            )));
        }
    };
    Ok(ClassifyReport {
        verdict,
        fit,
        integrand_exponent: e,
        borderline_log_exponent: border,
        sigma_min: smin,
        sigma_max: smax,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModificationRecord {
    pub applied: bool,
    /// linearization point Φ∘⁻¹(1)
    pub t1: f64,
    /// local exponent at the bottom of the trusted range before modification
    pub sigma0: f64,
}

/// Whether ∫₀ (t/Φ∘)^{1/(n−1)} dt < ∞, judged from the bottom local exponent.
pub fn conv0_holds(phi_circ: &ScalarYoungFunction, n: usize) -> (bool, f64) {
    let s0 = phi_circ.log_slope_at_ln(trusted_ln_lo(phi_circ));
    (s0 < n as f64 - EXPONENT_MARGIN, s0)
}

/// Scalar modification: linear on [0, t₁] with t₁ = Φ∘⁻¹(1), unchanged above.
pub fn modify_near_zero(
    phi_circ: &ScalarYoungFunction,
    n: usize,
) -> Result<(ScalarYoungFunction, ModificationRecord)> {
    let (ok, s0) = conv0_holds(phi_circ, n);
    if ok {
        return Ok((phi_circ.clone(), ModificationRecord { applied: false, t1: 0.0, sigma0: s0 }));
    }
    let t1 = phi_circ.inverse(1.0)?;
    let m = phi_circ.linearized_below(t1)?;
    Ok((m, ModificationRecord { applied: true, t1, sigma0: s0 }))
}

/// Anisotropic modification Φ̄ (Φ on {Φ > 1}, 1-homogeneous below), applied only when
/// the given Φ∘ violates the integrability condition at 0.
pub fn modify_near_zero_aniso(
    phi: &AnisotropicYoungFunction,
    phi_circ: &ScalarYoungFunction,
) -> (AnisotropicYoungFunction, bool) {
    let (ok, _) = conv0_holds(phi_circ, phi.n());
    if ok {
        (phi.clone(), false)
    } else {
        (phi.modified_near_zero(), true)
    }
}

/// Monotone function stored as a Hermite curve in (ln t, ln value).
#[derive(Debug, Clone, PartialEq)]
pub struct LogCurveFn {
    pub curve: LogLogCurve,
}

impl LogCurveFn {
    pub fn ln_eval(&self, x: f64) -> f64 {
        self.curve.eval(x)
    }
    pub fn ln_inverse(&self, y: f64) -> f64 {
        self.curve.inverse(y)
    }
    pub fn ln_range(&self) -> (f64, f64) {
        self.curve.x_range()
    }
}

impl Monotone for LogCurveFn {
    fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            0.0
        } else {
            self.curve.eval(t.ln()).exp()
        }
    }
    fn inverse(&self, y: f64) -> Result<f64> {
        if y <= 0.0 {
            return Ok(0.0);
        }
        Ok(self.curve.inverse(y.ln()).exp())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SobolevOptions {
    pub ln_t_lo: Option<f64>,
    pub ln_t_hi: Option<f64>,
    /// grid nodes per decade of t
    pub per_decade: usize,
    /// above this ln t the grid spacing grows in proportion to ln t
    pub stretch_above: Option<f64>,
}

impl Default for SobolevOptions {
    fn default() -> Self {
        Self { ln_t_lo: None, ln_t_hi: None, per_decade: 32, stretch_above: None }
    }
}

#[derive(Debug, Clone)]
pub struct EmbeddingProfile {
    pub n: usize,
    /// Φ∘ after the near-zero modification
    pub phi_circ: ScalarYoungFunction,
    pub dichotomy: ClassifyReport,
    pub modification: ModificationRecord,
    /// (ln t, ln H(t))
    pub h: LogCurveFn,
    /// (ln s, ln Φₙ(s))
    pub phi_n: LogCurveFn,
    pub vartheta: LogCurveFn,
    pub varrho: LogCurveFn,
    pub hat_phi_circ: std::result::Result<ScalarYoungFunction, Error>,
}

impl EmbeddingProfile {
    pub fn n_prime(&self) -> f64 {
        self.n as f64 / (self.n as f64 - 1.0)
    }

    /// ϱ_A(t) = ϱₙ(A(t)), the Marcinkiewicz function of a component controlled by A.
    pub fn varrho_composed(&self, a: &ScalarYoungFunction) -> Result<LogCurveFn> {
        let (ylo, yhi) = self.varrho.ln_range();
        let x_lo = a.ln_inverse_from_ln(ylo)?.max(-700.0);
        let x_hi = if a.extends_beyond_f64() {
            let (lo, hi) = (x_lo, 1e6_f64);
            crate::numeric::bisect_predicate(|x| a.ln_value_at_ln(x) > yhi, lo, hi, 1e-9).0
        } else {
            a.ln_inverse_from_ln(yhi.min(a.ln_value_at_ln(trusted_ln_hi(a))))?
        };
        let m = 2048;
        let xs: Vec<f64> = (0..m).map(|i| x_lo + (x_hi - x_lo) * i as f64 / (m - 1) as f64).collect();
        let mut ys = Vec::with_capacity(m);
        let mut ds = Vec::with_capacity(m);
        for x in &xs {
            let la = a.ln_value_at_ln(*x);
            ys.push(self.varrho.curve.eval(la));
            ds.push(self.varrho.curve.slope(la) * a.log_slope_at_ln(*x));
        }
        Ok(LogCurveFn { curve: LogLogCurve::new(xs, ys, Some(ds))? })
    }

    /// Rows (ln t, ln H, ln Φₙ, ln Φ̂∘, ln ϑₙ, ln ϱₙ) on `m` points of the ϑ abscissa range;
    /// entries outside a curve's range are NaN.
    pub fn table(&self, m: usize) -> Vec<[f64; 6]> {
        let (a, b) = self.h.ln_range();
        let inside = |c: &LogCurveFn, x: f64| {
            let (lo, hi) = c.ln_range();
            if x >= lo - 1e-12 && x <= hi + 1e-12 {
                c.ln_eval(x)
            } else {
                f64::NAN
            }
        };
        (0..m)
            .map(|i| {
                let x = a + (b - a) * i as f64 / (m.max(2) - 1) as f64;
                let hat = match &self.hat_phi_circ {
                    Ok(h) => {
                        let c = h.curve().expect("sampled");
                        let (lo, hi) = c.x_range();
                        if x >= lo && x <= hi {
                            c.eval(x)
                        } else {
                            f64::NAN
                        }
                    }
                    Err(_) => f64::NAN,
                };
                [
                    x,
                    self.h.ln_eval(x),
                    inside(&self.phi_n, x),
                    hat,
                    inside(&self.vartheta, x),
                    inside(&self.varrho, x),
                ]
            })
            .collect()
    }
}

/// ln ∫_a^b e^{ln_k(u)} du by 8-point Gauss–Legendre with log-sum-exp.
fn ln_gl8_segment<F: Fn(f64) -> f64>(ln_k: &F, a: f64, b: f64) -> f64 {
    let (nodes, weights) = gl8();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut terms = [0.0; 8];
    for (t, (z, w)) in terms.iter_mut().zip(nodes.iter().zip(weights)) {
        *t = ln_k(mid + half * z) + (w * half).ln();
    }
    let mx = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if mx == f64::NEG_INFINITY {
        return mx;
    }
    mx + terms.iter().map(|v| (v - mx).exp()).sum::<f64>().ln()
}

/// Grid in x = ln t with an optional forced node; uniform up to `stretch`, then
/// geometric in x.
fn grid(x_lo: f64, x_hi: f64, per_decade: usize, stretch: Option<f64>, forced: Option<f64>) -> Vec<f64> {
    let x_mid = match stretch {
        Some(s) if s > 0.0 && s > x_lo && s < x_hi => s,
        _ => x_hi,
    };
    let m = (((x_mid - x_lo) / LN_10) * per_decade as f64).ceil() as usize + 1;
    let m = m.max(8);
    let mut xs: Vec<f64> = (0..m).map(|i| x_lo + (x_mid - x_lo) * i as f64 / (m - 1) as f64).collect();
    if x_mid < x_hi {
        let ratio = 1.0 + LN_10 / per_decade as f64 / x_mid;
        let k = ((x_hi / x_mid).ln() / ratio.ln()).ceil().max(1.0) as usize;
        let r = (x_hi / x_mid).powf(1.0 / k as f64);
        xs.extend((1..=k).map(|i| if i == k { x_hi } else { x_mid * r.powi(i as i32) }));
    }
    if let Some(f) = forced {
        if f > x_lo && f < x_hi {
            let k = xs.partition_point(|v| *v < f);
            if (xs[k] - f).abs() > 1e-9 && (xs[k - 1] - f).abs() > 1e-9 {
                xs.insert(k, f);
            } else if (xs[k] - f).abs() <= 1e-9 {
                xs[k] = f;
            } else {
                xs[k - 1] = f;
            }
        }
    }
    xs
}

/// Cumulative ln ∫₀^{e^{x_i}} e^{ln_k(u)} du over the grid (integration in u = ln τ, the
/// integrand `ln_k` already includes the Jacobian). `head_exponent` is the power e of
/// the integrand in τ below the first node, so the head is τ₀·k(τ₀)/(e + 1).
fn cumulative_ln_integral<F: Fn(f64) -> f64>(xs: &[f64], ln_k: F, head_exponent: f64) -> Result<Vec<f64>> {
    if !(head_exponent > -1.0) {
        return Err(Error::Divergent(format!(
            "integrand behaves like τ^{head_exponent:.4} at 0"
        )));
    }
    let mut out = Vec::with_capacity(xs.len());
    let mut acc = ln_k(xs[0]) - (head_exponent + 1.0).ln();
    out.push(acc);
    for w in xs.windows(2) {
        let (a, b) = (w[0], w[1]);
        let seg = ln_gl8_segment(&ln_k, a, b);
        acc = log_add_exp(acc, seg);
        out.push(acc);
    }
    Ok(out)
}

/// Profile (H, Φₙ, ϑₙ, ϱₙ, Φ̂∘) of a Φ∘ whose integral at infinity diverges.
pub fn sobolev_conjugate(
    phi_circ: &ScalarYoungFunction,
    n: usize,
    opts: &SobolevOptions,
) -> Result<EmbeddingProfile> {
    let x_top = opts.ln_t_hi.unwrap_or_else(|| trusted_ln_hi(phi_circ));
    let dichotomy = classify_window(phi_circ, n, trusted_ln_hi(phi_circ).min(x_top))?;
    if dichotomy.verdict == Dichotomy::Convergent {
        return Err(Error::Refused(
            "the integral at infinity converges: Φₙ is infinite for large arguments and \
             solutions are bounded"
                .into(),
        ));
    }
    let (phi, modification) = modify_near_zero(phi_circ, n)?;
    let nf = n as f64;
    let x_lo = opts.ln_t_lo.unwrap_or_else(|| trusted_ln_lo(&phi));
    let forced = modification.applied.then(|| modification.t1.ln());
    let xs = grid(x_lo, x_top, opts.per_decade, opts.stretch_above, forced);

    // G(t) = ∫₀^t (τ/Φ∘)^{1/(n−1)} dτ, H = G^{(n−1)/n}
    let ln_g_integrand = |u: f64| u + (u - phi.ln_value_at_ln(u)) / (nf - 1.0);
    let s0 = phi.log_slope_at_ln(xs[0]);
    let ln_g = cumulative_ln_integral(&xs, ln_g_integrand, (1.0 - s0) / (nf - 1.0))?;
    let ln_phi: Vec<f64> = xs.iter().map(|x| phi.ln_value_at_ln(*x)).collect();
    let sig: Vec<f64> = xs.iter().map(|x| phi.log_slope_at_ln(*x)).collect();
    if ln_phi.iter().chain(&sig).chain(&ln_g).any(|v| !v.is_finite()) {
        return Err(Error::invalid(format!(
            "{} is not finite on [e^{x_lo:.3}, e^{x_top:.3}]",
            phi.id()
        )));
    }
    let ln_h: Vec<f64> = ln_g.iter().map(|g| g * (nf - 1.0) / nf).collect();
    // d ln H / d ln t
    let dh: Vec<f64> = xs
        .iter()
        .zip(&ln_g)
        .map(|(x, g)| (nf - 1.0) / nf * (ln_g_integrand(*x) - g).exp())
        .collect();
    let h = LogCurveFn { curve: LogLogCurve::new(xs.clone(), ln_h.clone(), Some(dh.clone()))? };

    // Φₙ on (ln H, ln Φ∘)
    let sn: Vec<f64> = sig.iter().zip(&dh).map(|(s, d)| s / d).collect();
    let phi_n = LogCurveFn { curve: LogLogCurve::new(ln_h.clone(), ln_phi.clone(), Some(sn.clone()))? };

    let np = nf / (nf - 1.0);
    let val: Vec<f64> = ln_phi.iter().zip(&ln_h).map(|(p, h)| p - np * h).collect();
    let vt_x: Vec<f64> = ln_h.iter().map(|h| np * h).collect();
    let vt_d: Vec<f64> = sn.iter().map(|s| (s - np) / np).collect();
    let vartheta = LogCurveFn { curve: LogLogCurve::new(vt_x, val.clone(), Some(vt_d))? };
    let vr_d: Vec<f64> = sn.iter().map(|s| 1.0 - np / s).collect();
    let varrho = LogCurveFn { curve: LogLogCurve::new(ln_phi.clone(), val, Some(vr_d))? };

    let hat = hat_on_grid(&phi, n, &xs);
    Ok(EmbeddingProfile {
        n,
        phi_circ: phi,
        dichotomy,
        modification,
        h,
        phi_n,
        vartheta,
        varrho,
        hat_phi_circ: hat,
    })
}

/// Φ̂∘ from the nested integrals defining (φ̂∘)⁻¹, after the near-zero modification.
pub fn hat_phi_circ(
    phi_circ: &ScalarYoungFunction,
    n: usize,
    opts: &SobolevOptions,
) -> Result<ScalarYoungFunction> {
    let report = classify_integral(phi_circ, n)?;
    if report.verdict == Dichotomy::Convergent {
        return Err(Error::Refused("the integral at infinity converges".into()));
    }
    let (phi, rec) = modify_near_zero(phi_circ, n)?;
    let x_lo = opts.ln_t_lo.unwrap_or_else(|| trusted_ln_lo(&phi));
    let x_hi = opts.ln_t_hi.unwrap_or_else(|| trusted_ln_hi(&phi));
    let xs = grid(x_lo, x_hi, opts.per_decade, opts.stretch_above, rec.applied.then(|| rec.t1.ln()));
    hat_on_grid(&phi, n, &xs)
}

fn hat_on_grid(phi: &ScalarYoungFunction, n: usize, xs: &[f64]) -> Result<ScalarYoungFunction> {
    let nf = n as f64;
    let np = nf / (nf - 1.0);
    // ln φ∘ = ln Φ∘ + ln σ − x, made nondecreasing for sampled inputs
    let raw: Vec<f64> = xs
        .iter()
        .map(|x| phi.ln_value_at_ln(*x) + phi.log_slope_at_ln(*x).ln() - x)
        .collect();
    let nodes_lnphi = if phi.is_sampled() {
        isotonic_increasing(&raw, &vec![1.0; raw.len()])
    } else {
        raw
    };
    let sampled = phi.is_sampled();
    let ln_phi = |u: f64| -> f64 {
        if !sampled {
            return phi.ln_value_at_ln(u) + phi.log_slope_at_ln(u).ln() - u;
        }
        let k = xs.partition_point(|v| *v <= u).clamp(1, xs.len() - 1);
        let t = (u - xs[k - 1]) / (xs[k] - xs[k - 1]);
        nodes_lnphi[k - 1] + t * (nodes_lnphi[k] - nodes_lnphi[k - 1])
    };
    let dlnphi = |i: usize| -> f64 {
        let j = if i + 1 < xs.len() { i + 1 } else { i };
        let k = if j == i { i - 1 } else { i };
        (nodes_lnphi[j] - nodes_lnphi[k]) / (xs[j] - xs[k])
    };
    // I(r) = ∫₀^r φ^{−1/(n−1)}
    let s0 = phi.log_slope_at_ln(xs[0]);
    let ln_i_k = |u: f64| u - ln_phi(u) / (nf - 1.0);
    let ln_i = cumulative_ln_integral(xs, ln_i_k, -(s0 - 1.0) / (nf - 1.0))?;
    let di: Vec<f64> = xs.iter().zip(&ln_i).map(|(x, li)| (ln_i_k(*x) - li).exp()).collect();
    let i_curve = LogLogCurve::new(xs.to_vec(), ln_i.clone(), Some(di))?;
    // J(ρ) = ∫_ρ^∞ I^{−n} φ^{−n'} dr, accumulated from the top with a power-law tail
    let ln_j_k = |u: f64| u - nf * i_curve.eval(u) - np * ln_phi(u);
    let last = xs.len() - 1;
    let kappa = 1.0 - nf * i_curve.slope(xs[last]) - np * dlnphi(last);
    if !(kappa < -1e-6) {
        return Err(Error::Divergent(format!(
            "outer integral does not converge: tail log-slope {kappa:.4}"
        )));
    }
    let mut ln_j = vec![0.0; xs.len()];
    ln_j[last] = ln_j_k(xs[last]) - (-kappa).ln();
    for i in (0..last).rev() {
        let (a, b) = (xs[i], xs[i + 1]);
        let seg = ln_gl8_segment(&ln_j_k, a, b);
        ln_j[i] = log_add_exp(ln_j[i + 1], seg);
    }
    let dj: Vec<f64> = xs.iter().zip(&ln_j).map(|(x, lj)| -(ln_j_k(*x) - lj).exp()).collect();
    let j_curve = LogLogCurve::new(xs.to_vec(), ln_j.clone(), Some(dj))?;
    // s(ρ) = J^{−1/(n−1)}, φ̂∘(s(ρ)) = φ∘(ρ); Φ̂∘ = ∫ φ∘(ρ) ds(ρ)
    let ln_s = |u: f64| -j_curve.eval(u) / (nf - 1.0);
    let ln_dhat = |u: f64| {
        // ln[φ · s · k/((n−1) J)]
        ln_phi(u) + ln_s(u) + ln_j_k(u) - j_curve.eval(u) - (nf - 1.0).ln()
    };
    let dlns0 = (ln_j_k(xs[0]) - ln_j[0]).exp() / (nf - 1.0);
    let e_hat = dlnphi(0) / dlns0;
    let mut ln_big = Vec::with_capacity(xs.len());
    let mut acc = ln_s(xs[0]) + ln_phi(xs[0]) - (1.0 + e_hat).ln();
    ln_big.push(acc);
    for w in xs.windows(2) {
        let (a, b) = (w[0], w[1]);
        let seg = ln_gl8_segment(&ln_dhat, a, b);
        acc = log_add_exp(acc, seg);
        ln_big.push(acc);
    }
    let mut sx = Vec::with_capacity(xs.len());
    let mut sy = Vec::with_capacity(xs.len());
    let mut sd = Vec::with_capacity(xs.len());
    for (i, x) in xs.iter().enumerate() {
        let ls = ln_s(*x);
        if let Some(prev) = sx.last() {
            if ls <= *prev {
                continue;
            }
        }
        sx.push(ls);
        sy.push(ln_big[i]);
        sd.push((ls + ln_phi(*x) - ln_big[i]).exp());
    }
    let curve = LogLogCurve::new(sx, sy, Some(sd))?;
    Ok(ScalarYoungFunction::from_curve(curve, format!("hat({})", phi.id())))
}
