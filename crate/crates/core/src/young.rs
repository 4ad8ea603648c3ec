//! One-variable Young functions: evaluation, inverses, conjugation, growth checks,
//! and the auxiliary monotone functions Ψ and Θ⋄.
//!
//! Every form is evaluated in the log domain (`ln A(t)`), so exponential growth and
//! values far outside the f64 range stay representable.

use crate::curve::LogLogCurve;
use crate::error::{Error, Result};
use crate::numeric::{brent, ln_1m_exp, ln_c_plus, ln_expm1, LN_10};
use serde::Serialize;
use std::collections::BTreeMap;

/// Default node density of sampled forms, per decade of t.
pub const DEFAULT_PER_DECADE: usize = 2048;
/// Upper bound on the node count of any sampled form.
pub const MAX_NODES: usize = 1 << 18;

/// Representation tag.
#[derive(Debug, Clone, PartialEq)]
pub enum Form {
    /// c·t^p
    Power { p: f64, c: f64 },
    /// t^p·log^α(shift + t), shift ≥ 1
    PowerLog { p: f64, alpha: f64, shift: f64 },
    /// e^t − t − 1
    ExpMinusLinear,
    /// (1 + t)log(1 + t) − t
    Entropy,
    /// exp(t^β) − 1
    ExpPower { beta: f64 },
    /// Pointwise Legendre transform of an analytic form.
    Legendre(Box<ScalarYoungFunction>),
    /// μ·A(λt)
    Scaled {
        inner: Box<ScalarYoungFunction>,
        lambda: f64,
        mu: f64,
    },
    /// Linear on [0, t1] through (t1, A(t1)), equal to A above t1.
    Linearized {
        inner: Box<ScalarYoungFunction>,
        t1: f64,
    },
    /// Cubic Hermite in (ln t, ln A).
    Sampled(LogLogCurve),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarYoungFunction {
    form: Form,
    domain: (f64, f64),
    convexity_certified: bool,
    n_function: bool,
    id: String,
}

/// Monotone nondecreasing scalar map with a left-continuous inverse.
pub trait Monotone: Send + Sync {
    fn eval(&self, t: f64) -> f64;
    fn inverse(&self, y: f64) -> Result<f64>;
}

impl ScalarYoungFunction {
    fn build(form: Form, domain: (f64, f64), id: String) -> Self {
        let mut f = Self {
            form,
            domain,
            convexity_certified: false,
            n_function: false,
            id,
        };
        f.convexity_certified = f.certify_convexity();
        f.n_function = f.check_n_function();
        f
    }

    pub fn power(p: f64) -> Result<Self> {
        Self::power_scaled(p, 1.0 / p)
    }

    /// c·t^p
    pub fn power_scaled(p: f64, c: f64) -> Result<Self> {
        if !(p >= 1.0) || !(c > 0.0) || !p.is_finite() || !c.is_finite() {
            return Err(Error::invalid(format!("power needs p ≥ 1 and c > 0 (p={p}, c={c})")));
        }
        Ok(Self::build(
            Form::Power { p, c },
            (1e-6, 1e6),
            format!("power:p={p},c={c}"),
        ))
    }

    pub fn power_log(p: f64, alpha: f64, shift: f64) -> Result<Self> {
        if !(p >= 1.0) || !(shift >= 1.0) || !alpha.is_finite() {
            return Err(Error::invalid(format!(
                "power_log needs p ≥ 1 and shift ≥ 1 (p={p}, alpha={alpha}, shift={shift})"
            )));
        }
        let f = Self::build(
            Form::PowerLog { p, alpha, shift },
            (1e-6, 1e6),
            format!("power_log:p={p},alpha={alpha},c={shift}"),
        );
        Ok(f)
    }

    pub fn exp_minus_linear() -> Self {
        Self::build(Form::ExpMinusLinear, (1e-6, 50.0), "exp_minus_linear".into())
    }

    pub fn entropy() -> Self {
        Self::build(Form::Entropy, (1e-6, 1e6), "entropy".into())
    }

    pub fn exp_power(beta: f64) -> Result<Self> {
        if !(beta >= 1.0) || !beta.is_finite() {
            return Err(Error::invalid(format!("exp_power needs beta ≥ 1 (beta={beta})")));
        }
        Ok(Self::build(
            Form::ExpPower { beta },
            (1e-6, 50.0),
            format!("exp_power:beta={beta}"),
        ))
    }

    /// Catalog lookup by id string, e.g. "power:p=3", "power_log:p=2,alpha=1",
    /// "exp_minus_linear", "exp_power:beta=1.5".
    pub fn from_id(spec: &str) -> Result<Self> {
        let (name, params) = parse_id(spec)?;
        let get = |k: &str| params.get(k).copied();
        let need = |k: &str| {
            get(k).ok_or_else(|| Error::invalid(format!("{name} needs parameter {k}")))
        };
        let allowed: &[&str] = match name.as_str() {
            "power" => &["p", "c"],
            "power_log" => &["p", "alpha", "c"],
            "exp_power" => &["beta"],
            "exp_minus_linear" | "entropy" => &[],
            _ => return Err(Error::invalid(format!("unknown Young function id '{name}'"))),
        };
        if let Some(k) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(Error::invalid(format!("{name} does not take parameter {k}")));
        }
        match name.as_str() {
            "power" => {
                let p = need("p")?;
                Self::power_scaled(p, get("c").unwrap_or(1.0 / p))
            }
            "power_log" => Self::power_log(need("p")?, need("alpha")?, get("c").unwrap_or(1.0)),
            "exp_power" => Self::exp_power(need("beta")?),
            "exp_minus_linear" => Ok(Self::exp_minus_linear()),
            _ => Ok(Self::entropy()),
        }
    }

    /// Sampled form from a curve in (ln t, ln A).
    pub fn from_curve(curve: LogLogCurve, id: impl Into<String>) -> Self {
        let (a, b) = curve.x_range();
        Self::build(Form::Sampled(curve), (a.exp(), b.exp()), id.into())
    }

    /// Sampled form from positive samples (t_i, A(t_i)); slopes by PCHIP.
    pub fn from_samples(t: &[f64], a: &[f64]) -> Result<Self> {
        if t.len() != a.len() || t.len() < 3 {
            return Err(Error::invalid("need at least three matching samples"));
        }
        if t.iter().chain(a).any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(Error::invalid("samples must be positive and finite"));
        }
        if a.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::invalid("samples must be nondecreasing"));
        }
        let x: Vec<f64> = t.iter().map(|v| v.ln()).collect();
        let y: Vec<f64> = a.iter().map(|v| v.ln()).collect();
        Ok(Self::from_curve(LogLogCurve::new(x, y, None)?, "sampled"))
    }

    /// Tabulate this function on a log grid over [t_min, t_max] with exact slopes.
    pub fn sampled(&self, t_min: f64, t_max: f64, per_decade: usize) -> Result<Self> {
        if !(t_min > 0.0 && t_max > t_min) {
            return Err(Error::invalid("sampling range must satisfy 0 < t_min < t_max"));
        }
        let (a, b) = (t_min.ln(), t_max.ln());
        let decades = (b - a) / LN_10;
        let m = ((decades * per_decade as f64).ceil() as usize + 1).clamp(3, MAX_NODES);
        let x: Vec<f64> = (0..m).map(|i| a + (b - a) * i as f64 / (m - 1) as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| self.ln_value(v.exp())).collect();
        let d: Vec<f64> = x.iter().map(|v| self.log_slope(v.exp())).collect();
        if y.iter().chain(&d).any(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "{} is not finite on [{t_min:e}, {t_max:e}]",
                self.id
            )));
        }
        Ok(Self::from_curve(
            LogLogCurve::new(x, y, Some(d))?,
            format!("sampled({})", self.id),
        ))
    }

    /// μ·A(λt)
    pub fn scaled(&self, lambda: f64, mu: f64) -> Result<Self> {
        if !(lambda > 0.0 && mu > 0.0) {
            return Err(Error::invalid("scaling factors must be positive"));
        }
        let domain = (self.domain.0 / lambda, self.domain.1 / lambda);
        Ok(Self::build(
            Form::Scaled {
                inner: Box::new(self.clone()),
                lambda,
                mu,
            },
            domain,
            format!("{}*{mu}@{lambda}", self.id),
        ))
    }

    /// Linear on [0, t1] and equal to A above t1.
    pub fn linearized_below(&self, t1: f64) -> Result<Self> {
        if !(t1 > 0.0) {
            return Err(Error::invalid("linearization point must be positive"));
        }
        Ok(Self::build(
            Form::Linearized {
                inner: Box::new(self.clone()),
                t1,
            },
            self.domain,
            format!("linearized({})", self.id),
        ))
    }

    pub fn form(&self) -> &Form {
        &self.form
    }
    pub fn id(&self) -> &str {
        &self.id
    }
    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }
    pub fn with_domain(mut self, lo: f64, hi: f64) -> Self {
        if let Form::Sampled(_) = self.form {
            return self;
        }
        self.domain = (lo, hi);
        self.n_function = self.check_n_function();
        self
    }
    pub fn convexity_certified(&self) -> bool {
        self.convexity_certified
    }
    pub fn is_n_function(&self) -> bool {
        self.n_function
    }
    pub fn is_sampled(&self) -> bool {
        matches!(self.form, Form::Sampled(_))
    }
    pub fn curve(&self) -> Option<&LogLogCurve> {
        match &self.form {
            Form::Sampled(c) => Some(c),
            _ => None,
        }
    }

    /// Range on which extrapolation-free evaluation is possible: the sample range for
    /// sampled forms, [1e−300, 1e300] for closed forms.
    pub fn probe_range(&self) -> (f64, f64) {
        match &self.form {
            Form::Sampled(_) => self.domain,
            _ => (1e-300, 1e300),
        }
    }

    /// ln A(t) for t > 0.
    pub fn ln_value(&self, t: f64) -> f64 {
        if !(t > 0.0) {
            return f64::NEG_INFINITY;
        }
        match &self.form {
            Form::Power { p, c } => c.ln() + p * t.ln(),
            Form::PowerLog { p, alpha, shift } => {
                p * t.ln() + alpha * ln_c_plus(*shift, t).ln()
            }
            Form::ExpMinusLinear => ln_exp_minus_linear(t),
            Form::Entropy => ln_entropy(t),
            Form::ExpPower { beta } => ln_expm1(t.powf(*beta)),
            Form::Legendre(inner) => match legendre_point(inner, t) {
                Some(s) => {
                    let sigma = inner.log_slope(s);
                    inner.ln_value(s) + (sigma - 1.0).ln()
                }
                // above the slopes A' attains on f64 arguments Ã is unrepresentably large
                None if inner.ln_derivative(709f64.exp()) < t.ln() => f64::INFINITY,
                None => f64::NEG_INFINITY,
            },
            Form::Scaled { inner, lambda, mu } => mu.ln() + inner.ln_value(lambda * t),
            Form::Linearized { inner, t1 } => {
                if t < *t1 {
                    inner.ln_value(*t1) + (t / t1).ln()
                } else {
                    inner.ln_value(t)
                }
            }
            Form::Sampled(c) => c.eval(t.ln()),
        }
    }

    /// Local exponent σ(t) = t A'(t)/A(t).
    pub fn log_slope(&self, t: f64) -> f64 {
        match &self.form {
            Form::Power { p, .. } => *p,
            Form::PowerLog { p, alpha, shift } => {
                let l = ln_c_plus(*shift, t);
                p + alpha * t / ((shift + t) * l)
            }
            Form::ExpMinusLinear => {
                let ln_d = ln_expm1(t);
                (t.ln() + ln_d - ln_exp_minus_linear(t)).exp()
            }
            Form::Entropy => {
                let ln_d = t.ln_1p().ln();
                (t.ln() + ln_d - ln_entropy(t)).exp()
            }
            Form::ExpPower { beta } => {
                let u = t.powf(*beta);
                beta * u / (-(-u).exp_m1())
            }
            Form::Legendre(inner) => match legendre_point(inner, t) {
                Some(s) => {
                    let sigma = inner.log_slope(s);
                    sigma / (sigma - 1.0)
                }
                None => 1.0,
            },
            Form::Scaled { inner, lambda, .. } => inner.log_slope(lambda * t),
            Form::Linearized { inner, t1 } => {
                if t < *t1 {
                    1.0
                } else {
                    inner.log_slope(t)
                }
            }
            Form::Sampled(c) => c.slope(t.ln()),
        }
    }

    /// ln A(e^x); finite beyond the f64 range of t for power-type and sampled forms.
    pub fn ln_value_at_ln(&self, x: f64) -> f64 {
        match &self.form {
            Form::Power { p, c } => c.ln() + p * x,
            Form::PowerLog { p, alpha, shift } => p * x + alpha * ln_c_plus_exp(*shift, x).ln(),
            Form::Scaled { inner, lambda, mu } => mu.ln() + inner.ln_value_at_ln(x + lambda.ln()),
            Form::Linearized { inner, t1 } if x >= t1.ln() => inner.ln_value_at_ln(x),
            Form::Sampled(c) => c.eval(x),
            _ if x < 709.0 => self.ln_value(x.exp()),
            _ => f64::INFINITY,
        }
    }

    /// σ(e^x), see [`Self::log_slope`].
    pub fn log_slope_at_ln(&self, x: f64) -> f64 {
        match &self.form {
            Form::Power { p, .. } => *p,
            Form::PowerLog { p, alpha, shift } => {
                let l = ln_c_plus_exp(*shift, x);
                p + alpha / ((1.0 + shift * (-x).exp()) * l)
            }
            Form::Scaled { inner, lambda, .. } => inner.log_slope_at_ln(x + lambda.ln()),
            Form::Linearized { inner, t1 } if x >= t1.ln() => inner.log_slope_at_ln(x),
            Form::Sampled(c) => c.slope(x),
            _ if x < 709.0 => self.log_slope(x.exp()),
            _ => f64::NAN,
        }
    }

    /// Whether [`Self::ln_value_at_ln`] is exact for arbitrarily large x.
    pub fn extends_beyond_f64(&self) -> bool {
        match &self.form {
            Form::Power { .. } | Form::PowerLog { .. } => true,
            Form::Scaled { inner, .. } | Form::Linearized { inner, .. } => inner.extends_beyond_f64(),
            _ => false,
        }
    }

    /// ln A'(t).
    pub fn ln_derivative(&self, t: f64) -> f64 {
        match &self.form {
            Form::Power { p, c } => (c * p).ln() + (p - 1.0) * t.ln(),
            Form::PowerLog { p, alpha, shift } => {
                let l = ln_c_plus(*shift, t);
                let bracket = p * l + alpha * t / (shift + t);
                (p - 1.0) * t.ln() + (alpha - 1.0) * l.ln() + bracket.ln()
            }
            Form::ExpMinusLinear => ln_expm1(t),
            Form::Entropy => t.ln_1p().ln(),
            Form::ExpPower { beta } => beta.ln() + (beta - 1.0) * t.ln() + t.powf(*beta),
            Form::Legendre(inner) => match legendre_point(inner, t) {
                Some(s) => s.ln(),
                None => f64::NEG_INFINITY,
            },
            Form::Scaled { inner, lambda, mu } => {
                mu.ln() + lambda.ln() + inner.ln_derivative(lambda * t)
            }
            Form::Linearized { inner, t1 } => {
                if t < *t1 {
                    inner.ln_value(*t1) - t1.ln()
                } else {
                    inner.ln_derivative(t)
                }
            }
            Form::Sampled(_) => self.ln_value(t) + self.log_slope(t).ln() - t.ln(),
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        if t <= 0.0 {
            0.0
        } else {
            self.ln_value(t).exp()
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        self.ln_derivative(t.max(f64::MIN_POSITIVE)).exp()
    }

    /// Evaluation restricted to the trusted range of sampled forms.
    pub fn checked_value(&self, t: f64) -> Result<f64> {
        if self.is_sampled() && t > self.domain.1 * (1.0 + 1e-9) {
            return Err(Error::OutOfRange {
                what: format!("evaluation of {}", self.id),
                at: t,
                lo: 0.0,
                hi: self.domain.1,
            });
        }
        Ok(self.value(t))
    }

    /// ln of the left-continuous inverse at e^{ln_y}.
    pub fn ln_inverse_from_ln(&self, ln_y: f64) -> Result<f64> {
        if ln_y == f64::NEG_INFINITY {
            return Ok(f64::NEG_INFINITY);
        }
        if let Form::Power { p, c } = &self.form {
            let mut u = (ln_y - c.ln()) / p;
            // keep A(A⁻¹(y)) ≤ y
            while self.ln_value(u.exp()) > ln_y {
                u = u.next_down();
            }
            return Ok(u);
        }
        if let Form::Sampled(curve) = &self.form {
            let top = curve.y_range().1;
            if ln_y > top + 1e-12 * top.abs().max(1.0) {
                return Err(Error::OutOfRange {
                    what: format!("inverse of {}", self.id),
                    at: ln_y.exp(),
                    lo: 0.0,
                    hi: top.exp(),
                });
            }
        }
        let g = |u: f64| self.ln_value(u.exp()) - ln_y;
        if g(-744.0) >= 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        let (lo, hi) = bracket_increasing(g, 0.0).ok_or_else(|| Error::OutOfRange {
            what: format!("inverse of {}", self.id),
            at: ln_y.exp(),
            lo: 0.0,
            hi: f64::MAX,
        })?;
        Ok(bisect_left(g, lo, hi))
    }

    /// Solves ln A(e^x) = ln_y for x without leaving the log domain, so arguments
    /// beyond the f64 range are allowed; `guess` seeds the Newton iteration.
    pub fn ln_inverse_at_ln(&self, ln_y: f64, guess: Option<f64>) -> Result<f64> {
        match &self.form {
            Form::Power { p, c } => return Ok((ln_y - c.ln()) / p),
            Form::ExpPower { beta } => {
                // A⁻¹(y) = ln(1 + y)^{1/β}
                return Ok(crate::numeric::log_add_exp(0.0, ln_y).ln() / beta);
            }
            _ => {}
        }
        let g = |x: f64| self.ln_value_at_ln(x) - ln_y;
        let tol = 1e-14 * ln_y.abs().max(1.0);
        let mut x = guess.unwrap_or(ln_y);
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for _ in 0..200 {
            let f = g(x);
            if !f.is_finite() && f > 0.0 {
                hi = hi.min(x);
            } else if f.is_nan() {
                break;
            } else if f.abs() <= tol {
                return Ok(x);
            } else if f > 0.0 {
                hi = hi.min(x);
            } else {
                lo = lo.max(x);
            }
            let s = self.log_slope_at_ln(x);
            let mut next = if f.is_finite() && s.is_finite() && s > 0.0 { x - f / s } else { f64::NAN };
            if !(next > lo && next < hi) {
                next = match (lo.is_finite(), hi.is_finite()) {
                    (true, true) => 0.5 * (lo + hi),
                    (true, false) => lo + 2.0 * (lo.abs().max(1.0)),
                    (false, true) => hi - 2.0 * (hi.abs().max(1.0)),
                    _ => break,
                };
            }
            if (next - x).abs() <= 1e-15 * x.abs().max(1.0) {
                return Ok(next);
            }
            x = next;
        }
        Err(Error::OutOfRange {
            what: format!("log-domain inverse of {}", self.id),
            at: ln_y,
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        })
    }

    /// Left-continuous generalized inverse inf{s ≥ 0 : A(s) ≥ y}.
    pub fn inverse(&self, y: f64) -> Result<f64> {
        if y < 0.0 || y.is_nan() {
            return Err(Error::invalid(format!("inverse needs y ≥ 0, got {y}")));
        }
        if y == 0.0 {
            return Ok(0.0);
        }
        Ok(self.ln_inverse_from_ln(y.ln())?.exp())
    }

    /// Young conjugate Ã(t) = sup_s (st − A(s)).
    pub fn conjugate(&self) -> Result<Self> {
        if !self.convexity_certified {
            return Err(Error::NotConvex(format!("{} failed the convexity certificate", self.id)));
        }
        let id = format!("conj({})", self.id);
        match &self.form {
            Form::Power { p, c } => {
                if *p <= 1.0 {
                    return Err(Error::invalid("the conjugate of a linear function is not finite"));
                }
                let q = p / (p - 1.0);
                let cc = (1.0 / q) * (c * p).powf(-1.0 / (p - 1.0));
                let mut f = Self::power_scaled(q, cc)?;
                f.id = id;
                Ok(f)
            }
            Form::ExpMinusLinear => Ok(Self::entropy()),
            Form::Entropy => Ok(Self::exp_minus_linear()),
            Form::Sampled(curve) => {
                let dual = discrete_legendre(curve)?;
                Ok(Self::from_curve(dual, id))
            }
            _ => {
                let (lo, hi) = self.domain;
                let dl = self.derivative(lo).max(f64::MIN_POSITIVE);
                let dh = self.derivative(hi);
                let dom = (dl, if dh.is_finite() { dh.max(dl * 2.0) } else { f64::MAX });
                Ok(Self::build(Form::Legendre(Box::new(self.clone())), dom, id))
            }
        }
    }

    fn certify_convexity(&self) -> bool {
        match &self.form {
            Form::Power { .. } | Form::ExpMinusLinear | Form::Entropy | Form::ExpPower { .. } => {
                true
            }
            Form::Legendre(inner) => inner.convexity_certified,
            Form::Scaled { inner, .. } => inner.convexity_certified,
            Form::Linearized { inner, t1 } => {
                // slope of the chord from 0 to t1 must not exceed A'(t1+)
                inner.convexity_certified
                    && inner.ln_value(*t1) - t1.ln() <= inner.ln_derivative(*t1) + 1e-12
            }
            Form::PowerLog { .. } => {
                let (a, b) = (1e-12_f64.ln(), 1e12_f64.ln());
                let mut prev = f64::NEG_INFINITY;
                for i in 0..=2000 {
                    let t = (a + (b - a) * i as f64 / 2000.0).exp();
                    let d = self.ln_derivative(t);
                    if !d.is_finite() || d < prev - 1e-12 {
                        return false;
                    }
                    prev = d;
                }
                true
            }
            Form::Sampled(c) => {
                let m = secant_ln_slopes(c.xs(), c.ys());
                m.windows(2)
                    .all(|w| w[1] >= w[0] - 1e-9 * w[0].abs().max(1.0))
                    && c.ys().windows(2).all(|w| w[1] >= w[0])
            }
        }
    }

    fn check_n_function(&self) -> bool {
        let (lo, hi) = self.probe_range();
        let lo_ratio = self.ln_value(lo) - lo.ln();
        let hi_ratio = self.ln_value(hi) - hi.ln();
        lo_ratio < (1e-3_f64).ln() && hi_ratio > (1e3_f64).ln()
    }

    /// Ratio-sweep heuristic for Δ₂ / ∇₂ near infinity.
    pub fn check_growth_condition(&self, which: GrowthCondition) -> GrowthReport {
        let (dlo, dhi) = self.domain;
        let lo = dlo.max(1e-2);
        let hi = if self.is_sampled() { dhi / 2.0 } else { dhi };
        let mut report = GrowthReport {
            which,
            verdict: Verdict::Inconclusive,
            witness_t: f64::NAN,
            witness_ratio: f64::NAN,
            probe_lo: lo,
            probe_hi: hi,
            limit_estimate: f64::NAN,
        };
        if !(hi > lo) || (hi / lo).log10() < 2.0 {
            return report;
        }
        let m = 240;
        let ts: Vec<f64> = (0..m)
            .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (m - 1) as f64).exp())
            .collect();
        let ln_r: Vec<f64> = ts
            .iter()
            .map(|t| self.ln_value(2.0 * t) - self.ln_value(*t))
            .collect();
        let tail = &ln_r[2 * m / 3..];
        let tail_t = &ts[2 * m / 3..];
        let (imax, lmax) = tail
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |a, (i, v)| if *v > a.1 { (i, *v) } else { a });
        let (imin, lmin) = tail
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |a, (i, v)| if *v < a.1 { (i, *v) } else { a });
        let incr = tail.windows(2).filter(|w| w[1] > w[0]).count() as f64 / (tail.len() - 1) as f64;
        let decr = tail.windows(2).filter(|w| w[1] <= w[0] + 1e-12).count() as f64
            / (tail.len() - 1) as f64;
        // Extrapolate the ratio linearly in 1/ln t.
        let xs: Vec<f64> = tail_t.iter().map(|t| 1.0 / t.ln()).collect();
        let rs: Vec<f64> = tail.iter().map(|v| v.exp()).collect();
        let limit = crate::fit::least_squares(&[xs], &rs)
            .map(|(c, _)| c[1])
            .unwrap_or(f64::NAN);
        report.limit_estimate = limit;
        match which {
            GrowthCondition::Delta2 => {
                let spread = lmax - lmin;
                if incr >= 0.95 && lmax > 1e6_f64.ln() {
                    report.verdict = Verdict::Fails;
                    report.witness_t = tail_t[imax];
                    report.witness_ratio = lmax.exp();
                } else if lmax <= 1e6_f64.ln() && (spread < 0.05_f64.ln_1p() || decr >= 0.95) {
                    report.verdict = Verdict::Holds;
                    report.witness_t = tail_t[imax];
                    report.witness_ratio = lmax.exp();
                } else {
                    report.witness_t = tail_t[imax];
                    report.witness_ratio = lmax.exp();
                }
            }
            GrowthCondition::Nabla2 => {
                report.witness_t = tail_t[imin];
                report.witness_ratio = lmin.exp();
                let c = 2.02;
                let lim_ok = limit > c || (incr >= 0.95 && lmin > c.ln());
                if limit.is_finite() && limit <= c && lmin.exp() < 2.0 * c {
                    report.verdict = Verdict::Fails;
                } else if lmin > c.ln() && lim_ok {
                    report.verdict = Verdict::Holds;
                }
            }
        }
        report
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GrowthCondition {
    Delta2,
    Nabla2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Fails,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthReport {
    pub which: GrowthCondition,
    pub verdict: Verdict,
    pub witness_t: f64,
    pub witness_ratio: f64,
    pub probe_lo: f64,
    pub probe_hi: f64,
    pub limit_estimate: f64,
}

impl Monotone for ScalarYoungFunction {
    fn eval(&self, t: f64) -> f64 {
        self.value(t)
    }
    fn inverse(&self, y: f64) -> Result<f64> {
        ScalarYoungFunction::inverse(self, y)
    }
}

/// Ψ(t) = A(t)/t.
#[derive(Debug, Clone)]
pub struct Psi {
    a: ScalarYoungFunction,
}

pub fn psi_of(a: &ScalarYoungFunction) -> Result<Psi> {
    if !a.convexity_certified() {
        return Err(Error::NotConvex(format!("{} failed the convexity certificate", a.id())));
    }
    Ok(Psi { a: a.clone() })
}

impl Psi {
    pub fn ln_value(&self, t: f64) -> f64 {
        self.a.ln_value(t) - t.ln()
    }

    pub fn ln_inverse_from_ln(&self, ln_y: f64) -> Result<f64> {
        if ln_y == f64::NEG_INFINITY {
            return Ok(f64::NEG_INFINITY);
        }
        if let Form::Power { p, c } = self.a.form() {
            if *p > 1.0 {
                return Ok((ln_y - c.ln()) / (p - 1.0));
            }
        }
        let g = |u: f64| self.ln_value(u.exp()) - ln_y;
        if g(-744.0) >= 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        let (lo, hi) = bracket_increasing(g, 0.0).ok_or_else(|| Error::OutOfRange {
            what: "inverse of Psi".into(),
            at: ln_y.exp(),
            lo: 0.0,
            hi: f64::MAX,
        })?;
        Ok(bisect_left(g, lo, hi))
    }

    pub fn young(&self) -> &ScalarYoungFunction {
        &self.a
    }
}

impl Monotone for Psi {
    fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            0.0
        } else {
            self.ln_value(t).exp()
        }
    }
    fn inverse(&self, y: f64) -> Result<f64> {
        if y <= 0.0 {
            return Ok(0.0);
        }
        Ok(self.ln_inverse_from_ln(y.ln())?.exp())
    }
}

/// A'(t): the flux magnitude of a radial potential A, whose coercivity a(ξ)·ξ = |ξ|A'(|ξ|)
/// holds with equality.
#[derive(Debug, Clone)]
pub struct Flux {
    a: ScalarYoungFunction,
}

pub fn flux_of(a: &ScalarYoungFunction) -> Result<Flux> {
    if !a.convexity_certified() {
        return Err(Error::NotConvex(format!("{} failed the convexity certificate", a.id())));
    }
    Ok(Flux { a: a.clone() })
}

impl Flux {
    pub fn ln_inverse_from_ln(&self, ln_y: f64) -> Result<f64> {
        if ln_y == f64::NEG_INFINITY {
            return Ok(f64::NEG_INFINITY);
        }
        if let Form::Power { p, c } = self.a.form() {
            if *p > 1.0 {
                return Ok((ln_y - (c * p).ln()) / (p - 1.0));
            }
        }
        let g = |u: f64| self.a.ln_derivative(u.exp()) - ln_y;
        if g(-744.0) >= 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        let (lo, hi) = bracket_increasing(g, 0.0).ok_or_else(|| Error::OutOfRange {
            what: "inverse of A'".into(),
            at: ln_y.exp(),
            lo: 0.0,
            hi: f64::MAX,
        })?;
        Ok(bisect_left(g, lo, hi))
    }

    pub fn young(&self) -> &ScalarYoungFunction {
        &self.a
    }
}

impl Monotone for Flux {
    fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            0.0
        } else {
            self.a.ln_derivative(t).exp()
        }
    }
    fn inverse(&self, y: f64) -> Result<f64> {
        if y <= 0.0 {
            return Ok(0.0);
        }
        Ok(self.ln_inverse_from_ln(y.ln())?.exp())
    }
}

/// Θ⋄(t) = Φ̃⋄⁻¹(Φ⋄(t)).
#[derive(Debug, Clone)]
pub struct ThetaDiamond {
    phi: ScalarYoungFunction,
    conj: ScalarYoungFunction,
}

pub fn theta_diamond(phi: &ScalarYoungFunction) -> Result<ThetaDiamond> {
    Ok(ThetaDiamond {
        phi: phi.clone(),
        conj: phi.conjugate()?,
    })
}

impl ThetaDiamond {
    pub fn conjugate(&self) -> &ScalarYoungFunction {
        &self.conj
    }
    pub fn phi(&self) -> &ScalarYoungFunction {
        &self.phi
    }
    pub fn try_eval(&self, t: f64) -> Result<f64> {
        if t <= 0.0 {
            return Ok(0.0);
        }
        Ok(self.conj.ln_inverse_from_ln(self.phi.ln_value(t))?.exp())
    }
}

impl Monotone for ThetaDiamond {
    fn eval(&self, t: f64) -> f64 {
        self.try_eval(t).unwrap_or(f64::NAN)
    }
    fn inverse(&self, y: f64) -> Result<f64> {
        if y <= 0.0 {
            return Ok(0.0);
        }
        Ok(self.phi.ln_inverse_from_ln(self.conj.ln_value(y))?.exp())
    }
}

/// Splits "name:k=v,k=v" into the name and its numeric parameters.
pub fn parse_id(spec: &str) -> Result<(String, BTreeMap<String, f64>)> {
    let spec = spec.trim();
    let (name, rest) = match spec.split_once(':') {
        Some((n, r)) => (n.trim().to_string(), r),
        None => (spec.to_string(), ""),
    };
    let mut params = BTreeMap::new();
    for kv in rest.split(',').filter(|s| !s.trim().is_empty()) {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::invalid(format!("malformed parameter '{kv}' in '{spec}'")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| Error::invalid(format!("non-numeric parameter '{kv}' in '{spec}'")))?;
        params.insert(k.trim().to_string(), v);
    }
    Ok((name, params))
}

fn ln_exp_minus_linear(t: f64) -> f64 {
    if t < 0.5 {
        let mut term = t * t / 2.0;
        let mut sum = term;
        let mut k = 2.0;
        while term > 1e-18 * sum {
            k += 1.0;
            term *= t / k;
            sum += term;
        }
        sum.ln()
    } else if t > 40.0 {
        t + ln_1m_exp(((1.0 + t).ln() - t).min(-1e-300))
    } else {
        (t.exp_m1() - t).ln()
    }
}

fn ln_entropy(t: f64) -> f64 {
    if t < 0.5 {
        // Σ_{k≥2} (−1)^k t^k / (k(k−1))
        let mut sum = 0.0;
        let mut pw = t;
        for k in 2..80 {
            pw *= t;
            let kf = k as f64;
            let term = pw / (kf * (kf - 1.0));
            if k % 2 == 0 {
                sum += term;
            } else {
                sum -= term;
            }
            if term < 1e-18 * sum {
                break;
            }
        }
        sum.ln()
    } else {
        ((1.0 + t) * t.ln_1p() - t).ln()
    }
}

/// Maximizer s* of s·t − A(s), i.e. A'(s*) = t, or None if t ≤ A'(0+).
fn legendre_point(inner: &ScalarYoungFunction, t: f64) -> Option<f64> {
    if !(t > 0.0) {
        return None;
    }
    let lt = t.ln();
    let g = |u: f64| inner.ln_derivative(u.exp()) - lt;
    let (lo, hi) = bracket_increasing(g, 0.0)?;
    let u = brent(g, lo, hi, 1e-15).ok()?;
    Some(u.exp())
}

/// Bracket [lo, hi] with g(lo) < 0 ≤ g(hi) for nondecreasing g, expanding from u0.
fn bracket_increasing<G: Fn(f64) -> f64>(g: G, u0: f64) -> Option<(f64, f64)> {
    let g0 = g(u0);
    if g0.is_nan() {
        return None;
    }
    let mut step = 1.0;
    if g0 < 0.0 {
        let mut lo = u0;
        loop {
            let hi = lo + step;
            if hi > 709.0 {
                let hi = 709.0;
                return if g(hi) >= 0.0 { Some((lo, hi)) } else { None };
            }
            if g(hi) >= 0.0 {
                return Some((lo, hi));
            }
            lo = hi;
            step *= 2.0;
        }
    } else {
        let mut hi = u0;
        loop {
            let lo = hi - step;
            if lo < -744.0 {
                let lo = -744.0;
                return if g(lo) < 0.0 { Some((lo, hi)) } else { None };
            }
            if g(lo) < 0.0 {
                return Some((lo, hi));
            }
            hi = lo;
            step *= 2.0;
        }
    }
}

/// Bisection in u = ln s down to a relative bracket width below 1e−13; returns the
/// left end so that A(result) ≤ y.
fn bisect_left<G: Fn(f64) -> f64>(g: G, mut lo: f64, mut hi: f64) -> f64 {
    while hi - lo > 1e-14 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    lo
}

/// ln(c + e^x).
/// Involution, two-sided inverse bounds and Young's inequality probed on a log grid.
#[derive(Debug, Clone, Serialize)]
pub struct ConjugationAudit {
    pub id: String,
    pub range: (f64, f64),
    pub sampled: bool,
    /// sup |Ã̃ − A|/A over the probes where A'(t) is a finite f64
    pub involution_max_rel: f64,
    pub involution_probes: usize,
    pub involution_tolerance: f64,
    /// t ≤ Ã⁻¹(t)·A⁻¹(t) ≤ 2t
    pub inverse_product_violations: usize,
    /// A(t)/t ≤ Ã⁻¹(A(t)) ≤ 2A(t)/t, probed where A(t) is a finite f64
    pub inverse_at_value_violations: usize,
    pub inverse_at_value_probes: usize,
    pub young_probes: usize,
    pub young_violations: usize,
    pub probes: usize,
}

impl ConjugationAudit {
    pub fn pass(&self) -> bool {
        self.involution_max_rel <= self.involution_tolerance
            && self.inverse_product_violations == 0
            && self.inverse_at_value_violations == 0
            && self.young_violations == 0
    }
}

pub const INVOLUTION_TOL_ANALYTIC: f64 = 1e-6;
pub const INVOLUTION_TOL_SAMPLED: f64 = 1e-3;
const INEQ_SLACK: f64 = 1e-9;
/// Probes whose values exceed e^700 are skipped by checks that need them as f64.
const LN_F64_SAFE: f64 = 700.0;

fn rel_from_ln(a: f64, b: f64) -> f64 {
    (a - b).exp_m1().abs()
}

/// Checks of A against its conjugate on `probes` log-spaced points of [lo, hi] and a
/// `young_side`² grid for Young's inequality.
pub fn conjugation_audit(
    a: &ScalarYoungFunction,
    lo: f64,
    hi: f64,
    probes: usize,
    young_side: usize,
) -> Result<ConjugationAudit> {
    let conj = a.conjugate()?;
    let back = conj.conjugate()?;
    // Ã is only representable where the maximizer of st − A(s) is
    let hi = hi.min(conj.domain().1);
    if !(hi > lo) {
        return Err(Error::OutOfRange { what: format!("conjugate of {}", a.id()), at: lo, lo: conj.domain().0, hi });
    }
    let ts = crate::numeric::logspace(lo, hi, probes.max(2));
    let mut inverse_at_value_probes = 0;
    let mut involution_probes = 0;
    let mut involution_max_rel = 0.0_f64;
    let mut inverse_product_violations = 0;
    let mut inverse_at_value_violations = 0;
    let slack = (1.0 + INEQ_SLACK).ln();
    for &t in &ts {
        let lt = t.ln();
        if a.ln_derivative(t) <= LN_F64_SAFE {
            involution_probes += 1;
            involution_max_rel = involution_max_rel.max(rel_from_ln(back.ln_value(t), a.ln_value(t)));
        }
        let prod = a.ln_inverse_from_ln(lt)? + conj.ln_inverse_from_ln(lt)?;
        if prod < lt - slack || prod > lt + std::f64::consts::LN_2 + slack {
            inverse_product_violations += 1;
        }
        let la = a.ln_value(t);
        if la > LN_F64_SAFE {
            continue;
        }
        inverse_at_value_probes += 1;
        let r = la - lt;
        let v = conj.ln_inverse_from_ln(la)?;
        if v < r - slack || v > r + std::f64::consts::LN_2 + slack {
            inverse_at_value_violations += 1;
        }
    }
    let side = crate::numeric::logspace(lo, hi, young_side.max(2));
    let la: Vec<f64> = side.iter().map(|s| a.ln_value(*s)).collect();
    let lc: Vec<f64> = side.iter().map(|t| conj.ln_value(*t)).collect();
    let mut young_violations = 0;
    for (i, s) in side.iter().enumerate() {
        for (j, t) in side.iter().enumerate() {
            let rhs = crate::numeric::log_add_exp(la[i], lc[j]);
            if (s * t).ln() > rhs + (1.0 + 1e-12f64).ln() {
                young_violations += 1;
            }
        }
    }
    let sampled = a.is_sampled();
    Ok(ConjugationAudit {
        id: a.id().to_string(),
        range: (lo, hi),
        sampled,
        involution_max_rel,
        involution_probes,
        involution_tolerance: if sampled { INVOLUTION_TOL_SAMPLED } else { INVOLUTION_TOL_ANALYTIC },
        inverse_product_violations,
        inverse_at_value_violations,
        inverse_at_value_probes,
        young_probes: side.len() * side.len(),
        young_violations,
        probes: ts.len(),
    })
}

/// Identities and inequalities tying Φ⋄, Φ̃⋄, Ψ⋄ and Θ⋄ together.
#[derive(Debug, Clone, Serialize)]
pub struct DiamondAudit {
    pub id: String,
    pub range: (f64, f64),
    /// Φ⋄(Θ⋄⁻¹(t)) = Φ̃⋄(t)
    pub composition_max_rel: f64,
    /// Φ⋄⁻¹(tΨ⋄⁻¹(t)) = Ψ⋄⁻¹(t)
    pub psi_fixed_point_max_rel: f64,
    /// Θ⋄(Ψ⋄⁻¹(t)) ≤ 2t
    pub theta_psi_violations: usize,
    /// Φ⋄(Ψ⋄⁻¹(t/2)) ≤ Φ̃⋄(t) ≤ Φ⋄(Ψ⋄⁻¹(t))
    pub sandwich_violations: usize,
    pub identity_tolerance: f64,
    pub probes: usize,
    /// probes where Φ⋄(t) or Φ̃⋄(t) exceeds e^700
    pub skipped: usize,
}

impl DiamondAudit {
    pub fn pass(&self) -> bool {
        self.composition_max_rel <= self.identity_tolerance
            && self.psi_fixed_point_max_rel <= self.identity_tolerance
            && self.theta_psi_violations == 0
            && self.sandwich_violations == 0
    }
}

pub const IDENTITY_TOL: f64 = 1e-8;

pub fn diamond_audit(phi: &ScalarYoungFunction, lo: f64, hi: f64, probes: usize) -> Result<DiamondAudit> {
    let theta = theta_diamond(phi)?;
    let psi = psi_of(phi)?;
    let conj = theta.conjugate();
    let slack = (1.0 + INEQ_SLACK).ln();
    let mut composition_max_rel = 0.0_f64;
    let mut psi_fixed_point_max_rel = 0.0_f64;
    let mut theta_psi_violations = 0;
    let mut sandwich_violations = 0;
    let mut skipped = 0;
    let ts = crate::numeric::logspace(lo, hi, probes.max(2));
    for &t in &ts {
        let lt = t.ln();
        let lc = conj.ln_value(t);
        if lc > LN_F64_SAFE || phi.ln_value(t) > LN_F64_SAFE {
            skipped += 1;
            continue;
        }
        let theta_inv = theta.inverse(t)?;
        composition_max_rel = composition_max_rel.max(rel_from_ln(phi.ln_value(theta_inv), lc));
        let lpsi = psi.ln_inverse_from_ln(lt)?;
        let lhs = phi.ln_inverse_from_ln(lt + lpsi)?;
        psi_fixed_point_max_rel = psi_fixed_point_max_rel.max(rel_from_ln(lhs, lpsi));
        let th = theta.try_eval(lpsi.exp())?;
        if th.ln() > std::f64::consts::LN_2 + lt + slack {
            theta_psi_violations += 1;
        }
        let below = phi.ln_value(psi.ln_inverse_from_ln(lt - std::f64::consts::LN_2)?.exp());
        let above = phi.ln_value(lpsi.exp());
        if below > lc + slack || lc > above + slack {
            sandwich_violations += 1;
        }
    }
    Ok(DiamondAudit {
        id: phi.id().to_string(),
        range: (lo, hi),
        composition_max_rel,
        psi_fixed_point_max_rel,
        theta_psi_violations,
        sandwich_violations,
        identity_tolerance: IDENTITY_TOL,
        probes: ts.len() - skipped,
        skipped,
    })
}

fn ln_c_plus_exp(c: f64, x: f64) -> f64 {
    if x > 700.0 {
        x + (c * (-x).exp()).ln_1p()
    } else {
        ln_c_plus(c, x.exp())
    }
}

/// ln of secant slopes (A_{i+1} − A_i)/(t_{i+1} − t_i) from log-domain nodes.
pub fn secant_ln_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xw, yw)| ln_chord(xw[0], yw[0], xw[1], yw[1]))
        .collect()
}

fn ln_chord(x0: f64, y0: f64, x1: f64, y1: f64) -> f64 {
    let dy = y1 - y0;
    if dy <= 0.0 {
        return f64::NEG_INFINITY;
    }
    y0 + ln_expm1(dy) - x0 - ln_expm1(x1 - x0)
}

/// Indices of the lower convex hull of (e^{x_i}, e^{y_i}), comparing chord slopes in
/// the log domain.
pub fn lower_hull(x: &[f64], y: &[f64]) -> Vec<usize> {
    let mut hull: Vec<usize> = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            let s_ab = ln_chord(x[a], y[a], x[b], y[b]);
            let s_bi = ln_chord(x[b], y[b], x[i], y[i]);
            if s_bi <= s_ab {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    hull
}

/// Discrete Legendre transform of a sampled Young function. The curve is densified,
/// reduced to its lower convex hull, and the conjugate is tabulated at the hull chord
/// slopes, where sup_i (τ s_i − A_i) is attained at both chord endpoints.
pub fn discrete_legendre(curve: &LogLogCurve) -> Result<LogLogCurve> {
    let target_dx = LN_10 / 1024.0;
    let (a, b) = curve.x_range();
    let max_dx = curve
        .xs()
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(0.0, f64::max);
    let dense;
    let c = if max_dx > target_dx * 1.01 && ((b - a) / target_dx) as usize <= 4 * MAX_NODES {
        dense = curve.resample(target_dx, MAX_NODES);
        &dense
    } else {
        curve
    };
    let (x, y) = (c.xs(), c.ys());
    let hull = lower_hull(x, y);
    if hull.len() < 3 {
        return Err(Error::invalid("conjugation needs at least three hull vertices"));
    }
    let mut xs = Vec::with_capacity(hull.len());
    let mut ys = Vec::with_capacity(hull.len());
    let mut ds = Vec::with_capacity(hull.len());
    for w in hull.windows(2) {
        let (i, j) = (w[0], w[1]);
        let lm = ln_chord(x[i], y[i], x[j], y[j]);
        if !lm.is_finite() {
            continue;
        }
        let r = y[i] - lm - x[i];
        if r >= 0.0 {
            continue;
        }
        let ly = lm + x[i] + ln_1m_exp(r);
        if let Some(last) = xs.last() {
            if lm <= *last {
                continue;
            }
        }
        let (ly, d) = match tangent_point(curve, lm, x[i], x[j]) {
            Some((xs_, ys_)) if lm + xs_ - ys_ > 0.0 => {
                let ly = ys_ + ln_expm1(lm + xs_ - ys_);
                (ly, (lm + xs_ - ly).exp())
            }
            _ => {
                let s_mid = 0.5 * (x[i].exp() + x[j].exp());
                (ly, (lm + s_mid.ln() - ly).exp())
            }
        };
        xs.push(lm);
        ys.push(ly);
        ds.push(d);
    }
    if xs.len() < 3 {
        return Err(Error::invalid("conjugate grid degenerated"));
    }
    LogLogCurve::new(xs, ys, Some(ds))
}

/// Point (ln s, ln A(s)) of the interpolant in [x_lo, x_hi] where A'(s) = e^{ln_tau}.
fn tangent_point(curve: &LogLogCurve, ln_tau: f64, x_lo: f64, x_hi: f64) -> Option<(f64, f64)> {
    let g = |x: f64| curve.eval(x) - x + curve.slope(x).ln() - ln_tau;
    let (mut lo, mut hi) = (x_lo, x_hi);
    if !(g(lo) <= 0.0 && g(hi) >= 0.0) {
        return None;
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let x = 0.5 * (lo + hi);
    Some((x, curve.eval(x)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn quadratic_half_is_self_conjugate() {
        let a = ScalarYoungFunction::power(2.0).unwrap();
        let c = a.conjugate().unwrap();
        for t in [0.1, 1.0, 7.0] {
            assert!(rel(c.value(t), t * t / 2.0) < 1e-14);
        }
    }

    #[test]
    fn power_three_conjugate_closed_form() {
        let c = ScalarYoungFunction::power(3.0).unwrap().conjugate().unwrap();
        for t in [0.5, 1.0, 4.0] {
            assert!(rel(c.value(t), t.powf(1.5) / 1.5) < 1e-14);
        }
    }

    #[test]
    fn exp_minus_linear_conjugate_matches_brute_force_sup() {
        let c = ScalarYoungFunction::exp_minus_linear().conjugate().unwrap();
        let a = ScalarYoungFunction::exp_minus_linear();
        // brute-force sup over a 1e5-point log grid in s
        let grid: Vec<f64> = (0..100_000)
            .map(|i| (1e-6_f64.ln() + (60.0_f64.ln() - 1e-6_f64.ln()) * i as f64 / 99_999.0).exp())
            .collect();
        for t in [0.1, 1.0, 10.0] {
            let sup = grid.iter().map(|s| s * t - a.value(*s)).fold(f64::MIN, f64::max);
            let closed = (1.0 + t) * (1.0 + t).ln() - t;
            assert!(rel(c.value(t), closed) < 1e-13);
            assert!(rel(sup, closed) < 1e-6, "t={t} sup={sup} closed={closed}");
        }
    }

    #[test]
    fn pointwise_legendre_of_power_log_satisfies_young_equality() {
        let a = ScalarYoungFunction::from_id("power_log:p=2,alpha=1").unwrap();
        let c = a.conjugate().unwrap();
        for s in [0.3, 2.0, 50.0] {
            let t = a.derivative(s);
            assert!(rel(s * t, a.value(s) + c.value(t)) < 1e-12);
        }
    }

    #[test]
    fn inverses_of_simple_powers() {
        let sq = ScalarYoungFunction::power_scaled(2.0, 1.0).unwrap();
        assert!(rel(sq.inverse(4.0).unwrap(), 2.0) < 1e-13);
        let cube = ScalarYoungFunction::power(3.0).unwrap();
        assert!(rel(cube.inverse(9.0).unwrap(), 3.0) < 1e-13);
    }

    #[test]
    fn sampled_exponential_inverse_against_log1p() {
        let e = ScalarYoungFunction::exp_power(1.0)
            .unwrap()
            .sampled(1e-3, 1e3, DEFAULT_PER_DECADE)
            .unwrap();
        let v = e.inverse(std::f64::consts::E - 1.0).unwrap();
        assert!((v - 1.0).abs() < 1e-8, "{v}");
        let top = e.value(1e3);
        assert!(matches!(e.inverse(top * 2.0), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn growth_condition_examples() {
        let p2 = ScalarYoungFunction::power(2.0).unwrap();
        let r = p2.check_growth_condition(GrowthCondition::Delta2);
        assert_eq!(r.verdict, Verdict::Holds);
        assert!(rel(r.witness_ratio, 4.0) < 1e-12);
        let e = ScalarYoungFunction::exp_power(1.0).unwrap();
        assert_eq!(e.check_growth_condition(GrowthCondition::Delta2).verdict, Verdict::Fails);
        let tl = ScalarYoungFunction::power_log(1.0, 1.0, 1.0).unwrap();
        let r = tl.check_growth_condition(GrowthCondition::Nabla2);
        assert_eq!(r.verdict, Verdict::Fails, "{r:?}");
        assert_eq!(p2.check_growth_condition(GrowthCondition::Nabla2).verdict, Verdict::Holds);
    }

    #[test]
    fn narrow_domain_is_inconclusive() {
        let f = ScalarYoungFunction::power(2.0).unwrap().with_domain(1.0, 10.0);
        let r = f.check_growth_condition(GrowthCondition::Delta2);
        assert_eq!(r.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn flux_inverts() {
        let e2 = std::f64::consts::E.powi(2);
        for a in [
            ScalarYoungFunction::power(3.0).unwrap(),
            ScalarYoungFunction::power_log(2.0, 1.0, e2).unwrap(),
            ScalarYoungFunction::exp_power(1.5).unwrap(),
        ] {
            let fl = flux_of(&a).unwrap();
            for t in [1e-3, 0.5, 2.0, 9.0] {
                assert!(rel(fl.inverse(fl.eval(t)).unwrap(), t) < 1e-10, "{} {t}", a.id());
            }
        }
        let fl = flux_of(&ScalarYoungFunction::power(2.0).unwrap()).unwrap();
        assert!(rel(fl.eval(3.0), 3.0) < 1e-15);
    }

    #[test]
    fn psi_examples() {
        let a = ScalarYoungFunction::power_scaled(3.0, 1.0).unwrap();
        let psi = psi_of(&a).unwrap();
        assert!(rel(psi.eval(2.0), 4.0) < 1e-14);
        assert!(rel(psi.inverse(9.0).unwrap(), 3.0) < 1e-12);
        let b = ScalarYoungFunction::power_log(2.0, 1.0, 1.0).unwrap();
        assert!(rel(psi_of(&b).unwrap().eval(3.0), 3.0 * 4f64.ln()) < 1e-14);
        let e = ScalarYoungFunction::exp_power(1.0)
            .unwrap()
            .sampled(1e-3, 1e3, DEFAULT_PER_DECADE)
            .unwrap();
        let pe = psi_of(&e).unwrap();
        let t = (std::f64::consts::E.powi(2) - 1.0) / 2.0;
        assert!((pe.inverse(t).unwrap() - 2.0).abs() < 1e-6);
    }

    #[test]
    fn theta_diamond_examples() {
        let half = ScalarYoungFunction::power(2.0).unwrap();
        let th = theta_diamond(&half).unwrap();
        for t in [0.3, 1.0, 5.0] {
            assert!(rel(th.eval(t), t) < 1e-12);
        }
        let p = 3.0;
        let q = p / (p - 1.0);
        let th3 = theta_diamond(&ScalarYoungFunction::power(p).unwrap()).unwrap();
        for t in [1.0_f64, 2.0, 10.0] {
            let closed = (q * t.powf(p) / p).powf(1.0 / q);
            assert!(rel(th3.eval(t), closed) < 1e-12);
        }
        // Θ⋄(Ψ⋄⁻¹(t)) ≤ 2t for t³
        let cube = ScalarYoungFunction::power_scaled(3.0, 1.0).unwrap();
        let thc = theta_diamond(&cube).unwrap();
        let psi = psi_of(&cube).unwrap();
        for t in [0.5, 1.0, 100.0] {
            let v = thc.eval(psi.inverse(t).unwrap());
            assert!(v <= 2.0 * t * (1.0 + 1e-9));
        }
    }

    #[test]
    fn sampled_conjugate_involution() {
        let a = ScalarYoungFunction::power(3.0).unwrap().sampled(1e-4, 1e6, 2048).unwrap();
        let aa = a.conjugate().unwrap().conjugate().unwrap();
        for t in [1e-2, 1.0, 1e2, 1e4] {
            assert!(rel(aa.value(t), a.value(t)) < 1e-3);
        }
    }

    #[test]
    fn unknown_id_rejected() {
        assert!(ScalarYoungFunction::from_id("cosh:p=2").is_err());
        assert!(ScalarYoungFunction::from_id("power:q=2").is_err());
    }
}
