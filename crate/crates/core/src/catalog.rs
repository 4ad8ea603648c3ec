//! The model examples: p-Laplacian, isotropic Zygmund growth, anisotropic powers and
//! power-logs, the two planar non-split functions. Each record knows its expected
//! regularity exponents; [`verify_asymptotics`] compares them with exponents fitted
//! on a computed embedding profile.

use crate::anisotropic::{
    phi_circ, phi_circ_planar, AnisotropicYoungFunction, LevelLadder, MeasureOptions,
};
use crate::error::{Error, Result};
use crate::fit::{fit_power_log, least_squares};
use crate::sobolev::{
    classify_integral, sobolev_conjugate, trusted_ln_hi, trusted_ln_lo, ClassifyReport, Dichotomy,
    EmbeddingProfile, LogCurveFn, SobolevOptions,
};
use crate::young::ScalarYoungFunction;
use serde::{Deserialize, Serialize};

/// Default shift c inside log(c + t).
pub const DEFAULT_SHIFT: f64 = 7.38905609893065;
pub const POWER_TOLERANCE: f64 = 0.02;
pub const LOG_TOLERANCE: f64 = 0.15;
/// Fits use the top three decades of the iterated-log coordinate.
pub const FIT_DECADES: f64 = 3.0;
/// Top of the computed Φ∘ range, as ln t for closed forms and ln L for planar levels.
pub const LN_T_TOP: f64 = 1e5;
pub const LN_LEVEL_TOP: f64 = 2e5;
const EQ: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExampleId {
    Plap,
    IsoZyg,
    AnisoPlap,
    AnisoZyg,
    AnisoTrud,
    AnisoNew,
}

impl ExampleId {
    pub const ALL: [ExampleId; 6] = [
        ExampleId::Plap,
        ExampleId::IsoZyg,
        ExampleId::AnisoPlap,
        ExampleId::AnisoZyg,
        ExampleId::AnisoTrud,
        ExampleId::AnisoNew,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ExampleId::Plap => "plap",
            ExampleId::IsoZyg => "iso_zyg",
            ExampleId::AnisoPlap => "aniso_plap",
            ExampleId::AnisoZyg => "aniso_zyg",
            ExampleId::AnisoTrud => "aniso_trud",
            ExampleId::AnisoNew => "aniso_new",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| {
                Error::invalid(format!(
                    "unknown example '{s}'; expected one of plap, iso_zyg, aniso_plap, aniso_zyg, \
                     aniso_trud, aniso_new"
                ))
            })
    }
}

/// Parameter overrides; absent fields take the record's defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExampleParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_i: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_i: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// power-type ϑ
    Subcritical,
    /// ϑ ≈ exp(t^β)
    Exp,
    /// ϑ ≈ exp(exp t)
    DoubleExp,
    /// bounded solutions
    Convergent,
}

impl Regime {
    pub fn tag(&self) -> &'static str {
        match self {
            Regime::Subcritical => "subcritical",
            Regime::Exp => "exp",
            Regime::DoubleExp => "double_exp",
            Regime::Convergent => "convergent",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Growth {
    /// t^a (log t)^b (log log t)^c
    Power,
    /// exp(t^a)
    Exp,
    /// exp(exp(t^a))
    DoubleExp,
}

/// Behaviour near infinity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Asymptotic {
    pub growth: Growth,
    pub power: f64,
    pub log: f64,
    pub loglog: f64,
}

impl Asymptotic {
    fn power_log(power: f64, log: f64) -> Self {
        Self { growth: Growth::Power, power, log, loglog: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentLaw {
    /// the controlled quantity, e.g. "u_x1" or "|∇u|"
    pub label: String,
    pub varrho: Asymptotic,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Regularity {
    pub regime: Regime,
    pub dichotomy: Dichotomy,
    pub phi_circ: Asymptotic,
    /// Marcinkiewicz function ϑ of u; absent for bounded solutions
    pub u: Option<Asymptotic>,
    pub u_space: String,
    pub gradients: Vec<ComponentLaw>,
}

/// One term of a split or linear-combination Φ: |⟨c, ξ⟩|^p log^α(shift + |⟨c, ξ⟩|),
/// or e^{|⟨c, ξ⟩|^β} − 1 when `beta` is set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Term {
    pub label: String,
    pub coeffs: Option<Vec<f64>>,
    pub p: f64,
    pub alpha: f64,
    pub beta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExampleRecord {
    pub id: ExampleId,
    pub n: usize,
    pub radial: bool,
    pub terms: Vec<Term>,
    pub shift: f64,
    /// exponents of Φ∘ ≈ t^{p̄} (log t)^{ᾱ}
    pub p_bar: f64,
    pub alpha_bar: f64,
    pub notes: Vec<String>,
}

/// Harmonic mean n / Σ 1/p_i.
pub fn harmonic_mean(p: &[f64]) -> f64 {
    p.len() as f64 / p.iter().map(|v| 1.0 / v).sum::<f64>()
}

fn zyg_hypothesis(p: f64, alpha: f64, what: &str) -> Result<()> {
    if !(p.is_finite() && alpha.is_finite()) {
        return Err(Error::invalid(format!("{what}: exponents must be finite")));
    }
    if p > 1.0 || (p == 1.0 && alpha > 0.0) {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "{what}: needs either p > 1 and α ∈ ℝ, or p = 1 and α > 0 (p={p}, α={alpha})"
        )))
    }
}

impl ExampleRecord {
    /// Record with the default parameters of `id` overridden by `params`.
    pub fn new(id: ExampleId, params: &ExampleParams) -> Result<Self> {
        let shift = params.c.unwrap_or(DEFAULT_SHIFT);
        if !(shift >= 1.0) {
            return Err(Error::invalid("the log shift c must be at least 1"));
        }
        let unused = |names: &[&str]| -> Result<()> {
            let given = [
                ("n", params.n.is_some()),
                ("p", params.p.is_some()),
                ("alpha", params.alpha.is_some()),
                ("p_i", params.p_i.is_some()),
                ("alpha_i", params.alpha_i.is_some()),
                ("q", params.q.is_some()),
                ("beta", params.beta.is_some()),
                ("c", params.c.is_some()),
            ];
            match given.iter().find(|(k, set)| *set && !names.contains(k)) {
                Some((k, _)) => Err(Error::invalid(format!("{} does not take '{k}'", id.as_str()))),
                None => Ok(()),
            }
        };
        let mut notes = Vec::new();
        let n = params.n.unwrap_or(match id {
            ExampleId::Plap | ExampleId::IsoZyg => 3,
            _ => 2,
        });
        if n < 2 {
            return Err(Error::invalid("dimension n must be at least 2"));
        }
        let rec = |radial, terms: Vec<Term>, p_bar, alpha_bar, notes| ExampleRecord {
            id,
            n,
            radial,
            terms,
            shift,
            p_bar,
            alpha_bar,
            notes,
        };
        let term = |label: String, p: f64, alpha: f64| Term { label, coeffs: None, p, alpha, beta: None };
        match id {
            ExampleId::Plap => {
                unused(&["n", "p"])?;
                let p = params.p.unwrap_or(2.0);
                if !(p > 1.0 && p.is_finite()) {
                    return Err(Error::invalid(format!("plap needs 1 < p < ∞ (p={p})")));
                }
                Ok(rec(true, vec![term("|∇u|".into(), p, 0.0)], p, 0.0, notes))
            }
            ExampleId::IsoZyg => {
                unused(&["n", "p", "alpha", "c"])?;
                let p = params.p.unwrap_or(2.0);
                let alpha = params.alpha.unwrap_or(1.0);
                zyg_hypothesis(p, alpha, "iso_zyg")?;
                Ok(rec(true, vec![term("|∇u|".into(), p, alpha)], p, alpha, notes))
            }
            ExampleId::AnisoPlap | ExampleId::AnisoZyg => {
                let zyg = id == ExampleId::AnisoZyg;
                if zyg {
                    unused(&["n", "p_i", "alpha_i", "c"])?;
                } else {
                    unused(&["n", "p_i"])?;
                }
                let p = params.p_i.clone().unwrap_or_else(|| {
                    if zyg || n != 2 {
                        vec![2.0; n]
                    } else {
                        vec![2.0, 4.0]
                    }
                });
                let alpha = if zyg {
                    params.alpha_i.clone().unwrap_or_else(|| {
                        if n == 2 {
                            vec![1.0, 3.0]
                        } else {
                            vec![1.0; n]
                        }
                    })
                } else {
                    vec![0.0; p.len()]
                };
                if p.len() != n || alpha.len() != n {
                    return Err(Error::invalid(format!(
                        "{} needs {n} exponents p_i and α_i, one per coordinate",
                        id.as_str()
                    )));
                }
                for (i, (pi, ai)) in p.iter().zip(&alpha).enumerate() {
                    if zyg {
                        zyg_hypothesis(*pi, *ai, &format!("aniso_zyg term {}", i + 1))?;
                    } else if !(*pi > 1.0 && pi.is_finite()) {
                        return Err(Error::invalid(format!(
                            "aniso_plap needs p_i > 1 (p_{}={pi})",
                            i + 1
                        )));
                    }
                }
                let pb = harmonic_mean(&p);
                let ab = pb / n as f64 * alpha.iter().zip(&p).map(|(a, p)| a / p).sum::<f64>();
                let terms = p
                    .iter()
                    .zip(&alpha)
                    .enumerate()
                    .map(|(i, (pi, ai))| term(format!("u_x{}", i + 1), *pi, *ai))
                    .collect();
                Ok(rec(false, terms, pb, ab, notes))
            }
            ExampleId::AnisoTrud => {
                unused(&["n", "p", "q", "alpha", "c"])?;
                if n != 2 {
                    return Err(Error::invalid("aniso_trud is planar: n must be 2"));
                }
                let p = params.p.unwrap_or(1.5);
                let q = params.q.unwrap_or(1.5);
                let alpha = params.alpha.unwrap_or(1.0);
                if !(p > 1.0 && p.is_finite()) {
                    return Err(Error::invalid(format!("aniso_trud needs p > 1 (p={p})")));
                }
                if !(q >= 1.0 && q.is_finite() && alpha > 0.0 && alpha.is_finite()) {
                    return Err(Error::invalid(format!(
                        "aniso_trud needs q ≥ 1 and α > 0 (q={q}, α={alpha})"
                    )));
                }
                let pq = p * q;
                if pq > (p + q) * (1.0 + EQ) {
                    notes.push(
                        "pq > p+q is outside the listed cases; classified from p̄ > 2 as bounded".into(),
                    );
                }
                let terms = vec![
                    Term { label: "u_x1 - u_x2".into(), coeffs: Some(vec![1.0, -1.0]), p, alpha: 0.0, beta: None },
                    Term { label: "u_x1".into(), coeffs: Some(vec![1.0, 0.0]), p: q, alpha, beta: None },
                ];
                let pb = 2.0 * pq / (p + q);
                let ab = p * alpha / (p + q);
                Ok(rec(false, terms, pb, ab, notes))
            }
            ExampleId::AnisoNew => {
                unused(&["n", "p", "beta"])?;
                if n != 2 {
                    return Err(Error::invalid("aniso_new is planar: n must be 2"));
                }
                let p = params.p.unwrap_or(2.0);
                let beta = params.beta.unwrap_or(1.5);
                if !(p > 1.0 && beta > 1.0 && p.is_finite() && beta.is_finite()) {
                    return Err(Error::invalid(format!(
                        "aniso_new needs p > 1 and β > 1 (p={p}, β={beta})"
                    )));
                }
                let terms = vec![
                    Term { label: "u_x1 + 3u_x2".into(), coeffs: Some(vec![1.0, 3.0]), p, alpha: 0.0, beta: None },
                    Term {
                        label: "2u_x1 - u_x2".into(),
                        coeffs: Some(vec![2.0, -1.0]),
                        p: 1.0,
                        alpha: 0.0,
                        beta: Some(beta),
                    },
                ];
                Ok(rec(false, terms, 2.0 * p, -p / beta, notes))
            }
        }
    }

    /// Defaults of `id`.
    pub fn default_for(id: ExampleId) -> Result<Self> {
        Self::new(id, &ExampleParams::default())
    }

    /// The four regimes of the planar non-split example:
    /// 1 → pq < p+q, 2 → pq = p+q and α < q, 3 → α = q, 4 → α > q.
    pub fn trud_regime(k: usize) -> Result<Self> {
        let (p, q, alpha) = match k {
            1 => (1.5, 1.5, 1.0),
            2 => (2.0, 2.0, 1.0),
            3 => (2.0, 2.0, 2.0),
            4 => (2.0, 2.0, 4.0),
            _ => return Err(Error::invalid("regime index must be 1, 2, 3 or 4")),
        };
        Self::new(
            ExampleId::AnisoTrud,
            &ExampleParams { p: Some(p), q: Some(q), alpha: Some(alpha), ..Default::default() },
        )
    }

    fn scalar_term(&self, t: &Term, shift: f64) -> Result<ScalarYoungFunction> {
        match t.beta {
            Some(b) => ScalarYoungFunction::exp_power(b),
            None if t.alpha == 0.0 => ScalarYoungFunction::power_scaled(t.p, 1.0),
            None => ScalarYoungFunction::power_log(t.p, t.alpha, shift),
        }
    }

    /// Scalar terms A_i controlling each gradient component.
    pub fn scalar_terms(&self) -> Result<Vec<ScalarYoungFunction>> {
        self.terms.iter().map(|t| self.scalar_term(t, self.shift)).collect()
    }

    /// Φ built in the anisotropic module, with the log shift raised until convexity
    /// is certified.
    pub fn build_phi(&self) -> Result<(AnisotropicYoungFunction, f64)> {
        let mut shift = self.shift;
        for _ in 0..8 {
            let terms: Vec<ScalarYoungFunction> =
                self.terms.iter().map(|t| self.scalar_term(t, shift)).collect::<Result<_>>()?;
            let phi = if self.radial {
                AnisotropicYoungFunction::radial(self.n, terms[0].clone())?
            } else if self.terms[0].coeffs.is_some() {
                let pairs = self
                    .terms
                    .iter()
                    .zip(terms)
                    .map(|(t, a)| (t.coeffs.clone().unwrap_or_default(), a))
                    .collect();
                AnisotropicYoungFunction::linear_combination(self.n, pairs)?
            } else {
                AnisotropicYoungFunction::split(terms)?
            };
            let scalar_ok = self.scalar_terms_with(shift)?.iter().all(|a| a.convexity_certified());
            if scalar_ok && phi.validate(256, 7).convex {
                return Ok((phi, shift));
            }
            let uses_shift = self.terms.iter().any(|t| t.alpha != 0.0 && t.beta.is_none());
            if !uses_shift {
                return Err(Error::NotConvex(format!("{} is not convex", phi.id())));
            }
            shift *= DEFAULT_SHIFT;
        }
        Err(Error::NotConvex(format!(
            "{}: no log shift up to {shift:e} gives a convex Φ",
            self.id.as_str()
        )))
    }

    fn scalar_terms_with(&self, shift: f64) -> Result<Vec<ScalarYoungFunction>> {
        self.terms.iter().map(|t| self.scalar_term(t, shift)).collect()
    }
}

/// Closed-form exponents of ϑ, ϱ_i and Φ∘ with the three-way split of the divergent
/// case.
pub fn expected_regularity(record: &ExampleRecord) -> Result<Regularity> {
    let n = record.n as f64;
    let (pb, ab) = (record.p_bar, record.alpha_bar);
    let phi_circ = Asymptotic::power_log(pb, ab);
    if record.id == ExampleId::AnisoNew {
        return Ok(Regularity {
            regime: Regime::Convergent,
            dichotomy: Dichotomy::Convergent,
            phi_circ,
            u: None,
            u_space: "L^inf".into(),
            gradients: Vec::new(),
        });
    }
    let regime = if pb < n * (1.0 - EQ) {
        Regime::Subcritical
    } else if pb > n * (1.0 + EQ) {
        Regime::Convergent
    } else if ab < (n - 1.0) - EQ {
        Regime::Exp
    } else if ab <= (n - 1.0) + EQ {
        Regime::DoubleExp
    } else {
        Regime::Convergent
    };
    let (u, u_space) = match regime {
        Regime::Subcritical => {
            let a = n * (pb - 1.0) / (n - pb);
            let b = n * ab / (n - pb);
            let space = if b == 0.0 {
                format!("weak-L^{}", fmt_num(a))
            } else {
                format!("Marcinkiewicz t^{}(log t)^{}", fmt_num(a), fmt_num(b))
            };
            (Some(Asymptotic::power_log(a, b)), space)
        }
        Regime::Exp => {
            let beta = (n - 1.0) / (n - 1.0 - ab);
            let space = if (beta - 1.0).abs() < EQ {
                "exp L".to_string()
            } else {
                format!("exp L^{}", fmt_num(beta))
            };
            (Some(Asymptotic { growth: Growth::Exp, power: beta, log: 0.0, loglog: 0.0 }), space)
        }
        Regime::DoubleExp => (
            Some(Asymptotic { growth: Growth::DoubleExp, power: 1.0, log: 0.0, loglog: 0.0 }),
            "exp exp L".to_string(),
        ),
        Regime::Convergent => (None, "L^inf".to_string()),
    };
    let gradients = record
        .terms
        .iter()
        .filter_map(|t| {
            let (pi, ai) = (t.p, t.alpha);
            let law = match regime {
                Regime::Subcritical => Asymptotic::power_log(
                    pi * n * (pb - 1.0) / ((n - 1.0) * pb),
                    n * (ai * (pb - 1.0) + ab) / ((n - 1.0) * pb),
                ),
                Regime::Exp => Asymptotic::power_log(pi, ai + ab / (n - 1.0) - 1.0),
                // ϱ_i = ϱₙ∘A_i with ϱₙ(s) ≈ s/log log s
                Regime::DoubleExp => Asymptotic { growth: Growth::Power, power: pi, log: ai, loglog: -1.0 },
                Regime::Convergent => return None,
            };
            Some(ComponentLaw { label: t.label.clone(), varrho: law })
        })
        .collect();
    Ok(Regularity {
        regime,
        dichotomy: if regime == Regime::Convergent { Dichotomy::Convergent } else { Dichotomy::Divergent },
        phi_circ,
        u,
        u_space,
        gradients,
    })
}

fn fmt_num(v: f64) -> String {
    let r = (v * 1e6).round() / 1e6;
    if r == r.trunc() {
        format!("{}", r as i64)
    } else {
        format!("{r}")
    }
}

/// Φ, Φ∘ and, for divergent cases, the embedding profile of a record.
#[derive(Debug, Clone)]
pub struct ComputedExample {
    pub phi_id: String,
    pub shift: f64,
    pub phi_circ: ScalarYoungFunction,
    /// ln t range of Φ∘ used for fits
    pub phi_circ_range: (f64, f64),
    pub classify: ClassifyReport,
    pub profile: Option<EmbeddingProfile>,
    pub terms: Vec<ScalarYoungFunction>,
}

/// Builds Φ, its Φ∘ (exact for radial Φ, log-domain area for planar Φ that split
/// after a linear change of variables, cubature otherwise), and the profile.
pub fn compute_example(record: &ExampleRecord) -> Result<ComputedExample> {
    let (phi, shift) = record.build_phi()?;
    let terms = record.scalar_terms_with(shift)?;
    let (phi_circ_fn, top) = if record.radial {
        (terms[0].clone(), LN_T_TOP)
    } else if record.n == 2 {
        let f = phi_circ_planar(&phi, -23.0, LN_LEVEL_TOP)?;
        let top = trusted_ln_hi(&f);
        (f, top)
    } else {
        let ladder = LevelLadder { lo: 1e-2, hi: 1e100, count: 409 };
        let f = phi_circ(&phi, &ladder, &MeasureOptions::default())?.function;
        let top = trusted_ln_hi(&f);
        (f, top)
    };
    let lo = trusted_ln_lo(&phi_circ_fn);
    let classify = classify_integral(&phi_circ_fn, record.n)?;
    let profile = if classify.verdict == Dichotomy::Divergent {
        let opts = SobolevOptions {
            ln_t_hi: Some(top),
            stretch_above: Some(50.0),
            ..Default::default()
        };
        Some(sobolev_conjugate(&phi_circ_fn, record.n, &opts)?)
    } else {
        None
    };
    Ok(ComputedExample {
        phi_id: phi.id().to_string(),
        shift,
        phi_circ: phi_circ_fn,
        phi_circ_range: (lo, top),
        classify,
        profile,
        terms,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    Power,
    Log,
    ExpPower,
    DoubleExpRate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentCheck {
    /// "phi_circ", "vartheta" or "varrho[<component>]"
    pub quantity: String,
    pub kind: CheckKind,
    pub expected: f64,
    pub computed: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// fit window in the fitted coordinate
    pub window: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub id: ExampleId,
    pub record: ExampleRecord,
    pub expected: Regularity,
    pub regime: Regime,
    pub dichotomy: Dichotomy,
    pub phi: String,
    pub shift: f64,
    pub modification_applied: bool,
    pub checks: Vec<ExponentCheck>,
    pub inconclusive: Vec<String>,
    pub outcome: Outcome,
}

fn geomspace(lo: f64, hi: f64, m: usize) -> Vec<f64> {
    let r = hi / lo;
    (0..m).map(|i| lo * r.powf(i as f64 / (m - 1) as f64)).collect()
}

/// Window [x_hi·10^{−3}, x_hi] of the iterated-log coordinate, if the range holds it.
fn top_window(range: (f64, f64)) -> Option<(f64, f64)> {
    let hi = range.1;
    let lo = hi / 10f64.powf(FIT_DECADES);
    (lo > 1.0 && lo >= range.0 && hi.is_finite()).then_some((lo, hi))
}

fn power_check(quantity: &str, expected: f64, computed: f64, window: (f64, f64)) -> ExponentCheck {
    let tolerance = POWER_TOLERANCE * expected.abs().max(1.0);
    ExponentCheck {
        quantity: quantity.into(),
        kind: CheckKind::Power,
        expected,
        computed,
        tolerance,
        pass: (computed - expected).abs() <= tolerance,
        window,
    }
}

fn log_check(quantity: &str, expected: f64, computed: f64, window: (f64, f64)) -> ExponentCheck {
    ExponentCheck {
        quantity: quantity.into(),
        kind: CheckKind::Log,
        expected,
        computed,
        tolerance: LOG_TOLERANCE,
        pass: (computed - expected).abs() <= LOG_TOLERANCE,
        window,
    }
}

/// Power and log exponents of ln F(x) over the top window.
fn fit_power_law<F: Fn(f64) -> f64>(
    quantity: &str,
    f: F,
    range: (f64, f64),
    expected: &Asymptotic,
    checks: &mut Vec<ExponentCheck>,
    inconclusive: &mut Vec<String>,
) -> Result<()> {
    let Some(w) = top_window(range) else {
        inconclusive.push(format!(
            "{quantity}: trusted range ln t ∈ [{:.3}, {:.3}] holds fewer than three decades of ln t",
            range.0, range.1
        ));
        return Ok(());
    };
    let xs = geomspace(w.0, w.1, 256);
    let ys: Vec<f64> = xs.iter().map(|x| f(*x)).collect();
    let fit = fit_power_log(&xs, &ys, expected.loglog)?;
    checks.push(power_check(quantity, expected.power, fit.power, w));
    checks.push(log_check(quantity, expected.log, fit.log, w));
    Ok(())
}

/// Fitted growth of ϑ in the exponential regimes. The window covers the top three
/// decades of ln ϑ.
fn fit_exp_growth(
    vartheta: &LogCurveFn,
    expected: &Asymptotic,
    checks: &mut Vec<ExponentCheck>,
    inconclusive: &mut Vec<String>,
) -> Result<()> {
    let c = &vartheta.curve;
    let (x_lo, x_hi) = c.x_range();
    let y_hi = c.eval(x_hi);
    let y_lo = y_hi / 10f64.powf(FIT_DECADES);
    if !(y_hi > 0.0) || c.eval(x_lo) > y_lo {
        inconclusive.push(format!(
            "vartheta: ln ϑ reaches only [{:.3}, {y_hi:.3}], fewer than three decades",
            c.eval(x_lo)
        ));
        return Ok(());
    }
    let xw = c.inverse(y_lo);
    let m = 256;
    let xs: Vec<f64> = (0..m).map(|i| xw + (x_hi - xw) * i as f64 / (m - 1) as f64).collect();
    let t: Vec<f64> = xs.iter().map(|x| x.exp()).collect();
    match expected.growth {
        Growth::Exp => {
            // d ln ln ϑ / d ln t = β + O(log t / t)
            let beta: Vec<f64> = xs.iter().map(|x| c.slope(*x) / c.eval(*x)).collect();
            let c1: Vec<f64> = t.iter().map(|t| 1.0 / t).collect();
            let c2: Vec<f64> = t.iter().map(|t| t.ln() / t).collect();
            let (coef, _) = least_squares(&[c1, c2], &beta)?;
            let computed = coef[coef.len() - 1];
            let tolerance = POWER_TOLERANCE * expected.power.abs();
            checks.push(ExponentCheck {
                quantity: "vartheta".into(),
                kind: CheckKind::ExpPower,
                expected: expected.power,
                computed,
                tolerance,
                pass: (computed - expected.power).abs() <= tolerance,
                window: (t[0], t[m - 1]),
            });
        }
        Growth::DoubleExp => {
            // d ln ln ϑ / dt = 1 + O(t e^{−t})
            let rate: Vec<f64> = xs
                .iter()
                .zip(&t)
                .map(|(x, t)| c.slope(*x) / (c.eval(*x) * t))
                .collect();
            let c1: Vec<f64> = t.iter().map(|t| t * (-t).exp()).collect();
            let (coef, _) = least_squares(&[c1], &rate)?;
            let computed = coef[coef.len() - 1];
            let tolerance = POWER_TOLERANCE * expected.power.abs();
            checks.push(ExponentCheck {
                quantity: "vartheta".into(),
                kind: CheckKind::DoubleExpRate,
                expected: expected.power,
                computed,
                tolerance,
                pass: (computed - expected.power).abs() <= tolerance,
                window: (t[0], t[m - 1]),
            });
        }
        Growth::Power => unreachable!("power growth is fitted by fit_power_law"),
    }
    Ok(())
}

/// Regime read off the computed dichotomy report.
pub fn computed_regime(report: &ClassifyReport) -> Regime {
    match (report.verdict, report.borderline_log_exponent) {
        (Dichotomy::Convergent, _) => Regime::Convergent,
        (Dichotomy::Divergent, None) => Regime::Subcritical,
        (Dichotomy::Divergent, Some(g)) if g < 0.95 => Regime::Exp,
        (Dichotomy::Divergent, Some(_)) => Regime::DoubleExp,
    }
}

/// Compares the computed Φ∘, ϑₙ and ϱ_i = ϱₙ∘A_i with the expected exponents.
pub fn verify_asymptotics(record: &ExampleRecord, computed: &ComputedExample) -> Result<VerificationReport> {
    let expected = expected_regularity(record)?;
    let mut checks = Vec::new();
    let mut inconclusive = Vec::new();
    let pc = &computed.phi_circ;
    fit_power_law(
        "phi_circ",
        |x| pc.ln_value_at_ln(x),
        computed.phi_circ_range,
        &expected.phi_circ,
        &mut checks,
        &mut inconclusive,
    )?;
    let regime = computed_regime(&computed.classify);
    if let (Some(prof), Some(u)) = (&computed.profile, &expected.u) {
        match u.growth {
            Growth::Power => {
                let v = &prof.vartheta;
                fit_power_law("vartheta", |x| v.ln_eval(x), v.ln_range(), u, &mut checks, &mut inconclusive)?;
            }
            _ => fit_exp_growth(&prof.vartheta, u, &mut checks, &mut inconclusive)?,
        }
        for (law, a) in expected.gradients.iter().zip(&computed.terms) {
            let composed = prof.varrho_composed(a)?;
            let name = format!("varrho[{}]", law.label);
            fit_power_law(
                &name,
                |x| composed.ln_eval(x),
                composed.ln_range(),
                &law.varrho,
                &mut checks,
                &mut inconclusive,
            )?;
        }
    }
    let dichotomy = computed.classify.verdict;
    let agree = regime == expected.regime && dichotomy == expected.dichotomy;
    let outcome = if !agree || checks.iter().any(|c| !c.pass) {
        Outcome::Fail
    } else if !inconclusive.is_empty() {
        Outcome::Inconclusive
    } else {
        Outcome::Pass
    };
    Ok(VerificationReport {
        id: record.id,
        record: record.clone(),
        expected,
        regime,
        dichotomy,
        phi: computed.phi_id.clone(),
        shift: computed.shift,
        modification_applied: computed.profile.as_ref().map(|p| p.modification.applied).unwrap_or(false),
        checks,
        inconclusive,
        outcome,
    })
}

/// [`compute_example`] followed by [`verify_asymptotics`].
pub fn verify_example(record: &ExampleRecord) -> Result<VerificationReport> {
    let computed = compute_example(record)?;
    verify_asymptotics(record, &computed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(id: ExampleId, params: ExampleParams) -> ExampleRecord {
        ExampleRecord::new(id, &params).unwrap()
    }

    #[test]
    fn plap_exponents() {
        let r = rec(ExampleId::Plap, ExampleParams { p: Some(2.0), n: Some(3), ..Default::default() });
        let e = expected_regularity(&r).unwrap();
        assert_eq!(e.regime, Regime::Subcritical);
        assert_eq!(e.u_space, "weak-L^3");
        let u = e.u.unwrap();
        assert!((u.power - 3.0).abs() < 1e-12 && u.log == 0.0);
        // |∇u| ∈ weak-L^{3/2}
        assert!((e.gradients[0].varrho.power - 1.5).abs() < 1e-12);
    }

    #[test]
    fn aniso_plap_critical() {
        let r = rec(
            ExampleId::AnisoPlap,
            ExampleParams { p_i: Some(vec![2.0, 2.0]), n: Some(2), ..Default::default() },
        );
        let e = expected_regularity(&r).unwrap();
        assert_eq!(e.regime, Regime::Exp);
        assert_eq!(e.u_space, "exp L");
        for g in &e.gradients {
            assert_eq!((g.varrho.power, g.varrho.log), (2.0, -1.0));
        }
    }

    #[test]
    fn harmonic_mean_of_two_and_four() {
        let r = ExampleRecord::default_for(ExampleId::AnisoPlap).unwrap();
        assert!((r.p_bar - 8.0 / 3.0).abs() < 1e-14);
        assert_eq!(expected_regularity(&r).unwrap().regime, Regime::Convergent);
    }

    #[test]
    fn aniso_zyg_alpha_bar() {
        let r = ExampleRecord::default_for(ExampleId::AnisoZyg).unwrap();
        assert!((r.p_bar - 2.0).abs() < 1e-14 && (r.alpha_bar - 2.0).abs() < 1e-14);
        assert_eq!(expected_regularity(&r).unwrap().regime, Regime::Convergent);
    }

    #[test]
    fn trud_regimes() {
        let tags: Vec<Regime> = (1..=4)
            .map(|k| expected_regularity(&ExampleRecord::trud_regime(k).unwrap()).unwrap().regime)
            .collect();
        assert_eq!(tags, vec![Regime::Subcritical, Regime::Exp, Regime::DoubleExp, Regime::Convergent]);
        let e = expected_regularity(&ExampleRecord::trud_regime(3).unwrap()).unwrap();
        assert_eq!(e.u_space, "exp exp L");
        let diff = &e.gradients[0];
        assert_eq!(diff.label, "u_x1 - u_x2");
        assert_eq!((diff.varrho.power, diff.varrho.log, diff.varrho.loglog), (2.0, 0.0, -1.0));
    }

    #[test]
    fn trud_subcritical_exponents() {
        // p = q = 1.5, α = 1: ϑ ≈ t² log² t, ϱ₁ ≈ t log^{4/3} t, ϱ₂ ≈ t log^{2/3} t
        let e = expected_regularity(&ExampleRecord::trud_regime(1).unwrap()).unwrap();
        let u = e.u.unwrap();
        assert!((u.power - 2.0).abs() < 1e-12 && (u.log - 2.0).abs() < 1e-12);
        let g1 = &e.gradients[1].varrho;
        assert!((g1.power - 1.0).abs() < 1e-12 && (g1.log - 4.0 / 3.0).abs() < 1e-12);
        let g2 = &e.gradients[0].varrho;
        assert!((g2.power - 1.0).abs() < 1e-12 && (g2.log - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn hypotheses_are_enforced() {
        let bad = ExampleRecord::new(
            ExampleId::IsoZyg,
            &ExampleParams { p: Some(1.0), alpha: Some(-1.0), ..Default::default() },
        );
        assert!(matches!(bad, Err(Error::Invalid(m)) if m.contains("p = 1 and α > 0")));
        assert!(ExampleRecord::new(ExampleId::AnisoTrud, &ExampleParams { n: Some(3), ..Default::default() }).is_err());
        assert!(ExampleRecord::new(ExampleId::Plap, &ExampleParams { q: Some(2.0), ..Default::default() }).is_err());
        assert!(ExampleRecord::new(ExampleId::AnisoNew, &ExampleParams { beta: Some(1.0), ..Default::default() }).is_err());
    }

    #[test]
    fn iso_zyg_without_log_is_plap() {
        let a = rec(ExampleId::IsoZyg, ExampleParams { p: Some(1.5), alpha: Some(0.0), n: Some(2), ..Default::default() });
        let b = rec(ExampleId::Plap, ExampleParams { p: Some(1.5), n: Some(2), ..Default::default() });
        assert_eq!(expected_regularity(&a).unwrap(), expected_regularity(&b).unwrap());
    }

    #[test]
    fn verify_plap_two_three() {
        let r = ExampleRecord::default_for(ExampleId::Plap).unwrap();
        let rep = verify_example(&r).unwrap();
        let v = rep.checks.iter().find(|c| c.quantity == "vartheta" && c.kind == CheckKind::Power).unwrap();
        assert!((v.computed - 3.0).abs() < 0.06, "{v:?}");
        assert_eq!(rep.outcome, Outcome::Pass, "{rep:#?}");
    }
}
