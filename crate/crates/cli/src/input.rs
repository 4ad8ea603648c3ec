use crate::output::{config_error, Failure};
use anisoreg::anisotropic::{
    phi_circ, phi_circ_planar, AnisoForm, AnisoSpec, LevelLadder, MeasureOptions,
};
use anisoreg::grid::{singular_source, tent_mass, GridField};
use anisoreg::rearrangement::RearrangedFunction;
use anisoreg::young::{parse_id, Form};
use anisoreg::{AnisotropicYoungFunction, ScalarYoungFunction};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;
use std::collections::BTreeMap;

/// Fills every argument left unset on the command line from the config document.
pub fn resolve<T: Serialize + DeserializeOwned>(cli: T, config: Option<&Value>) -> Result<T, Failure> {
    let Some(config) = config else { return Ok(cli) };
    let Value::Object(doc) = config else {
        return Err(config_error("the config document must be a JSON object"));
    };
    let mut merged = serde_json::to_value(&cli).map_err(|e| config_error(e.to_string()))?;
    let Value::Object(fields) = &mut merged else { unreachable!("argument structs serialize to objects") };
    for (k, v) in doc {
        match fields.get(k) {
            None => return Err(config_error(format!("config: unknown parameter '{k}'"))),
            Some(Value::Null) => {
                fields.insert(k.clone(), v.clone());
            }
            Some(_) => {}
        }
    }
    serde_json::from_value(merged).map_err(|e| config_error(format!("config: {e}")))
}

pub fn required<T>(v: Option<T>, flag: &str) -> Result<T, Failure> {
    v.ok_or_else(|| config_error(format!("missing required parameter --{flag}")))
}

/// "name:k=v,…", with "const:C" read as "const:c=C".
fn params(spec: &str) -> Result<(String, BTreeMap<String, f64>), Failure> {
    match spec.trim().split_once(':') {
        Some(("const", v)) if !v.contains('=') => Ok(parse_id(&format!("const:c={v}"))?),
        _ => Ok(parse_id(spec)?),
    }
}

fn reject_extra(name: &str, p: &BTreeMap<String, f64>, allowed: &[&str]) -> Result<(), Failure> {
    match p.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(config_error(format!("'{name}' does not take parameter {k}"))),
        None => Ok(()),
    }
}

/// A Young function given either as a scalar catalog id (radial in n dimensions), a
/// split shorthand "split:ID;ID;…", a JSON spec, or a path to a JSON spec.
pub enum PhiInput {
    Scalar(ScalarYoungFunction),
    Aniso(AnisotropicYoungFunction),
}

pub fn parse_phi(s: &str) -> Result<PhiInput, Failure> {
    let s = s.trim();
    if let Some(rest) = s.strip_prefix("split:") {
        let terms = rest.split(';').map(ScalarYoungFunction::from_id).collect::<Result<Vec<_>, _>>()?;
        return Ok(PhiInput::Aniso(AnisotropicYoungFunction::split(terms)?));
    }
    let json = if s.starts_with('{') {
        Some(s.to_string())
    } else if s.ends_with(".json") {
        Some(std::fs::read_to_string(s).map_err(|e| Failure::Io(format!("{s}: {e}")))?)
    } else {
        None
    };
    match json {
        Some(text) => {
            let spec: AnisoSpec =
                serde_json::from_str(&text).map_err(|e| config_error(format!("Φ spec: {e}")))?;
            Ok(PhiInput::Aniso(AnisotropicYoungFunction::from_spec(&spec)?))
        }
        None => Ok(PhiInput::Scalar(ScalarYoungFunction::from_id(s)?)),
    }
}

impl PhiInput {
    pub fn to_aniso(&self, n: usize) -> Result<AnisotropicYoungFunction, Failure> {
        match self {
            PhiInput::Scalar(a) => Ok(AnisotropicYoungFunction::radial(n, a.clone())?),
            PhiInput::Aniso(phi) if phi.n() == n => Ok(phi.clone()),
            PhiInput::Aniso(phi) => {
                Err(config_error(format!("Φ is {}-dimensional but n = {n} was requested", phi.n())))
            }
        }
    }

    pub fn dimension(&self, n: Option<usize>) -> usize {
        match self {
            PhiInput::Aniso(phi) => phi.n(),
            PhiInput::Scalar(_) => n.unwrap_or(2),
        }
    }

    /// Φ∘: the generator for radial input, the log-domain planar form for planar split
    /// frames, cubature otherwise.
    pub fn phi_circ(&self, n: usize, seed: u64) -> Result<ScalarYoungFunction, Failure> {
        let phi = match self {
            PhiInput::Scalar(a) => return Ok(a.clone()),
            PhiInput::Aniso(phi) => phi,
        };
        phi_circ_of(phi, n, seed)
    }
}

pub fn phi_circ_of(phi: &AnisotropicYoungFunction, n: usize, seed: u64) -> Result<ScalarYoungFunction, Failure> {
    if let AnisoForm::Radial(a) = phi.form() {
        return Ok(a.clone());
    }
    if n == 2 {
        if let Ok(f) = phi_circ_planar(phi, -23.0, 2e5) {
            return Ok(f);
        }
    }
    let ladder = LevelLadder { lo: 1e-2, hi: 1e100, count: 409 };
    let opts = MeasureOptions { seed, ..Default::default() };
    Ok(phi_circ(phi, &ladder, &opts)?.function)
}

/// For a power-type potential P the coercivity a(ξ)·ξ ≥ Φ(ξ) holds with Φ(t) = tP'(t);
/// any other convex potential uses Φ = P.
pub fn coercivity_of(potential: &AnisotropicYoungFunction) -> Result<AnisotropicYoungFunction, Failure> {
    let sharpen = |a: &ScalarYoungFunction| match a.form() {
        Form::Power { p, c } => ScalarYoungFunction::power_scaled(*p, c * p).map(Some),
        _ => Ok(None),
    };
    Ok(match potential.form() {
        AnisoForm::Radial(a) => match sharpen(a)? {
            Some(s) => AnisotropicYoungFunction::radial(potential.n(), s)?,
            None => potential.clone(),
        },
        AnisoForm::Split(terms) => {
            let sharp = terms.iter().map(sharpen).collect::<Result<Option<Vec<_>>, _>>()?;
            match sharp {
                Some(s) => AnisotropicYoungFunction::split(s)?,
                None => potential.clone(),
            }
        }
        _ => potential.clone(),
    })
}

/// |Ω| as a number or "pi".
pub fn parse_measure(s: &str) -> Result<f64, Failure> {
    let v = match s.trim() {
        "pi" | "π" => std::f64::consts::PI,
        t => t.parse().map_err(|_| config_error(format!("measure '{t}' is neither a number nor 'pi'")))?,
    };
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(config_error("the measure must be positive"))
    }
}

/// Rearranged datum: "const:C" or "power:c=C,a=A" for C·s^{−A}.
pub fn parse_rearranged(s: &str, measure: f64) -> Result<RearrangedFunction, Failure> {
    let (name, p) = params(s)?;
    match name.as_str() {
        "const" => {
            reject_extra(&name, &p, &["c"])?;
            Ok(RearrangedFunction::constant(p.get("c").copied().unwrap_or(1.0), measure)?)
        }
        "power" => {
            reject_extra(&name, &p, &["c", "a"])?;
            let a = *p.get("a").ok_or_else(|| config_error("power datum needs a"))?;
            Ok(RearrangedFunction::power_law(p.get("c").copied().unwrap_or(1.0), a, measure)?)
        }
        other => Err(config_error(format!("unknown datum '{other}'; expected const or power"))),
    }
}

/// Grid datum on the unit square.
pub enum GridDatum {
    Field(GridField),
    PointMass { x0: [f64; 2], mass: f64 },
}

/// "const:C", "singular:x0=…,y0=…" for |x − x₀|^{−3/2}, or "point:x0=…,y0=…,mass=…".
pub fn parse_grid_datum(s: &str, nodes: usize) -> Result<GridDatum, Failure> {
    let (name, p) = params(s)?;
    let x0 = [p.get("x0").copied().unwrap_or(0.5), p.get("y0").copied().unwrap_or(0.5)];
    if !x0.iter().all(|x| (0.0..=1.0).contains(x)) {
        return Err(config_error("the source point must lie in the unit square"));
    }
    match name.as_str() {
        "const" => {
            let c = parse_rearranged(s, 1.0)?.values()[0];
            Ok(GridDatum::Field(GridField::from_fn(nodes, |_, _| c)))
        }
        "singular" => {
            reject_extra(&name, &p, &["x0", "y0"])?;
            Ok(GridDatum::Field(singular_source(nodes, x0)))
        }
        "point" => {
            reject_extra(&name, &p, &["x0", "y0", "mass"])?;
            Ok(GridDatum::PointMass { x0, mass: p.get("mass").copied().unwrap_or(1.0) })
        }
        other => Err(config_error(format!("unknown datum '{other}'; expected const, singular or point"))),
    }
}

impl GridDatum {
    /// The datum itself; a point mass becomes a tent of half-width 2h.
    pub fn field(&self, nodes: usize) -> GridField {
        match self {
            GridDatum::Field(f) => f.clone(),
            GridDatum::PointMass { x0, mass } => tent_mass(nodes, *x0, *mass, 2.0 / (nodes - 1) as f64),
        }
    }
}
