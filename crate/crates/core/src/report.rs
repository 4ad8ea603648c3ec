//! Regularity report of a grid solution: the a-priori estimates evaluated against the
//! measured field, with the existence-only constants calibrated on the data.

use crate::anisotropic::{phi_diamond, Theta};
use crate::error::{Error, Result};
use crate::grid::{truncation_energy_check, GridField, OperatorSpec, TruncationCheck};
use crate::rearrangement::rearrange;
use crate::sobolev::{classify_integral, sobolev_conjugate, Dichotomy, SobolevOptions};
use crate::symmetrized::{
    effective_k, gradient_l1_bound, level_set_bound_grad, level_set_bound_u, marcinkiewicz_quasinorm,
    solve_radial, BoundCheck, GradientL1Report, Quasinorm,
};
use crate::young::{psi_of, ScalarYoungFunction};
use serde::Serialize;

/// Probe count of the t- and s-ladders.
pub const LADDER: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelSetFit {
    pub probes: Vec<f64>,
    pub measured: Vec<f64>,
    /// κ₂ for u, c₁ for Φ(∇u); None when no constant in the search bracket works
    pub constant: Option<f64>,
    /// the bound at the calibrated constant
    pub check: Option<BoundCheck>,
    pub quasinorm: Quasinorm,
}

#[derive(Debug, Clone, Serialize)]
pub struct RegularityReport {
    pub nodes: usize,
    pub sup: f64,
    pub f_l1: f64,
    pub dichotomy: Dichotomy,
    pub modification_applied: bool,
    /// K = 2‖f‖₁, plus |Ω| when Φ was modified near zero
    pub k: f64,
    pub truncation: TruncationCheck,
    pub gradient_l1: GradientL1Report,
    /// None in the convergent case, where u is bounded
    pub level_u: Option<LevelSetFit>,
    pub level_grad: Option<LevelSetFit>,
    /// 2(K/κ₂)^{n'}
    pub proof_c1: Option<f64>,
    pub pass: bool,
}

/// t_i = i·top/(m+1), i = 1..m.
fn ladder(top: f64, m: usize) -> Vec<f64> {
    (1..=m).map(|i| top * i as f64 / (m + 1) as f64).collect()
}

/// Report for a solution u of the planar problem with datum f on the unit square;
/// `phi_circ` is Φ∘ of the coercivity function.
pub fn regularity_report(
    spec: &OperatorSpec,
    phi_circ: &ScalarYoungFunction,
    f: &GridField,
    u: &GridField,
) -> Result<RegularityReport> {
    let n = spec.coercivity.n();
    if n != 2 || f.nodes() != u.nodes() {
        return Err(Error::invalid("the report needs a planar solution and datum on the same grid"));
    }
    let measure = 1.0;
    let f_l1 = f.l1_norm();
    let truncation = truncation_energy_check(u, &spec.coercivity, f_l1, LADDER);

    let grads = u.cell_gradients();
    let cell = u.cell_measure();
    let cells = vec![cell; grads.len() / 2];
    let diamond = phi_diamond(phi_circ)?;
    let theta = Theta::new(&spec.coercivity, &diamond.function)?;
    let gradient_l1 = gradient_l1_bound(&theta, &grads, &cells, measure, f_l1, n)?;

    let verdict = classify_integral(phi_circ, n)?.verdict;
    let sup = u.sup_norm();
    let mut report = RegularityReport {
        nodes: u.nodes(),
        sup,
        f_l1,
        dichotomy: verdict,
        modification_applied: false,
        k: 2.0 * f_l1,
        truncation,
        gradient_l1,
        level_u: None,
        level_grad: None,
        proof_c1: None,
        pass: false,
    };
    if verdict == Dichotomy::Divergent {
        let profile = sobolev_conjugate(phi_circ, n, &SobolevOptions::default())?;
        let k = effective_k(2.0 * f_l1, &profile, measure);
        report.k = k;
        report.modification_applied = profile.modification.applied;

        let ts = ladder(sup, LADDER);
        let mu: Vec<f64> = ts.iter().map(|t| u.distribution(*t)).collect();
        let lb = level_set_bound_u(k, 0.0, &profile, 1.0)?;
        let kappa2 = lb.calibrate_kappa2(&ts, &mu);
        let check = kappa2.map(|kap| level_set_bound_u(k, 0.0, &profile, kap).map(|b| b.check(&ts, &mu))).transpose()?;
        let ustar = u.rearranged()?;
        report.level_u = Some(LevelSetFit {
            probes: ts,
            measured: mu,
            constant: kappa2,
            check,
            quasinorm: marcinkiewicz_quasinorm(&ustar, &profile.vartheta),
        });

        let cell_phi: Vec<f64> = grads.chunks(2).map(|xi| spec.coercivity.eval(xi)).collect();
        let smax = cell_phi.iter().copied().fold(0.0, f64::max);
        let ss = ladder(smax, LADDER);
        let mug: Vec<f64> = ss.iter().map(|s| cell_phi.iter().filter(|c| *c > s).count() as f64 * cell).collect();
        let gb = level_set_bound_grad(k, &profile, 1.0)?;
        let c1 = gb.calibrate_c1(&ss, &mug);
        let check = (c1 > 0.0).then(|| level_set_bound_grad(k, &profile, c1).map(|b| b.check(&ss, &mug))).transpose()?;
        let gstar = rearrange(&cell_phi, &cells)?;
        report.level_grad = Some(LevelSetFit {
            probes: ss,
            measured: mug,
            constant: (c1 > 0.0).then_some(c1),
            check,
            quasinorm: marcinkiewicz_quasinorm(&gstar, &profile.varrho),
        });
        report.proof_c1 = kappa2.map(|kap| gb.proof_constant(kap));
    }
    let levels_ok = match (&report.level_u, &report.level_grad) {
        (Some(a), Some(b)) => {
            a.check.as_ref().is_some_and(|c| c.pass) && b.check.as_ref().map_or(true, |c| c.pass)
        }
        _ => true,
    };
    report.pass = report.truncation.pass && report.gradient_l1.pass && levels_ok;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonCheck {
    pub s: Vec<f64>,
    pub u_star: Vec<f64>,
    pub v_star: Vec<f64>,
    /// max u*/v* over the probes
    pub worst_ratio: f64,
    /// max(0, worst_ratio − 1)
    pub margin: f64,
    pub pass: bool,
}

/// u*(s) against v*(s) of the symmetrized problem with data f* and Ψ⋄ = Φ⋄(t)/t, on
/// `probes` equispaced s ∈ [0.05|Ω|, 0.95|Ω|]; passes when u* ≤ (1 + slack)·v*.
pub fn comparison_check(
    u: &GridField,
    f: &GridField,
    phi_circ: &ScalarYoungFunction,
    probes: usize,
    slack: f64,
) -> Result<ComparisonCheck> {
    let diamond = phi_diamond(phi_circ)?;
    let psi = psi_of(&diamond.function)?;
    let v = solve_radial(&psi, &f.rearranged()?, 2)?;
    let us = u.rearranged()?;
    let s: Vec<f64> = (0..probes).map(|k| 0.05 + 0.9 * k as f64 / (probes.max(2) - 1) as f64).collect();
    let u_star: Vec<f64> = s.iter().map(|x| us.eval(*x)).collect();
    let v_star: Vec<f64> = s.iter().map(|x| v.v_star(*x)).collect();
    let worst_ratio = u_star.iter().zip(&v_star).map(|(a, b)| a / b).fold(0.0, f64::max);
    Ok(ComparisonCheck {
        s,
        u_star,
        v_star,
        worst_ratio,
        margin: (worst_ratio - 1.0).max(0.0),
        pass: worst_ratio <= 1.0 + slack,
    })
}
