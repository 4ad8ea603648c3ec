use crate::input::{
    coercivity_of, parse_grid_datum, parse_measure, parse_phi, parse_rearranged, required, GridDatum, PhiInput,
};
use crate::output::{config_error, num, Failure, Outcome, Sink};
use anisoreg::anisotropic::{phi_circ, LevelLadder, MeasureOptions};
use anisoreg::catalog::{verify_example, ExampleId, ExampleParams, ExampleRecord, Outcome as Verdict};
use anisoreg::fit::linear_slope;
use anisoreg::grid::{
    approximable_sequence, diagonal_log_fit, dyadic_ladder, solve, truncation_energy_check, GridField,
    OperatorSpec, SequenceData, SolveOptions,
};
use anisoreg::rearrangement::{data_admissibility, default_lambda_ladder, Admissibility};
use anisoreg::report::{comparison_check, regularity_report};
use anisoreg::sobolev::{classify_integral, sobolev_conjugate, Dichotomy, LogCurveFn, SobolevOptions};
use anisoreg::symmetrized::{linf_bound, marcinkiewicz_quasinorm, solve_radial_with, RADIAL_NODES};
use anisoreg::young::{conjugation_audit, flux_of, GrowthCondition};
use anisoreg::ScalarYoungFunction;
use clap::Args;
use serde::{Deserialize, Serialize};
use serde_json::json;

/// Options shared by every subcommand.
pub struct Context {
    pub seed: u64,
    pub sink: Sink,
}

fn or_nan(r: anisoreg::Result<f64>) -> f64 {
    r.unwrap_or(f64::NAN)
}

#[derive(Args, Serialize, Deserialize, Debug, Default)]
#[serde(rename_all = "kebab-case")]
pub struct ConjugateArgs {
    /// Young function id, e.g. power:p=3 or power_log:p=2,alpha=1,c=7.4
    #[arg(long = "A")]
    #[serde(rename = "A")]
    pub a: Option<String>,
    /// table range [default: 1e-2 .. 1e4]
    #[arg(long)]
    pub t_min: Option<f64>,
    #[arg(long)]
    pub t_max: Option<f64>,
    /// table rows per decade [default: 8]
    #[arg(long)]
    pub per_decade: Option<usize>,
    /// side of the Young's-inequality probe grid [default: 100]
    #[arg(long)]
    pub young_grid: Option<usize>,
}

pub fn conjugate(args: ConjugateArgs, ctx: &mut Context) -> Result<Outcome, Failure> {
    let a = ScalarYoungFunction::from_id(&required(args.a, "A")?)?;
    let (lo, hi) = (args.t_min.unwrap_or(1e-2), args.t_max.unwrap_or(1e4));
    if !(lo > 0.0 && hi > lo) {
        return Err(config_error("need 0 < t-min < t-max"));
    }
    let per = args.per_decade.unwrap_or(8).max(1) as f64;
    let conj = a.conjugate()?;
    let (l0, l1) = (lo.log10(), hi.log10());
    let rows = ((l1 - l0) * per).floor() as usize;
    let table = (0..=rows).map(|i| {
        let t = 10f64.powf(l0 + i as f64 / per);
        let (ai, ci) = (or_nan(a.inverse(t)), or_nan(conj.inverse(t)));
        vec![t, a.value(t), conj.value(t), ai, ci, ai * ci / t]
    });
    ctx.sink.table("conjugate.csv", &["t", "A", "A_conj", "A_inv", "A_conj_inv", "inverse_product_over_t"], table)?;
    let audit = conjugation_audit(&a, lo, hi, 200, args.young_grid.unwrap_or(100))?;
    let pass = audit.pass();
    Outcome::new(
        json!({
            "function": a.id(),
            "conjugate": conj.id(),
            "audit": audit,
            "delta2": a.check_growth_condition(GrowthCondition::Delta2),
            "nabla2": a.check_growth_condition(GrowthCondition::Nabla2),
        }),
        pass,
    )
}

#[derive(Args, Serialize, Deserialize, Debug, Default)]
#[serde(rename_all = "kebab-case")]
pub struct PhiCircArgs {
    /// Φ as a JSON spec, a path to one, split:ID;ID, or a scalar id (radial)
    #[arg(long)]
    pub phi: Option<String>,
    /// dimension for a scalar id [default: 2]
    #[arg(long)]
    pub n: Option<usize>,
    /// level ladder [default: 1e-2 .. 1e6, 97 levels]
    #[arg(long)]
    pub level_min: Option<f64>,
    #[arg(long)]
    pub level_max: Option<f64>,
    #[arg(long)]
    pub levels: Option<usize>,
    /// lower end of the exponent fit window [default: 1e2]
    #[arg(long)]
    pub fit_min: Option<f64>,
}

pub fn phicirc(args: PhiCircArgs, ctx: &mut Context) -> Result<Outcome, Failure> {
    let input = parse_phi(&required(args.phi, "phi")?)?;
    let n = input.dimension(args.n);
    let phi = input.to_aniso(n)?;
    let ladder = LevelLadder {
        lo: args.level_min.unwrap_or(1e-2),
        hi: args.level_max.unwrap_or(1e6),
        count: args.levels.unwrap_or(97),
    };
    let opts = MeasureOptions { seed: ctx.seed, ..Default::default() };
    let pc = phi_circ(&phi, &ladder, &opts)?;
    let rows = (0..pc.levels.len()).map(|i| vec![pc.levels[i], pc.radii[i], pc.std_errors[i]]);
    ctx.sink.table("phi_circ.csv", &["level", "radius", "measure_std_error"], rows)?;
    let fit_min = args.fit_min.unwrap_or(1e2);
    let (xs, ys): (Vec<f64>, Vec<f64>) =
        pc.levels.iter().zip(&pc.radii).filter(|(l, _)| **l >= fit_min).map(|(l, r)| (r.ln(), l.ln())).unzip();
    let exponent = if xs.len() >= 3 { Some(linear_slope(&xs, &ys)?.0) } else { None };
    Outcome::new(
        json!({
            "phi": phi.id(),
            "n": n,
            "levels_kept": pc.levels.len(),
            "hull_dropped": pc.hull_dropped,
            "fit_window": [fit_min, ladder.hi],
            "fitted_exponent": exponent,
        }),
        true,
    )
}

#[derive(Args, Serialize, Deserialize, Debug, Default)]
#[serde(rename_all = "kebab-case")]
pub struct EmbeddingArgs {
    /// Φ as for phicirc; a scalar id is taken as Φ∘ itself
    #[arg(long)]
    pub phi: Option<String>,
    /// dimension [default: 2, or the dimension of a JSON spec]
    #[arg(long)]
    pub n: Option<usize>,
    /// table rows [default: 256]
    #[arg(long)]
    pub rows: Option<usize>,
}

/// Mean log-slope over the top decade of the curve's abscissa range.
fn top_slope(c: &LogCurveFn) -> f64 {
    let (a, b) = c.ln_range();
    let lo = (b - std::f64::consts::LN_10).max(a);
    (c.ln_eval(b) - c.ln_eval(lo)) / (b - lo)
}

pub fn embedding(args: EmbeddingArgs, ctx: &mut Context) -> Result<Outcome, Failure> {
    let input = parse_phi(&required(args.phi, "phi")?)?;
    let n = input.dimension(args.n);
    let pc = input.phi_circ(n, ctx.seed)?;
    let dichotomy = classify_integral(&pc, n)?;
    if dichotomy.verdict == Dichotomy::Convergent {
        return Outcome::new(json!({ "phi_circ": pc.id(), "n": n, "dichotomy": dichotomy }), true);
    }
    let profile = sobolev_conjugate(&pc, n, &SobolevOptions::default())?;
    let rows = profile.table(args.rows.unwrap_or(256)).into_iter().map(|r| r.to_vec());
    ctx.sink.table(
        "embedding.csv",
        &["ln_t", "ln_H", "ln_Phi_n", "ln_Phi_circ_hat", "ln_vartheta_n", "ln_varrho_n"],
        rows,
    )?;
    Outcome::new(
        json!({
            "phi_circ": pc.id(),
            "n": n,
            "dichotomy": profile.dichotomy,
            "modification": profile.modification,
            "top_decade_slopes": {
                "Phi_n": top_slope(&profile.phi_n),
                "vartheta_n": top_slope(&profile.vartheta),
                "varrho_n": top_slope(&profile.varrho),
            },
        }),
        true,
    )
}

#[derive(Args, Serialize, Deserialize, Debug, Default)]
#[serde(rename_all = "kebab-case")]
pub struct SymmetrizeArgs {
    /// radial potential A; the symmetrized operator has flux A'(|∇v|)
    #[arg(long)]
    pub phi: Option<String>,
    /// dimension [default: 2]
    #[arg(long)]
    pub n: Option<usize>,
    /// rearranged datum: const:C or power:c=C,a=A for C·s^(-A) [default: const:1]
    #[arg(long)]
    pub f: Option<String>,
    /// |Ω| as a number or pi [default: pi]
    #[arg(long)]
    pub omega: Option<String>,
    /// radial nodes [default: 4096]
    #[arg(long)]
    pub nodes: Option<usize>,
}

pub fn symmetrize_solve(args: SymmetrizeArgs, ctx: &mut Context) -> Result<Outcome, Failure> {
    let a = ScalarYoungFunction::from_id(&required(args.phi, "phi")?)?;
    let n = args.n.unwrap_or(2);
    let measure = parse_measure(args.omega.as_deref().unwrap_or("pi"))?;
    let f = parse_rearranged(args.f.as_deref().unwrap_or("const:1"), measure)?;
    let psi = flux_of(&a)?;
    let sol = solve_radial_with(&psi, &f, n, args.nodes.unwrap_or(RADIAL_NODES))?;
    let bound = linf_bound(&f, &psi, n)?;
    ctx.sink.table("radial.csv", &["r", "v", "grad_v"], sol.rows().map(|r| r.to_vec()))?;
    let gap = (bound.value - sol.sup()).abs();
    let v_monotone = sol.v.windows(2).all(|w| w[1] <= w[0]);
    let g_monotone = sol.g.windows(2).all(|w| w[1] >= w[0]);
    let pass = bound.finite && gap <= 1e-10 * sol.sup().max(1.0) && v_monotone && g_monotone;
    Outcome::new(
        json!({
            "potential": a.id(),
            "n": n,
            "measure": measure,
            "radius": sol.radius,
            "v0": sol.sup(),
            "linf_bound": bound,
            "bound_gap": gap,
            "v_nonincreasing": v_monotone,
            "gradient_nondecreasing": g_monotone,
        }),
        pass,
    )
}

#[derive(Args, Serialize, Deserialize, Debug, Default)]
#[serde(rename_all = "kebab-case")]
pub struct GridArgs {
    /// potential P of a = ∇P, as for phicirc (planar)
    #[arg(long)]
    pub phi: Option<String>,
    /// const:C, singular:x0=…,y0=… or point:x0=…,y0=…,mass=… [default: const:1]
    #[arg(long)]
    pub f: Option<String>,
    /// nodes per side [default: 129]
    #[arg(long)]
    pub nodes: Option<usize>,
    /// regularization ε [default: 0]
    #[arg(long)]
    pub eps: Option<f64>,
    /// regularization exponent q > 2 [default: 4]
    #[arg(long)]
    pub q: Option<f64>,
    /// energy-gradient tolerance [default: 1e-9·‖f‖₁]
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
}

struct Problem {
    spec: OperatorSpec,
    input: PhiInput,
    datum: GridDatum,
    nodes: usize,
    opts: SolveOptions,
}

fn problem(args: &GridArgs) -> Result<Problem, Failure> {
    let input = parse_phi(args.phi.as_deref().ok_or_else(|| config_error("missing required parameter --phi"))?)?;
    let potential = input.to_aniso(2)?;
    let coercivity = coercivity_of(&potential)?;
    let mut spec = OperatorSpec::new(potential, coercivity);
    if let Some(eps) = args.eps.filter(|e| *e > 0.0) {
        spec = spec.regularized(eps, args.q.unwrap_or(4.0));
    }
    let nodes = args.nodes.unwrap_or(129);
    if nodes < 5 {
        return Err(config_error("need at least 5 nodes per side"));
    }
    spec.validate(nodes)?;
    let datum = parse_grid_datum(args.f.as_deref().unwrap_or("const:1"), nodes)?;
    let mut opts = SolveOptions { tol: args.tol, ..Default::default() };
    if let Some(m) = args.max_iter {
        opts.max_iter = m;
    }
    Ok(Problem { spec, input, datum, nodes, opts })
}

fn field_rows(u: &GridField) -> impl Iterator<Item = Vec<f64>> + '_ {
    let n = u.nodes();
    let h = u.h();
    (0..n * n).map(move |k| vec![(k % n) as f64 * h, (k / n) as f64 * h, u.values()[k]])
}

pub fn grid_solve(args: GridArgs, ctx: &mut Context) -> Result<Outcome, Failure> {
    let pb = problem(&args)?;
    let f = pb.datum.field(pb.nodes);
    let (u, rep) = solve(&pb.spec, &f, &pb.opts)?;
    ctx.sink.table("field.csv", &["x", "y", "u"], field_rows(&u))?;
    ctx.sink.table(
        "energy.csv",
        &["iteration", "energy"],
        rep.energies.iter().enumerate().map(|(i, e)| vec![i as f64, *e]),
    )?;
    let min = u.values().iter().copied().fold(f64::INFINITY, f64::min);
    let nonnegative_data = f.values().iter().all(|v| *v >= 0.0);
    let max_principle = !nonnegative_data || min >= -1e-12;
    let trunc = truncation_energy_check(&u, &pb.spec.coercivity, f.l1_norm(), 20);
    let pass = rep.energy_monotone() && max_principle && trunc.pass;
    let c = pb.nodes / 2;
    Outcome::new(
        json!({
            "potential": pb.spec.potential.id(),
            "coercivity": pb.spec.coercivity.id(),
            "nodes": pb.nodes,
            "iterations": rep.iterations,
            "residual": rep.residual,
            "tol": rep.tol,
            "energy_monotone": rep.energy_monotone(),
            "final_energy": rep.energies.last(),
            "center_value": u.at(c, c),
            "sup": u.sup_norm(),
            "min": min,
            "maximum_principle": max_principle,
            "truncation": trunc,
        }),
        pass,
    )
}

#[derive(Args, Serialize, Deserialize, Debug, Default)]
#[serde(rename_all = "kebab-case")]
pub struct ApproxArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,
    /// ladder k = 1, 2, …, 2^top [default: 10]
    #[arg(long)]
    pub top: Option<u32>,
    /// deviation threshold τ [default: 1e-3]
    #[arg(long)]
    pub tau: Option<f64>,
}

pub fn approx_seq(args: ApproxArgs, ctx: &mut Context) -> Result<Outcome, Failure> {
    let pb = problem(&args.grid)?;
    let (data, x0) = match &pb.datum {
        GridDatum::Field(f) => (SequenceData::Field(f.clone()), None),
        GridDatum::PointMass { x0, mass } => {
            (SequenceData::PointMass { nodes: pb.nodes, x0: *x0, mass: *mass }, Some(*x0))
        }
    };
    let tau = args.tau.unwrap_or(1e-3);
    let ladder = dyadic_ladder(args.top.unwrap_or(10));
    let (fields, rep) = approximable_sequence(&pb.spec, &data, &ladder, tau, &pb.opts)?;
    let rows = rep.steps.iter().zip(&rep.data_l1).map(|(s, l1)| {
        vec![s.k, s.next_k, *l1, s.sup_difference, s.deviation_measure, s.gradient_deviation_measure]
    });
    ctx.sink.table(
        "sequence.csv",
        &["k", "next_k", "data_l1", "sup_difference", "deviation_measure", "gradient_deviation_measure"],
        rows,
    )?;
    let last = fields.last().expect("nonempty ladder");
    ctx.sink.table("field.csv", &["x", "y", "u"], field_rows(last))?;
    let log_fit = match x0 {
        Some(x0) => Some(diagonal_log_fit(last, x0, 4.0 * last.h(), 0.25)?),
        None => None,
    };
    let pc = pb.input.phi_circ(2, ctx.seed)?;
    let quasinorm = match classify_integral(&pc, 2)?.verdict {
        Dichotomy::Divergent => {
            let profile = sobolev_conjugate(&pc, 2, &SobolevOptions::default())?;
            Some(marcinkiewicz_quasinorm(&last.rearranged()?, &profile.vartheta))
        }
        Dichotomy::Convergent => None,
    };
    Outcome::new(
        json!({
            "nodes": pb.nodes,
            "sequence": rep,
            "diagonal_log_fit": log_fit,
            "vartheta_quasinorm": quasinorm,
        }),
        rep.monotone,
    )
}

#[derive(Args, Serialize, Deserialize, Debug, Default)]
#[serde(rename_all = "kebab-case")]
pub struct RegularityArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,
    /// comparison slack δ in u* ≤ (1+δ)v* [default: 0.05]
    #[arg(long)]
    pub slack: Option<f64>,
}

pub fn regularity(args: RegularityArgs, ctx: &mut Context) -> Result<Outcome, Failure> {
    let pb = problem(&args.grid)?;
    let f = pb.datum.field(pb.nodes);
    let (u, _) = solve(&pb.spec, &f, &pb.opts)?;
    let pc = coercivity_phi_circ(&pb, ctx.seed)?;
    let rep = regularity_report(&pb.spec, &pc, &f, &u)?;
    let cmp = comparison_check(&u, &f, &pc, 19, args.slack.unwrap_or(0.05))?;
    for (name, head, fit) in [("level_u.csv", "t", &rep.level_u), ("level_grad.csv", "s", &rep.level_grad)] {
        if let Some(fit) = fit {
            let bound = fit.check.as_ref().map(|c| c.bound.clone()).unwrap_or_else(|| vec![f64::NAN; fit.probes.len()]);
            let rows = (0..fit.probes.len()).map(|i| vec![fit.probes[i], fit.measured[i], bound[i]]);
            ctx.sink.table(name, &[head, "measured_measure", "bound"], rows)?;
        }
    }
    let rows = (0..cmp.s.len()).map(|i| vec![cmp.s[i], cmp.u_star[i], cmp.v_star[i]]);
    ctx.sink.table("rearrangement.csv", &["s", "u_star", "v_star"], rows)?;
    let pass = rep.pass && cmp.pass;
    Outcome::new(json!({ "phi_circ": pc.id(), "report": rep, "comparison": cmp }), pass)
}

fn coercivity_phi_circ(pb: &Problem, seed: u64) -> Result<ScalarYoungFunction, Failure> {
    crate::input::phi_circ_of(&pb.spec.coercivity, 2, seed)
}

#[derive(Args, Serialize, Deserialize, Debug, Default)]
#[serde(rename_all = "kebab-case")]
pub struct VerifyArgs {
    /// plap, iso_zyg, aniso_plap, aniso_zyg, aniso_trud or aniso_new
    pub id: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// comma-separated per-component exponents
    #[arg(long, value_delimiter = ',')]
    pub p_i: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub alpha_i: Option<Vec<f64>>,
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub c: Option<f64>,
    /// aniso_trud preset 1..4
    #[arg(long)]
    pub regime: Option<usize>,
}

pub fn verify(args: VerifyArgs, ctx: &mut Context) -> Result<Outcome, Failure> {
    let id = ExampleId::parse(&required(args.id, "id")?)?;
    let params = ExampleParams {
        n: args.n,
        p: args.p,
        alpha: args.alpha,
        p_i: args.p_i,
        alpha_i: args.alpha_i,
        q: args.q,
        beta: args.beta,
        c: args.c,
    };
    let record = match args.regime {
        Some(_) if id != ExampleId::AnisoTrud => return Err(config_error("--regime applies to aniso_trud only")),
        Some(_) if params != ExampleParams::default() => {
            return Err(config_error("--regime fixes every parameter; drop the overrides"))
        }
        Some(k) => ExampleRecord::trud_regime(k)?,
        None => ExampleRecord::new(id, &params)?,
    };
    let rep = verify_example(&record)?;
    let rows = rep.checks.iter().map(|c| {
        let kind = serde_json::to_value(c.kind).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
        vec![
            c.quantity.clone(),
            kind,
            num(c.expected),
            num(c.computed),
            num(c.tolerance),
            c.pass.to_string(),
            num(c.window.0),
            num(c.window.1),
        ]
    });
    ctx.sink.csv(
        "checks.csv",
        &["quantity", "kind", "expected", "computed", "tolerance", "pass", "window_lo", "window_hi"],
        rows,
    )?;
    let pass = rep.outcome == Verdict::Pass;
    Outcome::new(json!({ "regime_tag": rep.regime.tag(), "verification": rep }), pass)
}

#[derive(Args, Serialize, Deserialize, Debug, Default)]
#[serde(rename_all = "kebab-case")]
pub struct AdmissibilityArgs {
    /// Φ as for embedding
    #[arg(long)]
    pub phi: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    /// rearranged datum as for symmetrize-solve [default: const:1]
    #[arg(long)]
    pub f: Option<String>,
    /// |Ω| [default: 1]
    #[arg(long)]
    pub omega: Option<String>,
}

pub fn admissibility(args: AdmissibilityArgs, ctx: &mut Context) -> Result<Outcome, Failure> {
    let input = parse_phi(&required(args.phi, "phi")?)?;
    let n = input.dimension(args.n);
    let pc = input.phi_circ(n, ctx.seed)?;
    let measure = parse_measure(args.omega.as_deref().unwrap_or("1"))?;
    let f = parse_rearranged(args.f.as_deref().unwrap_or("const:1"), measure)?;
    let dichotomy = classify_integral(&pc, n)?;
    let conj = pc.conjugate()?;
    let rep = data_admissibility(&f, &conj, dichotomy.verdict, n, &default_lambda_ladder());
    if !rep.modulars.is_empty() {
        let rows = rep.ladder.iter().zip(&rep.modulars).map(|(l, m)| vec![*l, m.unwrap_or(f64::INFINITY)]);
        ctx.sink.table("modular.csv", &["lambda", "modular"], rows)?;
    }
    let admissible = !matches!(rep.verdict, Admissibility::InadmissibleAt { .. });
    Outcome::new(
        json!({
            "phi_circ": pc.id(),
            "n": n,
            "dichotomy": dichotomy.verdict,
            "f_l1": f.integral(),
            "admissible": admissible,
            "report": rep,
        }),
        true,
    )
}
