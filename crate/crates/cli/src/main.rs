mod commands;
mod input;
mod output;

use clap::{Parser, Subcommand};
use commands::Context;
use input::resolve;
use output::{Failure, Outcome, Sink};
use serde_json::{json, Value};
use std::path::PathBuf;
use std::process::ExitCode;

/// Young-function calculus, symmetrization and regularity checks for anisotropic
/// Dirichlet problems. Exit status: 0 pass, 2 a checked bound or invariant failed,
/// 1 operational error.
#[derive(Parser)]
#[command(name = "anisoreg", version)]
struct Cli {
    /// JSON object supplying any parameter not given on the command line
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// output directory for CSV and JSON artifacts
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// seed for Monte Carlo measure evaluation
    #[arg(long, global = true, default_value_t = 0x5eed)]
    seed: u64,
    /// do not print the report on stdout
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Table of A, its conjugate and inverses, with the conjugation audit
    Conjugate(commands::ConjugateArgs),
    /// Φ∘ on a level ladder
    Phicirc(commands::PhiCircArgs),
    /// Sobolev conjugate profile and integral dichotomy
    Embedding(commands::EmbeddingArgs),
    /// Explicit symmetrized radial solution and its sup bound
    SymmetrizeSolve(commands::SymmetrizeArgs),
    /// Grid solution on the unit square with invariant checks
    GridSolve(commands::GridArgs),
    /// Truncation or mollification ladder with convergence diagnostics
    ApproxSeq(commands::ApproxArgs),
    /// A-priori bounds against a grid solution
    RegularityReport(commands::RegularityArgs),
    /// Catalog example verification
    VerifyExample(commands::VerifyArgs),
    /// Data-class membership of a rearranged datum
    Admissibility(commands::AdmissibilityArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Conjugate(_) => "conjugate",
            Command::Phicirc(_) => "phicirc",
            Command::Embedding(_) => "embedding",
            Command::SymmetrizeSolve(_) => "symmetrize-solve",
            Command::GridSolve(_) => "grid-solve",
            Command::ApproxSeq(_) => "approx-seq",
            Command::RegularityReport(_) => "regularity-report",
            Command::VerifyExample(_) => "verify-example",
            Command::Admissibility(_) => "admissibility",
        }
    }
}

fn load_config(path: &Option<PathBuf>) -> Result<Option<Value>, Failure> {
    let Some(path) = path else { return Ok(None) };
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map(Some)
        .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn dispatch(cli: Cli) -> Result<Outcome, Failure> {
    let config = load_config(&cli.config)?;
    let cfg = config.as_ref();
    let mut ctx = Context { seed: cli.seed, sink: Sink::new(&cli.out)? };
    let name = cli.command.name();
    let outcome = match cli.command {
        Command::Conjugate(a) => commands::conjugate(resolve(a, cfg)?, &mut ctx),
        Command::Phicirc(a) => commands::phicirc(resolve(a, cfg)?, &mut ctx),
        Command::Embedding(a) => commands::embedding(resolve(a, cfg)?, &mut ctx),
        Command::SymmetrizeSolve(a) => commands::symmetrize_solve(resolve(a, cfg)?, &mut ctx),
        Command::GridSolve(a) => commands::grid_solve(resolve(a, cfg)?, &mut ctx),
        Command::ApproxSeq(a) => commands::approx_seq(resolve(a, cfg)?, &mut ctx),
        Command::RegularityReport(a) => commands::regularity(resolve(a, cfg)?, &mut ctx),
        Command::VerifyExample(a) => commands::verify(resolve(a, cfg)?, &mut ctx),
        Command::Admissibility(a) => commands::admissibility(resolve(a, cfg)?, &mut ctx),
    }?;
    let mut artifacts: Vec<String> = ctx.sink.written.iter().map(|p| p.display().to_string()).collect();
    artifacts.push(cli.out.join(format!("{name}.json")).display().to_string());
    let envelope = json!({
        "command": name,
        "verdict": if outcome.pass { "pass" } else { "fail" },
        "seed": cli.seed,
        "artifacts": artifacts,
        "report": outcome.report,
    });
    ctx.sink.json(&format!("{name}.json"), &envelope)?;
    if !cli.quiet {
        println!("{}", serde_json::to_string_pretty(&envelope).expect("serializable"));
    }
    Ok(outcome)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let record = json!({
                "status": "error",
                "command": null,
                "kind": "usage",
                "message": e.render().to_string().trim(),
            });
            eprintln!("{record}");
            return ExitCode::from(1);
        }
    };
    let name = cli.command.name();
    match dispatch(cli) {
        Ok(o) if o.pass => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(2),
        Err(f) => {
            eprintln!("{}", f.record(Some(name)));
            ExitCode::from(1)
        }
    }
}
