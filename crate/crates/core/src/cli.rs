//! Command-line interface.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::checker::{belief_counterexamples, check_dp, eval, hlist, sat_table};
use crate::harness::{
    equivalence_suite, necessitation_suite, soundness_suite_with, Family, GenParams, SuiteReport,
};
use crate::model::{EvalPoint, SemanticError, TrustModel};
use crate::proofs::{
    assumptions_from_json, check_derivation, check_proof, Proof, Verdict, TAUTOLOGY_ATOM_CAP,
};
use crate::syntax::{parse, parse_dataset, Dataset, Formula};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_FILE: i32 = 3;
pub const EXIT_SEMANTIC: i32 = 4;
pub const EXIT_FAILURE: i32 = 5;

const EXIT_CODES: &str = "\
Exit codes:
  0  success
  2  formula parse error or invalid command line
  3  model or proof file invalid, or proof rejected
  4  semantic error: unknown world or variable, empty model, cap exceeded,
     non-belief formula given to counterexample
  5  fuzz suite failure, or engines disagree under --engine both";

#[derive(Parser, Debug)]
#[command(name = "datatrust", version, about = "Model and proof checker for belief under trust with public data announcements", after_help = EXIT_CODES)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a formula at a world.
    Check {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long, value_enum, default_value_t = Engine::Dp)]
        engine: Engine,
        /// Print `{"result": .., "engine": ..}`.
        #[arg(long)]
        json: bool,
    },
    /// Show the pair list, the filled table and the verdict.
    Trace {
        #[command(flatten)]
        point: PointArgs,
    },
    /// List the worlds refuting a top-level belief.
    Counterexample {
        #[command(flatten)]
        point: PointArgs,
    },
    /// Check a proof file, or a derivation from assumptions.
    Prove {
        proof: PathBuf,
        /// JSON array of assumption formulas.
        #[arg(long)]
        assumptions: Option<PathBuf>,
    },
    /// Run the randomized property suites.
    Fuzz {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
        /// Add an unsound schema to the soundness suite.
        #[arg(long, hide = true)]
        inject_broken_truth: bool,
    },
    /// Validate a model file and summarize it.
    Validate { model: PathBuf },
}

#[derive(Args, Debug)]
#[command(after_help = EXIT_CODES)]
struct PointArgs {
    model: PathBuf,
    #[arg(long)]
    world: String,
    /// Comma-separated announced variables.
    #[arg(long, default_value = "")]
    announced: String,
    #[arg(long)]
    formula: String,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Engine {
    Oracle,
    Dp,
    Both,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Suite {
    Soundness,
    Equivalence,
    Necessitation,
    All,
}

struct Failed(i32);

type CmdResult = Result<(), Failed>;

fn fail(err: &mut dyn Write, code: i32, msg: impl std::fmt::Display) -> Failed {
    let _ = writeln!(err, "error: {msg}");
    Failed(code)
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    let res = match cli.command {
        Command::Check {
            point,
            engine,
            json,
        } => cmd_check(&point, engine, json, out, err),
        Command::Trace { point } => cmd_trace(&point, out, err),
        Command::Counterexample { point } => cmd_counterexample(&point, out, err),
        Command::Prove { proof, assumptions } => {
            cmd_prove(&proof, assumptions.as_deref(), out, err)
        }
        Command::Fuzz {
            suite,
            trials,
            seed,
            json,
            inject_broken_truth,
        } => cmd_fuzz(suite, trials, seed, json, inject_broken_truth, out, err),
        Command::Validate { model } => cmd_validate(&model, out, err),
    };
    match res {
        Ok(()) => EXIT_OK,
        Err(Failed(code)) => code,
    }
}

fn read(path: &Path, err: &mut dyn Write) -> Result<Vec<u8>, Failed> {
    std::fs::read(path).map_err(|e| fail(err, EXIT_FILE, format!("{}: {e}", path.display())))
}

fn load_model(path: &Path, err: &mut dyn Write) -> Result<TrustModel, Failed> {
    let bytes = read(path, err)?;
    TrustModel::from_json(&bytes)
        .map_err(|e| fail(err, EXIT_FILE, format!("{}: {e}", path.display())))
}

fn semantic(err: &mut dyn Write, e: SemanticError) -> Failed {
    fail(err, EXIT_SEMANTIC, e)
}

struct Inputs {
    model: TrustModel,
    point: EvalPoint,
    formula: Formula,
}

fn inputs(args: &PointArgs, err: &mut dyn Write) -> Result<Inputs, Failed> {
    let formula = parse(&args.formula).map_err(|e| {
        fail(
            err,
            EXIT_PARSE,
            format!("formula: {e} (at byte {})", e.position()),
        )
    })?;
    let announced = parse_dataset(&args.announced)
        .map_err(|e| fail(err, EXIT_PARSE, format!("--announced: {e}")))?;
    let model = load_model(&args.model, err)?;
    Ok(Inputs {
        model,
        point: EvalPoint::new(args.world.clone(), announced),
        formula,
    })
}

fn braces(d: &Dataset) -> String {
    format!("{{{d}}}")
}

fn cmd_check(
    args: &PointArgs,
    engine: Engine,
    json: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CmdResult {
    let Inputs {
        model,
        point,
        formula,
    } = inputs(args, err)?;
    let result = match engine {
        Engine::Oracle => eval(&model, &point, &formula).map_err(|e| semantic(err, e))?,
        Engine::Dp => check_dp(&model, &point, &formula).map_err(|e| semantic(err, e))?,
        Engine::Both => {
            let a = eval(&model, &point, &formula).map_err(|e| semantic(err, e))?;
            let b = check_dp(&model, &point, &formula).map_err(|e| semantic(err, e))?;
            if a != b {
                return Err(fail(
                    err,
                    EXIT_FAILURE,
                    format!("engines disagree: oracle={a} dp={b}"),
                ));
            }
            a
        }
    };
    let engine_name = match engine {
        Engine::Oracle => "oracle",
        Engine::Dp => "dp",
        Engine::Both => "both",
    };
    if json {
        let v = serde_json::json!({ "result": result, "engine": engine_name });
        let _ = writeln!(out, "{v}");
    } else {
        let _ = writeln!(out, "{result}");
    }
    Ok(())
}

fn cmd_trace(args: &PointArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let Inputs {
        model,
        point,
        formula,
    } = inputs(args, err)?;
    let verdict = check_dp(&model, &point, &formula).map_err(|e| semantic(err, e))?;
    let hl = hlist(&point.announced, &formula);
    let table = sat_table(&model, &point.announced, &formula).map_err(|e| semantic(err, e))?;
    let _ = writeln!(out, "pairs: {}", hl.len());
    for (i, e) in hl.iter().enumerate() {
        let _ = writeln!(out, "  {:>3}  {}  {}", i + 1, braces(&e.env), e.formula);
    }
    let _ = writeln!(out, "table: {} rows", model.world_count() * hl.len());
    for (w, i, v) in table.rows() {
        let _ = writeln!(out, "  {w}  {:>3}  {v}", i + 1);
    }
    let _ = writeln!(out, "result: {verdict}");
    Ok(())
}

fn cmd_counterexample(args: &PointArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let Inputs {
        model,
        point,
        formula,
    } = inputs(args, err)?;
    let witnesses =
        belief_counterexamples(&model, &point, &formula).map_err(|e| semantic(err, e))?;
    if witnesses.is_empty() {
        let _ = writeln!(out, "belief holds");
        return Ok(());
    }
    let wi = model
        .world_idx(&point.world)
        .map_err(|e| semantic(err, e))?;
    for w in witnesses {
        let ui = model.world_idx(&w).map_err(|e| semantic(err, e))?;
        let trust = model.trust_set(&w).map_err(|e| semantic(err, e))?;
        let _ = writeln!(
            out,
            "{w}  trusts {}  indistinguishable on {}",
            braces(trust),
            braces(&model.agreeing_variables(wi, ui))
        );
    }
    Ok(())
}

fn cmd_prove(
    path: &Path,
    assumptions: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CmdResult {
    let bytes = read(path, err)?;
    let proof = Proof::from_json(&bytes)
        .map_err(|e| fail(err, EXIT_FILE, format!("{}: {e}", path.display())))?;
    let verdict = match assumptions {
        None => check_proof(&proof),
        Some(ap) => {
            let abytes = read(ap, err)?;
            let a = assumptions_from_json(&abytes)
                .map_err(|e| fail(err, EXIT_FILE, format!("{}: {e}", ap.display())))?;
            check_derivation(&a, &proof)
        }
    };
    match verdict {
        Verdict::Accepted { conclusion } => {
            let _ = writeln!(out, "accepted: {conclusion}");
            Ok(())
        }
        Verdict::Rejected { line, reason } => {
            let _ = writeln!(out, "rejected at line {line}: {reason}");
            Err(Failed(EXIT_FILE))
        }
        Verdict::CapExceeded { line, found } => Err(fail(
            err,
            EXIT_SEMANTIC,
            format!(
                "line {line}: tautology check needs {found} atoms, cap is {TAUTOLOGY_ATOM_CAP}"
            ),
        )),
    }
}

fn cmd_fuzz(
    suite: Suite,
    trials: usize,
    seed: u64,
    json: bool,
    inject_broken_truth: bool,
    out: &mut dyn Write,
    _err: &mut dyn Write,
) -> CmdResult {
    let params = GenParams::with_seed(seed);
    let mut reports: Vec<SuiteReport> = Vec::new();
    if matches!(suite, Suite::Soundness | Suite::All) {
        let mut families = Family::sound();
        if inject_broken_truth {
            families.push(Family::BrokenTruth);
        }
        reports.push(soundness_suite_with(&params, trials, &families));
    }
    if matches!(suite, Suite::Equivalence | Suite::All) {
        reports.push(equivalence_suite(&params, trials));
    }
    if matches!(suite, Suite::Necessitation | Suite::All) {
        reports.push(necessitation_suite(&params, trials));
    }
    if json {
        let v = serde_json::to_string_pretty(&reports).expect("reports serialize");
        let _ = writeln!(out, "{v}");
    } else {
        for r in &reports {
            let _ = writeln!(
                out,
                "{}: {} trials, {} skipped, {} failures, {:.0} ms",
                r.suite,
                r.trials,
                r.skipped,
                r.failures.len(),
                r.wall_time_ms
            );
            for f in &r.failures {
                let shown = f.shrunk.as_ref().unwrap_or(&f.instance);
                let _ = writeln!(
                    out,
                    "  FAIL {} seed {}: `{}` at ({}, {}) expected {} got {}",
                    f.check,
                    f.seed,
                    shown.formula,
                    shown.world,
                    braces(
                        &Dataset::from_names(shown.announced.iter().cloned()).unwrap_or_default()
                    ),
                    shown.expected,
                    shown.got
                );
            }
        }
    }
    if reports.iter().all(SuiteReport::passed) {
        Ok(())
    } else {
        Err(Failed(EXIT_FAILURE))
    }
}

fn plural(n: usize, word: &str) -> String {
    if n == 1 {
        format!("{n} {word}")
    } else {
        format!("{n} {word}s")
    }
}

fn cmd_validate(path: &Path, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let m = load_model(path, err)?;
    let _ = writeln!(
        out,
        "{}, {}",
        plural(m.world_count(), "world"),
        plural(m.variables().len(), "variable")
    );
    for (v, k) in m.block_counts() {
        let _ = writeln!(out, "  {v}: {}", plural(k, "block"));
    }
    Ok(())
}
