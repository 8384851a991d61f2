//! `maxent`: maximum relative entropy updating from the command line.
//!
//! Exit statuses: 0 success, 2 infeasible constraints, 3 usage, parse,
//! validation or I/O errors, 4 solver non-convergence.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use maxent_core::axioms::{
    check_axiom4_full, check_axiom4a, check_axiom4b, random_cell_info_case, random_partition_case,
    AxiomReport,
};
use maxent_core::coherence::audit_admissibility;
use maxent_core::comparison::{divergence_curve, uniform_grid};
use maxent_core::demos::{run_demo, Demo};
use maxent_core::report::{emit_queries, emit_report, fmt_info, fmt_num, Report};
use maxent_core::scenario::{parse, Scenario, ScenarioError};
use maxent_core::{
    entropy, kl_divergence, maxent_update, relative_entropy, Error, SolverOptions,
    UpdateReport, Units,
};

const EXIT_INFEASIBLE: u8 = 2;
const EXIT_INVALID: u8 = 3;
const EXIT_NON_CONVERGENCE: u8 = 4;

/// Tolerance used by the axiom checks.
const AXIOM_TOL: f64 = 1e-8;

#[derive(Debug, Parser)]
#[command(name = "maxent", version, about = "Maximum relative entropy belief updating")]
struct Cli {
    /// Constraint residual tolerance for the solver.
    #[arg(long, global = true, default_value_t = 1e-10, value_parser = positive_f64)]
    tol: f64,
    /// Newton iteration cap for the solver.
    #[arg(long, global = true, default_value_t = 200, value_parser = clap::value_parser!(u64).range(1..))]
    max_iter: u64,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Units for information values.
    #[arg(long, global = true, value_enum, default_value_t = UnitsArg::Nats)]
    units: UnitsArg,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum UnitsArg {
    Nats,
    Bits,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DemoArg {
    Die,
    Tiger,
    Coin,
    Mycin,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Update a scenario's prior on its constraints.
    Update { scenario: PathBuf },
    /// Information measures of a scenario's prior and posterior.
    Info { scenario: PathBuf },
    /// Quadratic-loss admissibility audit of a scenario's forecasts.
    Audit { scenario: PathBuf },
    /// Randomized partition-consistency checks.
    Axioms {
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        /// Largest sample space drawn.
        #[arg(long, default_value_t = 12, value_parser = clap::value_parser!(u64).range(2..=64))]
        n_max: u64,
    },
    /// Certainty-factor versus Jeffrey posterior across evidence certainty.
    Compare {
        #[arg(value_parser = unit_f64)]
        p_h_given_e: f64,
        #[arg(value_parser = unit_f64)]
        p_h_given_not_e: f64,
        #[arg(long, default_value_t = 11, value_parser = clap::value_parser!(u64).range(2..=1_000_000))]
        grid_steps: u64,
    },
    /// Built-in worked examples.
    Demo {
        #[arg(value_enum)]
        name: DemoArg,
    },
}

fn positive_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
        _ => Err(format!("`{s}` is not a positive finite number")),
    }
}

fn unit_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if (0.0..=1.0).contains(&v) => Ok(v),
        _ => Err(format!("`{s}` is not a number in [0, 1]")),
    }
}

/// A failed command: text for standard output (if any), a diagnostic for
/// standard error, and the exit status.
struct Failure {
    report: Option<String>,
    message: String,
    code: u8,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Infeasible(_) | Error::DegenerateConditional { .. } => EXIT_INFEASIBLE,
            Error::NonConvergence { .. } => EXIT_NON_CONVERGENCE,
            _ => EXIT_INVALID,
        };
        let report = match &e {
            Error::Infeasible(c) => Some(emit_report(&Report::Infeasible(c), Units::Nats)),
            _ => None,
        };
        Failure {
            report,
            message: e.to_string(),
            code,
        }
    }
}

impl From<ScenarioError> for Failure {
    fn from(e: ScenarioError) -> Self {
        Failure {
            report: None,
            message: e.to_string(),
            code: EXIT_INVALID,
        }
    }
}

fn invalid(message: String) -> Failure {
    Failure {
        report: None,
        message,
        code: EXIT_INVALID,
    }
}

struct Ctx {
    opts: SolverOptions<f64>,
    seed: u64,
    units: Units,
}

fn load(path: &Path) -> Result<Scenario, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
    Ok(parse(&text)?)
}

fn update(sc: &Scenario, ctx: &Ctx) -> Result<UpdateReport<f64>, Failure> {
    Ok(maxent_update(&sc.prior, &sc.constraints, &ctx.opts)?)
}

fn cmd_update(path: &Path, ctx: &Ctx) -> Result<String, Failure> {
    let sc = load(path)?;
    let r = update(&sc, ctx)?;
    let mut out = emit_report(&Report::Update(&r), ctx.units);
    out.push_str(&emit_queries(&sc, Some(&r.posterior), ctx.units)?);
    Ok(out)
}

fn cmd_info(path: &Path, ctx: &Ctx) -> Result<String, Failure> {
    let sc = load(path)?;
    let mut out = String::new();
    let _ = writeln!(out, "entropy[prior] = {}", fmt_info(entropy(&sc.prior), ctx.units));
    let posterior = if !sc.constraints.is_empty() {
        let r = update(&sc, ctx)?;
        let post = r.posterior;
        let _ = writeln!(out, "method: {}", r.method);
        let _ = writeln!(out, "entropy[posterior] = {}", fmt_info(entropy(&post), ctx.units));
        let _ = writeln!(
            out,
            "relative_entropy = {}",
            fmt_info(relative_entropy(&post, &sc.prior)?, ctx.units)
        );
        let _ = writeln!(
            out,
            "kl_divergence = {}",
            fmt_info(kl_divergence(&post, &sc.prior)?, ctx.units)
        );
        Some(post)
    } else {
        None
    };
    out.push_str(&emit_queries(&sc, posterior.as_ref(), ctx.units)?);
    Ok(out)
}

fn cmd_audit(path: &Path, ctx: &Ctx) -> Result<String, Failure> {
    let sc = load(path)?;
    let fs = sc
        .forecasts
        .as_ref()
        .ok_or_else(|| invalid(format!("{} has no \"forecasts\" to audit", path.display())))?;
    let verdict = audit_admissibility(fs);
    Ok(emit_report(
        &Report::Verdict {
            system: fs,
            verdict: &verdict,
        },
        ctx.units,
    ))
}

fn summarize(out: &mut String, name: &str, results: &[Result<AxiomReport<f64>, Error>]) {
    let passed = results.iter().filter(|r| matches!(r, Ok(r) if r.passed)).count();
    let worst = results
        .iter()
        .filter_map(|r| r.as_ref().ok())
        .map(|r| r.max_deviation)
        .fold(0.0, f64::max);
    let bound = if passed == results.len() {
        format!("max_deviation ≤ {AXIOM_TOL:e}")
    } else {
        format!("max_deviation {} > {AXIOM_TOL:e}", fmt_num(worst))
    };
    let _ = writeln!(out, "{name}: {passed}/{} passed, {bound}", results.len());
    let _ = writeln!(out, "{name}: observed max_deviation {}", fmt_num(worst));
    for (t, r) in results.iter().enumerate() {
        match r {
            Ok(r) if r.passed => {}
            Ok(r) => {
                let _ = writeln!(out, "{name}: trial {t} failed, deviation {}", fmt_num(r.max_deviation));
            }
            Err(e) => {
                let _ = writeln!(out, "{name}: trial {t} error: {e}");
            }
        }
    }
}

fn cmd_axioms(trials: u64, n_max: usize, ctx: &Ctx) -> String {
    let seed = ctx.seed;
    let opts = ctx.opts;
    let partition_trials: Vec<(Result<_, Error>, Result<_, Error>)> = (0..trials)
        .into_par_iter()
        .map(|t| match random_partition_case::<f64>(seed, t, n_max) {
            Ok((prior, m)) => (
                check_axiom4b(&prior, &m, AXIOM_TOL, seed),
                check_axiom4a(&prior, &m, AXIOM_TOL, &opts),
            ),
            Err(e) => (Err(e.clone()), Err(e)),
        })
        .collect();
    let full: Vec<Result<AxiomReport<f64>, Error>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let (prior, m, infos) = random_cell_info_case::<f64>(seed, t, n_max)?;
            check_axiom4_full(&prior, &m, &infos, AXIOM_TOL, &opts)
        })
        .collect();
    let (b, a): (Vec<_>, Vec<_>) = partition_trials.into_iter().unzip();
    let mut out = String::new();
    summarize(&mut out, "axiom4b", &b);
    summarize(&mut out, "axiom4a", &a);
    summarize(&mut out, "axiom4", &full);
    let _ = writeln!(out, "seed: {seed}");
    out
}

fn cmd_compare(a: f64, b: f64, steps: usize, ctx: &Ctx) -> Result<String, Failure> {
    let grid = uniform_grid::<f64>(steps)?;
    let points = divergence_curve(a, b, &grid)?;
    Ok(emit_report(
        &Report::Divergence {
            p_h_given_e: a,
            p_h_given_not_e: b,
            points: &points,
        },
        ctx.units,
    ))
}

fn run(cli: Cli) -> Result<String, Failure> {
    let ctx = Ctx {
        opts: SolverOptions {
            tol: cli.tol,
            max_iter: cli.max_iter as usize,
            ..SolverOptions::default()
        },
        seed: cli.seed,
        units: match cli.units {
            UnitsArg::Nats => Units::Nats,
            UnitsArg::Bits => Units::Bits,
        },
    };
    match cli.command {
        Command::Update { scenario } => cmd_update(&scenario, &ctx),
        Command::Info { scenario } => cmd_info(&scenario, &ctx),
        Command::Audit { scenario } => cmd_audit(&scenario, &ctx),
        Command::Axioms { trials, n_max } => Ok(cmd_axioms(trials, n_max as usize, &ctx)),
        Command::Compare {
            p_h_given_e,
            p_h_given_not_e,
            grid_steps,
        } => cmd_compare(p_h_given_e, p_h_given_not_e, grid_steps as usize, &ctx),
        Command::Demo { name } => {
            let demo = match name {
                DemoArg::Die => Demo::Die,
                DemoArg::Tiger => Demo::Tiger,
                DemoArg::Coin => Demo::Coin,
                DemoArg::Mycin => Demo::Mycin,
            };
            Ok(run_demo(demo, &ctx.opts, ctx.units)?)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_INVALID)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            if let Some(report) = f.report {
                print!("{report}");
            }
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
