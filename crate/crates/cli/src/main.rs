//! `xorquery`: generate query matrices, simulate recovery schemes, sweep
//! parameters, and run the canned verification suites.
//!
//! Exit codes: 0 success, 2 configuration error, 3 I/O error, 4 a verdict
//! FAILed, 5 a verdict was INCONCLUSIVE.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use xorquery_core::config::{
    ensemble_from_config, experiment_from_config, FlatConfig,
};
use xorquery_core::error::Error;
use xorquery_core::gf2::matrix_to_text;
use xorquery_core::harness::{
    compare_to_bound, emit_csv, point_outcomes, run_experiment, Direction, RateCi, Verdict,
};
use xorquery_core::schemes::{row_weight_bound, TrialOutcome};
use xorquery_core::verify::{run_verify, VerifyTarget};

const EXIT_CONFIG: u8 = 2;
const EXIT_IO: u8 = 3;
const EXIT_FAIL: u8 = 4;
const EXIT_INCONCLUSIVE: u8 = 5;

#[derive(Parser)]
#[command(name = "xorquery", version, about = "XOR-query classification simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// Path to a flat key=value config file.
    #[arg(short = 'c', long = "config")]
    config: PathBuf,
    /// key=value overrides applied on top of the file (repeatable).
    #[arg(short = 's', long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a query matrix and write it in the sparse text format.
    GenMatrix {
        #[command(flatten)]
        config: ConfigArgs,
        /// Output path for the matrix.
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
    },
    /// Run a single-point experiment and write the aggregated CSV.
    Simulate {
        #[command(flatten)]
        config: ConfigArgs,
        /// Output path for the sweep CSV.
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
        /// Also write one CSV row per trial to this path.
        #[arg(long = "trial-csv")]
        trial_csv: Option<PathBuf>,
    },
    /// Run a multi-point sweep and write the aggregated CSV.
    Sweep {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
    },
    /// Run a canned verification suite: prop1, prop2, prop3, prop4-lemma1,
    /// or thm1.
    Verify {
        target: String,
        /// key=value overrides applied on top of the pinned parameters.
        #[arg(short = 's', long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        /// Optional path for the underlying sweep CSV.
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    configure_threads();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

/// XORQUERY_THREADS caps harness parallelism; 0 or unset means automatic.
fn configure_threads() {
    if let Ok(value) = std::env::var("XORQUERY_THREADS") {
        match value.parse::<usize>() {
            Ok(0) => {}
            Ok(n) => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            Err(_) => eprintln!("warning: ignoring bad XORQUERY_THREADS={value:?}"),
        }
    }
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Io(_) => EXIT_IO,
        _ => EXIT_CONFIG,
    }
}

fn load_config(args: &ConfigArgs) -> Result<FlatConfig, Error> {
    let text = std::fs::read_to_string(&args.config)?;
    let mut cfg = FlatConfig::parse(&text)?;
    cfg.apply_overrides(&args.overrides)?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::GenMatrix { config, output } => {
            let cfg = load_config(&config)?;
            let (spec, seed) = ensemble_from_config(&cfg)?;
            let (matrix, rejections) = spec.sample(seed)?;
            std::fs::write(&output, matrix_to_text(&matrix))?;
            let profile = matrix.row_weight_profile();
            println!(
                "wrote {} x {} matrix to {}",
                matrix.rows(),
                matrix.cols(),
                output.display()
            );
            println!(
                "max row weight {}; total ones {}; density {}",
                profile.max_weight,
                profile.total_ones,
                profile
                    .density
                    .map(|d| format!("{d:.6}"))
                    .unwrap_or_else(|| "undefined (rows >= cols)".into())
            );
            if let Some(r) = rejections {
                println!("heavy-row rejections before acceptance: {r}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Simulate {
            config,
            output,
            trial_csv,
        } => {
            let cfg = load_config(&config)?;
            let exp = experiment_from_config(&cfg)?;
            if exp.sweep.is_some() {
                return Err(Error::InvalidConfig(
                    "simulate runs a single point; use the sweep subcommand for sweep.param".into(),
                ));
            }
            if let Some(path) = &trial_csv {
                let outcomes = point_outcomes(&exp.scheme, exp.trials, exp.master_seed, 0);
                let mut text = String::from(TrialOutcome::CSV_HEADER);
                text.push('\n');
                for (t, res) in outcomes.iter().enumerate() {
                    match res {
                        Ok(out) => {
                            text.push_str(&out.to_csv_row(t));
                            text.push('\n');
                        }
                        Err(e) => {
                            text.push_str(&format!("{t},0,error:{},0,0,\n", e.code()));
                        }
                    }
                }
                std::fs::write(path, text)?;
            }
            let result = run_experiment(&exp)?;
            emit_csv(&result, &output)?;
            let point = &result.points[0];
            println!(
                "trials {}; successes {}; error rate {:.6} [{:.6}, {:.6}]",
                point.trials, point.successes, point.error_rate, point.ci_lo, point.ci_hi
            );
            if let (Some(k1), Some(k2)) = (cfg.get_f64("scheme.k1")?, cfg.get_f64("scheme.k2")?) {
                let bound = row_weight_bound(exp.scheme.p, exp.scheme.epsilon, k1, k2)?;
                println!("items-per-query bound for (K1={k1}, K2={k2}): {bound:.4}");
            }
            let verdict = requested_verdict(&cfg, point.error_rate_ci())?;
            match verdict {
                None => Ok(ExitCode::SUCCESS),
                Some(v) => {
                    println!("check verdict: {v}");
                    Ok(verdict_exit(v))
                }
            }
        }
        Command::Sweep { config, output } => {
            let cfg = load_config(&config)?;
            let exp = experiment_from_config(&cfg)?;
            if exp.sweep.is_none() {
                return Err(Error::InvalidConfig(
                    "sweep needs sweep.param and sweep.values; use simulate for a single point"
                        .into(),
                ));
            }
            let result = run_experiment(&exp)?;
            emit_csv(&result, &output)?;
            for point in &result.points {
                println!(
                    "{} = {}: error rate {:.6} [{:.6}, {:.6}] ({} trials)",
                    point.param,
                    point.value.unwrap_or(f64::NAN),
                    point.error_rate,
                    point.ci_lo,
                    point.ci_hi,
                    point.trials
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify {
            target,
            overrides,
            output,
        } => {
            let target = VerifyTarget::parse(&target)?;
            let report = run_verify(target, &overrides)?;
            println!("verification target: {}", target.name());
            for check in &report.checks {
                println!(
                    "  [{:^12}] {} | observed: {} | reference: {}",
                    check.verdict.to_string(),
                    check.name,
                    check.observed,
                    check.reference
                );
            }
            let overall = report.overall();
            println!("overall: {overall}");
            if let Some(path) = output {
                emit_csv(&report.sweep, &path)?;
            }
            Ok(verdict_exit(overall))
        }
    }
}

/// check.reference / check.direction / check.tolerance compare the error
/// rate against a user-supplied value; absent keys mean no verdict.
fn requested_verdict(cfg: &FlatConfig, observed: RateCi) -> Result<Option<Verdict>, Error> {
    let Some(reference) = cfg.get_f64("check.reference")? else {
        return Ok(None);
    };
    let direction = match cfg.get("check.direction").unwrap_or("approx") {
        "le" => Direction::Le,
        "ge" => Direction::Ge,
        "approx" => Direction::Approx {
            tol: cfg.get_f64("check.tolerance")?.unwrap_or(0.0),
        },
        other => {
            return Err(Error::InvalidConfig(format!(
                "check.direction must be le, ge, or approx, got {other:?}"
            )))
        }
    };
    Ok(Some(compare_to_bound(observed, reference, direction)))
}

fn verdict_exit(v: Verdict) -> ExitCode {
    match v {
        Verdict::Pass => ExitCode::SUCCESS,
        Verdict::Fail => ExitCode::from(EXIT_FAIL),
        Verdict::Inconclusive => ExitCode::from(EXIT_INCONCLUSIVE),
    }
}
