//! finsler-lab: scenario runner for the pseudo-Finsler geometry engine.
//!
//! Exit codes: 0 success, 1 schema error, 2 domain error or failed
//! validation checks. Errors are written as machine-readable JSON objects.

mod output;
mod scenario;
mod tasks;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use output::{emit, render, TaskOutput};
use scenario::{Format, Scenario, SchemaError, Task};
use tasks::{execute, Overrides, RunError};

#[derive(Parser)]
#[command(
    name = "finsler-lab",
    version,
    about = "Numerical pseudo-Finsler geometry: geodesics, curvature, Jacobi fields, variational calculus"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Scenario document (JSON)
    #[arg(long)]
    scenario: PathBuf,
    /// Seed override for randomized sweeps
    #[arg(long)]
    seed: Option<u64>,
    /// Tolerance override (integrator relative tolerance; check tolerance
    /// for validate)
    #[arg(long)]
    tol: Option<f64>,
    /// Output format: csv | json
    #[arg(long)]
    format: Option<String>,
    /// Output path, or `-` for stdout
    #[arg(long, default_value = "-")]
    out: String,
}

#[derive(Args)]
struct ValidateArgs {
    /// Optional scenario document carrying validate inputs
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Metric ids (comma separated); defaults to the whole catalog
    #[arg(long, value_delimiter = ',')]
    metrics: Vec<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Sample count for the identity sweeps
    #[arg(long)]
    samples: Option<usize>,
    /// Check tolerance override
    #[arg(long)]
    tol: Option<f64>,
    /// Output format: csv | json
    #[arg(long)]
    format: Option<String>,
    #[arg(long, default_value = "-")]
    out: String,
}

#[derive(Subcommand)]
enum Command {
    /// Run whatever task the scenario file names
    Run(RunArgs),
    /// Integrate a geodesic and emit the trajectory
    Geodesic(RunArgs),
    /// Evaluate the exponential map
    Exp(RunArgs),
    /// Parallel-transport a vector along a curve
    Transport(RunArgs),
    /// Dump Christoffel symbols at a base point
    Christoffel(RunArgs),
    /// Flag curvature at a flag or over a random sweep
    Flagcurv(RunArgs),
    /// Integrate a Jacobi field along a geodesic
    Jacobi(RunArgs),
    /// Locate conjugate points
    Conjugate(RunArgs),
    /// Locate focal points of a submanifold patch
    Focal(RunArgs),
    /// First (and second) variation of the energy
    Variation(RunArgs),
    /// Two-endmanifold index form
    Indexform(RunArgs),
    /// Run the named-check validation suites
    Validate(ValidateArgs),
}

fn main() -> ExitCode {
    configure_threads();
    let cli = Cli::parse();
    match cli.command {
        Command::Run(args) => run_task(args, None),
        Command::Geodesic(args) => run_task(args, Some(Task::Geodesic)),
        Command::Exp(args) => run_task(args, Some(Task::Exp)),
        Command::Transport(args) => run_task(args, Some(Task::Transport)),
        Command::Christoffel(args) => run_task(args, Some(Task::Christoffel)),
        Command::Flagcurv(args) => run_task(args, Some(Task::Flagcurv)),
        Command::Jacobi(args) => run_task(args, Some(Task::Jacobi)),
        Command::Conjugate(args) => run_task(args, Some(Task::Conjugate)),
        Command::Focal(args) => run_task(args, Some(Task::Focal)),
        Command::Variation(args) => run_task(args, Some(Task::Variation)),
        Command::Indexform(args) => run_task(args, Some(Task::Indexform)),
        Command::Validate(args) => run_validate(args),
    }
}

fn configure_threads() {
    if let Ok(threads) = std::env::var("FINSLER_LAB_THREADS") {
        if let Ok(k) = threads.parse::<usize>() {
            if k >= 1 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
            }
        }
    }
}

fn parse_format(requested: &Option<String>, scenario: Option<Format>, default: Format) -> Result<Format, SchemaError> {
    match requested.as_deref() {
        None => Ok(scenario.unwrap_or(default)),
        Some("csv") => Ok(Format::Csv),
        Some("json") => Ok(Format::Json),
        Some(other) => Err(SchemaError::new(
            "format.unknown",
            format!("unknown format '{other}' (csv | json)"),
        )),
    }
}

fn run_task(args: RunArgs, expected: Option<Task>) -> ExitCode {
    let text = match std::fs::read_to_string(&args.scenario) {
        Ok(t) => t,
        Err(e) => {
            return fail_schema(
                &args.out,
                &SchemaError::new("scenario.read", format!("{}: {e}", args.scenario.display())),
            )
        }
    };
    let scenario = match Scenario::parse(&text) {
        Ok(s) => s,
        Err(e) => return fail_schema(&args.out, &e),
    };
    if let Some(task) = expected {
        if scenario.task != task {
            return fail_schema(
                &args.out,
                &SchemaError::new(
                    "task.mismatch",
                    format!(
                        "scenario task '{}' does not match subcommand '{}'",
                        scenario.task.name(),
                        task.name()
                    ),
                ),
            );
        }
    }
    let format = match parse_format(&args.format, scenario.format, default_format(scenario.task)) {
        Ok(f) => f,
        Err(e) => return fail_schema(&args.out, &e),
    };
    let overrides = Overrides {
        seed: args.seed,
        tol: args.tol,
    };
    match execute(&scenario, &overrides) {
        Ok(result) => {
            let validate_failed = matches!(&result, TaskOutput::Report(r) if !r.pass);
            if emit(&args.out, &render(&result, format)).is_err() {
                return ExitCode::from(2);
            }
            if validate_failed {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(RunError::Schema(e)) => fail_schema(&args.out, &e),
        Err(RunError::Domain(e)) => fail_domain(&args.out, &e),
    }
}

fn default_format(task: Task) -> Format {
    match task {
        Task::Christoffel | Task::Variation | Task::Indexform | Task::Validate => Format::Json,
        _ => Format::Csv,
    }
}

fn run_validate(args: ValidateArgs) -> ExitCode {
    let scenario = match &args.scenario {
        Some(path) => {
            let text = match std::fs::read_to_string(path) {
                Ok(t) => t,
                Err(e) => {
                    return fail_schema(
                        &args.out,
                        &SchemaError::new("scenario.read", format!("{}: {e}", path.display())),
                    )
                }
            };
            match Scenario::parse(&text) {
                Ok(s) => Some(s),
                Err(e) => return fail_schema(&args.out, &e),
            }
        }
        None => None,
    };
    if let Some(s) = &scenario {
        if s.task != Task::Validate {
            return fail_schema(
                &args.out,
                &SchemaError::new("task.mismatch", "scenario task must be 'validate'"),
            );
        }
    }
    // assemble a validate scenario from the flags when none was given
    let json = serde_json::json!({
        "metric": "euclidean",
        "task": "validate",
        "metrics": if args.metrics.is_empty() { None } else { Some(args.metrics.clone()) },
        "samples": args.samples,
        "seed": args.seed,
    });
    let fallback: Scenario = serde_json::from_value(json).expect("internal scenario");
    let scenario = scenario.unwrap_or(fallback);
    let format = match parse_format(&args.format, scenario.format, Format::Csv) {
        Ok(f) => f,
        Err(e) => return fail_schema(&args.out, &e),
    };
    let overrides = Overrides {
        seed: args.seed,
        tol: args.tol,
    };
    match execute(&scenario, &overrides) {
        Ok(result) => {
            let pass = matches!(&result, TaskOutput::Report(r) if r.pass);
            if emit(&args.out, &render(&result, format)).is_err() {
                return ExitCode::from(2);
            }
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(RunError::Schema(e)) => fail_schema(&args.out, &e),
        Err(RunError::Domain(e)) => fail_domain(&args.out, &e),
    }
}

fn fail_schema(out: &str, e: &SchemaError) -> ExitCode {
    let doc = serde_json::json!({ "error": { "code": e.code, "message": e.message } });
    let _ = emit(out, &format!("{}\n", serde_json::to_string_pretty(&doc).unwrap()));
    ExitCode::from(1)
}

fn fail_domain(out: &str, e: &finsler_core::Error) -> ExitCode {
    let mut obj = serde_json::json!({ "code": e.code(), "message": e.to_string() });
    if let finsler_core::Error::DomainExit { t_exit } | finsler_core::Error::ExpDomain { t_exit } = e
    {
        obj["t_exit"] = serde_json::json!(t_exit);
    }
    let doc = serde_json::json!({ "error": obj });
    let _ = emit(out, &format!("{}\n", serde_json::to_string_pretty(&doc).unwrap()));
    ExitCode::from(2)
}
