//! Command line front end for the AR(1) estimation-error toolkit: single
//! bound queries printed as JSON, Monte Carlo grid sweeps written as CSV,
//! the numerical identity/dominance suite, and regeneration of the
//! simulation figure data.
//!
//! Exit codes: 0 success, 1 validation-suite failure, 2 usage or domain
//! error, 3 I/O error.

mod sweep;

use std::path::PathBuf;
use std::process::ExitCode;

use ar1_bounds::{
    run_checks, stable_deviation_bound, stable_variance_bound, unstable_deviation_bound,
    unstable_variance_bound, BoundValue, DeviationQuery, FaultInjection,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::sweep::{ReproduceSpec, SweepSpec};

/// Everything that can end the process unsuccessfully, tagged with its
/// contract exit code.
#[derive(Debug)]
pub enum Failure {
    /// One or more validation checks failed (exit 1).
    Checks(Vec<String>),
    /// Bad flags or parameters outside an operation's domain (exit 2).
    Domain(String),
    /// Filesystem problem (exit 3).
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Checks(_) => 1,
            Failure::Domain(_) => 2,
            Failure::Io(_) => 3,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Checks(names) => format!("validation failed: {}", names.join(", ")),
            Failure::Domain(msg) => msg.clone(),
            Failure::Io(msg) => msg.clone(),
        }
    }
}

impl From<ar1_bounds::Error> for Failure {
    fn from(e: ar1_bounds::Error) -> Self {
        Failure::Domain(e.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "ar1-bounds",
    version,
    about = "Finite-sample error bounds for least-squares AR(1) identification"
)]
struct Cli {
    /// Worker threads for Monte Carlo commands (default: available
    /// parallelism). Output is identical for every value; this only
    /// changes wall time.
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one closed-form bound and print it as a JSON object
    Bound(BoundArgs),
    /// Monte Carlo sweep over an (a0, eps, N) grid, written as CSV
    ///
    /// One row per grid cell with the empirical deviation probability, its
    /// Wilson 95% interval, and both the closed-form and the
    /// determinant-form bounds. Output is byte-identical for a given seed
    /// regardless of --workers. Grid lists are sorted and deduplicated
    /// before use.
    Sweep(SweepArgs),
    /// Run the numerical identity and dominance checks
    ///
    /// Exercises the Szego factor, continuant identities, tridiagonal
    /// inverse residuals, eigenvalue closed forms, determinant/closed-form
    /// agreement, bound monotonicity, and the variance reassembly, each
    /// against an independent evaluation path. Exit code 0 iff every check
    /// passes.
    Validate(ValidateArgs),
    /// Regenerate the simulation figure data as CSV files
    ///
    /// fig1 writes one file per a0 in {0.5, 0.98, 1.01, 1.1} with the
    /// empirical deviation probability and both bounds over eps (20
    /// log-spaced points in [0.01, 5]) x N (13 log-spaced integers in
    /// [2, 100]). fig2 writes one file per a0 with the empirical variance
    /// and the variance bound over N (25 log-spaced integers in
    /// [7, 1000]). Grid densities are fixed, desk-scale defaults; raise
    /// --runs for smoother curves.
    Reproduce(ReproduceArgs),
}

#[derive(Args)]
struct BoundArgs {
    /// Which bound to evaluate
    #[arg(value_enum)]
    kind: BoundKindArg,
    /// Process coefficient
    #[arg(long, allow_hyphen_values = true)]
    a0: f64,
    /// Deviation threshold (deviation kinds only)
    #[arg(long)]
    eps: Option<f64>,
    /// Sample size
    #[arg(long)]
    n: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundKindArg {
    /// Bound on P(a_hat - a0 > eps) for |a0| < 1
    StableDev,
    /// Bound on P(a_hat - a0 > eps) for |a0| > 1
    UnstableDev,
    /// Bound on E[(a_hat - a0)^2] for |a0| < 1, N >= 7
    StableVar,
    /// Bound on E[(a_hat - a0)^2] for |a0| > 1, N >= 7
    UnstableVar,
}

#[derive(Args)]
pub struct SweepArgs {
    /// a0 grid, comma separated or repeated; each value must satisfy
    /// |a0| != 1
    #[arg(long = "a0", value_delimiter = ',', allow_hyphen_values = true)]
    a0: Vec<f64>,
    /// Deviation thresholds, comma separated or repeated
    #[arg(long = "eps", value_delimiter = ',')]
    eps: Vec<f64>,
    /// Trajectory lengths, comma separated or repeated
    #[arg(long = "n", value_delimiter = ',')]
    n: Vec<u64>,
    /// Monte Carlo runs per grid cell [default: 1000]
    #[arg(long)]
    runs: Option<u64>,
    /// Base seed for per-run seed derivation [default: 0]
    #[arg(long)]
    seed: Option<u64>,
    /// Noise standard deviation [default: 1]
    #[arg(long)]
    sigma: Option<f64>,
    /// Output CSV path
    #[arg(long)]
    out: Option<PathBuf>,
    /// key=value file supplying defaults for the flags above; explicit
    /// flags win
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    /// Machine-readable report: a JSON array with one object per check
    #[arg(long)]
    json: bool,
    /// Flip a sign inside the continuant identity so the suite must fail
    /// (harness self-test)
    #[arg(long, hide = true)]
    inject_fault: bool,
}

#[derive(Args)]
struct ReproduceArgs {
    /// Which figure's data to regenerate
    #[arg(value_enum)]
    figure: Figure,
    /// Monte Carlo runs per grid cell (minimum 1000)
    #[arg(long, default_value_t = 10_000)]
    runs: u64,
    /// Base seed for per-run seed derivation
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory for the CSV files (created if missing)
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Figure {
    /// Deviation-probability surfaces, one CSV per a0
    Fig1,
    /// Variance curves over N, one CSV per a0
    Fig2,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(workers) = cli.workers {
        if workers == 0 {
            return Err(Failure::Domain("workers must be >= 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
            .map_err(|e| Failure::Domain(format!("cannot size worker pool: {e}")))?;
    }
    match cli.command {
        Command::Bound(args) => cmd_bound(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Validate(args) => cmd_validate(args),
        Command::Reproduce(args) => cmd_reproduce(args),
    }
}

fn cmd_bound(args: BoundArgs) -> Result<(), Failure> {
    let bound: BoundValue = match args.kind {
        BoundKindArg::StableDev | BoundKindArg::UnstableDev => {
            let eps = args
                .eps
                .ok_or_else(|| Failure::Domain("--eps is required for deviation bounds".into()))?;
            let query = DeviationQuery::new(args.a0, eps, args.n)?;
            match args.kind {
                BoundKindArg::StableDev => stable_deviation_bound(query)?,
                _ => unstable_deviation_bound(query)?,
            }
        }
        BoundKindArg::StableVar | BoundKindArg::UnstableVar => {
            if args.eps.is_some() {
                return Err(Failure::Domain("--eps does not apply to variance bounds".into()));
            }
            match args.kind {
                BoundKindArg::StableVar => stable_variance_bound(args.a0, args.n)?,
                _ => unstable_variance_bound(args.a0, args.n)?,
            }
        }
    };
    let line = serde_json::to_string(&bound)
        .map_err(|e| Failure::Io(format!("cannot encode result: {e}")))?;
    println!("{line}");
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<(), Failure> {
    let spec = SweepSpec::resolve(args)?;
    let csv = sweep::deviation_grid_csv(
        &spec.a0_list,
        &spec.eps_list,
        &spec.n_list,
        spec.runs,
        spec.base_seed,
        spec.sigma,
    )?;
    sweep::write_file(&spec.output_path, &csv)
}

fn cmd_validate(args: ValidateArgs) -> Result<(), Failure> {
    let fault = if args.inject_fault {
        FaultInjection::ContinuantSignFlip
    } else {
        FaultInjection::None
    };
    let checks = run_checks(fault);
    if args.json {
        let report = serde_json::to_string_pretty(&checks)
            .map_err(|e| Failure::Io(format!("cannot encode report: {e}")))?;
        println!("{report}");
    } else {
        for c in &checks {
            let status = if c.pass { "PASS" } else { "FAIL" };
            println!(
                "{status} {:<34} residual {:>12.5e}  (tol {:e})",
                c.check, c.residual, c.tolerance
            );
        }
        let passed = checks.iter().filter(|c| c.pass).count();
        println!("{passed}/{} checks passed", checks.len());
    }
    let failed: Vec<String> =
        checks.iter().filter(|c| !c.pass).map(|c| c.check.clone()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Checks(failed))
    }
}

fn cmd_reproduce(args: ReproduceArgs) -> Result<(), Failure> {
    if args.runs < 1000 {
        return Err(Failure::Domain(format!(
            "runs must be >= 1000 for figure reproduction, got {}",
            args.runs
        )));
    }
    let spec = ReproduceSpec { runs: args.runs, base_seed: args.seed, out_dir: args.out };
    match args.figure {
        Figure::Fig1 => sweep::reproduce_fig1(&spec),
        Figure::Fig2 => sweep::reproduce_fig2(&spec),
    }
}
