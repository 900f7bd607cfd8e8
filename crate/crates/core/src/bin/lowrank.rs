use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lowrank_recovery::experiments::{
    cmd_certify, cmd_gen, cmd_solve, cmd_sweep, cmd_tau_frontier, config::load_json, ExpError, FrontierOptions,
    GenConfig, Outcome, SolverConfig, SweepConfig, TauPolicy, THREADS_ENV,
};

/// Exact low-rank recovery experiments.
///
/// Exit status: 0 pass, 2 quantitative failure, 1 usage, I/O or regime error.
#[derive(Parser)]
#[command(name = "lowrank", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance bundle from a JSON config.
    Gen {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve an instance bundle and score it against ground truth.
    Solve {
        instance: PathBuf,
        /// data_bound, oracle_bound, <k>x (k times the data bound) or a value.
        #[arg(long, default_value = "data_bound")]
        tau: TauPolicy,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, default_value_t = 1e-3)]
        threshold: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a seeded Monte-Carlo sweep and write a CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's base seed.
        #[arg(long)]
        seed: Option<u64>,
        /// CSV path; the per-cell summary goes next to it as `*.summary.json`.
        #[arg(long)]
        out: PathBuf,
    },
    /// Bisect for the smallest τ that recovers the instance.
    TauFrontier {
        instance: PathBuf,
        #[arg(long, default_value_t = 1.1)]
        ratio: f64,
        #[arg(long, default_value_t = 1e-6)]
        lower_factor: f64,
        #[arg(long, default_value_t = 1e-3)]
        threshold: f64,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build and check the dual certificate.
    Certify {
        instance: PathBuf,
        #[arg(long, default_value = "data_bound")]
        tau: TauPolicy,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SolverArgs {
    #[arg(long, default_value_t = 5000)]
    max_iters: usize,
    #[arg(long)]
    feas_tol: Option<f64>,
    #[arg(long)]
    step_size: Option<f64>,
}

impl From<SolverArgs> for SolverConfig {
    fn from(a: SolverArgs) -> Self {
        SolverConfig {
            max_iters: a.max_iters,
            feas_tol: a.feas_tol,
            step_size: a.step_size,
        }
    }
}

fn configure_threads() -> Result<(), ExpError> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = value
        .parse()
        .map_err(|_| ExpError::Usage(format!("{THREADS_ENV}={value:?} is not a thread count")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| ExpError::Usage(format!("thread pool: {e}")))
}

fn run(cli: Cli) -> Result<Outcome, ExpError> {
    configure_threads()?;
    match cli.command {
        Command::Gen { config, seed, out } => cmd_gen(&load_json::<GenConfig>(&config)?, seed, &out),
        Command::Solve {
            instance,
            tau,
            solver,
            threshold,
            out,
        } => cmd_solve(&instance, tau, &solver.into(), threshold, out.as_deref()),
        Command::Sweep { config, seed, out } => {
            let mut cfg = load_json::<SweepConfig>(&config)?;
            if let Some(seed) = seed {
                cfg.base_seed = seed;
            }
            cmd_sweep(&cfg, &out)
        }
        Command::TauFrontier {
            instance,
            ratio,
            lower_factor,
            threshold,
            solver,
            out,
        } => {
            let opts = FrontierOptions {
                ratio,
                lower_factor,
                threshold,
                solver: solver.into(),
            };
            cmd_tau_frontier(&instance, &opts, out.as_deref())
        }
        Command::Certify { instance, tau, out } => cmd_certify(&instance, tau, out.as_deref()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap reports usage errors with status 2, which this tool reserves.
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(outcome) => {
            println!(
                "{}",
                serde_json::to_string_pretty(&outcome.report).expect("json serializes")
            );
            ExitCode::from(if outcome.pass { 0 } else { 2 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
