use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ensk::commands::{self, Experiment, ModelKind, ModelSpec, SolveOptions, StatsOptions};
use ensk::io::write_json;
use ensk::AppError;
use ensk_core::search::{GreedyKey, Strategy};
use ensk_core::stats::EllEstimator;

/// Budgeted ensemble selection under majority voting.
#[derive(Parser)]
#[command(name = "ensk", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit, derive the stopping rule and search for an ensemble.
    Solve(SolveArgs),
    /// Print the stopping-rule diagnostics without searching.
    Stats(StatsArgs),
    /// Exhaustive optimum for pools of at most 22 members.
    Oracle(OracleArgs),
    /// Run a replicated experiment and write JSON and CSV results.
    Reproduce(ReproduceArgs),
}

#[derive(Args)]
struct ModelArgs {
    /// Voting model.
    #[arg(long, value_enum, default_value_t = ModelArg::Plain)]
    model: ModelArg,
    /// CSV of decision weights (`k,p`), required with `--model constrained`.
    #[arg(long)]
    weights: Option<PathBuf>,
}

impl ModelArgs {
    fn spec(&self) -> ModelSpec {
        let kind = match self.model {
            ModelArg::Plain => ModelKind::Plain,
            ModelArg::Constrained => ModelKind::Constrained,
        };
        ModelSpec { kind, weights_file: self.weights.clone() }
    }
}

#[derive(Args)]
struct SolveArgs {
    /// Pool CSV with header `id,accuracy[,cost]`.
    pool: PathBuf,
    /// Total cost allowed; the whole pool when omitted.
    #[arg(long)]
    budget: Option<f64>,
    #[arg(long, value_enum, default_value_t = StrategyArg::Sherlock)]
    strategy: StrategyArg,
    /// Ranking used by the greedy strategies.
    #[arg(long, value_enum, default_value_t = KeyArg::Accuracy)]
    key: KeyArg,
    #[arg(long, env = "ENSK_SEED", default_value_t = 1)]
    seed: u64,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, value_enum, default_value_t = EstimatorArg::Auto)]
    ell_estimator: EstimatorArg,
    /// Upper bound on MAXSTEP.
    #[arg(long)]
    maxstep_cap: Option<u64>,
    /// Include the best-so-far trace in the output.
    #[arg(long)]
    trace: bool,
    /// Sample members uniformly among those that fit instead of by
    /// efficiency.
    #[arg(long)]
    literal_eq5: bool,
    /// Write the document here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StatsArgs {
    pool: PathBuf,
    #[arg(long)]
    budget: Option<f64>,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, value_enum, default_value_t = EstimatorArg::Auto)]
    ell_estimator: EstimatorArg,
    #[arg(long)]
    maxstep_cap: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    pool: PathBuf,
    #[arg(long)]
    budget: Option<f64>,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReproduceArgs {
    #[arg(value_enum)]
    experiment: ExperimentArg,
    #[arg(long, default_value_t = 100)]
    replicates: usize,
    #[arg(long, env = "ENSK_SEED", default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value = "results")]
    out_dir: PathBuf,
    /// Record best-so-far traces into the traces CSV.
    #[arg(long)]
    trace: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Plain,
    Constrained,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    GreedyForward,
    GreedyBackward,
    MonteCarlo,
    SimulatedAnnealing,
    Sherlock,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::GreedyForward => Strategy::GreedyForward,
            StrategyArg::GreedyBackward => Strategy::GreedyBackward,
            StrategyArg::MonteCarlo => Strategy::MonteCarlo,
            StrategyArg::SimulatedAnnealing => Strategy::SimulatedAnnealing,
            StrategyArg::Sherlock => Strategy::Sherlock,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum KeyArg {
    Accuracy,
    Usefulness,
}

#[derive(Clone, Copy, ValueEnum)]
enum EstimatorArg {
    Auto,
    Beta,
    MeanCost,
    PoissonQuantile,
}

impl From<EstimatorArg> for EllEstimator {
    fn from(e: EstimatorArg) -> Self {
        match e {
            EstimatorArg::Auto => EllEstimator::Auto,
            EstimatorArg::Beta => EllEstimator::Beta,
            EstimatorArg::MeanCost => EllEstimator::MeanCost,
            EstimatorArg::PoissonQuantile => EllEstimator::PoissonQuantile,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ExperimentArg {
    #[value(name = "table2-n30")]
    Table2N30,
    #[value(name = "table2-n100")]
    Table2N100,
    McVsSa,
    Od,
}

fn run(cli: Cli) -> Result<(), AppError> {
    match cli.command {
        Command::Solve(a) => {
            let opts = SolveOptions {
                pool_file: a.pool,
                budget: a.budget,
                strategy: a.strategy.into(),
                key: match a.key {
                    KeyArg::Accuracy => GreedyKey::Accuracy,
                    KeyArg::Usefulness => GreedyKey::Usefulness,
                },
                seed: a.seed,
                model: a.model.spec(),
                ell_estimator: a.ell_estimator.into(),
                maxstep_cap: a.maxstep_cap,
                trace: a.trace,
                literal_eq5: a.literal_eq5,
            };
            write_json(&commands::cmd_solve(&opts)?, a.out.as_deref())
        }
        Command::Stats(a) => {
            let opts = StatsOptions {
                pool_file: a.pool,
                budget: a.budget,
                model: a.model.spec(),
                ell_estimator: a.ell_estimator.into(),
                maxstep_cap: a.maxstep_cap,
            };
            write_json(&commands::cmd_stats(&opts)?, a.out.as_deref())
        }
        Command::Oracle(a) => write_json(&commands::cmd_oracle(&a.pool, a.budget, &a.model.spec())?, a.out.as_deref()),
        Command::Reproduce(a) => {
            let exp = match a.experiment {
                ExperimentArg::Table2N30 => Experiment::Table2N30,
                ExperimentArg::Table2N100 => Experiment::Table2N100,
                ExperimentArg::McVsSa => Experiment::McVsSa,
                ExperimentArg::Od => Experiment::Od,
            };
            let (report, files) = commands::cmd_reproduce(exp, a.replicates, a.seed, &a.out_dir, a.trace)?;
            for c in &report.cells {
                let precision = c.precision.map(|p| format!("  precision {p:.2}")).unwrap_or_default();
                println!(
                    "{:<20} {:<8} energy {:.4} ± {:.4}  steps {:>10.1}{}",
                    format!("{:?}", c.strategy),
                    format!("{:?}", c.mode),
                    c.energy_mean,
                    c.energy_std,
                    c.steps_mean,
                    precision
                );
            }
            for f in files {
                println!("wrote {}", f.display());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
