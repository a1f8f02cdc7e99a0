//! CLI experiment runner for the fair multi-agent bandit algorithms.
//!
//! `run` executes a batch of episodes and writes instance files, per-run
//! trace CSVs, and a summary CSV; `chart` renders trace CSVs into a static
//! SVG regret chart.
//!
//! Exit codes: 0 on success, 1 on configuration errors, 2 on runtime errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use fair_bandits::harness::{
    emit_chart_series, load_trace_series, run_batch, AlgoName, ExperimentConfig,
};
use fair_bandits::Error;

#[derive(Parser)]
#[command(name = "fair-bandits", version, about = "Fair multi-agent bandit experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a batch of experiments and write traces plus a summary CSV.
    Run(Box<RunArgs>),
    /// Render trace CSVs into an SVG cumulative-regret chart.
    Chart(ChartArgs),
}

#[derive(clap::Args)]
struct RunArgs {
    /// Number of agents N.
    #[arg(long, default_value_t = 4)]
    agents: usize,

    /// Number of arms K.
    #[arg(long, default_value_t = 2)]
    arms: usize,

    /// Rounds per episode T.
    #[arg(long, default_value_t = 10_000)]
    horizon: u64,

    /// Instances per size; every algorithm runs on the same instances.
    #[arg(long, default_value_t = 10)]
    instances: usize,

    /// Comma-separated algorithms: fair-ucb, high-startup, baseline-ucb.
    #[arg(long, value_delimiter = ',', default_value = "fair-ucb")]
    algos: Vec<String>,

    /// Confidence parameter δ.
    #[arg(long, default_value_t = 0.01)]
    delta: f64,

    /// Scale factor on the fair UCB confidence width.
    #[arg(long, default_value_t = 0.5)]
    width_scale: f64,

    /// Scale factor on the baseline's additive bonus.
    #[arg(long, default_value_t = 0.8)]
    bonus_scale: f64,

    /// Scale factor on the high-start-up warm-up constant 180.
    #[arg(long, default_value_t = 1.0)]
    warmup_multiplier: f64,

    /// Use the horizon-independent confidence width ln(8NKt²/δ).
    #[arg(long, default_value_t = false)]
    anytime: bool,

    /// Restart count for the non-concave optimization steps.
    #[arg(long, default_value_t = 1)]
    restarts: usize,

    /// Master seed; all instance and episode streams derive from it.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Output directory for instances, traces, and the summary.
    #[arg(long, default_value = "out")]
    out: PathBuf,

    /// Worker threads (0 = one per core).
    #[arg(long, default_value_t = 0)]
    workers: usize,

    /// Persist trace rows every this many rounds.
    #[arg(long, default_value_t = 100)]
    stride: u64,

    /// Record summary checkpoints every this many rounds (0 = final only).
    #[arg(long, default_value_t = 0)]
    checkpoint_every: u64,

    /// TOML config file; when given it overrides the flags above.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(clap::Args)]
struct ChartArgs {
    /// Trace CSV files, one polyline each.
    #[arg(required = true)]
    traces: Vec<PathBuf>,

    /// Output SVG path.
    #[arg(long, default_value = "regret.svg")]
    out: PathBuf,
}

fn config_from_args(args: &RunArgs) -> Result<ExperimentConfig, Error> {
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path)?;
        let config: ExperimentConfig = toml::from_str(&text).map_err(|e| Error::Parse {
            path: path.display().to_string(),
            reason: e.to_string(),
        })?;
        return Ok(config);
    }
    let algorithms = args
        .algos
        .iter()
        .map(|s| s.parse::<AlgoName>())
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ExperimentConfig {
        sizes: vec![(args.agents, args.arms)],
        horizon: args.horizon,
        instance_count: args.instances,
        algorithms,
        delta: args.delta,
        width_scale: args.width_scale,
        bonus_scale: args.bonus_scale,
        warmup_multiplier: args.warmup_multiplier,
        anytime: args.anytime,
        restarts: args.restarts,
        master_seed: args.seed,
        output_dir: args.out.clone(),
        workers: args.workers,
        stride: args.stride,
        checkpoint_every: args.checkpoint_every,
        ..ExperimentConfig::default()
    })
}

/// Configuration mistakes exit with 1; runtime failures with 2.
fn exit_code_for(err: &Error) -> ExitCode {
    match err {
        Error::InvalidConfig { .. } | Error::Parse { .. } => ExitCode::from(1),
        _ => ExitCode::from(2),
    }
}

fn execute(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Run(args) => {
            let config = config_from_args(&args)?;
            let summary = run_batch(&config)?;
            print!("{summary}");
            println!(
                "wrote {} and per-run traces",
                config.output_dir.join("summary.csv").display()
            );
            Ok(())
        }
        Command::Chart(args) => {
            let series = args
                .traces
                .iter()
                .map(|p| load_trace_series(p))
                .collect::<Result<Vec<_>, _>>()?;
            emit_chart_series(&series, &args.out)?;
            println!("wrote {}", args.out.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code_for(&err)
        }
    }
}
