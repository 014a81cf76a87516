//! Command-line driver for the experiment harness.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cdt::harness::{run_experiment, ExperimentConfig, ExperimentKind};

#[derive(Parser)]
#[command(name = "cdt", version, about = "Bandit hyperparameter tuning experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Zooming variants on the switching Lipschitz testbed.
    LipschitzBench(RunArgs),
    /// Tuners over a contextual bandit algorithm.
    GlbBench(RunArgs),
    /// Fixed-hyperparameter runs over a grid of values.
    GridSweep(RunArgs),
    /// Parse and check a config, then print it with defaults filled in.
    ValidateConfig(ConfigArgs),
}

#[derive(Args)]
struct ConfigArgs {
    #[arg(long)]
    config: PathBuf,
    /// `key=value`, dotted keys address sections; repeatable.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    config: ConfigArgs,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    reps: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn load(args: &ConfigArgs) -> cdt::Result<ExperimentConfig> {
    ExperimentConfig::load(&args.config, &args.overrides)
}

fn run(kind: ExperimentKind, args: RunArgs) -> cdt::Result<()> {
    let mut cfg = load(&args.config)?;
    if cfg.kind != kind {
        return Err(cdt::Error::Config(format!(
            "config kind is {} but the subcommand runs {}",
            cfg.kind.label(),
            kind.label()
        )));
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(r) = args.reps {
        cfg.reps = r;
    }
    if let Some(o) = args.out {
        cfg.out = Some(o);
    }
    let output = run_experiment(&cfg)?;
    for m in &output.aggregate.methods {
        println!("{}\t{}\t{}", m.method, m.final_mean, m.final_std);
    }
    if let Some(g) = &output.grid {
        println!("argmin\t{}", g.argmin);
    }
    for f in &output.files {
        eprintln!("wrote {}", f.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::LipschitzBench(a) => run(ExperimentKind::LipschitzBench, a),
        Command::GlbBench(a) => run(ExperimentKind::GlbBench, a),
        Command::GridSweep(a) => run(ExperimentKind::GridSweep, a),
        Command::ValidateConfig(a) => load(&a).and_then(|cfg| {
            print!("{}", cfg.to_toml_string()?);
            Ok(())
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
