use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hdsurvey_cli::commands;
use hdsurvey_cli::{finish, CliResult, Overrides, RunConfig};

#[derive(Parser)]
#[command(name = "hdsurvey", version, about = "Heart-disease survey experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML run config, or a manifest.json from an earlier run to repeat it
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed for sampling, splitting and training
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Stability iterations
    #[arg(long, global = true)]
    iterations: Option<usize>,
    /// Rows drawn from each class for balanced samples
    #[arg(long = "n-per-class", global = true)]
    n_per_class: Option<usize>,
    /// Features kept per model and in the reduced feature set
    #[arg(long, global = true)]
    k: Option<usize>,
    /// Comma-separated models (LR, SVM, SGD, RF, GB, KNN, GNB)
    #[arg(long, global = true, value_delimiter = ',')]
    models: Option<Vec<String>>,
    /// Output directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for stability iterations (results do not depend on it)
    #[arg(long, global = true)]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Row count, class balance and per-feature ranges
    Inspect { dataset: Option<PathBuf> },
    /// All models on the full imbalanced data, before and after the reduced question list
    Baseline { dataset: Option<PathBuf> },
    /// All models on balanced samples, before and after the stable feature set
    Balanced {
        dataset: Option<PathBuf>,
        /// Consensus CSV from `stability`; its top k features form the reduced set
        #[arg(long)]
        consensus: Option<PathBuf>,
    },
    /// Selection frequencies over repeated balanced samples
    Stability { dataset: Option<PathBuf> },
    /// Fit survey-time files and report the reduction in mean time
    ReduceTime {
        before: Option<PathBuf>,
        after: Option<PathBuf>,
    },
    /// Generate a planted-signal dataset and optional survey-time files
    Synth {
        #[arg(long)]
        n_neg: Option<usize>,
        #[arg(long)]
        n_pos: Option<usize>,
        /// Comma-separated feature names carrying the signal
        #[arg(long, value_delimiter = ',')]
        signal: Option<Vec<String>>,
        #[arg(long)]
        strength: Option<f64>,
        /// Rows per survey-time file
        #[arg(long)]
        time_samples: Option<usize>,
    },
}

fn run(cli: Cli) -> CliResult<String> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let mut o = Overrides {
        seed: cli.seed,
        iterations: cli.iterations,
        n_per_class: cli.n_per_class,
        k: cli.k,
        models: cli.models,
        out: cli.out,
        workers: cli.workers,
        dataset: None,
    };
    let output = match cli.command {
        Command::Inspect { dataset } => {
            o.dataset = dataset;
            cfg.apply(&o);
            cfg.anchor_paths()?;
            commands::inspect(&cfg)?
        }
        Command::Baseline { dataset } => {
            o.dataset = dataset;
            cfg.apply(&o);
            cfg.anchor_paths()?;
            commands::baseline(&cfg)?
        }
        Command::Balanced { dataset, consensus } => {
            o.dataset = dataset;
            cfg.apply(&o);
            if consensus.is_some() {
                cfg.consensus = consensus;
                cfg.selected = None;
            }
            cfg.anchor_paths()?;
            commands::balanced(&cfg)?
        }
        Command::Stability { dataset } => {
            o.dataset = dataset;
            cfg.apply(&o);
            cfg.anchor_paths()?;
            commands::stability(&cfg)?
        }
        Command::ReduceTime { before, after } => {
            cfg.apply(&o);
            if before.is_some() {
                cfg.time.before = before;
            }
            if after.is_some() {
                cfg.time.after = after;
            }
            cfg.anchor_paths()?;
            commands::reduce_time(&cfg)?
        }
        Command::Synth {
            n_neg,
            n_pos,
            signal,
            strength,
            time_samples,
        } => {
            cfg.apply(&o);
            let s = &mut cfg.synth;
            if let Some(n) = cli.n_per_class {
                s.n_neg = n;
                s.n_pos = n;
            }
            s.n_neg = n_neg.unwrap_or(s.n_neg);
            s.n_pos = n_pos.unwrap_or(s.n_pos);
            s.signal_features = signal.unwrap_or(std::mem::take(&mut s.signal_features));
            s.signal_strength = strength.unwrap_or(s.signal_strength);
            s.time_samples = time_samples.unwrap_or(s.time_samples);
            cfg.anchor_paths()?;
            commands::synth(&cfg)?
        }
    };
    if let Some(m) = finish(&cfg, &output)? {
        let mut text = output.text;
        text.push_str(&format!(
            "wrote {} files to {}\n",
            m.outputs.len() + 1,
            cfg.out.display()
        ));
        return Ok(text);
    }
    Ok(output.text)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
