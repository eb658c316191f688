use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qbsim::config::{preset, preset_names, RunConfig};
use qbsim::engine::TraceLevel;
use qbsim::export::run_to_dir;

#[derive(Parser)]
#[command(name = "qbsim", about = "Biased Q-learning simulations", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a preset or a TOML config file.
    Run {
        /// Preset name or path to a config file.
        source: String,
        /// Output directory for all artifacts.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Override the master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the number of Monte-Carlo paths.
        #[arg(long)]
        paths: Option<usize>,
        /// Override the horizon (periods per path).
        #[arg(long)]
        horizon: Option<u64>,
        /// Size of the worker thread pool (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
        /// Override the trace level.
        #[arg(long, value_enum)]
        trace: Option<TraceArg>,
        /// Export every N-th trace record.
        #[arg(long)]
        stride: Option<u64>,
    },
    /// List the built-in presets.
    Presets,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum TraceArg {
    None,
    Aggregates,
    Full,
}

impl From<TraceArg> for TraceLevel {
    fn from(t: TraceArg) -> Self {
        match t {
            TraceArg::None => TraceLevel::None,
            TraceArg::Aggregates => TraceLevel::Aggregates,
            TraceArg::Full => TraceLevel::Full,
        }
    }
}

fn load_config(source: &str) -> anyhow::Result<RunConfig> {
    if std::path::Path::new(source).is_file() {
        let text = std::fs::read_to_string(source)?;
        Ok(RunConfig::from_toml(&text)?)
    } else {
        Ok(preset(source)?)
    }
}

fn run() -> anyhow::Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Presets => {
            for name in preset_names() {
                println!("{name}");
            }
            Ok(())
        }
        Command::Run { source, out, seed, paths, horizon, threads, trace, stride } => {
            let mut config = load_config(&source)?;
            if let Some(seed) = seed {
                config.simulation.seed = seed;
            }
            if let Some(paths) = paths {
                config.simulation.paths = paths;
            }
            if let Some(horizon) = horizon {
                config.simulation.horizon = horizon;
            }
            if let Some(trace) = trace {
                config.simulation.trace = trace.into();
            }
            if let Some(stride) = stride {
                config.output.stride = stride;
            }
            #[cfg(feature = "parallel")]
            if let Some(n) = threads {
                rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
            }
            let manifest = run_to_dir(&config, &out, threads)?;
            println!(
                "wrote {} artifacts to {} ({} plan, seed {}, {:.1}s)",
                manifest.artifacts.len(),
                out.display(),
                manifest.plan,
                manifest.seed,
                manifest.elapsed_secs
            );
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}
