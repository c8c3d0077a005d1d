use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use secrecy_cli::config::{resolve, ConfigSources};

/// Secrecy-rate sweeps for artificial-noise-aided multi-user MIMO precoding.
#[derive(Parser)]
#[command(name = "secrecy", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an SNR sweep and write results.csv, config.resolved and plots.
    Run(ConfigArgs),
    /// Figure presets.
    Preset {
        #[command(subcommand)]
        action: PresetAction,
    },
    /// Check geometric, power and rate invariants on random draws.
    Invariants {
        #[command(flatten)]
        config: ConfigArgs,
        /// Channel draws per series.
        #[arg(long, default_value_t = 100)]
        draws: usize,
    },
    /// Report precoder build cost per scheme for the base scenario.
    Probe(ConfigArgs),
    /// Regenerate the SVG plots from a results.csv.
    Plot {
        csv: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum PresetAction {
    List,
}

#[derive(Args)]
struct ConfigArgs {
    /// TOML file with run keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Start from a figure preset (see `preset list`).
    #[arg(long)]
    preset: Option<String>,
    /// Output directory; overrides `output_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override one key, e.g. `--set trials=50 --set scheme=BD`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl ConfigArgs {
    fn sources(&self) -> ConfigSources {
        ConfigSources {
            file: self.config.clone(),
            preset: self.preset.clone(),
            output_dir: self.out.clone(),
            assignments: self.set.clone(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(command: Command) -> anyhow::Result<ExitCode> {
    secrecy_cli::init_threads()?;
    match command {
        Command::Run(args) => {
            let cfg = resolve(&args.sources())?;
            let out = secrecy_cli::run(&cfg)?;
            print!("{}", secrecy_cli::run_summary(&cfg, &out));
        }
        Command::Preset { action: PresetAction::List } => print!("{}", secrecy_cli::preset_list()),
        Command::Invariants { config, draws } => {
            let cfg = resolve(&config.sources())?;
            let (report, ok) = secrecy_cli::invariants(&cfg, draws)?;
            print!("{report}");
            if !ok {
                eprintln!("invariant violations found");
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Probe(args) => {
            let cfg = resolve(&args.sources())?;
            print!("{}", secrecy_cli::probe(&cfg));
        }
        Command::Plot { csv, out } => {
            for p in secrecy_cli::plot_csv(&csv, &out)? {
                println!("wrote {}", p.display());
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
