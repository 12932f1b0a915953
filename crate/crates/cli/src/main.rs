use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use dslab_core::acceptance::{run_all, Mode};
use dslab_core::config::{parse_config, LoadedConfig, ScenarioKind};

mod run;

#[derive(Parser)]
#[command(name = "dslab", version, about = "Double-solution laboratory: pilot waves, solitons and their far fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario described by a config file.
    Run {
        config: PathBuf,
        /// Replaces the seed in the config; the config hash is unchanged.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run the acceptance suite and print one line per criterion.
    Verify {
        #[arg(long, conflicts_with = "full")]
        fast: bool,
        /// Also repeat the stochastic checks over extra seeds.
        #[arg(long)]
        full: bool,
        /// Run only the named criterion.
        #[arg(long)]
        only: Option<String>,
    },
    /// Tune the beam-splitter barrier to the `[tune]` target.
    TuneBarrier { config: PathBuf },
    /// Write the far-field maps of a beam-splitter or Cauchy config.
    FieldMap {
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn load(path: &Path, seed: Option<u64>) -> Result<LoadedConfig> {
    Ok(parse_config(path).with_context(|| format!("loading {}", path.display()))?.with_seed(seed))
}

fn verify(mode: Mode, only: Option<String>) -> Result<ExitCode> {
    let outcomes = match only {
        Some(name) => {
            let o = dslab_core::acceptance::run_one(&name, mode).with_context(|| format!("no criterion named {name}"))?;
            println!("{o}");
            vec![o]
        }
        None => run_all(mode, |o| println!("{o}")),
    };
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!("{}/{} criteria passed", outcomes.len() - failed, outcomes.len());
    Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn main() -> Result<ExitCode> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, seed } => {
            let cfg = load(&config, seed)?;
            for p in run::run(&cfg)? {
                println!("wrote {}", p.display());
            }
        }
        Command::Verify { fast: _, full, only } => {
            return verify(if full { Mode::Full } else { Mode::Fast }, only);
        }
        Command::TuneBarrier { config } => {
            let cfg = load(&config, None)?;
            let (res, path) = run::tune(&cfg)?;
            println!("amplitude {} gives transmission {} ({} evaluations)", res.amplitude, res.transmission, res.scan.len());
            println!("wrote {}", path.display());
        }
        Command::FieldMap { config, seed } => {
            let cfg = load(&config, seed)?;
            let paths = match cfg.config.scenario {
                ScenarioKind::BeamSplitter => run::beam_splitter_field_map(&cfg)?,
                ScenarioKind::CauchyRecord => run::run(&cfg)?,
                ScenarioKind::Epr => bail!("field-map needs a beam_splitter or cauchy_record config"),
            };
            for p in paths {
                println!("wrote {}", p.display());
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
