use clap::{Parser, Subcommand};
use quasi2d_cli::{oracle, presets, run, CliError, CliResult, RunOptions, ScenarioConfig};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "quasi2d", version, about = "Sideband cooling and collisional thermalization of a 1D-confined cesium gas")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone)]
struct RunFlags {
    /// Base seed; replica i uses seed + i.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    replicas: Option<u32>,
    /// Worker threads (default: one per core).
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory (default: out/<scenario name>).
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file.
    Run {
        scenario: PathBuf,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Run a named preset, or print it with --print.
    Preset {
        name: String,
        /// key=value applied to the preset (dotted paths, JSON values).
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        /// Print the expanded scenario instead of running it.
        #[arg(long)]
        print: bool,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Check a scenario file and print its config hash.
    Validate { scenario: PathBuf },
    /// Evaluate a closed form; `oracle list` shows the names.
    Oracle {
        name: String,
        #[arg(long, num_args = 0.., value_name = "KEY=VALUE")]
        args: Vec<String>,
    },
}

fn load(path: &Path) -> CliResult<ScenarioConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    ScenarioConfig::from_json(&text)
}

fn execute(cfg: ScenarioConfig, flags: RunFlags) -> CliResult<()> {
    let mut cfg = cfg;
    if let Some(s) = flags.seed {
        cfg.seed = s;
    }
    if let Some(r) = flags.replicas {
        cfg.replicas = r;
    }
    let out_dir = flags
        .out_dir
        .unwrap_or_else(|| PathBuf::from("out").join(&cfg.name));
    let manifest = run(
        &cfg,
        &RunOptions {
            out_dir: out_dir.clone(),
            workers: flags.workers,
        },
    )?;
    println!(
        "{} ({}) hash {}: {} files in {}",
        manifest.scenario,
        cfg.mode.as_str(),
        &manifest.config_hash[..12],
        manifest.outputs.len(),
        out_dir.display()
    );
    Ok(())
}

fn dispatch(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Run { scenario, flags } => execute(load(&scenario)?, flags),
        Command::Preset {
            name,
            overrides,
            print,
            flags,
        } => {
            let cfg = presets::preset(&name, &overrides)?;
            if print {
                cfg.validate()?;
                println!("{}", serde_json::to_string_pretty(&cfg.to_value()).expect("serializes"));
                Ok(())
            } else {
                execute(cfg, flags)
            }
        }
        Command::Validate { scenario } => {
            let cfg = load(&scenario)?;
            cfg.validate()?;
            println!("ok {} {}", cfg.name, cfg.config_hash());
            Ok(())
        }
        Command::Oracle { name, args } => {
            if name == "list" {
                for (n, a) in oracle::ORACLES {
                    println!("{n:34} {a}");
                }
                return Ok(());
            }
            let r = oracle::evaluate(&name, &args)?;
            println!("{}", serde_json::to_string(&r).expect("serializes"));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
