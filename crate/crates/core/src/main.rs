use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use reactive_pinn::cases::{acceptance_checks, parse_config, run_case, run_oracle, CaseName, RunConfig};
use reactive_pinn::{Error, Result};

#[derive(Parser)]
#[command(version, about = "Physics-informed collocation solver for flow, diffusion and reaction benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train the networks of a case and write fields, histories and metrics.
    Run {
        case: String,
        /// TOML configuration; defaults of the case when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory; the configured `output_dir` when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Write the reference solutions of a case.
    Oracle {
        case: String,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a case and compare its metrics with the acceptance thresholds.
    Check {
        case: String,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn load(case: &str, config: Option<&Path>, seed: Option<u64>) -> Result<RunConfig> {
    let name: CaseName = case.parse()?;
    let mut cfg = match config {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            let cfg = parse_config(&text)?;
            if cfg.case != name.name() {
                return Err(Error::parse(
                    "case",
                    format!("config is for `{}` but `{}` was requested", cfg.case, name),
                ));
            }
            cfg
        }
        None => RunConfig::defaults(name),
    };
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn execute(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run {
            case,
            config,
            out,
            seed,
        } => {
            let cfg = load(&case, config.as_deref(), seed)?;
            let out = out.unwrap_or_else(|| PathBuf::from(&cfg.output_dir));
            let report = run_case(&cfg, &out)?;
            for (k, v) in &report.metrics {
                println!("{k} = {v:e}");
            }
            println!("wrote {} files to {}", report.artifacts.len(), out.display());
            Ok(true)
        }
        Command::Oracle { case, config, out } => {
            let cfg = load(&case, config.as_deref(), None)?;
            for p in run_oracle(&cfg, &out)? {
                println!("{}", p.display());
            }
            Ok(true)
        }
        Command::Check {
            case,
            config,
            out,
            seed,
        } => {
            let cfg = load(&case, config.as_deref(), seed)?;
            let out = out.unwrap_or_else(|| PathBuf::from(&cfg.output_dir));
            let report = run_case(&cfg, &out)?;
            let checks = acceptance_checks(report.case, &report.metrics);
            for c in &checks {
                println!("{c}");
            }
            Ok(checks.iter().all(|c| c.passed()))
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
