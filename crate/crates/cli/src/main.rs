use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use irand_cli::analyze::{analyze, write_trajectories, Scope};
use irand_cli::config::read_bits;
use irand_cli::construct::{construct, Kind};
use irand_cli::generate::{generate, write_outputs};
use irand_cli::output::{timestamp, write_json};
use irand_cli::selftest::selftest;
use irand_cli::{CliError, CliResult, ExperimentConfig, Overrides};
use irand_core::invariants::SelftestConfig;
use irand_core::model::to_bits_string;

/// Randomness analysis of binary sequences against interval forecasts.
#[derive(Debug, Parser)]
#[command(name = "irand", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Experiment configuration (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    horizon: Option<usize>,
    /// Forecast precision N: approximations are within 2^-N.
    #[arg(long, global = true)]
    precision: Option<u32>,
    /// Omit timestamps so repeated runs are byte-identical.
    #[arg(long, global = true)]
    deterministic: bool,
    /// Directory for per-strategy capital trajectories.
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample a path and write it as a .bits file with a provenance sidecar.
    Generate {
        #[command(flatten)]
        common: Common,
        /// Output .bits file (default: outputs.bits from the config).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Church verdict, estimators and strategy verdicts for a .bits file.
    Analyze {
        input: PathBuf,
        #[command(flatten)]
        common: Common,
        /// Report file (default: outputs.report, else standard output).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Interval estimators only.
    Estimate {
        input: PathBuf,
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a construction and write its path and report.
    Construct {
        #[arg(value_enum)]
        kind: Kind,
        #[command(flatten)]
        common: Common,
        /// Output .bits file (default: outputs.bits from the config).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Report file (default: standard output).
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Run the exact invariant suites.
    Selftest {
        /// Reduced suite sizes.
        #[arg(long)]
        quick: bool,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
}

fn load(common: &Common) -> CliResult<ExperimentConfig> {
    let mut cfg = ExperimentConfig::load(common.config.as_deref())?;
    cfg.apply(&Overrides {
        seed: common.seed,
        horizon: common.horizon,
        precision: common.precision,
        csv_dir: common.csv.clone(),
    });
    Ok(cfg)
}

fn run_analysis(input: &Path, common: &Common, out: Option<PathBuf>, scope: Scope) -> CliResult<ExitCode> {
    let cfg = load(common)?;
    let resolved = cfg.resolve()?;
    let prefix = read_bits(input)?;
    let csv_dir = cfg.outputs.csv_dir.clone().filter(|_| scope == Scope::Full);
    let mut report = analyze(&prefix, &cfg, &resolved, scope, csv_dir.is_some())?;
    report.generated_at_unix = timestamp(common.deterministic);
    if let Some(dir) = &csv_dir {
        write_trajectories(&report, dir)?;
    }
    write_json(&report, out.or(cfg.outputs.report.clone()).as_deref())?;
    if let Some(bad) = report.strategies.iter().find(|s| !s.audit.passed) {
        return Err(CliError::Internal(format!(
            "strategy {} failed its declaration audit: {}",
            bad.id,
            bad.audit.first_failure.as_deref().unwrap_or("unknown")
        )));
    }
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> CliResult<ExitCode> {
    match cli.command {
        Command::Generate { common, out } => {
            let cfg = load(&common)?;
            let out = out
                .or(cfg.outputs.bits.clone())
                .ok_or_else(|| CliError::config("outputs.bits", "no output path (use --out)"))?;
            let path = generate(&cfg)?;
            write_outputs(&cfg, &path, &out, common.deterministic)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Analyze { input, common, out } => run_analysis(&input, &common, out, Scope::Full),
        Command::Estimate { input, common, out } => run_analysis(&input, &common, out, Scope::Estimates),
        Command::Construct { kind, common, out, report } => {
            let cfg = load(&common)?;
            let out = out
                .or(cfg.outputs.bits.clone())
                .ok_or_else(|| CliError::config("outputs.bits", "no output path (use --out)"))?;
            let (path, result) = construct(kind, &cfg)?;
            irand_cli::output::write_file(&out, &to_bits_string(&path))?;
            write_json(&result, report.or(cfg.outputs.report.clone()).as_deref())?;
            if !result.invariants_held() {
                return Err(CliError::Internal(format!("{kind:?} construction violated its exact invariant")));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Selftest { quick, seed, inject_fault } => {
            let mut config = if quick { SelftestConfig::quick() } else { SelftestConfig::default() };
            if let Some(seed) = seed {
                config.seed = seed;
            }
            config.inject_fault = inject_fault;
            let (results, text) = selftest(&config);
            print!("{text}");
            Ok(if results.iter().all(|r| r.passed()) { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(3) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("irand: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
