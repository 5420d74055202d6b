use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use log::info;
use lsd_core::Regime;
use lsd_harness::config::{parse_algos, AlgoSpec, ExperimentConfig};
use lsd_harness::generate::{generate, parse_delays, GenParams, NamedInstance};
use lsd_harness::load_instance;
use lsd_harness::runner::run_experiment;
use lsd_harness::verify::{parse_scopes, verify, Scope, VerifyOptions};

#[derive(Parser)]
#[command(
    name = "lsd",
    version,
    about = "Last-switch dependent bandit experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run learners on an instance and write trace.csv, curves.csv and summary.json.
    Run(RunArgs),
    /// Write an instance file.
    Gen(GenArgs),
    /// Run property sweeps and write report.json.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON config; command-line flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    instance: Option<PathBuf>,
    #[arg(long)]
    horizon: Option<usize>,
    #[arg(long = "block-size")]
    block_size: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated: isi, combucb1, oracle_greedy, cs:<perm> (arms from 1).
    #[arg(long, value_parser = parse_algos)]
    algos: Option<AlgoList>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// constant_negative or general; defaults to the instance's regime.
    #[arg(long, value_parser = parse_regime)]
    regime: Option<Regime>,
    /// Share environment randomness across algorithms.
    #[arg(long)]
    paired: bool,
    /// Skip the per-step trace.
    #[arg(long)]
    no_trace: bool,
}

#[derive(Args)]
struct GenArgs {
    /// sec4, appendix-c, tight, anti-kleinberg or pinwheel.
    #[arg(value_parser = |s: &str| s.parse::<NamedInstance>())]
    name: NamedInstance,
    /// Arm count for `tight`.
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// Consecutive-pull reward for `anti-kleinberg`.
    #[arg(long, default_value_t = 0.01)]
    eps: f64,
    /// Comma-separated thresholds for `pinwheel`.
    #[arg(long, value_parser = parse_delays, default_value = "2,4,4")]
    delays: DelayList,
    /// Accept pinwheel delays whose reciprocals do not sum to 1.
    #[arg(long)]
    no_dense_check: bool,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Comma-separated scopes, `all`, or empty for none.
    #[arg(long, default_value = "all", value_parser = parse_scopes)]
    scope: ScopeList,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory for report.json.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

// Aliases keep clap from treating these lists as repeated flags.
type AlgoList = Vec<AlgoSpec>;
type DelayList = Vec<usize>;
type ScopeList = Vec<Scope>;

fn parse_regime(s: &str) -> Result<Regime, String> {
    match s {
        "constant_negative" | "constant-negative" => Ok(Regime::ConstantNegative),
        "general" => Ok(Regime::General),
        _ => Err(format!(
            "unknown regime `{s}`, expected constant_negative or general"
        )),
    }
}

fn cmd_run(a: RunArgs) -> Result<()> {
    let mut cfg = match &a.config {
        Some(p) => ExperimentConfig::from_file(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(v) = a.instance {
        cfg.instance = Some(v);
    }
    if let Some(v) = a.horizon {
        cfg.horizon = v;
    }
    if let Some(v) = a.block_size {
        cfg.block_size = v;
    }
    if let Some(v) = a.alpha {
        cfg.alpha = v;
    }
    if let Some(v) = a.reps {
        cfg.reps = v;
    }
    if let Some(v) = a.seed {
        cfg.seed = v;
    }
    if let Some(v) = a.algos {
        cfg.algos = v;
    }
    if let Some(v) = a.out {
        cfg.out = v;
    }
    if a.regime.is_some() {
        cfg.regime = a.regime;
    }
    cfg.paired |= a.paired;
    if a.no_trace {
        cfg.write_trace = false;
    }
    cfg.validate()?;
    let Some(path) = cfg.instance.clone() else {
        bail!("no instance given: pass --instance or set `instance` in the config");
    };
    let table = load_instance(&path)?;
    let exp = run_experiment(&cfg, &table)?;
    exp.write_outputs(&cfg.out)?;
    for s in exp.summary().algorithms {
        println!(
            "{:<16} T={:<7} final mean {:.2} (sd {:.2}), last-quarter reward/step {:.4}",
            s.name, s.horizon, s.final_mean, s.final_sd, s.tail_mean_reward
        );
    }
    info!("outputs written to {}", cfg.out.display());
    Ok(())
}

fn cmd_gen(a: GenArgs) -> Result<()> {
    let params = GenParams {
        k: a.k,
        eps: a.eps,
        delays: a.delays,
        dense_check: !a.no_dense_check,
    };
    let table = generate(a.name, &params)?;
    let mut json = table.to_json();
    json.push('\n');
    match a.out {
        Some(p) => std::fs::write(&p, json).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{json}"),
    }
    Ok(())
}

fn cmd_verify(a: VerifyArgs) -> Result<bool> {
    let opts = VerifyOptions {
        seed: a.seed,
        ..Default::default()
    };
    let report = verify(&a.scope, &opts);
    for c in &report.checks {
        println!(
            "{} {}: {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
    }
    std::fs::create_dir_all(&a.out)?;
    let path = a.out.join("report.json");
    let mut json = serde_json::to_string_pretty(&report)?;
    json.push('\n');
    std::fs::write(&path, json).with_context(|| format!("writing {}", path.display()))?;
    Ok(report.passed)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => cmd_run(a).map(|_| true),
        Command::Gen(a) => cmd_gen(a).map(|_| true),
        Command::Verify(a) => cmd_verify(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
