//! Seeded multi-repetition experiment runs and their output files.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use log::info;
use lsd_core::algos::{
    run, CalibrationSequence, CombUcb1, IsiCombUcb1, Learner, OracleGreedy, RunTrace,
};
use lsd_core::rng::{derive_seed, seeded_rng, ENV_STREAM, POLICY_STREAM};
use lsd_core::{Environment, Regime, RewardTable};
use serde::{Deserialize, Serialize};

use crate::config::{AlgoSpec, ExperimentConfig};

pub const TRACE_SCHEMA: &str = "lsd-trace/v1";
pub const CURVES_SCHEMA: &str = "lsd-curves/v1";
pub const SUMMARY_SCHEMA: &str = "lsd-summary/v1";

/// Stream coordinate standing in for the algorithm index in paired runs.
const SHARED_ENV: u64 = u64::MAX;

/// Steps per round of `spec`: blocks of `d + 1` for the calibrated learner,
/// `d` for vanilla CombUCB1, `K + d` for calibration sequences.
pub fn round_len(spec: &AlgoSpec, arms: usize, d: usize) -> usize {
    match spec {
        AlgoSpec::Isi => d + 1,
        AlgoSpec::CombUcb1 => d,
        AlgoSpec::Cs(_) => arms + d,
        AlgoSpec::OracleGreedy => 1,
    }
}

/// `horizon` rounded up to a multiple of `len`.
pub fn effective_horizon(horizon: usize, len: usize) -> usize {
    horizon.div_ceil(len) * len
}

pub fn build_learner(
    spec: &AlgoSpec,
    arms: usize,
    cfg: &ExperimentConfig,
    regime: Regime,
    policy_seed: u64,
) -> Result<Box<dyn Learner>> {
    let d = cfg.block_size;
    Ok(match spec {
        AlgoSpec::Isi => Box::new(IsiCombUcb1::with_cells(arms, d, cfg.alpha, regime)?),
        AlgoSpec::CombUcb1 => Box::new(CombUcb1::with_block(arms, d, cfg.alpha, regime)?),
        AlgoSpec::Cs(perm) => {
            if perm.len() != arms {
                bail!(
                    "{spec}: permutation has {} arms, the instance has {arms}",
                    perm.len()
                );
            }
            Box::new(CalibrationSequence::with_block(
                perm.clone(),
                d,
                cfg.alpha,
                regime,
            )?)
        }
        AlgoSpec::OracleGreedy => Box::new(OracleGreedy::new(seeded_rng(policy_seed))),
    })
}

pub struct AlgoRun {
    pub spec: AlgoSpec,
    pub round_len: usize,
    pub horizon: usize,
    pub traces: Vec<RunTrace>,
}

impl AlgoRun {
    pub fn name(&self) -> String {
        self.spec.to_string()
    }

    /// Mean over repetitions of the per-step reward over the last quarter.
    pub fn tail_mean(&self, expected: bool) -> f64 {
        let vals: Vec<f64> = self
            .traces
            .iter()
            .map(|t| tail_average(t, 0.25, expected))
            .collect();
        vals.iter().sum::<f64>() / vals.len() as f64
    }

    pub fn finals(&self) -> Vec<f64> {
        self.traces.iter().map(RunTrace::total_reward).collect()
    }

    /// Mean and sample standard deviation of cumulative reward at each step.
    pub fn curve(&self) -> Vec<(f64, f64)> {
        let cums: Vec<Vec<f64>> = self.traces.iter().map(RunTrace::cumulative).collect();
        (0..self.horizon)
            .map(|t| mean_sd(cums.iter().map(|c| c[t])))
            .collect()
    }
}

/// Average per-step reward over the final `fraction` of the trace.
pub fn tail_average(trace: &RunTrace, fraction: f64, expected: bool) -> f64 {
    let n = trace.steps.len();
    let k = ((n as f64 * fraction).round() as usize).clamp(1, n);
    let tail = &trace.steps[n - k..];
    tail.iter()
        .map(|s| if expected { s.expected } else { s.reward })
        .sum::<f64>()
        / k as f64
}

pub fn mean_sd(xs: impl Iterator<Item = f64>) -> (f64, f64) {
    let v: Vec<f64> = xs.collect();
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

pub struct Experiment {
    pub config: ExperimentConfig,
    pub arms: usize,
    pub regime: Regime,
    pub runs: Vec<AlgoRun>,
}

/// Picks the regime: the configured one if any, else the table's own. A
/// constant-negative encoding is refused for tables that need the general one.
pub fn resolve_regime(cfg: &ExperimentConfig, table: &RewardTable) -> Result<Regime> {
    let native = Regime::for_table(table);
    match cfg.regime {
        None => Ok(native),
        Some(Regime::ConstantNegative) if native == Regime::General => {
            bail!("field `regime`: the instance is not constant on negative states, use `general`")
        }
        Some(r) => Ok(r),
    }
}

pub fn run_experiment(cfg: &ExperimentConfig, table: &RewardTable) -> Result<Experiment> {
    cfg.validate()?;
    let regime = resolve_regime(cfg, table)?;
    let arms = table.arms();
    let table = Arc::new(table.clone());
    let mut runs = Vec::with_capacity(cfg.algos.len());
    for (a, spec) in cfg.algos.iter().enumerate() {
        let len = round_len(spec, arms, cfg.block_size);
        let horizon = effective_horizon(cfg.horizon, len);
        let mut traces = Vec::with_capacity(cfg.reps);
        for r in 0..cfg.reps {
            let stream = if cfg.paired { SHARED_ENV } else { a as u64 };
            let env_seed = derive_seed(cfg.seed, &[stream, r as u64, ENV_STREAM]);
            let policy_seed = derive_seed(cfg.seed, &[a as u64, r as u64, POLICY_STREAM]);
            let mut env = Environment::new(Arc::clone(&table), cfg.noise, env_seed);
            let mut learner = build_learner(spec, arms, cfg, regime, policy_seed)?;
            let trace = run(learner.as_mut(), &mut env, horizon)
                .with_context(|| format!("{spec}, repetition {r}"))?;
            info!("{spec} rep {r}: total reward {}", trace.total_reward());
            traces.push(trace);
        }
        runs.push(AlgoRun {
            spec: spec.clone(),
            round_len: len,
            horizon,
            traces,
        });
    }
    Ok(Experiment {
        config: cfg.clone(),
        arms,
        regime,
        runs,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgoSummary {
    pub name: String,
    pub round_len: usize,
    pub horizon: usize,
    pub final_mean: f64,
    pub final_sd: f64,
    pub finals: Vec<f64>,
    /// Per-step realised reward over the last quarter, averaged over reps.
    pub tail_mean_reward: f64,
    /// Same with expected rewards.
    pub tail_mean_expected: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub schema: String,
    pub arms: usize,
    pub regime: Regime,
    pub requested_horizon: usize,
    pub block_size: usize,
    pub alpha: f64,
    pub reps: usize,
    pub seed: u64,
    pub paired: bool,
    pub algorithms: Vec<AlgoSummary>,
}

impl Experiment {
    pub fn run(&self, spec: &AlgoSpec) -> Option<&AlgoRun> {
        self.runs.iter().find(|r| &r.spec == spec)
    }

    pub fn summary(&self) -> Summary {
        let algorithms = self
            .runs
            .iter()
            .map(|r| {
                let finals = r.finals();
                let (final_mean, final_sd) = mean_sd(finals.iter().copied());
                AlgoSummary {
                    name: r.name(),
                    round_len: r.round_len,
                    horizon: r.horizon,
                    final_mean,
                    final_sd,
                    finals,
                    tail_mean_reward: r.tail_mean(false),
                    tail_mean_expected: r.tail_mean(true),
                }
            })
            .collect();
        Summary {
            schema: SUMMARY_SCHEMA.into(),
            arms: self.arms,
            regime: self.regime,
            requested_horizon: self.config.horizon,
            block_size: self.config.block_size,
            alpha: self.config.alpha,
            reps: self.config.reps,
            seed: self.config.seed,
            paired: self.config.paired,
            algorithms,
        }
    }

    /// Per-step rows `rep,t,algo,arm,tau,reward,cum_reward`; arms are written
    /// 1-based and `t` starts at 1.
    pub fn write_trace(&self, out: impl Write) -> Result<()> {
        let mut out = BufWriter::new(out);
        writeln!(out, "# schema: {TRACE_SCHEMA}")?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["rep", "t", "algo", "arm", "tau", "reward", "cum_reward"])?;
        for run in &self.runs {
            let name = run.name();
            for (rep, trace) in run.traces.iter().enumerate() {
                let mut cum = 0.0;
                for s in &trace.steps {
                    cum += s.reward;
                    w.write_record([
                        rep.to_string(),
                        (s.t + 1).to_string(),
                        name.clone(),
                        (s.arm + 1).to_string(),
                        s.tau.to_string(),
                        s.reward.to_string(),
                        cum.to_string(),
                    ])?;
                }
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_curves(&self, out: impl Write) -> Result<()> {
        let mut out = BufWriter::new(out);
        writeln!(out, "# schema: {CURVES_SCHEMA}")?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "algo", "mean_cum_reward", "sd_cum_reward"])?;
        for run in &self.runs {
            let name = run.name();
            for (t, (m, sd)) in run.curve().into_iter().enumerate() {
                w.write_record([
                    (t + 1).to_string(),
                    name.clone(),
                    m.to_string(),
                    sd.to_string(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_outputs(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let create = |name: &str| -> io::Result<File> { File::create(dir.join(name)) };
        if self.config.write_trace {
            self.write_trace(create("trace.csv")?)?;
        }
        self.write_curves(create("curves.csv")?)?;
        let mut summary = serde_json::to_string_pretty(&self.summary())?;
        summary.push('\n');
        fs::write(dir.join("summary.json"), summary)?;
        Ok(())
    }
}
