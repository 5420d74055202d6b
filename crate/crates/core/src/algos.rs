//! Learners and the regret envelope.
//!
//! Block learners keep a [`UcbTable`], freeze it into a [`UcbSnapshot`] at the
//! start of each round, pick a block with the LP-guided solver, play it, and
//! only then fold the observed rewards into the statistics.

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::blocks::{InBlockPull, InBlockStates, Regime};
use crate::bnb::{solve_instance, BnbError, BnbResult};
use crate::env::{delay_of_state, Arm, EnvError, Environment, RewardTable, StateVector};
use crate::ilp::{encode, CellScheme, UcbSnapshot};
use crate::lp::SolverOptions;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgoError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Solver(#[from] BnbError),
    #[error(transparent)]
    Env(#[from] EnvError),
}

/// Per-cell pull counts, empirical means and upper confidence bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct UcbTable {
    arms: usize,
    scheme: CellScheme,
    alpha: f64,
    round: u64,
    counts: Vec<u64>,
    sums: Vec<f64>,
    ucb: Vec<Option<f64>>,
}

impl UcbTable {
    pub fn new(arms: usize, scheme: CellScheme, alpha: f64) -> Result<Self, AlgoError> {
        if alpha.is_nan() || alpha <= 0.0 {
            return Err(AlgoError::Config(format!(
                "alpha = {alpha} must be positive"
            )));
        }
        if arms == 0 || scheme.cells() == 0 {
            return Err(AlgoError::Config("UCB table needs arms and cells".into()));
        }
        let n = arms * scheme.width();
        Ok(Self {
            arms,
            scheme,
            alpha,
            round: 0,
            counts: vec![0; n],
            sums: vec![0.0; n],
            ucb: vec![None; n],
        })
    }

    pub fn scheme(&self) -> CellScheme {
        self.scheme
    }

    pub fn arms(&self) -> usize {
        self.arms
    }

    pub fn round(&self) -> u64 {
        self.round
    }

    fn slot(&self, arm: Arm, offset: usize) -> usize {
        arm * self.scheme.width() + offset
    }

    /// Folds a reward into the cell at `offset` of `arm`. UCBs only move at
    /// [`UcbTable::end_round`].
    pub fn record(&mut self, arm: Arm, offset: usize, reward: f64) {
        let k = self.slot(arm, offset);
        self.counts[k] += 1;
        self.sums[k] += reward;
    }

    pub fn end_round(&mut self) {
        self.round += 1;
        let log_term = self.alpha * ((self.round + 1) as f64).ln();
        for k in 0..self.counts.len() {
            if self.counts[k] > 0 {
                let n = self.counts[k] as f64;
                self.ucb[k] = Some(self.sums[k] / n + (log_term / n).sqrt());
            }
        }
    }

    pub fn count(&self, arm: Arm, offset: usize) -> u64 {
        self.counts[self.slot(arm, offset)]
    }

    pub fn mean(&self, arm: Arm, offset: usize) -> Option<f64> {
        let k = self.slot(arm, offset);
        (self.counts[k] > 0).then(|| self.sums[k] / self.counts[k] as f64)
    }

    pub fn ucb(&self, arm: Arm, offset: usize) -> Option<f64> {
        self.ucb[self.slot(arm, offset)]
    }

    /// Stand-in for an infinite bound, large enough that one uninitialised
    /// cell outweighs any block of `len` initialised ones.
    pub fn sentinel(&self, len: usize) -> f64 {
        let max = self.ucb.iter().flatten().fold(0.0_f64, |m, &u| m.max(u));
        len as f64 * (1.0 + max) + 1.0
    }

    pub fn snapshot(&self, len: usize) -> UcbSnapshot {
        let m = self.sentinel(len);
        let values = self.ucb.iter().map(|u| u.unwrap_or(m)).collect();
        UcbSnapshot::new(self.arms, self.scheme, values).expect("table dimensions match the scheme")
    }
}

/// One environment step as seen by a learner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub t: u64,
    pub arm: Arm,
    pub tau: i64,
    pub reward: f64,
    pub expected: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    pub actions: Vec<Arm>,
    /// Objective value the learner assigned to its choice.
    pub estimate: f64,
}

/// A statistics update, recorded when auditing is on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellUpdate {
    pub arm: Arm,
    pub cell: i64,
    /// Delay (delay cells) or state (signed cells) the update was made for.
    pub observed: i64,
    /// Environment state of the arm at the pull.
    pub env_state: i64,
    pub first_pull: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunTrace {
    pub steps: Vec<StepRecord>,
    pub rounds: Vec<RoundRecord>,
}

impl RunTrace {
    pub fn cumulative(&self) -> Vec<f64> {
        self.steps
            .iter()
            .scan(0.0, |acc, s| {
                *acc += s.reward;
                Some(*acc)
            })
            .collect()
    }

    pub fn total_reward(&self) -> f64 {
        self.steps.iter().map(|s| s.reward).sum()
    }

    pub fn total_expected(&self) -> f64 {
        self.steps.iter().map(|s| s.expected).sum()
    }
}

pub trait Learner {
    fn name(&self) -> String;

    /// Number of steps played per round.
    fn round_len(&self) -> usize;

    fn play_round(&mut self, env: &mut Environment, trace: &mut RunTrace) -> Result<(), AlgoError>;
}

/// Runs `learner` for `horizon` steps, which must be a multiple of its round
/// length.
pub fn run(
    learner: &mut dyn Learner,
    env: &mut Environment,
    horizon: usize,
) -> Result<RunTrace, AlgoError> {
    let len = learner.round_len();
    if !horizon.is_multiple_of(len) {
        return Err(AlgoError::Config(format!(
            "horizon {horizon} is not a multiple of the round length {len}"
        )));
    }
    let mut trace = RunTrace {
        steps: Vec::with_capacity(horizon),
        rounds: Vec::with_capacity(horizon / len),
    };
    for _ in 0..horizon / len {
        learner.play_round(env, &mut trace)?;
    }
    Ok(trace)
}

fn play(env: &mut Environment, arm: Arm, trace: &mut RunTrace) -> Result<StepRecord, AlgoError> {
    let t = env.clock();
    let out = env.step(arm)?;
    let rec = StepRecord {
        t,
        arm,
        tau: out.tau,
        reward: out.reward,
        expected: out.expected,
    };
    trace.steps.push(rec);
    Ok(rec)
}

/// Shared configuration of the UCB block learners.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockConfig {
    pub block_len: usize,
    pub cells: usize,
    pub alpha: f64,
    pub regime: Regime,
}

impl BlockConfig {
    fn check(&self) -> Result<(), AlgoError> {
        if self.block_len == 0 {
            return Err(AlgoError::Config("block length must be positive".into()));
        }
        if self.cells == 0 {
            return Err(AlgoError::Config(
                "at least one state cell is required".into(),
            ));
        }
        Ok(())
    }

    fn scheme(&self) -> CellScheme {
        CellScheme::for_regime(self.regime, self.cells)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct UpdateAudit {
    pub enabled: bool,
    pub updates: Vec<CellUpdate>,
    pub first_pull_updates: u64,
    pub total_updates: u64,
}

impl UpdateAudit {
    fn note(&mut self, u: CellUpdate) {
        self.total_updates += 1;
        if u.first_pull {
            self.first_pull_updates += 1;
        }
        if self.enabled {
            self.updates.push(u);
        }
    }
}

/// CombUCB1 on the calibrated block problem: first pulls within a block are
/// treated as calibration and never update the statistics.
pub struct IsiCombUcb1 {
    cfg: BlockConfig,
    table: UcbTable,
    solver: SolverOptions,
    pub audit: UpdateAudit,
    pub last_solve: Option<BnbResult>,
}

impl IsiCombUcb1 {
    /// Blocks of `cfg.block_len` pulls; the cell count must cover the
    /// largest in-block delay, `block_len - 1`.
    pub fn new(arms: usize, cfg: BlockConfig) -> Result<Self, AlgoError> {
        cfg.check()?;
        if cfg.block_len >= 2 && cfg.cells + 1 < cfg.block_len {
            return Err(AlgoError::Config(format!(
                "{} cells cannot hold in-block delays up to {}",
                cfg.cells,
                cfg.block_len - 1
            )));
        }
        Ok(Self {
            cfg,
            table: UcbTable::new(arms, cfg.scheme(), cfg.alpha)?,
            solver: SolverOptions::default(),
            audit: UpdateAudit::default(),
            last_solve: None,
        })
    }

    /// Learner exposing delays up to `d` through blocks of `d + 1` pulls.
    pub fn with_cells(
        arms: usize,
        d: usize,
        alpha: f64,
        regime: Regime,
    ) -> Result<Self, AlgoError> {
        Self::new(
            arms,
            BlockConfig {
                block_len: d + 1,
                cells: d,
                alpha,
                regime,
            },
        )
    }

    pub fn table(&self) -> &UcbTable {
        &self.table
    }

    /// Block maximising the calibrated objective under `u`.
    pub fn choose_block(&self, u: &UcbSnapshot) -> Result<BnbResult, AlgoError> {
        let inst = encode(u, self.cfg.block_len, self.cfg.regime).map_err(BnbError::from)?;
        Ok(solve_instance(&inst, &self.solver)?)
    }
}

impl Learner for IsiCombUcb1 {
    fn name(&self) -> String {
        "isi".into()
    }

    fn round_len(&self) -> usize {
        self.cfg.block_len
    }

    fn play_round(&mut self, env: &mut Environment, trace: &mut RunTrace) -> Result<(), AlgoError> {
        let snapshot = self.table.snapshot(self.cfg.block_len);
        let res = self.choose_block(&snapshot)?;
        let scheme = self.cfg.scheme();
        let mut states = InBlockStates::new(env.arms());
        let mut pending = Vec::with_capacity(res.block.len());
        for &arm in res.block.actions() {
            let rec = play(env, arm, trace)?;
            if let InBlockPull::Repeat { state, delay } = states.pull(arm) {
                let (offset, observed) = match scheme {
                    CellScheme::Delay { .. } => (scheme.delay_offset(delay), delay as i64),
                    CellScheme::Signed { .. } => (scheme.state_offset(state), state),
                };
                pending.push((arm, offset, rec.reward));
                self.audit.note(CellUpdate {
                    arm,
                    cell: scheme.label(offset),
                    observed,
                    env_state: rec.tau,
                    first_pull: false,
                });
            }
        }
        for (arm, offset, reward) in pending {
            self.table.record(arm, offset, reward);
        }
        self.table.end_round();
        trace.rounds.push(RoundRecord {
            actions: res.block.actions().to_vec(),
            estimate: res.score,
        });
        self.last_solve = Some(res);
        Ok(())
    }
}

/// CombUCB1 over blocks valued by their plain expected reward. Every pull
/// updates the cell of the arm's true state, clamped to the table range.
pub struct CombUcb1 {
    cfg: BlockConfig,
    table: UcbTable,
    state: StateVector,
    solver: SolverOptions,
    pub audit: UpdateAudit,
}

impl CombUcb1 {
    pub fn new(arms: usize, cfg: BlockConfig) -> Result<Self, AlgoError> {
        cfg.check()?;
        Ok(Self {
            cfg,
            table: UcbTable::new(arms, cfg.scheme(), cfg.alpha)?,
            state: StateVector::initial(arms),
            solver: SolverOptions::default(),
            audit: UpdateAudit::default(),
        })
    }

    /// Blocks of `d` pulls with `d` cells; states from `d` on share a cell.
    pub fn with_block(
        arms: usize,
        d: usize,
        alpha: f64,
        regime: Regime,
    ) -> Result<Self, AlgoError> {
        Self::new(
            arms,
            BlockConfig {
                block_len: d,
                cells: d,
                alpha,
                regime,
            },
        )
    }

    pub fn table(&self) -> &UcbTable {
        &self.table
    }

    pub fn choose_block(
        &self,
        u: &UcbSnapshot,
        state: &StateVector,
    ) -> Result<BnbResult, AlgoError> {
        plain_block(u, state, self.cfg.block_len, self.cfg.regime, &self.solver)
    }
}

fn plain_block(
    u: &UcbSnapshot,
    state: &StateVector,
    len: usize,
    regime: Regime,
    solver: &SolverOptions,
) -> Result<BnbResult, AlgoError> {
    let mut inst = encode(u, len, regime).map_err(BnbError::from)?;
    inst.set_first_pull_objective(u, state);
    Ok(solve_instance(&inst, solver)?)
}

fn state_cell(scheme: CellScheme, tau: i64) -> (usize, i64) {
    match scheme {
        CellScheme::Delay { .. } => (scheme.state_offset(tau), delay_of_state(tau) as i64),
        CellScheme::Signed { .. } => (scheme.state_offset(tau), tau),
    }
}

impl Learner for CombUcb1 {
    fn name(&self) -> String {
        "combucb1".into()
    }

    fn round_len(&self) -> usize {
        self.cfg.block_len
    }

    fn play_round(&mut self, env: &mut Environment, trace: &mut RunTrace) -> Result<(), AlgoError> {
        let snapshot = self.table.snapshot(self.cfg.block_len);
        let res = self.choose_block(&snapshot, &self.state)?;
        let scheme = self.cfg.scheme();
        let mut pending = Vec::with_capacity(res.block.len());
        let mut seen = vec![false; env.arms()];
        for &arm in res.block.actions() {
            let tau = self.state.get(arm);
            let rec = play(env, arm, trace)?;
            let (offset, observed) = state_cell(scheme, tau);
            pending.push((arm, offset, rec.reward));
            self.audit.note(CellUpdate {
                arm,
                cell: scheme.label(offset),
                observed,
                env_state: rec.tau,
                first_pull: !std::mem::replace(&mut seen[arm], true),
            });
            self.state.advance(arm);
        }
        for (arm, offset, reward) in pending {
            self.table.record(arm, offset, reward);
        }
        self.table.end_round();
        trace.rounds.push(RoundRecord {
            actions: res.block.actions().to_vec(),
            estimate: res.score,
        });
        Ok(())
    }
}

/// Plays a fixed calibration permutation, then the UCB-best block for the
/// known post-calibration state. All pulls update their state cells.
pub struct CalibrationSequence {
    sigma: Vec<Arm>,
    cfg: BlockConfig,
    table: UcbTable,
    state: StateVector,
    solver: SolverOptions,
}

impl CalibrationSequence {
    pub fn new(sigma: Vec<Arm>, cfg: BlockConfig) -> Result<Self, AlgoError> {
        cfg.check()?;
        let arms = sigma.len();
        let mut sorted = sigma.clone();
        sorted.sort_unstable();
        if arms == 0 || sorted.iter().enumerate().any(|(i, &a)| i != a) {
            return Err(AlgoError::Config(format!(
                "{sigma:?} is not a permutation of the arms"
            )));
        }
        Ok(Self {
            sigma,
            cfg,
            table: UcbTable::new(arms, cfg.scheme(), cfg.alpha)?,
            state: StateVector::initial(arms),
            solver: SolverOptions::default(),
        })
    }

    /// Block of `d` pulls after the permutation; cells cover every state
    /// reachable within a round.
    pub fn with_block(
        sigma: Vec<Arm>,
        d: usize,
        alpha: f64,
        regime: Regime,
    ) -> Result<Self, AlgoError> {
        let cells = sigma.len() + d;
        Self::new(
            sigma,
            BlockConfig {
                block_len: d,
                cells,
                alpha,
                regime,
            },
        )
    }

    pub fn sigma(&self) -> &[Arm] {
        &self.sigma
    }

    /// State after playing the permutation, whatever the state before.
    pub fn calibrated_state(&self) -> StateVector {
        let mut s = StateVector::initial(self.sigma.len());
        for &a in &self.sigma {
            s.advance(a);
        }
        s
    }

    pub fn choose_block(&self, u: &UcbSnapshot) -> Result<BnbResult, AlgoError> {
        plain_block(
            u,
            &self.calibrated_state(),
            self.cfg.block_len,
            self.cfg.regime,
            &self.solver,
        )
    }

    fn pull(
        &mut self,
        env: &mut Environment,
        arm: Arm,
        trace: &mut RunTrace,
        pending: &mut Vec<(Arm, usize, f64)>,
    ) -> Result<(), AlgoError> {
        let tau = self.state.get(arm);
        let rec = play(env, arm, trace)?;
        pending.push((arm, state_cell(self.cfg.scheme(), tau).0, rec.reward));
        self.state.advance(arm);
        Ok(())
    }
}

impl Learner for CalibrationSequence {
    fn name(&self) -> String {
        let perm: Vec<String> = self.sigma.iter().map(|a| (a + 1).to_string()).collect();
        format!("cs:{}", perm.join("-"))
    }

    fn round_len(&self) -> usize {
        self.sigma.len() + self.cfg.block_len
    }

    fn play_round(&mut self, env: &mut Environment, trace: &mut RunTrace) -> Result<(), AlgoError> {
        let snapshot = self.table.snapshot(self.round_len());
        let mut pending = Vec::with_capacity(self.round_len());
        for i in 0..self.sigma.len() {
            let arm = self.sigma[i];
            self.pull(env, arm, trace, &mut pending)?;
        }
        let res = self.choose_block(&snapshot)?;
        for &arm in res.block.actions() {
            self.pull(env, arm, trace, &mut pending)?;
        }
        for (arm, offset, reward) in pending {
            self.table.record(arm, offset, reward);
        }
        self.table.end_round();
        let mut actions = self.sigma.clone();
        actions.extend_from_slice(res.block.actions());
        trace.rounds.push(RoundRecord {
            actions,
            estimate: res.score,
        });
        Ok(())
    }
}

/// Pulls the arm with the highest current mean, uniformly among ties.
pub struct OracleGreedy {
    rng: ChaCha8Rng,
}

impl OracleGreedy {
    pub fn new(rng: ChaCha8Rng) -> Self {
        Self { rng }
    }

    pub fn choose(&mut self, table: &RewardTable, state: &StateVector) -> Arm {
        let means: Vec<f64> = (0..table.arms())
            .map(|a| table.mean(a, state.get(a)))
            .collect();
        let best = means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let ties: Vec<Arm> = (0..means.len())
            .filter(|&a| means[a] >= best - 1e-12)
            .collect();
        if ties.len() == 1 {
            ties[0]
        } else {
            ties[self.rng.gen_range(0..ties.len())]
        }
    }
}

impl Learner for OracleGreedy {
    fn name(&self) -> String {
        "oracle_greedy".into()
    }

    fn round_len(&self) -> usize {
        1
    }

    fn play_round(&mut self, env: &mut Environment, trace: &mut RunTrace) -> Result<(), AlgoError> {
        let arm = self.choose(env.table(), env.state());
        let rec = play(env, arm, trace)?;
        trace.rounds.push(RoundRecord {
            actions: vec![arm],
            estimate: rec.expected,
        });
        Ok(())
    }
}

/// Closed-form regret bound for the calibrated learner with blocks of `d`
/// pulls over `t` steps.
pub fn regret_envelope(k: usize, d: usize, t: usize, regime: Regime) -> Result<f64, AlgoError> {
    if d == 0 || !t.is_multiple_of(d) {
        return Err(AlgoError::Config(format!(
            "block length {d} does not divide horizon {t}"
        )));
    }
    let (k, d, t) = (k as f64, d as f64, t as f64);
    let ln = (t / d).ln();
    let c = PI * PI / 3.0 + 1.0;
    Ok(match regime {
        Regime::ConstantNegative => k * t / d + 47.0 * d * (k * t * ln).sqrt() + c * k * d.powi(3),
        Regime::General => {
            (k + 2.0) * t / d + 47.0 * d * (2.0 * k * t * ln).sqrt() + c * 2.0 * k * d.powi(3)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocks::{brute_force_best_block, calibrated_reward, Objective};
    use crate::env::Noise;
    use crate::instances::{anti_kleinberg, appendix_c, sec4};
    use crate::rng::seeded_rng;
    use std::sync::Arc;

    fn env(table: RewardTable, noise: Noise, seed: u64) -> Environment {
        Environment::new(Arc::new(table), noise, seed)
    }

    #[test]
    fn ucb_bookkeeping() {
        let mut t = UcbTable::new(2, CellScheme::Delay { cells: 2 }, 1.5).unwrap();
        assert_eq!(t.sentinel(3), 4.0);
        t.record(0, 1, 1.0);
        t.record(0, 1, 0.0);
        assert_eq!(t.ucb(0, 1), None);
        t.end_round();
        let expect = 0.5 + (1.5 * 2f64.ln() / 2.0).sqrt();
        assert!((t.ucb(0, 1).unwrap() - expect).abs() < 1e-12);
        assert_eq!(t.mean(0, 1), Some(0.5));
        assert_eq!(t.count(1, 0), 0);
        assert_eq!(t.ucb(1, 0), None);
        let s = t.snapshot(3);
        assert_eq!(s.at_delay(1, 1), 3.0 * (1.0 + expect) + 1.0);
        assert!(UcbTable::new(2, CellScheme::Delay { cells: 2 }, 0.0).is_err());
    }

    #[test]
    fn first_round_explores_uninitialised_cells() {
        let table = sec4();
        let mut isi = IsiCombUcb1::with_cells(5, 3, 1.5, Regime::ConstantNegative).unwrap();
        let mut e = env(table, Noise::Bernoulli, 1);
        let mut trace = RunTrace::default();
        isi.play_round(&mut e, &mut trace).unwrap();
        // Blocks of 4 have at most 3 non-first pulls, all scored at the sentinel.
        let block = &trace.rounds[0].actions;
        let firsts = crate::blocks::Block::new(block.clone(), 5)
            .unwrap()
            .distinct_arms();
        assert_eq!(firsts, 1);
        assert_eq!(isi.audit.total_updates, 3);
    }

    #[test]
    fn isi_never_learns_from_first_pulls() {
        let mut isi = IsiCombUcb1::with_cells(5, 3, 1.5, Regime::ConstantNegative).unwrap();
        isi.audit.enabled = true;
        let mut e = env(sec4(), Noise::Bernoulli, 3);
        run(&mut isi, &mut e, 400).unwrap();
        assert_eq!(isi.audit.first_pull_updates, 0);
        assert!(isi.audit.total_updates > 0);
        for u in &isi.audit.updates {
            assert_eq!(u.cell, u.observed.clamp(1, 3));
            // Delay cells see the true delay of the pull.
            assert_eq!(delay_of_state(u.env_state) as i64, u.observed);
        }
    }

    #[test]
    fn isi_deterministic_means_are_exact() {
        let table = sec4();
        let mut isi = IsiCombUcb1::with_cells(5, 3, 1.5, Regime::ConstantNegative).unwrap();
        let mut e = env(table.clone(), Noise::Expected, 0);
        run(&mut isi, &mut e, 4 * 200).unwrap();
        for a in 0..5 {
            for j in 1..=3usize {
                if let Some(m) = isi.table().mean(a, j - 1) {
                    assert!((m - table.mean(a, crate::env::state_of_delay(j))).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn isi_true_means_match_oracle() {
        let table = sec4();
        let isi = IsiCombUcb1::with_cells(5, 3, 1.5, Regime::ConstantNegative).unwrap();
        let u = UcbSnapshot::true_means(&table, isi.table().scheme());
        let res = isi.choose_block(&u).unwrap();
        let (_, best) = brute_force_best_block(
            &table,
            4,
            &Objective::Calibrated(Regime::ConstantNegative),
            1 << 20,
        )
        .unwrap();
        let got = calibrated_reward(&res.block, &table, Regime::ConstantNegative)
            .unwrap()
            .total;
        assert!((got - best).abs() < 1e-12);
    }

    #[test]
    fn vanilla_updates_true_state_cells() {
        let mut v = CombUcb1::with_block(5, 3, 1.5, Regime::ConstantNegative).unwrap();
        v.audit.enabled = true;
        let mut e = env(sec4(), Noise::Bernoulli, 9);
        run(&mut v, &mut e, 300).unwrap();
        assert_eq!(v.audit.total_updates, 300);
        for u in &v.audit.updates {
            assert_eq!(u.cell, (delay_of_state(u.env_state) as i64).min(3));
        }
        let mut g = CombUcb1::with_block(2, 3, 1.5, Regime::General).unwrap();
        g.audit.enabled = true;
        let mut e = env(appendix_c(), Noise::Bernoulli, 9);
        run(&mut g, &mut e, 300).unwrap();
        for u in &g.audit.updates {
            assert_eq!(u.cell, u.env_state.clamp(-3, 3));
        }
    }

    #[test]
    fn calibration_sequence_blocks() {
        let table = sec4();
        let cs =
            CalibrationSequence::with_block(vec![4, 3, 2, 1, 0], 4, 1.5, Regime::ConstantNegative)
                .unwrap();
        assert_eq!(cs.name(), "cs:5-4-3-2-1");
        assert_eq!(cs.round_len(), 9);
        let u = UcbSnapshot::true_means(&table, CellScheme::Delay { cells: 9 });
        let res = cs.choose_block(&u).unwrap();
        let init = cs.calibrated_state();
        let (_, best) =
            brute_force_best_block(&table, 4, &Objective::Plain(init), 1 << 20).unwrap();
        assert!((res.score - best).abs() < 1e-9, "{res}");
        assert!(
            CalibrationSequence::with_block(vec![0, 0], 2, 1.5, Regime::ConstantNegative).is_err()
        );
        let single =
            CalibrationSequence::with_block(vec![0], 1, 1.5, Regime::ConstantNegative).unwrap();
        let mut e = env(
            RewardTable::from_fn(1, 2, |_, _| 0.5).unwrap(),
            Noise::Expected,
            0,
        );
        let trace = run(&mut { single }, &mut e, 20).unwrap();
        assert!(trace.steps.iter().all(|s| s.arm == 0));
    }

    #[test]
    fn greedy_on_anti_kleinberg() {
        let eps = 0.01;
        let mut g = OracleGreedy::new(seeded_rng(5));
        let mut e = env(anti_kleinberg(eps).unwrap(), Noise::Expected, 0);
        let trace = run(&mut g, &mut e, 1000).unwrap();
        assert!(trace.steps.iter().all(|s| s.arm == 0));
        assert!((trace.total_expected() - (1.0 + 999.0 * eps)).abs() < 1e-9);
    }

    #[test]
    fn greedy_breaks_ties_uniformly() {
        let flat = RewardTable::from_fn(3, 1, |_, _| 0.5).unwrap();
        let mut g = OracleGreedy::new(seeded_rng(11));
        let mut counts = [0usize; 3];
        for _ in 0..3000 {
            counts[g.choose(&flat, &StateVector::initial(3))] += 1;
        }
        assert!(
            counts.iter().all(|&c| (800..1200).contains(&c)),
            "{counts:?}"
        );
    }

    #[test]
    fn envelope_formula() {
        let v = regret_envelope(5, 4, 400, Regime::ConstantNegative).unwrap();
        let expect = 500.0 + 188.0 * (2000.0 * 100f64.ln()).sqrt() + (PI * PI / 3.0 + 1.0) * 320.0;
        assert!((v - expect).abs() < 1e-9);
        assert!(regret_envelope(5, 3, 400, Regime::ConstantNegative).is_err());
        let at_t = regret_envelope(3, 8, 8, Regime::ConstantNegative).unwrap();
        assert!((at_t - (3.0 + (PI * PI / 3.0 + 1.0) * 3.0 * 512.0)).abs() < 1e-9);
    }

    #[test]
    fn horizon_must_divide() {
        let mut isi = IsiCombUcb1::with_cells(2, 2, 1.5, Regime::ConstantNegative).unwrap();
        let mut e = env(appendix_c(), Noise::Bernoulli, 0);
        assert!(run(&mut isi, &mut e, 10).is_err());
    }
}
