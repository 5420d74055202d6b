//! Block-value calculus and brute-force oracles.
//!
//! A block is a fixed-length sequence of pulls. Its plain value depends on the
//! state the system is in when the block starts; its *calibrated* value
//! ignores each arm's first pull in the block and is state-independent.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::env::{Arm, RewardTable, StateVector};

/// Which family of reward tables the block machinery targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Rewards constant over the negative states. Consecutive pulls are
    /// interchangeable, any block is admissible.
    ConstantNegative,
    /// Rewards only nondecreasing over the negative states. Admissible
    /// blocks must start with two different arms.
    General,
}

impl Regime {
    pub fn for_table(table: &RewardTable) -> Self {
        if table.constant_negative() {
            Regime::ConstantNegative
        } else {
            Regime::General
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BlockError {
    #[error("a block needs at least one action")]
    Empty,
    #[error("arm {arm} out of range for {arms} arms")]
    ArmOutOfRange { arm: Arm, arms: usize },
    #[error("general-regime blocks must start with two different arms")]
    RegimeViolation,
    #[error("block length {block} does not divide horizon {horizon}")]
    NonDividingHorizon { block: usize, horizon: usize },
    #[error("enumeration of {size} candidates exceeds the cap of {cap}")]
    CapExceeded { size: u128, cap: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Block(Vec<Arm>);

impl Block {
    pub fn new(actions: Vec<Arm>, arms: usize) -> Result<Self, BlockError> {
        if actions.is_empty() {
            return Err(BlockError::Empty);
        }
        if let Some(&arm) = actions.iter().find(|&&a| a >= arms) {
            return Err(BlockError::ArmOutOfRange { arm, arms });
        }
        Ok(Self(actions))
    }

    pub fn actions(&self) -> &[Arm] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_vec(self) -> Vec<Arm> {
        self.0
    }

    /// Whether this block is admissible in `regime`.
    pub fn is_valid_for(&self, regime: Regime) -> bool {
        match regime {
            Regime::ConstantNegative => true,
            Regime::General => self.0.len() < 2 || self.0[0] != self.0[1],
        }
    }

    /// `first_pulls()[s]` is true iff position `s` is the first occurrence of
    /// its arm in the block.
    pub fn first_pulls(&self) -> Vec<bool> {
        let mut seen = Vec::new();
        self.0
            .iter()
            .map(|a| {
                if seen.contains(a) {
                    false
                } else {
                    seen.push(*a);
                    true
                }
            })
            .collect()
    }

    /// Number of distinct arms in the block.
    pub fn distinct_arms(&self) -> usize {
        self.first_pulls().iter().filter(|&&b| b).count()
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "]")
    }
}

/// Value of a block, step by step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockValue {
    pub total: f64,
    pub per_step: Vec<f64>,
    pub first_pull: Vec<bool>,
}

/// Tracks in-block states of arms from their first pull on, without knowing
/// the state the block started in.
///
/// After a first pull the arm is treated as coming from a positive state, so
/// its next state is -1. This is exact for every later pull when rewards are
/// constant on the negatives, and in general whenever the first two pulls
/// differ.
#[derive(Debug, Clone)]
pub struct InBlockStates {
    states: Vec<Option<i64>>,
    last_pull: Vec<Option<usize>>,
    time: usize,
}

/// What an in-block pull looks like to the calibrated bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InBlockPull {
    First,
    /// Later pull: state and delay since the previous pull of the same arm.
    Repeat {
        state: i64,
        delay: usize,
    },
}

impl InBlockStates {
    pub fn new(arms: usize) -> Self {
        Self {
            states: vec![None; arms],
            last_pull: vec![None; arms],
            time: 0,
        }
    }

    /// Registers a pull of `arm` at the next position and reports how it is
    /// seen by the calibrated accounting.
    pub fn pull(&mut self, arm: Arm) -> InBlockPull {
        let seen = match (self.states[arm], self.last_pull[arm]) {
            (Some(state), Some(last)) => InBlockPull::Repeat {
                state,
                delay: self.time - last,
            },
            _ => InBlockPull::First,
        };
        for (a, st) in self.states.iter_mut().enumerate() {
            *st = match (a == arm, *st) {
                (true, None) => Some(-1),
                (true, Some(t)) if t < 0 => Some(t - 1),
                (true, Some(_)) => Some(-1),
                (false, Some(t)) if t < 0 => Some(1),
                (false, Some(t)) => Some(t + 1),
                (false, None) => None,
            };
        }
        self.last_pull[arm] = Some(self.time);
        self.time += 1;
        seen
    }
}

/// State of an arm at block position `t` (0-based) when it has not been
/// pulled earlier in the block and was in state `tau_init` at position 0.
pub fn first_pull_state(tau_init: i64, t: usize) -> i64 {
    debug_assert!(tau_init != 0);
    match (tau_init > 0, t) {
        (true, _) => tau_init + t as i64,
        (false, 0) => tau_init,
        (false, _) => t as i64,
    }
}

/// Plain expected value `r(B | tau_init)` and the state reached after `B`.
pub fn block_reward(
    block: &Block,
    tau_init: &StateVector,
    table: &RewardTable,
) -> (BlockValue, StateVector) {
    let mut state = tau_init.clone();
    let mut per_step = Vec::with_capacity(block.len());
    for &a in block.actions() {
        per_step.push(table.mean(a, state.get(a)));
        state.advance(a);
    }
    let total = per_step.iter().sum();
    (
        BlockValue {
            total,
            per_step,
            first_pull: block.first_pulls(),
        },
        state,
    )
}

/// Calibrated value: each arm's first pull in the block is masked out and
/// later pulls are valued from the states they reach after it.
pub fn calibrated_reward(
    block: &Block,
    table: &RewardTable,
    regime: Regime,
) -> Result<BlockValue, BlockError> {
    if !block.is_valid_for(regime) {
        return Err(BlockError::RegimeViolation);
    }
    let mut tracker = InBlockStates::new(table.arms());
    let mut per_step = Vec::with_capacity(block.len());
    let mut first_pull = Vec::with_capacity(block.len());
    for &a in block.actions() {
        match tracker.pull(a) {
            InBlockPull::First => {
                per_step.push(0.0);
                first_pull.push(true);
            }
            InBlockPull::Repeat { state, .. } => {
                per_step.push(table.mean(a, state));
                first_pull.push(false);
            }
        }
    }
    let total = per_step.iter().sum();
    Ok(BlockValue {
        total,
        per_step,
        first_pull,
    })
}

/// Exact expected total reward of repeating `block` for `horizon` steps from
/// the all-ones state.
pub fn cyclic_value(block: &Block, table: &RewardTable, horizon: usize) -> Result<f64, BlockError> {
    let d = block.len();
    if !horizon.is_multiple_of(d) {
        return Err(BlockError::NonDividingHorizon { block: d, horizon });
    }
    let plays = horizon / d;
    let orbit = CyclicOrbit::compute(block, table);
    Ok(orbit.total_over(plays))
}

/// Long-run per-step average reward of repeating `block` forever.
pub fn cyclic_average(block: &Block, table: &RewardTable) -> f64 {
    let orbit = CyclicOrbit::compute(block, table);
    let cycle = &orbit.values[orbit.cycle_start..];
    cycle.iter().sum::<f64>() / (cycle.len() * block.len()) as f64
}

/// Per-play values of a repeated block: a transient prefix followed by a
/// cycle. States are compared after clamping to the table's saturation range,
/// which preserves every future reward, so the orbit is finite.
struct CyclicOrbit {
    values: Vec<f64>,
    cycle_start: usize,
}

impl CyclicOrbit {
    fn compute(block: &Block, table: &RewardTable) -> Self {
        let mut seen: HashMap<Vec<i64>, usize> = HashMap::new();
        let mut state = StateVector::initial(table.arms());
        let mut values = Vec::new();
        loop {
            let key: Vec<i64> = state
                .as_slice()
                .iter()
                .map(|&s| table.canonical_state(s))
                .collect();
            if let Some(&start) = seen.get(&key) {
                return Self {
                    values,
                    cycle_start: start,
                };
            }
            seen.insert(key, values.len());
            let (v, next) = block_reward(block, &state, table);
            values.push(v.total);
            state = next;
        }
    }

    fn total_over(&self, plays: usize) -> f64 {
        if plays <= self.values.len() {
            return self.values[..plays].iter().sum();
        }
        let prefix: f64 = self.values[..self.cycle_start].iter().sum();
        let cycle = &self.values[self.cycle_start..];
        let remaining = plays - self.cycle_start;
        let full = remaining / cycle.len();
        let rest = remaining % cycle.len();
        prefix + full as f64 * cycle.iter().sum::<f64>() + cycle[..rest].iter().sum::<f64>()
    }
}

/// Objective for the block oracle.
#[derive(Debug, Clone, PartialEq)]
pub enum Objective {
    /// `r(B | tau_init)`.
    Plain(StateVector),
    /// `r~(B)`, restricted to admissible blocks of the regime.
    Calibrated(Regime),
    /// `r(B | tau_B)` where `tau_B` is reached by playing `B` from all ones.
    DoublePlay,
}

/// Enumeration limits for the brute-force oracles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct EnumerationCaps {
    pub blocks: u64,
    pub sequences: u64,
}

impl Default for EnumerationCaps {
    fn default() -> Self {
        Self {
            blocks: 10_000_000,
            sequences: 10_000_000,
        }
    }
}

fn check_cap(arms: usize, len: usize, cap: u64) -> Result<(), BlockError> {
    let size = (arms as u128).checked_pow(len as u32).unwrap_or(u128::MAX);
    if size > cap as u128 {
        return Err(BlockError::CapExceeded { size, cap });
    }
    Ok(())
}

/// All `arms^len` blocks in lexicographic order.
pub fn all_blocks(arms: usize, len: usize) -> impl Iterator<Item = Block> {
    let mut next = if arms == 0 || len == 0 {
        None
    } else {
        Some(vec![0; len])
    };
    std::iter::from_fn(move || {
        let current = next.take()?;
        let mut succ = current.clone();
        // Odometer increment, last position fastest.
        let mut pos = len;
        while pos > 0 {
            pos -= 1;
            succ[pos] += 1;
            if succ[pos] < arms {
                next = Some(succ);
                break;
            }
            succ[pos] = 0;
        }
        Some(Block(current))
    })
}

/// Oracle answer, exportable as a golden file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub block: Vec<Arm>,
    pub value: f64,
}

pub fn objective_value(block: &Block, table: &RewardTable, objective: &Objective) -> Option<f64> {
    match objective {
        Objective::Plain(init) => Some(block_reward(block, init, table).0.total),
        Objective::Calibrated(regime) => calibrated_reward(block, table, *regime)
            .ok()
            .map(|v| v.total),
        Objective::DoublePlay => {
            let (_, after) = block_reward(block, &StateVector::initial(table.arms()), table);
            Some(block_reward(block, &after, table).0.total)
        }
    }
}

/// Exhaustive maximiser over blocks of length `d`; ties go to the
/// lexicographically smallest block.
pub fn brute_force_best_block(
    table: &RewardTable,
    d: usize,
    objective: &Objective,
    cap: u64,
) -> Result<(Block, f64), BlockError> {
    if d == 0 {
        return Err(BlockError::Empty);
    }
    check_cap(table.arms(), d, cap)?;
    let mut best: Option<(Block, f64)> = None;
    for block in all_blocks(table.arms(), d) {
        let Some(v) = objective_value(&block, table, objective) else {
            continue;
        };
        if best.as_ref().is_none_or(|(_, bv)| v > *bv) {
            best = Some((block, v));
        }
    }
    Ok(best.expect("at least one admissible block exists"))
}

/// Exhaustive optimal action sequence of length `horizon` from all ones.
pub fn brute_force_best_sequence(
    table: &RewardTable,
    horizon: usize,
    cap: u64,
) -> Result<(Vec<Arm>, f64), BlockError> {
    check_cap(table.arms(), horizon, cap)?;
    struct Search<'a> {
        table: &'a RewardTable,
        horizon: usize,
        prefix: Vec<Arm>,
        best: Option<(Vec<Arm>, f64)>,
    }
    impl Search<'_> {
        fn go(&mut self, state: &StateVector, acc: f64) {
            if self.prefix.len() == self.horizon {
                if self.best.as_ref().is_none_or(|(_, b)| acc > *b) {
                    self.best = Some((self.prefix.clone(), acc));
                }
                return;
            }
            for a in 0..self.table.arms() {
                let r = self.table.mean(a, state.get(a));
                let mut next = state.clone();
                next.advance(a);
                self.prefix.push(a);
                self.go(&next, acc + r);
                self.prefix.pop();
            }
        }
    }
    let mut search = Search {
        table,
        horizon,
        prefix: Vec::with_capacity(horizon),
        best: None,
    };
    search.go(&StateVector::initial(table.arms()), 0.0);
    Ok(search.best.unwrap_or((Vec::new(), 0.0)))
}

/// Best long-run cyclic average over all blocks of length `1..=max_len`;
/// used as a stand-in for the optimum when sequences are too long to
/// enumerate.
pub fn best_cycle_average(
    table: &RewardTable,
    max_len: usize,
    cap: u64,
) -> Result<(Block, f64), BlockError> {
    let mut best: Option<(Block, f64)> = None;
    for len in 1..=max_len {
        check_cap(table.arms(), len, cap)?;
        for block in all_blocks(table.arms(), len) {
            let v = cyclic_average(&block, table);
            if best.as_ref().is_none_or(|(_, b)| v > *b + 1e-15) {
                best = Some((block, v));
            }
        }
    }
    best.ok_or(BlockError::Empty)
}
