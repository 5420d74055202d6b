//! The LSD environment: reward tables, the last-switch state machine and the
//! Bernoulli reward generator.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::seeded_rng;

/// Arm index, 0-based.
pub type Arm = usize;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnvError {
    #[error("last-switch state 0 is not a valid state")]
    ZeroState,
    #[error("arm {arm} out of range for an environment with {arms} arms")]
    ArmOutOfRange { arm: Arm, arms: usize },
    #[error("invalid reward table: {0}")]
    InvalidTable(String),
    #[error("invalid state vector: {0}")]
    InvalidState(String),
    #[error("malformed instance file: {0}")]
    Instance(String),
}

/// Applies one step of the last-switch transition to an arm in state `tau`.
///
/// `played` tells whether this arm is the one pulled at the current step.
pub fn transition(tau: i64, played: bool) -> Result<i64, EnvError> {
    match (played, tau) {
        (_, 0) => Err(EnvError::ZeroState),
        (true, t) if t < 0 => Ok(t - 1),
        (true, _) => Ok(-1),
        (false, t) if t < 0 => Ok(1),
        (false, t) => Ok(t + 1),
    }
}

/// Delay of a pull made in last-switch state `tau`: the number of steps since
/// the arm was last pulled, with a consecutive pull at delay 1.
///
/// Only meaningful after the arm has been pulled at least once.
pub fn delay_of_state(tau: i64) -> usize {
    if tau < 0 {
        1
    } else {
        tau as usize + 1
    }
}

/// Inverse of [`delay_of_state`] on the canonical representative: delay 1 is
/// the first consecutive-pull state.
pub fn state_of_delay(delay: usize) -> i64 {
    assert!(delay >= 1, "delays start at 1");
    if delay == 1 {
        -1
    } else {
        delay as i64 - 1
    }
}

/// Expected reward curve of one arm, listed outward from state 1 (resp. -1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmCurve {
    pub values_neg: Vec<f64>,
    pub values_pos: Vec<f64>,
}

/// Per-arm expected rewards `mu_a(tau)` on `{-tau_max..-1} U {1..tau_max}`,
/// saturated beyond `tau_max` on both sides.
#[derive(Debug, Clone, PartialEq)]
pub struct RewardTable {
    arms: Vec<ArmCurve>,
    tau_max: usize,
    constant_negative: bool,
}

impl RewardTable {
    pub fn new(tau_max: usize, arms: Vec<ArmCurve>) -> Result<Self, EnvError> {
        if tau_max == 0 {
            return Err(EnvError::InvalidTable("tau_max must be positive".into()));
        }
        if arms.is_empty() {
            return Err(EnvError::InvalidTable(
                "at least one arm is required".into(),
            ));
        }
        for (a, curve) in arms.iter().enumerate() {
            if curve.values_neg.len() != tau_max || curve.values_pos.len() != tau_max {
                return Err(EnvError::InvalidTable(format!(
                    "arm {a}: expected {tau_max} values per side, got {} negative and {} positive",
                    curve.values_neg.len(),
                    curve.values_pos.len()
                )));
            }
            for v in curve.values_neg.iter().chain(&curve.values_pos) {
                if !(0.0..=1.0).contains(v) {
                    return Err(EnvError::InvalidTable(format!(
                        "arm {a}: value {v} outside [0, 1]"
                    )));
                }
            }
            // mu nondecreasing on the negatives: mu(-j) <= mu(-j+1).
            if let Some(k) = (1..tau_max).find(|&k| curve.values_neg[k] > curve.values_neg[k - 1]) {
                return Err(EnvError::InvalidTable(format!(
                    "arm {a}: mu(-{}) = {} exceeds mu(-{}) = {}",
                    k + 1,
                    curve.values_neg[k],
                    k,
                    curve.values_neg[k - 1]
                )));
            }
        }
        let constant_negative = arms
            .iter()
            .all(|c| c.values_neg.iter().all(|&v| v == c.values_neg[0]));
        Ok(Self {
            arms,
            tau_max,
            constant_negative,
        })
    }

    /// Builds a table by evaluating `mu(arm, tau)` on every stored state.
    pub fn from_fn(
        arms: usize,
        tau_max: usize,
        mu: impl Fn(Arm, i64) -> f64,
    ) -> Result<Self, EnvError> {
        let curves = (0..arms)
            .map(|a| ArmCurve {
                values_neg: (1..=tau_max as i64).map(|j| mu(a, -j)).collect(),
                values_pos: (1..=tau_max as i64).map(|j| mu(a, j)).collect(),
            })
            .collect();
        Self::new(tau_max, curves)
    }

    /// Builds a table from reward curves indexed by pull delay (steps since
    /// the previous pull, consecutive pulls at delay 1) saturating at
    /// `max_delay`.
    ///
    /// A pull at delay `j >= 2` happens in state `j - 1`, and every
    /// consecutive pull gets the delay-1 value, so the result is constant on
    /// the negative states.
    pub fn from_delay_fn(
        arms: usize,
        max_delay: usize,
        mu: impl Fn(Arm, usize) -> f64,
    ) -> Result<Self, EnvError> {
        let tau_max = max_delay.saturating_sub(1).max(1);
        Self::from_fn(arms, tau_max, |a, tau| {
            mu(a, delay_of_state(tau).min(max_delay.max(1)))
        })
    }

    pub fn arms(&self) -> usize {
        self.arms.len()
    }

    pub fn tau_max(&self) -> usize {
        self.tau_max
    }

    pub fn constant_negative(&self) -> bool {
        self.constant_negative
    }

    pub fn curves(&self) -> &[ArmCurve] {
        &self.arms
    }

    /// `mu_arm(tau)` with saturation; rejects `tau = 0`.
    pub fn expected_reward(&self, arm: Arm, tau: i64) -> Result<f64, EnvError> {
        if arm >= self.arms.len() {
            return Err(EnvError::ArmOutOfRange {
                arm,
                arms: self.arms.len(),
            });
        }
        if tau == 0 {
            return Err(EnvError::ZeroState);
        }
        Ok(self.mean(arm, tau))
    }

    /// Unchecked lookup for states known to be valid.
    #[inline]
    pub fn mean(&self, arm: Arm, tau: i64) -> f64 {
        debug_assert!(tau != 0);
        let idx = (tau.unsigned_abs() as usize).min(self.tau_max) - 1;
        let curve = &self.arms[arm];
        if tau > 0 {
            curve.values_pos[idx]
        } else {
            curve.values_neg[idx]
        }
    }

    /// Clamps a state to its saturation class; two states with the same
    /// clamp produce identical future rewards under any play sequence.
    pub fn canonical_state(&self, tau: i64) -> i64 {
        tau.clamp(-(self.tau_max as i64), self.tau_max as i64)
    }

    pub fn from_json(text: &str) -> Result<Self, EnvError> {
        let file: InstanceFile =
            serde_json::from_str(text).map_err(|e| EnvError::Instance(e.to_string()))?;
        file.into_table()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&InstanceFile::from(self))
            .expect("instance serialisation cannot fail")
    }
}

/// On-disk instance schema.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceFile {
    #[serde(rename = "K")]
    pub k: usize,
    pub tau_max: usize,
    pub arms: Vec<ArmCurve>,
    pub constant_negative: bool,
}

impl InstanceFile {
    pub fn into_table(self) -> Result<RewardTable, EnvError> {
        if self.k != self.arms.len() {
            return Err(EnvError::Instance(format!(
                "field K = {} but {} arms are listed",
                self.k,
                self.arms.len()
            )));
        }
        let table = RewardTable::new(self.tau_max, self.arms)?;
        if table.constant_negative != self.constant_negative {
            return Err(EnvError::Instance(format!(
                "field constant_negative = {} contradicts the listed values",
                self.constant_negative
            )));
        }
        Ok(table)
    }
}

impl From<&RewardTable> for InstanceFile {
    fn from(t: &RewardTable) -> Self {
        Self {
            k: t.arms(),
            tau_max: t.tau_max,
            arms: t.arms.clone(),
            constant_negative: t.constant_negative,
        }
    }
}

/// Last-switch states of all arms. No entry is ever 0 and at most one entry
/// (the arm just played) is negative.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StateVector(Vec<i64>);

impl StateVector {
    pub fn initial(arms: usize) -> Self {
        Self(vec![1; arms])
    }

    pub fn from_vec(states: Vec<i64>) -> Result<Self, EnvError> {
        if states.contains(&0) {
            return Err(EnvError::InvalidState("state 0 is unreachable".into()));
        }
        if states.iter().filter(|&&s| s < 0).count() > 1 {
            return Err(EnvError::InvalidState(
                "at most one arm can be in a negative state".into(),
            ));
        }
        Ok(Self(states))
    }

    #[inline]
    pub fn get(&self, arm: Arm) -> i64 {
        self.0[arm]
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    pub fn arms(&self) -> usize {
        self.0.len()
    }

    /// Advances every arm by one step in which `played` is pulled.
    #[inline]
    pub fn advance(&mut self, played: Arm) {
        for (a, tau) in self.0.iter_mut().enumerate() {
            *tau = match (a == played, *tau < 0) {
                (true, true) => *tau - 1,
                (true, false) => -1,
                (false, true) => 1,
                (false, false) => *tau + 1,
            };
        }
    }
}

impl fmt::Display for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, ")")
    }
}

/// Reward noise. `Expected` emits the mean itself and is meant for tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Noise {
    #[default]
    Bernoulli,
    Expected,
}

/// Result of one pull.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub arm: Arm,
    /// State of the pulled arm when it was pulled.
    pub tau: i64,
    pub reward: f64,
    pub expected: f64,
}

pub struct Environment {
    table: Arc<RewardTable>,
    noise: Noise,
    seed: u64,
    rng: ChaCha8Rng,
    state: StateVector,
    clock: u64,
}

impl Environment {
    pub fn new(table: Arc<RewardTable>, noise: Noise, seed: u64) -> Self {
        let state = StateVector::initial(table.arms());
        Self {
            table,
            noise,
            seed,
            rng: seeded_rng(seed),
            state,
            clock: 0,
        }
    }

    pub fn table(&self) -> &RewardTable {
        &self.table
    }

    pub fn shared_table(&self) -> Arc<RewardTable> {
        Arc::clone(&self.table)
    }

    pub fn state(&self) -> &StateVector {
        &self.state
    }

    pub fn clock(&self) -> u64 {
        self.clock
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn arms(&self) -> usize {
        self.table.arms()
    }

    pub fn step(&mut self, arm: Arm) -> Result<StepOutcome, EnvError> {
        if arm >= self.arms() {
            return Err(EnvError::ArmOutOfRange {
                arm,
                arms: self.arms(),
            });
        }
        let tau = self.state.get(arm);
        let expected = self.table.mean(arm, tau);
        let reward = match self.noise {
            Noise::Bernoulli => {
                if self.rng.gen::<f64>() < expected {
                    1.0
                } else {
                    0.0
                }
            }
            Noise::Expected => expected,
        };
        self.state.advance(arm);
        self.clock += 1;
        Ok(StepOutcome {
            arm,
            tau,
            reward,
            expected,
        })
    }
}
