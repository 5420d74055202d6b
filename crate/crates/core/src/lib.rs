//! Last-switch-dependent (LSD) bandits.
//!
//! An arm's expected reward in an LSD bandit depends only on its *last-switch
//! state*: how many rounds ago the arm last took part in a change of action
//! (positive), or how many rounds it has been played consecutively (negative).
//!
//! The crate is organised bottom-up:
//!
//! - [`env`]: reward tables, the state machine and the stochastic environment.
//! - [`blocks`]: exact block values, the calibrated block reward and
//!   brute-force oracles used to check everything else.
//! - [`ilp`]: the binary program whose optimum is the UCB-maximising block.
//! - [`lp`]: a dense bounded-variable two-phase simplex solver.
//! - [`bnb`]: the depth-first LP-scored heuristic that turns the binary
//!   program into a block.
//! - [`instances`]: the named example tables.
//! - [`algos`]: ISI-CombUCB1, vanilla CombUCB1, calibration-sequence learners
//!   and the oracle greedy baseline.
//!
//! Arms are 0-based everywhere. Block positions are 0-based; delays and
//! states are values and start at 1.

pub mod algos;
pub mod blocks;
pub mod bnb;
pub mod env;
pub mod ilp;
pub mod instances;
pub mod lp;
pub mod rng;

pub use blocks::{Block, BlockValue, Regime};
pub use env::{Arm, Environment, Noise, RewardTable, StateVector};
