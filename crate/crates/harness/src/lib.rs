//! Experiment runner, instance generators and property verification for the
//! `lsd` command-line tool.

pub mod config;
pub mod generate;
pub mod runner;
pub mod verify;

use std::path::Path;

use anyhow::{Context, Result};
use lsd_core::RewardTable;

pub fn load_instance(path: &Path) -> Result<RewardTable> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    RewardTable::from_json(&text).with_context(|| format!("{}", path.display()))
}
