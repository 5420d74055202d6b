//! Depth-first LP-guided block construction.
//!
//! Positions are committed left to right. At each position every arm is tried,
//! the rest of the block is relaxed to `[0,1]` and scored by the LP optimum,
//! and the best-scoring arm is kept. There is no backtracking.

use std::fmt::{self, Write as _};

use log::debug;
use thiserror::Error;

use crate::blocks::{Block, Regime};
use crate::env::Arm;
use crate::ilp::{encode, feasible_point, prefix_fixings, IlpError, IlpInstance, UcbSnapshot};
use crate::lp::{solve_with_options, LpProblem, LpStatus, SolverOptions};

/// Score margin a later candidate needs to displace an earlier one.
const TIE_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BnbError {
    #[error("no feasible continuation at position {depth} after prefix {prefix:?}")]
    NoFeasibleContinuation { depth: usize, prefix: Vec<Arm> },
    #[error(transparent)]
    Ilp(#[from] IlpError),
}

/// Candidates scored at one position.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthTrace {
    pub depth: usize,
    /// `(arm, relaxed score)`, `None` for infeasible or excluded candidates.
    pub candidates: Vec<(Arm, Option<f64>)>,
    pub chosen: Arm,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BnbStats {
    pub lp_solves: usize,
    pub lp_iterations: usize,
    pub excluded: usize,
    pub trace: Vec<DepthTrace>,
}

impl BnbStats {
    /// Line-oriented trace: one line per position.
    pub fn trace_text(&self) -> String {
        let mut out = String::new();
        for d in &self.trace {
            let _ = write!(out, "depth={} chosen={}", d.depth, d.chosen);
            for (a, s) in &d.candidates {
                match s {
                    Some(v) => {
                        let _ = write!(out, " {a}:{v:.9}");
                    }
                    None => {
                        let _ = write!(out, " {a}:-");
                    }
                }
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BnbResult {
    pub block: Block,
    /// Exact objective of the block's encoding.
    pub score: f64,
    pub stats: BnbStats,
}

impl fmt::Display for BnbResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} score={:.6} lps={}",
            self.block, self.score, self.stats.lp_solves
        )
    }
}

/// Encodes `u` and builds a block of length `len`.
pub fn solve_block(u: &UcbSnapshot, len: usize, regime: Regime) -> Result<BnbResult, BnbError> {
    let inst = encode(u, len, regime)?;
    solve_instance(&inst, &SolverOptions::default())
}

/// Builds a block for an already encoded program, whose objective may carry
/// first-pull values.
pub fn solve_instance(inst: &IlpInstance, opts: &SolverOptions) -> Result<BnbResult, BnbError> {
    let layout = inst.layout;
    let lp = inst.to_lp();
    let mut stats = BnbStats::default();
    let mut prefix: Vec<Arm> = Vec::with_capacity(layout.len());
    for depth in 0..layout.len() {
        let mut best: Option<(Arm, f64)> = None;
        let mut candidates = Vec::with_capacity(layout.arms());
        for arm in 0..layout.arms() {
            if layout.regime() == Regime::General && depth == 1 && arm == prefix[0] {
                stats.excluded += 1;
                candidates.push((arm, None));
                continue;
            }
            prefix.push(arm);
            let score = score_prefix(&lp, inst, &prefix, opts, &mut stats);
            prefix.pop();
            match score {
                Some(v) => {
                    if best.is_none_or(|(_, b)| v > b + TIE_TOL) {
                        best = Some((arm, v));
                    }
                }
                None => {
                    debug!("candidate {arm} at position {depth} after {prefix:?} is infeasible")
                }
            }
            candidates.push((arm, score));
        }
        let Some((chosen, _)) = best else {
            return Err(BnbError::NoFeasibleContinuation { depth, prefix });
        };
        stats.trace.push(DepthTrace {
            depth,
            candidates,
            chosen,
        });
        prefix.push(chosen);
    }
    let block = Block::new(prefix, layout.arms()).expect("arms come from the layout");
    let z = feasible_point(&block, &layout)?;
    let score = inst.value(&z);
    Ok(BnbResult {
        block,
        score,
        stats,
    })
}

fn score_prefix(
    lp: &LpProblem,
    inst: &IlpInstance,
    prefix: &[Arm],
    opts: &SolverOptions,
    stats: &mut BnbStats,
) -> Option<f64> {
    let fixings = prefix_fixings(&inst.layout, prefix);
    let sol = solve_with_options(lp, &fixings, opts);
    stats.lp_solves += 1;
    stats.lp_iterations += sol.iterations;
    match sol.status {
        LpStatus::Optimal => Some(sol.objective),
        _ => None,
    }
}

/// LP optimum of the program with `prefix` committed.
pub fn relaxed_score(inst: &IlpInstance, prefix: &[Arm]) -> Result<f64, BnbError> {
    let mut stats = BnbStats::default();
    score_prefix(
        &inst.to_lp(),
        inst,
        prefix,
        &SolverOptions::default(),
        &mut stats,
    )
    .ok_or_else(|| BnbError::NoFeasibleContinuation {
        depth: prefix.len(),
        prefix: prefix.to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocks::{brute_force_best_block, calibrated_reward, Objective};
    use crate::ilp::CellScheme;
    use crate::instances::sec4;

    #[test]
    fn sec4_true_means() {
        let table = sec4();
        let u = UcbSnapshot::true_means(&table, CellScheme::Delay { cells: 4 });
        let res = solve_block(&u, 4, Regime::ConstantNegative).unwrap();
        let cal = calibrated_reward(&res.block, &table, Regime::ConstantNegative)
            .unwrap()
            .total;
        assert!((res.score - 1.10).abs() < 1e-9, "{res}");
        assert!((cal - res.score).abs() < 1e-12);
        assert_eq!(res.stats.lp_solves, 4 * 5);
        let (_, oracle) = brute_force_best_block(
            &table,
            4,
            &Objective::Calibrated(Regime::ConstantNegative),
            1 << 20,
        )
        .unwrap();
        assert!((oracle - res.score).abs() < 1e-12);
    }

    #[test]
    fn single_position_picks_first_arm() {
        let u = UcbSnapshot::from_fn(3, CellScheme::Delay { cells: 1 }, |_, _| 0.4);
        let res = solve_block(&u, 1, Regime::ConstantNegative).unwrap();
        assert_eq!(res.block.actions(), &[0]);
        assert_eq!(res.score, 0.0);
        assert_eq!(res.stats.lp_solves, 3);
    }

    #[test]
    fn general_regime_excludes_repeat() {
        let u = UcbSnapshot::from_fn(3, CellScheme::Signed { cells: 4 }, |a, j| {
            if a == 0 && j < 0 {
                1.0
            } else {
                0.1
            }
        });
        let res = solve_block(&u, 4, Regime::General).unwrap();
        assert!(res.block.is_valid_for(Regime::General));
        assert_eq!(res.stats.excluded, 1);
        assert_eq!(res.stats.lp_solves, 4 * 3 - 1);
    }

    #[test]
    fn committed_scores_do_not_increase() {
        let table = sec4();
        let u = UcbSnapshot::true_means(&table, CellScheme::Delay { cells: 4 });
        let inst = encode(&u, 4, Regime::ConstantNegative).unwrap();
        let res = solve_instance(&inst, &SolverOptions::default()).unwrap();
        let mut last = relaxed_score(&inst, &[]).unwrap();
        assert!(last >= 1.10 - 1e-9);
        for s in 1..=4 {
            let v = relaxed_score(&inst, &res.block.actions()[..s]).unwrap();
            assert!(v <= last + 1e-9);
            last = v;
        }
        assert!((last - res.score).abs() < 1e-9);
        assert_eq!(res.stats.trace.len(), 4);
        assert_eq!(res.stats.trace_text().lines().count(), 4);
    }
}
