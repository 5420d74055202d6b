//! Property sweeps behind `lsd verify`, reported as pass/fail JSON.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use lsd_core::algos::{regret_envelope, run, BlockConfig, IsiCombUcb1};
use lsd_core::blocks::{
    all_blocks, best_cycle_average, block_reward, brute_force_best_block,
    brute_force_best_sequence, calibrated_reward, cyclic_average, cyclic_value, EnumerationCaps,
    Objective,
};
use lsd_core::bnb::solve_block;
use lsd_core::env::transition;
use lsd_core::ilp::{decode, encode, feasible_point, prefix_fixings, CellScheme, UcbSnapshot};
use lsd_core::instances::{random, tight};
use lsd_core::lp::{solve_with_fixings, LpStatus};
use lsd_core::rng::{derive_seed, seeded_rng, ENV_STREAM};
use lsd_core::{Block, Environment, Noise, Regime, RewardTable, StateVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub const REPORT_SCHEMA: &str = "lsd-report/v1";

const EXACT_TOL: f64 = 1e-12;
const LP_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Scope {
    Transition,
    Sandwich,
    Tight,
    CyclicBound,
    BlockBounds,
    Ilp,
    Bnb,
    Envelope,
}

impl Scope {
    pub const ALL: [Scope; 8] = [
        Scope::Transition,
        Scope::Sandwich,
        Scope::Tight,
        Scope::CyclicBound,
        Scope::BlockBounds,
        Scope::Ilp,
        Scope::Bnb,
        Scope::Envelope,
    ];

    fn name(self) -> &'static str {
        match self {
            Scope::Transition => "transition",
            Scope::Sandwich => "sandwich",
            Scope::Tight => "tight",
            Scope::CyclicBound => "cyclic-bound",
            Scope::BlockBounds => "block-bounds",
            Scope::Ilp => "ilp",
            Scope::Bnb => "bnb",
            Scope::Envelope => "envelope",
        }
    }
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scope {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scope::ALL
            .into_iter()
            .find(|sc| sc.name() == s.trim())
            .ok_or_else(|| format!("unknown scope `{s}`, expected one of {}", scope_names()))
    }
}

fn scope_names() -> String {
    Scope::ALL.map(Scope::name).join(", ")
}

/// Parses a comma-separated scope list; `all` selects every scope and an
/// empty string selects none.
pub fn parse_scopes(list: &str) -> Result<Vec<Scope>, String> {
    let mut out = Vec::new();
    for part in list.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if part == "all" {
            out.extend(Scope::ALL);
        } else {
            out.push(part.parse()?);
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(checks: Vec<Check>) -> Self {
        Self {
            schema: REPORT_SCHEMA.into(),
            passed: checks.iter().all(|c| c.passed),
            checks,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Random tables in the sandwich sweep.
    pub sandwich_instances: usize,
    pub state_pairs: usize,
    /// Random tables per configuration in the approximation sweeps.
    pub bound_instances: usize,
    pub bnb_instances: usize,
    pub envelope_instances: usize,
    pub envelope_horizon: usize,
    pub caps: EnumerationCaps,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            sandwich_instances: 50,
            state_pairs: 20,
            bound_instances: 10,
            bnb_instances: 100,
            envelope_instances: 10,
            envelope_horizon: 4000,
            caps: EnumerationCaps::default(),
        }
    }
}

pub fn verify(scopes: &[Scope], opts: &VerifyOptions) -> Report {
    let mut checks = Vec::new();
    for &scope in scopes {
        let mut found = match scope {
            Scope::Transition => vec![check_transition()],
            Scope::Sandwich => vec![check_sandwich(opts)],
            Scope::Tight => check_tight(),
            Scope::CyclicBound => check_cyclic_bound(opts),
            Scope::BlockBounds => check_block_bounds(opts),
            Scope::Ilp => check_ilp(opts),
            Scope::Bnb => check_bnb(opts),
            Scope::Envelope => check_envelope(opts),
        };
        checks.append(&mut found);
    }
    Report::new(checks)
}

fn rng_for(opts: &VerifyOptions, scope: Scope, k: u64) -> ChaCha8Rng {
    seeded_rng(derive_seed(opts.seed, &[scope as u64, k]))
}

/// A reachable state vector: positive entries up to `max`, and with
/// probability 1/2 one arm in a negative state.
pub fn random_state(rng: &mut impl Rng, arms: usize, max: i64) -> StateVector {
    let mut s: Vec<i64> = (0..arms).map(|_| rng.gen_range(1..=max)).collect();
    if rng.gen_bool(0.5) {
        let a = rng.gen_range(0..arms);
        s[a] = -rng.gen_range(1..=max);
    }
    StateVector::from_vec(s).expect("at most one negative entry")
}

pub fn check_transition() -> Check {
    let oracle = |tau: i64, played: bool| -> i64 {
        if played && tau > 0 {
            -1
        } else if played && tau < 0 {
            tau - 1
        } else if !played && tau > 0 {
            tau + 1
        } else {
            1
        }
    };
    let mut cases = 0;
    let mut mismatches = Vec::new();
    for tau in (-10..=-1).chain(1..=10) {
        for played in [true, false] {
            cases += 1;
            if transition(tau, played) != Ok(oracle(tau, played)) {
                mismatches.push(format!("({tau},{played})"));
            }
        }
    }
    let zero_rejected = transition(0, true).is_err() && transition(0, false).is_err();
    Check::new(
        "transition",
        mismatches.is_empty() && zero_rejected,
        format!(
            "{cases} cases, {} mismatches {mismatches:?}, zero state rejected: {zero_rejected}",
            mismatches.len()
        ),
    )
}

/// `r(B|t') >= r(B|t) - K` and `r(B|t) - K <= r~(B) <= r(B|t)` over every
/// block of length 4 on random constant-negative tables with 3 arms.
pub fn check_sandwich(opts: &VerifyOptions) -> Check {
    let (arms, d) = (3, 4);
    let k = arms as f64;
    let mut rng = rng_for(opts, Scope::Sandwich, 0);
    let mut comparisons = 0u64;
    let mut violations = 0u64;
    let mut worst: f64 = 0.0;
    let mut note = |slack: f64| {
        comparisons += 1;
        if slack < -EXACT_TOL {
            violations += 1;
        }
        worst = worst.min(slack);
    };
    for _ in 0..opts.sandwich_instances {
        let table = random(&mut rng, arms, 6, true);
        let states: Vec<(StateVector, StateVector)> = (0..opts.state_pairs)
            .map(|_| {
                (
                    random_state(&mut rng, arms, 8),
                    random_state(&mut rng, arms, 8),
                )
            })
            .collect();
        for block in all_blocks(arms, d) {
            let cal = calibrated_reward(&block, &table, Regime::ConstantNegative)
                .expect("all blocks are admissible")
                .total;
            for (s, s2) in &states {
                let r = block_reward(&block, s, &table).0.total;
                let r2 = block_reward(&block, s2, &table).0.total;
                note(r2 - (r - k));
                note(cal - (r - k));
                note(r - cal);
            }
        }
    }
    Check::new(
        "sandwich",
        violations == 0,
        format!("{comparisons} comparisons, {violations} violations, smallest slack {worst:.3e}"),
    )
}

/// On `mu_i(tau) = 1{tau >= K-1}`, the round robin averages 1 and the block
/// `[0..K, 0..K-1]` averages exactly `K/(2K-1)`, above the guaranteed
/// `(K-1)/(2K-1)` by `1/(2K-1)`.
pub fn check_tight() -> Vec<Check> {
    let mut out = Vec::new();
    let mut gaps = Vec::new();
    for k in 2..=4usize {
        let table = tight(k).expect("K >= 2");
        let mut actions: Vec<usize> = (0..k).collect();
        actions.extend(0..k - 1);
        let d = actions.len();
        let block = Block::new(actions, k).expect("arms in range");
        let avg = cyclic_average(&block, &table);
        let expect = k as f64 / (2 * k - 1) as f64;
        let lower = 1.0 - k as f64 / d as f64;
        let round_robin = cyclic_average(&Block::new((0..k).collect(), k).unwrap(), &table);
        gaps.push(avg - lower);
        out.push(Check::new(
            format!("tight:K={k}"),
            (avg - expect).abs() <= EXACT_TOL
                && (lower - (k - 1) as f64 / (2 * k - 1) as f64).abs() <= EXACT_TOL
                && avg >= lower
                && (round_robin - 1.0).abs() <= EXACT_TOL,
            format!("block {block} averages {avg:.12} (K/(2K-1) = {expect:.12}), lower bound {lower:.12}, round robin {round_robin}"),
        ));
    }
    let shrinking = gaps.windows(2).all(|w| w[1] < w[0]);
    out.push(Check::new(
        "tight:gap-shrinks",
        shrinking,
        format!("gaps over the lower bound {gaps:?}"),
    ));
    out
}

struct BoundCase {
    arms: usize,
    horizon: usize,
    d: usize,
}

const CYCLIC_CASES: [BoundCase; 7] = [
    BoundCase {
        arms: 2,
        horizon: 12,
        d: 2,
    },
    BoundCase {
        arms: 2,
        horizon: 12,
        d: 3,
    },
    BoundCase {
        arms: 2,
        horizon: 12,
        d: 4,
    },
    BoundCase {
        arms: 2,
        horizon: 12,
        d: 6,
    },
    BoundCase {
        arms: 3,
        horizon: 12,
        d: 3,
    },
    BoundCase {
        arms: 3,
        horizon: 12,
        d: 4,
    },
    BoundCase {
        arms: 3,
        horizon: 12,
        d: 6,
    },
];

/// Optimal average over `horizon` steps by exhaustive search.
fn opt_average(table: &RewardTable, horizon: usize, caps: &EnumerationCaps) -> Option<f64> {
    brute_force_best_sequence(table, horizon, caps.sequences)
        .ok()
        .map(|(_, v)| v / horizon as f64)
}

fn cyclic_avg(block: &Block, table: &RewardTable, horizon: usize) -> f64 {
    cyclic_value(block, table, horizon).expect("length divides horizon") / horizon as f64
}

fn penalty(arms: usize, regime: Regime) -> f64 {
    match regime {
        Regime::ConstantNegative => arms as f64,
        Regime::General => arms as f64 + 2.0,
    }
}

/// Sweeps an inequality `lhs >= rhs` over random tables of both regimes.
struct Sweep {
    name: String,
    cases: u64,
    violations: u64,
    worst: f64,
    skipped: u64,
}

impl Sweep {
    fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            cases: 0,
            violations: 0,
            worst: f64::INFINITY,
            skipped: 0,
        }
    }

    fn record(&mut self, lhs: f64, rhs: f64) {
        self.cases += 1;
        let slack = lhs - rhs;
        if slack < -EXACT_TOL {
            self.violations += 1;
        }
        self.worst = self.worst.min(slack);
    }

    fn finish(self) -> Check {
        Check::new(
            self.name,
            self.violations == 0 && self.cases > 0,
            format!(
                "{} cases, {} violations, smallest slack {:.4}, {} skipped by enumeration caps",
                self.cases, self.violations, self.worst, self.skipped
            ),
        )
    }
}

/// Repeating the best length-`d` block loses at most `K/d` per step against
/// the optimal sequence (`(K+2)/d` without constant negatives).
pub fn check_cyclic_bound(opts: &VerifyOptions) -> Vec<Check> {
    [Regime::ConstantNegative, Regime::General]
        .into_iter()
        .map(|regime| {
            let mut sweep = Sweep::new(format!("cyclic-bound:{}", regime_name(regime)));
            for (c, case) in CYCLIC_CASES.iter().enumerate() {
                let mut rng = rng_for(opts, Scope::CyclicBound, (regime as u64) << 8 | c as u64);
                for _ in 0..opts.bound_instances {
                    let table = random(&mut rng, case.arms, 5, regime == Regime::ConstantNegative);
                    let Some(opt) = opt_average(&table, case.horizon, &opts.caps) else {
                        sweep.skipped += 1;
                        continue;
                    };
                    let best = all_blocks(case.arms, case.d)
                        .map(|b| cyclic_avg(&b, &table, case.horizon))
                        .fold(f64::NEG_INFINITY, f64::max);
                    sweep.record(best, opt - penalty(case.arms, regime) / case.d as f64);
                }
            }
            sweep.finish()
        })
        .collect()
}

/// The three block strategies: the double-play block, calibration by a
/// permutation followed by its best block, and the calibrated-objective block.
pub fn check_block_bounds(opts: &VerifyOptions) -> Vec<Check> {
    let mut out = Vec::new();
    for regime in [Regime::ConstantNegative, Regime::General] {
        let tag = regime_name(regime);
        let mut double = Sweep::new(format!("block-bounds:double-play:{tag}"));
        let mut calib = Sweep::new(format!("block-bounds:calibration:{tag}"));
        let mut first = Sweep::new(format!("block-bounds:calibrated-objective:{tag}"));
        for (c, case) in CYCLIC_CASES.iter().enumerate() {
            let mut rng = rng_for(opts, Scope::BlockBounds, (regime as u64) << 8 | c as u64);
            let (k, d, t) = (case.arms, case.d, case.horizon);
            let pen = penalty(k, regime);
            for _ in 0..opts.bound_instances {
                let table = random(&mut rng, k, 5, regime == Regime::ConstantNegative);
                let Some(opt) = opt_average(&table, t, &opts.caps) else {
                    double.skipped += 1;
                    calib.skipped += 1;
                    first.skipped += 1;
                    continue;
                };
                let cap = opts.caps.blocks;
                if let Ok((b, _)) = brute_force_best_block(&table, d, &Objective::DoublePlay, cap) {
                    double.record(
                        cyclic_avg(&b, &table, t),
                        (1.0 - d as f64 / t as f64) * (opt - pen / d as f64),
                    );
                }
                if let Ok((b, _)) =
                    brute_force_best_block(&table, d, &Objective::Calibrated(regime), cap)
                {
                    first.record(cyclic_avg(&b, &table, t), opt - pen / d as f64);
                }
                if t % (k + d) == 0 {
                    let sigma: Vec<usize> = (0..k).rev().collect();
                    let sigma_block = Block::new(sigma.clone(), k).unwrap();
                    let (_, after) = block_reward(&sigma_block, &StateVector::initial(k), &table);
                    if let Ok((b, _)) =
                        brute_force_best_block(&table, d, &Objective::Plain(after), cap)
                    {
                        let mut round = sigma;
                        round.extend_from_slice(b.actions());
                        let round = Block::new(round, k).unwrap();
                        let w = (k + d) as f64;
                        calib.record(cyclic_avg(&round, &table, t), d as f64 / w * opt - pen / w);
                    }
                }
            }
        }
        out.extend([double.finish(), calib.finish(), first.finish()]);
    }
    out
}

fn regime_name(regime: Regime) -> &'static str {
    match regime {
        Regime::ConstantNegative => "constant_negative",
        Regime::General => "general",
    }
}

/// Every block encodes to a point satisfying all rows that decodes back to
/// it, blocks outside the regime admit no completion, and fixing the pulls
/// of a block pins the relaxation to its calibrated value.
pub fn check_ilp(opts: &VerifyOptions) -> Vec<Check> {
    let mut out = Vec::new();
    for regime in [Regime::ConstantNegative, Regime::General] {
        let mut blocks = 0;
        let mut failures = Vec::new();
        for arms in 2..=3usize {
            let mut rng = rng_for(opts, Scope::Ilp, (regime as u64) << 8 | arms as u64);
            let table = random(&mut rng, arms, 5, regime == Regime::ConstantNegative);
            for d in 1..=5usize {
                let u = UcbSnapshot::true_means(&table, CellScheme::for_regime(regime, d.max(1)));
                let inst = match encode(&u, d, regime) {
                    Ok(i) => i,
                    Err(e) => {
                        failures.push(format!("K={arms} d={d}: {e}"));
                        continue;
                    }
                };
                let lp = inst.to_lp();
                for block in all_blocks(arms, d) {
                    blocks += 1;
                    let fixed =
                        solve_with_fixings(&lp, &prefix_fixings(&inst.layout, block.actions()));
                    if !block.is_valid_for(regime) {
                        if feasible_point(&block, &inst.layout).is_ok()
                            || fixed.status != LpStatus::Infeasible
                        {
                            failures.push(format!(
                                "K={arms} d={d} {block}: inadmissible block has a completion"
                            ));
                        }
                        continue;
                    }
                    let want = calibrated_reward(&block, &table, regime)
                        .expect("admissible")
                        .total;
                    let ok = feasible_point(&block, &inst.layout).ok().and_then(|z| {
                        let round_trip =
                            inst.is_feasible(&z) && decode(&z, &inst).as_ref() == Ok(&block);
                        round_trip.then(|| inst.value(&z))
                    });
                    match ok {
                        Some(v) if (v - want).abs() <= EXACT_TOL => {}
                        Some(v) => failures
                            .push(format!("K={arms} d={d} {block}: objective {v} vs {want}")),
                        None => failures.push(format!("K={arms} d={d} {block}: round trip failed")),
                    }
                    if fixed.status != LpStatus::Optimal || (fixed.objective - want).abs() > LP_TOL
                    {
                        failures.push(format!(
                            "K={arms} d={d} {block}: relaxation with pulls fixed gives {:?} {}",
                            fixed.status, fixed.objective
                        ));
                    }
                }
            }
        }
        out.push(Check::new(
            format!("ilp:{}", regime_name(regime)),
            failures.is_empty(),
            format!(
                "{blocks} blocks, {} failures {:?}",
                failures.len(),
                &failures[..failures.len().min(5)]
            ),
        ));
    }
    out
}

/// Result of comparing the block solver with brute force on random tables.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchRate {
    pub instances: usize,
    pub matches: usize,
    /// Solver scores above the brute-force optimum or off the block's value.
    pub unsound: usize,
    pub worst_gap: f64,
}

pub fn bnb_match_rate(opts: &VerifyOptions, arms: usize, d: usize, regime: Regime) -> MatchRate {
    let mut rng = rng_for(opts, Scope::Bnb, (regime as u64) << 8 | arms as u64);
    let mut rate = MatchRate {
        instances: 0,
        matches: 0,
        unsound: 0,
        worst_gap: 0.0,
    };
    for _ in 0..opts.bnb_instances {
        let table = random(&mut rng, arms, d + 1, regime == Regime::ConstantNegative);
        let u = UcbSnapshot::true_means(&table, CellScheme::for_regime(regime, d));
        let Ok(res) = solve_block(&u, d, regime) else {
            rate.unsound += 1;
            continue;
        };
        let Ok((_, best)) =
            brute_force_best_block(&table, d, &Objective::Calibrated(regime), opts.caps.blocks)
        else {
            continue;
        };
        rate.instances += 1;
        let actual = calibrated_reward(&res.block, &table, regime)
            .map(|v| v.total)
            .unwrap_or(f64::NAN);
        let exact = (actual - res.score).abs() <= 1e-9;
        if !exact || res.score > best + 1e-9 {
            rate.unsound += 1;
        }
        let gap = best - res.score;
        rate.worst_gap = rate.worst_gap.max(gap);
        if gap <= 1e-9 {
            rate.matches += 1;
        }
    }
    rate
}

/// The match rate itself is informational; the check fails only when a
/// returned score is unsound.
pub fn check_bnb(opts: &VerifyOptions) -> Vec<Check> {
    [Regime::ConstantNegative, Regime::General]
        .into_iter()
        .map(|regime| {
            let r = bnb_match_rate(opts, 3, 4, regime);
            Check::new(
                format!("bnb:{}", regime_name(regime)),
                r.unsound == 0 && r.instances > 0,
                format!(
                    "matched brute force on {}/{} random K=3 d=4 tables, largest gap {:.4}, {} unsound",
                    r.matches, r.instances, r.worst_gap, r.unsound
                ),
            )
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeRun {
    pub proxy_average: f64,
    pub expected_reward: f64,
    pub regret: f64,
    pub envelope: f64,
}

/// Runs the calibrated learner with blocks of 4 and 3 state cells on a
/// random 3-arm table and compares its regret against the best cycle of
/// length at most 8 with the closed-form envelope.
pub fn envelope_run(opts: &VerifyOptions, index: u64) -> EnvelopeRun {
    let (arms, len, horizon) = (3, 4, opts.envelope_horizon);
    let mut rng = rng_for(opts, Scope::Envelope, index);
    let table = Arc::new(random(&mut rng, arms, 5, true));
    let (_, proxy_average) =
        best_cycle_average(&table, 8, opts.caps.blocks).expect("3^8 blocks is under the cap");
    let cfg = BlockConfig {
        block_len: len,
        cells: len - 1,
        alpha: 1.5,
        regime: Regime::ConstantNegative,
    };
    let mut learner = IsiCombUcb1::new(arms, cfg).expect("valid configuration");
    let mut env = Environment::new(
        Arc::clone(&table),
        Noise::Bernoulli,
        derive_seed(opts.seed, &[index, ENV_STREAM]),
    );
    let trace = run(&mut learner, &mut env, horizon).expect("block length divides horizon");
    let expected_reward = trace.total_expected();
    EnvelopeRun {
        proxy_average,
        expected_reward,
        regret: proxy_average * horizon as f64 - expected_reward,
        envelope: regret_envelope(arms, len, horizon, Regime::ConstantNegative)
            .expect("block length divides horizon"),
    }
}

pub fn check_envelope(opts: &VerifyOptions) -> Vec<Check> {
    (0..opts.envelope_instances as u64)
        .map(|i| {
            let r = envelope_run(opts, i);
            Check::new(
                format!("envelope:{i}"),
                r.regret < r.envelope,
                format!(
                    "regret {:.1} against best-cycle proxy {:.4}/step, envelope {:.1}",
                    r.regret, r.proxy_average, r.envelope
                ),
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> VerifyOptions {
        VerifyOptions {
            sandwich_instances: 3,
            state_pairs: 4,
            bound_instances: 2,
            bnb_instances: 5,
            envelope_instances: 1,
            envelope_horizon: 400,
            ..Default::default()
        }
    }

    #[test]
    fn scope_parsing() {
        assert_eq!(parse_scopes("").unwrap(), vec![]);
        assert_eq!(
            parse_scopes("tight, transition,tight").unwrap(),
            vec![Scope::Transition, Scope::Tight]
        );
        assert_eq!(parse_scopes("all").unwrap().len(), 8);
        assert!(parse_scopes("nope").is_err());
    }

    #[test]
    fn empty_scope_passes() {
        let r = verify(&[], &quick());
        assert!(r.passed);
        assert!(r.checks.is_empty());
    }

    #[test]
    fn cheap_scopes_pass() {
        let r = verify(
            &[Scope::Transition, Scope::Sandwich, Scope::Tight, Scope::Bnb],
            &quick(),
        );
        assert!(r.passed, "{:#?}", r.checks);
    }

    #[test]
    fn tight_three_arms_is_three_fifths() {
        let table = tight(3).unwrap();
        let b = Block::new(vec![0, 1, 2, 0, 1], 3).unwrap();
        assert!((cyclic_average(&b, &table) - 0.6).abs() < 1e-12);
    }

    #[test]
    fn random_states_are_valid() {
        let mut rng = seeded_rng(3);
        for _ in 0..200 {
            let s = random_state(&mut rng, 4, 5);
            assert!(s.as_slice().iter().filter(|&&x| x < 0).count() <= 1);
            assert!(s.as_slice().iter().all(|&x| x != 0 && x.abs() <= 5));
        }
    }
}
