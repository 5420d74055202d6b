//! Binary program for picking the UCB-maximising block.
//!
//! Every pull of a block corresponds to exactly one active variable at its
//! time step:
//!
//! - `F[i,t]`: first pull of arm `i` in the block, at time `t`;
//! - positive-only encoding, `Y[i,j,t]`: later pull of `i` at `t` whose
//!   previous pull of `i` was at `t - j` (delay `j`; delay 1 is a consecutive
//!   pull, valued at state -1);
//! - general encoding, `Yp[i,j,t]` / `Yn[i,j,t]`: later pull of `i` at `t` in
//!   in-block state `+j` / `-j`, where the first pull counts as coming from a
//!   positive state.
//!
//! Times are 0-based, `t = 0..L`. Delays and states range over `1..=L`, some of
//! which are unreachable and stay at zero through the constraints.

use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::blocks::{first_pull_state, Block, InBlockPull, InBlockStates, Regime};
use crate::env::{delay_of_state, Arm, StateVector};
use crate::lp::{LpProblem, SparseRow};

const CHECK_TOL: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IlpError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("point violates row {0}")]
    Violated(RowTag),
    #[error("variable {index} = {value} is not binary")]
    NotBinary { index: usize, value: f64 },
    #[error("general-regime blocks must start with two different arms")]
    RegimeViolation,
}

/// How UCB cells are indexed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellScheme {
    /// Cells `1..=J` indexed by delay since the previous pull.
    Delay { cells: usize },
    /// Cells `-J..=-1` and `1..=J` indexed by last-switch state.
    Signed { cells: usize },
}

impl CellScheme {
    pub fn cells(&self) -> usize {
        match *self {
            CellScheme::Delay { cells } | CellScheme::Signed { cells } => cells,
        }
    }

    /// Number of cells per arm.
    pub fn width(&self) -> usize {
        match *self {
            CellScheme::Delay { cells } => cells,
            CellScheme::Signed { cells } => 2 * cells,
        }
    }

    /// Scheme matching the encoding used for `regime`.
    pub fn for_regime(regime: Regime, cells: usize) -> Self {
        match regime {
            Regime::ConstantNegative => CellScheme::Delay { cells },
            Regime::General => CellScheme::Signed { cells },
        }
    }

    /// Offset of the cell of a delay (Delay scheme) within an arm's row,
    /// clamped into range.
    pub fn delay_offset(&self, delay: usize) -> usize {
        match *self {
            CellScheme::Delay { cells } => delay.clamp(1, cells) - 1,
            CellScheme::Signed { .. } => {
                let state = if delay <= 1 { -1 } else { delay as i64 - 1 };
                self.state_offset(state)
            }
        }
    }

    /// Offset of the cell of a last-switch state within an arm's row,
    /// clamped into range.
    pub fn state_offset(&self, state: i64) -> usize {
        debug_assert!(state != 0);
        match *self {
            CellScheme::Delay { .. } => self.delay_offset(delay_of_state(state)),
            CellScheme::Signed { cells } => {
                let mag = (state.unsigned_abs() as usize).clamp(1, cells);
                if state > 0 {
                    cells + mag - 1
                } else {
                    cells - mag
                }
            }
        }
    }

    /// Human-readable label of the cell at `offset`.
    pub fn label(&self, offset: usize) -> i64 {
        match *self {
            CellScheme::Delay { .. } => offset as i64 + 1,
            CellScheme::Signed { cells } => {
                if offset < cells {
                    offset as i64 - cells as i64
                } else {
                    (offset - cells) as i64 + 1
                }
            }
        }
    }
}

/// Frozen UCB values, one row of cells per arm.
#[derive(Debug, Clone, PartialEq)]
pub struct UcbSnapshot {
    arms: usize,
    scheme: CellScheme,
    values: Vec<f64>,
}

impl UcbSnapshot {
    pub fn new(arms: usize, scheme: CellScheme, values: Vec<f64>) -> Result<Self, IlpError> {
        if values.len() != arms * scheme.width() {
            return Err(IlpError::Dimension(format!(
                "expected {} values for {arms} arms, got {}",
                arms * scheme.width(),
                values.len()
            )));
        }
        if scheme.cells() == 0 {
            return Err(IlpError::Dimension(
                "at least one cell per arm is required".into(),
            ));
        }
        Ok(Self {
            arms,
            scheme,
            values,
        })
    }

    /// Snapshot with cell values given by `f(arm, cell_label)`.
    pub fn from_fn(arms: usize, scheme: CellScheme, f: impl Fn(Arm, i64) -> f64) -> Self {
        let width = scheme.width();
        let values = (0..arms * width)
            .map(|k| f(k / width, scheme.label(k % width)))
            .collect();
        Self {
            arms,
            scheme,
            values,
        }
    }

    /// Snapshot holding the true means of `table`, which makes the program's
    /// objective the calibrated block reward.
    pub fn true_means(table: &crate::env::RewardTable, scheme: CellScheme) -> Self {
        Self::from_fn(table.arms(), scheme, |a, label| match scheme {
            CellScheme::Delay { .. } => table.mean(a, crate::env::state_of_delay(label as usize)),
            CellScheme::Signed { .. } => table.mean(a, label),
        })
    }

    pub fn arms(&self) -> usize {
        self.arms
    }

    pub fn scheme(&self) -> CellScheme {
        self.scheme
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn at_delay(&self, arm: Arm, delay: usize) -> f64 {
        self.values[arm * self.scheme.width() + self.scheme.delay_offset(delay)]
    }

    pub fn at_state(&self, arm: Arm, state: i64) -> f64 {
        self.values[arm * self.scheme.width() + self.scheme.state_offset(state)]
    }
}

/// Variable kinds of the encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    F { arm: Arm, t: usize },
    Y { arm: Arm, delay: usize, t: usize },
    YPos { arm: Arm, state: usize, t: usize },
    YNeg { arm: Arm, state: usize, t: usize },
}

impl Var {
    pub fn arm(&self) -> Arm {
        match *self {
            Var::F { arm, .. }
            | Var::Y { arm, .. }
            | Var::YPos { arm, .. }
            | Var::YNeg { arm, .. } => arm,
        }
    }

    pub fn time(&self) -> usize {
        match *self {
            Var::F { t, .. } | Var::Y { t, .. } | Var::YPos { t, .. } | Var::YNeg { t, .. } => t,
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Var::F { arm, t } => write!(f, "F[{arm},{t}]"),
            Var::Y { arm, delay, t } => write!(f, "Y[{arm},{delay},{t}]"),
            Var::YPos { arm, state, t } => write!(f, "Yp[{arm},{state},{t}]"),
            Var::YNeg { arm, state, t } => write!(f, "Yn[{arm},{state},{t}]"),
        }
    }
}

/// Flat index layout. F block first, then Y (or Yp followed by Yn), each
/// ordered by arm, then delay/state, then time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layout {
    arms: usize,
    len: usize,
    regime: Regime,
}

impl Layout {
    pub fn new(arms: usize, len: usize, regime: Regime) -> Result<Self, IlpError> {
        if arms == 0 || len == 0 {
            return Err(IlpError::Dimension(
                "need at least one arm and one position".into(),
            ));
        }
        Ok(Self { arms, len, regime })
    }

    pub fn arms(&self) -> usize {
        self.arms
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    fn f_count(&self) -> usize {
        self.arms * self.len
    }

    fn y_count(&self) -> usize {
        self.arms * self.len * self.len
    }

    pub fn num_vars(&self) -> usize {
        match self.regime {
            Regime::ConstantNegative => self.f_count() + self.y_count(),
            Regime::General => self.f_count() + 2 * self.y_count(),
        }
    }

    pub fn index(&self, var: Var) -> usize {
        let l = self.len;
        let cube = |arm: Arm, j: usize, t: usize| (arm * l + (j - 1)) * l + t;
        match var {
            Var::F { arm, t } => arm * l + t,
            Var::Y { arm, delay, t } => {
                debug_assert_eq!(self.regime, Regime::ConstantNegative);
                self.f_count() + cube(arm, delay, t)
            }
            Var::YPos { arm, state, t } => {
                debug_assert_eq!(self.regime, Regime::General);
                self.f_count() + cube(arm, state, t)
            }
            Var::YNeg { arm, state, t } => {
                debug_assert_eq!(self.regime, Regime::General);
                self.f_count() + self.y_count() + cube(arm, state, t)
            }
        }
    }

    pub fn var(&self, index: usize) -> Var {
        let l = self.len;
        if index < self.f_count() {
            return Var::F {
                arm: index / l,
                t: index % l,
            };
        }
        let rest = index - self.f_count();
        let (negative, rest) = if rest >= self.y_count() {
            (true, rest - self.y_count())
        } else {
            (false, rest)
        };
        let t = rest % l;
        let j = (rest / l) % l + 1;
        let arm = rest / (l * l);
        match (self.regime, negative) {
            (Regime::ConstantNegative, _) => Var::Y { arm, delay: j, t },
            (Regime::General, false) => Var::YPos { arm, state: j, t },
            (Regime::General, true) => Var::YNeg { arm, state: j, t },
        }
    }

    /// All variables living at time `t`.
    pub fn vars_at(&self, t: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.arms * (1 + 2 * self.len));
        for arm in 0..self.arms {
            out.push(self.index(Var::F { arm, t }));
            for j in 1..=self.len {
                match self.regime {
                    Regime::ConstantNegative => out.push(self.index(Var::Y { arm, delay: j, t })),
                    Regime::General => {
                        out.push(self.index(Var::YPos { arm, state: j, t }));
                        out.push(self.index(Var::YNeg { arm, state: j, t }));
                    }
                }
            }
        }
        out
    }

    /// Active variable of each pull of `actions`, which may be a prefix of a
    /// block.
    pub fn pull_vars(&self, actions: &[Arm]) -> Vec<Var> {
        let mut out = Vec::with_capacity(actions.len());
        match self.regime {
            Regime::ConstantNegative => {
                let mut last: Vec<Option<usize>> = vec![None; self.arms];
                for (t, &arm) in actions.iter().enumerate() {
                    out.push(match last[arm] {
                        None => Var::F { arm, t },
                        Some(s) => Var::Y {
                            arm,
                            delay: t - s,
                            t,
                        },
                    });
                    last[arm] = Some(t);
                }
            }
            Regime::General => {
                let mut states = InBlockStates::new(self.arms);
                for (t, &arm) in actions.iter().enumerate() {
                    out.push(match states.pull(arm) {
                        InBlockPull::First => Var::F { arm, t },
                        InBlockPull::Repeat { state, .. } if state > 0 => Var::YPos {
                            arm,
                            state: state as usize,
                            t,
                        },
                        InBlockPull::Repeat { state, .. } => Var::YNeg {
                            arm,
                            state: state.unsigned_abs() as usize,
                            t,
                        },
                    });
                }
            }
        }
        out
    }
}

/// Constraint families, with the indices the row was built for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RowTag {
    /// One action per time step.
    Action {
        t: usize,
    },
    /// At most one first pull per arm.
    UniqueFirstPull {
        arm: Arm,
    },
    /// No later pull of an arm before its first pull.
    FirstPullFirst {
        arm: Arm,
        t: usize,
    },
    /// Delay `j` at `t` requires a pull at `t - j` and none in between.
    Delay {
        arm: Arm,
        delay: usize,
        t: usize,
    },
    /// The second pull of the block is a first pull.
    SecondAction,
    /// State `+j` at `t`: last pull at `t - j - 1`, not followed by a
    /// consecutive pull, no pull in between.
    PositiveState {
        arm: Arm,
        state: usize,
        t: usize,
    },
    /// State `-1` at `t`: pulled at `t - 1` from a positive state.
    NegativeStart {
        arm: Arm,
        t: usize,
    },
    /// State `-j` at `t`: state `-(j-1)` at `t - 1`.
    NegativeRun {
        arm: Arm,
        state: usize,
        t: usize,
    },
    UpperBound {
        var: usize,
    },
    LowerBound {
        var: usize,
    },
}

impl RowTag {
    pub fn is_bound(&self) -> bool {
        matches!(self, RowTag::UpperBound { .. } | RowTag::LowerBound { .. })
    }
}

impl fmt::Display for RowTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            RowTag::Action { t } => write!(f, "AC[t={t}]"),
            RowTag::UniqueFirstPull { arm } => write!(f, "UFP[i={arm}]"),
            RowTag::FirstPullFirst { arm, t } => write!(f, "FPF[i={arm},t={t}]"),
            RowTag::Delay { arm, delay, t } => write!(f, "TC[i={arm},j={delay},t={t}]"),
            RowTag::SecondAction => write!(f, "CA"),
            RowTag::PositiveState { arm, state, t } => write!(f, "TCp[i={arm},j={state},t={t}]"),
            RowTag::NegativeStart { arm, t } => write!(f, "TCn1[i={arm},t={t}]"),
            RowTag::NegativeRun { arm, state, t } => write!(f, "TCn2[i={arm},j={state},t={t}]"),
            RowTag::UpperBound { var } => write!(f, "UB[{var}]"),
            RowTag::LowerBound { var } => write!(f, "LB[{var}]"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub tag: RowTag,
    pub coeffs: Vec<(usize, f64)>,
    pub rhs: f64,
}

impl Row {
    pub fn activity(&self, z: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(k, a)| a * z[k]).sum()
    }
}

/// Builds a row, merging repeated indices.
struct RowBuilder {
    terms: Vec<(usize, f64)>,
}

impl RowBuilder {
    fn new() -> Self {
        Self { terms: Vec::new() }
    }

    fn add(&mut self, k: usize, a: f64) -> &mut Self {
        match self.terms.iter_mut().find(|(i, _)| *i == k) {
            Some(entry) => entry.1 += a,
            None => self.terms.push((k, a)),
        }
        self
    }

    fn finish(mut self, tag: RowTag, rhs: f64) -> Row {
        self.terms.retain(|&(_, a)| a != 0.0);
        self.terms.sort_by_key(|&(k, _)| k);
        Row {
            tag,
            coeffs: self.terms,
            rhs,
        }
    }
}

/// The program `max c.z s.t. G z <= h, A z = b, z binary`.
#[derive(Debug, Clone, PartialEq)]
pub struct IlpInstance {
    pub layout: Layout,
    pub objective: Vec<f64>,
    pub inequalities: Vec<Row>,
    pub equalities: Vec<Row>,
}

/// Builds the program for blocks of length `len`, with `U` on every non-first
/// pull variable and 0 on first pulls.
pub fn encode(u: &UcbSnapshot, len: usize, regime: Regime) -> Result<IlpInstance, IlpError> {
    let expected = match regime {
        Regime::ConstantNegative => matches!(u.scheme(), CellScheme::Delay { .. }),
        Regime::General => matches!(u.scheme(), CellScheme::Signed { .. }),
    };
    if !expected {
        return Err(IlpError::Dimension(format!(
            "cell scheme {:?} does not fit regime {regime:?}",
            u.scheme()
        )));
    }
    let layout = Layout::new(u.arms(), len, regime)?;
    let n = layout.num_vars();
    let objective: Vec<f64> = (0..n)
        .map(|k| match layout.var(k) {
            Var::F { .. } => 0.0,
            Var::Y { arm, delay, .. } => u.at_delay(arm, delay),
            Var::YPos { arm, state, .. } => u.at_state(arm, state as i64),
            Var::YNeg { arm, state, .. } => u.at_state(arm, -(state as i64)),
        })
        .collect();
    let (inequalities, equalities) = constraints(&layout);
    Ok(IlpInstance {
        layout,
        objective,
        inequalities,
        equalities,
    })
}

fn constraints(layout: &Layout) -> (Vec<Row>, Vec<Row>) {
    let (k, l) = (layout.arms, layout.len);
    let f = |arm, t| layout.index(Var::F { arm, t });
    let mut ineq = Vec::new();
    let mut eq = Vec::new();

    for t in 0..l {
        let mut r = RowBuilder::new();
        for k in layout.vars_at(t) {
            r.add(k, 1.0);
        }
        eq.push(r.finish(RowTag::Action { t }, 1.0));
    }
    if layout.regime == Regime::General && l >= 2 {
        let mut r = RowBuilder::new();
        for arm in 0..k {
            r.add(f(arm, 1), 1.0);
        }
        eq.push(r.finish(RowTag::SecondAction, 1.0));
    }

    for arm in 0..k {
        let mut r = RowBuilder::new();
        for t in 0..l {
            r.add(f(arm, t), 1.0);
        }
        ineq.push(r.finish(RowTag::UniqueFirstPull { arm }, 1.0));
    }

    // Non-first pull variables of an arm at a time step.
    let later_pulls = |arm: Arm, t: usize| -> Vec<usize> {
        (1..=l)
            .flat_map(|j| match layout.regime {
                Regime::ConstantNegative => vec![layout.index(Var::Y { arm, delay: j, t })],
                Regime::General => vec![
                    layout.index(Var::YPos { arm, state: j, t }),
                    layout.index(Var::YNeg { arm, state: j, t }),
                ],
            })
            .collect()
    };

    for arm in 0..k {
        for t in 0..l {
            let mut r = RowBuilder::new();
            for y in later_pulls(arm, t) {
                r.add(y, 1.0);
            }
            for s in 0..t {
                r.add(f(arm, s), -1.0);
            }
            ineq.push(r.finish(RowTag::FirstPullFirst { arm, t }, 0.0));
        }
    }

    // Look-back terms whose time index falls before the block are dropped.
    match layout.regime {
        Regime::ConstantNegative => {
            let y = |arm, delay, t| layout.index(Var::Y { arm, delay, t });
            for arm in 0..k {
                for j in 1..=l {
                    for t in 0..l {
                        let mut r = RowBuilder::new();
                        r.add(y(arm, j, t), 1.0);
                        if let Some(p) = t.checked_sub(j) {
                            r.add(f(arm, p), -1.0);
                            for m in 1..=l {
                                r.add(y(arm, m, p), -1.0);
                            }
                        }
                        for s in 1..j {
                            if s <= t {
                                r.add(y(arm, j - s, t - s), 1.0);
                            }
                        }
                        ineq.push(r.finish(RowTag::Delay { arm, delay: j, t }, 0.0));
                    }
                }
            }
        }
        Regime::General => {
            let yp = |arm, state, t| layout.index(Var::YPos { arm, state, t });
            let yn = |arm, state, t| layout.index(Var::YNeg { arm, state, t });
            for arm in 0..k {
                for j in 1..=l {
                    for t in 0..l {
                        let mut r = RowBuilder::new();
                        r.add(yp(arm, j, t), 1.0);
                        if let Some(p) = t.checked_sub(j + 1) {
                            r.add(f(arm, p), -1.0);
                            for m in 1..=l {
                                r.add(yp(arm, m, p), -1.0);
                                r.add(yn(arm, m, p), -1.0);
                            }
                        }
                        if let Some(q) = t.checked_sub(j) {
                            for m in 1..=l {
                                r.add(yn(arm, m, q), 1.0);
                            }
                        }
                        for s in 1..j {
                            if s <= t {
                                r.add(yp(arm, j - s, t - s), 1.0);
                            }
                        }
                        ineq.push(r.finish(RowTag::PositiveState { arm, state: j, t }, 0.0));
                    }
                }
            }
            for arm in 0..k {
                for t in 0..l {
                    let mut r = RowBuilder::new();
                    r.add(yn(arm, 1, t), 1.0);
                    if let Some(p) = t.checked_sub(1) {
                        r.add(f(arm, p), -1.0);
                        for m in 1..=l {
                            r.add(yp(arm, m, p), -1.0);
                        }
                    }
                    ineq.push(r.finish(RowTag::NegativeStart { arm, t }, 0.0));
                }
            }
            for arm in 0..k {
                for j in 2..=l {
                    for t in 0..l {
                        let mut r = RowBuilder::new();
                        r.add(yn(arm, j, t), 1.0);
                        if let Some(p) = t.checked_sub(1) {
                            r.add(yn(arm, j - 1, p), -1.0);
                        }
                        ineq.push(r.finish(RowTag::NegativeRun { arm, state: j, t }, 0.0));
                    }
                }
            }
        }
    }

    for var in 0..layout.num_vars() {
        ineq.push(Row {
            tag: RowTag::UpperBound { var },
            coeffs: vec![(var, 1.0)],
            rhs: 1.0,
        });
        ineq.push(Row {
            tag: RowTag::LowerBound { var },
            coeffs: vec![(var, -1.0)],
            rhs: 0.0,
        });
    }
    (ineq, eq)
}

impl IlpInstance {
    pub fn num_vars(&self) -> usize {
        self.layout.num_vars()
    }

    pub fn value(&self, z: &[f64]) -> f64 {
        self.objective.iter().zip(z).map(|(c, x)| c * x).sum()
    }

    /// Puts the value of each first pull, known when the block starts from
    /// `tau_init`, on the `F` variables. This turns the objective into the
    /// plain block value under `U`.
    pub fn set_first_pull_objective(&mut self, u: &UcbSnapshot, tau_init: &StateVector) {
        for arm in 0..self.layout.arms {
            for t in 0..self.layout.len {
                let k = self.layout.index(Var::F { arm, t });
                self.objective[k] = u.at_state(arm, first_pull_state(tau_init.get(arm), t));
            }
        }
    }

    /// First violated row at `z`, equalities first.
    pub fn first_violation(&self, z: &[f64]) -> Option<RowTag> {
        self.equalities
            .iter()
            .find(|r| (r.activity(z) - r.rhs).abs() > CHECK_TOL)
            .or_else(|| {
                self.inequalities
                    .iter()
                    .find(|r| r.activity(z) > r.rhs + CHECK_TOL)
            })
            .map(|r| r.tag)
    }

    pub fn is_feasible(&self, z: &[f64]) -> bool {
        z.len() == self.num_vars() && self.first_violation(z).is_none()
    }

    /// Relaxation with box bounds instead of bound rows.
    pub fn to_lp(&self) -> LpProblem {
        let conv = |rows: &[Row]| -> Vec<SparseRow> {
            rows.iter()
                .filter(|r| !r.tag.is_bound())
                .map(|r| SparseRow::new(r.coeffs.clone(), r.rhs))
                .collect()
        };
        LpProblem::new(
            self.objective.clone(),
            conv(&self.inequalities),
            conv(&self.equalities),
        )
        .expect("encoded rows index valid variables")
    }

    /// Plain-text dump of the program, one tagged row per line.
    pub fn to_lp_text(&self) -> String {
        let name = |k: usize| self.layout.var(k).to_string();
        let terms = |coeffs: &mut dyn Iterator<Item = (usize, f64)>| -> String {
            let mut s = String::new();
            for (k, a) in coeffs {
                let _ = write!(
                    s,
                    " {}{} {}",
                    if a < 0.0 { "-" } else { "+" },
                    fmt_num(a.abs()),
                    name(k)
                );
            }
            s
        };
        let mut out = String::new();
        let _ = writeln!(
            out,
            "\\ arms={} len={} regime={:?} vars={}",
            self.layout.arms,
            self.layout.len,
            self.layout.regime,
            self.num_vars()
        );
        out.push_str("maximize\n obj:");
        let mut nz = self
            .objective
            .iter()
            .copied()
            .enumerate()
            .filter(|&(_, c)| c != 0.0);
        out.push_str(&terms(&mut nz));
        out.push_str("\nsubject to\n");
        for r in &self.equalities {
            let _ = writeln!(
                out,
                " {}:{} = {}",
                r.tag,
                terms(&mut r.coeffs.iter().copied()),
                fmt_num(r.rhs)
            );
        }
        for r in &self.inequalities {
            let _ = writeln!(
                out,
                " {}:{} <= {}",
                r.tag,
                terms(&mut r.coeffs.iter().copied()),
                fmt_num(r.rhs)
            );
        }
        out.push_str("binary\n all\nend\n");
        out
    }
}

fn fmt_num(x: f64) -> String {
    let s = format!("{x:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s.is_empty() || s == "-" {
        "0".into()
    } else {
        s.to_string()
    }
}

/// The encoding of `block`.
pub fn feasible_point(block: &Block, layout: &Layout) -> Result<Vec<f64>, IlpError> {
    if block.len() != layout.len {
        return Err(IlpError::Dimension(format!(
            "block length {} vs layout {}",
            block.len(),
            layout.len
        )));
    }
    if block.actions().iter().any(|&a| a >= layout.arms) {
        return Err(IlpError::Dimension("arm index out of range".into()));
    }
    if !block.is_valid_for(layout.regime) {
        return Err(IlpError::RegimeViolation);
    }
    let mut z = vec![0.0; layout.num_vars()];
    for v in layout.pull_vars(block.actions()) {
        z[layout.index(v)] = 1.0;
    }
    Ok(z)
}

/// Block encoded by a feasible binary point.
pub fn decode(z: &[f64], instance: &IlpInstance) -> Result<Block, IlpError> {
    let layout = &instance.layout;
    if z.len() != layout.num_vars() {
        return Err(IlpError::Dimension(format!(
            "point has {} entries, expected {}",
            z.len(),
            layout.num_vars()
        )));
    }
    if let Some((index, &value)) = z
        .iter()
        .enumerate()
        .find(|(_, &x)| x.abs() > CHECK_TOL && (x - 1.0).abs() > CHECK_TOL)
    {
        return Err(IlpError::NotBinary { index, value });
    }
    if let Some(tag) = instance.first_violation(z) {
        return Err(IlpError::Violated(tag));
    }
    let actions = (0..layout.len)
        .map(|t| {
            let k = layout
                .vars_at(t)
                .into_iter()
                .find(|&k| z[k] > 0.5)
                .expect("action row holds");
            layout.var(k).arm()
        })
        .collect();
    Ok(Block::new(actions, layout.arms).expect("arms come from the layout"))
}

/// Variable fixings implied by committing to `prefix`: at each of its time
/// steps, the pull's variable is 1 and every other variable is 0.
pub fn prefix_fixings(layout: &Layout, prefix: &[Arm]) -> Vec<(usize, f64)> {
    let mut out = Vec::new();
    for (t, v) in layout.pull_vars(prefix).into_iter().enumerate() {
        let active = layout.index(v);
        for k in layout.vars_at(t) {
            out.push((k, if k == active { 1.0 } else { 0.0 }));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocks::{all_blocks, block_reward, calibrated_reward};
    use crate::instances::sec4;

    fn b(v: &[Arm]) -> Block {
        Block::new(v.to_vec(), 5).unwrap()
    }

    #[test]
    fn layout_round_trip() {
        for regime in [Regime::ConstantNegative, Regime::General] {
            let l = Layout::new(3, 4, regime).unwrap();
            for k in 0..l.num_vars() {
                assert_eq!(l.index(l.var(k)), k);
            }
        }
        assert_eq!(
            Layout::new(2, 2, Regime::ConstantNegative)
                .unwrap()
                .num_vars(),
            12
        );
        assert_eq!(
            Layout::new(2, 3, Regime::General).unwrap().num_vars(),
            6 + 36
        );
    }

    #[test]
    fn small_counts() {
        let u = UcbSnapshot::from_fn(2, CellScheme::Delay { cells: 2 }, |_, _| 0.5);
        let inst = encode(&u, 2, Regime::ConstantNegative).unwrap();
        assert_eq!(inst.num_vars(), 12);
        assert_eq!(
            inst.equalities
                .iter()
                .filter(|r| matches!(r.tag, RowTag::Action { .. }))
                .count(),
            2
        );
    }

    #[test]
    fn second_action_row() {
        let u = UcbSnapshot::from_fn(2, CellScheme::Signed { cells: 2 }, |_, _| 0.5);
        let inst = encode(&u, 3, Regime::General).unwrap();
        let ca = inst
            .equalities
            .iter()
            .find(|r| r.tag == RowTag::SecondAction)
            .unwrap();
        let l = inst.layout;
        assert_eq!(
            ca.coeffs,
            vec![
                (l.index(Var::F { arm: 0, t: 1 }), 1.0),
                (l.index(Var::F { arm: 1, t: 1 }), 1.0)
            ]
        );
        assert_eq!(ca.rhs, 1.0);
    }

    #[test]
    fn scheme_mismatch_rejected() {
        let u = UcbSnapshot::from_fn(2, CellScheme::Signed { cells: 2 }, |_, _| 0.5);
        assert!(matches!(
            encode(&u, 3, Regime::ConstantNegative),
            Err(IlpError::Dimension(_))
        ));
        assert!(UcbSnapshot::new(2, CellScheme::Delay { cells: 3 }, vec![0.0; 5]).is_err());
    }

    #[test]
    fn single_position_objective_is_zero() {
        let u = UcbSnapshot::from_fn(3, CellScheme::Delay { cells: 1 }, |_, _| 0.7);
        let inst = encode(&u, 1, Regime::ConstantNegative).unwrap();
        for a in 0..3 {
            let z = feasible_point(&Block::new(vec![a], 3).unwrap(), &inst.layout).unwrap();
            assert!(inst.is_feasible(&z));
            assert_eq!(inst.value(&z), 0.0);
        }
    }

    #[test]
    fn sec4_objective_matches_calibrated() {
        let table = sec4();
        let u = UcbSnapshot::true_means(&table, CellScheme::Delay { cells: 4 });
        let inst = encode(&u, 4, Regime::ConstantNegative).unwrap();
        let z = feasible_point(&b(&[0, 2, 2, 0]), &inst.layout).unwrap();
        assert!(inst.is_feasible(&z));
        assert!((inst.value(&z) - 1.10).abs() < 1e-12);
        assert_eq!(decode(&z, &inst).unwrap(), b(&[0, 2, 2, 0]));
    }

    #[test]
    fn general_pair_has_only_first_pulls() {
        let u = UcbSnapshot::from_fn(2, CellScheme::Signed { cells: 2 }, |_, _| 1.0);
        let inst = encode(&u, 2, Regime::General).unwrap();
        let blk = Block::new(vec![0, 1], 2).unwrap();
        let z = feasible_point(&blk, &inst.layout).unwrap();
        let l = inst.layout;
        let active: Vec<usize> = (0..z.len()).filter(|&k| z[k] == 1.0).collect();
        assert_eq!(
            active,
            vec![
                l.index(Var::F { arm: 0, t: 0 }),
                l.index(Var::F { arm: 1, t: 1 })
            ]
        );
        assert_eq!(inst.value(&z), 0.0);
        assert!(inst.is_feasible(&z));
        let bad = Block::new(vec![1, 1], 2).unwrap();
        assert_eq!(feasible_point(&bad, &l), Err(IlpError::RegimeViolation));
    }

    #[test]
    fn two_actions_at_once_violate_action_row() {
        let u = UcbSnapshot::from_fn(2, CellScheme::Delay { cells: 3 }, |_, _| 0.5);
        let inst = encode(&u, 3, Regime::ConstantNegative).unwrap();
        let mut z = feasible_point(&Block::new(vec![0, 1, 0], 2).unwrap(), &inst.layout).unwrap();
        z[inst.layout.index(Var::F { arm: 1, t: 0 })] = 1.0;
        assert_eq!(
            decode(&z, &inst),
            Err(IlpError::Violated(RowTag::Action { t: 0 }))
        );
        z[inst.layout.index(Var::F { arm: 1, t: 0 })] = 0.5;
        assert!(matches!(decode(&z, &inst), Err(IlpError::NotBinary { .. })));
    }

    #[test]
    fn exhaustive_round_trip_k2_d4() {
        for regime in [Regime::ConstantNegative, Regime::General] {
            let u = UcbSnapshot::from_fn(2, CellScheme::for_regime(regime, 4), |a, j| {
                0.1 * a as f64 + 0.01 * j as f64
            });
            let inst = encode(&u, 4, regime).unwrap();
            for blk in all_blocks(2, 4) {
                match feasible_point(&blk, &inst.layout) {
                    Ok(z) => {
                        assert!(inst.is_feasible(&z), "{blk} {:?}", inst.first_violation(&z));
                        assert_eq!(decode(&z, &inst).unwrap(), blk);
                    }
                    Err(e) => {
                        assert_eq!(e, IlpError::RegimeViolation);
                        assert!(!blk.is_valid_for(regime));
                    }
                }
            }
        }
    }

    #[test]
    fn first_pull_objective_gives_plain_value() {
        let table = sec4();
        for regime in [Regime::ConstantNegative, Regime::General] {
            let u = UcbSnapshot::true_means(&table, CellScheme::for_regime(regime, 12));
            let init = StateVector::from_vec(vec![2, 1, 3, -1, 4]).unwrap();
            let mut inst = encode(&u, 4, regime).unwrap();
            inst.set_first_pull_objective(&u, &init);
            for blk in [b(&[0, 2, 2, 0]), b(&[3, 1, 0, 1]), b(&[4, 0, 1, 3])] {
                let z = feasible_point(&blk, &inst.layout).unwrap();
                let plain = block_reward(&blk, &init, &table).0.total;
                assert!((inst.value(&z) - plain).abs() < 1e-12, "{blk}");
            }
            let cal = calibrated_reward(&b(&[0, 2, 2, 0]), &table, regime)
                .unwrap()
                .total;
            assert!((cal - 1.10).abs() < 1e-12);
        }
    }

    #[test]
    fn prefix_fixing_counts() {
        let l = Layout::new(3, 4, Regime::ConstantNegative).unwrap();
        let fx = prefix_fixings(&l, &[0, 0]);
        assert_eq!(fx.len(), 2 * 3 * 5);
        assert_eq!(fx.iter().filter(|f| f.1 == 1.0).count(), 2);
        assert!(fx.contains(&(
            l.index(Var::Y {
                arm: 0,
                delay: 1,
                t: 1
            }),
            1.0
        )));
    }

    #[test]
    fn dump_mentions_every_row() {
        let u = UcbSnapshot::from_fn(2, CellScheme::Delay { cells: 2 }, |_, _| 0.25);
        let inst = encode(&u, 2, Regime::ConstantNegative).unwrap();
        let text = inst.to_lp_text();
        let rows = inst.equalities.len() + inst.inequalities.len();
        assert_eq!(
            text.lines()
                .filter(|l| l.contains(':') && !l.contains("obj"))
                .count(),
            rows
        );
    }
}
