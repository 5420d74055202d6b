//! Dense two-phase bounded-variable primal simplex.
//!
//! Solves `max c.x s.t. G x <= h, A x = b, 0 <= x <= u` where `u` defaults to
//! 1 for every variable. Fixings are substituted out and a small presolve
//! removes redundant rows and variables pinned by tight rows before the
//! tableau is built.

use thiserror::Error;

pub const FEAS_TOL: f64 = 1e-9;
/// Threshold used by callers to classify a relaxed value as integral.
pub const INT_TOL: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("row references variable {var} but the problem has {n} variables")]
    BadIndex { var: usize, n: usize },
    #[error("upper bound vector has length {got}, expected {n}")]
    BadBounds { got: usize, n: usize },
    #[error("non-finite coefficient in {0}")]
    NonFinite(&'static str),
}

/// Row `sum a_k x_k (<= or =) rhs` in sparse form.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseRow {
    pub coeffs: Vec<(usize, f64)>,
    pub rhs: f64,
}

impl SparseRow {
    pub fn new(coeffs: Vec<(usize, f64)>, rhs: f64) -> Self {
        Self { coeffs, rhs }
    }

    /// Row from a dense coefficient vector.
    pub fn dense(coeffs: &[f64], rhs: f64) -> Self {
        Self::new(
            coeffs
                .iter()
                .copied()
                .enumerate()
                .filter(|&(_, a)| a != 0.0)
                .collect(),
            rhs,
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    objective: Vec<f64>,
    inequalities: Vec<SparseRow>,
    equalities: Vec<SparseRow>,
    upper: Vec<f64>,
}

impl LpProblem {
    pub fn new(
        objective: Vec<f64>,
        inequalities: Vec<SparseRow>,
        equalities: Vec<SparseRow>,
    ) -> Result<Self, LpError> {
        let n = objective.len();
        if objective.iter().any(|c| !c.is_finite()) {
            return Err(LpError::NonFinite("objective"));
        }
        for r in inequalities.iter().chain(&equalities) {
            if let Some(&(var, _)) = r.coeffs.iter().find(|(k, _)| *k >= n) {
                return Err(LpError::BadIndex { var, n });
            }
            if !r.rhs.is_finite() || r.coeffs.iter().any(|(_, a)| !a.is_finite()) {
                return Err(LpError::NonFinite("constraint row"));
            }
        }
        Ok(Self {
            objective,
            inequalities,
            equalities,
            upper: vec![1.0; n],
        })
    }

    /// Replaces the upper bounds; `f64::INFINITY` removes a bound.
    pub fn with_upper(mut self, upper: Vec<f64>) -> Result<Self, LpError> {
        if upper.len() != self.objective.len() {
            return Err(LpError::BadBounds {
                got: upper.len(),
                n: self.objective.len(),
            });
        }
        if upper.iter().any(|u| u.is_nan() || *u < 0.0) {
            return Err(LpError::NonFinite("upper bounds"));
        }
        self.upper = upper;
        Ok(self)
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn inequalities(&self) -> &[SparseRow] {
        &self.inequalities
    }

    pub fn equalities(&self) -> &[SparseRow] {
        &self.equalities
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// Largest violation of rows and bounds at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let act = |r: &SparseRow| r.coeffs.iter().map(|&(k, a)| a * x[k]).sum::<f64>() - r.rhs;
        let rows = self.inequalities.iter().map(|r| act(r).max(0.0));
        let eqs = self.equalities.iter().map(|r| act(r).abs());
        let bounds = x
            .iter()
            .zip(&self.upper)
            .map(|(&v, &u)| (-v).max(v - u).max(0.0));
        rows.chain(eqs).chain(bounds).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

impl LpSolution {
    fn failed(status: LpStatus, n: usize, iterations: usize) -> Self {
        Self {
            status,
            x: vec![0.0; n],
            objective: f64::NAN,
            iterations,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

/// Entering-variable choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PivotRule {
    /// Smallest eligible index; never cycles.
    #[default]
    Bland,
    /// Largest reduced cost, smallest index among ties.
    Dantzig,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub tolerance: f64,
    pub pivot_rule: PivotRule,
    pub max_iterations: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tolerance: FEAS_TOL,
            pivot_rule: PivotRule::Bland,
            max_iterations: 100_000,
        }
    }
}

pub fn solve(p: &LpProblem) -> LpSolution {
    solve_with_options(p, &[], &SolverOptions::default())
}

/// Solves `p` with the listed variables substituted by the given values.
pub fn solve_with_fixings(p: &LpProblem, fixings: &[(usize, f64)]) -> LpSolution {
    solve_with_options(p, fixings, &SolverOptions::default())
}

pub fn solve_with_options(
    p: &LpProblem,
    fixings: &[(usize, f64)],
    opts: &SolverOptions,
) -> LpSolution {
    let n = p.num_vars();
    let reduced = match presolve(p, fixings, opts.tolerance) {
        Some(r) => r,
        None => return LpSolution::failed(LpStatus::Infeasible, n, 0),
    };
    let free: Vec<usize> = (0..n).filter(|&j| reduced.value[j].is_none()).collect();
    let mut x: Vec<f64> = reduced.value.iter().map(|v| v.unwrap_or(0.0)).collect();
    let mut iterations = 0;
    if !free.is_empty() {
        let mut position = vec![usize::MAX; n];
        for (q, &j) in free.iter().enumerate() {
            position[j] = q;
        }
        let rows: Vec<Constraint> = reduced
            .rows
            .iter()
            .map(|r| Constraint {
                coeffs: r.coeffs.iter().map(|&(k, a)| (position[k], a)).collect(),
                rhs: r.rhs,
                equality: r.equality,
            })
            .collect();
        let c: Vec<f64> = free.iter().map(|&j| p.objective[j]).collect();
        let u: Vec<f64> = free.iter().map(|&j| p.upper[j]).collect();
        let mut tab = Tableau::new(&c, &u, &rows);
        let outcome = tab.run(opts);
        iterations = tab.iterations;
        match outcome {
            LpStatus::Optimal => {
                for (q, &j) in free.iter().enumerate() {
                    x[j] = tab.value(q).clamp(0.0, p.upper[j]);
                }
            }
            status => return LpSolution::failed(status, n, iterations),
        }
    }
    let objective = p.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
    LpSolution {
        status: LpStatus::Optimal,
        x,
        objective,
        iterations,
    }
}

struct Constraint {
    coeffs: Vec<(usize, f64)>,
    rhs: f64,
    equality: bool,
}

struct Presolved {
    value: Vec<Option<f64>>,
    rows: Vec<Constraint>,
}

/// Substitutes fixings and repeatedly drops redundant rows and fixes
/// variables forced by rows that are tight at an activity extreme. Returns
/// `None` when infeasibility is detected.
fn presolve(p: &LpProblem, fixings: &[(usize, f64)], tol: f64) -> Option<Presolved> {
    let n = p.num_vars();
    let mut value: Vec<Option<f64>> = vec![None; n];
    for &(j, v) in fixings {
        if v < -tol || v > p.upper[j] + tol {
            return None;
        }
        if let Some(old) = value[j] {
            if (old - v).abs() > tol {
                return None;
            }
        }
        value[j] = Some(v.clamp(0.0, p.upper[j]));
    }
    for (j, slot) in value.iter_mut().enumerate() {
        if p.upper[j] <= 0.0 {
            if slot.is_some_and(|v| v.abs() > tol) {
                return None;
            }
            *slot = Some(0.0);
        }
    }

    let all: Vec<(&SparseRow, bool)> = p
        .equalities
        .iter()
        .map(|r| (r, true))
        .chain(p.inequalities.iter().map(|r| (r, false)))
        .collect();
    let mut active = vec![true; all.len()];
    loop {
        let mut changed = false;
        for (idx, &(row, equality)) in all.iter().enumerate() {
            if !active[idx] {
                continue;
            }
            let (mut lo, mut hi, mut fixed) = (0.0, 0.0, 0.0);
            let mut free_terms = 0;
            for &(k, a) in &row.coeffs {
                match value[k] {
                    Some(v) => fixed += a * v,
                    None => {
                        free_terms += 1;
                        let top = a * p.upper[k];
                        if a > 0.0 {
                            hi += top;
                        } else {
                            lo += top;
                        }
                    }
                }
            }
            let rhs = row.rhs - fixed;
            let slack_tol = tol * (1.0 + rhs.abs());
            if lo > rhs + slack_tol || (equality && hi < rhs - slack_tol) {
                return None;
            }
            let pin = |value: &mut Vec<Option<f64>>, at_min: bool| {
                for &(k, a) in &row.coeffs {
                    if value[k].is_none() {
                        value[k] = Some(if (a > 0.0) == at_min { 0.0 } else { p.upper[k] });
                    }
                }
            };
            if free_terms == 0 {
                active[idx] = false;
            } else if lo >= rhs - slack_tol {
                pin(&mut value, true);
                active[idx] = false;
                changed = true;
            } else if equality && hi <= rhs + slack_tol {
                pin(&mut value, false);
                active[idx] = false;
                changed = true;
            } else if !equality && hi <= rhs + slack_tol {
                active[idx] = false;
            } else if equality && free_terms == 1 {
                let &(k, a) = row
                    .coeffs
                    .iter()
                    .find(|(k, _)| value[*k].is_none())
                    .unwrap();
                let v = rhs / a;
                if v < -tol || v > p.upper[k] + tol {
                    return None;
                }
                value[k] = Some(v.clamp(0.0, p.upper[k]));
                active[idx] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    let rows = all
        .iter()
        .zip(&active)
        .filter(|(_, &on)| on)
        .map(|(&(row, equality), _)| {
            let mut rhs = row.rhs;
            let mut coeffs = Vec::with_capacity(row.coeffs.len());
            for &(k, a) in &row.coeffs {
                match value[k] {
                    Some(v) => rhs -= a * v,
                    None => coeffs.push((k, a)),
                }
            }
            Constraint {
                coeffs,
                rhs,
                equality,
            }
        })
        .collect();
    Some(Presolved { value, rows })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Basic(usize),
    Lower,
    Upper,
}

/// Full dense tableau `B^-1 [A | I_slack | I_art]` with basic values.
struct Tableau {
    m: usize,
    cols: usize,
    first_art: usize,
    t: Vec<f64>,
    beta: Vec<f64>,
    rhs: Vec<f64>,
    upper: Vec<f64>,
    cost: Vec<f64>,
    status: Vec<Status>,
    basis: Vec<usize>,
    initial_basis: Vec<usize>,
    iterations: usize,
}

impl Tableau {
    fn new(c: &[f64], u: &[f64], rows: &[Constraint]) -> Self {
        let n = c.len();
        let m = rows.len();
        let slacks = rows.iter().filter(|r| !r.equality).count();
        let arts = rows.iter().filter(|r| r.equality || r.rhs < 0.0).count();
        let cols = n + slacks + arts;
        let first_art = n + slacks;
        let mut t = vec![0.0; m * cols];
        let mut rhs = vec![0.0; m];
        let mut upper: Vec<f64> = u.to_vec();
        upper.extend(std::iter::repeat_n(f64::INFINITY, slacks + arts));
        let mut status = vec![Status::Lower; cols];
        let mut basis = vec![0; m];
        let (mut next_slack, mut next_art) = (n, first_art);
        for (r, row) in rows.iter().enumerate() {
            let sign = if row.rhs < 0.0 { -1.0 } else { 1.0 };
            let line = &mut t[r * cols..(r + 1) * cols];
            for &(k, a) in &row.coeffs {
                line[k] += sign * a;
            }
            rhs[r] = sign * row.rhs;
            let mut basic = None;
            if !row.equality {
                line[next_slack] = sign;
                if sign > 0.0 {
                    basic = Some(next_slack);
                }
                next_slack += 1;
            }
            if basic.is_none() {
                line[next_art] = 1.0;
                basic = Some(next_art);
                next_art += 1;
            }
            let b = basic.unwrap();
            basis[r] = b;
            status[b] = Status::Basic(r);
        }
        let mut cost = vec![0.0; cols];
        cost[..n].copy_from_slice(c);
        Self {
            m,
            cols,
            first_art,
            t,
            beta: rhs.clone(),
            initial_basis: basis.clone(),
            rhs,
            upper,
            cost,
            status,
            basis,
            iterations: 0,
        }
    }

    fn value(&self, j: usize) -> f64 {
        match self.status[j] {
            Status::Basic(r) => self.beta[r],
            Status::Lower => 0.0,
            Status::Upper => self.upper[j],
        }
    }

    fn reduced_costs(&self, cost: &[f64]) -> Vec<f64> {
        let mut d = cost.to_vec();
        for r in 0..self.m {
            let cb = cost[self.basis[r]];
            if cb != 0.0 {
                let line = &self.t[r * self.cols..(r + 1) * self.cols];
                for (dj, &a) in d.iter_mut().zip(line) {
                    *dj -= cb * a;
                }
            }
        }
        d
    }

    /// Recomputes basic values from the basis inverse held in the initial
    /// basis columns.
    fn refresh_beta(&mut self) {
        let cols = self.cols;
        for r in 0..self.m {
            let line = &self.t[r * cols..(r + 1) * cols];
            let mut v: f64 = self
                .initial_basis
                .iter()
                .zip(&self.rhs)
                .map(|(&c, &b)| line[c] * b)
                .sum();
            for (j, &l) in line.iter().enumerate().take(cols) {
                if self.status[j] == Status::Upper {
                    v -= l * self.upper[j];
                }
            }
            self.beta[r] = v;
        }
    }

    fn run(&mut self, opts: &SolverOptions) -> LpStatus {
        let tol = opts.tolerance;
        if self.first_art < self.cols {
            let mut phase1 = vec![0.0; self.cols];
            for c in &mut phase1[self.first_art..] {
                *c = -1.0;
            }
            match self.optimise(&phase1, opts) {
                LpStatus::Optimal => {}
                LpStatus::Unbounded => unreachable!("phase one is bounded"),
                other => return other,
            }
            self.refresh_beta();
            let infeasibility: f64 = (0..self.m)
                .filter(|&r| self.basis[r] >= self.first_art)
                .map(|r| self.beta[r])
                .sum();
            if infeasibility > tol * (1.0 + self.m as f64).sqrt() {
                return LpStatus::Infeasible;
            }
            self.drive_out_artificials(tol);
            for j in self.first_art..self.cols {
                self.upper[j] = 0.0;
            }
        }
        let cost = self.cost.clone();
        let status = self.optimise(&cost, opts);
        self.refresh_beta();
        status
    }

    fn drive_out_artificials(&mut self, tol: f64) {
        for r in 0..self.m {
            if self.basis[r] < self.first_art {
                continue;
            }
            let line = &self.t[r * self.cols..(r + 1) * self.cols];
            if let Some(j) = (0..self.first_art)
                .find(|&j| !matches!(self.status[j], Status::Basic(_)) && line[j].abs() > tol)
            {
                let value = self.value(j);
                self.pivot(r, j, None);
                self.beta[r] = value;
            }
        }
    }

    fn optimise(&mut self, cost: &[f64], opts: &SolverOptions) -> LpStatus {
        let tol = opts.tolerance;
        let mut d = self.reduced_costs(cost);
        loop {
            if self.iterations >= opts.max_iterations {
                return LpStatus::IterationLimit;
            }
            let eligible = |j: usize| match self.status[j] {
                Status::Lower => d[j] > tol && self.upper[j] > 0.0,
                Status::Upper => d[j] < -tol,
                Status::Basic(_) => false,
            };
            let entering = match opts.pivot_rule {
                PivotRule::Bland => (0..self.first_art).find(|&j| eligible(j)),
                PivotRule::Dantzig => (0..self.first_art).filter(|&j| eligible(j)).fold(
                    None,
                    |best: Option<usize>, j| match best {
                        Some(b) if d[b].abs() >= d[j].abs() => Some(b),
                        _ => Some(j),
                    },
                ),
            };
            let Some(j) = entering else {
                return LpStatus::Optimal;
            };
            self.iterations += 1;
            let dir = if self.status[j] == Status::Lower {
                1.0
            } else {
                -1.0
            };

            // Ratio test; ties go to the smallest basic index, a bound flip
            // wins ties.
            let mut best: Option<(f64, usize, bool)> = None;
            for r in 0..self.m {
                let alpha = dir * self.t[r * self.cols + j];
                let limit = if alpha > tol {
                    self.beta[r].max(0.0) / alpha
                } else if alpha < -tol && self.upper[self.basis[r]].is_finite() {
                    (self.upper[self.basis[r]] - self.beta[r]).max(0.0) / -alpha
                } else {
                    continue;
                };
                let better = match best {
                    None => true,
                    Some((l, br, _)) => {
                        limit < l - 1e-12 || (limit <= l + 1e-12 && self.basis[r] < self.basis[br])
                    }
                };
                if better {
                    best = Some((limit, r, alpha > 0.0));
                }
            }
            let flip = self.upper[j];
            match best {
                Some((theta, r, to_lower)) if theta < flip - 1e-12 => {
                    for i in 0..self.m {
                        self.beta[i] -= dir * theta * self.t[i * self.cols + j];
                    }
                    let entering_value = if dir > 0.0 {
                        theta
                    } else {
                        self.upper[j] - theta
                    };
                    let leaving = self.basis[r];
                    self.pivot(r, j, Some(&mut d));
                    self.status[leaving] = if to_lower {
                        Status::Lower
                    } else {
                        Status::Upper
                    };
                    self.beta[r] = entering_value;
                }
                _ if flip.is_finite() => {
                    for i in 0..self.m {
                        self.beta[i] -= dir * flip * self.t[i * self.cols + j];
                    }
                    self.status[j] = if dir > 0.0 {
                        Status::Upper
                    } else {
                        Status::Lower
                    };
                }
                _ => return LpStatus::Unbounded,
            }
        }
    }

    /// Pivots column `j` into the basis at row `r`. The caller fixes the
    /// leaving variable's status and the new basic value.
    fn pivot(&mut self, r: usize, j: usize, d: Option<&mut Vec<f64>>) {
        let cols = self.cols;
        let leaving = self.basis[r];
        let piv = self.t[r * cols + j];
        let nz: Vec<usize> = {
            let line = &mut self.t[r * cols..(r + 1) * cols];
            let mut nz = Vec::new();
            for (k, v) in line.iter_mut().enumerate() {
                if *v != 0.0 {
                    *v /= piv;
                    nz.push(k);
                }
            }
            nz
        };
        let (before, rest) = self.t.split_at_mut(r * cols);
        let (pivot_row, after) = rest.split_at_mut(cols);
        for line in before
            .chunks_exact_mut(cols)
            .chain(after.chunks_exact_mut(cols))
        {
            let f = line[j];
            if f != 0.0 {
                for &k in &nz {
                    line[k] -= f * pivot_row[k];
                }
                line[j] = 0.0;
            }
        }
        if let Some(d) = d {
            let f = d[j];
            if f != 0.0 {
                for &k in &nz {
                    d[k] -= f * pivot_row[k];
                }
                d[j] = 0.0;
            }
        }
        self.status[leaving] = Status::Lower;
        self.status[j] = Status::Basic(r);
        self.basis[r] = j;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(c: &[f64], g: &[(&[f64], f64)], a: &[(&[f64], f64)]) -> LpProblem {
        LpProblem::new(
            c.to_vec(),
            g.iter().map(|(r, h)| SparseRow::dense(r, *h)).collect(),
            a.iter().map(|(r, b)| SparseRow::dense(r, *b)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn simple_max() {
        let p = lp(&[1.0, 0.0], &[(&[1.0, 1.0], 1.0)], &[]);
        let s = solve(&p);
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective - 1.0).abs() < 1e-12);
        assert!((s.x[0] - 1.0).abs() < 1e-12 && s.x[1].abs() < 1e-12);
    }

    #[test]
    fn infeasible_box() {
        // x >= 2 written as -x <= -2.
        let p = lp(&[1.0], &[(&[-1.0], -2.0)], &[]);
        assert_eq!(solve(&p).status, LpStatus::Infeasible);
        let q = lp(&[1.0, 1.0], &[], &[(&[1.0, 1.0], 3.0)]);
        assert_eq!(solve(&q).status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded_without_box() {
        let p = lp(&[1.0, 0.0], &[(&[1.0, -1.0], 1.0)], &[])
            .with_upper(vec![f64::INFINITY; 2])
            .unwrap();
        assert_eq!(solve(&p).status, LpStatus::Unbounded);
    }

    #[test]
    fn textbook_problem() {
        // max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18, no upper bounds.
        let p = lp(
            &[3.0, 5.0],
            &[(&[1.0, 0.0], 4.0), (&[0.0, 2.0], 12.0), (&[3.0, 2.0], 18.0)],
            &[],
        )
        .with_upper(vec![f64::INFINITY; 2])
        .unwrap();
        let s = solve(&p);
        assert!((s.objective - 36.0).abs() < 1e-9);
        assert!((s.x[0] - 2.0).abs() < 1e-9 && (s.x[1] - 6.0).abs() < 1e-9);
        let d = solve_with_options(
            &p,
            &[],
            &SolverOptions {
                pivot_rule: PivotRule::Dantzig,
                ..Default::default()
            },
        );
        assert!((d.objective - 36.0).abs() < 1e-9);
    }

    #[test]
    fn equality_and_negative_rhs() {
        // max x1 + 2 x2 + 3 x3, x1 + x2 + x3 = 2, x3 - x1 <= -0.5.
        let p = lp(
            &[1.0, 2.0, 3.0],
            &[(&[-1.0, 0.0, 1.0], -0.5)],
            &[(&[1.0, 1.0, 1.0], 2.0)],
        );
        let s = solve(&p);
        assert_eq!(s.status, LpStatus::Optimal);
        // Best: x2 = 1, x1 = 0.75, x3 = 0.25 gives 0.75 + 2 + 0.75 = 3.5.
        assert!((s.objective - 3.5).abs() < 1e-9, "{s:?}");
        assert!(p.max_violation(&s.x) < 1e-9);
    }

    #[test]
    fn fixings() {
        let p = lp(&[1.0, 1.0, 1.0], &[(&[1.0, 1.0, 0.0], 1.0)], &[]);
        let free = solve(&p);
        assert_eq!(solve_with_fixings(&p, &[]), free);
        let s = solve_with_fixings(&p, &[(2, 0.0)]);
        assert!((s.objective - 1.0).abs() < 1e-12);
        let bad = lp(&[1.0, 1.0], &[], &[(&[1.0, 1.0], 1.0)]);
        assert_eq!(
            solve_with_fixings(&bad, &[(0, 1.0), (1, 1.0)]).status,
            LpStatus::Infeasible
        );
        assert_eq!(
            solve_with_fixings(&bad, &[(0, 1.0), (0, 0.0)]).status,
            LpStatus::Infeasible
        );
    }

    #[test]
    fn degenerate_does_not_cycle() {
        // Classic cycling example of Beale, bounded by a box.
        let p = lp(
            &[0.75, -150.0, 0.02, -6.0],
            &[
                (&[0.25, -60.0, -0.04, 9.0], 0.0),
                (&[0.5, -90.0, -0.02, 3.0], 0.0),
                (&[0.0, 0.0, 1.0, 0.0], 1.0),
            ],
            &[],
        )
        .with_upper(vec![f64::INFINITY; 4])
        .unwrap();
        let s = solve(&p);
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective - 0.05).abs() < 1e-9, "{s:?}");
    }

    #[test]
    fn deterministic() {
        let p = lp(
            &[0.3, 0.2, 0.5, 0.1],
            &[(&[1.0, 1.0, 0.0, 0.0], 1.0), (&[0.0, 1.0, 1.0, 1.0], 1.5)],
            &[(&[1.0, 0.0, 1.0, 0.0], 1.0)],
        );
        assert_eq!(solve(&p), solve(&p));
    }
}
