//! Exact bounded-variable primal simplex.
//!
//! Solves `min c'x` subject to linear rows (`<=`, `=`, `>=`) and per-variable
//! bounds `l <= x <= u`, with `l` finite and `u` possibly infinite. Bounds are
//! handled implicitly: a nonbasic variable sits at one of its bounds and the
//! ratio test includes the entering variable's own bound flip. A first phase
//! minimizes the sum of artificial variables to reach a feasible basis.
//!
//! All arithmetic is exact, so there are no tolerances anywhere.

use std::fmt;

use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        })
    }
}

impl Relation {
    pub fn holds(&self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            Relation::Le => lhs <= rhs,
            Relation::Eq => lhs == rhs,
            Relation::Ge => lhs >= rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpRow {
    pub terms: Vec<(usize, Rational)>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl LpRow {
    pub fn activity(&self, point: &[Rational]) -> Rational {
        self.terms.iter().map(|(v, a)| a * &point[*v]).sum()
    }
}

/// A continuous linear program in minimization form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpProblem {
    pub lower: Vec<Rational>,
    /// `None` is `+inf`.
    pub upper: Vec<Option<Rational>>,
    /// Dense objective, one entry per variable.
    pub objective: Vec<Rational>,
    pub rows: Vec<LpRow>,
}

impl LpProblem {
    pub fn num_vars(&self) -> usize {
        self.lower.len()
    }

    pub fn objective_value(&self, point: &[Rational]) -> Rational {
        self.objective.iter().zip(point).filter(|(c, _)| !c.is_zero()).map(|(c, x)| c * x).sum()
    }

    /// Exact bound and row feasibility of `point`.
    pub fn is_feasible(&self, point: &[Rational]) -> bool {
        point.len() == self.num_vars()
            && point.iter().zip(&self.lower).all(|(x, l)| x >= l)
            && point.iter().zip(&self.upper).all(|(x, u)| u.as_ref().is_none_or(|u| x <= u))
            && self.rows.iter().all(|r| r.relation.holds(&r.activity(point), &r.rhs))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum PivotRule {
    /// Lowest-index entering and leaving choices; never cycles.
    #[default]
    Bland,
    /// Most negative reduced cost, switching to Bland after a run of
    /// degenerate pivots.
    Dantzig,
}

impl std::str::FromStr for PivotRule {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bland" => Ok(PivotRule::Bland),
            "dantzig" => Ok(PivotRule::Dantzig),
            other => Err(format!("unknown pivot rule `{other}`")),
        }
    }
}

impl fmt::Display for PivotRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PivotRule::Bland => "bland",
            PivotRule::Dantzig => "dantzig",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LpOptions {
    pub pivot_rule: PivotRule,
    /// Pivots plus bound flips across both phases.
    pub iteration_cap: u64,
}

impl Default for LpOptions {
    fn default() -> Self {
        LpOptions { pivot_rule: PivotRule::Bland, iteration_cap: 1_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LpError {
    #[error("malformed problem: {0}")]
    Malformed(String),
    #[error("simplex exceeded the hard cap of {0} iterations")]
    HardCapExceeded(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// A column of the internal standard form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Column {
    Structural(usize),
    /// Slack of row `r`: `+1` for `<=` rows, `-1` for `>=` rows, bounds `[0, inf)`.
    Slack(usize),
    /// Artificial of row `r`, fixed at zero in the final basis.
    Artificial(usize),
}

/// Final basis, for independent certificate checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisInfo {
    /// Basic column of each row.
    pub basic: Vec<Column>,
    /// Nonbasic columns resting at their upper bound; every other nonbasic
    /// column is at its lower bound.
    pub at_upper: Vec<Column>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpResult {
    pub status: LpStatus,
    /// Optimal value when `status` is `Optimal`.
    pub value: Option<Rational>,
    /// Primal point (structural variables) when `status` is `Optimal`.
    pub point: Vec<Rational>,
    pub iterations: u64,
    pub basis: Option<BasisInfo>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum State {
    Basic,
    AtLower,
    AtUpper,
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    lo: Vec<Rational>,
    up: Vec<Option<Rational>>,
    x: Vec<Rational>,
    state: Vec<State>,
    /// Columns barred from entering (artificials once they leave).
    barred: Vec<bool>,
    reduced: Vec<Rational>,
    kinds: Vec<Column>,
    iterations: u64,
    cap: u64,
    /// Reused nonzero index buffer for pivots.
    scratch: Vec<usize>,
}

enum Step {
    Optimal,
    Unbounded,
    Continue,
}

const DEGENERATE_RUN_BEFORE_BLAND: u32 = 50;

impl Tableau {
    fn ncols(&self) -> usize {
        self.lo.len()
    }

    fn compute_reduced(&mut self, cost: &[Rational]) {
        let mut d = cost.to_vec();
        for (r, row) in self.rows.iter().enumerate() {
            let cb = &cost[self.basis[r]];
            if cb.is_zero() {
                continue;
            }
            for (c, a) in row.iter().enumerate() {
                if !a.is_zero() {
                    d[c] -= &(cb * a);
                }
            }
        }
        self.reduced = d;
    }

    fn eligible(&self, c: usize) -> Option<i8> {
        if self.barred[c] {
            return None;
        }
        let d = &self.reduced[c];
        match self.state[c] {
            State::AtLower if d.is_negative() && self.up[c].as_ref() != Some(&self.lo[c]) => Some(1),
            State::AtUpper if d.is_positive() => Some(-1),
            _ => None,
        }
    }

    fn choose_entering(&self, bland: bool) -> Option<(usize, i8)> {
        if bland {
            return (0..self.ncols()).find_map(|c| self.eligible(c).map(|dir| (c, dir)));
        }
        let mut best: Option<(usize, i8)> = None;
        for c in 0..self.ncols() {
            if let Some(dir) = self.eligible(c) {
                let better = match best {
                    None => true,
                    Some((b, _)) => self.reduced[c].abs() > self.reduced[b].abs(),
                };
                if better {
                    best = Some((c, dir));
                }
            }
        }
        best
    }

    fn pivot(&mut self, r: usize, e: usize) {
        let piv = self.rows[r][e].clone();
        if piv != Rational::one() {
            let inv = piv.recip();
            for a in self.rows[r].iter_mut() {
                if !a.is_zero() {
                    *a = &*a * &inv;
                }
            }
        }
        let mut nz = std::mem::take(&mut self.scratch);
        nz.clear();
        nz.extend((0..self.ncols()).filter(|&c| !self.rows[r][c].is_zero()));
        let pivot_row = std::mem::take(&mut self.rows[r]);
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[e].is_zero() {
                continue;
            }
            let f = row[e].clone();
            for &c in &nz {
                row[c].sub_mul(&f, &pivot_row[c]);
            }
        }
        if !self.reduced[e].is_zero() {
            let f = self.reduced[e].clone();
            for &c in &nz {
                self.reduced[c].sub_mul(&f, &pivot_row[c]);
            }
        }
        self.scratch = nz;
        self.rows[r] = pivot_row;
        let leaving = self.basis[r];
        self.basis[r] = e;
        self.state[e] = State::Basic;
        if matches!(self.kinds[leaving], Column::Artificial(_)) {
            self.barred[leaving] = true;
        }
    }

    /// One simplex iteration. Returns whether the step was degenerate.
    fn step(&mut self, bland: bool, degenerate: &mut bool) -> Result<Step, LpError> {
        let Some((e, dir)) = self.choose_entering(bland) else {
            return Ok(Step::Optimal);
        };
        if self.iterations >= self.cap {
            return Err(LpError::HardCapExceeded(self.cap));
        }
        self.iterations += 1;

        // Ratio test. `None` leaving row means the entering variable flips bound.
        let mut best_t: Option<Rational> = self.up[e].as_ref().map(|u| u - &self.lo[e]);
        let mut leave: Option<(usize, State)> = None;
        for r in 0..self.rows.len() {
            let a = &self.rows[r][e];
            if a.is_zero() {
                continue;
            }
            let alpha = if dir > 0 { a.clone() } else { -a };
            let b = self.basis[r];
            let (limit, hit) = if alpha.is_positive() {
                ((&self.x[b] - &self.lo[b]) / &alpha, State::AtLower)
            } else {
                match &self.up[b] {
                    Some(u) => ((u - &self.x[b]) / (-&alpha), State::AtUpper),
                    None => continue,
                }
            };
            let take = match &best_t {
                None => true,
                Some(t) => match limit.cmp(t) {
                    std::cmp::Ordering::Less => true,
                    std::cmp::Ordering::Equal => leave.is_some_and(|(lr, _)| b < self.basis[lr]),
                    std::cmp::Ordering::Greater => false,
                },
            };
            if take {
                best_t = Some(limit);
                leave = Some((r, hit));
            }
        }
        let Some(t) = best_t else {
            return Ok(Step::Unbounded);
        };
        *degenerate = t.is_zero();

        if !t.is_zero() {
            let delta = if dir > 0 { t.clone() } else { -&t };
            self.x[e] += &delta;
            for r in 0..self.rows.len() {
                let a = &self.rows[r][e];
                if !a.is_zero() {
                    let change = a * &delta;
                    let b = self.basis[r];
                    self.x[b] -= &change;
                }
            }
        }

        match leave {
            None => {
                // Bound flip; snap to the exact bound.
                if dir > 0 {
                    self.state[e] = State::AtUpper;
                    self.x[e] = self.up[e].clone().expect("flip requires a finite upper bound");
                } else {
                    self.state[e] = State::AtLower;
                    self.x[e] = self.lo[e].clone();
                }
            }
            Some((r, hit)) => {
                let b = self.basis[r];
                self.x[b] = match hit {
                    State::AtLower => self.lo[b].clone(),
                    _ => self.up[b].clone().expect("upper hit requires a finite bound"),
                };
                self.pivot(r, e);
                self.state[b] = hit;
            }
        }
        Ok(Step::Continue)
    }

    /// Replaces basic artificials with ordinary columns wherever one pivot
    /// does so while keeping every basic value within its bounds. Candidates
    /// are tried cheapest objective first.
    fn crash(&mut self, cost: &[Rational]) {
        let ncols = self.ncols();
        for r in 0..self.rows.len() {
            let art = self.basis[r];
            if !matches!(self.kinds[art], Column::Artificial(_)) {
                continue;
            }
            let mut candidates: Vec<usize> = (0..ncols)
                .filter(|&c| {
                    self.state[c] != State::Basic
                        && !self.barred[c]
                        && !matches!(self.kinds[c], Column::Artificial(_))
                        && !self.rows[r][c].is_zero()
                })
                .collect();
            candidates.sort_by(|&a, &b| cost[a].cmp(&cost[b]).then(a.cmp(&b)));
            for c in candidates {
                let delta = &self.x[art] / &self.rows[r][c];
                let moved = &self.x[c] + &delta;
                let direction_ok = match self.state[c] {
                    State::AtLower => !delta.is_negative(),
                    _ => !delta.is_positive(),
                };
                if !direction_ok || moved < self.lo[c] || self.up[c].as_ref().is_some_and(|u| moved > *u) {
                    continue;
                }
                let within = (0..self.rows.len()).filter(|&i| i != r && !self.rows[i][c].is_zero()).all(|i| {
                    let b = self.basis[i];
                    let v = &self.x[b] - &(&self.rows[i][c] * &delta);
                    v >= self.lo[b] && self.up[b].as_ref().is_none_or(|u| v <= *u)
                });
                if !within {
                    continue;
                }
                for i in 0..self.rows.len() {
                    if i != r && !self.rows[i][c].is_zero() {
                        let b = self.basis[i];
                        let change = &self.rows[i][c] * &delta;
                        self.x[b] -= &change;
                    }
                }
                self.x[c] = moved;
                self.x[art] = Rational::zero();
                self.pivot(r, c);
                self.state[art] = State::AtLower;
                break;
            }
        }
    }

    fn run(&mut self, rule: PivotRule) -> Result<Step, LpError> {
        let mut bland = rule == PivotRule::Bland;
        let mut degenerate_run = 0u32;
        loop {
            let mut degenerate = false;
            match self.step(bland, &mut degenerate)? {
                Step::Continue => {
                    if degenerate {
                        degenerate_run += 1;
                        if degenerate_run >= DEGENERATE_RUN_BEFORE_BLAND {
                            bland = true;
                        }
                    } else {
                        degenerate_run = 0;
                    }
                }
                done => return Ok(done),
            }
        }
    }
}

fn validate(problem: &LpProblem) -> Result<(), LpError> {
    let n = problem.num_vars();
    if problem.upper.len() != n || problem.objective.len() != n {
        return Err(LpError::Malformed(format!(
            "{} lower bounds, {} upper bounds, {} objective entries",
            n,
            problem.upper.len(),
            problem.objective.len()
        )));
    }
    for (v, (l, u)) in problem.lower.iter().zip(&problem.upper).enumerate() {
        if let Some(u) = u {
            if l > u {
                return Err(LpError::Malformed(format!("variable {v} has lower bound {l} > upper bound {u}")));
            }
        }
    }
    for (r, row) in problem.rows.iter().enumerate() {
        if let Some((v, _)) = row.terms.iter().find(|(v, _)| *v >= n) {
            return Err(LpError::Malformed(format!("row {r} references variable {v} of {n}")));
        }
    }
    Ok(())
}

fn infeasible(iterations: u64) -> LpResult {
    LpResult { status: LpStatus::Infeasible, value: None, point: Vec::new(), iterations, basis: None }
}

/// Solves `problem` exactly.
pub fn solve_lp(problem: &LpProblem, options: &LpOptions) -> Result<LpResult, LpError> {
    validate(problem)?;
    let n = problem.num_vars();
    let m = problem.rows.len();

    let mut kinds: Vec<Column> = (0..n).map(Column::Structural).collect();
    let mut lo: Vec<Rational> = problem.lower.clone();
    let mut up: Vec<Option<Rational>> = problem.upper.clone();
    let mut slack_of = vec![None; m];
    for (r, row) in problem.rows.iter().enumerate() {
        if row.relation != Relation::Eq {
            slack_of[r] = Some(kinds.len());
            kinds.push(Column::Slack(r));
            lo.push(Rational::zero());
            up.push(None);
        }
    }

    // Rows whose slack cannot absorb the residual with every structural at
    // its lower bound need an artificial.
    let needs_artificial = |start: &[Rational]| -> Vec<bool> {
        problem
            .rows
            .iter()
            .map(|row| {
                let residual = &row.rhs - &row.activity(start);
                match row.relation {
                    Relation::Le => residual.is_negative(),
                    Relation::Ge => residual.is_positive(),
                    Relation::Eq => true,
                }
            })
            .collect()
    };
    let mut start_point = problem.lower.clone();
    let mut state = vec![State::AtLower; kinds.len()];
    if needs_artificial(&start_point).iter().any(|&b| b) {
        // A column that only loosens inequality rows starts at a finite upper
        // bound, which keeps those rows slack-feasible for the crash below.
        let mut relaxing = vec![true; n];
        let mut appears = vec![false; n];
        for row in &problem.rows {
            for (v, a) in &row.terms {
                if a.is_zero() {
                    continue;
                }
                appears[*v] = true;
                let loosens = match row.relation {
                    Relation::Le => a.is_negative(),
                    Relation::Ge => a.is_positive(),
                    Relation::Eq => false,
                };
                relaxing[*v] &= loosens;
            }
        }
        for v in 0..n {
            if let (true, true, Some(u)) = (relaxing[v], appears[v], &problem.upper[v]) {
                if *u != start_point[v] {
                    start_point[v] = u.clone();
                    state[v] = State::AtUpper;
                }
            }
        }
    }
    let mut x: Vec<Rational> = start_point.clone();
    x.extend(lo[n..].iter().cloned());

    let mut start: Vec<(usize, Rational)> = Vec::with_capacity(m);
    let mut artificial_rows = Vec::new();
    for (r, row) in problem.rows.iter().enumerate() {
        let residual = &row.rhs - &row.activity(&start_point);
        let slack_ok = match row.relation {
            Relation::Le => !residual.is_negative(),
            Relation::Ge => !residual.is_positive(),
            Relation::Eq => false,
        };
        if slack_ok {
            let s = slack_of[r].expect("inequality rows have slacks");
            let sign = if row.relation == Relation::Le { Rational::one() } else { -Rational::one() };
            start.push((s, sign));
        } else {
            let a = kinds.len();
            kinds.push(Column::Artificial(r));
            lo.push(Rational::zero());
            up.push(None);
            x.push(Rational::zero());
            state.push(State::AtLower);
            artificial_rows.push(r);
            let sign = if residual.is_negative() { -Rational::one() } else { Rational::one() };
            start.push((a, sign));
        }
    }

    let ncols = kinds.len();
    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    for (r, row) in problem.rows.iter().enumerate() {
        let (basic, sign) = &start[r];
        let mut dense = vec![Rational::zero(); ncols];
        for (v, a) in &row.terms {
            dense[*v] += a;
        }
        if let Some(s) = slack_of[r] {
            dense[s] = if row.relation == Relation::Le { Rational::one() } else { -Rational::one() };
        }
        if matches!(kinds[*basic], Column::Artificial(_)) {
            dense[*basic] = sign.clone();
        }
        // Scale so the basic column has coefficient one.
        if *sign != Rational::one() {
            for a in dense.iter_mut() {
                if !a.is_zero() {
                    *a = -&*a;
                }
            }
        }
        let residual = &row.rhs - &row.activity(&start_point);
        x[*basic] = sign * &residual;
        state[*basic] = State::Basic;
        basis.push(*basic);
        rows.push(dense);
    }

    let mut tab = Tableau {
        rows,
        basis,
        lo,
        up,
        x,
        state,
        barred: vec![false; ncols],
        reduced: Vec::new(),
        kinds,
        iterations: 0,
        cap: options.iteration_cap,
        scratch: Vec::new(),
    };

    let mut cost = problem.objective.clone();
    cost.resize(ncols, Rational::zero());
    if !artificial_rows.is_empty() {
        tab.reduced = vec![Rational::zero(); ncols];
        tab.crash(&cost);
        let phase_one: Vec<Rational> = tab
            .kinds
            .iter()
            .map(|k| if matches!(k, Column::Artificial(_)) { Rational::one() } else { Rational::zero() })
            .collect();
        tab.compute_reduced(&phase_one);
        if let Step::Unbounded = tab.run(options.pivot_rule)? { unreachable!("phase one objective is bounded below by zero") }
        let infeasibility: Rational = (0..ncols)
            .filter(|&c| matches!(tab.kinds[c], Column::Artificial(_)))
            .map(|c| tab.x[c].clone())
            .sum();
        if infeasibility.is_positive() {
            return Ok(infeasible(tab.iterations));
        }
        // Drive zero-valued artificials out of the basis where possible.
        for r in 0..m {
            if !matches!(tab.kinds[tab.basis[r]], Column::Artificial(_)) {
                continue;
            }
            let replacement = (0..ncols).find(|&c| {
                tab.state[c] != State::Basic
                    && !matches!(tab.kinds[c], Column::Artificial(_))
                    && !tab.rows[r][c].is_zero()
            });
            if let Some(c) = replacement {
                let leaving = tab.basis[r];
                tab.pivot(r, c);
                tab.state[leaving] = State::AtLower;
            }
        }
        for c in 0..ncols {
            if matches!(tab.kinds[c], Column::Artificial(_)) {
                tab.barred[c] = true;
                tab.up[c] = Some(Rational::zero());
            }
        }
    }

    tab.compute_reduced(&cost);
    let outcome = tab.run(options.pivot_rule)?;
    if let Step::Unbounded = outcome {
        return Ok(LpResult {
            status: LpStatus::Unbounded,
            value: None,
            point: Vec::new(),
            iterations: tab.iterations,
            basis: None,
        });
    }

    let point: Vec<Rational> = tab.x[..n].to_vec();
    let value = problem.objective_value(&point);
    let basis = BasisInfo {
        basic: tab.basis.iter().map(|&c| tab.kinds[c]).collect(),
        at_upper: (0..ncols).filter(|&c| tab.state[c] == State::AtUpper).map(|c| tab.kinds[c]).collect(),
    };
    Ok(LpResult { status: LpStatus::Optimal, value: Some(value), point, iterations: tab.iterations, basis: Some(basis) })
}

/// `problem` after exact reductions: fixed columns substituted out, rows
/// with a single remaining term turned into bounds, empty rows checked and
/// dropped. The reduced problem has the same optimal value up to `offset`.
#[derive(Debug, Clone)]
pub struct Reduced {
    pub problem: LpProblem,
    /// Original index of each reduced column.
    pub columns: Vec<usize>,
    /// Value of every original variable removed as fixed.
    pub fixed: Vec<Option<Rational>>,
    /// Objective contribution of the fixed variables.
    pub offset: Rational,
    /// A reduction proved the problem infeasible.
    pub infeasible: bool,
}

impl Reduced {
    /// Maps a reduced point back to the original variables.
    pub fn expand(&self, point: &[Rational]) -> Vec<Rational> {
        let mut full: Vec<Rational> = self.fixed.iter().map(|f| f.clone().unwrap_or_else(Rational::zero)).collect();
        for (c, &v) in self.columns.iter().enumerate() {
            full[v] = point[c].clone();
        }
        full
    }
}

pub fn reduce(problem: &LpProblem) -> Result<Reduced, LpError> {
    validate(problem)?;
    let n = problem.num_vars();
    let mut lo = problem.lower.clone();
    let mut up = problem.upper.clone();
    let mut live = vec![true; problem.rows.len()];
    let is_fixed = |lo: &[Rational], up: &[Option<Rational>], v: usize| up[v].as_ref() == Some(&lo[v]);
    let mut infeasible = false;

    let mut changed = true;
    while changed && !infeasible {
        changed = false;
        for (r, row) in problem.rows.iter().enumerate() {
            if !live[r] {
                continue;
            }
            let mut rhs = row.rhs.clone();
            let mut free: Option<(usize, Rational)> = None;
            let mut count = 0;
            for (v, a) in &row.terms {
                if a.is_zero() {
                    continue;
                }
                if is_fixed(&lo, &up, *v) {
                    rhs -= &(a * &lo[*v]);
                } else {
                    count += 1;
                    free = Some((*v, a.clone()));
                }
            }
            match count {
                0 => {
                    live[r] = false;
                    changed = true;
                    if !row.relation.holds(&Rational::zero(), &rhs) {
                        infeasible = true;
                        break;
                    }
                }
                1 => {
                    let (v, a) = free.expect("one free term");
                    let bound = &rhs / &a;
                    let relation = match (row.relation, a.is_negative()) {
                        (Relation::Le, true) => Relation::Ge,
                        (Relation::Ge, true) => Relation::Le,
                        (rel, _) => rel,
                    };
                    if relation != Relation::Le && bound > lo[v] {
                        lo[v] = bound.clone();
                    }
                    if relation != Relation::Ge && up[v].as_ref().is_none_or(|u| bound < *u) {
                        up[v] = Some(bound);
                    }
                    live[r] = false;
                    changed = true;
                    if up[v].as_ref().is_some_and(|u| *u < lo[v]) {
                        infeasible = true;
                        break;
                    }
                }
                _ => {}
            }
        }
    }

    let mut position = vec![usize::MAX; n];
    let mut columns = Vec::new();
    let mut fixed = vec![None; n];
    let mut offset = Rational::zero();
    for v in 0..n {
        if is_fixed(&lo, &up, v) {
            if !problem.objective[v].is_zero() {
                offset += &(&problem.objective[v] * &lo[v]);
            }
            fixed[v] = Some(lo[v].clone());
        } else {
            position[v] = columns.len();
            columns.push(v);
        }
    }
    let rows = problem
        .rows
        .iter()
        .zip(&live)
        .filter(|(_, &l)| l)
        .map(|(row, _)| {
            let mut rhs = row.rhs.clone();
            let mut terms = Vec::with_capacity(row.terms.len());
            for (v, a) in &row.terms {
                match &fixed[*v] {
                    Some(value) => rhs -= &(a * value),
                    None => terms.push((position[*v], a.clone())),
                }
            }
            LpRow { terms, relation: row.relation, rhs }
        })
        .collect();
    let reduced = LpProblem {
        lower: columns.iter().map(|&v| lo[v].clone()).collect(),
        upper: columns.iter().map(|&v| up[v].clone()).collect(),
        objective: columns.iter().map(|&v| problem.objective[v].clone()).collect(),
        rows,
    };
    Ok(Reduced { problem: reduced, columns, fixed, offset, infeasible })
}

/// [`solve_lp`] on the reduced problem, reported in original coordinates.
/// No basis is returned.
pub fn solve_lp_reduced(problem: &LpProblem, options: &LpOptions) -> Result<LpResult, LpError> {
    let reduced = reduce(problem)?;
    if reduced.infeasible {
        return Ok(infeasible(0));
    }
    let inner = solve_lp(&reduced.problem, options)?;
    Ok(match inner.status {
        LpStatus::Optimal => LpResult {
            status: LpStatus::Optimal,
            value: inner.value.map(|v| v + &reduced.offset),
            point: reduced.expand(&inner.point),
            iterations: inner.iterations,
            basis: None,
        },
        _ => LpResult { basis: None, ..inner },
    })
}
