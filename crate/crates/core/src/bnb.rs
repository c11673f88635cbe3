//! Exact branch-and-bound over [`MilpModel`]s.
//!
//! Each node solves the LP relaxation under its accumulated bound
//! tightenings from scratch. Nodes are pruned by exact comparison against the
//! incumbent. When every objective term sits on an integer variable, attained
//! objective values are multiples of the gcd `g` of the coefficients, and a
//! node whose bound exceeds `incumbent - g` cannot improve on the incumbent.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use crate::instance::{
    check_constraints, Allocation, SiaInstance, Solution, SolveStats, SolveStatus,
};
use crate::lp::{solve_lp, solve_lp_reduced, LpError, LpOptions, LpProblem, LpResult, LpStatus, PivotRule};
use crate::milp::{build_milp, MilpModel, VarKind};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum BranchRule {
    /// Most fractional binary (activation) variable, then integer ones.
    #[default]
    ActFirstMostFractional,
    /// Most fractional integer (amount) variable, then binary ones.
    XMostFractional,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum SearchOrder {
    #[default]
    BestBound,
    DepthFirst,
}

impl FromStr for BranchRule {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "act-first" | "act-first-most-fractional" => Ok(BranchRule::ActFirstMostFractional),
            "x-most-fractional" | "x-first" => Ok(BranchRule::XMostFractional),
            other => Err(format!("unknown branching rule `{other}`")),
        }
    }
}

impl FromStr for SearchOrder {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "best-bound" => Ok(SearchOrder::BestBound),
            "depth-first" => Ok(SearchOrder::DepthFirst),
            other => Err(format!("unknown search order `{other}`")),
        }
    }
}

impl fmt::Display for BranchRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BranchRule::ActFirstMostFractional => "act-first-most-fractional",
            BranchRule::XMostFractional => "x-most-fractional",
        })
    }
}

impl fmt::Display for SearchOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SearchOrder::BestBound => "best-bound",
            SearchOrder::DepthFirst => "depth-first",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BnbConfig {
    pub node_limit: u64,
    pub time_limit: Duration,
    pub branch_rule: BranchRule,
    pub search_order: SearchOrder,
    pub pivot_rule: PivotRule,
    /// Disabling pruning explores the full tree; used to audit pruning.
    pub prune: bool,
}

impl Default for BnbConfig {
    fn default() -> Self {
        BnbConfig {
            node_limit: 1_000_000,
            time_limit: Duration::from_secs(60),
            branch_rule: BranchRule::default(),
            search_order: SearchOrder::default(),
            pivot_rule: PivotRule::default(),
            prune: true,
        }
    }
}

impl BnbConfig {
    pub fn validate(&self) -> Result<(), BnbError> {
        if self.node_limit == 0 {
            return Err(BnbError::InvalidConfig("node limit must be positive".into()));
        }
        if self.time_limit.is_zero() {
            return Err(BnbError::InvalidConfig("time limit must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BnbError {
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("LP relaxation is unbounded")]
    UnboundedRelaxation,
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SolveError {
    #[error("instance is infeasible: no integer allocation meets every demand within capacity")]
    InfeasibleInstance,
    #[error("{status} reached before any feasible allocation was found")]
    NoIncumbent { status: SolveStatus, best_bound: Option<Rational> },
    #[error(transparent)]
    Bnb(#[from] BnbError),
}

/// One bound tightening relative to the root: `(variable, lower, upper)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tightening {
    pub var: usize,
    pub lower: Option<Rational>,
    pub upper: Option<Rational>,
}

#[derive(Debug, Clone)]
pub struct BnbNode {
    pub tightenings: Vec<Tightening>,
    pub parent_bound: Rational,
    pub depth: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MilpOutcome {
    pub status: SolveStatus,
    pub point: Option<Vec<Rational>>,
    pub objective: Option<Rational>,
    pub stats: SolveStats,
    /// Nodes whose LP value came out below their parent's bound. Always zero
    /// for a correct LP engine.
    pub bound_regressions: u64,
}

/// Rounding heuristic hook: maps a fractional LP point to a feasible model
/// point, or nothing.
pub type Heuristic<'a> = dyn Fn(&[Rational]) -> Option<Vec<Rational>> + 'a;

fn objective_granularity(model: &MilpModel) -> Option<Rational> {
    let mut g: Option<Rational> = None;
    for (v, c) in &model.objective {
        if c.is_zero() {
            continue;
        }
        if !model.variables[*v].kind.is_integral() {
            return None;
        }
        g = Some(match g {
            None => c.abs(),
            Some(prev) => prev.gcd(c),
        });
    }
    g
}

fn node_problem(root: &LpProblem, tightenings: &[Tightening]) -> Option<LpProblem> {
    let mut p = root.clone();
    for t in tightenings {
        if let Some(l) = &t.lower {
            if *l > p.lower[t.var] {
                p.lower[t.var] = l.clone();
            }
        }
        if let Some(u) = &t.upper {
            if p.upper[t.var].as_ref().is_none_or(|cur| u < cur) {
                p.upper[t.var] = Some(u.clone());
            }
        }
        if let Some(u) = &p.upper[t.var] {
            if p.lower[t.var] > *u {
                return None;
            }
        }
    }
    Some(p)
}

fn fractional_distance(v: &Rational) -> Rational {
    let f = v.fract_floor();
    let g = Rational::one() - &f;
    f.min(g)
}

fn pick_branch_var(model: &MilpModel, point: &[Rational], rule: BranchRule) -> Option<usize> {
    let most_fractional = |want: VarKind| -> Option<usize> {
        let mut best: Option<(usize, Rational)> = None;
        for (v, var) in model.variables.iter().enumerate() {
            if var.kind != want || point[v].is_integer() {
                continue;
            }
            let dist = fractional_distance(&point[v]);
            if best.as_ref().is_none_or(|(_, b)| dist > *b) {
                best = Some((v, dist));
            }
        }
        best.map(|(v, _)| v)
    };
    let (first, second) = match rule {
        BranchRule::ActFirstMostFractional => (VarKind::Binary, VarKind::Integer),
        BranchRule::XMostFractional => (VarKind::Integer, VarKind::Binary),
    };
    most_fractional(first).or_else(|| most_fractional(second))
}

#[derive(PartialEq, Eq, PartialOrd, Ord)]
struct QueueKey {
    bound: Rational,
    depth: Reverse<u32>,
    seq: u64,
}

enum Frontier {
    Best(BinaryHeap<Reverse<(QueueKey, usize)>>, Vec<Option<BnbNode>>),
    Stack(Vec<BnbNode>),
}

impl Frontier {
    fn new(order: SearchOrder) -> Self {
        match order {
            SearchOrder::BestBound => Frontier::Best(BinaryHeap::new(), Vec::new()),
            SearchOrder::DepthFirst => Frontier::Stack(Vec::new()),
        }
    }

    fn push(&mut self, node: BnbNode, seq: u64) {
        match self {
            Frontier::Best(heap, store) => {
                let key = QueueKey { bound: node.parent_bound.clone(), depth: Reverse(node.depth), seq };
                store.push(Some(node));
                heap.push(Reverse((key, store.len() - 1)));
            }
            Frontier::Stack(stack) => stack.push(node),
        }
    }

    fn pop(&mut self) -> Option<BnbNode> {
        match self {
            Frontier::Best(heap, store) => heap.pop().and_then(|Reverse((_, slot))| store[slot].take()),
            Frontier::Stack(stack) => stack.pop(),
        }
    }

    fn min_bound(&self) -> Option<Rational> {
        match self {
            Frontier::Best(heap, _) => heap.peek().map(|Reverse((k, _))| k.bound.clone()),
            Frontier::Stack(stack) => stack.iter().map(|n| n.parent_bound.clone()).min(),
        }
    }
}

/// Solves a MILP to proven optimality or until a limit is reached.
pub fn solve_model(
    model: &MilpModel,
    config: &BnbConfig,
    heuristic: Option<&Heuristic<'_>>,
) -> Result<MilpOutcome, BnbError> {
    config.validate()?;
    let started = Instant::now();
    let root = model.relaxation();
    let lp_options = LpOptions { pivot_rule: config.pivot_rule, ..LpOptions::default() };
    let granularity = objective_granularity(model);

    let mut stats = SolveStats::default();
    let mut incumbent: Option<(Vec<Rational>, Rational)> = None;
    let mut frontier = Frontier::new(config.search_order);
    let mut seq = 0u64;
    let mut bound_regressions = 0u64;
    let mut limit_hit: Option<SolveStatus> = None;

    let cannot_improve = |bound: &Rational, incumbent: &Option<(Vec<Rational>, Rational)>| -> bool {
        if !config.prune {
            return false;
        }
        match incumbent {
            None => false,
            Some((_, best)) => match &granularity {
                Some(g) => *bound > best - g,
                None => bound >= best,
            },
        }
    };

    let offer = |point: Vec<Rational>, incumbent: &mut Option<(Vec<Rational>, Rational)>| {
        debug_assert!(model.is_feasible(&point));
        let value = model.objective_value(&point);
        if incumbent.as_ref().is_none_or(|(_, best)| value < *best) {
            *incumbent = Some((point, value));
        }
    };

    frontier.push(BnbNode { tightenings: Vec::new(), parent_bound: Rational::zero(), depth: 0 }, seq);
    let mut is_root = true;

    while let Some(node) = frontier.pop() {
        if !is_root && cannot_improve(&node.parent_bound, &incumbent) {
            continue;
        }
        if stats.nodes >= config.node_limit {
            frontier.push(node, seq);
            limit_hit = Some(SolveStatus::NodeLimit);
            break;
        }
        if started.elapsed() >= config.time_limit {
            frontier.push(node, seq);
            limit_hit = Some(SolveStatus::TimeLimit);
            break;
        }
        stats.nodes += 1;

        let Some(problem) = node_problem(&root, &node.tightenings) else { continue };
        let LpResult { status, value, point, iterations, .. } = solve_lp_reduced(&problem, &lp_options)?;
        stats.lp_iterations += iterations;
        match status {
            LpStatus::Infeasible => {
                is_root = false;
                continue;
            }
            LpStatus::Unbounded => return Err(BnbError::UnboundedRelaxation),
            LpStatus::Optimal => {}
        }
        let bound = value.expect("optimal LP has a value");
        if is_root {
            stats.root_bound = Some(bound.clone());
        } else if bound < node.parent_bound {
            bound_regressions += 1;
        }
        is_root = false;

        if cannot_improve(&bound, &incumbent) {
            continue;
        }

        let Some(var) = pick_branch_var(model, &point, config.branch_rule) else {
            offer(point, &mut incumbent);
            continue;
        };

        if let Some(h) = heuristic {
            if let Some(candidate) = h(&point) {
                if model.is_feasible(&candidate) {
                    offer(candidate, &mut incumbent);
                }
            }
            if cannot_improve(&bound, &incumbent) {
                continue;
            }
        }

        let value = &point[var];
        let down = Tightening { var, lower: None, upper: Some(value.floor()) };
        let up = Tightening { var, lower: Some(value.ceil()), upper: None };
        let prefer_up = value.fract_floor() >= Rational::new(1, 2);
        let (first, second) = if prefer_up { (up, down) } else { (down, up) };
        // The stack pops last-in first, so push the preferred child last there.
        let ordered = match config.search_order {
            SearchOrder::BestBound => [first, second],
            SearchOrder::DepthFirst => [second, first],
        };
        for t in ordered {
            let mut tightenings = node.tightenings.clone();
            tightenings.push(t);
            seq += 1;
            frontier.push(BnbNode { tightenings, parent_bound: bound.clone(), depth: node.depth + 1 }, seq);
        }
    }

    stats.wall_time = started.elapsed();
    let status = match (limit_hit, &incumbent) {
        (Some(s), _) => s,
        (None, Some(_)) => SolveStatus::Optimal,
        (None, None) => SolveStatus::Infeasible,
    };
    stats.best_bound = match status {
        SolveStatus::Optimal => incumbent.as_ref().map(|(_, v)| v.clone()),
        SolveStatus::Infeasible => None,
        _ => {
            let open = frontier.min_bound();
            match (open, incumbent.as_ref().map(|(_, v)| v.clone())) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (a, b) => a.or(b),
            }
        }
    };
    let (point, objective) = match incumbent {
        Some((p, v)) => (Some(p), Some(v)),
        None => (None, None),
    };
    Ok(MilpOutcome { status, point, objective, stats, bound_regressions })
}

/// A verified feasible allocation and its cost.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Incumbent {
    pub allocation: Allocation,
    pub objective: Rational,
}

/// Turns a fractional relaxation point into a feasible integer allocation.
///
/// Keeps the integer part of every amount, then places each leftover unit on
/// the cheapest interface with room, preferring interfaces the relaxation
/// already uses for that service. The result is checked against every
/// constraint before it is returned.
pub fn round_incumbent(point: &[Rational], instance: &SiaInstance) -> Option<Incumbent> {
    let model_dims = instance.dims();
    let index = crate::milp::VarIndex { dims: model_dims };
    if point.len() < index.num_x() {
        return None;
    }
    let d = model_dims;
    let mut alloc = Allocation::zeros(d);
    let mut room: Vec<Rational> =
        (0..d.interfaces * d.resources).map(|ik| Rational::from(instance.capacity(ik / d.resources, ik % d.resources))).collect();

    for i in 0..d.interfaces {
        for j in 0..d.services {
            for k in 0..d.resources {
                let v = &point[index.x(i, j, k)];
                if v.is_negative() {
                    return None;
                }
                let units = v.floor().to_i64()? as u64;
                let units = units.min(instance.demand(j, k));
                alloc.set(i, j, k, units);
                room[d.ik(i, k)] -= &(instance.consumption(i, j, k) * Rational::from(units));
            }
        }
    }

    for j in 0..d.services {
        for k in 0..d.resources {
            let placed: u64 = (0..d.interfaces).map(|i| alloc.get(i, j, k)).sum();
            if placed > instance.demand(j, k) {
                return None;
            }
            let mut left = instance.demand(j, k) - placed;
            if left == 0 {
                continue;
            }
            let used = |i: usize| (0..d.resources).any(|kk| point[index.x(i, j, kk)].is_positive());
            let mut order: Vec<usize> = (0..d.interfaces).collect();
            order.sort_by(|&a, &b| {
                used(b).cmp(&used(a)).then_with(|| instance.unit_cost(a, k).cmp(instance.unit_cost(b, k))).then(a.cmp(&b))
            });
            for i in order {
                if left == 0 {
                    break;
                }
                let per_unit = instance.consumption(i, j, k);
                let fits = (&room[d.ik(i, k)] / &per_unit).floor();
                let fits = fits.to_i64().map_or(0, |f| f.max(0) as u64);
                let take = fits.min(left);
                if take > 0 {
                    alloc.set(i, j, k, alloc.get(i, j, k) + take);
                    room[d.ik(i, k)] -= &(per_unit * Rational::from(take));
                    left -= take;
                }
            }
            if left > 0 {
                return None;
            }
        }
    }

    if !check_constraints(instance, &alloc).ok()?.all_satisfied() {
        return None;
    }
    let objective = crate::instance::objective(instance, &alloc).ok()?;
    Some(Incumbent { allocation: alloc, objective })
}

/// LP relaxation of the instance model at the root, without branching.
pub fn root_relaxation(instance: &SiaInstance, config: &BnbConfig) -> Result<LpResult, BnbError> {
    let model = build_milp(instance);
    let lp_options = LpOptions { pivot_rule: config.pivot_rule, ..LpOptions::default() };
    Ok(solve_lp(&model.relaxation(), &lp_options)?)
}

/// Proven-optimal integer allocation for `instance`, or the best one found
/// before a limit.
pub fn solve(instance: &SiaInstance, config: &BnbConfig) -> Result<Solution, SolveError> {
    let model = build_milp(instance);
    assert!(
        model.variables.iter().all(|v| v.upper.is_some()),
        "instance models bound every variable"
    );
    let heuristic = |point: &[Rational]| -> Option<Vec<Rational>> {
        let found = round_incumbent(point, instance)?;
        model.point_from_allocation(&found.allocation)
    };
    let outcome = solve_model(&model, config, Some(&heuristic))?;
    match (outcome.status, outcome.point) {
        (SolveStatus::Infeasible, _) => Err(SolveError::InfeasibleInstance),
        (status, None) => Err(SolveError::NoIncumbent { status, best_bound: outcome.stats.best_bound }),
        (status, Some(point)) => {
            let alloc = model.allocation_from_point(&point).expect("integral incumbent");
            let solution = Solution::new(instance, alloc, status, outcome.stats)
                .expect("allocation shaped by the model");
            let milp_value = outcome.objective.expect("incumbent has a value");
            // Dropping idle activations can only lower the cost; at a proven
            // optimum it cannot.
            debug_assert!(*solution.objective() <= milp_value);
            debug_assert!(status != SolveStatus::Optimal || *solution.objective() == milp_value);
            Ok(solution)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::tests::{e1, ints};
    use crate::instance::{split_count, validate, RawInstance};

    fn one_service(d: i64, b: [i64; 2], c: [i64; 2], f: [i64; 2]) -> SiaInstance {
        validate(RawInstance {
            num_interfaces: 2,
            num_services: 1,
            num_resources: 1,
            demand: vec![vec![d]],
            capacity: vec![vec![b[0]], vec![b[1]]],
            unit_cost: vec![ints(&[c[0]]), ints(&[c[1]])],
            activation_cost: ints(&f),
            overhead: None,
        })
        .unwrap()
    }

    #[test]
    fn e1_optimum() {
        let sol = solve(&e1(), &BnbConfig::default()).unwrap();
        assert_eq!(sol.status(), SolveStatus::Optimal);
        assert_eq!(sol.objective(), &Rational::from_int(27));
        assert_eq!(sol.allocation().as_flat(), &[3, 2]);
        assert_eq!(split_count(&sol), 1);
    }

    #[test]
    fn unsplit_service_when_one_interface_suffices() {
        let sol = solve(&one_service(2, [2, 2], [1, 1], [3, 3]), &BnbConfig::default()).unwrap();
        assert_eq!(sol.objective(), &Rational::from_int(5));
        assert_eq!(split_count(&sol), 0);
    }

    #[test]
    fn infeasible_instance() {
        let err = solve(&one_service(9, [2, 2], [1, 1], [1, 1]), &BnbConfig::default()).unwrap_err();
        assert_eq!(err, SolveError::InfeasibleInstance);
    }

    #[test]
    fn all_orders_and_rules_agree() {
        let inst = e1();
        for rule in [BranchRule::ActFirstMostFractional, BranchRule::XMostFractional] {
            for order in [SearchOrder::BestBound, SearchOrder::DepthFirst] {
                for pivot in [PivotRule::Bland, PivotRule::Dantzig] {
                    let cfg = BnbConfig { branch_rule: rule, search_order: order, pivot_rule: pivot, ..Default::default() };
                    assert_eq!(solve(&inst, &cfg).unwrap().objective(), &Rational::from_int(27));
                }
            }
        }
    }

    #[test]
    fn invalid_limits_rejected() {
        let cfg = BnbConfig { node_limit: 0, ..Default::default() };
        assert!(matches!(solve(&e1(), &cfg), Err(SolveError::Bnb(BnbError::InvalidConfig(_)))));
        let cfg = BnbConfig { time_limit: Duration::ZERO, ..Default::default() };
        assert!(matches!(solve(&e1(), &cfg), Err(SolveError::Bnb(BnbError::InvalidConfig(_)))));
    }

    #[test]
    fn node_limit_reports_status() {
        // Partition-style instance whose root relaxation is fractional.
        let inst = crate::reduction::pp_to_sia(&crate::reduction::PartitionInstance::new(vec![3, 5, 7, 9, 2]).unwrap())
            .unwrap();
        let cfg = BnbConfig { node_limit: 1, ..Default::default() };
        match solve(&inst, &cfg) {
            Ok(sol) => assert_eq!(sol.status(), SolveStatus::NodeLimit),
            Err(SolveError::NoIncumbent { status, .. }) => assert_eq!(status, SolveStatus::NodeLimit),
            Err(e) => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn round_incumbent_contract() {
        let inst = e1();
        let integral = vec![Rational::from_int(3), Rational::from_int(2), Rational::one(), Rational::one()];
        let inc = round_incumbent(&integral, &inst).unwrap();
        assert_eq!(inc.allocation.as_flat(), &[3, 2]);

        let fractional = vec![Rational::new(5, 2), Rational::new(5, 2), Rational::new(5, 6), Rational::new(5, 8)];
        if let Some(inc) = round_incumbent(&fractional, &inst) {
            assert!(check_constraints(&inst, &inc.allocation).unwrap().all_satisfied());
            assert!(inc.objective >= Rational::from_int(27));
        }

        let hopeless = one_service(9, [2, 2], [1, 1], [1, 1]);
        let point = vec![Rational::from_int(2), Rational::from_int(2), Rational::one(), Rational::one()];
        assert!(round_incumbent(&point, &hopeless).is_none());
    }

    #[test]
    fn limits_and_bounds_are_consistent() {
        let inst = e1();
        let sol = solve(&inst, &BnbConfig::default()).unwrap();
        let stats = sol.stats();
        assert!(stats.root_bound.as_ref().unwrap() <= sol.objective());
        assert_eq!(stats.best_bound.as_ref(), Some(sol.objective()));
    }

    #[test]
    fn deterministic_node_counts() {
        let inst = crate::reduction::pp_to_sia(&crate::reduction::PartitionInstance::new(vec![3, 5, 7, 9, 2, 4]).unwrap())
            .unwrap();
        let a = solve(&inst, &BnbConfig::default()).unwrap();
        let b = solve(&inst, &BnbConfig::default()).unwrap();
        assert_eq!(a.stats().nodes, b.stats().nodes);
        assert_eq!(a.stats().lp_iterations, b.stats().lp_iterations);
        assert_eq!(a.objective(), b.objective());
    }
}
