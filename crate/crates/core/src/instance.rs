//! Problem data for service-to-interface assignment and evaluation of
//! candidate allocations against the cost model and its constraints.
//!
//! Index conventions: `i` is an interface, `j` a service, `k` a resource.
//! All indices are zero-based in the API; error messages and exported
//! names use one-based indices.

use std::fmt;
use std::time::Duration;

use crate::rational::Rational;

/// The three index-set sizes of an instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dims {
    pub interfaces: usize,
    pub services: usize,
    pub resources: usize,
}

impl Dims {
    pub fn new(interfaces: usize, services: usize, resources: usize) -> Self {
        Dims { interfaces, services, resources }
    }

    /// Position of `(i, j, k)` in a row-major I×J×K tensor.
    #[inline]
    pub fn ijk(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.services + j) * self.resources + k
    }

    #[inline]
    pub fn ij(&self, i: usize, j: usize) -> usize {
        i * self.services + j
    }

    #[inline]
    pub fn jk(&self, j: usize, k: usize) -> usize {
        j * self.resources + k
    }

    #[inline]
    pub fn ik(&self, i: usize, k: usize) -> usize {
        i * self.resources + k
    }

    pub fn tensor_len(&self) -> usize {
        self.interfaces * self.services * self.resources
    }
}

impl fmt::Display for Dims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "I={} J={} K={}", self.interfaces, self.services, self.resources)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ValidationError {
    #[error("`{field}` must be positive")]
    EmptyDimension { field: &'static str },
    #[error("`{field}` has shape {found}, expected {expected}")]
    DimensionMismatch { field: &'static str, expected: String, found: String },
    #[error("`{field}` entry at {} is negative", one_based(.index))]
    NegativeValue { field: &'static str, index: Vec<usize> },
}

fn one_based(index: &[usize]) -> String {
    let parts: Vec<String> = index.iter().map(|v| (v + 1).to_string()).collect();
    format!("({})", parts.join(","))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("allocation dimensions {found} do not match instance dimensions {expected}")]
    DimensionMismatch { expected: Dims, found: Dims },
}

/// Unvalidated instance data, shaped as nested rows.
#[derive(Debug, Clone, Default)]
pub struct RawInstance {
    pub num_interfaces: usize,
    pub num_services: usize,
    pub num_resources: usize,
    /// J×K
    pub demand: Vec<Vec<i64>>,
    /// I×K
    pub capacity: Vec<Vec<i64>>,
    /// I×K
    pub unit_cost: Vec<Vec<Rational>>,
    /// I
    pub activation_cost: Vec<Rational>,
    /// I×J×K; `None` means all zero.
    pub overhead: Option<Vec<Vec<Vec<Rational>>>>,
}

/// A validated problem instance. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SiaInstance {
    dims: Dims,
    demand: Vec<u64>,
    capacity: Vec<u64>,
    unit_cost: Vec<Rational>,
    activation_cost: Vec<Rational>,
    overhead: Vec<Rational>,
}

fn check_matrix<T>(
    field: &'static str,
    rows: &[Vec<T>],
    n_rows: usize,
    n_cols: usize,
) -> Result<(), ValidationError> {
    let mismatch = || ValidationError::DimensionMismatch {
        field,
        expected: format!("{n_rows}x{n_cols}"),
        found: match rows.iter().find(|r| r.len() != n_cols) {
            Some(bad) if rows.len() == n_rows => format!("{}x(row of {})", rows.len(), bad.len()),
            _ => format!("{}x{}", rows.len(), rows.first().map_or(0, Vec::len)),
        },
    };
    if rows.len() != n_rows || rows.iter().any(|r| r.len() != n_cols) {
        return Err(mismatch());
    }
    Ok(())
}

fn nonneg_ints(field: &'static str, rows: &[Vec<i64>]) -> Result<Vec<u64>, ValidationError> {
    let mut out = Vec::new();
    for (r, row) in rows.iter().enumerate() {
        for (c, &v) in row.iter().enumerate() {
            if v < 0 {
                return Err(ValidationError::NegativeValue { field, index: vec![r, c] });
            }
            out.push(v as u64);
        }
    }
    Ok(out)
}

fn nonneg_rationals(field: &'static str, rows: &[Vec<Rational>]) -> Result<Vec<Rational>, ValidationError> {
    let mut out = Vec::new();
    for (r, row) in rows.iter().enumerate() {
        for (c, v) in row.iter().enumerate() {
            if v.is_negative() {
                return Err(ValidationError::NegativeValue { field, index: vec![r, c] });
            }
            out.push(v.clone());
        }
    }
    Ok(out)
}

/// Checks shapes and signs and produces a [`SiaInstance`].
pub fn validate(raw: RawInstance) -> Result<SiaInstance, ValidationError> {
    let counts = [
        ("num_interfaces", raw.num_interfaces),
        ("num_services", raw.num_services),
        ("num_resources", raw.num_resources),
    ];
    for (field, n) in counts {
        if n == 0 {
            return Err(ValidationError::EmptyDimension { field });
        }
    }
    let dims = Dims::new(raw.num_interfaces, raw.num_services, raw.num_resources);
    let (ni, nj, nk) = (dims.interfaces, dims.services, dims.resources);

    check_matrix("demand", &raw.demand, nj, nk)?;
    check_matrix("capacity", &raw.capacity, ni, nk)?;
    check_matrix("unit_cost", &raw.unit_cost, ni, nk)?;
    if raw.activation_cost.len() != ni {
        return Err(ValidationError::DimensionMismatch {
            field: "activation_cost",
            expected: ni.to_string(),
            found: raw.activation_cost.len().to_string(),
        });
    }

    let demand = nonneg_ints("demand", &raw.demand)?;
    let capacity = nonneg_ints("capacity", &raw.capacity)?;
    let unit_cost = nonneg_rationals("unit_cost", &raw.unit_cost)?;
    let activation_cost = nonneg_rationals("activation_cost", &[raw.activation_cost])?;

    let overhead = match raw.overhead {
        None => vec![Rational::zero(); dims.tensor_len()],
        Some(tensor) => {
            let bad_shape = tensor.len() != ni
                || tensor.iter().any(|m| m.len() != nj || m.iter().any(|r| r.len() != nk));
            if bad_shape {
                return Err(ValidationError::DimensionMismatch {
                    field: "overhead",
                    expected: format!("{ni}x{nj}x{nk}"),
                    found: format!(
                        "{}x{}x{}",
                        tensor.len(),
                        tensor.first().map_or(0, Vec::len),
                        tensor.first().and_then(|m| m.first()).map_or(0, Vec::len)
                    ),
                });
            }
            let mut flat = Vec::with_capacity(dims.tensor_len());
            for (i, m) in tensor.iter().enumerate() {
                for (j, row) in m.iter().enumerate() {
                    for (k, v) in row.iter().enumerate() {
                        if v.is_negative() {
                            return Err(ValidationError::NegativeValue { field: "overhead", index: vec![i, j, k] });
                        }
                        flat.push(v.clone());
                    }
                }
            }
            flat
        }
    };

    Ok(SiaInstance { dims, demand, capacity, unit_cost, activation_cost, overhead })
}

impl SiaInstance {
    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn demand(&self, j: usize, k: usize) -> u64 {
        self.demand[self.dims.jk(j, k)]
    }

    pub fn capacity(&self, i: usize, k: usize) -> u64 {
        self.capacity[self.dims.ik(i, k)]
    }

    pub fn unit_cost(&self, i: usize, k: usize) -> &Rational {
        &self.unit_cost[self.dims.ik(i, k)]
    }

    pub fn activation_cost(&self, i: usize) -> &Rational {
        &self.activation_cost[i]
    }

    pub fn overhead(&self, i: usize, j: usize, k: usize) -> &Rational {
        &self.overhead[self.dims.ijk(i, j, k)]
    }

    /// `1 + a_ijk`: capacity consumed per allocated unit.
    pub fn consumption(&self, i: usize, j: usize, k: usize) -> Rational {
        Rational::one() + self.overhead(i, j, k)
    }

    pub fn has_overhead(&self) -> bool {
        self.overhead.iter().any(|a| !a.is_zero())
    }

    /// Converts back to the nested-row representation.
    pub fn to_raw(&self) -> RawInstance {
        let d = self.dims;
        RawInstance {
            num_interfaces: d.interfaces,
            num_services: d.services,
            num_resources: d.resources,
            demand: (0..d.services).map(|j| (0..d.resources).map(|k| self.demand(j, k) as i64).collect()).collect(),
            capacity: (0..d.interfaces)
                .map(|i| (0..d.resources).map(|k| self.capacity(i, k) as i64).collect())
                .collect(),
            unit_cost: (0..d.interfaces)
                .map(|i| (0..d.resources).map(|k| self.unit_cost(i, k).clone()).collect())
                .collect(),
            activation_cost: self.activation_cost.clone(),
            overhead: Some(
                (0..d.interfaces)
                    .map(|i| {
                        (0..d.services)
                            .map(|j| (0..d.resources).map(|k| self.overhead(i, j, k).clone()).collect())
                            .collect()
                    })
                    .collect(),
            ),
        }
    }

    /// Returns a copy with every activation cost replaced.
    pub fn with_activation_costs(&self, costs: Vec<Rational>) -> Result<SiaInstance, ValidationError> {
        let mut raw = self.to_raw();
        raw.activation_cost = costs;
        validate(raw)
    }
}

/// Integer resource units per `(interface, service, resource)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Allocation {
    dims: Dims,
    x: Vec<u64>,
}

impl Allocation {
    pub fn zeros(dims: Dims) -> Self {
        Allocation { dims, x: vec![0; dims.tensor_len()] }
    }

    /// Wraps a row-major I×J×K vector.
    pub fn from_flat(dims: Dims, x: Vec<u64>) -> Option<Self> {
        (x.len() == dims.tensor_len()).then_some(Allocation { dims, x })
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> u64 {
        self.x[self.dims.ijk(i, j, k)]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, value: u64) {
        let idx = self.dims.ijk(i, j, k);
        self.x[idx] = value;
    }

    pub fn as_flat(&self) -> &[u64] {
        &self.x
    }

    pub fn is_zero(&self) -> bool {
        self.x.iter().all(|&v| v == 0)
    }
}

/// Binary interface-by-service usage matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Activation {
    interfaces: usize,
    services: usize,
    active: Vec<bool>,
}

impl Activation {
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.active[i * self.services + j]
    }

    /// Number of interfaces used by service `j`.
    pub fn interfaces_used(&self, j: usize) -> usize {
        (0..self.interfaces).filter(|&i| self.get(i, j)).count()
    }

    pub fn count(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }

    pub fn interfaces(&self) -> usize {
        self.interfaces
    }

    pub fn services(&self) -> usize {
        self.services
    }
}

/// `ACT_ij = 1` iff some resource of service `j` is placed on interface `i`.
pub fn activation_of(alloc: &Allocation) -> Activation {
    let d = alloc.dims;
    let mut active = vec![false; d.interfaces * d.services];
    for i in 0..d.interfaces {
        for j in 0..d.services {
            active[d.ij(i, j)] = (0..d.resources).any(|k| alloc.get(i, j, k) > 0);
        }
    }
    Activation { interfaces: d.interfaces, services: d.services, active }
}

fn check_dims(instance: &SiaInstance, alloc: &Allocation) -> Result<(), ModelError> {
    if instance.dims != alloc.dims {
        return Err(ModelError::DimensionMismatch { expected: instance.dims, found: alloc.dims });
    }
    Ok(())
}

/// Utilization cost plus activation cost of an allocation.
pub fn objective(instance: &SiaInstance, alloc: &Allocation) -> Result<Rational, ModelError> {
    check_dims(instance, alloc)?;
    let d = instance.dims;
    let mut total = Rational::zero();
    for i in 0..d.interfaces {
        for k in 0..d.resources {
            let used: u64 = (0..d.services).map(|j| alloc.get(i, j, k)).sum();
            if used > 0 {
                total += instance.unit_cost(i, k) * &Rational::from(used);
            }
        }
    }
    let act = activation_of(alloc);
    for i in 0..d.interfaces {
        let pairs = (0..d.services).filter(|&j| act.get(i, j)).count() as u64;
        if pairs > 0 {
            total += instance.activation_cost(i) * &Rational::from(pairs);
        }
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DemandCheck {
    pub service: usize,
    pub resource: usize,
    pub assigned: u64,
    pub demand: u64,
}

impl DemandCheck {
    pub fn satisfied(&self) -> bool {
        self.assigned == self.demand
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CapacityCheck {
    pub interface: usize,
    pub resource: usize,
    /// Capacity consumed including overheads.
    pub load: Rational,
    pub capacity: u64,
}

impl CapacityCheck {
    pub fn satisfied(&self) -> bool {
        self.load <= Rational::from(self.capacity)
    }
}

/// Per-row outcome of the demand-equality and capacity constraints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintReport {
    pub demand: Vec<DemandCheck>,
    pub capacity: Vec<CapacityCheck>,
}

impl ConstraintReport {
    pub fn demands_met(&self) -> bool {
        self.demand.iter().all(DemandCheck::satisfied)
    }

    pub fn capacities_respected(&self) -> bool {
        self.capacity.iter().all(CapacityCheck::satisfied)
    }

    pub fn all_satisfied(&self) -> bool {
        self.demands_met() && self.capacities_respected()
    }

    pub fn violations(&self) -> impl Iterator<Item = String> + '_ {
        let demand = self.demand.iter().filter(|c| !c.satisfied()).map(|c| {
            format!(
                "demand (service {}, resource {}): assigned {} != {}",
                c.service + 1,
                c.resource + 1,
                c.assigned,
                c.demand
            )
        });
        let capacity = self.capacity.iter().filter(|c| !c.satisfied()).map(|c| {
            format!(
                "capacity (interface {}, resource {}): load {} > {}",
                c.interface + 1,
                c.resource + 1,
                c.load,
                c.capacity
            )
        });
        demand.chain(capacity)
    }
}

/// Evaluates every demand and capacity row exactly.
pub fn check_constraints(instance: &SiaInstance, alloc: &Allocation) -> Result<ConstraintReport, ModelError> {
    check_dims(instance, alloc)?;
    let d = instance.dims;
    let mut demand = Vec::with_capacity(d.services * d.resources);
    for j in 0..d.services {
        for k in 0..d.resources {
            let assigned = (0..d.interfaces).map(|i| alloc.get(i, j, k)).sum();
            demand.push(DemandCheck { service: j, resource: k, assigned, demand: instance.demand(j, k) });
        }
    }
    let mut capacity = Vec::with_capacity(d.interfaces * d.resources);
    for i in 0..d.interfaces {
        for k in 0..d.resources {
            let load = (0..d.services)
                .filter(|&j| alloc.get(i, j, k) > 0)
                .map(|j| instance.consumption(i, j, k) * Rational::from(alloc.get(i, j, k)))
                .sum();
            capacity.push(CapacityCheck { interface: i, resource: k, load, capacity: instance.capacity(i, k) });
        }
    }
    Ok(ConstraintReport { demand, capacity })
}

/// Per resource, whether total demand fits in total raw capacity. Overheads
/// are ignored, so this is necessary but not sufficient when any `a_ijk > 0`.
pub fn aggregate_feasibility_by_resource(instance: &SiaInstance) -> Vec<bool> {
    let d = instance.dims;
    (0..d.resources)
        .map(|k| {
            let need: u64 = (0..d.services).map(|j| instance.demand(j, k)).sum();
            let have: u64 = (0..d.interfaces).map(|i| instance.capacity(i, k)).sum();
            need <= have
        })
        .collect()
}

pub fn aggregate_feasibility(instance: &SiaInstance) -> bool {
    aggregate_feasibility_by_resource(instance).into_iter().all(|ok| ok)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    NodeLimit,
    TimeLimit,
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::NodeLimit => "node-limit",
            SolveStatus::TimeLimit => "time-limit",
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub nodes: u64,
    pub lp_iterations: u64,
    pub wall_time: Duration,
    /// LP relaxation value at the root node.
    pub root_bound: Option<Rational>,
    /// Best proven lower bound on the optimum.
    pub best_bound: Option<Rational>,
}

/// An allocation with its derived activation matrix and exact cost.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    allocation: Allocation,
    activation: Activation,
    objective: Rational,
    status: SolveStatus,
    stats: SolveStats,
}

impl Solution {
    /// Derives activation and objective from `allocation`.
    pub fn new(
        instance: &SiaInstance,
        allocation: Allocation,
        status: SolveStatus,
        stats: SolveStats,
    ) -> Result<Self, ModelError> {
        let objective = objective(instance, &allocation)?;
        let activation = activation_of(&allocation);
        Ok(Solution { allocation, activation, objective, status, stats })
    }

    pub fn allocation(&self) -> &Allocation {
        &self.allocation
    }

    pub fn activation(&self) -> &Activation {
        &self.activation
    }

    pub fn objective(&self) -> &Rational {
        &self.objective
    }

    pub fn status(&self) -> SolveStatus {
        self.status
    }

    pub fn stats(&self) -> &SolveStats {
        &self.stats
    }
}

/// Sum over services of (interfaces used - 1); unused services count zero.
pub fn split_count_of(act: &Activation) -> u64 {
    (0..act.services()).map(|j| act.interfaces_used(j).saturating_sub(1) as u64).sum()
}

pub fn split_count(solution: &Solution) -> u64 {
    split_count_of(solution.activation())
}
