//! Partition Problem instances as assignment instances.
//!
//! Each element becomes a single-resource service with that demand; two
//! interfaces each hold half the total, utilization and overhead are free,
//! and every activation costs one. An unsplit assignment then costs exactly
//! the number of services `J`, and any split pushes the cost to at least
//! `J + 1`, so a partition exists iff the optimum equals `J`.

use crate::bnb::{solve, BnbConfig, SolveError};
use crate::instance::{validate, RawInstance, SiaInstance, Solution, SolveStatus};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReductionError {
    #[error("partition instances need at least one element")]
    EmptySet,
    #[error("element {index} is zero; elements must be positive")]
    ZeroElement { index: usize },
    #[error("total {0} is odd, so the two halves cannot be integral")]
    OddSum(u64),
    #[error("solver stopped at {0} before proving optimality; the answer is unknown")]
    SolverLimitHit(SolveStatus),
    #[error(transparent)]
    Solve(SolveError),
}

/// A multiset of positive integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionInstance {
    elements: Vec<u64>,
    total: u64,
}

impl PartitionInstance {
    pub fn new(elements: Vec<u64>) -> Result<Self, ReductionError> {
        if elements.is_empty() {
            return Err(ReductionError::EmptySet);
        }
        if let Some(index) = elements.iter().position(|&e| e == 0) {
            return Err(ReductionError::ZeroElement { index });
        }
        let total = elements.iter().sum();
        Ok(PartitionInstance { elements, total })
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn total(&self) -> u64 {
        self.total
    }
}

/// Builds the two-interface instance with capacities `S/2`.
pub fn pp_to_sia(pp: &PartitionInstance) -> Result<SiaInstance, ReductionError> {
    if pp.total % 2 == 1 {
        return Err(ReductionError::OddSum(pp.total));
    }
    let half = (pp.total / 2) as i64;
    let services = pp.elements.len();
    let raw = RawInstance {
        num_interfaces: 2,
        num_services: services,
        num_resources: 1,
        demand: pp.elements.iter().map(|&e| vec![e as i64]).collect(),
        capacity: vec![vec![half], vec![half]],
        unit_cost: vec![vec![Rational::zero()], vec![Rational::zero()]],
        activation_cost: vec![Rational::one(), Rational::one()],
        overhead: None,
    };
    Ok(validate(raw).expect("constructed instance is well formed"))
}

/// The constructed instance together with its proven optimum.
#[derive(Debug, Clone)]
pub struct ReductionOutcome {
    pub instance: SiaInstance,
    pub solution: Solution,
    pub partition_exists: bool,
}

/// Solves the constructed instance to proven optimality.
pub fn solve_reduction(pp: &PartitionInstance, config: &BnbConfig) -> Result<ReductionOutcome, ReductionError> {
    let instance = pp_to_sia(pp)?;
    let solution = solve(&instance, config).map_err(|e| match e {
        SolveError::NoIncumbent { status, .. } => ReductionError::SolverLimitHit(status),
        other => ReductionError::Solve(other),
    })?;
    if solution.status() != SolveStatus::Optimal {
        return Err(ReductionError::SolverLimitHit(solution.status()));
    }
    let services = Rational::from(pp.elements.len() as u64);
    let partition_exists = *solution.objective() == services;
    Ok(ReductionOutcome { instance, solution, partition_exists })
}

/// Whether `pp` splits into two halves of equal sum, decided through the
/// assignment solver. Odd totals answer `false` without solving.
pub fn decide_partition(pp: &PartitionInstance, config: &BnbConfig) -> Result<bool, ReductionError> {
    if pp.total % 2 == 1 {
        return Ok(false);
    }
    Ok(solve_reduction(pp, config)?.partition_exists)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{split_count, Dims};

    fn pp(v: &[u64]) -> PartitionInstance {
        PartitionInstance::new(v.to_vec()).unwrap()
    }

    /// Independent subset-sum check over all 2^n subsets.
    fn has_equal_split(v: &[u64]) -> bool {
        let total: u64 = v.iter().sum();
        total.is_multiple_of(2)
            && (0u32..1 << v.len()).any(|mask| {
                v.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e).sum::<u64>() * 2 == total
            })
    }

    #[test]
    fn construction_for_123() {
        let inst = pp_to_sia(&pp(&[1, 2, 3])).unwrap();
        assert_eq!(inst.dims(), Dims::new(2, 3, 1));
        assert_eq!((0..3).map(|j| inst.demand(j, 0)).collect::<Vec<_>>(), vec![1, 2, 3]);
        assert_eq!((inst.capacity(0, 0), inst.capacity(1, 0)), (3, 3));
        for i in 0..2 {
            assert_eq!(inst.activation_cost(i), &Rational::one());
            assert!(inst.unit_cost(i, 0).is_zero());
        }
        assert!(!inst.has_overhead());
    }

    #[test]
    fn construction_edge_cases() {
        let inst = pp_to_sia(&pp(&[1, 1])).unwrap();
        assert_eq!(inst.dims().services, 2);
        assert_eq!((inst.capacity(0, 0), inst.capacity(1, 0)), (1, 1));
        assert_eq!(pp_to_sia(&pp(&[1, 1, 1])).unwrap_err(), ReductionError::OddSum(3));
        assert_eq!(PartitionInstance::new(vec![]).unwrap_err(), ReductionError::EmptySet);
        assert_eq!(PartitionInstance::new(vec![2, 0]).unwrap_err(), ReductionError::ZeroElement { index: 1 });
    }

    #[test]
    fn decisions() {
        let cfg = BnbConfig::default();
        let out = solve_reduction(&pp(&[1, 2, 3]), &cfg).unwrap();
        assert!(out.partition_exists);
        assert_eq!(out.solution.objective(), &Rational::from_int(3));
        assert_eq!(split_count(&out.solution), 0);

        let out = solve_reduction(&pp(&[3, 1]), &cfg).unwrap();
        assert!(!out.partition_exists);
        assert_eq!(out.solution.objective(), &Rational::from_int(3));

        assert!(decide_partition(&pp(&[2, 2, 2, 2]), &cfg).unwrap());
        assert!(!decide_partition(&pp(&[1, 1, 1]), &cfg).unwrap());
    }

    #[test]
    fn agrees_with_subset_sum_and_balances_load() {
        let cfg = BnbConfig::default();
        let mut seed = 0x2545F4914F6CDD1Du64;
        for _ in 0..120 {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            let len = 1 + (seed % 6) as usize;
            let v: Vec<u64> = (0..len).map(|i| 1 + (seed >> (8 * i + 3)) % 10).collect();
            let p = pp(&v);
            assert_eq!(decide_partition(&p, &cfg).unwrap(), has_equal_split(&v), "{v:?}");
            if p.total().is_multiple_of(2) {
                let out = solve_reduction(&p, &cfg).unwrap();
                let j = Rational::from(v.len() as u64);
                let obj = out.solution.objective().clone();
                assert!(obj == j || obj >= &j + &Rational::one());
                for i in 0..2 {
                    let load: u64 = (0..v.len()).map(|s| out.solution.allocation().get(i, s, 0)).sum();
                    assert_eq!(load, p.total() / 2);
                }
            }
        }
    }
}
