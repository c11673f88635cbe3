//! Exhaustive solver for tiny instances.
//!
//! Enumerates, for every `(service, resource)` pair, each way of splitting
//! the demand over the interfaces with every part bounded by [`big_m`], and
//! abandons a partial assignment as soon as any interface runs out of
//! capacity. The search runs in scaled integer arithmetic: capacity rows of
//! interface `i`, resource `k` are multiplied by the lcm of the denominators of
//! `1 + a_ijk`, and costs by the lcm of all cost denominators, so every
//! comparison is exact.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::instance::{check_constraints, objective, Allocation, SiaInstance};
use crate::milp::big_m;
use crate::rational::Rational;

pub const DEFAULT_SEARCH_CAP: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("search space of {size} allocations exceeds the cap of {cap}")]
    SearchSpaceTooLarge { size: u128, cap: u128 },
    #[error("instance is infeasible: no integer allocation meets every demand within capacity")]
    InfeasibleInstance,
    #[error("instance values are too large for exhaustive search")]
    Overflow,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub objective: Rational,
    /// First minimizer in the enumeration order: lexicographic over the
    /// amounts listed by service, then resource, then interface.
    pub allocation: Allocation,
    /// Complete allocations evaluated.
    pub leaves: u64,
}

/// Number of demand-meeting allocations with `x_ijk <= M_ijk`, saturating.
pub fn search_space_size(instance: &SiaInstance) -> u128 {
    let d = instance.dims();
    let mut total: u128 = 1;
    for j in 0..d.services {
        for k in 0..d.resources {
            let demand = instance.demand(j, k) as usize;
            let mut ways = vec![0u128; demand + 1];
            ways[0] = 1;
            for i in 0..d.interfaces {
                let m = big_m(instance, i, j, k) as usize;
                let mut next = vec![0u128; demand + 1];
                for (s, &w) in ways.iter().enumerate() {
                    if w == 0 {
                        continue;
                    }
                    for x in 0..=m.min(demand - s) {
                        next[s + x] = next[s + x].saturating_add(w);
                    }
                }
                ways = next;
            }
            total = total.saturating_mul(ways[demand]);
        }
    }
    total
}

fn to_i128(v: &BigInt) -> Result<i128, OracleError> {
    v.to_i128().ok_or(OracleError::Overflow)
}

struct Search<'a> {
    instance: &'a SiaInstance,
    pairs: Vec<(usize, usize)>,
    limit: Vec<u64>,
    /// Remaining room for `(j, k)` on interfaces `i..`, indexed like `limit`.
    tail_room: Vec<u64>,
    weight: Vec<i128>,
    room: Vec<i128>,
    unit_cost: Vec<i128>,
    fixed_cost: Vec<i128>,
    x: Vec<u64>,
    positive: Vec<u32>,
    running: i128,
    best: Option<(i128, Vec<u64>)>,
    leaves: u64,
}

impl Search<'_> {
    fn rec(&mut self, p: usize, i: usize, remaining: u64) {
        let d = self.instance.dims();
        if p == self.pairs.len() {
            self.leaves += 1;
            if self.best.as_ref().is_none_or(|(b, _)| self.running < *b) {
                self.best = Some((self.running, self.x.clone()));
            }
            return;
        }
        let (j, k) = self.pairs[p];
        let cell = d.ijk(i, j, k);
        let hi = self.limit[cell].min(remaining);
        let lo = if i + 1 == d.interfaces {
            remaining
        } else {
            remaining.saturating_sub(self.tail_room[d.ijk(i + 1, j, k)])
        };
        if lo > hi {
            return;
        }
        let ik = d.ik(i, k);
        let ij = d.ij(i, j);
        for v in lo..=hi {
            let load = self.weight[cell] * v as i128;
            if load > self.room[ik] {
                break;
            }
            self.room[ik] -= load;
            self.x[cell] = v;
            let util = self.unit_cost[ik] * v as i128;
            self.running += util;
            let activated = v > 0 && self.positive[ij] == 0;
            if v > 0 {
                self.positive[ij] += 1;
            }
            if activated {
                self.running += self.fixed_cost[i];
            }

            if i + 1 == d.interfaces {
                let next = self.pairs.get(p + 1).map_or(0, |&(nj, nk)| self.instance.demand(nj, nk));
                self.rec(p + 1, 0, next);
            } else {
                self.rec(p, i + 1, remaining - v);
            }

            if activated {
                self.running -= self.fixed_cost[i];
            }
            if v > 0 {
                self.positive[ij] -= 1;
            }
            self.running -= util;
            self.x[cell] = 0;
            self.room[ik] += load;
        }
    }
}

/// Exact optimum by exhaustive enumeration, refusing search spaces above `cap`.
pub fn brute_force_solve(instance: &SiaInstance, cap: u128) -> Result<OracleResult, OracleError> {
    let size = search_space_size(instance);
    if size > cap {
        return Err(OracleError::SearchSpaceTooLarge { size, cap });
    }
    let d = instance.dims();

    let mut weight = vec![0i128; d.tensor_len()];
    let mut room = vec![0i128; d.interfaces * d.resources];
    for i in 0..d.interfaces {
        for k in 0..d.resources {
            let scale = (0..d.services).fold(BigInt::from(1), |acc, j| acc.lcm(&instance.consumption(i, j, k).denom()));
            for j in 0..d.services {
                let w = instance.consumption(i, j, k) * Rational::from_bigint(scale.clone());
                weight[d.ijk(i, j, k)] = to_i128(&w.numer())?;
            }
            room[d.ik(i, k)] = to_i128(&(BigInt::from(instance.capacity(i, k)) * &scale))?;
        }
    }

    let mut cost_scale = BigInt::from(1);
    for i in 0..d.interfaces {
        cost_scale = cost_scale.lcm(&instance.activation_cost(i).denom());
        for k in 0..d.resources {
            cost_scale = cost_scale.lcm(&instance.unit_cost(i, k).denom());
        }
    }
    let scaled = |q: &Rational| to_i128(&(q * &Rational::from_bigint(cost_scale.clone())).numer());
    let mut unit_cost = vec![0i128; d.interfaces * d.resources];
    let mut fixed_cost = vec![0i128; d.interfaces];
    for i in 0..d.interfaces {
        fixed_cost[i] = scaled(instance.activation_cost(i))?;
        for k in 0..d.resources {
            unit_cost[d.ik(i, k)] = scaled(instance.unit_cost(i, k))?;
        }
    }

    let mut limit = vec![0u64; d.tensor_len()];
    let mut tail_room = vec![0u64; d.tensor_len()];
    for j in 0..d.services {
        for k in 0..d.resources {
            let mut acc = 0u64;
            for i in (0..d.interfaces).rev() {
                let m = big_m(instance, i, j, k);
                limit[d.ijk(i, j, k)] = m;
                acc += m;
                tail_room[d.ijk(i, j, k)] = acc;
            }
        }
    }

    let pairs: Vec<(usize, usize)> = (0..d.services).flat_map(|j| (0..d.resources).map(move |k| (j, k))).collect();
    let first = instance.demand(pairs[0].0, pairs[0].1);
    let mut search = Search {
        instance,
        pairs,
        limit,
        tail_room,
        weight,
        room,
        unit_cost,
        fixed_cost,
        x: vec![0; d.tensor_len()],
        positive: vec![0; d.interfaces * d.services],
        running: 0,
        best: None,
        leaves: 0,
    };
    search.rec(0, 0, first);

    let (_, best) = search.best.ok_or(OracleError::InfeasibleInstance)?;
    let allocation = Allocation::from_flat(d, best).expect("search uses instance dimensions");
    debug_assert!(check_constraints(instance, &allocation).map(|r| r.all_satisfied()).unwrap_or(false));
    let value = objective(instance, &allocation).expect("dimensions match");
    Ok(OracleResult { objective: value, allocation, leaves: search.leaves })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::tests::{e1, ints};
    use crate::instance::{validate, RawInstance};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn e1_is_27() {
        let res = brute_force_solve(&e1(), DEFAULT_SEARCH_CAP).unwrap();
        assert_eq!(res.objective, Rational::from_int(27));
        assert_eq!(res.allocation.as_flat(), &[3, 2]);
        // x1 ranges over 1..=3 once x2 = 5 - x1 <= 4 is enforced.
        assert_eq!(res.leaves, 3);
    }

    #[test]
    fn single_cell_instance() {
        let inst = validate(RawInstance {
            num_interfaces: 1,
            num_services: 1,
            num_resources: 1,
            demand: vec![vec![1]],
            capacity: vec![vec![1]],
            unit_cost: vec![ints(&[2])],
            activation_cost: ints(&[5]),
            overhead: None,
        })
        .unwrap();
        let res = brute_force_solve(&inst, DEFAULT_SEARCH_CAP).unwrap();
        assert_eq!(res.objective, Rational::from_int(7));
        assert_eq!(res.allocation.as_flat(), &[1]);
    }

    #[test]
    fn over_capacity_is_infeasible() {
        let mut raw = e1().to_raw();
        raw.demand = vec![vec![8]];
        assert_eq!(brute_force_solve(&validate(raw).unwrap(), DEFAULT_SEARCH_CAP), Err(OracleError::InfeasibleInstance));
    }

    #[test]
    fn search_guard() {
        let mut raw = e1().to_raw();
        raw.num_interfaces = 3;
        raw.capacity = vec![vec![100]; 3];
        raw.unit_cost = vec![ints(&[1]); 3];
        raw.activation_cost = ints(&[1, 1, 1]);
        raw.overhead = None;
        raw.demand = vec![vec![100]];
        let inst = validate(raw).unwrap();
        // Compositions of 100 into 3 parts: C(102, 2).
        assert_eq!(search_space_size(&inst), 5151);
        assert!(matches!(brute_force_solve(&inst, 5000), Err(OracleError::SearchSpaceTooLarge { size: 5151, .. })));
    }

    /// Plain product-space enumeration with no pruning and rational
    /// arithmetic, for cross-checking the pruned search.
    fn naive(instance: &SiaInstance) -> Option<Rational> {
        let d = instance.dims();
        let len = d.tensor_len();
        let bound: Vec<u64> = (0..len)
            .map(|c| {
                let (i, rest) = (c / (d.services * d.resources), c % (d.services * d.resources));
                instance.demand(rest / d.resources, rest % d.resources).min(instance.capacity(i, rest % d.resources))
            })
            .collect();
        let mut x = vec![0u64; len];
        let mut best: Option<Rational> = None;
        loop {
            let alloc = Allocation::from_flat(d, x.clone()).unwrap();
            if check_constraints(instance, &alloc).unwrap().all_satisfied() {
                let v = objective(instance, &alloc).unwrap();
                if best.as_ref().is_none_or(|b| v < *b) {
                    best = Some(v);
                }
            }
            let mut c = 0;
            loop {
                if c == len {
                    return best;
                }
                if x[c] < bound[c] {
                    x[c] += 1;
                    break;
                }
                x[c] = 0;
                c += 1;
            }
        }
    }

    #[test]
    fn matches_naive_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..150 {
            let (ni, nj, nk) = (rng.gen_range(1..3), rng.gen_range(1..3), rng.gen_range(1..3));
            let inst = validate(RawInstance {
                num_interfaces: ni,
                num_services: nj,
                num_resources: nk,
                demand: (0..nj).map(|_| (0..nk).map(|_| rng.gen_range(0..4)).collect()).collect(),
                capacity: (0..ni).map(|_| (0..nk).map(|_| rng.gen_range(0..5)).collect()).collect(),
                unit_cost: (0..ni).map(|_| (0..nk).map(|_| Rational::new(rng.gen_range(0..4), rng.gen_range(1..4))).collect()).collect(),
                activation_cost: (0..ni).map(|_| Rational::new(rng.gen_range(0..5), rng.gen_range(1..3))).collect(),
                overhead: Some(
                    (0..ni)
                        .map(|_| (0..nj).map(|_| (0..nk).map(|_| Rational::new(rng.gen_range(0..3), 4)).collect()).collect())
                        .collect(),
                ),
            })
            .unwrap();
            let fast = brute_force_solve(&inst, DEFAULT_SEARCH_CAP);
            match naive(&inst) {
                Some(v) => {
                    let fast = fast.unwrap();
                    assert_eq!(fast.objective, v);
                    assert!(check_constraints(&inst, &fast.allocation).unwrap().all_satisfied());
                }
                None => assert_eq!(fast, Err(OracleError::InfeasibleInstance)),
            }
        }
    }
}
