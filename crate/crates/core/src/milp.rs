//! Linearized mixed-integer model of an instance.
//!
//! The activation indicator is replaced by linking rows
//! `x_ijk - M_ijk * act_ij <= 0` with a per-variable `M_ijk` as tight as the
//! data allows. Variables are laid out as all `x_ijk` in `(i, j, k)` order,
//! followed by all `act_ij` in `(i, j)` order.

use crate::instance::{Allocation, Dims, SiaInstance};
use crate::lp::{LpProblem, LpRow};
use crate::rational::Rational;

pub use crate::lp::Relation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarKind {
    Integer,
    Binary,
    Continuous,
}

impl VarKind {
    pub fn is_integral(&self) -> bool {
        !matches!(self, VarKind::Continuous)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub lower: Rational,
    /// `None` is `+inf`.
    pub upper: Option<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub name: String,
    pub terms: Vec<(usize, Rational)>,
    pub relation: Relation,
    pub rhs: Rational,
}

/// Maps `(i, j, k)` and `(i, j)` to variable positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VarIndex {
    pub dims: Dims,
}

impl VarIndex {
    pub fn x(&self, i: usize, j: usize, k: usize) -> usize {
        self.dims.ijk(i, j, k)
    }

    pub fn act(&self, i: usize, j: usize) -> usize {
        self.dims.tensor_len() + self.dims.ij(i, j)
    }

    pub fn num_x(&self) -> usize {
        self.dims.tensor_len()
    }

    pub fn num_act(&self) -> usize {
        self.dims.interfaces * self.dims.services
    }
}

/// A minimization MILP with exact coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MilpModel {
    pub name: String,
    pub variables: Vec<Variable>,
    pub constraints: Vec<Constraint>,
    /// Sparse minimization objective.
    pub objective: Vec<(usize, Rational)>,
    /// Present for models built from an instance.
    pub index: Option<VarIndex>,
}

impl MilpModel {
    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn objective_value(&self, point: &[Rational]) -> Rational {
        self.objective.iter().map(|(v, c)| c * &point[*v]).sum()
    }

    /// Exact bound, row, and integrality check.
    pub fn is_feasible(&self, point: &[Rational]) -> bool {
        point.len() == self.num_vars()
            && self.variables.iter().zip(point).all(|(var, x)| {
                x >= &var.lower
                    && var.upper.as_ref().is_none_or(|u| x <= u)
                    && (!var.kind.is_integral() || x.is_integer())
            })
            && self.constraints.iter().all(|c| {
                let lhs: Rational = c.terms.iter().map(|(v, a)| a * &point[*v]).sum();
                c.relation.holds(&lhs, &c.rhs)
            })
    }

    /// Continuous relaxation with the model's own bounds.
    pub fn relaxation(&self) -> LpProblem {
        let mut objective = vec![Rational::zero(); self.num_vars()];
        for (v, c) in &self.objective {
            objective[*v] += c;
        }
        LpProblem {
            lower: self.variables.iter().map(|v| v.lower.clone()).collect(),
            upper: self.variables.iter().map(|v| v.upper.clone()).collect(),
            objective,
            rows: self
                .constraints
                .iter()
                .map(|c| LpRow { terms: c.terms.clone(), relation: c.relation, rhs: c.rhs.clone() })
                .collect(),
        }
    }

    /// Reads the `x` block of an integral point as an allocation.
    pub fn allocation_from_point(&self, point: &[Rational]) -> Option<Allocation> {
        let index = self.index?;
        let x = (0..index.num_x())
            .map(|v| point[v].to_i64().and_then(|n| u64::try_from(n).ok()))
            .collect::<Option<Vec<u64>>>()?;
        Allocation::from_flat(index.dims, x)
    }

    /// The model point for an allocation, with `act` set to its indicator.
    pub fn point_from_allocation(&self, alloc: &Allocation) -> Option<Vec<Rational>> {
        let index = self.index?;
        let d = index.dims;
        if alloc.dims() != d {
            return None;
        }
        let mut point = vec![Rational::zero(); self.num_vars()];
        for i in 0..d.interfaces {
            for j in 0..d.services {
                let mut any = false;
                for k in 0..d.resources {
                    let v = alloc.get(i, j, k);
                    point[index.x(i, j, k)] = Rational::from(v);
                    any |= v > 0;
                }
                if any {
                    point[index.act(i, j)] = Rational::one();
                }
            }
        }
        Some(point)
    }
}

/// Largest value `x_ijk` can take in any feasible point:
/// `min(d_jk, floor(b_ik / (1 + a_ijk)))`.
pub fn big_m(instance: &SiaInstance, i: usize, j: usize, k: usize) -> u64 {
    let demand = instance.demand(j, k);
    let by_capacity = (Rational::from(instance.capacity(i, k)) / instance.consumption(i, j, k)).floor();
    let by_capacity = by_capacity.to_i64().expect("floor of a bounded nonnegative value") as u64;
    demand.min(by_capacity)
}

pub fn build_milp(instance: &SiaInstance) -> MilpModel {
    build_named_milp(instance, "sia")
}

pub fn build_named_milp(instance: &SiaInstance, name: &str) -> MilpModel {
    let d = instance.dims();
    let index = VarIndex { dims: d };
    let mut variables = Vec::with_capacity(index.num_x() + index.num_act());
    let mut big = vec![0u64; d.tensor_len()];

    for i in 0..d.interfaces {
        for j in 0..d.services {
            for k in 0..d.resources {
                let m = big_m(instance, i, j, k);
                big[d.ijk(i, j, k)] = m;
                variables.push(Variable {
                    name: format!("x_{}_{}_{}", i + 1, j + 1, k + 1),
                    kind: VarKind::Integer,
                    lower: Rational::zero(),
                    upper: Some(Rational::from(m)),
                });
            }
        }
    }
    for i in 0..d.interfaces {
        for j in 0..d.services {
            variables.push(Variable {
                name: format!("act_{}_{}", i + 1, j + 1),
                kind: VarKind::Binary,
                lower: Rational::zero(),
                upper: Some(Rational::one()),
            });
        }
    }

    let mut objective = Vec::new();
    for i in 0..d.interfaces {
        for j in 0..d.services {
            for k in 0..d.resources {
                let c = instance.unit_cost(i, k);
                if !c.is_zero() {
                    objective.push((index.x(i, j, k), c.clone()));
                }
            }
        }
    }
    for i in 0..d.interfaces {
        let f = instance.activation_cost(i);
        if !f.is_zero() {
            for j in 0..d.services {
                objective.push((index.act(i, j), f.clone()));
            }
        }
    }

    let mut constraints = Vec::with_capacity(d.services * d.resources + d.interfaces * d.resources + d.tensor_len());
    for j in 0..d.services {
        for k in 0..d.resources {
            constraints.push(Constraint {
                name: format!("demand_{}_{}", j + 1, k + 1),
                terms: (0..d.interfaces).map(|i| (index.x(i, j, k), Rational::one())).collect(),
                relation: Relation::Eq,
                rhs: Rational::from(instance.demand(j, k)),
            });
        }
    }
    for i in 0..d.interfaces {
        for k in 0..d.resources {
            constraints.push(Constraint {
                name: format!("capacity_{}_{}", i + 1, k + 1),
                terms: (0..d.services).map(|j| (index.x(i, j, k), instance.consumption(i, j, k))).collect(),
                relation: Relation::Le,
                rhs: Rational::from(instance.capacity(i, k)),
            });
        }
    }
    for i in 0..d.interfaces {
        for j in 0..d.services {
            for k in 0..d.resources {
                let m = big[d.ijk(i, j, k)];
                let mut terms = vec![(index.x(i, j, k), Rational::one())];
                if m > 0 {
                    terms.push((index.act(i, j), -Rational::from(m)));
                }
                constraints.push(Constraint {
                    name: format!("link_{}_{}_{}", i + 1, j + 1, k + 1),
                    terms,
                    relation: Relation::Le,
                    rhs: Rational::zero(),
                });
            }
        }
    }

    MilpModel { name: name.to_string(), variables, constraints, objective, index: Some(index) }
}
