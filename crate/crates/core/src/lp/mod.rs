//! Exact linear programming over the rationals.
//!
//! Programs are stated with rational data and solved by a fraction-free
//! simplex (see [`tableau`]) after scaling every row to integers. Programs
//! in covering form (all inequalities, non-negative minimisation costs) are
//! solved through their dual, whose origin is feasible and whose tableau has
//! one row per variable instead of one per constraint. Every returned
//! assignment is re-checked against the original rational constraints.

mod pool;
mod scalar;
mod tableau;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::Rational;
use pool::{PackingColumn, PackingOutcome, PackingProblem};
pub use scalar::PivotInt;
use tableau::{EngineOutcome, IntProblem, IntRow};

pub type VarId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Constraint {
    pub coeffs: Vec<(VarId, Rational)>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Constraint {
    pub fn lhs(&self, x: &[Rational]) -> Rational {
        self.coeffs.iter().fold(Rational::zero(), |acc, (j, a)| acc + a * &x[*j])
    }

    /// Amount by which `x` violates the constraint; zero when satisfied.
    pub fn violation(&self, x: &[Rational]) -> Rational {
        let lhs = self.lhs(x);
        let gap = match self.relation {
            Relation::Ge => &self.rhs - lhs,
            Relation::Le => lhs - &self.rhs,
            Relation::Eq => (lhs - &self.rhs).abs(),
        };
        if gap.is_positive() {
            gap
        } else {
            Rational::zero()
        }
    }

    pub fn is_satisfied(&self, x: &[Rational]) -> bool {
        self.violation(x).is_zero()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LpError {
    #[error("linear program has no variables")]
    NoVariables,
    #[error("constraint refers to unknown variable {0}")]
    UnknownVariable(VarId),
    #[error("internal error: solver assignment violates constraint {0}")]
    VerificationFailed(usize),
}

/// `minimize objective . x` subject to linear constraints.
///
/// Variables are non-negative unless declared free.
#[derive(Debug, Clone, Default)]
pub struct LinearProgram {
    names: Vec<String>,
    free: Vec<bool>,
    constraints: Vec<Constraint>,
    objective: Vec<(VarId, Rational)>,
}

impl LinearProgram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(&mut self, name: impl Into<String>) -> VarId {
        self.names.push(name.into());
        self.free.push(false);
        self.names.len() - 1
    }

    pub fn add_free_var(&mut self, name: impl Into<String>) -> VarId {
        let v = self.add_var(name);
        self.free[v] = true;
        v
    }

    pub fn add_constraint(&mut self, coeffs: Vec<(VarId, Rational)>, relation: Relation, rhs: Rational) {
        self.constraints.push(Constraint { coeffs, relation, rhs });
    }

    pub fn push_constraint(&mut self, c: Constraint) {
        self.constraints.push(c);
    }

    pub fn minimize(&mut self, objective: Vec<(VarId, Rational)>) {
        self.objective = objective;
    }

    pub fn var_count(&self) -> usize {
        self.names.len()
    }

    pub fn var_name(&self, v: VarId) -> &str {
        &self.names[v]
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn objective(&self) -> &[(VarId, Rational)] {
        &self.objective
    }

    pub fn objective_value(&self, x: &[Rational]) -> Rational {
        self.objective.iter().fold(Rational::zero(), |acc, (j, c)| acc + c * &x[*j])
    }

    fn validate(&self) -> Result<(), LpError> {
        if self.names.is_empty() {
            return Err(LpError::NoVariables);
        }
        let n = self.names.len();
        let bad =
            self.constraints.iter().flat_map(|c| c.coeffs.iter()).chain(self.objective.iter()).find(|(j, _)| *j >= n);
        match bad {
            Some((j, _)) => Err(LpError::UnknownVariable(*j)),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Optimum {
    pub value: Rational,
    pub assignment: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal(Optimum),
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn optimum(self) -> Option<Optimum> {
        match self {
            LpOutcome::Optimal(o) => Some(o),
            _ => None,
        }
    }
}

/// Solves `lp` exactly.
pub fn solve_min(lp: &LinearProgram) -> Result<LpOutcome, LpError> {
    lp.validate()?;
    let outcome = solve_unchecked(lp, &|_| true, usize::MAX);
    verify(lp, outcome)
}

/// Solves `lp` by constraint generation.
///
/// For a program in covering form only the constraints flagged in
/// `initially_active` enter the simplex tableau at first; any other
/// constraint joins it, at most `batch` at a time, once it would improve
/// the current basis. Other programs are solved in full. Either way the
/// result is an exact optimum of the whole program, re-verified against
/// every constraint.
pub fn solve_min_lazy(
    lp: &LinearProgram,
    initially_active: impl Fn(usize) -> bool,
    batch: usize,
) -> Result<LpOutcome, LpError> {
    lp.validate()?;
    let outcome = solve_unchecked(lp, &initially_active, batch.max(1));
    verify(lp, outcome)
}

fn verify(lp: &LinearProgram, outcome: LpOutcome) -> Result<LpOutcome, LpError> {
    if let LpOutcome::Optimal(opt) = &outcome {
        if let Some(i) = lp.constraints.iter().position(|c| !c.is_satisfied(&opt.assignment)) {
            return Err(LpError::VerificationFailed(i));
        }
        if opt.assignment.iter().zip(&lp.free).any(|(x, &free)| !free && x.is_negative()) {
            return Err(LpError::VerificationFailed(usize::MAX));
        }
    }
    Ok(outcome)
}

/// Least common multiple of the denominators in a row.
fn row_scale<'a>(values: impl Iterator<Item = &'a Rational>) -> BigInt {
    values.fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

fn scaled(v: &Rational, scale: &BigInt) -> BigInt {
    (v * Rational::from_integer(scale.clone())).to_integer()
}

fn solve_unchecked(lp: &LinearProgram, initially_active: &dyn Fn(usize) -> bool, batch: usize) -> LpOutcome {
    let n = lp.var_count();

    // Variables pinned to zero by a single-variable constraint are removed.
    let mut fixed_zero = vec![false; n];
    for c in &lp.constraints {
        if let [(j, a)] = c.coeffs.as_slice() {
            let pins = c.rhs.is_zero()
                && !lp.free[*j]
                && match c.relation {
                    Relation::Eq => !a.is_zero(),
                    Relation::Le => a.is_positive(),
                    Relation::Ge => a.is_negative(),
                };
            fixed_zero[*j] |= pins;
        }
    }

    // Column layout: each kept variable gets one column, free ones two.
    let mut column = vec![None; n];
    let mut negative_column = vec![None; n];
    let mut ncols = 0;
    for j in 0..n {
        if fixed_zero[j] {
            continue;
        }
        column[j] = Some(ncols);
        ncols += 1;
        if lp.free[j] {
            negative_column[j] = Some(ncols);
            ncols += 1;
        }
    }

    let mut rows: Vec<IntRow> = Vec::with_capacity(lp.constraints.len());
    let mut active = Vec::with_capacity(lp.constraints.len());
    for (i, c) in lp.constraints.iter().enumerate() {
        let terms: Vec<&(VarId, Rational)> = c.coeffs.iter().filter(|(j, a)| !fixed_zero[*j] && !a.is_zero()).collect();
        if terms.is_empty() {
            let ok = match c.relation {
                Relation::Le => !c.rhs.is_negative(),
                Relation::Ge => !c.rhs.is_positive(),
                Relation::Eq => c.rhs.is_zero(),
            };
            if !ok {
                return LpOutcome::Infeasible;
            }
            continue;
        }
        let scale = row_scale(terms.iter().map(|(_, a)| a).chain(std::iter::once(&c.rhs)));
        let mut coeffs = Vec::with_capacity(terms.len() * 2);
        for (j, a) in terms {
            let a = scaled(a, &scale);
            if let Some(neg) = negative_column[*j] {
                coeffs.push((neg, -a.clone()));
            }
            coeffs.push((column[*j].expect("kept variable"), a));
        }
        coeffs.sort_by_key(|(j, _)| *j);
        rows.push(IntRow { coeffs, relation: c.relation, rhs: scaled(&c.rhs, &scale) });
        active.push(initially_active(i));
    }

    let obj_scale = row_scale(lp.objective.iter().map(|(_, c)| c));
    let mut cost = vec![BigInt::zero(); ncols];
    for (j, c) in &lp.objective {
        if let Some(col) = column[*j] {
            let c = scaled(c, &obj_scale);
            if let Some(neg) = negative_column[*j] {
                cost[neg] -= &c;
            }
            cost[col] += c;
        }
    }

    let covering = rows.iter().all(|r| r.relation != Relation::Eq) && cost.iter().all(|c| !c.is_negative());
    let columns = if covering {
        match solve_covering_dual(ncols, &rows, &cost, &active, batch) {
            Some(x) => x,
            None => return LpOutcome::Infeasible,
        }
    } else {
        let problem = IntProblem {
            ncols,
            rows,
            objective: cost.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(j, c)| (j, -c)).collect(),
        };
        match tableau::solve(&problem) {
            EngineOutcome::Optimal { primal } => primal,
            EngineOutcome::Infeasible => return LpOutcome::Infeasible,
            EngineOutcome::Unbounded => return LpOutcome::Unbounded,
        }
    };

    let assignment: Vec<Rational> = (0..n)
        .map(|j| match (column[j], negative_column[j]) {
            (None, _) => Rational::zero(),
            (Some(c), None) => columns[c].clone(),
            (Some(c), Some(neg)) => &columns[c] - &columns[neg],
        })
        .collect();
    let value = lp.objective_value(&assignment);
    LpOutcome::Optimal(Optimum { value, assignment })
}

/// `min cost . x, A x >= b (or <= b), x >= 0` with `cost >= 0`, solved via
/// `max b . y, A^T y <= cost, y >= 0`. The primal optimum is read off the
/// dual row multipliers. `None` means the dual is unbounded, i.e. the
/// primal is infeasible.
fn solve_covering_dual(
    ncols: usize,
    rows: &[IntRow],
    cost: &[BigInt],
    active: &[bool],
    batch: usize,
) -> Option<Vec<Rational>> {
    let columns = rows
        .iter()
        .map(|row| {
            let sign = BigInt::from(if row.relation == Relation::Le { -1 } else { 1 });
            PackingColumn { entries: row.coeffs.iter().map(|(j, a)| (*j, a * &sign)).collect(), cost: &row.rhs * &sign }
        })
        .collect();
    let problem = PackingProblem { rhs: cost.to_vec(), columns };
    debug_assert_eq!(problem.rhs.len(), ncols);
    match pool::solve_packing(&problem, active, batch) {
        PackingOutcome::Optimal { row_duals, .. } => Some(row_duals),
        PackingOutcome::Unbounded => None,
    }
}
