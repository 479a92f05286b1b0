//! Entropy-method lower bound on the information complexity of a graph.
//!
//! A secret sharing scheme on `G` induces the normalised entropy function
//! `f(A) = H(shares of A) / H(secret)`. Every such `f` satisfies the Shannon
//! inequalities plus two strict variants coming from recoverability and
//! privacy, so minimising `max_v f({v})` over all `f` obeying them gives a
//! lower bound on the load of any scheme.
//!
//! Generated families, over subsets encoded as bitmasks:
//!
//! * `f(∅) = 0`
//! * `f(A ∪ x) >= f(A)` (elemental monotonicity)
//! * `f(A ∪ x) + f(A ∪ y) >= f(A ∪ xy) + f(A)` (elemental submodularity)
//! * `f(B ∪ x) >= f(B) + 1` for independent `B` with `B ∪ x` qualified
//! * `f(A) + f(B) >= f(A ∪ B) + f(A ∩ B) + 1` for qualified `A`, `B` with
//!   unqualified intersection
//! * `t >= f({v})`, minimising `t`

use std::collections::HashSet;
use std::fmt::{self, Write as _};

use num_bigint::BigInt;
use thiserror::Error;

use crate::graph::{Graph, GraphError};
use crate::lp::{solve_min_lazy, LinearProgram, LpError, LpOutcome, Relation};
use crate::Rational;

/// Largest participant count the entropy LP is generated for.
pub const ENTROPY_CAP: usize = 12;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EntropyError {
    #[error("entropy LP needs at most {cap} vertices, graph has {n}")]
    TooLarge { n: usize, cap: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("entropy LP reported {0}")]
    Anomaly(&'static str),
}

/// Constraint family tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    EmptySet,
    Monotonicity,
    Submodularity,
    StrictMonotonicity,
    StrictSubmodularity,
    Objective,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EntropyVar {
    /// `f(A)` for the subset with this bitmask.
    Subset(u32),
    /// The bound variable `t`.
    Bound,
}

impl fmt::Display for EntropyVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EntropyVar::Subset(m) => write!(f, "f[{m}]"),
            EntropyVar::Bound => f.write_str("t"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EntropyConstraint {
    pub family: Family,
    /// Sorted by variable, no zero coefficients.
    pub terms: Vec<(EntropyVar, i64)>,
    pub relation: Relation,
    pub rhs: i64,
}

impl fmt::Display for EntropyConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (v, a)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{a}*{v}")?;
        }
        write!(f, " {} {}", self.relation, self.rhs)
    }
}

/// The full constraint system for one graph.
#[derive(Debug, Clone)]
pub struct EntropyLp {
    pub n: usize,
    pub constraints: Vec<EntropyConstraint>,
}

impl EntropyLp {
    /// `2^n` subset variables plus the bound.
    pub fn variable_count(&self) -> usize {
        (1 << self.n) + 1
    }

    pub fn var_index(&self, v: EntropyVar) -> usize {
        match v {
            EntropyVar::Subset(m) => m as usize,
            EntropyVar::Bound => 1 << self.n,
        }
    }

    pub fn count(&self, family: Family) -> usize {
        self.constraints.iter().filter(|c| c.family == family).count()
    }

    /// Copy without one constraint family.
    pub fn without(&self, family: Family) -> EntropyLp {
        EntropyLp { n: self.n, constraints: self.constraints.iter().filter(|c| c.family != family).cloned().collect() }
    }

    pub fn to_linear_program(&self) -> LinearProgram {
        let mut lp = LinearProgram::new();
        for m in 0..(1u32 << self.n) {
            lp.add_var(format!("f[{m}]"));
        }
        let t = lp.add_var("t");
        for c in &self.constraints {
            let coeffs =
                c.terms.iter().map(|&(v, a)| (self.var_index(v), Rational::from_integer(BigInt::from(a)))).collect();
            lp.add_constraint(coeffs, c.relation, Rational::from_integer(BigInt::from(c.rhs)));
        }
        lp.minimize(vec![(t, Rational::from_integer(BigInt::from(1)))]);
        lp
    }

    /// One constraint per line followed by `min t`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for c in &self.constraints {
            let _ = writeln!(out, "{c}");
        }
        out.push_str("min t\n");
        out
    }
}

fn check_size(g: &Graph) -> Result<usize, EntropyError> {
    let n = g.vertex_count();
    if n > ENTROPY_CAP {
        return Err(EntropyError::TooLarge { n, cap: ENTROPY_CAP });
    }
    Ok(n)
}

/// Qualified sets are exactly those containing both ends of some edge.
pub fn is_qualified(g: &Graph, set: &[usize]) -> Result<bool, EntropyError> {
    let mut member = vec![false; g.vertex_count()];
    for &v in set {
        if v >= g.vertex_count() {
            return Err(GraphError::VertexOutOfRange(v).into());
        }
        member[v] = true;
    }
    Ok(g.edges().iter().any(|&(u, v)| member[u] && member[v]))
}

/// Table of qualification for every subset bitmask.
fn qualified_table(g: &Graph) -> Vec<bool> {
    let n = g.vertex_count();
    let edge_masks: Vec<u32> = g.edges().iter().map(|&(u, v)| (1 << u) | (1 << v)).collect();
    (0..1u32 << n).map(|m| edge_masks.iter().any(|&e| e & !m == 0)).collect()
}

/// Sorted terms, relation and right-hand side of a scaled constraint.
type NormalForm = (Vec<(EntropyVar, i64)>, Relation, i64);

struct Builder {
    seen: HashSet<NormalForm>,
    out: Vec<EntropyConstraint>,
}

impl Builder {
    fn push(&mut self, family: Family, raw: &[(EntropyVar, i64)], relation: Relation, rhs: i64) {
        let mut terms: Vec<(EntropyVar, i64)> = Vec::with_capacity(raw.len());
        let mut sorted = raw.to_vec();
        sorted.sort_by_key(|&(v, _)| v);
        for (v, a) in sorted {
            match terms.last_mut() {
                Some((last, acc)) if *last == v => *acc += a,
                _ => terms.push((v, a)),
            }
        }
        terms.retain(|&(_, a)| a != 0);
        if self.seen.insert((terms.clone(), relation, rhs)) {
            self.out.push(EntropyConstraint { family, terms, relation, rhs });
        }
    }
}

/// Generates the entropy-method constraint system of `g`.
pub fn build_entropy_lp(g: &Graph) -> Result<EntropyLp, EntropyError> {
    let n = check_size(g)?;
    let qualified = qualified_table(g);
    let full = (1u32 << n) - 1;
    let f = EntropyVar::Subset;
    let mut b = Builder { seen: HashSet::new(), out: Vec::new() };

    b.push(Family::EmptySet, &[(f(0), 1)], Relation::Eq, 0);

    for a in 0..=full {
        for x in (0..n).filter(|&x| a >> x & 1 == 0) {
            b.push(Family::Monotonicity, &[(f(a | 1 << x), 1), (f(a), -1)], Relation::Ge, 0);
        }
    }

    for a in 0..=full {
        for x in (0..n).filter(|&x| a >> x & 1 == 0) {
            for y in (x + 1..n).filter(|&y| a >> y & 1 == 0) {
                let terms = [(f(a | 1 << x), 1), (f(a | 1 << y), 1), (f(a | 1 << x | 1 << y), -1), (f(a), -1)];
                b.push(Family::Submodularity, &terms, Relation::Ge, 0);
            }
        }
    }

    for set in (0..=full).filter(|&m| !qualified[m as usize]) {
        for x in (0..n).filter(|&x| set >> x & 1 == 0) {
            let bigger = set | 1 << x;
            if qualified[bigger as usize] {
                b.push(Family::StrictMonotonicity, &[(f(bigger), 1), (f(set), -1)], Relation::Ge, 1);
            }
        }
    }

    let qualified_sets: Vec<u32> = (0..=full).filter(|&m| qualified[m as usize]).collect();
    for (i, &a) in qualified_sets.iter().enumerate() {
        for &bset in &qualified_sets[i + 1..] {
            let meet = a & bset;
            if qualified[meet as usize] {
                continue;
            }
            let terms = [(f(a), 1), (f(bset), 1), (f(a | bset), -1), (f(meet), -1)];
            b.push(Family::StrictSubmodularity, &terms, Relation::Ge, 1);
        }
    }

    for v in 0..n {
        b.push(Family::Objective, &[(EntropyVar::Bound, 1), (f(1 << v), -1)], Relation::Ge, 0);
    }

    Ok(EntropyLp { n, constraints: b.out })
}

/// Optimal bound together with the minimising set function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntropyOptimum {
    pub value: Rational,
    /// `f[mask]` for every subset.
    pub f: Vec<Rational>,
}

impl EntropyOptimum {
    pub fn singleton_sum(&self, members: &[usize]) -> Rational {
        members.iter().map(|&v| self.f[1 << v].clone()).sum()
    }
}

/// Solves the entropy LP exactly by constraint generation, starting from
/// the equality, strict monotonicity and objective rows.
pub fn solve_entropy_lp(lp: &EntropyLp) -> Result<EntropyOptimum, EntropyError> {
    let program = lp.to_linear_program();
    let seed = |i: usize| {
        matches!(lp.constraints[i].family, Family::EmptySet | Family::StrictMonotonicity | Family::Objective)
    };
    let batch = 2 * lp.variable_count();
    match solve_min_lazy(&program, seed, batch)? {
        LpOutcome::Optimal(opt) => {
            let mut f = opt.assignment;
            f.truncate(1 << lp.n);
            Ok(EntropyOptimum { value: opt.value, f })
        }
        LpOutcome::Infeasible => Err(EntropyError::Anomaly("infeasible")),
        LpOutcome::Unbounded => Err(EntropyError::Anomaly("unbounded")),
    }
}

/// Entropy-method lower bound on the information complexity of `g`.
pub fn entropy_lower_bound(g: &Graph) -> Result<Rational, EntropyError> {
    Ok(solve_entropy_lp(&build_entropy_lp(g)?)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_graph;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn qualification() {
        let g = parse_graph("a b\nb c\nc d").unwrap();
        assert!(is_qualified(&g, &[0, 1]).unwrap());
        assert!(!is_qualified(&g, &[0, 2]).unwrap());
        assert!(!is_qualified(&g, &[]).unwrap());
        assert!(is_qualified(&g, &[7]).is_err());
    }

    #[test]
    fn p2_system() {
        let lp = build_entropy_lp(&parse_graph("a b").unwrap()).unwrap();
        assert_eq!(lp.variable_count(), 5);
        let expected = EntropyConstraint {
            family: Family::StrictMonotonicity,
            terms: vec![(EntropyVar::Subset(1), -1), (EntropyVar::Subset(3), 1)],
            relation: Relation::Ge,
            rhs: 1,
        };
        assert!(lp.constraints.contains(&expected));
        assert_eq!(lp.count(Family::StrictSubmodularity), 0);
    }

    #[test]
    fn family_counts_on_p4() {
        let lp = build_entropy_lp(&parse_graph("a b\nb c\nc d").unwrap()).unwrap();
        assert_eq!(lp.variable_count(), 17);
        assert_eq!(lp.count(Family::Monotonicity), 4 * 8);
        assert_eq!(lp.count(Family::Submodularity), 6 * 4);
        assert_eq!(lp.count(Family::EmptySet), 1);
        assert_eq!(lp.count(Family::Objective), 4);
    }

    #[test]
    fn delta_strict_submodularity_instance() {
        let lp = build_entropy_lp(&parse_graph("a b\nb c\na d\nb d").unwrap()).unwrap();
        assert_eq!(lp.variable_count(), 17);
        // A = {a,b}, B = {b,c}: f(3) + f(6) - f(7) - f(2) >= 1
        let expected = vec![
            (EntropyVar::Subset(2), -1),
            (EntropyVar::Subset(3), 1),
            (EntropyVar::Subset(6), 1),
            (EntropyVar::Subset(7), -1),
        ];
        assert!(lp
            .constraints
            .iter()
            .any(|c| c.family == Family::StrictSubmodularity && c.terms == expected && c.rhs == 1));
    }

    #[test]
    fn cap_is_enforced() {
        let names: Vec<String> = (0..13).map(|i| format!("v{i}")).collect();
        let g = Graph::from_edges(names, (1..13).map(|i| (0, i))).unwrap();
        assert!(matches!(build_entropy_lp(&g), Err(EntropyError::TooLarge { n: 13, .. })));
    }

    #[test]
    fn small_bounds() {
        assert_eq!(entropy_lower_bound(&parse_graph("a b").unwrap()).unwrap(), q(1, 1));
        assert_eq!(entropy_lower_bound(&parse_graph("a b\nb c\nc d").unwrap()).unwrap(), q(3, 2));
    }
}
