//! Cores of graphs: the exact predicate, brute-force maximum for small
//! graphs, and the linear-time dynamic program for trees together with its
//! weighted variant and the construction of maximal weight functions.

use num_bigint::BigInt;
use thiserror::Error;

use crate::graph::{root_at, Graph, GraphError, RootChoice, RootedTree};
use crate::Rational;

/// Vertex count up to which [`max_core_bruteforce`] runs without an explicit cap.
pub const DEFAULT_BRUTE_CAP: usize = 16;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CoreError {
    #[error("vertex set is empty")]
    EmptySet,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("graph has {n} vertices, brute force is capped at {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("graph has no core")]
    NoCore,
    #[error("core size must be at least 1")]
    InvalidCoreSize,
    #[error("vertex `{vertex}` lies in a core of weight {weight} > {c}")]
    WeightExceeds { vertex: String, weight: u64, c: u64 },
    #[error("weights must be positive and cover every vertex")]
    BadWeights,
}

/// Positive integer vertex weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightFunction(Vec<u64>);

impl WeightFunction {
    pub fn new(weights: Vec<u64>) -> Result<Self, CoreError> {
        if weights.contains(&0) {
            return Err(CoreError::BadWeights);
        }
        Ok(WeightFunction(weights))
    }

    pub fn unit(n: usize) -> Self {
        WeightFunction(vec![1; n])
    }

    pub fn get(&self, v: usize) -> u64 {
        self.0[v]
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Decides whether `x` is a core of `g`.
///
/// `x` must induce a connected subgraph, and every member needs a private
/// outside neighbor (one whose only neighbor in `x` is that member) such
/// that the chosen outside neighbors are pairwise non-adjacent.
pub fn is_core(g: &Graph, x: &[usize]) -> Result<bool, CoreError> {
    if x.is_empty() {
        return Err(CoreError::EmptySet);
    }
    let n = g.vertex_count();
    let mut member = vec![false; n];
    for &v in x {
        if v >= n {
            return Err(GraphError::VertexOutOfRange(v).into());
        }
        member[v] = true;
    }
    let mut xs: Vec<usize> = x.to_vec();
    xs.sort_unstable();
    xs.dedup();
    Ok(core_check(g, &xs, &member))
}

fn core_check(g: &Graph, xs: &[usize], member: &[bool]) -> bool {
    // connectivity of the induced subgraph
    let mut seen = vec![false; member.len()];
    let mut stack = vec![xs[0]];
    seen[xs[0]] = true;
    let mut reached = 1;
    while let Some(v) = stack.pop() {
        for &u in g.neighbors(v) {
            if member[u] && !seen[u] {
                seen[u] = true;
                reached += 1;
                stack.push(u);
            }
        }
    }
    if reached != xs.len() {
        return false;
    }

    // A candidate has exactly one neighbor in X, so candidate lists of
    // distinct members are disjoint; only independence needs searching.
    let mut candidates: Vec<Vec<usize>> = Vec::with_capacity(xs.len());
    for &v in xs {
        let list: Vec<usize> = g
            .neighbors(v)
            .iter()
            .copied()
            .filter(|&y| !member[y] && g.neighbors(y).iter().filter(|&&z| member[z]).count() == 1)
            .collect();
        if list.is_empty() {
            return false;
        }
        candidates.push(list);
    }
    candidates.sort_by_key(Vec::len);
    let mut chosen = Vec::with_capacity(candidates.len());
    independent_choice(g, &candidates, &mut chosen)
}

fn independent_choice(g: &Graph, candidates: &[Vec<usize>], chosen: &mut Vec<usize>) -> bool {
    let Some((first, rest)) = candidates.split_first() else {
        return true;
    };
    for &y in first {
        if chosen.iter().all(|&z| !g.has_edge(y, z)) {
            chosen.push(y);
            if independent_choice(g, rest, chosen) {
                return true;
            }
            chosen.pop();
        }
    }
    false
}

/// A maximum core found by exhaustive search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoreWitness {
    pub size: usize,
    /// Sorted vertex indices; lexicographically first among maximum cores.
    pub members: Vec<usize>,
}

/// Largest core of an arbitrary graph by enumerating every vertex subset.
pub fn max_core_bruteforce(g: &Graph, size_cap: usize) -> Result<CoreWitness, CoreError> {
    let n = g.vertex_count();
    if n > size_cap || n > 30 {
        return Err(CoreError::TooLarge { n, cap: size_cap.min(30) });
    }
    let mut best: Option<Vec<usize>> = None;
    let mut member = vec![false; n];
    for mask in 1u64..(1u64 << n) {
        let size = mask.count_ones() as usize;
        if let Some(b) = &best {
            if size < b.len() {
                continue;
            }
        }
        let xs: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
        if let Some(b) = &best {
            if size == b.len() && xs >= *b {
                continue;
            }
        }
        for &v in &xs {
            member[v] = true;
        }
        let ok = core_check(g, &xs, &member);
        for &v in &xs {
            member[v] = false;
        }
        if ok {
            best = Some(xs);
        }
    }
    let members = best.ok_or(CoreError::NoCore)?;
    Ok(CoreWitness { size: members.len(), members })
}

/// Per-vertex largest core sizes of a rooted tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoreProfile {
    /// `c(v)`: size of the largest core of the subtree below `v` that contains `v`.
    pub per_vertex: Vec<u64>,
    /// Size of the largest core of the whole tree.
    pub global_c: u64,
    /// One maximum core, sorted.
    pub witness: Vec<usize>,
}

/// Bottom-up values `w(v) + sum(children) - min(children)`, zero at leaves.
fn subtree_values(t: &RootedTree<'_>, weight: impl Fn(usize) -> u64) -> Vec<u64> {
    let mut value = vec![0u64; t.vertex_count()];
    for &v in t.bfs_order().iter().rev() {
        let children = t.children(v);
        if children.is_empty() {
            continue;
        }
        let (sum, min) = children.iter().fold((0u64, u64::MAX), |(s, m), &u| (s + value[u], m.min(value[u])));
        value[v] = weight(v) + sum - min;
    }
    value
}

/// Linear-time maximum core computation on a rooted tree.
pub fn tree_core_sizes(t: &RootedTree<'_>) -> Result<CoreProfile, CoreError> {
    if t.vertex_count() < 2 {
        return Err(GraphError::TooSmall.into());
    }
    let per_vertex = subtree_values(t, |_| 1);
    let root = t.root();

    // A core either contains the root, or has a topmost vertex whose parent
    // is the required outside neighbor, so no child needs to be left out.
    let mut top = root;
    let mut global_c = per_vertex[root];
    let mut top_is_root = true;
    for &v in t.bfs_order() {
        if v == root {
            continue;
        }
        let size = 1 + t.children(v).iter().map(|&u| per_vertex[u]).sum::<u64>();
        if size > global_c {
            global_c = size;
            top = v;
            top_is_root = false;
        }
    }

    let mut witness = Vec::new();
    collect_core(t, &per_vertex, top, top_is_root, &mut witness);
    witness.sort_unstable();
    Ok(CoreProfile { per_vertex, global_c, witness })
}

fn collect_core(t: &RootedTree<'_>, value: &[u64], v: usize, drop_min: bool, out: &mut Vec<usize>) {
    out.push(v);
    let children = t.children(v);
    let dropped = if drop_min { children.iter().copied().min_by_key(|&u| value[u]) } else { None };
    for &u in children {
        if Some(u) != dropped && value[u] > 0 {
            collect_core(t, value, u, true, out);
        }
    }
}

/// `c_w(v)` for every vertex of a rooted tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedCoreProfile {
    pub per_vertex: Vec<u64>,
    pub root: usize,
}

impl WeightedCoreProfile {
    /// Maximum weight of a core containing the root.
    pub fn root_value(&self) -> u64 {
        self.per_vertex[self.root]
    }
}

pub fn weighted_core_profile(t: &RootedTree<'_>, w: &WeightFunction) -> WeightedCoreProfile {
    WeightedCoreProfile { per_vertex: subtree_values(t, |v| w.get(v)), root: t.root() }
}

/// Maximum `w`-weight of a core of the tree `g` that contains `v`.
pub fn max_core_weight_containing(g: &Graph, w: &WeightFunction, v: usize) -> Result<u64, CoreError> {
    let t = root_at(g, RootChoice::Vertex(v))?;
    Ok(weighted_core_profile(&t, w).root_value())
}

/// Quadratic construction of a maximal weight function for a tree whose
/// largest core has size `c`: starting from unit weights, raise each vertex
/// in turn until its heaviest core weighs exactly `c`.
pub fn maximalize_weights(g: &Graph, c: u64) -> Result<WeightFunction, CoreError> {
    maximalize_from(g, WeightFunction::unit(g.vertex_count()), c)
}

/// Same as [`maximalize_weights`] but starting from a given weighting.
pub fn maximalize_from(g: &Graph, start: WeightFunction, c: u64) -> Result<WeightFunction, CoreError> {
    if c == 0 {
        return Err(CoreError::InvalidCoreSize);
    }
    if start.len() != g.vertex_count() {
        return Err(CoreError::BadWeights);
    }
    let mut w = start;
    for v in 0..g.vertex_count() {
        let best = max_core_weight_containing(g, &w, v)?;
        if best > c {
            return Err(CoreError::WeightExceeds { vertex: g.name(v).to_string(), weight: best, c });
        }
        w.0[v] += c - best;
    }
    Ok(w)
}

/// True iff no core of the tree outweighs `c` and every vertex lies in a
/// core of weight exactly `c`.
pub fn is_maximal_weighting(g: &Graph, w: &WeightFunction, c: u64) -> bool {
    if !g.is_tree() || g.vertex_count() < 2 || w.len() != g.vertex_count() {
        return false;
    }
    (0..g.vertex_count()).all(|v| max_core_weight_containing(g, w, v) == Ok(c))
}

/// Information complexity `2 - 1/c` of a tree whose largest core has size `c`.
pub fn sigma_of_tree(c: u64) -> Result<Rational, CoreError> {
    if c == 0 {
        return Err(CoreError::InvalidCoreSize);
    }
    Ok(Rational::from_integer(BigInt::from(2)) - Rational::new(BigInt::from(1), BigInt::from(c)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_graph;

    fn p4() -> Graph {
        parse_graph("a b\nb c\nc d").unwrap()
    }

    fn delta() -> Graph {
        parse_graph("a b\nb c\na d\nb d").unwrap()
    }

    fn star3() -> Graph {
        parse_graph("o x\no y\no z").unwrap()
    }

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn core_predicate() {
        let d = delta();
        assert!(is_core(&d, &[0]).unwrap());
        assert!(!is_core(&d, &[0, 1]).unwrap());
        assert!(is_core(&p4(), &[1, 2]).unwrap());
        assert!(!is_core(&p4(), &[0, 2]).unwrap());
        assert_eq!(is_core(&p4(), &[]), Err(CoreError::EmptySet));
        assert!(matches!(is_core(&p4(), &[9]), Err(CoreError::Graph(_))));
    }

    #[test]
    fn isolated_vertex_is_not_a_core() {
        let g = parse_graph("a b\nweight z 1").unwrap();
        assert!(!is_core(&g, &[2]).unwrap());
        assert_eq!(max_core_bruteforce(&parse_graph("weight z 1").unwrap(), 16), Err(CoreError::NoCore));
    }

    #[test]
    fn brute_force_maximum() {
        assert_eq!(max_core_bruteforce(&delta(), 16).unwrap(), CoreWitness { size: 1, members: vec![0] });
        assert_eq!(max_core_bruteforce(&p4(), 16).unwrap(), CoreWitness { size: 2, members: vec![1, 2] });
        assert_eq!(max_core_bruteforce(&star3(), 16).unwrap().size, 1);
        assert!(matches!(max_core_bruteforce(&p4(), 3), Err(CoreError::TooLarge { .. })));
    }

    #[test]
    fn tree_dp_on_p4() {
        let g = p4();
        let t = root_at(&g, RootChoice::Vertex(1)).unwrap();
        let prof = tree_core_sizes(&t).unwrap();
        assert_eq!(prof.per_vertex, vec![0, 2, 1, 0]);
        assert_eq!(prof.global_c, 2);
        assert_eq!(prof.witness, vec![1, 2]);

        let p2 = parse_graph("a b").unwrap();
        let t = root_at(&p2, RootChoice::Auto).unwrap();
        assert_eq!(tree_core_sizes(&t).unwrap().global_c, 1);
    }

    #[test]
    fn weighted_profile_examples() {
        let g = p4();
        let t = root_at(&g, RootChoice::Vertex(1)).unwrap();
        let prof = weighted_core_profile(&t, &WeightFunction::unit(4));
        assert_eq!(prof.per_vertex, vec![0, 2, 1, 0]);

        // internal vertex with a single child keeps only its own weight
        let chain = parse_graph("r u\nu v\nv x").unwrap();
        let t = root_at(&chain, RootChoice::Vertex(0)).unwrap();
        let w = WeightFunction::new(vec![5, 3, 4, 9]).unwrap();
        let prof = weighted_core_profile(&t, &w);
        assert_eq!(prof.per_vertex[2], 4);
        assert_eq!(prof.per_vertex[1], 3);
    }

    #[test]
    fn maximal_weights_small() {
        let g = p4();
        let w = maximalize_weights(&g, 2).unwrap();
        assert_eq!(w.as_slice(), [2, 1, 1, 2]);
        assert!(is_maximal_weighting(&g, &w, 2));
        assert!(!is_maximal_weighting(&g, &WeightFunction::unit(4), 2));

        let p2 = parse_graph("a b").unwrap();
        assert_eq!(maximalize_weights(&p2, 1).unwrap().as_slice(), [1, 1]);
        assert_eq!(maximalize_weights(&star3(), 1).unwrap().as_slice(), [1, 1, 1, 1]);

        // idempotent on an already maximal weighting
        assert_eq!(maximalize_from(&g, w.clone(), 2).unwrap(), w);
    }

    #[test]
    fn maximalize_rejects_too_small_c() {
        assert!(matches!(maximalize_weights(&p4(), 1), Err(CoreError::WeightExceeds { .. })));
    }

    #[test]
    fn sigma_values() {
        assert_eq!(sigma_of_tree(7).unwrap(), r(13, 7));
        assert_eq!(sigma_of_tree(1).unwrap(), r(1, 1));
        assert_eq!(sigma_of_tree(2).unwrap(), r(3, 2));
        assert_eq!(sigma_of_tree(0), Err(CoreError::InvalidCoreSize));
    }
}
