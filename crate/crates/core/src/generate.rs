//! Graph generators for tests and experiments. Vertices are named `v0`, `v1`, ...

use std::collections::{BTreeSet, HashSet};

use rand::Rng;

use crate::graph::Graph;

fn names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("v{i}")).collect()
}

/// Tree of a Prüfer sequence over `0..n`, `n = seq.len() + 2`.
pub fn tree_from_pruefer(seq: &[usize]) -> Graph {
    let n = seq.len() + 2;
    let mut degree = vec![1usize; n];
    for &x in seq {
        degree[x] += 1;
    }
    let mut leaves: BTreeSet<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    let mut edges = Vec::with_capacity(n - 1);
    for &x in seq {
        let leaf = leaves.pop_first().expect("a tree always has a leaf");
        edges.push((leaf, x));
        degree[x] -= 1;
        if degree[x] == 1 {
            leaves.insert(x);
        }
    }
    let rest: Vec<usize> = leaves.into_iter().collect();
    edges.push((rest[0], rest[1]));
    Graph::from_edges(names(n), edges).expect("Prüfer sequences decode to trees")
}

/// Uniformly random labelled tree on `n >= 1` vertices.
pub fn random_tree<R: Rng>(n: usize, rng: &mut R) -> Graph {
    assert!(n >= 1, "a tree needs a vertex");
    if n == 1 {
        return Graph::from_edges(names(1), Vec::new()).expect("single vertex");
    }
    let seq: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
    tree_from_pruefer(&seq)
}

/// Random connected graph: a random spanning tree plus every other pair
/// independently with probability `extra`.
pub fn random_connected_graph<R: Rng>(n: usize, extra: f64, rng: &mut R) -> Graph {
    let tree = random_tree(n, rng);
    let mut edges: Vec<(usize, usize)> = tree.edges().to_vec();
    for u in 0..n {
        for v in u + 1..n {
            if !tree.has_edge(u, v) && rng.gen_bool(extra) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(names(n), edges).expect("generated edges are simple")
}

/// AHU encoding of the tree below `v`, children sorted.
fn encode(g: &Graph, v: usize, parent: Option<usize>) -> String {
    let mut parts: Vec<String> =
        g.neighbors(v).iter().filter(|&&u| Some(u) != parent).map(|&u| encode(g, u, Some(v))).collect();
    parts.sort();
    format!("({})", parts.concat())
}

/// Centers of a tree, by repeatedly stripping leaves.
fn centers(g: &Graph) -> Vec<usize> {
    let n = g.vertex_count();
    let mut degree: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut layer: Vec<usize> = (0..n).filter(|&v| degree[v] <= 1).collect();
    let mut remaining = n;
    while remaining > 2 {
        remaining -= layer.len();
        let mut next = Vec::new();
        for &v in &layer {
            for &u in g.neighbors(v) {
                degree[u] -= 1;
                if degree[u] == 1 {
                    next.push(u);
                }
            }
        }
        layer = next;
    }
    layer
}

/// Canonical string of a tree: equal exactly for isomorphic trees.
pub fn tree_canonical_form(g: &Graph) -> String {
    centers(g).into_iter().map(|c| encode(g, c, None)).min().unwrap_or_default()
}

/// One representative of every isomorphism class of trees on `n` vertices,
/// in order of first appearance among Prüfer sequences.
pub fn nonisomorphic_trees(n: usize) -> Vec<Graph> {
    assert!(n >= 2, "trees with edges need two vertices");
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut seq = vec![0usize; n - 2];
    loop {
        let t = tree_from_pruefer(&seq);
        if seen.insert(tree_canonical_form(&t)) {
            out.push(t);
        }
        let Some(i) = (0..seq.len()).rev().find(|&i| seq[i] + 1 < n) else {
            return out;
        };
        seq[i] += 1;
        for x in &mut seq[i + 1..] {
            *x = 0;
        }
    }
}
