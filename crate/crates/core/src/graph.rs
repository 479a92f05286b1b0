//! Undirected simple graphs with named vertices, and rooted views of trees.
//!
//! Vertices are addressed by their index in first-appearance order. That
//! order is canonical: neighbor lists, star numbering and share layouts all
//! follow it, so repeated runs on the same input produce identical output.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("line {line}: self-loop on vertex `{vertex}`")]
    SelfLoop { line: usize, vertex: String },
    #[error("line {line}: duplicate edge {u} {v}")]
    DuplicateEdge { line: usize, u: String, v: String },
    #[error("line {line}: malformed line `{text}`")]
    Malformed { line: usize, text: String },
    #[error("line {line}: weight must be a positive integer, got `{value}`")]
    BadWeight { line: usize, value: String },
    #[error("line {line}: weight of `{vertex}` given twice")]
    DuplicateWeight { line: usize, vertex: String },
    #[error("weight of `{0}` must be positive")]
    NonPositiveWeight(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("vertex index {0} out of range")]
    VertexOutOfRange(usize),
    #[error("graph is not a tree")]
    NotATree,
    #[error("tree needs at least two vertices")]
    TooSmall,
}

/// A simple undirected graph with optional positive integer vertex weights.
#[derive(Debug, Clone)]
pub struct Graph {
    names: Vec<String>,
    index: HashMap<String, usize>,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
    weights: Vec<u64>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names && self.weights == other.weights && {
            let norm = |g: &Graph| {
                let mut e: Vec<_> = g.edges.iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
                e.sort_unstable();
                e
            };
            norm(self) == norm(other)
        }
    }
}

impl Eq for Graph {}

impl Graph {
    /// Builds a graph from vertex names and index pairs.
    pub fn from_edges<S: Into<String>>(
        names: impl IntoIterator<Item = S>,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        let mut g = Graph::empty();
        for name in names {
            g.intern(&name.into());
        }
        for (u, v) in edges {
            g.check_vertex(u)?;
            g.check_vertex(v)?;
            g.insert_edge(u, v, 0)?;
        }
        Ok(g)
    }

    fn empty() -> Self {
        Graph {
            names: Vec::new(),
            index: HashMap::new(),
            edges: Vec::new(),
            adjacency: Vec::new(),
            weights: Vec::new(),
        }
    }

    fn intern(&mut self, name: &str) -> usize {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        let i = self.names.len();
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), i);
        self.adjacency.push(Vec::new());
        self.weights.push(1);
        i
    }

    fn insert_edge(&mut self, u: usize, v: usize, line: usize) -> Result<(), GraphError> {
        if u == v {
            return Err(GraphError::SelfLoop { line, vertex: self.names[u].clone() });
        }
        if self.adjacency[u].contains(&v) {
            return Err(GraphError::DuplicateEdge { line, u: self.names[u].clone(), v: self.names[v].clone() });
        }
        self.edges.push((u, v));
        for (a, b) in [(u, v), (v, u)] {
            let adj = &mut self.adjacency[a];
            let pos = adj.partition_point(|&x| x < b);
            adj.insert(pos, b);
        }
        Ok(())
    }

    fn check_vertex(&self, v: usize) -> Result<(), GraphError> {
        if v < self.names.len() {
            Ok(())
        } else {
            Err(GraphError::VertexOutOfRange(v))
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges in declaration order, endpoints as written.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Neighbors of `v` in canonical (index) order.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.adjacency.len() && self.adjacency[u].binary_search(&v).is_ok()
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn vertex(&self, name: &str) -> Result<usize, GraphError> {
        self.index.get(name).copied().ok_or_else(|| GraphError::UnknownVertex(name.to_string()))
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    /// True when some vertex carries a weight other than the default 1.
    pub fn has_weights(&self) -> bool {
        self.weights.iter().any(|&w| w != 1)
    }

    pub fn set_weights(&mut self, weights: Vec<u64>) -> Result<(), GraphError> {
        if weights.len() != self.names.len() {
            return Err(GraphError::VertexOutOfRange(weights.len()));
        }
        if let Some(pos) = weights.iter().position(|&w| w == 0) {
            return Err(GraphError::NonPositiveWeight(self.names[pos].clone()));
        }
        self.weights = weights;
        Ok(())
    }

    /// Adjacency as bitmasks; only valid for graphs with at most 64 vertices.
    pub fn adjacency_masks(&self) -> Vec<u64> {
        debug_assert!(self.vertex_count() <= 64);
        self.adjacency.iter().map(|adj| adj.iter().fold(0u64, |m, &u| m | (1 << u))).collect()
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertex_count();
        if n == 0 {
            return false;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &u in &self.adjacency[v] {
                if !seen[u] {
                    seen[u] = true;
                    count += 1;
                    stack.push(u);
                }
            }
        }
        count == n
    }

    /// Connected with exactly `n - 1` edges.
    pub fn is_tree(&self) -> bool {
        self.vertex_count() > 0 && self.edge_count() + 1 == self.vertex_count() && self.is_connected()
    }

    pub fn is_leaf(&self, v: usize) -> bool {
        self.degree(v) == 1
    }

    /// Text form accepted by [`parse_graph`]; weight lines come first so that
    /// re-parsing reproduces the vertex order.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for (v, name) in self.names.iter().enumerate() {
            let _ = writeln!(out, "weight {} {}", name, self.weights[v]);
        }
        for &(u, v) in &self.edges {
            let _ = writeln!(out, "{} {}", self.names[u], self.names[v]);
        }
        out
    }
}

/// Parses the line-oriented graph format.
///
/// `#` starts a comment line, `weight <v> <k>` sets a weight, and any other
/// non-empty line `<u> <v>` declares an edge.
pub fn parse_graph(text: &str) -> Result<Graph, GraphError> {
    let mut g = Graph::empty();
    let mut weighted = HashSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        match tokens.as_slice() {
            ["weight", v, k] => {
                let vi = g.intern(v);
                let w: u64 = k
                    .parse()
                    .ok()
                    .filter(|&w| w >= 1)
                    .ok_or_else(|| GraphError::BadWeight { line, value: k.to_string() })?;
                if !weighted.insert(vi) {
                    return Err(GraphError::DuplicateWeight { line, vertex: v.to_string() });
                }
                g.weights[vi] = w;
            }
            [u, v] => {
                if u == v {
                    return Err(GraphError::SelfLoop { line, vertex: u.to_string() });
                }
                let ui = g.intern(u);
                let vi = g.intern(v);
                g.insert_edge(ui, vi, line)?;
            }
            _ => return Err(GraphError::Malformed { line, text: trimmed.to_string() }),
        }
    }
    Ok(g)
}

/// Parses a weights file (`weight <v> <k>` lines) against an existing graph.
pub fn parse_weights(g: &Graph, text: &str) -> Result<Vec<u64>, GraphError> {
    let mut weights = vec![1; g.vertex_count()];
    let mut seen = HashSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        let ["weight", v, k] = tokens.as_slice() else {
            return Err(GraphError::Malformed { line, text: trimmed.to_string() });
        };
        let vi = g.vertex(v)?;
        let w: u64 =
            k.parse().ok().filter(|&w| w >= 1).ok_or_else(|| GraphError::BadWeight { line, value: k.to_string() })?;
        if !seen.insert(vi) {
            return Err(GraphError::DuplicateWeight { line, vertex: v.to_string() });
        }
        weights[vi] = w;
    }
    Ok(weights)
}

/// How to pick the root of a [`RootedTree`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootChoice {
    /// First non-leaf vertex in canonical order; the first vertex when `n = 2`.
    Auto,
    Vertex(usize),
}

#[derive(Debug, Clone)]
pub struct RootedTree<'g> {
    graph: &'g Graph,
    root: usize,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    bfs_order: Vec<usize>,
}

/// Roots a tree, returning parent/children maps and a BFS order.
pub fn root_at(g: &Graph, root: RootChoice) -> Result<RootedTree<'_>, GraphError> {
    if !g.is_tree() {
        return Err(GraphError::NotATree);
    }
    let n = g.vertex_count();
    if n < 2 {
        return Err(GraphError::TooSmall);
    }
    let root = match root {
        RootChoice::Vertex(v) => {
            g.check_vertex(v)?;
            v
        }
        RootChoice::Auto if n == 2 => 0,
        RootChoice::Auto => (0..n).find(|&v| !g.is_leaf(v)).expect("tree with n >= 3 has an inner vertex"),
    };

    let mut parent = vec![None; n];
    let mut children = vec![Vec::new(); n];
    let mut bfs_order = Vec::with_capacity(n);
    let mut visited = vec![false; n];
    let mut queue = VecDeque::from([root]);
    visited[root] = true;
    while let Some(v) = queue.pop_front() {
        bfs_order.push(v);
        for &u in g.neighbors(v) {
            if !visited[u] {
                visited[u] = true;
                parent[u] = Some(v);
                children[v].push(u);
                queue.push_back(u);
            }
        }
    }
    Ok(RootedTree { graph: g, root, parent, children, bfs_order })
}

impl<'g> RootedTree<'g> {
    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn bfs_order(&self) -> &[usize] {
        &self.bfs_order
    }

    /// Vertices of the subtree hanging below `v`, `v` included.
    pub fn subtree(&self, v: usize) -> Vec<usize> {
        let mut out = vec![v];
        let mut i = 0;
        while i < out.len() {
            out.extend_from_slice(&self.children[out[i]]);
            i += 1;
        }
        out
    }

    pub fn vertex_count(&self) -> usize {
        self.bfs_order.len()
    }
}
