//! JSON forms of schemes and share bundles.
//!
//! Star indices are 0-based positions in `stars`, and star `j` evaluates the
//! secret polynomial at `alpha_j = j`. The tree is not stored separately:
//! its edges are exactly the center-leaf pairs of the stars.

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{check_field, derive_layout, Role, Scheme, SchemeError};
use crate::core_analysis::WeightFunction;
use crate::field::FieldElement;
use crate::graph::Graph;
use crate::star::{Star, StarPacking};

const VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SchemeFile {
    version: u32,
    field_prime: u64,
    c: u64,
    vertices: Vec<String>,
    root: String,
    weights: IndexMap<String, u64>,
    stars: Vec<StarEntry>,
    layout: IndexMap<String, Vec<(usize, Role)>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StarEntry {
    center: String,
    leaves: Vec<String>,
}

fn invalid(msg: impl Into<String>) -> SchemeError {
    SchemeError::Invalid(msg.into())
}

impl Scheme {
    fn to_file(&self) -> SchemeFile {
        let g = &self.tree;
        let name = |v: usize| g.name(v).to_string();
        SchemeFile {
            version: VERSION,
            field_prime: self.prime(),
            c: self.c,
            vertices: g.names().to_vec(),
            root: name(self.root),
            weights: (0..g.vertex_count()).map(|v| (name(v), self.weights.get(v))).collect(),
            stars: self
                .stars
                .iter()
                .map(|s| StarEntry { center: name(s.center), leaves: s.leaves.iter().map(|&l| name(l)).collect() })
                .collect(),
            layout: (0..g.vertex_count()).map(|v| (name(v), self.layout[v].clone())).collect(),
        }
    }

    /// Pretty-printed scheme file with a stable key order.
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(&self.to_file()).expect("scheme serializes");
        text.push('\n');
        text
    }

    /// Hex SHA-256 of the compact scheme JSON; ties share bundles to a scheme.
    pub fn hash(&self) -> String {
        let compact = serde_json::to_string(&self.to_file()).expect("scheme serializes");
        hex::encode(Sha256::digest(compact.as_bytes()))
    }

    /// Parses and fully re-validates a scheme file.
    pub fn from_json(text: &str) -> Result<Scheme, SchemeError> {
        let file: SchemeFile = serde_json::from_str(text).map_err(|e| invalid(e.to_string()))?;
        if file.version != VERSION {
            return Err(invalid(format!("unsupported version {}", file.version)));
        }
        if file.c == 0 {
            return Err(invalid("c must be positive"));
        }
        let n = file.vertices.len();
        let index = |name: &str| -> Result<usize, SchemeError> {
            file.vertices.iter().position(|v| v == name).ok_or_else(|| invalid(format!("unknown vertex `{name}`")))
        };

        let mut stars = Vec::with_capacity(file.stars.len());
        let mut edges: Vec<(usize, usize)> = Vec::new();
        for (j, entry) in file.stars.iter().enumerate() {
            let center = index(&entry.center)?;
            let leaves = entry.leaves.iter().map(|l| index(l)).collect::<Result<Vec<_>, _>>()?;
            if leaves.is_empty() {
                return Err(invalid(format!("star {j} has no leaves")));
            }
            for (i, &l) in leaves.iter().enumerate() {
                if l == center || leaves[..i].contains(&l) {
                    return Err(invalid(format!("star {j} repeats vertex `{}`", file.vertices[l])));
                }
                let e = (center.min(l), center.max(l));
                if !edges.contains(&e) {
                    edges.push(e);
                }
            }
            stars.push(Star { center, leaves, index: j });
        }
        edges.sort_unstable();
        let mut tree = Graph::from_edges(file.vertices.clone(), edges).map_err(|e| invalid(e.to_string()))?;
        if !tree.is_tree() || n < 2 {
            return Err(SchemeError::NotATree);
        }
        let counts = StarPacking { stars: stars.clone() }.edge_counts(&tree);
        if let Some(i) = counts.iter().position(|&k| k != file.c) {
            let (u, v) = tree.edges()[i];
            return Err(invalid(format!(
                "edge {} {} lies in {} stars, expected {}",
                tree.name(u),
                tree.name(v),
                counts[i],
                file.c
            )));
        }

        let field = check_field(file.field_prime, stars.len())?;
        let root = index(&file.root)?;
        if file.weights.len() != n || file.weights.keys().zip(&file.vertices).any(|(k, v)| k != v) {
            return Err(invalid("weights must list every vertex in vertex order"));
        }
        let weights = WeightFunction::new(file.weights.values().copied().collect())?;
        tree.set_weights(weights.as_slice().to_vec())?;

        let layout = derive_layout(n, &stars);
        if file.layout.len() != n || file.layout.keys().zip(&file.vertices).any(|(k, v)| k != v) {
            return Err(invalid("layout must list every vertex in vertex order"));
        }
        if file.layout.values().zip(&layout).any(|(given, derived)| given != derived) {
            return Err(invalid("layout does not match the stars"));
        }
        Ok(Scheme { tree, c: file.c, field, root, weights, stars, layout })
    }
}

/// Shares of every vertex, bound to the scheme they were dealt for.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SharesBundle {
    pub scheme_hash: String,
    pub shares: IndexMap<String, Vec<FieldElement>>,
}

impl SharesBundle {
    pub fn new(sch: &Scheme, shares: &[Vec<FieldElement>]) -> Self {
        SharesBundle {
            scheme_hash: sch.hash(),
            shares: sch.tree.names().iter().cloned().zip(shares.iter().cloned()).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("shares serialize");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self, SchemeError> {
        serde_json::from_str(text).map_err(|e| invalid(e.to_string()))
    }

    /// The share of `vertex`, after checking the bundle belongs to `sch`.
    pub fn share(&self, sch: &Scheme, vertex: &str) -> Result<&[FieldElement], SchemeError> {
        let expected = sch.hash();
        if self.scheme_hash != expected {
            return Err(SchemeError::HashMismatch { expected, found: self.scheme_hash.clone() });
        }
        self.shares.get(vertex).map(Vec::as_slice).ok_or_else(|| invalid(format!("no share for `{vertex}`")))
    }
}
