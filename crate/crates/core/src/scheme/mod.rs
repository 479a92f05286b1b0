//! The linear secret sharing scheme on a tree built from its star packing.
//!
//! The secret is `s = (s_0, ..., s_{c-1})` and `f(x) = sum s_i x^i`. Star
//! `j` carries the piece `f(alpha_j)` with `alpha_j = j` and one fresh mask
//! `r_j`: its center holds `r_j` and each of its leaves `f(alpha_j) + r_j`.
//! Every edge lies in exactly `c` stars, so its two ends see `c` pieces and
//! interpolate `f`; an independent set sees only masked pieces or bare masks.

mod file;
mod verify;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::core_analysis::{maximalize_weights, tree_core_sizes, CoreError, WeightFunction};
use crate::field::{interpolate_secret, smallest_prime_at_least, FieldElement, FieldError, FieldMatrix, PrimeField};
use crate::graph::{root_at, Graph, GraphError, RootChoice};
use crate::star::{extract_stars, orient_edges, Star, StarError};

pub use file::SharesBundle;
pub use verify::{
    max_independent_sets, verify_exhaustive, verify_linear, verify_matrices, CheckKind, CheckResult, VerifyReport,
    DEFAULT_EXHAUSTIVE_LIMIT, MIS_CAP,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SchemeError {
    #[error("graph is not a tree")]
    NotATree,
    #[error("a scheme needs at least two vertices")]
    TooSmall,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error(transparent)]
    Star(#[from] StarError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("field size {p} is below the star count {m}")]
    FieldTooSmall { p: u64, m: usize },
    #[error("secret has length {got}, expected {expected}")]
    SecretLength { expected: usize, got: usize },
    #[error("randomness has length {got}, expected {expected}")]
    RandomnessLength { expected: usize, got: usize },
    #[error("share of `{vertex}` has length {got}, expected {expected}")]
    ShareLength { vertex: String, expected: usize, got: usize },
    #[error("padding of the share of `{0}` is not zero")]
    BadPadding(String),
    #[error("`{0}` and `{1}` are not adjacent")]
    NotAnEdge(String, String),
    #[error("graph has {n} vertices, enumeration is capped at {cap}")]
    TooManyVertices { n: usize, cap: usize },
    #[error("exhaustive check needs {needed} assignments, limit is {limit}")]
    LimitExceeded { needed: u128, limit: u128 },
    #[error("malformed scheme file: {0}")]
    Invalid(String),
    #[error("shares were dealt for scheme {found}, not {expected}")]
    HashMismatch { expected: String, found: String },
}

/// Part a vertex plays in one star.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Center,
    Leaf,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scheme {
    tree: Graph,
    c: u64,
    field: PrimeField,
    root: usize,
    weights: WeightFunction,
    stars: Vec<Star>,
    layout: Vec<Vec<(usize, Role)>>,
}

/// Share coordinates of every vertex in star order.
fn derive_layout(n: usize, stars: &[Star]) -> Vec<Vec<(usize, Role)>> {
    let mut layout = vec![Vec::new(); n];
    for (j, s) in stars.iter().enumerate() {
        layout[s.center].push((j, Role::Center));
        for &l in &s.leaves {
            layout[l].push((j, Role::Leaf));
        }
    }
    layout
}

fn check_field(p: u64, m: usize) -> Result<PrimeField, SchemeError> {
    let field = PrimeField::new(p)?;
    if (p as u128) < m as u128 {
        return Err(SchemeError::FieldTooSmall { p, m });
    }
    Ok(field)
}

/// Runs the core, weighting, orientation and star extraction pipeline and
/// sets the field to `field_override` or the smallest prime `>= max(m, 2)`.
pub fn build_scheme(
    g: &Graph,
    field_override: Option<u64>,
    root_override: Option<usize>,
) -> Result<Scheme, SchemeError> {
    if !g.is_tree() {
        return Err(SchemeError::NotATree);
    }
    if g.vertex_count() < 2 {
        return Err(SchemeError::TooSmall);
    }
    let choice = root_override.map_or(RootChoice::Auto, RootChoice::Vertex);
    let rooted = root_at(g, choice)?;
    let c = tree_core_sizes(&rooted)?.global_c;
    let weights = maximalize_weights(g, c)?;
    let orientation = orient_edges(&rooted, &weights, c)?;
    let stars = extract_stars(&rooted, &orientation).stars;
    let m = stars.len();
    let field = match field_override {
        Some(p) => check_field(p, m)?,
        None => PrimeField::new(smallest_prime_at_least(m.max(2) as u64)?)?,
    };
    let layout = derive_layout(g.vertex_count(), &stars);
    let mut tree = g.clone();
    tree.set_weights(weights.as_slice().to_vec())?;
    Ok(Scheme { tree, c, field, root: rooted.root(), weights, stars, layout })
}

impl Scheme {
    pub fn tree(&self) -> &Graph {
        &self.tree
    }

    /// Secret length.
    pub fn c(&self) -> u64 {
        self.c
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn prime(&self) -> u64 {
        self.field.modulus()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn weights(&self) -> &WeightFunction {
        &self.weights
    }

    pub fn stars(&self) -> &[Star] {
        &self.stars
    }

    /// Randomness length `m`, one mask per star.
    pub fn star_count(&self) -> usize {
        self.stars.len()
    }

    pub fn eval_point(&self, j: usize) -> FieldElement {
        j as FieldElement
    }

    pub fn layout(&self, v: usize) -> &[(usize, Role)] {
        &self.layout[v]
    }

    pub fn share_len(&self, v: usize) -> usize {
        self.layout[v].len()
    }

    pub fn max_share_len(&self) -> usize {
        self.layout.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Share length after zero padding, `2c - 1`.
    pub fn padded_len(&self) -> usize {
        2 * self.c as usize - 1
    }

    fn check_vector(&self, v: &[u64], expected: usize, secret: bool) -> Result<(), SchemeError> {
        if v.len() != expected {
            return Err(if secret {
                SchemeError::SecretLength { expected, got: v.len() }
            } else {
                SchemeError::RandomnessLength { expected, got: v.len() }
            });
        }
        for &x in v {
            self.field.element(x)?;
        }
        Ok(())
    }

    /// `f(alpha_j)` for every star.
    pub fn pieces(&self, secret: &[FieldElement]) -> Result<Vec<FieldElement>, SchemeError> {
        self.check_vector(secret, self.c as usize, true)?;
        Ok((0..self.star_count()).map(|j| self.field.evaluate(secret, self.eval_point(j))).collect())
    }

    /// Shares of every vertex for the given secret and masks.
    pub fn deal(
        &self,
        secret: &[FieldElement],
        randomness: &[FieldElement],
    ) -> Result<Vec<Vec<FieldElement>>, SchemeError> {
        let pieces = self.pieces(secret)?;
        self.check_vector(randomness, self.star_count(), false)?;
        Ok(self
            .layout
            .iter()
            .map(|coords| {
                coords
                    .iter()
                    .map(|&(j, role)| match role {
                        Role::Center => randomness[j],
                        Role::Leaf => self.field.add(pieces[j], randomness[j]),
                    })
                    .collect()
            })
            .collect())
    }

    /// Uniform masks drawn from `rng`.
    pub fn draw_randomness<R: Rng>(&self, rng: &mut R) -> Vec<FieldElement> {
        (0..self.star_count()).map(|_| rng.gen_range(0..self.prime())).collect()
    }

    /// Masks from a ChaCha8 stream seeded with `seed`, one `gen_range(0..p)`
    /// draw per star in star order.
    pub fn seeded_randomness(&self, seed: u64) -> Vec<FieldElement> {
        self.draw_randomness(&mut ChaCha8Rng::seed_from_u64(seed))
    }

    /// Zero-pads every share to length `2c - 1`.
    pub fn pad(&self, shares: &[Vec<FieldElement>]) -> Vec<Vec<FieldElement>> {
        shares
            .iter()
            .map(|s| {
                let mut s = s.clone();
                s.resize(s.len().max(self.padded_len()), 0);
                s
            })
            .collect()
    }

    /// Accepts a share of exactly the layout length, or a zero-padded one.
    fn unpadded<'s>(&self, v: usize, share: &'s [FieldElement]) -> Result<&'s [FieldElement], SchemeError> {
        let k = self.share_len(v);
        let name = || self.tree.name(v).to_string();
        if share.len() != k && share.len() != self.padded_len().max(k) {
            return Err(SchemeError::ShareLength { vertex: name(), expected: k, got: share.len() });
        }
        if share[k..].iter().any(|&x| x != 0) {
            return Err(SchemeError::BadPadding(name()));
        }
        for &x in share {
            self.field.element(x)?;
        }
        Ok(&share[..k])
    }

    /// Stars containing the edge `{u, v}`, with the position of the star's
    /// coordinate in the center's and the leaf's share.
    fn covering_stars(&self, u: usize, v: usize) -> Vec<(usize, usize, usize, bool)> {
        let position = |x: usize, j: usize| self.layout[x].iter().position(|&(k, _)| k == j);
        self.stars
            .iter()
            .enumerate()
            .filter_map(|(j, s)| {
                let (center, leaf, u_is_center) = if s.center == u && s.leaves.contains(&v) {
                    (u, v, true)
                } else if s.center == v && s.leaves.contains(&u) {
                    (v, u, false)
                } else {
                    return None;
                };
                Some((j, position(center, j)?, position(leaf, j)?, u_is_center))
            })
            .collect()
    }

    /// Recovers the secret from the shares of the two ends of an edge.
    /// Corrupted shares silently give a wrong secret.
    pub fn reconstruct(
        &self,
        u: usize,
        v: usize,
        share_u: &[FieldElement],
        share_v: &[FieldElement],
    ) -> Result<Vec<FieldElement>, SchemeError> {
        let n = self.tree.vertex_count();
        for x in [u, v] {
            if x >= n {
                return Err(GraphError::VertexOutOfRange(x).into());
            }
        }
        if !self.tree.has_edge(u, v) {
            return Err(SchemeError::NotAnEdge(self.tree.name(u).into(), self.tree.name(v).into()));
        }
        let share_u = self.unpadded(u, share_u)?;
        let share_v = self.unpadded(v, share_v)?;
        let points: Vec<(FieldElement, FieldElement)> = self
            .covering_stars(u, v)
            .into_iter()
            .map(|(j, at_center, at_leaf, u_is_center)| {
                let (center, leaf) = if u_is_center { (share_u, share_v) } else { (share_v, share_u) };
                (self.eval_point(j), self.field.sub(leaf[at_leaf], center[at_center]))
            })
            .collect();
        Ok(interpolate_secret(self.field, &points, self.c as usize)?)
    }

    /// `M_v` over the columns `(s_0, ..., s_{c-1}, r_0, ..., r_{m-1})`: a
    /// center row is the unit vector of `r_j`, a leaf row is
    /// `(1, alpha_j, ..., alpha_j^{c-1})` plus the unit vector of `r_j`.
    pub fn emit_matrices(&self) -> Vec<FieldMatrix> {
        let c = self.c as usize;
        let width = c + self.star_count();
        self.layout
            .iter()
            .map(|coords| {
                let rows: Vec<Vec<u64>> = coords
                    .iter()
                    .map(|&(j, role)| {
                        let mut row = vec![0; width];
                        if role == Role::Leaf {
                            for (i, x) in row.iter_mut().take(c).enumerate() {
                                *x = self.field.pow(self.eval_point(j), i as u64);
                            }
                        }
                        row[c + j] = 1;
                        row
                    })
                    .collect();
                FieldMatrix::from_rows(self.field, width, &rows).expect("entries are reduced")
            })
            .collect()
    }
}
