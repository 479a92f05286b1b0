//! Star packings: the optimal integral packing of a tree built from a
//! maximal weight function, its verification, and the fractional star
//! cover rate of an arbitrary graph as an exact LP.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::core_analysis::{is_maximal_weighting, weighted_core_profile, WeightFunction};
use crate::graph::{Graph, RootedTree};
use crate::lp::{solve_min, LinearProgram, LpError, LpOutcome, Relation};
use crate::Rational;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StarError {
    #[error("weight function is not maximal for c = {0}")]
    NotMaximal(u64),
    #[error("root `{0}` is a leaf of a tree with at least three vertices")]
    LeafRoot(String),
    #[error("star {star} uses the non-edge {u} {v}")]
    NotAnEdge { star: usize, u: String, v: String },
    #[error("graph has no edges")]
    NoEdges,
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("star cover LP reported {0}; this cannot happen for a graph with edges")]
    LpAnomaly(&'static str),
}

/// Directed multiplicities on the edges of a tree, `c` copies per edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orientation {
    pub c: u64,
    out: BTreeMap<(usize, usize), u64>,
}

impl Orientation {
    /// Number of copies directed from `u` towards `v`; zero off the tree.
    pub fn out(&self, u: usize, v: usize) -> u64 {
        self.out.get(&(u, v)).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), u64)> + '_ {
        self.out.iter().map(|(&k, &v)| (k, v))
    }
}

/// Splits each tree edge into `c` directed copies: `c_w(v)` from `v` up to
/// its parent and the remaining `c - c_w(v)` down from the parent.
pub fn orient_edges(t: &RootedTree<'_>, w: &WeightFunction, c: u64) -> Result<Orientation, StarError> {
    let g = t.graph();
    if g.vertex_count() >= 3 && g.is_leaf(t.root()) {
        return Err(StarError::LeafRoot(g.name(t.root()).to_string()));
    }
    if !is_maximal_weighting(g, w, c) {
        return Err(StarError::NotMaximal(c));
    }
    let profile = weighted_core_profile(t, w);
    let mut out = BTreeMap::new();
    for &v in t.bfs_order() {
        if let Some(parent) = t.parent(v) {
            let up = profile.per_vertex[v];
            out.insert((v, parent), up);
            out.insert((parent, v), c - up);
        }
    }
    Ok(Orientation { c, out })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Star {
    pub center: usize,
    pub leaves: Vec<usize>,
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StarPacking {
    pub stars: Vec<Star>,
}

impl StarPacking {
    /// Number of stars containing each edge, in the graph's edge order.
    pub fn edge_counts(&self, g: &Graph) -> Vec<u64> {
        let mut count: BTreeMap<(usize, usize), u64> = BTreeMap::new();
        for s in &self.stars {
            for &l in &s.leaves {
                *count.entry((s.center.min(l), s.center.max(l))).or_default() += 1;
            }
        }
        g.edges().iter().map(|&(u, v)| count.get(&(u.min(v), u.max(v))).copied().unwrap_or(0)).collect()
    }

    /// Number of stars containing each vertex, as center or leaf.
    pub fn vertex_counts(&self, n: usize) -> Vec<u64> {
        let mut count = vec![0u64; n];
        for s in &self.stars {
            count[s.center] += 1;
            for &l in &s.leaves {
                count[l] += 1;
            }
        }
        count
    }

    /// Number of stars centered at each vertex.
    pub fn center_counts(&self, n: usize) -> Vec<u64> {
        let mut count = vec![0u64; n];
        for s in &self.stars {
            count[s.center] += 1;
        }
        count
    }
}

/// Partitions the directed copies into stars pointing away from their
/// centers: vertex `v` gets `max_u out(v, u)` stars, the `t`-th of which
/// contains every neighbor `u` with `out(v, u) >= t`.
pub fn extract_stars(t: &RootedTree<'_>, o: &Orientation) -> StarPacking {
    let g = t.graph();
    let mut stars = Vec::new();
    for v in 0..g.vertex_count() {
        let k = g.neighbors(v).iter().map(|&u| o.out(v, u)).max().unwrap_or(0);
        for level in 1..=k {
            let leaves: Vec<usize> = g.neighbors(v).iter().copied().filter(|&u| o.out(v, u) >= level).collect();
            stars.push(Star { center: v, leaves, index: stars.len() });
        }
    }
    StarPacking { stars }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PackingReport {
    pub c: u64,
    /// `(u, v, count)` in edge order.
    pub edges: Vec<(String, String, u64)>,
    /// `(v, count)` in vertex order.
    pub vertices: Vec<(String, u64)>,
    pub pass: bool,
}

impl PackingReport {
    pub fn max_vertex_count(&self) -> u64 {
        self.vertices.iter().map(|(_, k)| *k).max().unwrap_or(0)
    }
}

impl fmt::Display for PackingReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (u, v, k) in &self.edges {
            writeln!(f, "edge {u} {v} count {k}")?;
        }
        for (v, k) in &self.vertices {
            writeln!(f, "vertex {v} count {k}")?;
        }
        f.write_str(if self.pass { "PASS" } else { "FAIL" })
    }
}

/// Checks that every edge lies in exactly `c` stars and every vertex in at
/// most `2c - 1`.
pub fn verify_packing(g: &Graph, p: &StarPacking, c: u64) -> Result<PackingReport, StarError> {
    for s in &p.stars {
        if let Some(&l) = s.leaves.iter().find(|&&l| !g.has_edge(s.center, l)) {
            return Err(StarError::NotAnEdge {
                star: s.index,
                u: g.name(s.center).to_string(),
                v: g.name(l).to_string(),
            });
        }
    }
    let edge_counts = p.edge_counts(g);
    let vertex_counts = p.vertex_counts(g.vertex_count());
    let bound = 2 * c - 1;
    let pass = c >= 1 && edge_counts.iter().all(|&k| k == c) && vertex_counts.iter().all(|&k| k <= bound);
    Ok(PackingReport {
        c,
        edges: g
            .edges()
            .iter()
            .zip(&edge_counts)
            .map(|(&(u, v), &k)| (g.name(u).to_string(), g.name(v).to_string(), k))
            .collect(),
        vertices: vertex_counts.iter().enumerate().map(|(v, &k)| (g.name(v).to_string(), k)).collect(),
        pass,
    })
}

/// A star with a fractional weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedStar {
    pub center: usize,
    pub leaves: Vec<usize>,
    pub weight: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StarCoverResult {
    /// The star cover rate.
    pub value: Rational,
    /// `x[i] = (x_{u,e}, x_{v,e})` for the `i`-th edge `e = (u, v)`.
    pub x: Vec<(Rational, Rational)>,
    pub y: Vec<Rational>,
    /// A fractional star packing realising `value`.
    pub stars: Vec<WeightedStar>,
}

impl StarCoverResult {
    pub fn vertex_weights(&self, n: usize) -> Vec<Rational> {
        let mut w = vec![Rational::zero(); n];
        for s in &self.stars {
            w[s.center] += &s.weight;
            for &l in &s.leaves {
                w[l] += &s.weight;
            }
        }
        w
    }

    /// Star weight on each edge, in the graph's edge order.
    pub fn edge_weights(&self, g: &Graph) -> Vec<Rational> {
        let mut w: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
        for s in &self.stars {
            for &l in &s.leaves {
                *w.entry((s.center.min(l), s.center.max(l))).or_insert_with(Rational::zero) += &s.weight;
            }
        }
        g.edges().iter().map(|&(u, v)| w.get(&(u.min(v), u.max(v))).cloned().unwrap_or_else(Rational::zero)).collect()
    }
}

/// Star cover rate of `g` by the compact LP
///
/// ```text
/// min t  s.t.  x_{u,e} + x_{v,e} >= 1        for every edge e = uv
///              y_v >= x_{v,e}                for every e containing v
///              t >= y_v + sum_{e=uv} x_{u,e} for every v
/// ```
///
/// `y_v` is the total weight of stars centered at `v` and `x_{v,e}` the part
/// of it covering `e`. The optimum is turned back into explicit weighted
/// stars by sweeping thresholds over each center's sorted `x` values.
pub fn star_cover_rate_lp(g: &Graph) -> Result<StarCoverResult, StarError> {
    if g.edge_count() == 0 {
        return Err(StarError::NoEdges);
    }
    let n = g.vertex_count();
    let one = Rational::one;
    let mut lp = LinearProgram::new();
    let t = lp.add_var("t");
    let y: Vec<usize> = (0..n).map(|v| lp.add_var(format!("y[{}]", g.name(v)))).collect();
    let x: Vec<(usize, usize)> = g
        .edges()
        .iter()
        .map(|&(u, v)| {
            let xu = lp.add_var(format!("x[{},{}{}]", g.name(u), g.name(u), g.name(v)));
            let xv = lp.add_var(format!("x[{},{}{}]", g.name(v), g.name(u), g.name(v)));
            (xu, xv)
        })
        .collect();

    let mut incoming: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, &(u, v)) in g.edges().iter().enumerate() {
        let (xu, xv) = x[i];
        lp.add_constraint(vec![(xu, one()), (xv, one())], Relation::Ge, one());
        lp.add_constraint(vec![(y[u], one()), (xu, -one())], Relation::Ge, Rational::zero());
        lp.add_constraint(vec![(y[v], one()), (xv, -one())], Relation::Ge, Rational::zero());
        incoming[v].push(xu);
        incoming[u].push(xv);
    }
    for v in 0..n {
        let mut coeffs = vec![(t, one()), (y[v], -one())];
        coeffs.extend(incoming[v].iter().map(|&xu| (xu, -one())));
        lp.add_constraint(coeffs, Relation::Ge, Rational::zero());
    }
    lp.minimize(vec![(t, one())]);

    let opt = match solve_min(&lp)? {
        LpOutcome::Optimal(opt) => opt,
        LpOutcome::Infeasible => return Err(StarError::LpAnomaly("infeasible")),
        LpOutcome::Unbounded => return Err(StarError::LpAnomaly("unbounded")),
    };
    let a = &opt.assignment;
    let xs: Vec<(Rational, Rational)> = x.iter().map(|&(xu, xv)| (a[xu].clone(), a[xv].clone())).collect();
    let ys: Vec<Rational> = y.iter().map(|&yv| a[yv].clone()).collect();

    // per center: neighbor and its x value
    let mut hosted: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); n];
    for (i, &(u, v)) in g.edges().iter().enumerate() {
        hosted[u].push((v, xs[i].0.clone()));
        hosted[v].push((u, xs[i].1.clone()));
    }
    let mut stars = Vec::new();
    for (center, list) in hosted.iter_mut().enumerate() {
        list.sort_by_key(|a| a.0);
        let mut levels: Vec<Rational> = list.iter().map(|(_, x)| x.clone()).filter(|x| !x.is_zero()).collect();
        levels.sort();
        levels.dedup();
        let mut below = Rational::zero();
        for level in levels {
            let leaves: Vec<usize> = list.iter().filter(|(_, x)| *x >= level).map(|(u, _)| *u).collect();
            stars.push(WeightedStar { center, leaves, weight: &level - &below });
            below = level;
        }
    }

    Ok(StarCoverResult { value: opt.value, x: xs, y: ys, stars })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core_analysis::maximalize_weights;
    use crate::graph::{parse_graph, root_at, RootChoice};

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn p4() -> Graph {
        parse_graph("a b\nb c\nc d").unwrap()
    }

    #[test]
    fn p4_orientation_and_stars() {
        let g = p4();
        let t = root_at(&g, RootChoice::Vertex(1)).unwrap();
        let w = WeightFunction::new(vec![2, 1, 1, 2]).unwrap();
        let o = orient_edges(&t, &w, 2).unwrap();
        let expected = [((0, 1), 0), ((1, 0), 2), ((2, 1), 1), ((1, 2), 1), ((3, 2), 0), ((2, 3), 2)];
        for ((u, v), k) in expected {
            assert_eq!(o.out(u, v), k, "out({u},{v})");
        }

        let p = extract_stars(&t, &o);
        let shape: Vec<(usize, Vec<usize>)> = p.stars.iter().map(|s| (s.center, s.leaves.clone())).collect();
        assert_eq!(shape, vec![(1, vec![0, 2]), (1, vec![0]), (2, vec![1, 3]), (2, vec![3])]);

        let report = verify_packing(&g, &p, 2).unwrap();
        assert!(report.pass);
        assert_eq!(report.max_vertex_count(), 3);

        let mut broken = p.clone();
        broken.stars.remove(1);
        let report = verify_packing(&g, &broken, 2).unwrap();
        assert!(!report.pass);
        assert_eq!(report.edges[0], ("a".into(), "b".into(), 1));
    }

    #[test]
    fn p2_and_star_orientations() {
        let p2 = parse_graph("a b").unwrap();
        let t = root_at(&p2, RootChoice::Auto).unwrap();
        let o = orient_edges(&t, &WeightFunction::unit(2), 1).unwrap();
        assert_eq!((o.out(1, 0), o.out(0, 1)), (0, 1));

        let k13 = parse_graph("o x\no y\no z").unwrap();
        let t = root_at(&k13, RootChoice::Auto).unwrap();
        let o = orient_edges(&t, &WeightFunction::unit(4), 1).unwrap();
        let p = extract_stars(&t, &o);
        assert_eq!(p.stars, vec![Star { center: 0, leaves: vec![1, 2, 3], index: 0 }]);
    }

    #[test]
    fn orientation_preconditions() {
        let g = p4();
        let t = root_at(&g, RootChoice::Vertex(1)).unwrap();
        assert_eq!(orient_edges(&t, &WeightFunction::unit(4), 2), Err(StarError::NotMaximal(2)));
        let leaf_rooted = root_at(&g, RootChoice::Vertex(0)).unwrap();
        let w = maximalize_weights(&g, 2).unwrap();
        assert!(matches!(orient_edges(&leaf_rooted, &w, 2), Err(StarError::LeafRoot(_))));
    }

    #[test]
    fn packing_rejects_non_edges() {
        let g = p4();
        let p = StarPacking { stars: vec![Star { center: 0, leaves: vec![2], index: 0 }] };
        assert!(matches!(verify_packing(&g, &p, 1), Err(StarError::NotAnEdge { .. })));
    }

    #[test]
    fn packing_report_text() {
        let g = parse_graph("a b").unwrap();
        let p = StarPacking { stars: vec![Star { center: 0, leaves: vec![1], index: 0 }] };
        let text = verify_packing(&g, &p, 1).unwrap().to_string();
        assert_eq!(text, "edge a b count 1\nvertex a count 1\nvertex b count 1\nPASS");
    }

    #[test]
    fn star_cover_small_values() {
        let delta = parse_graph("a b\nb c\na d\nb d").unwrap();
        assert_eq!(star_cover_rate_lp(&delta).unwrap().value, q(5, 3));
        assert_eq!(star_cover_rate_lp(&p4()).unwrap().value, q(3, 2));
        let c3 = parse_graph("a b\nb c\nc a").unwrap();
        assert_eq!(star_cover_rate_lp(&c3).unwrap().value, q(3, 2));
        assert_eq!(star_cover_rate_lp(&parse_graph("weight a 1").unwrap()), Err(StarError::NoEdges));
    }

    #[test]
    fn decomposed_stars_certify_the_value() {
        let delta = parse_graph("a b\nb c\na d\nb d").unwrap();
        let res = star_cover_rate_lp(&delta).unwrap();
        let vmax = res.vertex_weights(4).into_iter().max().unwrap();
        assert_eq!(vmax, res.value);
        assert!(res.edge_weights(&delta).iter().all(|w| *w >= Rational::one()));
        assert!(res.stars.iter().all(|s| !s.leaves.is_empty() && s.weight > Rational::zero()));
    }
}
