//! Correctness and privacy checks, by rank computations and by enumeration.

use std::collections::HashMap;
use std::fmt;

use super::{Scheme, SchemeError};
use crate::field::{FieldElement, FieldMatrix};
use crate::graph::Graph;

/// Largest graph whose maximal independent sets are enumerated.
pub const MIS_CAP: usize = 24;

/// Default bound on `p^(c+m)` for [`verify_exhaustive`].
pub const DEFAULT_EXHAUSTIVE_LIMIT: u128 = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckKind {
    /// The two ends of an edge determine the secret.
    Correctness,
    /// A maximal independent set learns nothing about the secret.
    Privacy,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckResult {
    pub kind: CheckKind,
    pub vertices: Vec<String>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn count(&self, kind: CheckKind) -> usize {
        self.checks.iter().filter(|c| c.kind == kind).count()
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let (label, sep) = match c.kind {
                CheckKind::Correctness => ("edge", " "),
                CheckKind::Privacy => ("independent", ","),
            };
            let verdict = if c.pass { "PASS" } else { "FAIL" };
            writeln!(f, "{label} {} {verdict}", c.vertices.join(sep))?;
        }
        writeln!(f, "{}", if self.pass() { "PASS" } else { "FAIL" })
    }
}

/// All maximal independent sets, each sorted, in lexicographic order.
pub fn max_independent_sets(g: &Graph) -> Result<Vec<Vec<usize>>, SchemeError> {
    let n = g.vertex_count();
    if n > MIS_CAP {
        return Err(SchemeError::TooManyVertices { n, cap: MIS_CAP });
    }
    let adj = g.adjacency_masks();
    let mut out = Vec::new();
    // Vertices are decided in index order, inclusion first, which emits the
    // sets in lexicographic order. An excluded vertex must end up dominated.
    fn walk(v: usize, n: usize, adj: &[u64], chosen: u64, excluded: u64, out: &mut Vec<Vec<usize>>) {
        // a vertex excluded below `v` whose neighbours are all decided and unchosen can never be dominated
        let decided = (1u64 << v) - 1;
        let stranded = (0..v).any(|x| excluded >> x & 1 == 1 && adj[x] & chosen == 0 && adj[x] & !decided == 0);
        if stranded {
            return;
        }
        if v == n {
            out.push((0..n).filter(|&x| chosen >> x & 1 == 1).collect());
            return;
        }
        if adj[v] & chosen == 0 {
            walk(v + 1, n, adj, chosen | 1 << v, excluded, out);
            walk(v + 1, n, adj, chosen, excluded | 1 << v, out);
        } else {
            walk(v + 1, n, adj, chosen, excluded, out);
        }
    }
    walk(0, n, &adj, 0, 0, &mut out);
    Ok(out)
}

fn names(g: &Graph, vs: &[usize]) -> Vec<String> {
    vs.iter().map(|&v| g.name(v).to_string()).collect()
}

/// Rank checks on explicit share matrices over the columns
/// `(s_0, ..., s_{c-1}, r_0, ...)`, one matrix per vertex of `tree`.
///
/// Correctness: each `e_i || 0` lies in the row space of `M_u` over `M_v`.
/// Privacy: for the stacked `M_A` of a maximal independent set, the secret
/// columns lie in the span of the randomness columns.
pub fn verify_matrices(tree: &Graph, c: usize, matrices: &[FieldMatrix]) -> Result<VerifyReport, SchemeError> {
    let mut report = VerifyReport::default();
    for &(u, v) in tree.edges() {
        let stacked = matrices[u].stack(&matrices[v])?;
        let width = stacked.col_count();
        let mut pass = true;
        for i in 0..c {
            let mut unit = vec![0; width];
            unit[i] = 1;
            pass &= stacked.rowspace_contains(&unit)?;
        }
        report.checks.push(CheckResult { kind: CheckKind::Correctness, vertices: names(tree, &[u, v]), pass });
    }
    for set in max_independent_sets(tree)? {
        let mut stacked = matrices[set[0]].clone();
        for &v in &set[1..] {
            stacked = stacked.stack(&matrices[v])?;
        }
        let randomness = stacked.columns(c..stacked.col_count());
        let pass = stacked.rank() == randomness.rank();
        report.checks.push(CheckResult { kind: CheckKind::Privacy, vertices: names(tree, &set), pass });
    }
    Ok(report)
}

/// [`verify_matrices`] on the scheme's own matrices.
pub fn verify_linear(sch: &Scheme) -> Result<VerifyReport, SchemeError> {
    verify_matrices(sch.tree(), sch.c() as usize, &sch.emit_matrices())
}

/// Visits every vector of `len` entries below `p` in lexicographic order.
fn for_each_vector(p: u64, len: usize, mut visit: impl FnMut(&[FieldElement])) {
    let mut v = vec![0; len];
    loop {
        visit(&v);
        let Some(i) = (0..len).rev().find(|&i| v[i] + 1 < p) else {
            return;
        };
        v[i] += 1;
        for x in &mut v[i + 1..] {
            *x = 0;
        }
    }
}

/// Deals every `(s, r)` and checks that every edge reconstructs `s` and that
/// the joint shares of every maximal independent set have the same
/// multiset of values under every secret.
pub fn verify_exhaustive(sch: &Scheme, limit: u128) -> Result<VerifyReport, SchemeError> {
    let p = sch.prime();
    let c = sch.c() as usize;
    let m = sch.star_count();
    let needed = (p as u128).checked_pow((c + m) as u32).unwrap_or(u128::MAX);
    if needed > limit {
        return Err(SchemeError::LimitExceeded { needed, limit });
    }
    let tree = sch.tree();
    let edges = tree.edges();
    let sets = max_independent_sets(tree)?;
    let mut edge_ok = vec![true; edges.len()];
    // per set, per secret: multiset of joint share vectors
    let mut views: Vec<Vec<HashMap<Vec<FieldElement>, u64>>> = vec![Vec::new(); sets.len()];
    let mut failure: Option<SchemeError> = None;
    for_each_vector(p, c, |secret| {
        let mut counts = vec![HashMap::new(); sets.len()];
        for_each_vector(p, m, |randomness| {
            if failure.is_some() {
                return;
            }
            let shares = match sch.deal(secret, randomness) {
                Ok(s) => s,
                Err(e) => {
                    failure = Some(e);
                    return;
                }
            };
            for (ok, &(u, v)) in edge_ok.iter_mut().zip(edges) {
                *ok &= sch.reconstruct(u, v, &shares[u], &shares[v]).as_deref() == Ok(secret);
            }
            for (count, set) in counts.iter_mut().zip(&sets) {
                let joint: Vec<FieldElement> = set.iter().flat_map(|&v| shares[v].iter().copied()).collect();
                *count.entry(joint).or_insert(0u64) += 1;
            }
        });
        for (view, count) in views.iter_mut().zip(counts) {
            view.push(count);
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    let mut report = VerifyReport::default();
    for (&(u, v), pass) in edges.iter().zip(edge_ok) {
        report.checks.push(CheckResult { kind: CheckKind::Correctness, vertices: names(tree, &[u, v]), pass });
    }
    for (set, view) in sets.iter().zip(&views) {
        let pass = view.iter().all(|d| d == &view[0]);
        report.checks.push(CheckResult { kind: CheckKind::Privacy, vertices: names(tree, set), pass });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_graph;
    use crate::scheme::build_scheme;

    fn sets(text: &str) -> Vec<Vec<String>> {
        let g = parse_graph(text).unwrap();
        max_independent_sets(&g).unwrap().iter().map(|s| names(&g, s)).collect()
    }

    #[test]
    fn independent_sets() {
        assert_eq!(sets("a b\nb c\nc d"), vec![vec!["a", "c"], vec!["a", "d"], vec!["b", "d"]]);
        assert_eq!(sets("a b\nb c\na d\nb d"), vec![vec!["a", "c"], vec!["b"], vec!["c", "d"]]);
        assert_eq!(sets("o x\no y\no z"), vec![vec!["o"], vec!["x", "y", "z"]]);
    }

    #[test]
    fn p4_linear_checks() {
        let sch = build_scheme(&parse_graph("a b\nb c\nc d").unwrap(), None, None).unwrap();
        let report = verify_linear(&sch).unwrap();
        assert!(report.pass(), "{report}");
        assert_eq!(report.count(CheckKind::Correctness), 3);
        assert_eq!(report.count(CheckKind::Privacy), 3);
    }

    #[test]
    fn missing_star_breaks_correctness() {
        let sch = build_scheme(&parse_graph("a b\nb c\nc d").unwrap(), None, None).unwrap();
        let c = sch.c() as usize;
        // drop every row belonging to the second star
        let matrices: Vec<FieldMatrix> = sch
            .emit_matrices()
            .iter()
            .map(|mat| {
                let rows: Vec<Vec<u64>> = mat.rows().filter(|r| r[c + 1] == 0).map(<[u64]>::to_vec).collect();
                FieldMatrix::from_rows(mat.field(), mat.col_count(), &rows).unwrap()
            })
            .collect();
        let report = verify_matrices(sch.tree(), c, &matrices).unwrap();
        let failed: Vec<Vec<String>> = report.failures().map(|f| f.vertices.clone()).collect();
        assert_eq!(failed, vec![vec!["a".to_string(), "b".to_string()]]);
    }

    #[test]
    fn unmasked_piece_breaks_privacy() {
        let sch = build_scheme(&parse_graph("a b\nb c\nc d").unwrap(), None, None).unwrap();
        let mut matrices = sch.emit_matrices();
        matrices[0].set(0, 2, 0).unwrap();
        let report = verify_matrices(sch.tree(), 2, &matrices).unwrap();
        let failed: Vec<Vec<String>> = report.failures().map(|f| f.vertices.clone()).collect();
        assert_eq!(failed, vec![vec!["a".to_string(), "c".to_string()], vec!["a".to_string(), "d".to_string()]]);
        assert!(report.failures().all(|f| f.kind == CheckKind::Privacy));
    }

    #[test]
    fn exhaustive_small_schemes() {
        for text in ["a b", "o x\no y\no z", "a b\nb c\nc d"] {
            let sch = build_scheme(&parse_graph(text).unwrap(), None, None).unwrap();
            let report = verify_exhaustive(&sch, DEFAULT_EXHAUSTIVE_LIMIT).unwrap();
            assert!(report.pass(), "{text}: {report}");
        }
    }

    #[test]
    fn exhaustive_limit() {
        let sch = build_scheme(&parse_graph("a b\nb c\nc d").unwrap(), None, None).unwrap();
        assert_eq!(verify_exhaustive(&sch, 100), Err(SchemeError::LimitExceeded { needed: 15625, limit: 100 }));
    }

    #[test]
    fn report_text() {
        let sch = build_scheme(&parse_graph("a b").unwrap(), None, None).unwrap();
        let text = verify_linear(&sch).unwrap().to_string();
        assert_eq!(text, "edge a b PASS\nindependent a PASS\nindependent b PASS\nPASS\n");
    }
}
