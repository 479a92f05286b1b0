//! Dense fraction-free simplex.
//!
//! The tableau stores `d * B^-1 [A | b]` as integers, where `d` is the
//! absolute determinant of the current basis. A pivot on `p = T[r][s]`
//! updates every other row as `(p * T[i] - T[i][s] * T[r]) / d`, a division
//! that is always exact, and then sets `d = p`. No gcd work is needed and
//! entries stay as small as the basis minors allow.

use num_bigint::BigInt;
use num_traits::Zero;

use super::scalar::PivotInt;
use super::Relation;
use crate::Rational;

/// Consecutive degenerate pivots tolerated before switching to Bland's rule.
const STALL_LIMIT: usize = 50;

#[derive(Debug, Clone)]
pub(crate) struct IntRow {
    pub coeffs: Vec<(usize, BigInt)>,
    pub relation: Relation,
    pub rhs: BigInt,
}

/// `maximize objective . x` subject to `rows`, `x >= 0`, all data integral.
#[derive(Debug, Clone)]
pub(crate) struct IntProblem {
    pub ncols: usize,
    pub rows: Vec<IntRow>,
    pub objective: Vec<(usize, BigInt)>,
}

#[derive(Debug, Clone)]
pub(crate) enum EngineOutcome {
    Optimal { primal: Vec<Rational> },
    Infeasible,
    Unbounded,
}

#[derive(Debug)]
pub(crate) struct Overflow;

/// Solves with `i64` pivots, widening to `i128` and then `BigInt` on overflow.
pub(crate) fn solve(problem: &IntProblem) -> EngineOutcome {
    if let Ok(out) = solve_with::<i64>(problem) {
        return out;
    }
    if let Ok(out) = solve_with::<i128>(problem) {
        return out;
    }
    solve_with::<BigInt>(problem).expect("arbitrary precision pivoting cannot overflow")
}

fn mul<T: PivotInt>(a: &T, b: &T) -> Result<T, Overflow> {
    a.checked_mul(b).ok_or(Overflow)
}

fn sub<T: PivotInt>(a: &T, b: &T) -> Result<T, Overflow> {
    a.checked_sub(b).ok_or(Overflow)
}

fn div<T: PivotInt>(a: &T, b: &T::Divisor) -> Result<T, Overflow> {
    a.exact_quotient(b).ok_or(Overflow)
}

fn lift<T: PivotInt>(v: &BigInt) -> Result<T, Overflow> {
    T::from_bigint(v).ok_or(Overflow)
}

struct Tableau<T> {
    width: usize,
    m: usize,
    /// `(m + 1) * width` entries; row `m` is the objective row.
    data: Vec<T>,
    basis: Vec<usize>,
    det: T,
    ncols: usize,
    art_start: usize,
    rhs: usize,
}

enum Phase {
    Optimal,
    Unbounded,
}

pub(crate) fn solve_with<T: PivotInt>(problem: &IntProblem) -> Result<EngineOutcome, Overflow> {
    let mut tab = Tableau::<T>::build(problem)?;
    let has_artificials = tab.art_start < tab.rhs;
    if has_artificials {
        tab.phase_one_objective()?;
        match tab.run(tab.rhs)? {
            Phase::Optimal => {}
            Phase::Unbounded => unreachable!("phase one objective is bounded by zero"),
        }
        if !tab.at(tab.m, tab.rhs).is_zero() {
            return Ok(EngineOutcome::Infeasible);
        }
        tab.drive_out_artificials()?;
    }
    tab.phase_two_objective(problem)?;
    match tab.run(tab.art_start)? {
        Phase::Unbounded => Ok(EngineOutcome::Unbounded),
        Phase::Optimal => Ok(tab.extract()),
    }
}

impl<T: PivotInt> Tableau<T> {
    fn build(problem: &IntProblem) -> Result<Self, Overflow> {
        let m = problem.rows.len();
        let n = problem.ncols;
        let n_aux = problem.rows.iter().filter(|r| r.relation != Relation::Eq).count();

        // Normalise right-hand sides to be non-negative and decide which rows
        // need an artificial variable for the initial identity basis.
        let mut negated = vec![false; m];
        let mut needs_art = vec![false; m];
        let mut aux = vec![None; m];
        let mut next_aux = n;
        for (i, row) in problem.rows.iter().enumerate() {
            negated[i] = row.rhs < BigInt::zero();
            let sign: i8 = match row.relation {
                Relation::Le => 1,
                Relation::Ge => -1,
                Relation::Eq => 0,
            };
            if sign != 0 {
                aux[i] = Some((next_aux, sign));
                next_aux += 1;
            }
            let effective = if negated[i] { -sign } else { sign };
            needs_art[i] = effective != 1;
        }
        let n_art = needs_art.iter().filter(|&&b| b).count();
        let art_start = n + n_aux;
        let rhs = art_start + n_art;
        let width = rhs + 1;

        let mut data = vec![T::zero(); (m + 1) * width];
        let mut basis = vec![0; m];
        let mut next_art = art_start;
        for (i, row) in problem.rows.iter().enumerate() {
            let flip = |v: T| if negated[i] { -v } else { v };
            let base = i * width;
            for (j, a) in &row.coeffs {
                data[base + j] = flip(lift(a)?);
            }
            data[base + rhs] = flip(lift(&row.rhs)?);
            if let Some((col, sign)) = aux[i] {
                data[base + col] = flip(if sign > 0 { T::one() } else { -T::one() });
                basis[i] = col;
            }
            if needs_art[i] {
                data[base + next_art] = T::one();
                basis[i] = next_art;
                next_art += 1;
            }
        }

        Ok(Tableau { width, m, data, basis, det: T::one(), ncols: n, art_start, rhs })
    }

    fn at(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.width + j]
    }

    fn phase_one_objective(&mut self) -> Result<(), Overflow> {
        let w = self.width;
        let z = self.m * w;
        for j in 0..w {
            self.data[z + j] = T::zero();
        }
        for i in 0..self.m {
            if self.basis[i] >= self.art_start {
                for j in 0..w {
                    if j >= self.art_start && j < self.rhs {
                        continue;
                    }
                    let v = sub(&self.data[z + j], &self.data[i * w + j])?;
                    self.data[z + j] = v;
                }
            }
        }
        Ok(())
    }

    fn phase_two_objective(&mut self, problem: &IntProblem) -> Result<(), Overflow> {
        let w = self.width;
        let z = self.m * w;
        let mut cost = vec![T::zero(); self.ncols];
        for (j, c) in &problem.objective {
            cost[*j] = lift(c)?;
        }
        for j in 0..w {
            self.data[z + j] = T::zero();
        }
        for (j, c) in cost.iter().enumerate() {
            self.data[z + j] = -mul(&self.det, c)?;
        }
        for i in 0..self.m {
            let b = self.basis[i];
            if b < self.ncols && !cost[b].is_zero() {
                for j in 0..w {
                    let term = mul(&cost[b], &self.data[i * w + j])?;
                    let v = self.data[z + j].checked_add(&term).ok_or(Overflow)?;
                    self.data[z + j] = v;
                }
            }
        }
        Ok(())
    }

    /// Primal simplex on the current objective row; columns `>= limit` never enter.
    fn run(&mut self, limit: usize) -> Result<Phase, Overflow> {
        let z = self.m * self.width;
        let mut bland = false;
        let mut stalled = 0;
        loop {
            let entering =
                if bland { (0..limit).find(|&j| self.data[z + j].is_negative()) } else { self.steepest_edge(limit) };
            let Some(s) = entering else {
                return Ok(Phase::Optimal);
            };
            let Some(r) = self.ratio_test(s)? else {
                return Ok(Phase::Unbounded);
            };
            // Bland's rule bounds every run of degenerate pivots and each
            // other pivot improves the objective, so the loop terminates.
            if self.at(r, self.rhs).is_zero() {
                stalled += 1;
                bland |= stalled > STALL_LIMIT;
            } else {
                stalled = 0;
                bland = false;
            }
            self.pivot(r, s)?;
        }
    }

    /// Entering column with the most negative reduced cost per unit length
    /// of its tableau column. Floating point only ranks candidates.
    fn steepest_edge(&self, limit: usize) -> Option<usize> {
        let z = self.m * self.width;
        let candidates: Vec<usize> = (0..limit).filter(|&j| self.data[z + j].is_negative()).collect();
        if candidates.is_empty() {
            return None;
        }
        let d = self.det.to_f64().unwrap_or(f64::MAX);
        let mut norms = vec![d * d; candidates.len()];
        for i in 0..self.m {
            let row = &self.data[i * self.width..];
            for (norm, &j) in norms.iter_mut().zip(&candidates) {
                if !row[j].is_zero() {
                    let v = row[j].to_f64().unwrap_or(f64::MAX);
                    *norm += v * v;
                }
            }
        }
        let mut best = candidates[0];
        let mut best_score = f64::NEG_INFINITY;
        for (&j, norm) in candidates.iter().zip(&norms) {
            let r = self.data[z + j].to_f64().unwrap_or(f64::MIN);
            let score = r * r / norm;
            if score > best_score {
                best = j;
                best_score = score;
            }
        }
        Some(best)
    }

    /// Minimum ratio row, ties broken by the smallest basic variable.
    fn ratio_test(&self, s: usize) -> Result<Option<usize>, Overflow> {
        let mut best: Option<usize> = None;
        for i in 0..self.m {
            let a = self.at(i, s);
            if !a.is_positive() {
                continue;
            }
            match best {
                None => best = Some(i),
                Some(k) => {
                    let lhs = mul(self.at(i, self.rhs), self.at(k, s))?;
                    let rhs = mul(self.at(k, self.rhs), a)?;
                    if lhs < rhs || (lhs == rhs && self.basis[i] < self.basis[k]) {
                        best = Some(i);
                    }
                }
            }
        }
        Ok(best)
    }

    fn pivot(&mut self, r: usize, s: usize) -> Result<(), Overflow> {
        let w = self.width;
        let p = self.at(r, s).clone();
        let d = self.det.clone();
        let dv = T::divisor(&d);
        let pivot_row: Vec<T> = self.data[r * w..(r + 1) * w].to_vec();
        for i in 0..=self.m {
            if i == r {
                continue;
            }
            let row = &mut self.data[i * w..(i + 1) * w];
            let a = row[s].clone();
            if a.is_zero() {
                if p != d {
                    for x in row.iter_mut().filter(|x| !x.is_zero()) {
                        *x = div(&mul(x, &p)?, &dv)?;
                    }
                }
                continue;
            }
            for (x, pr) in row.iter_mut().zip(&pivot_row) {
                if pr.is_zero() {
                    if !x.is_zero() && p != d {
                        *x = div(&mul(x, &p)?, &dv)?;
                    }
                } else {
                    let scaled = if x.is_zero() { T::zero() } else { mul(x, &p)? };
                    *x = div(&sub(&scaled, &mul(&a, pr)?)?, &dv)?;
                }
            }
        }
        self.basis[r] = s;
        self.det = p;
        if self.det.is_negative() {
            for x in self.data.iter_mut() {
                *x = -x.clone();
            }
            self.det = -self.det.clone();
        }
        Ok(())
    }

    fn drive_out_artificials(&mut self) -> Result<(), Overflow> {
        for i in 0..self.m {
            if self.basis[i] < self.art_start {
                continue;
            }
            // rows with no structural or auxiliary entry are redundant and stay put
            if let Some(j) = (0..self.art_start).find(|&j| !self.at(i, j).is_zero()) {
                self.pivot(i, j)?;
            }
        }
        Ok(())
    }

    fn extract(&self) -> EngineOutcome {
        let det = self.det.to_bigint();
        let ratio = |v: &T| Rational::new(v.to_bigint(), det.clone());
        let mut primal = vec![Rational::zero(); self.ncols];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < self.ncols {
                primal[b] = ratio(self.at(i, self.rhs));
            }
        }
        debug_assert!(self.det >= T::one());
        EngineOutcome::Optimal { primal }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(coeffs: &[(usize, i64)], relation: Relation, rhs: i64) -> IntRow {
        IntRow { coeffs: coeffs.iter().map(|&(j, a)| (j, BigInt::from(a))).collect(), relation, rhs: BigInt::from(rhs) }
    }

    fn optimum(out: EngineOutcome) -> Vec<Rational> {
        match out {
            EngineOutcome::Optimal { primal } => primal,
            other => panic!("expected optimum, got {other:?}"),
        }
    }

    #[test]
    fn textbook_max() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18  ->  (2, 6)
        let p = IntProblem {
            ncols: 2,
            rows: vec![
                row(&[(0, 1)], Relation::Le, 4),
                row(&[(1, 2)], Relation::Le, 12),
                row(&[(0, 3), (1, 2)], Relation::Le, 18),
            ],
            objective: vec![(0, BigInt::from(3)), (1, BigInt::from(5))],
        };
        for out in [solve_with::<i64>(&p).unwrap(), solve_with::<BigInt>(&p).unwrap()] {
            let x = optimum(out);
            assert_eq!(x, vec![Rational::from_integer(2.into()), Rational::from_integer(6.into())]);
        }
    }

    #[test]
    fn phase_one_detects_infeasibility() {
        let p = IntProblem { ncols: 1, rows: vec![row(&[(0, 1)], Relation::Le, -1)], objective: vec![] };
        assert!(matches!(solve(&p), EngineOutcome::Infeasible));
    }

    #[test]
    fn unbounded_direction() {
        let p = IntProblem {
            ncols: 2,
            rows: vec![row(&[(0, 1), (1, -1)], Relation::Le, 1)],
            objective: vec![(1, BigInt::from(1))],
        };
        assert!(matches!(solve(&p), EngineOutcome::Unbounded));
    }

    #[test]
    fn equality_and_redundant_rows() {
        // x + y = 2, 2x + 2y = 4, max x  ->  x = 2
        let p = IntProblem {
            ncols: 2,
            rows: vec![row(&[(0, 1), (1, 1)], Relation::Eq, 2), row(&[(0, 2), (1, 2)], Relation::Eq, 4)],
            objective: vec![(0, BigInt::from(1))],
        };
        let x = optimum(solve(&p));
        assert_eq!(x[0], Rational::from_integer(2.into()));
        assert_eq!(x[1], Rational::zero());
    }

    #[test]
    fn overflow_escalates() {
        let big = i64::MAX / 3;
        let p = IntProblem {
            ncols: 2,
            rows: vec![row(&[(0, big), (1, 7)], Relation::Le, big), row(&[(0, 5), (1, big)], Relation::Le, big)],
            objective: vec![(0, BigInt::from(1)), (1, BigInt::from(1))],
        };
        assert!(solve_with::<i64>(&p).is_err());
        let wide = optimum(solve(&p));
        let exact = optimum(solve_with::<BigInt>(&p).unwrap());
        assert_eq!(wide, exact);
    }
}
