//! Column-oriented fraction-free simplex for packing programs
//! `max c . y, A y <= b, y >= 0` with `b >= 0`.
//!
//! The slack basis is feasible, so there is no phase one, and the slack
//! block of the tableau always equals `d * B^-1`. Columns that are not in
//! the tableau are priced exactly from their sparse data through that block
//! and materialised only when they can improve the objective, so a program
//! with many more columns than rows is solved on a narrow tableau.
//!
//! Entering columns are chosen by steepest edge among the materialised
//! columns; the leaving row is chosen by the lexicographic ratio test over
//! the slack block, which rules out cycling whatever the entering choice.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::scalar::PivotInt;
use super::tableau::Overflow;
use crate::Rational;

#[derive(Debug, Clone)]
pub(crate) struct PackingColumn {
    pub entries: Vec<(usize, BigInt)>,
    pub cost: BigInt,
}

#[derive(Debug, Clone)]
pub(crate) struct PackingProblem {
    /// Row bounds, all non-negative.
    pub rhs: Vec<BigInt>,
    pub columns: Vec<PackingColumn>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum PackingOutcome {
    Optimal {
        value: Rational,
        /// Value of every problem column.
        y: Vec<Rational>,
        /// Multiplier of every row.
        row_duals: Vec<Rational>,
    },
    Unbounded,
}

/// Solves with `i64` pivots, widening to `i128` and then `BigInt` on overflow.
/// Columns flagged in `initial` start in the tableau; up to `batch` improving
/// columns are added whenever the tableau is optimal over its own columns.
pub(crate) fn solve_packing(problem: &PackingProblem, initial: &[bool], batch: usize) -> PackingOutcome {
    if let Ok(out) = solve_packing_with::<i64>(problem, initial, batch) {
        return out;
    }
    if let Ok(out) = solve_packing_with::<i128>(problem, initial, batch) {
        return out;
    }
    solve_packing_with::<BigInt>(problem, initial, batch).expect("arbitrary precision pivoting cannot overflow")
}

pub(crate) fn solve_packing_with<T: PivotInt>(
    problem: &PackingProblem,
    initial: &[bool],
    batch: usize,
) -> Result<PackingOutcome, Overflow> {
    debug_assert!(problem.rhs.iter().all(|b| !b.is_negative()));
    let mut tab = ColumnTableau::<T>::new(problem)?;
    let seed: Vec<usize> = (0..problem.columns.len()).filter(|&j| initial.get(j).copied().unwrap_or(false)).collect();
    tab.materialise(&seed)?;
    loop {
        match tab.entering() {
            Some(s) => {
                let Some(r) = tab.ratio_test(s)? else {
                    return Ok(PackingOutcome::Unbounded);
                };
                tab.pivot(r, s)?;
            }
            None => {
                let improving = tab.price_pool(batch.max(1))?;
                if improving.is_empty() {
                    return Ok(tab.extract());
                }
                tab.materialise(&improving)?;
            }
        }
    }
}

fn mul<T: PivotInt>(a: &T, b: &T) -> Result<T, Overflow> {
    a.checked_mul(b).ok_or(Overflow)
}

fn add<T: PivotInt>(a: &T, b: &T) -> Result<T, Overflow> {
    a.checked_add(b).ok_or(Overflow)
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

fn to_f64<T: PivotInt>(v: &T) -> f64 {
    v.to_f64().unwrap_or(if v.is_negative() { f64::MIN } else { f64::MAX })
}

struct ColumnTableau<'a, T> {
    problem: &'a PackingProblem,
    m: usize,
    /// Slack columns `0..m`, then materialised problem columns. Each holds
    /// `m + 1` entries, the last one in the objective row.
    cols: Vec<Vec<T>>,
    /// Problem column behind each materialised column past the slacks.
    origin: Vec<usize>,
    in_tableau: Vec<bool>,
    rhs: Vec<T>,
    basis: Vec<usize>,
    det: T,
}

impl<'a, T: PivotInt> ColumnTableau<'a, T> {
    fn new(problem: &'a PackingProblem) -> Result<Self, Overflow> {
        let m = problem.rhs.len();
        let cols = (0..m)
            .map(|k| {
                let mut c = vec![T::zero(); m + 1];
                c[k] = T::one();
                c
            })
            .collect();
        let mut rhs = problem.rhs.iter().map(lift).collect::<Result<Vec<T>, _>>()?;
        rhs.push(T::zero());
        Ok(ColumnTableau {
            problem,
            m,
            cols,
            origin: Vec::new(),
            in_tableau: vec![false; problem.columns.len()],
            rhs,
            basis: (0..m).collect(),
            det: T::one(),
        })
    }

    /// Objective row entry of problem column `j`, i.e. `d` times its reduced cost.
    fn reduced_cost(&self, j: usize) -> Result<T, Overflow> {
        let column = &self.problem.columns[j];
        let mut acc = mul(&self.det, &lift::<T>(&column.cost)?)?;
        acc = T::zero().checked_sub(&acc).ok_or(Overflow)?;
        for (k, a) in &column.entries {
            let y = &self.cols[*k][self.m];
            if !y.is_zero() {
                acc = add(&acc, &mul(y, &lift(a)?)?)?;
            }
        }
        Ok(acc)
    }

    fn materialise(&mut self, columns: &[usize]) -> Result<(), Overflow> {
        for &j in columns {
            if self.in_tableau[j] {
                continue;
            }
            let mut v = vec![T::zero(); self.m + 1];
            for (k, a) in &self.problem.columns[j].entries {
                let a: T = lift(a)?;
                for (x, b) in v.iter_mut().zip(&self.cols[*k]).take(self.m) {
                    if !b.is_zero() {
                        *x = add(x, &mul(b, &a)?)?;
                    }
                }
            }
            v[self.m] = self.reduced_cost(j)?;
            self.cols.push(v);
            self.origin.push(j);
            self.in_tableau[j] = true;
        }
        Ok(())
    }

    /// Up to `batch` columns outside the tableau with negative reduced cost,
    /// most negative first.
    fn price_pool(&self, batch: usize) -> Result<Vec<usize>, Overflow> {
        let mut improving: Vec<(T, usize)> = Vec::new();
        for j in (0..self.problem.columns.len()).filter(|&j| !self.in_tableau[j]) {
            let r = self.reduced_cost(j)?;
            if r.is_negative() {
                improving.push((r, j));
            }
        }
        improving.sort();
        Ok(improving.into_iter().take(batch).map(|(_, j)| j).collect())
    }

    /// Steepest edge over the materialised columns, lowest index on ties.
    fn entering(&self) -> Option<usize> {
        let d = to_f64(&self.det);
        let mut best: Option<(usize, f64)> = None;
        for (s, col) in self.cols.iter().enumerate() {
            let r = &col[self.m];
            if !r.is_negative() {
                continue;
            }
            let norm = col[..self.m].iter().filter(|x| !x.is_zero()).map(|x| to_f64(x).powi(2)).sum::<f64>() + d * d;
            let score = to_f64(r).powi(2) / norm;
            if best.is_none_or(|(_, b)| score > b) {
                best = Some((s, score));
            }
        }
        best.map(|(s, _)| s)
    }

    /// Orders candidate rows `i` and `k` for leaving on column `s`: by ratio,
    /// then by the rows of `B^-1` scaled the same way.
    fn compare_rows(&self, i: usize, k: usize, s: usize) -> Result<Ordering, Overflow> {
        let col = &self.cols[s];
        let ord = mul(&self.rhs[i], &col[k])?.cmp(&mul(&self.rhs[k], &col[i])?);
        if ord != Ordering::Equal {
            return Ok(ord);
        }
        for slack in &self.cols[..self.m] {
            let ord = mul(&slack[i], &col[k])?.cmp(&mul(&slack[k], &col[i])?);
            if ord != Ordering::Equal {
                return Ok(ord);
            }
        }
        Ok(i.cmp(&k))
    }

    fn ratio_test(&self, s: usize) -> Result<Option<usize>, Overflow> {
        let mut best: Option<usize> = None;
        for i in 0..self.m {
            if !self.cols[s][i].is_positive() {
                continue;
            }
            best = match best {
                Some(k) if self.compare_rows(i, k, s)? != Ordering::Less => Some(k),
                _ => Some(i),
            };
        }
        Ok(best)
    }

    fn pivot(&mut self, r: usize, s: usize) -> Result<(), Overflow> {
        let p = self.cols[s][r].clone();
        debug_assert!(p.is_positive());
        let d = self.det.clone();
        let dv = T::divisor(&d);
        let pivot_col = self.cols[s].clone();
        let update = |col: &mut [T]| -> Result<(), Overflow> {
            let a = col[r].clone();
            for (i, (x, pc)) in col.iter_mut().zip(&pivot_col).enumerate() {
                if i == r {
                    continue;
                }
                if a.is_zero() || pc.is_zero() {
                    if !x.is_zero() && p != d {
                        *x = div(&mul(x, &p)?, &dv)?;
                    }
                } else {
                    let scaled = if x.is_zero() { T::zero() } else { mul(x, &p)? };
                    *x = div(&sub(&scaled, &mul(pc, &a)?)?, &dv)?;
                }
            }
            Ok(())
        };
        for col in self.cols.iter_mut() {
            update(col)?;
        }
        update(&mut self.rhs)?;
        self.basis[r] = s;
        self.det = p;
        Ok(())
    }

    fn extract(&self) -> PackingOutcome {
        let det = self.det.to_bigint();
        let ratio = |v: &T| Rational::new(v.to_bigint(), det.clone());
        let mut y = vec![Rational::zero(); self.problem.columns.len()];
        for (i, &b) in self.basis.iter().enumerate() {
            if b >= self.m {
                y[self.origin[b - self.m]] = ratio(&self.rhs[i]);
            }
        }
        PackingOutcome::Optimal {
            value: ratio(&self.rhs[self.m]),
            y,
            row_duals: self.cols[..self.m].iter().map(|c| ratio(&c[self.m])).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn problem(rhs: &[i64], columns: &[(&[(usize, i64)], i64)]) -> PackingProblem {
        PackingProblem {
            rhs: rhs.iter().map(|&b| BigInt::from(b)).collect(),
            columns: columns
                .iter()
                .map(|(entries, cost)| PackingColumn {
                    entries: entries.iter().map(|&(k, a)| (k, BigInt::from(a))).collect(),
                    cost: BigInt::from(*cost),
                })
                .collect(),
        }
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn textbook_max() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18  ->  36 at (2, 6)
        let p = problem(&[4, 12, 18], &[(&[(0, 1), (2, 3)], 3), (&[(1, 2), (2, 2)], 5)]);
        for initial in [vec![true, true], vec![false, false], vec![true, false]] {
            for out in [
                solve_packing_with::<i64>(&p, &initial, 1).unwrap(),
                solve_packing_with::<BigInt>(&p, &initial, 1).unwrap(),
            ] {
                let PackingOutcome::Optimal { value, y, row_duals } = out else {
                    panic!("expected optimum");
                };
                assert_eq!(value, q(36, 1));
                assert_eq!(y, vec![q(2, 1), q(6, 1)]);
                // dual: min 4u + 12v + 18w with u + 3w >= 3, 2v + 2w >= 5
                assert_eq!(row_duals, vec![q(0, 1), q(3, 2), q(1, 1)]);
            }
        }
    }

    #[test]
    fn unbounded_ray() {
        // max y1 with y1 - y2 <= 1
        let p = problem(&[1], &[(&[(0, 1)], 1), (&[(0, -1)], 0)]);
        assert_eq!(solve_packing(&p, &[true, true], 1), PackingOutcome::Unbounded);
    }

    #[test]
    fn degenerate_program_terminates() {
        // Beale's cycling example with rows and objective scaled to integers
        let p = problem(
            &[0, 0, 1],
            &[
                (&[(0, 1), (1, 1)], 3),
                (&[(0, -32), (1, -24)], -80),
                (&[(0, -4), (1, -1), (2, 1)], 2),
                (&[(0, 36), (1, 6)], -24),
            ],
        );
        for batch in [1, 4] {
            let PackingOutcome::Optimal { value, y, row_duals } = solve_packing(&p, &[true; 4], batch) else {
                panic!("expected optimum");
            };
            assert_eq!(row_duals, vec![q(0, 1), q(3, 1), q(5, 1)]);
            // the row multipliers (0, 3, 5) certify optimality
            assert_eq!(value, q(5, 1));
            assert_eq!(y, vec![q(1, 1), q(0, 1), q(1, 1), q(0, 1)]);
        }
    }

    #[test]
    fn pool_finds_columns_left_out() {
        // max y1 + y2 + y3 with y1 + y2 <= 1, y2 + y3 <= 1, y1 + y3 <= 1
        let p = problem(&[1, 1, 1], &[(&[(0, 1), (2, 1)], 1), (&[(0, 1), (1, 1)], 1), (&[(1, 1), (2, 1)], 1)]);
        let out = solve_packing(&p, &[false, false, false], 1);
        let PackingOutcome::Optimal { value, .. } = out else {
            panic!("expected optimum");
        };
        assert_eq!(value, q(3, 2));
    }
}
