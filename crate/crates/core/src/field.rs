//! Prime-field arithmetic and the dense linear algebra the scheme needs.

use std::fmt;

use thiserror::Error;

/// Field element as its canonical representative in `0..p`.
pub type FieldElement = u64;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("field size must be at least 2, got {0}")]
    TooSmall(u64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("value {value} is not reduced modulo {p}")]
    OutOfRange { value: u64, p: u64 },
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("matrices over different fields ({0} and {1})")]
    ModulusMismatch(u64, u64),
    #[error("evaluation point {0} is repeated")]
    RepeatedPoint(u64),
    #[error("interpolation needs exactly {expected} points, got {got}")]
    PointCount { expected: usize, got: usize },
}

/// Primality by trial division.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Smallest prime `>= m`, for `m >= 2`.
pub fn smallest_prime_at_least(m: u64) -> Result<u64, FieldError> {
    if m < 2 {
        return Err(FieldError::TooSmall(m));
    }
    Ok((m..).find(|&q| is_prime(q)).expect("primes are unbounded"))
}

/// The prime field GF(p).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, FieldError> {
        if p < 2 {
            return Err(FieldError::TooSmall(p));
        }
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        Ok(PrimeField { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    /// Checks that `v` is already reduced.
    pub fn element(&self, v: u64) -> Result<FieldElement, FieldError> {
        if v < self.p {
            Ok(v)
        } else {
            Err(FieldError::OutOfRange { value: v, p: self.p })
        }
    }

    pub fn reduce(&self, v: u64) -> FieldElement {
        v % self.p
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        ((a as u128 + b as u128) % self.p as u128) as u64
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    pub fn pow(&self, mut base: FieldElement, mut exp: u64) -> FieldElement {
        let mut acc = 1 % self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Inverse by Fermat's little theorem.
    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        if a.is_multiple_of(self.p) {
            return Err(FieldError::ZeroInverse);
        }
        Ok(self.pow(a, self.p - 2))
    }

    /// `f(x)` for `f = coeffs[0] + coeffs[1] x + ...`, by Horner's rule.
    pub fn evaluate(&self, coeffs: &[FieldElement], x: FieldElement) -> FieldElement {
        coeffs.iter().rev().fold(0, |acc, &c| self.add(self.mul(acc, x), c))
    }
}

/// Dense matrix over GF(p); the modulus travels with the matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldMatrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
}

impl FieldMatrix {
    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        FieldMatrix { field, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        let mut m = FieldMatrix::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1 % field.modulus();
        }
        m
    }

    /// Builds from row vectors of equal length `cols` with reduced entries.
    pub fn from_rows(field: PrimeField, cols: usize, rows: &[Vec<u64>]) -> Result<Self, FieldError> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(FieldError::Dimension { expected: cols, got: row.len() });
            }
            for &v in row {
                data.push(field.element(v)?);
            }
        }
        Ok(FieldMatrix { field, rows: rows.len(), cols, data })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn row_count(&self) -> usize {
        self.rows
    }

    pub fn col_count(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> FieldElement {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: FieldElement) -> Result<(), FieldError> {
        self.data[i * self.cols + j] = self.field.element(v)?;
        Ok(())
    }

    pub fn row(&self, i: usize) -> &[FieldElement] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[FieldElement]> {
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn push_row(&mut self, row: &[u64]) -> Result<(), FieldError> {
        if row.len() != self.cols {
            return Err(FieldError::Dimension { expected: self.cols, got: row.len() });
        }
        for &v in row {
            self.data.push(self.field.element(v)?);
        }
        self.rows += 1;
        Ok(())
    }

    pub fn transpose(&self) -> FieldMatrix {
        let mut t = FieldMatrix::zeros(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j);
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &[FieldElement]) -> Result<Vec<FieldElement>, FieldError> {
        if v.len() != self.cols {
            return Err(FieldError::Dimension { expected: self.cols, got: v.len() });
        }
        Ok(self
            .rows()
            .map(|row| row.iter().zip(v).fold(0, |acc, (&a, &b)| self.field.add(acc, self.field.mul(a, b))))
            .collect())
    }

    /// `self` on top of `other`.
    pub fn stack(&self, other: &FieldMatrix) -> Result<FieldMatrix, FieldError> {
        if self.field != other.field {
            return Err(FieldError::ModulusMismatch(self.field.modulus(), other.field.modulus()));
        }
        if self.cols != other.cols {
            return Err(FieldError::Dimension { expected: self.cols, got: other.cols });
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(FieldMatrix { field: self.field, rows: self.rows + other.rows, cols: self.cols, data })
    }

    /// The columns in `range`, in order.
    pub fn columns(&self, range: std::ops::Range<usize>) -> FieldMatrix {
        assert!(range.end <= self.cols, "column range out of bounds");
        let cols = range.len();
        let mut data = Vec::with_capacity(self.rows * cols);
        for row in self.rows() {
            data.extend_from_slice(&row[range.clone()]);
        }
        FieldMatrix { field: self.field, rows: self.rows, cols, data }
    }

    /// Rank by Gaussian elimination.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.row_reduce()
    }

    /// Whether `v` is a linear combination of the rows.
    pub fn rowspace_contains(&self, v: &[u64]) -> Result<bool, FieldError> {
        let mut extended = self.clone();
        extended.push_row(v)?;
        Ok(extended.rank() == self.rank())
    }

    /// Brings the matrix to reduced row echelon form and returns its rank.
    fn row_reduce(&mut self) -> usize {
        let f = self.field;
        let mut rank = 0;
        for col in 0..self.cols {
            let Some(pivot) = (rank..self.rows).find(|&i| self.get(i, col) != 0) else {
                continue;
            };
            self.swap_rows(rank, pivot);
            let inv = f.inv(self.get(rank, col)).expect("pivot is nonzero");
            for j in col..self.cols {
                let v = f.mul(self.get(rank, j), inv);
                self.data[rank * self.cols + j] = v;
            }
            for i in (0..self.rows).filter(|&i| i != rank) {
                let factor = self.get(i, col);
                if factor == 0 {
                    continue;
                }
                for j in col..self.cols {
                    let v = f.sub(self.get(i, j), f.mul(factor, self.get(rank, j)));
                    self.data[i * self.cols + j] = v;
                }
            }
            rank += 1;
            if rank == self.rows {
                break;
            }
        }
        rank
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }
}

impl fmt::Display for FieldMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.rows() {
            let text: Vec<String> = row.iter().map(u64::to_string).collect();
            writeln!(f, "{}", text.join(" "))?;
        }
        Ok(())
    }
}

/// Coefficients `(s_0, ..., s_{c-1})` of the unique polynomial of degree
/// below `c` through the given `(alpha, value)` points, found by
/// eliminating the Vandermonde system.
pub fn interpolate_secret(
    field: PrimeField,
    points: &[(FieldElement, FieldElement)],
    c: usize,
) -> Result<Vec<FieldElement>, FieldError> {
    if points.len() != c {
        return Err(FieldError::PointCount { expected: c, got: points.len() });
    }
    for (i, &(a, v)) in points.iter().enumerate() {
        field.element(a)?;
        field.element(v)?;
        if points[..i].iter().any(|&(b, _)| b == a) {
            return Err(FieldError::RepeatedPoint(a));
        }
    }
    let rows: Vec<Vec<u64>> = points
        .iter()
        .map(|&(a, v)| {
            let mut row: Vec<u64> = (0..c as u64).map(|k| field.pow(a, k)).collect();
            row.push(v);
            row
        })
        .collect();
    let mut system = FieldMatrix::from_rows(field, c + 1, &rows)?;
    let rank = system.row_reduce();
    debug_assert_eq!(rank, c, "distinct points give an invertible Vandermonde matrix");
    Ok((0..c).map(|i| system.get(i, c)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn primes() {
        assert_eq!(smallest_prime_at_least(4), Ok(5));
        assert_eq!(smallest_prime_at_least(7), Ok(7));
        assert_eq!(smallest_prime_at_least(2), Ok(2));
        assert_eq!(smallest_prime_at_least(24), Ok(29));
        assert_eq!(smallest_prime_at_least(1), Err(FieldError::TooSmall(1)));
        assert_eq!(PrimeField::new(9), Err(FieldError::NotPrime(9)));
        assert!(is_prime(101) && !is_prime(1) && !is_prime(91));
    }

    #[test]
    fn ranks() {
        assert_eq!(FieldMatrix::identity(gf(7), 3).rank(), 3);
        let m = FieldMatrix::from_rows(gf(5), 2, &[vec![1, 2], vec![2, 4]]).unwrap();
        assert_eq!(m.rank(), 1);
        assert_eq!(FieldMatrix::zeros(gf(3), 2, 4).rank(), 0);
    }

    #[test]
    fn rowspace() {
        let id = FieldMatrix::identity(gf(5), 2);
        assert_eq!(id.rowspace_contains(&[3, 4]), Ok(true));
        let m = FieldMatrix::from_rows(gf(5), 2, &[vec![1, 2]]).unwrap();
        assert_eq!(m.rowspace_contains(&[2, 4]), Ok(true));
        assert_eq!(m.rowspace_contains(&[2, 3]), Ok(false));
        assert!(matches!(m.rowspace_contains(&[1]), Err(FieldError::Dimension { .. })));
    }

    #[test]
    fn interpolation() {
        assert_eq!(interpolate_secret(gf(5), &[(0, 2), (1, 0)], 2), Ok(vec![2, 3]));
        assert_eq!(interpolate_secret(gf(5), &[(0, 4)], 1), Ok(vec![4]));
        assert_eq!(interpolate_secret(gf(5), &[(1, 2), (1, 3)], 2), Err(FieldError::RepeatedPoint(1)));
        assert!(matches!(interpolate_secret(gf(5), &[(1, 2)], 2), Err(FieldError::PointCount { .. })));
    }

    #[test]
    fn arithmetic() {
        let f = gf(5);
        assert_eq!(f.evaluate(&[2, 3], 1), 0);
        assert_eq!(f.evaluate(&[2, 3], 3), 1);
        assert_eq!(f.sub(1, 3), 3);
        assert_eq!(f.inv(0), Err(FieldError::ZeroInverse));
        assert_eq!(f.element(5), Err(FieldError::OutOfRange { value: 5, p: 5 }));
    }

    #[test]
    fn stacking_and_columns() {
        let f = gf(3);
        let a = FieldMatrix::from_rows(f, 3, &[vec![1, 0, 2]]).unwrap();
        let b = FieldMatrix::from_rows(f, 3, &[vec![0, 1, 1]]).unwrap();
        let s = a.stack(&b).unwrap();
        assert_eq!(s.row(1), &[0, 1, 1]);
        assert_eq!(s.columns(1..3), FieldMatrix::from_rows(f, 2, &[vec![0, 2], vec![1, 1]]).unwrap());
        assert_eq!(s.mul_vec(&[1, 1, 1]), Ok(vec![0, 2]));
        let other = FieldMatrix::identity(gf(5), 3);
        assert_eq!(a.stack(&other), Err(FieldError::ModulusMismatch(3, 5)));
    }
}
