use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, Signed, ToPrimitive};

/// Integer type the fraction-free simplex can pivot with.
///
/// Every arithmetic step goes through the checked operations so that a
/// machine-width tableau can report overflow and be re-solved wider.
pub trait PivotInt:
    Clone + Debug + Ord + Integer + Signed + ToPrimitive + CheckedAdd + CheckedSub + CheckedMul + CheckedDiv
{
    /// Precomputed state for repeated exact division by one value.
    type Divisor;

    fn from_bigint(v: &BigInt) -> Option<Self>;
    fn to_bigint(&self) -> BigInt;
    fn divisor(d: &Self) -> Self::Divisor;
    /// `self / d` for a `self` known to be a multiple of `d`; `None` on overflow.
    fn exact_quotient(&self, d: &Self::Divisor) -> Option<Self>;
}

/// Exact division by a fixed machine integer as a shift and a multiplication
/// by the inverse of its odd part modulo the word size.
#[derive(Debug, Clone, Copy)]
pub struct WordDivisor<U> {
    shift: u32,
    inverse: U,
    negative: bool,
}

macro_rules! word_pivot {
    ($int:ty, $uint:ty, $newton:expr, $to:ident) => {
        impl PivotInt for $int {
            type Divisor = WordDivisor<$uint>;

            fn from_bigint(v: &BigInt) -> Option<Self> {
                v.$to()
            }

            fn to_bigint(&self) -> BigInt {
                BigInt::from(*self)
            }

            fn divisor(d: &Self) -> Self::Divisor {
                assert!(*d != 0, "division by zero");
                let magnitude = d.unsigned_abs();
                let shift = magnitude.trailing_zeros();
                let odd = magnitude >> shift;
                // each Newton step doubles the number of correct low bits
                let mut inverse = odd;
                for _ in 0..$newton {
                    inverse = inverse.wrapping_mul((2 as $uint).wrapping_sub(odd.wrapping_mul(inverse)));
                }
                WordDivisor { shift, inverse, negative: *d < 0 }
            }

            fn exact_quotient(&self, d: &Self::Divisor) -> Option<Self> {
                let q = ((self >> d.shift) as $uint).wrapping_mul(d.inverse) as $int;
                if d.negative {
                    q.checked_neg()
                } else {
                    Some(q)
                }
            }
        }
    };
}

word_pivot!(i64, u64, 5, to_i64);
word_pivot!(i128, u128, 6, to_i128);

impl PivotInt for BigInt {
    type Divisor = BigInt;

    fn from_bigint(v: &BigInt) -> Option<Self> {
        Some(v.clone())
    }

    fn to_bigint(&self) -> BigInt {
        self.clone()
    }

    fn divisor(d: &Self) -> Self::Divisor {
        d.clone()
    }

    fn exact_quotient(&self, d: &Self::Divisor) -> Option<Self> {
        Some(self / d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check<T: PivotInt + Copy + From<i32>>(divisors: &[i32], quotients: &[i32]) {
        for &d in divisors {
            let dv = T::divisor(&T::from(d));
            for &q in quotients {
                let x = T::from(q) * T::from(d);
                assert_eq!(x.exact_quotient(&dv), Some(T::from(q)), "{q} * {d}");
            }
        }
    }

    #[test]
    fn word_exact_division() {
        let divisors = [1, 2, 3, 7, 12, 64, 1000, 99991, -1, -6, -1024];
        let quotients = [0, 1, -1, 5, -17, 123456, -987654, i32::MAX, i32::MIN];
        check::<i64>(&divisors, &quotients);
        check::<i128>(&divisors, &quotients);
    }

    #[test]
    fn word_division_extremes() {
        let dv = i64::divisor(&-1);
        assert_eq!(i64::MIN.exact_quotient(&dv), None);
        assert_eq!(i64::MAX.exact_quotient(&dv), Some(-i64::MAX));
        let dv = i128::divisor(&(1i128 << 100));
        assert_eq!((3i128 << 100).exact_quotient(&dv), Some(3));
    }
}
