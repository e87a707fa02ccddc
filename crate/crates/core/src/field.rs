//! Exact scalar fields.
//!
//! Every computation in this crate is exact: zero tests decide ranks, orders
//! and elementary divisors, so only fields with exact equality implement
//! [`Field`]. Floating point types deliberately do not.

use std::fmt::{Debug, Display};
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{FromPrimitive, Num, Signed, Zero};

/// An exact field of characteristic zero.
pub trait Field:
    Clone + Debug + Display + PartialEq + Num + Neg<Output = Self> + Send + Sync + 'static
{
    fn from_int(n: i64) -> Self;

    /// `num / den`. Panics when `den == 0`.
    fn from_frac(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Self::from_int(num) / Self::from_int(den)
    }

    /// Parses an integer literal of arbitrary length, or `p/q`.
    fn parse_exact(s: &str) -> Option<Self>;

    /// `Some(n)` when the value is an integer that fits in `i64`.
    fn to_i64(&self) -> Option<i64>;

    /// Canonical text form: the integer when integral, else `p/q`.
    fn to_exact_string(&self) -> String {
        format!("{self}")
    }

    fn inv(&self) -> Self {
        Self::one() / self.clone()
    }
}

impl Field for BigRational {
    fn from_int(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn parse_exact(s: &str) -> Option<Self> {
        parse_ratio(s, |t| t.parse::<BigInt>().ok()).map(|(n, d)| BigRational::new(n, d))
    }

    fn to_i64(&self) -> Option<i64> {
        if self.is_integer() {
            num_traits::ToPrimitive::to_i64(self.numer())
        } else {
            None
        }
    }
}

impl Field for Rational64 {
    fn from_int(n: i64) -> Self {
        Rational64::from_integer(n)
    }

    fn parse_exact(s: &str) -> Option<Self> {
        parse_ratio(s, |t| t.parse::<i64>().ok()).map(|(n, d)| Rational64::new(n, d))
    }

    fn to_i64(&self) -> Option<i64> {
        self.is_integer().then(|| *self.numer())
    }
}

fn parse_ratio<T: Zero + Signed + FromPrimitive>(
    s: &str,
    parse: impl Fn(&str) -> Option<T>,
) -> Option<(T, T)> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (parse(n.trim())?, parse(d.trim())?),
        None => (parse(s)?, T::from_i64(1)?),
    };
    if d.is_zero() {
        return None;
    }
    Some((n, d))
}

/// Convenience for `Field::from_int`.
pub fn int<K: Field>(n: i64) -> K {
    K::from_int(n)
}
