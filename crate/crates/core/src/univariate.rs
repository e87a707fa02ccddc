//! Dense truncated univariate series, i.e. elements of `K[t]/(t^{N+1})`.
//!
//! This is the coefficient ring of the truncated formal arc. Binary
//! operations take the minimum precision of their operands.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::field::Field;

/// An element of `K[t]/(t^{N+1})`; `N` is the precision.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncSeries<K> {
    coeffs: Vec<K>,
}

impl<K: Field> TruncSeries<K> {
    pub fn zero(precision: usize) -> Self {
        TruncSeries { coeffs: vec![K::zero(); precision + 1] }
    }

    pub fn constant(c: K, precision: usize) -> Self {
        let mut s = Self::zero(precision);
        s.coeffs[0] = c;
        s
    }

    pub fn one(precision: usize) -> Self {
        Self::constant(K::one(), precision)
    }

    /// The uniformizer `t` (zero when the precision is 0).
    pub fn t(precision: usize) -> Self {
        Self::monomial(K::one(), 1, precision)
    }

    pub fn monomial(c: K, degree: usize, precision: usize) -> Self {
        let mut s = Self::zero(precision);
        if degree <= precision {
            s.coeffs[degree] = c;
        }
        s
    }

    /// Builds a series from the low coefficients; missing ones are zero and
    /// coefficients beyond the precision are dropped.
    pub fn from_coeffs(coeffs: impl IntoIterator<Item = K>, precision: usize) -> Self {
        let mut s = Self::zero(precision);
        for (i, c) in coeffs.into_iter().enumerate().take(precision + 1) {
            s.coeffs[i] = c;
        }
        s
    }

    pub fn precision(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, i: usize) -> K {
        self.coeffs.get(i).cloned().unwrap_or_else(K::zero)
    }

    pub fn coeffs(&self) -> &[K] {
        &self.coeffs
    }

    pub fn constant_term(&self) -> &K {
        &self.coeffs[0]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_unit(&self) -> bool {
        !self.coeffs[0].is_zero()
    }

    /// The `t`-adic valuation, or `None` when the series vanishes to
    /// precision (the true order is then at least `N + 1`).
    pub fn order(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn with_precision(&self, precision: usize) -> Self {
        Self::from_coeffs(self.coeffs.iter().cloned(), precision)
    }

    pub fn scale(&self, c: &K) -> Self {
        TruncSeries { coeffs: self.coeffs.iter().map(|x| x.clone() * c.clone()).collect() }
    }

    /// Multiplicative inverse of a unit.
    pub fn inv(&self) -> Option<Self> {
        if !self.is_unit() {
            return None;
        }
        let n = self.precision();
        let a0_inv = self.coeffs[0].inv();
        let mut out: Vec<K> = Vec::with_capacity(n + 1);
        out.push(a0_inv.clone());
        for k in 1..=n {
            let mut acc = K::zero();
            for j in 1..=k {
                if !self.coeffs[j].is_zero() {
                    acc = acc + self.coeffs[j].clone() * out[k - j].clone();
                }
            }
            out.push(-(acc * a0_inv.clone()));
        }
        Some(TruncSeries { coeffs: out })
    }

    /// Divides by `t^e`, assuming `t^e` divides the series. The top `e`
    /// coefficients of the result are unknown and are set to zero; the
    /// result is exact modulo `t^{N+1-e}`.
    pub fn div_t_pow(&self, e: usize) -> Self {
        let n = self.precision();
        debug_assert!(self.coeffs.iter().take(e.min(n + 1)).all(|c| c.is_zero()));
        Self::from_coeffs(self.coeffs.iter().skip(e).cloned(), n)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.precision());
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Evaluates a polynomial with coefficients in this ring at a scalar.
    pub fn eval_poly(coeffs: &[Self], at: &K, precision: usize) -> Self {
        let mut acc = Self::zero(precision);
        for c in coeffs.iter().rev() {
            acc = acc.scale(at);
            acc = &acc + c;
        }
        acc
    }
}

impl<'a, K: Field> Add<&'a TruncSeries<K>> for &'a TruncSeries<K> {
    type Output = TruncSeries<K>;
    fn add(self, rhs: &TruncSeries<K>) -> TruncSeries<K> {
        let n = self.precision().min(rhs.precision());
        TruncSeries::from_coeffs(
            (0..=n).map(|i| self.coeffs[i].clone() + rhs.coeffs[i].clone()),
            n,
        )
    }
}

impl<'a, K: Field> Sub<&'a TruncSeries<K>> for &'a TruncSeries<K> {
    type Output = TruncSeries<K>;
    fn sub(self, rhs: &TruncSeries<K>) -> TruncSeries<K> {
        let n = self.precision().min(rhs.precision());
        TruncSeries::from_coeffs(
            (0..=n).map(|i| self.coeffs[i].clone() - rhs.coeffs[i].clone()),
            n,
        )
    }
}

impl<'a, K: Field> Mul<&'a TruncSeries<K>> for &'a TruncSeries<K> {
    type Output = TruncSeries<K>;
    fn mul(self, rhs: &TruncSeries<K>) -> TruncSeries<K> {
        let n = self.precision().min(rhs.precision());
        let mut out = vec![K::zero(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(n + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().take(n + 1 - i) {
                if !b.is_zero() {
                    out[i + j] = out[i + j].clone() + a.clone() * b.clone();
                }
            }
        }
        TruncSeries { coeffs: out }
    }
}

impl<K: Field> Neg for &TruncSeries<K> {
    type Output = TruncSeries<K>;
    fn neg(self) -> TruncSeries<K> {
        TruncSeries { coeffs: self.coeffs.iter().map(|c| -c.clone()).collect() }
    }
}

impl<K: Field> fmt::Display for TruncSeries<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.to_exact_string().starts_with('-');
            let abs = if neg { -c.clone() } else { c.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            match (i, abs.to_exact_string().as_str()) {
                (0, s) => write!(f, "{s}")?,
                (1, "1") => write!(f, "t")?,
                (1, s) => write!(f, "{s}*t")?,
                (_, "1") => write!(f, "t^{i}")?,
                (_, s) => write!(f, "{s}*t^{i}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(t^{})", self.precision() + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    type S = TruncSeries<BigRational>;

    fn q(n: i64) -> BigRational {
        BigRational::from_int(n)
    }

    #[test]
    fn geometric_inverse() {
        // (1 - t)^{-1} = 1 + t + t^2 + ...
        let s = S::from_coeffs([q(1), q(-1)], 5);
        let inv = s.inv().unwrap();
        assert_eq!(inv, S::from_coeffs(vec![q(1); 6], 5));
        assert_eq!(&inv * &s, S::one(5));
    }

    #[test]
    fn non_units_have_no_inverse() {
        assert!(S::t(4).inv().is_none());
    }

    #[test]
    fn order_and_precision() {
        let s = S::from_coeffs([q(0), q(0), q(3)], 4);
        assert_eq!(s.order(), Some(2));
        assert_eq!(S::zero(3).order(), None);
        let short = S::one(2);
        assert_eq!((&s + &short).precision(), 2);
        assert_eq!(S::t(3).pow(4), S::zero(3));
        assert_eq!(s.div_t_pow(2), S::constant(q(3), 4));
    }

    #[test]
    fn display() {
        let s = S::from_coeffs([q(1), q(-2), q(0), q(1)], 3);
        assert_eq!(s.to_string(), "1 - 2*t + t^3 + O(t^4)");
    }
}
