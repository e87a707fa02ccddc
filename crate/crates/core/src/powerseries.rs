//! Truncated multivariate formal power series with exact coefficients.
//!
//! A [`PowerSeries`] carries its variable list and a truncation `T`: every
//! term of total degree `> T` is unknown and is never stored. Binary
//! operations produce the minimum truncation of their inputs.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::univariate::TruncSeries;

/// Maximum number of variables of a series.
pub const MAX_VARS: usize = 12;

/// Exponent vector in a dense fixed-width encoding. Slots beyond the
/// variable count of the owning series are always zero.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial([u16; MAX_VARS]);

impl Monomial {
    pub const ONE: Monomial = Monomial([0; MAX_VARS]);

    pub fn from_exponents(exps: &[u32]) -> Self {
        assert!(exps.len() <= MAX_VARS, "too many exponents");
        let mut m = Monomial::ONE;
        for (slot, &e) in m.0.iter_mut().zip(exps) {
            *slot = u16::try_from(e).expect("exponent overflow");
        }
        m
    }

    /// The monomial `x_i`.
    pub fn var(i: usize) -> Self {
        let mut m = Monomial::ONE;
        m.0[i] = 1;
        m
    }

    pub fn exponent(&self, i: usize) -> u32 {
        u32::from(self.0[i])
    }

    pub fn exponents(&self, nvars: usize) -> &[u16] {
        &self.0[..nvars]
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| u32::from(e)).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut m = *self;
        for (a, b) in m.0.iter_mut().zip(other.0.iter()) {
            *a = a.checked_add(*b).expect("exponent overflow");
        }
        m
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }

    /// True when any of the listed variables occurs.
    pub fn involves_any(&self, vars: &[usize]) -> bool {
        vars.iter().any(|&i| self.0[i] > 0)
    }

    /// All monomials in `nvars` variables of total degree exactly `d`.
    pub fn all_of_degree(nvars: usize, d: u32) -> Vec<Monomial> {
        fn rec(nvars: usize, i: usize, left: u32, cur: &mut Monomial, out: &mut Vec<Monomial>) {
            if i + 1 == nvars {
                cur.0[i] = left as u16;
                out.push(*cur);
                cur.0[i] = 0;
                return;
            }
            for e in (0..=left).rev() {
                cur.0[i] = e as u16;
                rec(nvars, i + 1, left - e, cur, out);
            }
            cur.0[i] = 0;
        }
        let mut out = Vec::new();
        if nvars == 0 {
            if d == 0 {
                out.push(Monomial::ONE);
            }
            return out;
        }
        let mut cur = Monomial::ONE;
        rec(nvars, 0, d, &mut cur, &mut out);
        out
    }

    /// All monomials of total degree at most `d`, by increasing degree.
    pub fn all_up_to_degree(nvars: usize, d: u32) -> Vec<Monomial> {
        (0..=d).flat_map(|k| Monomial::all_of_degree(nvars, k)).collect()
    }
}

/// Shared, immutable variable list.
pub type Vars = Arc<[String]>;

pub fn vars<S: AsRef<str>>(names: &[S]) -> Vars {
    names.iter().map(|s| s.as_ref().to_string()).collect::<Vec<_>>().into()
}

/// A truncated formal power series over `K`.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerSeries<K> {
    vars: Vars,
    terms: BTreeMap<Monomial, K>,
    truncation: u32,
}

/// Lowest-degree homogeneous part of a nonzero series.
#[derive(Clone, Debug, PartialEq)]
pub struct LeadingForm<K> {
    pub degree: u32,
    pub form: PowerSeries<K>,
}

impl<K: Field> PowerSeries<K> {
    pub fn zero(vars: Vars, truncation: u32) -> Result<Self> {
        if vars.len() > MAX_VARS {
            return Err(Error::TooManyVariables(vars.len()));
        }
        Ok(PowerSeries { vars, terms: BTreeMap::new(), truncation })
    }

    /// Builds a series from terms, summing repeated monomials and discarding
    /// zero coefficients and terms above the truncation.
    pub fn from_terms(
        vars: Vars,
        terms: impl IntoIterator<Item = (Monomial, K)>,
        truncation: u32,
    ) -> Result<Self> {
        let mut s = Self::zero(vars, truncation)?;
        for (m, c) in terms {
            s.add_term(m, c);
        }
        Ok(s)
    }

    pub fn constant(vars: Vars, c: K, truncation: u32) -> Result<Self> {
        Self::from_terms(vars, [(Monomial::ONE, c)], truncation)
    }

    /// The coordinate function named `name`.
    pub fn variable(vars: Vars, name: &str, truncation: u32) -> Result<Self> {
        let i = vars
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
        Self::from_terms(vars, [(Monomial::var(i), K::one())], truncation)
    }

    fn add_term(&mut self, m: Monomial, c: K) {
        if c.is_zero() || m.degree() > self.truncation {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().clone() + c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn truncation(&self) -> u32 {
        self.truncation
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &K)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Monomial) -> K {
        self.terms.get(m).cloned().unwrap_or_else(K::zero)
    }

    pub fn constant_term(&self) -> K {
        self.coeff(&Monomial::ONE)
    }

    /// Zero to truncation.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn check_vars(&self, other: &Self) -> Result<()> {
        if self.vars == other.vars {
            Ok(())
        } else {
            Err(Error::VariableMismatch(self.vars.to_vec(), other.vars.to_vec()))
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_vars(other)?;
        let t = self.truncation.min(other.truncation);
        let mut out = self.with_truncation(t);
        for (m, c) in &other.terms {
            out.add_term(*m, c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.neg_ref())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_vars(other)?;
        let t = self.truncation.min(other.truncation);
        let mut out = Self { vars: self.vars.clone(), terms: BTreeMap::new(), truncation: t };
        for (ma, ca) in &self.terms {
            let da = ma.degree();
            if da > t {
                continue;
            }
            for (mb, cb) in &other.terms {
                if da + mb.degree() <= t {
                    out.add_term(ma.mul(mb), ca.clone() * cb.clone());
                }
            }
        }
        Ok(out)
    }

    fn neg_ref(&self) -> Self {
        Self {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (*m, -c.clone())).collect(),
            truncation: self.truncation,
        }
    }

    pub fn scale(&self, c: &K) -> Self {
        let mut out = Self { vars: self.vars.clone(), terms: BTreeMap::new(), truncation: self.truncation };
        for (m, a) in &self.terms {
            out.add_term(*m, a.clone() * c.clone());
        }
        out
    }

    /// Multiplies by a monomial; the truncation is unchanged.
    pub fn mul_monomial(&self, m: &Monomial) -> Self {
        let mut out = Self { vars: self.vars.clone(), terms: BTreeMap::new(), truncation: self.truncation };
        for (mm, c) in &self.terms {
            out.add_term(mm.mul(m), c.clone());
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::constant(self.vars.clone(), K::one(), self.truncation)
            .expect("variable count already validated");
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Lowers the truncation (a no-op when `t` is not smaller).
    pub fn with_truncation(&self, t: u32) -> Self {
        let t = t.min(self.truncation);
        Self {
            vars: self.vars.clone(),
            terms: self.terms.iter().filter(|(m, _)| m.degree() <= t).map(|(m, c)| (*m, c.clone())).collect(),
            truncation: t,
        }
    }

    /// Order of vanishing at the origin: the minimal total degree of a stored
    /// term. `None` when the series is zero to truncation, meaning the true
    /// order is at least `T + 1`.
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).min()
    }

    pub fn homogeneous_part(&self, d: u32) -> Self {
        Self {
            vars: self.vars.clone(),
            terms: self.terms.iter().filter(|(m, _)| m.degree() == d).map(|(m, c)| (*m, c.clone())).collect(),
            truncation: self.truncation,
        }
    }

    pub fn leading_form(&self) -> Result<LeadingForm<K>> {
        let degree = self.order().ok_or(Error::ZeroSeries { truncation: self.truncation })?;
        Ok(LeadingForm { degree, form: self.homogeneous_part(degree) })
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(Monomial::degree);
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    /// Sets the listed variables to zero, keeping the variable list.
    pub fn set_zero(&self, indices: &[usize]) -> Self {
        Self {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| !m.involves_any(indices))
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
            truncation: self.truncation,
        }
    }

    /// Re-expresses the series over `target`, mapping variable `i` of `self`
    /// to variable `map[i]` of `target`. `None` entries must not occur in any
    /// stored term.
    pub fn remap(&self, target: Vars, map: &[Option<usize>]) -> Result<Self> {
        let mut out = Self::zero(target, self.truncation)?;
        for (m, c) in &self.terms {
            let mut mm = Monomial::ONE;
            for (i, slot) in map.iter().enumerate() {
                let e = m.0[i];
                if e == 0 {
                    continue;
                }
                match slot {
                    Some(j) => mm.0[*j] += e,
                    None => return Err(Error::UnknownVariable(self.vars[i].clone())),
                }
            }
            out.add_term(mm, c.clone());
        }
        Ok(out)
    }

    /// Evaluates the polynomial truncation at a point.
    pub fn eval(&self, point: &[K]) -> K {
        let mut acc = K::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (i, x) in point.iter().enumerate() {
                for _ in 0..m.0[i] {
                    term = term * x.clone();
                }
            }
            acc = acc + term;
        }
        acc
    }

    /// Substitutes a univariate series for every variable and returns the
    /// result modulo `t^{N+1}`, as a series in the single variable of the
    /// images.
    ///
    /// Every image must have zero constant term. The result truncation is
    /// `min(N, T_f, T_image)`: terms of `f` above its truncation only
    /// contribute in `t`-degree `> T_f`.
    pub fn substitute(&self, images: &[PowerSeries<K>], n: u32) -> Result<PowerSeries<K>> {
        if images.len() != self.nvars() {
            return Err(Error::InvalidArgument(format!(
                "expected {} images, got {}",
                self.nvars(),
                images.len()
            )));
        }
        let tvars = match images.first() {
            Some(img) => img.vars.clone(),
            None => vars(&["t"]),
        };
        let mut prec = n.min(self.truncation);
        for (i, img) in images.iter().enumerate() {
            if img.nvars() != 1 || img.vars != tvars {
                return Err(Error::VariableMismatch(img.vars.to_vec(), tvars.to_vec()));
            }
            if !img.constant_term().is_zero() {
                return Err(Error::NonzeroConstantTerm(self.vars[i].clone()));
            }
            prec = prec.min(img.truncation);
        }
        let dense: Vec<TruncSeries<K>> = images.iter().map(|s| s.to_univariate(prec as usize)).collect();
        let out = self.substitute_dense(&dense, prec as usize);
        PowerSeries::from_univariate(tvars, &out)
    }

    /// Substitution into dense univariate images; images must have zero
    /// constant term.
    pub(crate) fn substitute_dense(&self, images: &[TruncSeries<K>], prec: usize) -> TruncSeries<K> {
        let mut powers: Vec<Vec<TruncSeries<K>>> = images.iter().map(|img| vec![TruncSeries::one(prec), img.with_precision(prec)]).collect();
        let mut acc = TruncSeries::zero(prec);
        for (m, c) in &self.terms {
            if m.degree() as usize > prec {
                continue;
            }
            let mut term = TruncSeries::constant(c.clone(), prec);
            for (i, pw) in powers.iter_mut().enumerate() {
                let e = m.0[i] as usize;
                while pw.len() <= e {
                    let next = &pw[pw.len() - 1] * &pw[1];
                    pw.push(next);
                }
                if e > 0 {
                    term = &term * &pw[e];
                }
            }
            acc = &acc + &term;
        }
        acc
    }

    /// Dense view of a univariate series.
    pub fn to_univariate(&self, precision: usize) -> TruncSeries<K> {
        let p = precision.min(self.truncation as usize);
        let mut coeffs = vec![K::zero(); p + 1];
        for (m, c) in &self.terms {
            let d = m.degree() as usize;
            if d <= p {
                coeffs[d] = c.clone();
            }
        }
        TruncSeries::from_coeffs(coeffs, p)
    }

    pub fn from_univariate(vars: Vars, s: &TruncSeries<K>) -> Result<Self> {
        if vars.len() != 1 {
            return Err(Error::InvalidArgument("univariate series need exactly one variable".into()));
        }
        let terms = s
            .coeffs()
            .iter()
            .enumerate()
            .map(|(i, c)| (Monomial::from_exponents(&[i as u32]), c.clone()));
        Self::from_terms(vars, terms, s.precision() as u32)
    }

    /// Terms in display order: by degree, then by descending exponent vector
    /// (so `x` precedes `y`).
    pub fn sorted_terms(&self) -> Vec<(&Monomial, &K)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|(a, _), (b, _)| a.degree().cmp(&b.degree()).then(b.cmp(a)));
        v
    }
}

impl<K: Field> fmt::Display for PowerSeries<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.sorted_terms();
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in terms.into_iter().enumerate() {
            let s = c.to_exact_string();
            let (neg, abs) = match s.strip_prefix('-') {
                Some(rest) => (true, rest.to_string()),
                None => (false, s),
            };
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            let mut factors: Vec<String> = Vec::new();
            for (i, &e) in m.exponents(self.nvars()).iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(self.vars[i].clone()),
                    _ => factors.push(format!("{}^{}", self.vars[i], e)),
                }
            }
            if factors.is_empty() {
                write!(f, "{abs}")?;
            } else if abs == "1" {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{}*{}", abs, factors.join("*"))?;
            }
        }
        Ok(())
    }
}

impl<'a, K: Field> Add<&'a PowerSeries<K>> for &'a PowerSeries<K> {
    type Output = PowerSeries<K>;
    /// Panics on a variable-list mismatch; see [`PowerSeries::try_add`].
    fn add(self, rhs: &PowerSeries<K>) -> PowerSeries<K> {
        self.try_add(rhs).expect("variable-list mismatch")
    }
}

impl<'a, K: Field> Sub<&'a PowerSeries<K>> for &'a PowerSeries<K> {
    type Output = PowerSeries<K>;
    fn sub(self, rhs: &PowerSeries<K>) -> PowerSeries<K> {
        self.try_sub(rhs).expect("variable-list mismatch")
    }
}

impl<'a, K: Field> Mul<&'a PowerSeries<K>> for &'a PowerSeries<K> {
    type Output = PowerSeries<K>;
    fn mul(self, rhs: &PowerSeries<K>) -> PowerSeries<K> {
        self.try_mul(rhs).expect("variable-list mismatch")
    }
}

impl<K: Field> Neg for &PowerSeries<K> {
    type Output = PowerSeries<K>;
    fn neg(self) -> PowerSeries<K> {
        self.neg_ref()
    }
}

/// Arithmetic selector for [`ps_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

pub fn ps_arith<K: Field>(a: &PowerSeries<K>, b: &PowerSeries<K>, op: ArithOp) -> Result<PowerSeries<K>> {
    match op {
        ArithOp::Add => a.try_add(b),
        ArithOp::Sub => a.try_sub(b),
        ArithOp::Mul => a.try_mul(b),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_series;
    use num_rational::BigRational;
    use proptest::prelude::*;

    type Q = BigRational;

    fn p(s: &str, names: &[&str], t: u32) -> PowerSeries<Q> {
        parse_series(s, &vars(names), t).unwrap()
    }

    #[test]
    fn telescoping_product() {
        let a = p("1+x", &["x"], 6);
        let b = p("1-x", &["x"], 4);
        let prod = ps_arith(&a, &b, ArithOp::Mul).unwrap();
        assert_eq!(prod, p("1 - x^2", &["x"], 4));
        assert_eq!(prod.truncation(), 4);
    }

    #[test]
    fn cancellation() {
        let a = p("y - x^2", &["x", "y"], 5);
        let b = p("x^2", &["x", "y"], 5);
        assert_eq!(ps_arith(&a, &b, ArithOp::Add).unwrap(), p("y", &["x", "y"], 5));
    }

    #[test]
    fn truncation_floor() {
        let s = p("x+y", &["x", "y"], 2);
        let cube = &(&s * &s) * &s;
        assert!(cube.is_zero());
        assert_eq!(cube.truncation(), 2);
    }

    #[test]
    fn mismatched_variables() {
        let a = p("x", &["x"], 3);
        let b = p("y", &["y"], 3);
        assert!(matches!(a.try_add(&b), Err(Error::VariableMismatch(..))));
    }

    #[test]
    fn orders() {
        assert_eq!(p("y - x^2", &["x", "y"], 8).order(), Some(1));
        assert_eq!(p("0", &["x", "y"], 8).order(), None);
        assert_eq!(p("x^2*y + x^5", &["x", "y"], 8).order(), Some(3));
    }

    #[test]
    fn leading_forms() {
        let xs = ["x", "y", "z"];
        let lf = p("y - x^2", &xs, 8).leading_form().unwrap();
        assert_eq!((lf.degree, lf.form), (1, p("y", &xs, 8)));
        let lf = p("x - z^3", &xs, 8).leading_form().unwrap();
        assert_eq!((lf.degree, lf.form), (1, p("x", &xs, 8)));
        let lf = p("x^2 + x*y", &xs, 8).leading_form().unwrap();
        assert_eq!((lf.degree, lf.form.clone()), (2, p("x^2+x*y", &xs, 8)));
        assert!(lf.form.is_homogeneous());
        assert!(matches!(p("0", &xs, 8).leading_form(), Err(Error::ZeroSeries { .. })));
    }

    #[test]
    fn substitution_along_cusp_arc() {
        let xs = ["x", "y", "z"];
        let t = vars(&["t"]);
        let img = |s: &str| parse_series::<Q>(s, &t, 12).unwrap();
        let f = p("x - z^3", &xs, 12);
        let out = f.substitute(&[img("t^2"), img("t^3"), img("0")], 12).unwrap();
        assert_eq!(out, img("t^2"));
    }

    #[test]
    fn substitution_identity_and_zero_locus() {
        let t = vars(&["t"]);
        let f = parse_series::<Q>("3*t^2 - t^5 + 1/2*t^7", &t, 9).unwrap();
        let id = parse_series::<Q>("t", &t, 9).unwrap();
        assert_eq!(f.substitute(&[id], 9).unwrap(), f);

        let f = p("y - x^2", &["x", "y"], 9);
        let imgs = [parse_series::<Q>("t", &t, 9).unwrap(), parse_series::<Q>("t^2", &t, 9).unwrap()];
        assert!(f.substitute(&imgs, 9).unwrap().is_zero());
    }

    #[test]
    fn substitution_rejects_constants() {
        let t = vars(&["t"]);
        let f = p("x", &["x"], 4);
        let img = parse_series::<Q>("1 + t", &t, 4).unwrap();
        assert!(matches!(f.substitute(&[img], 4), Err(Error::NonzeroConstantTerm(_))));
    }

    #[test]
    fn display_round_trip() {
        let s = p("-1/2*x^2*y + 3 - y + x", &["x", "y"], 6);
        assert_eq!(s.to_string(), "3 + x - y - 1/2*x^2*y");
        assert_eq!(p(&s.to_string(), &["x", "y"], 6), s);
    }

    fn arb_series(nvars: usize, t: u32) -> impl Strategy<Value = PowerSeries<Q>> {
        prop::collection::vec((prop::collection::vec(0u32..4, nvars), -5i64..=5), 0..6).prop_map(move |terms| {
            PowerSeries::from_terms(
                vars(&["x", "y", "z"][..nvars]),
                terms.into_iter().map(|(e, c)| (Monomial::from_exponents(&e), Q::from_int(c))),
                t,
            )
            .unwrap()
        })
    }

    fn arb_image(t: u32) -> impl Strategy<Value = PowerSeries<Q>> {
        prop::collection::vec(-4i64..=4, 1..5).prop_map(move |cs| {
            PowerSeries::from_terms(
                vars(&["t"]),
                cs.into_iter().enumerate().map(|(i, c)| (Monomial::from_exponents(&[i as u32 + 1]), Q::from_int(c))),
                t,
            )
            .unwrap()
        })
    }

    proptest! {
        #[test]
        fn order_is_additive(a in arb_series(3, 8), b in arb_series(3, 8)) {
            let prod = &a * &b;
            if let (Some(oa), Some(ob)) = (a.order(), b.order()) {
                if oa + ob <= 8 {
                    prop_assert_eq!(prod.order(), Some(oa + ob));
                    let la = a.leading_form().unwrap().form;
                    let lb = b.leading_form().unwrap().form;
                    prop_assert_eq!(prod.leading_form().unwrap().form, &la * &lb);
                }
            }
        }

        #[test]
        fn order_of_sum(a in arb_series(3, 8), b in arb_series(3, 8)) {
            let sum = &a + &b;
            if let (Some(oa), Some(ob)) = (a.order(), b.order()) {
                if let Some(os) = sum.order() {
                    prop_assert!(os >= oa.min(ob));
                }
                if oa != ob {
                    prop_assert_eq!(sum.order(), Some(oa.min(ob)));
                }
            }
        }

        #[test]
        fn substitution_is_a_ring_map(
            a in arb_series(3, 10), b in arb_series(3, 10),
            x in arb_image(10), y in arb_image(10), z in arb_image(10),
        ) {
            let imgs = [x, y, z];
            let n = 10;
            let sa = a.substitute(&imgs, n).unwrap();
            let sb = b.substitute(&imgs, n).unwrap();
            prop_assert_eq!((&a + &b).substitute(&imgs, n).unwrap(), &sa + &sb);
            prop_assert_eq!((&a - &b).substitute(&imgs, n).unwrap(), &sa - &sb);
            prop_assert_eq!((&a * &b).substitute(&imgs, n).unwrap(), &sa * &sb);
        }
    }
}
