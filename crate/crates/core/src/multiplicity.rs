//! Orders of vanishing and multiplicities.
//!
//! On a standard model the multiplicity of a divisor is the sum of its
//! branch orders over the normalization. Independently, [`hilbert_samuel`]
//! computes `H(t) = dim_K O/(I + m^{t+1})` by exact linear algebra for an
//! arbitrary quotient `K[[x]]/I` and reads dimension and multiplicity off
//! the finite differences of `H`.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::{SparseEchelon, SparseRow};
use crate::localmodel::{BranchIndex, LocalModel, ModelElement};
use crate::powerseries::{Monomial, PowerSeries, Vars};

/// Default number of Hilbert–Samuel values computed by the oracle.
pub const DEFAULT_T_MAX: u32 = 10;

/// Consecutive equal finite differences required to call `H` stabilized.
pub const STABILIZATION_WINDOW: usize = 3;

/// A quotient `K[[vars]]/(relations)` together with an optional divisor.
#[derive(Clone, Debug, PartialEq)]
pub struct RingSpec<K> {
    vars: Vars,
    relations: Vec<PowerSeries<K>>,
    divisor: Option<PowerSeries<K>>,
}

impl<K: Field> RingSpec<K> {
    pub fn new(vars: Vars, relations: Vec<PowerSeries<K>>, divisor: Option<PowerSeries<K>>) -> Result<Self> {
        for (i, g) in relations.iter().chain(divisor.iter()).enumerate() {
            if g.vars() != &vars {
                return Err(Error::VariableMismatch(g.vars().to_vec(), vars.to_vec()));
            }
            if g.is_zero() {
                return Err(Error::InvalidArgument(format!("generator {i} is zero")));
            }
            if !g.constant_term().is_zero() {
                return Err(Error::UnitIdeal(i));
            }
        }
        Ok(RingSpec { vars, relations, divisor })
    }

    /// The standard model, optionally cut by a divisor.
    pub fn for_model(model: LocalModel, divisor: Option<&ModelElement<K>>, truncation: u32) -> Result<Self> {
        Self::new(model.vars(), model.relations(truncation), divisor.map(|f| f.series().clone()))
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn relations(&self) -> &[PowerSeries<K>] {
        &self.relations
    }

    pub fn divisor(&self) -> Option<&PowerSeries<K>> {
        self.divisor.as_ref()
    }

    /// The same ring without its divisor.
    pub fn ambient(&self) -> Self {
        RingSpec { vars: self.vars.clone(), relations: self.relations.clone(), divisor: None }
    }

    fn generators(&self) -> impl Iterator<Item = &PowerSeries<K>> {
        self.relations.iter().chain(self.divisor.iter())
    }
}

/// Values and finite differences of the Hilbert–Samuel function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HilbertSamuelTable {
    /// `H(0..=t_max)`.
    pub values: Vec<u64>,
    /// `differences[k]` is the `k`-th difference row of `values`.
    pub differences: Vec<Vec<i64>>,
    pub dimension: Option<usize>,
    pub multiplicity: Option<u64>,
    pub stabilized: bool,
}

impl HilbertSamuelTable {
    fn from_values(values: Vec<u64>) -> Self {
        let mut differences: Vec<Vec<i64>> = vec![values.iter().map(|&v| v as i64).collect()];
        while differences.last().is_some_and(|r| r.len() > STABILIZATION_WINDOW) {
            let last = differences.last().unwrap();
            let next = last.windows(2).map(|w| w[1] - w[0]).collect();
            differences.push(next);
        }
        let found = differences.iter().enumerate().find_map(|(d, row)| {
            let tail = &row[row.len().checked_sub(STABILIZATION_WINDOW)?..];
            (tail[0] != 0 && tail.iter().all(|&x| x == tail[0])).then_some((d, tail[0]))
        });
        HilbertSamuelTable {
            values,
            differences,
            dimension: found.map(|(d, _)| d),
            multiplicity: found.map(|(_, e)| e as u64),
            stabilized: found.is_some(),
        }
    }
}

/// Row `g·h` restricted to degrees `<= t`, in the column numbering `index`.
fn product_row<K: Field>(h: &PowerSeries<K>, g: &Monomial, t: u32, index: &HashMap<Monomial, usize>) -> SparseRow<K> {
    let mut row: SparseRow<K> = h
        .terms()
        .filter_map(|(m, c)| {
            let p = m.mul(g);
            (p.degree() <= t).then(|| (index[&p], c.clone()))
        })
        .collect();
    row.sort_by_key(|e| e.0);
    row
}

/// Echelon basis of `(I + m^{t+1}) / m^{t+1}` inside `K[x]_{<= t}`.
fn ideal_span<'a, K: Field>(
    gens: impl Iterator<Item = &'a PowerSeries<K>>,
    nvars: usize,
    t: u32,
) -> (SparseEchelon<K>, HashMap<Monomial, usize>, usize) {
    let monos = Monomial::all_up_to_degree(nvars, t);
    let index: HashMap<Monomial, usize> = monos.iter().enumerate().map(|(i, m)| (*m, i)).collect();
    let mut ech = SparseEchelon::new();
    for h in gens {
        let Some(o) = h.order() else { continue };
        if o > t {
            continue;
        }
        for g in Monomial::all_up_to_degree(nvars, t - o) {
            ech.insert(product_row(h, &g, t, &index));
        }
    }
    (ech, index, monos.len())
}

fn check_truncations<K: Field>(spec: &RingSpec<K>, t_max: u32) -> Result<()> {
    for (i, g) in spec.generators().enumerate() {
        if g.truncation() < t_max {
            return Err(Error::InvalidArgument(format!(
                "generator {i} is only known to degree {} < t_max = {t_max}",
                g.truncation()
            )));
        }
    }
    Ok(())
}

/// Hilbert–Samuel table of `O = K[[x]]/(relations, divisor)` for
/// `t = 0..=t_max`.
///
/// `H(t)` is the number of monomials of degree `<= t` minus the rank of
/// `{g·h mod m^{t+1}}` over all generators `h` and monomials `g`. Values of
/// `t` are evaluated in parallel; the result does not depend on scheduling.
pub fn hilbert_samuel<K: Field>(spec: &RingSpec<K>, t_max: u32) -> Result<HilbertSamuelTable> {
    if t_max < 3 {
        return Err(Error::InvalidArgument("t_max must be at least 3".into()));
    }
    check_truncations(spec, t_max)?;
    let nvars = spec.vars.len();
    let values: Vec<u64> = (0..=t_max)
        .into_par_iter()
        .map(|t| {
            let (ech, _, ncols) = ideal_span(spec.generators(), nvars, t);
            (ncols - ech.rank()) as u64
        })
        .collect();
    Ok(HilbertSamuelTable::from_values(values))
}

/// Order of `f` in `K[[x]]/(relations)`: the largest `ν <= t_max` with
/// `f ∈ I + m^ν`, computed by membership tests. `None` when `f` lies in
/// `I + m^{t_max+1}`.
pub fn oracle_order<K: Field>(spec: &RingSpec<K>, f: &PowerSeries<K>, t_max: u32) -> Result<Option<u32>> {
    let ambient = spec.ambient();
    check_truncations(&ambient, t_max)?;
    if f.vars() != &spec.vars {
        return Err(Error::VariableMismatch(f.vars().to_vec(), spec.vars.to_vec()));
    }
    if f.truncation() < t_max {
        return Err(Error::InvalidArgument("divisor truncation below t_max".into()));
    }
    let nvars = spec.vars.len();
    for nu in 1..=t_max + 1 {
        // f ∈ I + m^nu  <=>  f mod m^nu lies in the span of I mod m^nu.
        let t = nu - 1;
        let (ech, index, _) = ideal_span(ambient.generators(), nvars, t);
        let row = product_row(f, &Monomial::ONE, t, &index);
        if !ech.contains(row) {
            return Ok(Some(nu - 1));
        }
    }
    Ok(None)
}

/// Order of vanishing of an element of the standard model at the origin.
pub fn ord_at_origin<K: Field>(f: &ModelElement<K>) -> Result<u32> {
    f.series().order().ok_or(Error::ZeroSeries { truncation: f.truncation() })
}

/// Branch decomposition of the multiplicity of `D = V(f)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchSum {
    pub total: u64,
    pub per_branch: Vec<(BranchIndex, u32)>,
}

/// `mult(D) = Σ_branches ord(f restricted to the branch)`.
pub fn mult_divisor_branchsum<K: Field>(f: &ModelElement<K>) -> Result<BranchSum> {
    if !f.series().constant_term().is_zero() {
        return Err(Error::UnitIdeal(0));
    }
    let orders = f.branch_orders()?;
    if let Some(b) = orders.vanishing_branches().first() {
        return Err(Error::DivisorContainsBranch(b.to_string()));
    }
    let per_branch: Vec<(BranchIndex, u32)> =
        orders.entries.into_iter().map(|(b, o)| (b, o.expect("checked above"))).collect();
    let total = per_branch.iter().map(|(_, o)| u64::from(*o)).sum();
    Ok(BranchSum { total, per_branch })
}

/// Multiplicity of the standard model itself: `2^n`.
pub fn mult_model(model: &LocalModel) -> u64 {
    1u64 << model.n()
}

/// The inequality `mult D >= mult V · ord D` on a standard model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EqnMat {
    pub mult_d: u64,
    pub mult_v: u64,
    pub ord_d: u32,
    pub holds: bool,
    pub equality: bool,
}

pub fn check_eqnmat<K: Field>(f: &ModelElement<K>) -> Result<EqnMat> {
    let mult_d = mult_divisor_branchsum(f)?.total;
    let mult_v = mult_model(f.model());
    let ord_d = ord_at_origin(f)?;
    let bound = mult_v * u64::from(ord_d);
    Ok(EqnMat { mult_d, mult_v, ord_d, holds: mult_d >= bound, equality: mult_d == bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_series;
    use crate::powerseries::vars;
    use num_rational::BigRational;

    type Q = BigRational;

    fn spec(names: &[&str], rels: &[&str], f: Option<&str>) -> RingSpec<Q> {
        let v = vars(names);
        let rels = rels.iter().map(|r| parse_series(r, &v, 12).unwrap()).collect();
        let f = f.map(|s| parse_series(s, &v, 12).unwrap());
        RingSpec::new(v, rels, f).unwrap()
    }

    #[test]
    fn crossing_planes() {
        let hs = hilbert_samuel(&spec(&["x", "y", "z"], &["x*y"], None), 10).unwrap();
        assert_eq!((hs.dimension, hs.multiplicity), (Some(2), Some(2)));
        assert_eq!(hs.values[0], 1);
    }

    #[test]
    fn crossing_planes_cut_by_parabola() {
        let hs = hilbert_samuel(&spec(&["x", "y", "z"], &["x*y"], Some("y - x^2")), 10).unwrap();
        assert_eq!((hs.dimension, hs.multiplicity), (Some(1), Some(3)));
        // O/(f) = K[[x,z]]/(x^3): H(t) = 3t for t >= 2
        assert_eq!(&hs.values[..5], &[1, 3, 6, 9, 12]);
    }

    #[test]
    fn cusp_cylinder_divisor() {
        let s = spec(&["x", "y", "z"], &["y^2 - x^3"], Some("x - z^3"));
        let hs = hilbert_samuel(&s, 10).unwrap();
        assert_eq!((hs.dimension, hs.multiplicity), (Some(1), Some(2)));
        let hv = hilbert_samuel(&s.ambient(), 10).unwrap();
        assert_eq!((hv.dimension, hv.multiplicity), (Some(2), Some(2)));
        assert_eq!(oracle_order(&s, s.divisor().unwrap(), 10).unwrap(), Some(1));
    }

    #[test]
    fn two_nodes() {
        let hs = hilbert_samuel(&spec(&["u1", "u2", "v1", "v2"], &["u1*v1", "u2*v2"], None), 10).unwrap();
        assert_eq!(hs.multiplicity, Some(4));
        assert_eq!(hs.dimension, Some(2));
    }

    #[test]
    fn artinian_quotient() {
        let hs = hilbert_samuel(&spec(&["x"], &["x^3"], None), 6).unwrap();
        assert_eq!((hs.dimension, hs.multiplicity), (Some(0), Some(3)));
    }

    #[test]
    fn oracle_errors() {
        let v = vars(&["x"]);
        let unit = parse_series::<Q>("1 + x", &v, 8).unwrap();
        assert!(matches!(RingSpec::new(v.clone(), vec![unit], None), Err(Error::UnitIdeal(0))));
        let s = spec(&["x", "y"], &["x*y"], None);
        assert!(hilbert_samuel(&s, 2).is_err());
        assert!(hilbert_samuel(&s, 20).is_err(), "generators only known to degree 12");
    }

    #[test]
    fn non_stabilized_table_is_partial() {
        // Degree-2 growth cannot be certified with t_max = 3.
        let hs = hilbert_samuel(&spec(&["x", "y", "z"], &["x*y"], None), 3).unwrap();
        assert_eq!(hs.values.len(), 4);
        assert!(!hs.stabilized);
        assert_eq!(hs.dimension, None);
    }

    #[test]
    fn orders_on_models() {
        let m = LocalModel::new(1, 1).unwrap();
        assert_eq!(ord_at_origin(&m.parse::<Q>("v1 - u1^2", 12).unwrap()).unwrap(), 1);
        assert!(matches!(ord_at_origin(&m.parse::<Q>("u1*v1", 12).unwrap()), Err(Error::ZeroSeries { .. })));
        assert_eq!(ord_at_origin(&m.parse::<Q>("w1^3", 12).unwrap()).unwrap(), 3);
    }

    #[test]
    fn branch_sums() {
        let m11 = LocalModel::new(1, 1).unwrap();
        let m10 = LocalModel::new(1, 0).unwrap();
        let bs = mult_divisor_branchsum(&m11.parse::<Q>("v1 - u1^2", 12).unwrap()).unwrap();
        assert_eq!(bs.total, 3);
        assert_eq!(bs.per_branch.iter().map(|e| e.1).collect::<Vec<_>>(), [2, 1]);
        assert_eq!(mult_divisor_branchsum(&m10.parse::<Q>("u1 + v1", 12).unwrap()).unwrap().total, 2);
        assert_eq!(mult_divisor_branchsum(&m11.parse::<Q>("w1", 12).unwrap()).unwrap().total, 2);
        assert!(matches!(
            mult_divisor_branchsum(&m10.parse::<Q>("u1", 12).unwrap()),
            Err(Error::DivisorContainsBranch(_))
        ));
        assert!(matches!(mult_divisor_branchsum(&m10.parse::<Q>("1 + u1", 12).unwrap()), Err(Error::UnitIdeal(_))));
    }

    #[test]
    fn model_multiplicities() {
        assert_eq!(mult_model(&LocalModel::new(0, 2).unwrap()), 1);
        assert_eq!(mult_model(&LocalModel::new(1, 0).unwrap()), 2);
        assert_eq!(mult_model(&LocalModel::new(3, 0).unwrap()), 8);
    }

    #[test]
    fn eqnmat_cases() {
        let m11 = LocalModel::new(1, 1).unwrap();
        let e = check_eqnmat(&m11.parse::<Q>("v1 - u1^2", 12).unwrap()).unwrap();
        assert_eq!((e.mult_d, e.mult_v, e.ord_d, e.holds, e.equality), (3, 2, 1, true, false));
        let e = check_eqnmat(&LocalModel::new(1, 0).unwrap().parse::<Q>("u1 + v1", 12).unwrap()).unwrap();
        assert_eq!((e.mult_d, e.mult_v, e.ord_d, e.holds, e.equality), (2, 2, 1, true, true));
        let e = check_eqnmat(&m11.parse::<Q>("w1^2", 12).unwrap()).unwrap();
        assert_eq!((e.mult_d, e.mult_v, e.ord_d, e.holds, e.equality), (4, 2, 2, true, true));
    }

    #[test]
    fn oracle_order_agrees_on_model() {
        let m = LocalModel::new(1, 1).unwrap();
        let f = m.parse::<Q>("v1 - u1^2 + u1*v1", 12).unwrap();
        let s = RingSpec::for_model(m, None, 12).unwrap();
        assert_eq!(oracle_order(&s, f.series(), 10).unwrap(), Some(ord_at_origin(&f).unwrap()));
        // u1 v1 is zero in the ring
        let z = parse_series::<Q>("u1*v1", &m.vars(), 12).unwrap();
        assert_eq!(oracle_order(&s, &z, 6).unwrap(), None);
    }
}
