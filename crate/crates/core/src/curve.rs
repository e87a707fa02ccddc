//! Integral rational nodal curves and their rank-1 torsion-free sheaves.
//!
//! A curve of arithmetic genus `g` is the projective line with `g` pairs of
//! points `(p_j, q_j)` glued to nodes. A sheaf is described on the partial
//! normalization at a set `S` of nodes: a line bundle of degree `d_L`,
//! trivialized so that its sections are polynomials of degree `<= d_L`,
//! together with a gluing constant `λ_j` at every node `j ∉ S`. Global
//! sections are the polynomials with `s(p_j) = λ_j s(q_j)` for `j ∉ S`.
//!
//! Degrees follow `deg I = d_L + |S|`, so that `χ(I) = deg I - g + 1`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::Matrix;
use crate::random::rng_for;

/// A point of the projective line.
#[derive(Clone, Debug, PartialEq)]
pub enum ProjPoint<K> {
    Finite(K),
    Infinity,
}

impl<K: Field> ProjPoint<K> {
    pub fn finite(&self) -> Option<&K> {
        match self {
            ProjPoint::Finite(x) => Some(x),
            ProjPoint::Infinity => None,
        }
    }
}

impl<K: Field> fmt::Display for ProjPoint<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProjPoint::Finite(x) => write!(f, "{}", x.to_exact_string()),
            ProjPoint::Infinity => write!(f, "inf"),
        }
    }
}

/// An integral rational curve with `g >= 1` nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalNodalCurve<K> {
    nodes: Vec<(ProjPoint<K>, ProjPoint<K>)>,
}

impl<K: Field> RationalNodalCurve<K> {
    pub fn new(nodes: Vec<(ProjPoint<K>, ProjPoint<K>)>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidCurve("genus must be at least 1".into()));
        }
        let points: Vec<&ProjPoint<K>> = nodes.iter().flat_map(|(p, q)| [p, q]).collect();
        for (i, a) in points.iter().enumerate() {
            if points[i + 1..].contains(a) {
                return Err(Error::InvalidCurve(format!("node point {a} appears twice")));
            }
        }
        Ok(RationalNodalCurve { nodes })
    }

    /// Curve with finite node points only.
    pub fn from_finite(nodes: Vec<(K, K)>) -> Result<Self> {
        Self::new(nodes.into_iter().map(|(p, q)| (ProjPoint::Finite(p), ProjPoint::Finite(q))).collect())
    }

    pub fn genus(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[(ProjPoint<K>, ProjPoint<K>)] {
        &self.nodes
    }

    /// Node pairs as scalars; fails when `Infinity` is used.
    pub fn finite_nodes(&self) -> Result<Vec<(K, K)>> {
        self.nodes
            .iter()
            .map(|(p, q)| match (p.finite(), q.finite()) {
                (Some(p), Some(q)) => Ok((p.clone(), q.clone())),
                _ => Err(Error::InvalidCurve("Infinity in node data; normalize coordinates first".into())),
            })
            .collect()
    }

    /// Moves `Infinity` to a finite point with `z ↦ 1/(z - a)`, `a` the
    /// smallest nonnegative integer that is not a node point.
    pub fn normalized(&self) -> Self {
        if self.nodes.iter().all(|(p, q)| p.finite().is_some() && q.finite().is_some()) {
            return self.clone();
        }
        let taken: Vec<K> = self.node_points_finite();
        let a = (0..).map(K::from_int).find(|a| !taken.contains(a)).expect("finitely many node points");
        let mv = |p: &ProjPoint<K>| match p {
            ProjPoint::Finite(x) => ProjPoint::Finite((x.clone() - a.clone()).inv()),
            ProjPoint::Infinity => ProjPoint::Finite(K::zero()),
        };
        RationalNodalCurve { nodes: self.nodes.iter().map(|(p, q)| (mv(p), mv(q))).collect() }
    }

    fn node_points_finite(&self) -> Vec<K> {
        self.nodes.iter().flat_map(|(p, q)| [p.finite().cloned(), q.finite().cloned()]).flatten().collect()
    }

    /// Whether `p` lies on the smooth locus (is not a preimage of a node).
    pub fn is_smooth_point(&self, p: &K) -> bool {
        !self.node_points_finite().contains(p)
    }
}

/// A rank-1 torsion-free sheaf `I = ν_* L` on a rational nodal curve.
#[derive(Clone, Debug, PartialEq)]
pub struct TfSheaf<K> {
    nonfree: BTreeSet<usize>,
    line_degree: i64,
    gluing: BTreeMap<usize, K>,
}

impl<K: Field> TfSheaf<K> {
    pub fn new(
        curve: &RationalNodalCurve<K>,
        nonfree: BTreeSet<usize>,
        line_degree: i64,
        gluing: BTreeMap<usize, K>,
    ) -> Result<Self> {
        let g = curve.genus();
        if let Some(j) = nonfree.iter().find(|&&j| j >= g) {
            return Err(Error::InvalidSheaf(format!("node index {j} out of range for genus {g}")));
        }
        for j in 0..g {
            match (nonfree.contains(&j), gluing.get(&j)) {
                (true, Some(_)) => return Err(Error::InvalidSheaf(format!("node {j} is nonfree but has a gluing"))),
                (false, None) => return Err(Error::InvalidSheaf(format!("missing gluing at node {j}"))),
                (false, Some(l)) if l.is_zero() => {
                    return Err(Error::InvalidSheaf(format!("gluing at node {j} is zero")))
                }
                _ => {}
            }
        }
        if let Some(j) = gluing.keys().find(|&&j| j >= g) {
            return Err(Error::InvalidSheaf(format!("gluing index {j} out of range")));
        }
        Ok(TfSheaf { nonfree, line_degree, gluing })
    }

    /// The structure sheaf (`S = ∅`, `d_L = 0`, all `λ = 1`).
    pub fn trivial(curve: &RationalNodalCurve<K>) -> Self {
        TfSheaf { nonfree: BTreeSet::new(), line_degree: 0, gluing: (0..curve.genus()).map(|j| (j, K::one())).collect() }
    }

    pub fn nonfree(&self) -> &BTreeSet<usize> {
        &self.nonfree
    }

    pub fn line_degree(&self) -> i64 {
        self.line_degree
    }

    pub fn gluing(&self) -> &BTreeMap<usize, K> {
        &self.gluing
    }

    /// Number of nodes where the sheaf fails to be locally free.
    pub fn n(&self) -> usize {
        self.nonfree.len()
    }

    pub fn total_degree(&self) -> i64 {
        self.line_degree + self.nonfree.len() as i64
    }

    fn check_on(&self, curve: &RationalNodalCurve<K>) -> Result<()> {
        let g = curve.genus();
        if self.nonfree.len() + self.gluing.len() != g || self.nonfree.iter().chain(self.gluing.keys()).any(|&j| j >= g) {
            return Err(Error::InvalidSheaf(format!("sheaf data does not match a genus-{g} curve")));
        }
        Ok(())
    }
}

/// `h^0` and `h^1` of a sheaf.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cohomology {
    pub h0: u64,
    pub h1: u64,
}

/// Rows `[p^k - λ q^k]_{k <= d}` of the gluing conditions at free nodes.
pub(crate) fn gluing_matrix<K: Field>(nodes: &[(K, K)], sheaf: &TfSheaf<K>, d: usize) -> Matrix<K> {
    let rows = sheaf
        .gluing
        .iter()
        .map(|(&j, lambda)| {
            let (p, q) = &nodes[j];
            powers(p, d).into_iter().zip(powers(q, d)).map(|(pk, qk)| pk - lambda.clone() * qk).collect()
        })
        .collect::<Vec<Vec<K>>>();
    if rows.is_empty() {
        Matrix::zeros(0, d + 1)
    } else {
        Matrix::from_rows(rows)
    }
}

/// `[1, x, ..., x^d]`.
pub(crate) fn powers<K: Field>(x: &K, d: usize) -> Vec<K> {
    let mut out = Vec::with_capacity(d + 1);
    let mut acc = K::one();
    for _ in 0..=d {
        out.push(acc.clone());
        acc = acc * x.clone();
    }
    out
}

/// Cohomology from the normalization sequence
/// `0 -> I -> ν_* L -> ⊕_{j ∉ S} K -> 0`:
/// `h^0` is the kernel and `h^1` the cokernel of the gluing map, plus
/// `h^1(P^1, O(d_L))` when `d_L < -1`.
pub fn cohomology<K: Field>(curve: &RationalNodalCurve<K>, sheaf: &TfSheaf<K>) -> Result<Cohomology> {
    sheaf.check_on(curve)?;
    let nodes = curve.finite_nodes()?;
    let conditions = sheaf.gluing.len() as u64;
    if sheaf.line_degree < 0 {
        return Ok(Cohomology { h0: 0, h1: conditions + (-sheaf.line_degree - 1) as u64 });
    }
    let d = sheaf.line_degree as usize;
    let rank = gluing_matrix(&nodes, sheaf, d).rank() as u64;
    Ok(Cohomology { h0: d as u64 + 1 - rank, h1: conditions - rank })
}

pub fn h0<K: Field>(curve: &RationalNodalCurve<K>, sheaf: &TfSheaf<K>) -> Result<u64> {
    cohomology(curve, sheaf).map(|c| c.h0)
}

/// A basis of `H^0(X, I)` as coefficient vectors of polynomials.
pub fn sections<K: Field>(curve: &RationalNodalCurve<K>, sheaf: &TfSheaf<K>) -> Result<Vec<Vec<K>>> {
    sheaf.check_on(curve)?;
    let nodes = curve.finite_nodes()?;
    if sheaf.line_degree < 0 {
        return Ok(Vec::new());
    }
    Ok(gluing_matrix(&nodes, sheaf, sheaf.line_degree as usize).kernel())
}

/// `I(±p)` for a smooth point `p`.
///
/// Sections of `I(-p)` are `s/(z - p)` with `s ∈ H^0(I)` vanishing at `p`,
/// so twisting down multiplies `λ_j` by `(q_j - p)/(p_j - p)`; twisting up
/// divides by the same factor.
pub fn twist_by_point<K: Field>(curve: &RationalNodalCurve<K>, sheaf: &TfSheaf<K>, p: &K, sign: i8) -> Result<TfSheaf<K>> {
    sheaf.check_on(curve)?;
    let nodes = curve.finite_nodes()?;
    if !curve.is_smooth_point(p) {
        return Err(Error::PointAtNode(p.to_exact_string()));
    }
    let (line_degree, down) = match sign {
        -1 => (sheaf.line_degree - 1, true),
        1 => (sheaf.line_degree + 1, false),
        _ => return Err(Error::InvalidArgument(format!("twist sign must be ±1, got {sign}"))),
    };
    let gluing = sheaf
        .gluing
        .iter()
        .map(|(&j, lambda)| {
            let (pj, qj) = &nodes[j];
            let ratio = (qj.clone() - p.clone()) / (pj.clone() - p.clone());
            let factor = if down { ratio } else { ratio.inv() };
            (j, lambda.clone() * factor)
        })
        .collect();
    Ok(TfSheaf { nonfree: sheaf.nonfree.clone(), line_degree, gluing })
}

/// `dim {s ∈ H^0(I) : s(p) = 0}`, by adding the evaluation condition to
/// the gluing conditions.
pub fn sections_vanishing_at<K: Field>(curve: &RationalNodalCurve<K>, sheaf: &TfSheaf<K>, p: &K) -> Result<u64> {
    sheaf.check_on(curve)?;
    let nodes = curve.finite_nodes()?;
    if sheaf.line_degree < 0 {
        return Ok(0);
    }
    let d = sheaf.line_degree as usize;
    let m = gluing_matrix(&nodes, sheaf, d).vstack(&Matrix::from_rows(vec![powers(p, d)]));
    Ok((d + 1 - m.rank()) as u64)
}

/// A random integer smooth point in `[-99, 99]`, avoiding the node points
/// and `avoid`.
pub fn random_smooth_point<K: Field>(curve: &RationalNodalCurve<K>, avoid: &[K], rng: &mut impl Rng) -> K {
    loop {
        let p = K::from_int(rng.gen_range(-99..=99));
        if curve.is_smooth_point(&p) && !avoid.contains(&p) {
            return p;
        }
    }
}

/// Resample budget per general point.
pub const GENERAL_POINT_RESAMPLES: usize = 5;

/// Outcome of [`general_drop_check`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DropReport {
    pub h0: u64,
    pub h1: u64,
    pub trials: usize,
    /// Trials where no point among the resamples dropped `h^0` by one.
    pub h0_failures: usize,
    /// Same for `h^1` under positive twists (only counted when `h^1 >= 1`).
    pub h1_failures: usize,
    /// Twisting down by `h^0` successive general points reached `h^0 = 0`.
    pub chain_reaches_zero: bool,
}

impl DropReport {
    pub fn passed(&self) -> bool {
        self.h0_failures == 0 && self.h1_failures == 0 && self.chain_reaches_zero
    }
}

/// Checks that a general point imposes exactly one condition on sections
/// (and on `H^1` under positive twists).
pub fn general_drop_check<K: Field>(
    curve: &RationalNodalCurve<K>,
    sheaf: &TfSheaf<K>,
    trials: usize,
    seed: u64,
) -> Result<DropReport> {
    let base = cohomology(curve, sheaf)?;
    if base.h0 == 0 {
        return Err(Error::NoSections);
    }
    let drops = |sign: i8, target: &dyn Fn(Cohomology) -> bool, rng: &mut rand_chacha::ChaCha8Rng| -> Result<bool> {
        for _ in 0..GENERAL_POINT_RESAMPLES {
            let p = random_smooth_point(curve, &[], rng);
            if target(cohomology(curve, &twist_by_point(curve, sheaf, &p, sign)?)?) {
                return Ok(true);
            }
        }
        Ok(false)
    };
    let mut h0_failures = 0;
    let mut h1_failures = 0;
    for k in 0..trials as u64 {
        let mut rng = rng_for(seed, k + 1);
        if !drops(-1, &|c| c.h0 + 1 == base.h0, &mut rng)? {
            h0_failures += 1;
        }
        if base.h1 >= 1 && !drops(1, &|c| c.h1 + 1 == base.h1, &mut rng)? {
            h1_failures += 1;
        }
    }

    let mut rng = rng_for(seed, 0);
    let mut current = sheaf.clone();
    let mut h = base.h0;
    let mut used: Vec<K> = Vec::new();
    'chain: while h > 0 {
        for _ in 0..GENERAL_POINT_RESAMPLES {
            let p = random_smooth_point(curve, &used, &mut rng);
            let next = twist_by_point(curve, &current, &p, -1)?;
            let hn = h0(curve, &next)?;
            if hn + 1 == h {
                used.push(p);
                current = next;
                h = hn;
                continue 'chain;
            }
        }
        break;
    }
    Ok(DropReport { h0: base.h0, h1: base.h1, trials, h0_failures, h1_failures, chain_reaches_zero: h == 0 })
}

/// Local invariants of the theta divisor at the point of `J̄^{g-1}` given
/// by a sheaf.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaReport {
    pub n: usize,
    pub h0: u64,
    pub h1: u64,
    /// `ord_x Θ`.
    pub ord: u64,
    /// `mult_x J̄ = 2^n`.
    pub mult_j: u64,
    /// `mult_x Θ = 2^n · h^0`.
    pub mult_theta: u64,
    pub on_theta: bool,
    pub singular: bool,
    /// Elementary divisor exponents of a minimal family, when computed.
    pub exponents: Option<Vec<usize>>,
}

fn check_theta_degree<K: Field>(curve: &RationalNodalCurve<K>, sheaf: &TfSheaf<K>) -> Result<()> {
    let expected = curve.genus() as i64 - 1;
    if sheaf.total_degree() != expected {
        return Err(Error::DegreeMismatch { degree: sheaf.total_degree(), expected });
    }
    Ok(())
}

/// `mult_x Θ = mult_x J̄ · ord_x Θ = 2^n · h^0(X, I)`.
pub fn theta_invariants<K: Field>(curve: &RationalNodalCurve<K>, sheaf: &TfSheaf<K>) -> Result<ThetaReport> {
    check_theta_degree(curve, sheaf)?;
    let c = cohomology(curve, sheaf)?;
    if c.h0 != c.h1 {
        return Err(Error::AssertionFailed(format!("degree g-1 but h0 = {} != h1 = {}", c.h0, c.h1)));
    }
    let n = sheaf.n();
    let mult_j = 1u64 << n;
    let class = classify_from(n, c.h0);
    Ok(ThetaReport {
        n,
        h0: c.h0,
        h1: c.h1,
        ord: c.h0,
        mult_j,
        mult_theta: mult_j * c.h0,
        on_theta: class.on_theta,
        singular: class.singular,
        exponents: None,
    })
}

/// Position of a theta point relative to `Θ_sing = W^1_{g-1} ∪ ∂Θ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ThetaClass {
    pub on_theta: bool,
    pub in_w1: bool,
    pub in_boundary: bool,
    pub singular: bool,
}

fn classify_from(n: usize, h0: u64) -> ThetaClass {
    let on_theta = h0 >= 1;
    let in_w1 = h0 >= 2;
    let in_boundary = n > 0 && on_theta;
    ThetaClass { on_theta, in_w1, in_boundary, singular: on_theta && (in_w1 || in_boundary) }
}

pub fn classify_theta_point<K: Field>(curve: &RationalNodalCurve<K>, sheaf: &TfSheaf<K>) -> Result<ThetaClass> {
    let report = theta_invariants(curve, sheaf)?;
    let class = classify_from(report.n, report.h0);
    // A point of Θ is singular exactly when its multiplicity exceeds one.
    if class.on_theta && class.singular != (report.mult_theta >= 2) {
        return Err(Error::AssertionFailed("classification disagrees with mult_x Θ".into()));
    }
    Ok(class)
}

/// A random curve of genus `g` with integer node points in `[-40, 40]`.
pub fn random_curve<K: Field>(g: usize, rng: &mut impl Rng) -> RationalNodalCurve<K> {
    let mut pts: Vec<i64> = Vec::new();
    while pts.len() < 2 * g {
        let x = rng.gen_range(-40..=40);
        if !pts.contains(&x) {
            pts.push(x);
        }
    }
    let nodes = pts.chunks(2).map(|c| (K::from_int(c[0]), K::from_int(c[1]))).collect();
    RationalNodalCurve::from_finite(nodes).expect("distinct points")
}

/// A random curve whose node pairs are exchanged by `z ↦ c - z`.
pub fn random_symmetric_curve<K: Field>(g: usize, rng: &mut impl Rng) -> RationalNodalCurve<K> {
    let c: i64 = rng.gen_range(-5..=5);
    let mut used: Vec<i64> = Vec::new();
    let mut nodes = Vec::new();
    while nodes.len() < g {
        // p and c - p are distinct because 2p != c for half-integers.
        let p = rng.gen_range(-40..=40);
        if 2 * p == c || used.contains(&p) || used.contains(&(c - p)) {
            continue;
        }
        used.extend([p, c - p]);
        nodes.push((K::from_int(p), K::from_int(c - p)));
    }
    RationalNodalCurve::from_finite(nodes).expect("distinct points")
}

/// A random sheaf with the given nonfree set and line degree, gluings
/// drawn as small nonzero rationals.
pub fn random_sheaf<K: Field>(
    curve: &RationalNodalCurve<K>,
    nonfree: BTreeSet<usize>,
    line_degree: i64,
    rng: &mut impl Rng,
) -> TfSheaf<K> {
    let gluing = (0..curve.genus())
        .filter(|j| !nonfree.contains(j))
        .map(|j| {
            let mut a = 0;
            while a == 0 {
                a = rng.gen_range(-6..=6);
            }
            (j, K::from_frac(a, rng.gen_range(1..=3)))
        })
        .collect();
    TfSheaf::new(curve, nonfree, line_degree, gluing).expect("valid by construction")
}

/// A degree-`g-1` sheaf with nonfree set `nonfree` and a prescribed
/// nonzero section `s` of degree `<= d_L` (so `h^0 >= 1`); `None` when the
/// section vanishes at a node point or `d_L < 0`.
pub fn sheaf_with_section<K: Field>(
    curve: &RationalNodalCurve<K>,
    nonfree: BTreeSet<usize>,
    section: &[K],
) -> Result<Option<TfSheaf<K>>> {
    let line_degree = curve.genus() as i64 - 1 - nonfree.len() as i64;
    if line_degree < 0 || section.len() as i64 > line_degree + 1 {
        return Ok(None);
    }
    let nodes = curve.finite_nodes()?;
    let eval = |x: &K| section.iter().rev().fold(K::zero(), |acc, c| acc * x.clone() + c.clone());
    let mut gluing = BTreeMap::new();
    for (j, (p, q)) in nodes.iter().enumerate() {
        if nonfree.contains(&j) {
            continue;
        }
        let (sp, sq) = (eval(p), eval(q));
        if sp.is_zero() || sq.is_zero() {
            return Ok(None);
        }
        gluing.insert(j, sp / sq);
    }
    TfSheaf::new(curve, nonfree, line_degree, gluing).map(Some)
}

/// A random point of `Θ ⊂ J̄^{g-1}`: a curve and a degree-`g-1` sheaf with
/// `|S| = nonfree_count` and `h^0 >= 1`. With `symmetric`, the curve's
/// node pairs are swapped by an involution and all gluings are 1, which
/// produces `h^0 >= 2` once `d_L >= 2`.
pub fn random_theta_point<K: Field>(
    g: usize,
    nonfree_count: usize,
    symmetric: bool,
    rng: &mut impl Rng,
) -> Result<(RationalNodalCurve<K>, TfSheaf<K>)> {
    if nonfree_count >= g {
        return Err(Error::InvalidArgument("h0 >= 1 in degree g-1 needs |S| < g".into()));
    }
    let mut idx: Vec<usize> = (0..g).collect();
    for i in (1..g).rev() {
        idx.swap(i, rng.gen_range(0..=i));
    }
    let nonfree: BTreeSet<usize> = idx[..nonfree_count].iter().copied().collect();
    let line_degree = (g - 1 - nonfree_count) as i64;
    if symmetric {
        let curve = random_symmetric_curve(g, rng);
        let gluing = (0..g).filter(|j| !nonfree.contains(j)).map(|j| (j, K::one())).collect();
        let sheaf = TfSheaf::new(&curve, nonfree, line_degree, gluing)?;
        return Ok((curve, sheaf));
    }
    loop {
        let curve = random_curve(g, rng);
        let section: Vec<K> = (0..=line_degree).map(|_| K::from_int(rng.gen_range(-5..=5))).collect();
        if section.iter().all(|c| c.is_zero()) {
            continue;
        }
        if let Some(sheaf) = sheaf_with_section(&curve, nonfree.clone(), &section)? {
            return Ok((curve, sheaf));
        }
    }
}
