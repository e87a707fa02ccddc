//! One-parameter families of sheaves over `Spec K[t]/(t^{N+1})` and the
//! order of the theta divisor along them.
//!
//! A family deforms a degree-`g-1` sheaf `I` by letting its gluing
//! constants become series `λ_j(t)` and by moving finitely many smooth
//! points, `𝓘_t = I(D_t - D_0)` with `D_t = Σ p_k(t)`. After twisting by an
//! auxiliary divisor `E` with `H^1(I(E)) = 0`, the cohomology of the family
//! is computed by the two-term complex `H^0(𝓘(E)) -> 𝓘(E)|_E`, a square
//! matrix `Φ` over `K[t]/(t^{N+1})`. Its cokernel is `H^1(𝓘)`, so the
//! pullback of `Θ` has order `ord_t det Φ`.

use std::collections::BTreeMap;

use rand::Rng;

use crate::curve::{self, random_smooth_point, twist_by_point, RationalNodalCurve, TfSheaf, ThetaReport};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::Matrix;
use crate::random::{rng_for, small_int, small_nonzero};
use crate::smith::smith_exponents;
use crate::univariate::TruncSeries;

/// Default truncation order of the base ring.
pub const DEFAULT_PRECISION: usize = 16;

/// Redraws of the auxiliary divisor or of general points before giving up.
pub const GENERICITY_BUDGET: usize = 20;

/// A smooth point moving along `trajectory`, with `trajectory(0) = base`.
#[derive(Clone, Debug, PartialEq)]
pub struct MovingPoint<K> {
    pub base: K,
    pub trajectory: TruncSeries<K>,
}

/// A family `𝓘` over `K[t]/(t^{N+1})` with special fiber `base`.
#[derive(Clone, Debug, PartialEq)]
pub struct SheafFamily<K> {
    base: TfSheaf<K>,
    precision: usize,
    gluing: BTreeMap<usize, TruncSeries<K>>,
    moving: Vec<MovingPoint<K>>,
}

impl<K: Field> SheafFamily<K> {
    pub fn new(
        curve: &RationalNodalCurve<K>,
        base: TfSheaf<K>,
        precision: usize,
        gluing: BTreeMap<usize, TruncSeries<K>>,
        moving: Vec<MovingPoint<K>>,
    ) -> Result<Self> {
        // Validates that the base sheaf lives on this curve.
        curve::cohomology(curve, &base)?;
        let mut full = BTreeMap::new();
        for (&j, lambda) in base.gluing() {
            let series = match gluing.get(&j) {
                Some(s) => s.with_precision(precision.min(s.precision())),
                None => TruncSeries::constant(lambda.clone(), precision),
            };
            if series.precision() < precision {
                return Err(Error::InvalidFamily(format!("gluing at node {j} has precision below {precision}")));
            }
            if series.constant_term() != lambda {
                return Err(Error::InvalidFamily(format!("gluing series at node {j} does not start at λ_{j}")));
            }
            full.insert(j, series);
        }
        if let Some(j) = gluing.keys().find(|j| !base.gluing().contains_key(j)) {
            return Err(Error::InvalidFamily(format!("node {j} has no gluing in the base sheaf")));
        }
        let mut seen: Vec<&K> = Vec::new();
        for m in &moving {
            if !curve.is_smooth_point(&m.base) {
                return Err(Error::PointAtNode(m.base.to_exact_string()));
            }
            if seen.contains(&&m.base) {
                return Err(Error::InvalidFamily(format!("moving point {} listed twice", m.base.to_exact_string())));
            }
            seen.push(&m.base);
            if m.trajectory.constant_term() != &m.base || m.trajectory.precision() < precision {
                return Err(Error::InvalidFamily(format!(
                    "trajectory of {} must start there and have precision {precision}",
                    m.base.to_exact_string()
                )));
            }
        }
        let moving = moving
            .into_iter()
            .map(|m| MovingPoint { trajectory: m.trajectory.with_precision(precision), base: m.base })
            .collect();
        Ok(SheafFamily { base, precision, gluing: full, moving })
    }

    /// The trivial deformation of `base`.
    pub fn constant(curve: &RationalNodalCurve<K>, base: TfSheaf<K>, precision: usize) -> Result<Self> {
        Self::new(curve, base, precision, BTreeMap::new(), Vec::new())
    }

    pub fn base(&self) -> &TfSheaf<K> {
        &self.base
    }

    pub fn precision(&self) -> usize {
        self.precision
    }

    pub fn gluing(&self) -> &BTreeMap<usize, TruncSeries<K>> {
        &self.gluing
    }

    pub fn moving(&self) -> &[MovingPoint<K>] {
        &self.moving
    }

    /// The same family modulo `t^{precision+1}`.
    pub fn truncated(&self, precision: usize) -> Self {
        let precision = precision.min(self.precision);
        SheafFamily {
            base: self.base.clone(),
            precision,
            gluing: self.gluing.iter().map(|(&j, s)| (j, s.with_precision(precision))).collect(),
            moving: self
                .moving
                .iter()
                .map(|m| MovingPoint { base: m.base.clone(), trajectory: m.trajectory.with_precision(precision) })
                .collect(),
        }
    }

    /// `h(z) = Π_k (z - p_k)/(z - p_k(t))` at a scalar away from the `p_k`.
    fn moving_factor(&self, z: &K) -> TruncSeries<K> {
        let n = self.precision;
        self.moving.iter().fold(TruncSeries::one(n), |acc, m| {
            let den = &TruncSeries::constant(z.clone(), n) - &m.trajectory;
            let num = z.clone() - m.base.clone();
            let inv = den.inv().expect("z differs from the base of every moving point");
            &acc * &inv.scale(&num)
        })
    }
}

/// How to choose the auxiliary divisor `E`.
#[derive(Clone, Debug, PartialEq)]
pub enum AuxDivisor<K> {
    /// `g` random smooth points drawn from the seed, redrawn until
    /// `H^1(I(E)) = 0`.
    Seeded(u64),
    /// Explicit distinct smooth points.
    Points(Vec<K>),
}

/// Output of [`family_cohomology`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyCohomology<K> {
    /// `h^0` of the special fiber, read off `Φ(0)`.
    pub h0_rank: usize,
    /// Positive elementary divisor exponents of `Φ`.
    pub exponents: Vec<usize>,
    /// `ord_t det Φ`, the order of `Θ` pulled back to the family.
    pub theta_order: usize,
    pub aux: Vec<K>,
}

/// Computes `Φ` and its elementary divisors. Fails with
/// `IndeterminateAtTruncation` when `det Φ ≡ 0 mod t^{N+1}`.
///
/// Works modulo `t^{p+1}`, starting from `p = max(h^0(I), 1)` and doubling
/// up to `N`, and stops at the first `p` where `det Φ` is nonzero.
/// Elementary divisors of order at most `p` are already determined there,
/// and coefficient growth is much smaller.
pub fn family_cohomology<K: Field>(
    curve: &RationalNodalCurve<K>,
    family: &SheafFamily<K>,
    aux: &AuxDivisor<K>,
) -> Result<FamilyCohomology<K>> {
    let h0 = curve::h0(curve, &family.base)? as usize;
    let mut p = h0.max(1).min(family.precision);
    loop {
        match family_cohomology_at(curve, &family.truncated(p), aux) {
            Err(Error::IndeterminateAtTruncation(_)) if p < family.precision => p = (2 * p).min(family.precision),
            Err(Error::IndeterminateAtTruncation(_)) => return Err(Error::IndeterminateAtTruncation(family.precision)),
            other => return other,
        }
    }
}

fn family_cohomology_at<K: Field>(
    curve: &RationalNodalCurve<K>,
    family: &SheafFamily<K>,
    aux: &AuxDivisor<K>,
) -> Result<FamilyCohomology<K>> {
    let g = curve.genus() as i64;
    if family.base.total_degree() != g - 1 {
        return Err(Error::DegreeMismatch { degree: family.base.total_degree(), expected: g - 1 });
    }
    let nodes = curve.finite_nodes()?;
    let moving_bases: Vec<K> = family.moving.iter().map(|m| m.base.clone()).collect();
    match aux {
        AuxDivisor::Points(points) => {
            for (i, e) in points.iter().enumerate() {
                if !curve.is_smooth_point(e) {
                    return Err(Error::PointAtNode(e.to_exact_string()));
                }
                if points[..i].contains(e) || moving_bases.contains(e) {
                    return Err(Error::InvalidFamily(format!("auxiliary point {} is repeated", e.to_exact_string())));
                }
            }
            family_matrix(&nodes, family, points).map(|phi| finish(phi, family.precision, points.clone()))?
        }
        AuxDivisor::Seeded(seed) => {
            let mut rng = rng_for(*seed, 0);
            for _ in 0..GENERICITY_BUDGET {
                let mut points: Vec<K> = moving_bases.clone();
                for _ in 0..g {
                    let e = random_smooth_point(curve, &points, &mut rng);
                    points.push(e);
                }
                let points = points.split_off(moving_bases.len());
                match family_matrix(&nodes, family, &points) {
                    Ok(phi) => return finish(phi, family.precision, points),
                    Err(Error::H1Nonvanishing) => continue,
                    Err(e) => return Err(e),
                }
            }
            Err(Error::GenericityExhausted("no auxiliary divisor with H^1(I(E)) = 0".into()))
        }
    }
}

fn finish<K: Field>(phi: Vec<Vec<TruncSeries<K>>>, precision: usize, aux: Vec<K>) -> Result<FamilyCohomology<K>> {
    let smith = smith_exponents(&phi);
    let h0_rank = if phi.is_empty() {
        0
    } else {
        let at_zero = Matrix::from_rows(phi.iter().map(|r| r.iter().map(|x| x.constant_term().clone()).collect()).collect());
        at_zero.ncols() - at_zero.rank()
    };
    if h0_rank != smith.corank_at_zero() {
        return Err(Error::AssertionFailed("Smith corank disagrees with the rank of Φ(0)".into()));
    }
    let theta_order = smith.det_order().ok_or(Error::IndeterminateAtTruncation(precision))?;
    Ok(FamilyCohomology { h0_rank, exponents: smith.nonunit_exponents(), theta_order, aux })
}

/// `Φ = (s_k(e_i) h(e_i))` for a basis `s_k` of `H^0(𝓘(E))`.
fn family_matrix<K: Field>(
    nodes: &[(K, K)],
    family: &SheafFamily<K>,
    aux: &[K],
) -> Result<Vec<Vec<TruncSeries<K>>>> {
    let n = family.precision;
    let d = family.base.line_degree() + aux.len() as i64;
    if d < 0 {
        return Ok(Vec::new());
    }
    let d = d as usize;
    let weight = |z: &K| -> TruncSeries<K> {
        let denom = aux.iter().fold(K::one(), |acc, e| acc * (z.clone() - e.clone()));
        family.moving_factor(z).scale(&denom.inv())
    };
    let rows: Vec<Vec<TruncSeries<K>>> = family
        .gluing
        .iter()
        .map(|(&j, lambda)| {
            let (p, q) = &nodes[j];
            let a = weight(p);
            let b = lambda * &weight(q);
            curve::powers(p, d)
                .iter()
                .zip(curve::powers(q, d))
                .map(|(pk, qk)| &a.scale(pk) - &b.scale(&qk))
                .collect()
        })
        .collect();
    let basis = kernel_over_ring(rows, d + 1, n)?;
    Ok(aux
        .iter()
        .map(|e| {
            let he = family.moving_factor(e);
            let pw = curve::powers(e, d);
            basis
                .iter()
                .map(|s| {
                    let val = s.iter().zip(&pw).fold(TruncSeries::zero(n), |acc, (c, ek)| &acc + &c.scale(ek));
                    &val * &he
                })
                .collect()
        })
        .collect())
}

/// Kernel of a matrix over `K[t]/(t^{N+1})` whose reduction at `t = 0` has
/// full row rank; fails with `H1Nonvanishing` otherwise.
fn kernel_over_ring<K: Field>(
    mut rows: Vec<Vec<TruncSeries<K>>>,
    ncols: usize,
    precision: usize,
) -> Result<Vec<Vec<TruncSeries<K>>>> {
    let mut pivots: Vec<usize> = Vec::with_capacity(rows.len());
    for i in 0..rows.len() {
        let col = (0..ncols).find(|c| !pivots.contains(c) && rows[i][*c].is_unit()).ok_or(Error::H1Nonvanishing)?;
        let inv = rows[i][col].inv().expect("unit");
        rows[i] = rows[i].iter().map(|x| x * &inv).collect();
        for r in 0..rows.len() {
            if r == i || rows[r][col].is_zero() {
                continue;
            }
            let f = rows[r][col].clone();
            let pivot_row = rows[i].clone();
            for (x, y) in rows[r].iter_mut().zip(&pivot_row) {
                *x = &*x - &(&f * y);
            }
        }
        pivots.push(col);
    }
    Ok((0..ncols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![TruncSeries::zero(precision); ncols];
            v[free] = TruncSeries::one(precision);
            for (row, &pc) in rows.iter().zip(&pivots) {
                v[pc] = -&row[free];
            }
            v
        })
        .collect())
}

/// A family realizing `ord_t = h^0(I)`: the points of a general effective
/// divisor `D` of degree `h^0(I)` move with nonzero velocity.
pub fn make_minimal_family<K: Field>(
    curve: &RationalNodalCurve<K>,
    sheaf: &TfSheaf<K>,
    precision: usize,
    seed: u64,
) -> Result<SheafFamily<K>> {
    let report = curve::theta_invariants(curve, sheaf)?;
    let h = report.h0;
    if h == 0 {
        return SheafFamily::constant(curve, sheaf.clone(), precision);
    }
    let mut rng = rng_for(seed, 0);
    for _ in 0..GENERICITY_BUDGET {
        let mut points: Vec<K> = Vec::new();
        for _ in 0..h {
            let p = random_smooth_point(curve, &points, &mut rng);
            points.push(p);
        }
        let mut down = sheaf.clone();
        let mut up = sheaf.clone();
        for p in &points {
            down = twist_by_point(curve, &down, p, -1)?;
            up = twist_by_point(curve, &up, p, 1)?;
        }
        if curve::h0(curve, &down)? != 0 || curve::h0(curve, &up)? != h {
            continue;
        }
        let moving = points
            .into_iter()
            .map(|p| {
                let velocity = K::from_int(small_nonzero(&mut rng));
                let trajectory = TruncSeries::from_coeffs([p.clone(), velocity], precision);
                MovingPoint { base: p, trajectory }
            })
            .collect();
        return SheafFamily::new(curve, sheaf.clone(), precision, BTreeMap::new(), moving);
    }
    Err(Error::GenericityExhausted("no general divisor of degree h0".into()))
}

/// A random first-order-and-beyond deformation: every gluing gets random
/// higher coefficients, and with probability one half a random smooth
/// point moves.
pub fn random_family<K: Field>(
    curve: &RationalNodalCurve<K>,
    sheaf: &TfSheaf<K>,
    precision: usize,
    rng: &mut impl Rng,
) -> Result<SheafFamily<K>> {
    let gluing = sheaf
        .gluing()
        .iter()
        .map(|(&j, lambda)| {
            let coeffs = std::iter::once(lambda.clone()).chain((1..=precision).map(|_| K::from_int(small_int(rng))));
            (j, TruncSeries::from_coeffs(coeffs, precision))
        })
        .collect();
    let mut moving = Vec::new();
    if sheaf.gluing().is_empty() || rng.gen_bool(0.5) {
        let p = random_smooth_point(curve, &[], rng);
        let coeffs = std::iter::once(p.clone()).chain((1..=precision).map(|_| K::from_int(small_int(rng))));
        moving.push(MovingPoint { base: p, trajectory: TruncSeries::from_coeffs(coeffs, precision) });
    }
    SheafFamily::new(curve, sheaf.clone(), precision, gluing, moving)
}

/// Outcome of [`verify_theorem_a`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TheoremAReport {
    /// Invariants with the minimal family's exponents filled in.
    pub theta: ThetaReport,
    pub minimal_order: usize,
    /// Orders along random families; `None` when the order exceeds `N`.
    pub random_orders: Vec<Option<usize>>,
}

/// Checks `ord_x Θ = h^0(I)`: a minimal family attains `h^0` and random
/// families never go below it.
pub fn verify_theorem_a<K: Field>(
    curve: &RationalNodalCurve<K>,
    sheaf: &TfSheaf<K>,
    precision: usize,
    seed: u64,
    random_families: usize,
) -> Result<TheoremAReport> {
    let mut theta = curve::theta_invariants(curve, sheaf)?;
    if theta.h0 == 0 {
        return Err(Error::NoSections);
    }
    let h = theta.h0 as usize;
    if precision < h {
        return Err(Error::InvalidArgument(format!("precision {precision} below h0 = {h}")));
    }
    let minimal = make_minimal_family(curve, sheaf, precision, seed)?;
    let fc = match family_cohomology(curve, &minimal, &AuxDivisor::Seeded(seed)) {
        Ok(fc) => fc,
        Err(Error::IndeterminateAtTruncation(_)) => {
            return Err(Error::AssertionFailed("minimal family has indeterminate theta order".into()))
        }
        Err(e) => return Err(e),
    };
    if fc.h0_rank != h || fc.theta_order != h {
        return Err(Error::AssertionFailed(format!(
            "minimal family: h0_rank {} and order {} but h0 = {h}",
            fc.h0_rank, fc.theta_order
        )));
    }
    let mut random_orders = Vec::with_capacity(random_families);
    for k in 0..random_families as u64 {
        let mut rng = rng_for(seed, k + 1);
        let family = random_family(curve, sheaf, precision, &mut rng)?;
        match family_cohomology(curve, &family, &AuxDivisor::Seeded(seed.wrapping_add(k + 1))) {
            Ok(r) => {
                if r.h0_rank != h || r.theta_order < h {
                    return Err(Error::AssertionFailed(format!(
                        "random family {k}: order {} below h0 = {h}",
                        r.theta_order
                    )));
                }
                random_orders.push(Some(r.theta_order));
            }
            Err(Error::IndeterminateAtTruncation(_)) => random_orders.push(None),
            Err(e) => return Err(e),
        }
    }
    theta.exponents = Some(fc.exponents);
    Ok(TheoremAReport { theta, minimal_order: fc.theta_order, random_orders })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{random_theta_point, sheaf_with_section};
    use num_rational::BigRational;
    use std::collections::BTreeSet;

    type Q = BigRational;

    fn q(n: i64) -> Q {
        Q::from_int(n)
    }

    fn genus_one() -> (RationalNodalCurve<Q>, TfSheaf<Q>) {
        let c = RationalNodalCurve::from_finite(vec![(q(0), q(1))]).unwrap();
        let s = TfSheaf::trivial(&c);
        (c, s)
    }

    #[test]
    fn hand_computed_gluing_family() {
        let (c, s) = genus_one();
        let lambda = TruncSeries::from_coeffs([q(1), q(1)], 16);
        let fam = SheafFamily::new(&c, s.clone(), 16, [(0, lambda)].into(), vec![]).unwrap();
        let fc = family_cohomology(&c, &fam, &AuxDivisor::Points(vec![q(2)])).unwrap();
        assert_eq!((fc.h0_rank, fc.theta_order, fc.exponents.clone()), (1, 1, vec![1]));

        let flat = SheafFamily::constant(&c, s, 16).unwrap();
        assert!(matches!(
            family_cohomology(&c, &flat, &AuxDivisor::Points(vec![q(2)])),
            Err(Error::IndeterminateAtTruncation(16))
        ));
    }

    #[test]
    fn higher_contact_gluing() {
        // λ(t) = 1 + t^3 meets Θ with order 3.
        let (c, s) = genus_one();
        let lambda = TruncSeries::from_coeffs([q(1), q(0), q(0), q(1)], 16);
        let fam = SheafFamily::new(&c, s, 16, [(0, lambda)].into(), vec![]).unwrap();
        let fc = family_cohomology(&c, &fam, &AuxDivisor::Seeded(4)).unwrap();
        assert_eq!(fc.theta_order, 3);
    }

    #[test]
    fn aux_divisor_independence() {
        let (c, s) = genus_one();
        let fam = make_minimal_family(&c, &s, 16, 2).unwrap();
        for aux in [vec![q(2)], vec![q(-7)], vec![q(2), q(5)]] {
            let fc = family_cohomology(&c, &fam, &AuxDivisor::Points(aux)).unwrap();
            assert_eq!(fc.theta_order, 1);
        }
    }

    #[test]
    fn family_validation() {
        let (c, s) = genus_one();
        let bad = TruncSeries::from_coeffs([q(2), q(1)], 16);
        assert!(SheafFamily::new(&c, s.clone(), 16, [(0, bad)].into(), vec![]).is_err());
        let at_node = MovingPoint { base: q(1), trajectory: TruncSeries::from_coeffs([q(1), q(1)], 16) };
        assert!(matches!(SheafFamily::new(&c, s.clone(), 16, BTreeMap::new(), vec![at_node]), Err(Error::PointAtNode(_))));
        let fam = SheafFamily::constant(&c, s, 16).unwrap();
        assert!(matches!(family_cohomology(&c, &fam, &AuxDivisor::Points(vec![q(0)])), Err(Error::PointAtNode(_))));
    }

    #[test]
    fn degree_mismatch() {
        let c = RationalNodalCurve::from_finite(vec![(q(0), q(1)), (q(2), q(3))]).unwrap();
        let s = TfSheaf::trivial(&c);
        let fam = SheafFamily::constant(&c, s, 8).unwrap();
        assert!(matches!(family_cohomology(&c, &fam, &AuxDivisor::Seeded(0)), Err(Error::DegreeMismatch { .. })));
    }

    #[test]
    fn off_theta_is_order_zero() {
        let c = RationalNodalCurve::from_finite(vec![(q(0), q(1))]).unwrap();
        let s = TfSheaf::new(&c, BTreeSet::new(), 0, [(0, q(3))].into()).unwrap();
        let fam = make_minimal_family(&c, &s, 16, 0).unwrap();
        let fc = family_cohomology(&c, &fam, &AuxDivisor::Seeded(0)).unwrap();
        assert_eq!((fc.h0_rank, fc.theta_order), (0, 0));
    }

    #[test]
    fn theorem_a_small_cases() {
        let c = RationalNodalCurve::from_finite(vec![(q(0), q(1)), (q(2), q(3))]).unwrap();
        let boundary = TfSheaf::new(&c, [0].into(), 0, [(1, q(1))].into()).unwrap();
        let r = verify_theorem_a(&c, &boundary, 16, 0, 3).unwrap();
        assert_eq!((r.minimal_order, r.theta.mult_theta), (1, 2));

        let lb = sheaf_with_section(&c, BTreeSet::new(), &[q(5), q(1)]).unwrap().unwrap();
        let r = verify_theorem_a(&c, &lb, 16, 1, 3).unwrap();
        assert_eq!(r.minimal_order, 1);

        let mut rng = rng_for(9, 0);
        let (c3, s3) = random_theta_point::<Q>(3, 0, true, &mut rng).unwrap();
        let r = verify_theorem_a(&c3, &s3, 16, 9, 3).unwrap();
        assert_eq!((r.minimal_order, r.theta.exponents), (2, Some(vec![1, 1])));
    }
}
