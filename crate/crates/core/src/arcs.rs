//! Test arcs `Spec K[[t]] -> V` centered at the origin.
//!
//! An arc is given by the images of the coordinates, truncated modulo
//! `t^{N+1}`, each with zero constant term. On a standard model the images
//! of `u_i` and `v_i` cannot both be nonzero because `K[[t]]` is a domain.
//! The contact order of a divisor `V(f)` along an arc is the `t`-order of
//! the pulled-back equation.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::localmodel::{BranchIndex, LocalModel, ModelElement};
use crate::multiplicity::{ord_at_origin, RingSpec};
use crate::powerseries::{vars, PowerSeries, Vars};
use crate::random::{arc_series, rng_for, small_int};
use crate::univariate::TruncSeries;

/// Retry budget for generic directions.
pub const MAX_DIRECTION_ATTEMPTS: usize = 1000;

fn t_vars() -> Vars {
    vars(&["t"])
}

/// Contact order of a divisor along an arc.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Contact {
    Finite(u32),
    /// The pulled-back equation vanishes modulo `t^{N+1}`: the arc lies in
    /// the divisor to this precision.
    InsideDivisor,
}

impl Contact {
    pub fn finite(self) -> Option<u32> {
        match self {
            Contact::Finite(c) => Some(c),
            Contact::InsideDivisor => None,
        }
    }
}

fn check_image<K: Field>(name: &str, img: &PowerSeries<K>) -> Result<()> {
    if img.nvars() != 1 {
        return Err(Error::InvalidArgument(format!("image of `{name}` must be univariate")));
    }
    if !img.constant_term().is_zero() {
        return Err(Error::NonzeroConstantTerm(name.to_string()));
    }
    Ok(())
}

/// An arc into a standard model.
#[derive(Clone, Debug, PartialEq)]
pub struct TestArc<K> {
    model: LocalModel,
    images: Vec<TruncSeries<K>>,
}

/// Validates arc data on a standard model.
pub fn make_arc<K: Field>(model: LocalModel, images: &[PowerSeries<K>], n: u32) -> Result<TestArc<K>> {
    let names = model.var_names();
    if images.len() != names.len() {
        return Err(Error::InvalidArgument(format!("expected {} images, got {}", names.len(), images.len())));
    }
    for (name, img) in names.iter().zip(images) {
        check_image(name, img)?;
    }
    let precision = images.iter().map(PowerSeries::truncation).fold(n, u32::min) as usize;
    let dense: Vec<TruncSeries<K>> = images.iter().map(|s| s.to_univariate(precision)).collect();
    TestArc::from_dense(model, dense)
}

impl<K: Field> TestArc<K> {
    fn from_dense(model: LocalModel, images: Vec<TruncSeries<K>>) -> Result<Self> {
        for i in 0..model.n() {
            if !images[model.u(i)].is_zero() && !images[model.v(i)].is_zero() {
                return Err(Error::NodeConstraint(i + 1));
            }
        }
        Ok(TestArc { model, images })
    }

    pub fn model(&self) -> &LocalModel {
        &self.model
    }

    pub fn precision(&self) -> usize {
        self.images[0].precision()
    }

    pub fn images(&self) -> &[TruncSeries<K>] {
        &self.images
    }

    pub fn image_series(&self) -> Vec<PowerSeries<K>> {
        self.images.iter().map(|s| PowerSeries::from_univariate(t_vars(), s).expect("one variable")).collect()
    }

    /// Whether every node coordinate maps to zero, i.e. the arc factors
    /// through the locally trivial locus `Z`.
    pub fn factors_through_z(&self) -> bool {
        self.model.z_ideal_indices().iter().all(|&i| self.images[i].is_zero())
    }

    /// The same arc at a lower precision.
    pub fn truncate(&self, n: usize) -> Self {
        let n = n.min(self.precision());
        TestArc { model: self.model, images: self.images.iter().map(|s| s.with_precision(n)).collect() }
    }

    pub fn pull_back(&self, f: &ModelElement<K>) -> Result<TruncSeries<K>> {
        if f.model() != &self.model {
            return Err(Error::InvalidArgument("element and arc live on different models".into()));
        }
        let prec = self.precision().min(f.truncation() as usize);
        Ok(f.series().substitute_dense(&self.images, prec))
    }
}

/// Contact order `ord_t f(arc(t))`.
pub fn arc_contact<K: Field>(arc: &TestArc<K>, f: &ModelElement<K>) -> Result<Contact> {
    if f.is_zero() {
        return Err(Error::ZeroSeries { truncation: f.truncation() });
    }
    Ok(contact_from(&arc.pull_back(f)?))
}

/// Contact order where the arc is assumed not to factor through the divisor.
pub fn arc_contact_strict<K: Field>(arc: &TestArc<K>, f: &ModelElement<K>) -> Result<u32> {
    match arc_contact(arc, f)? {
        Contact::Finite(c) => Ok(c),
        Contact::InsideDivisor => Err(Error::ArcInsideDivisor(arc.precision())),
    }
}

fn contact_from<K: Field>(s: &TruncSeries<K>) -> Contact {
    match s.order() {
        Some(o) => Contact::Finite(o as u32),
        None => Contact::InsideDivisor,
    }
}

/// An arc into an arbitrary quotient `K[[x]]/I`.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneralArc<K> {
    spec: RingSpec<K>,
    images: Vec<TruncSeries<K>>,
}

pub fn make_general_arc<K: Field>(spec: &RingSpec<K>, images: &[PowerSeries<K>], n: u32) -> Result<GeneralArc<K>> {
    if images.len() != spec.vars().len() {
        return Err(Error::InvalidArgument(format!(
            "expected {} images, got {}",
            spec.vars().len(),
            images.len()
        )));
    }
    for (name, img) in spec.vars().iter().zip(images) {
        check_image(name, img)?;
    }
    let precision = images.iter().map(PowerSeries::truncation).fold(n, u32::min) as usize;
    let dense = images.iter().map(|s| s.to_univariate(precision)).collect();
    GeneralArc::from_dense(spec.clone(), dense)
}

impl<K: Field> GeneralArc<K> {
    pub fn from_dense(spec: RingSpec<K>, images: Vec<TruncSeries<K>>) -> Result<Self> {
        let precision = images.first().map_or(0, TruncSeries::precision);
        for (index, rel) in spec.relations().iter().enumerate() {
            let p = precision.min(rel.truncation() as usize);
            if !rel.substitute_dense(&images, p).is_zero() {
                return Err(Error::RelationViolation { index, precision });
            }
        }
        Ok(GeneralArc { spec, images })
    }

    pub fn precision(&self) -> usize {
        self.images.first().map_or(0, TruncSeries::precision)
    }

    pub fn images(&self) -> &[TruncSeries<K>] {
        &self.images
    }

    pub fn contact(&self, f: &PowerSeries<K>) -> Result<Contact> {
        if f.vars() != self.spec.vars() {
            return Err(Error::VariableMismatch(f.vars().to_vec(), self.spec.vars().to_vec()));
        }
        if f.is_zero() {
            return Err(Error::ZeroSeries { truncation: f.truncation() });
        }
        let prec = self.precision().min(f.truncation() as usize);
        Ok(contact_from(&f.substitute_dense(&self.images, prec)))
    }
}

/// A generic linear arc on a branch of minimal order.
#[derive(Clone, Debug, PartialEq)]
pub struct MinimalArc<K> {
    pub arc: TestArc<K>,
    pub branch: BranchIndex,
    pub contact: u32,
    pub attempts: usize,
}

/// Draws directions `a` until `form(a) != 0`.
fn generic_direction<K: Field>(form: &PowerSeries<K>, rng: &mut impl Rng) -> Result<(Vec<K>, usize)> {
    for attempt in 1..=MAX_DIRECTION_ATTEMPTS {
        let a: Vec<K> = (0..form.nvars()).map(|_| K::from_int(small_int(rng))).collect();
        if !form.eval(&a).is_zero() {
            return Ok((a, attempt));
        }
    }
    Err(Error::DirectionsExhausted(MAX_DIRECTION_ATTEMPTS))
}

fn linear_arc<K: Field>(model: LocalModel, coords: &[usize], dir: &[K], n: usize) -> Result<TestArc<K>> {
    let mut images = vec![TruncSeries::zero(n); model.nvars()];
    for (&i, a) in coords.iter().zip(dir) {
        images[i] = TruncSeries::monomial(a.clone(), 1, n);
    }
    TestArc::from_dense(model, images)
}

fn check_nonunit<K: Field>(f: &ModelElement<K>) -> Result<u32> {
    let ord = ord_at_origin(f)?;
    if ord == 0 {
        return Err(Error::UnitIdeal(0));
    }
    Ok(ord)
}

/// An arc whose contact with `V(f)` equals `ord(f)`.
///
/// Picks the first branch of minimal order and a linear arc `x_k ↦ a_k t`
/// on it with the branch leading form nonvanishing at `a`.
pub fn minimal_arc<K: Field>(f: &ModelElement<K>, n: u32, seed: u64) -> Result<MinimalArc<K>> {
    let ord = check_nonunit(f)?;
    if n < ord {
        return Err(Error::InvalidArgument(format!("arc truncation {n} is below ord(f) = {ord}")));
    }
    let model = *f.model();
    let orders = f.branch_orders()?;
    let (branch, _) = orders
        .entries
        .iter()
        .find(|(_, o)| *o == Some(ord))
        .cloned()
        .ok_or_else(|| Error::AssertionFailed("no branch attains ord(f)".into()))?;
    let form = f.branch_project(&branch)?.leading_form()?.form;
    let mut rng = rng_for(seed, 0);
    let (dir, attempts) = generic_direction(&form, &mut rng)?;
    let arc = linear_arc(model, &branch.kept(&model), &dir, n as usize)?;
    let contact = arc_contact_strict(&arc, f)?;
    if contact != ord {
        return Err(Error::AssertionFailed(format!("minimal arc has contact {contact}, ord(f) = {ord}")));
    }
    Ok(MinimalArc { arc, branch, contact, attempts })
}

/// Outcome of the search for a minimal arc factoring through `Z`.
#[derive(Clone, Debug, PartialEq)]
pub enum ThroughZ<K> {
    Found { arc: TestArc<K>, contact: u32 },
    /// No arc through `Z` attains `ord(f)`. `best_contact` is the minimal
    /// contact over arcs through `Z` (the order of `f|_Z`), `None` when `f`
    /// vanishes on `Z` to truncation.
    NoneFound { best_contact: Option<u32>, ord: u32 },
}

/// Searches arcs with all node coordinates mapped to zero.
///
/// Every such arc factors through `Z`, so its contact is at least the order
/// of `f|_Z`, and a generic linear arc in the smooth coordinates attains it.
pub fn minimal_arc_through_z<K: Field>(f: &ModelElement<K>, n: u32, seed: u64) -> Result<ThroughZ<K>> {
    let ord = check_nonunit(f)?;
    let model = *f.model();
    let restricted = f.restrict_to_z();
    let Some(z_ord) = restricted.order() else {
        return Ok(ThroughZ::NoneFound { best_contact: None, ord });
    };
    if n < z_ord {
        return Err(Error::InvalidArgument(format!("arc truncation {n} is below ord(f|Z) = {z_ord}")));
    }
    let w: Vec<usize> = (0..model.m()).map(|j| model.w(j)).collect();
    let form = restricted.homogeneous_part(z_ord);
    let mut rng = rng_for(seed, 0);
    let (full_dir, _) = generic_direction(&form, &mut rng)?;
    let dir: Vec<K> = w.iter().map(|&i| full_dir[i].clone()).collect();
    let arc = linear_arc(model, &w, &dir, n as usize)?;
    let contact = arc_contact_strict(&arc, f)?;
    if contact != z_ord {
        return Err(Error::AssertionFailed(format!("Z-arc contact {contact} differs from ord(f|Z) = {z_ord}")));
    }
    if contact == ord {
        Ok(ThroughZ::Found { arc, contact })
    } else {
        Ok(ThroughZ::NoneFound { best_contact: Some(contact), ord })
    }
}

/// Summary of a batch of sampled arcs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleReport {
    pub ord: u32,
    pub count: usize,
    /// Draws that landed inside the divisor to precision.
    pub inside: usize,
    pub min_contact: Option<u32>,
    /// Arcs with contact below `ord`; must be zero.
    pub violations: usize,
    /// Histogram `(contact, number of arcs)`, by increasing contact.
    pub histogram: Vec<(u32, usize)>,
}

impl SampleReport {
    fn from_contacts(ord: u32, contacts: Vec<Contact>) -> Self {
        let count = contacts.len();
        let finite: Vec<u32> = contacts.iter().filter_map(|c| c.finite()).collect();
        let mut histogram: Vec<(u32, usize)> = Vec::new();
        let mut sorted = finite.clone();
        sorted.sort_unstable();
        for c in sorted {
            match histogram.last_mut() {
                Some((v, k)) if *v == c => *k += 1,
                _ => histogram.push((c, 1)),
            }
        }
        SampleReport {
            ord,
            count,
            inside: count - finite.len(),
            min_contact: finite.iter().copied().min(),
            violations: finite.iter().filter(|&&c| c < ord).count(),
            histogram,
        }
    }
}

/// A random arc on a standard model: each node maps into one of its two
/// branches (or to the point), coordinates are random series.
pub fn random_arc<K: Field>(model: LocalModel, n: usize, rng: &mut impl Rng) -> TestArc<K> {
    let mut images: Vec<TruncSeries<K>> = (0..model.nvars()).map(|_| arc_series(rng, n)).collect();
    for i in 0..model.n() {
        match rng.gen_range(0..3) {
            0 => images[model.v(i)] = TruncSeries::zero(n),
            1 => images[model.u(i)] = TruncSeries::zero(n),
            _ => {
                images[model.u(i)] = TruncSeries::zero(n);
                images[model.v(i)] = TruncSeries::zero(n);
            }
        }
    }
    TestArc::from_dense(model, images).expect("node constraint holds by construction")
}

/// Samples `count` random arcs and checks `contact >= ord(f)` for each.
/// Arc `k` uses stream `k + 1` of `seed`.
pub fn sample_arcs_check<K: Field>(f: &ModelElement<K>, count: usize, n: u32, seed: u64) -> Result<SampleReport> {
    let ord = ord_at_origin(f)?;
    let model = *f.model();
    let contacts: Vec<Contact> = (0..count as u64)
        .into_par_iter()
        .map(|k| {
            let arc = random_arc(model, n as usize, &mut rng_for(seed, k + 1));
            arc_contact(&arc, f).expect("nonzero f on matching model")
        })
        .collect();
    Ok(SampleReport::from_contacts(ord, contacts))
}

/// Produces arc images for a parametrized family of arcs on a fixed ring.
pub trait ArcParametrization<K: Field>: Sync {
    fn images(&self, rng: &mut rand_chacha::ChaCha8Rng, n: usize) -> Vec<TruncSeries<K>>;
}

/// Arcs on the cusp cylinder `y^2 = x^3` in `(x, y, z)`:
/// `x = s^2, y = s^3, z = r` for random `s, r` without constant term.
#[derive(Clone, Copy, Debug, Default)]
pub struct CuspParametrization;

impl<K: Field> ArcParametrization<K> for CuspParametrization {
    fn images(&self, rng: &mut rand_chacha::ChaCha8Rng, n: usize) -> Vec<TruncSeries<K>> {
        let s: TruncSeries<K> = arc_series(rng, n);
        let r = arc_series(rng, n);
        vec![s.pow(2), s.pow(3), r]
    }
}

/// Samples parametrized arcs on `spec` and checks `contact >= ord` where
/// `ord` is supplied by the caller (e.g. from [`crate::multiplicity::oracle_order`]).
pub fn sample_general_arcs_check<K: Field, P: ArcParametrization<K>>(
    spec: &RingSpec<K>,
    f: &PowerSeries<K>,
    param: &P,
    ord: u32,
    count: usize,
    n: u32,
    seed: u64,
) -> Result<SampleReport> {
    let contacts: Vec<Result<Contact>> = (0..count as u64)
        .into_par_iter()
        .map(|k| {
            let images = param.images(&mut rng_for(seed, k + 1), n as usize);
            GeneralArc::from_dense(spec.clone(), images)?.contact(f)
        })
        .collect();
    Ok(SampleReport::from_contacts(ord, contacts.into_iter().collect::<Result<_>>()?))
}
