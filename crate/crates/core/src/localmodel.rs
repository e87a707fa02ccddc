//! The standard nodal local ring
//! `O_std = (⊗_i K[[u_i, v_i]]/(u_i v_i)) ⊗ (⊗_j K[[w_j]])`.
//!
//! Variables are named `u1..un, v1..vn, w1..wm` in that order. An element
//! is kept in normal form: no stored monomial contains both `u_i` and `v_i`.
//! The normalization of `O_std` is a product of `2^n` power series rings,
//! one per [`BranchIndex`]; the branch keeping `u_i` sets `v_i = 0`.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::parse::parse_series;
use crate::powerseries::{vars, Monomial, PowerSeries, Vars, MAX_VARS};

/// Shape of a standard model: `n` nodes and `m` smooth coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LocalModel {
    n: usize,
    m: usize,
}

impl LocalModel {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        if 2 * n + m == 0 {
            return Err(Error::InvalidModel("2n + m must be at least 1".into()));
        }
        if 2 * n + m > MAX_VARS {
            return Err(Error::TooManyVariables(2 * n + m));
        }
        Ok(LocalModel { n, m })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Krull dimension `n + m`.
    pub fn dimension(&self) -> usize {
        self.n + self.m
    }

    pub fn nvars(&self) -> usize {
        2 * self.n + self.m
    }

    pub fn var_names(&self) -> Vec<String> {
        let mut names = Vec::with_capacity(self.nvars());
        names.extend((1..=self.n).map(|i| format!("u{i}")));
        names.extend((1..=self.n).map(|i| format!("v{i}")));
        names.extend((1..=self.m).map(|j| format!("w{j}")));
        names
    }

    pub fn vars(&self) -> Vars {
        vars(&self.var_names())
    }

    /// Index of `u_{i+1}` (zero-based node `i`).
    pub fn u(&self, i: usize) -> usize {
        i
    }

    pub fn v(&self, i: usize) -> usize {
        self.n + i
    }

    pub fn w(&self, j: usize) -> usize {
        2 * self.n + j
    }

    /// Indices of the node coordinates; their vanishing defines the locally
    /// trivial locus `Z`.
    pub fn z_ideal_indices(&self) -> Vec<usize> {
        (0..2 * self.n).collect()
    }

    /// The relations `u_i v_i`.
    pub fn relations<K: Field>(&self, truncation: u32) -> Vec<PowerSeries<K>> {
        (0..self.n)
            .map(|i| {
                let m = Monomial::var(self.u(i)).mul(&Monomial::var(self.v(i)));
                PowerSeries::from_terms(self.vars(), [(m, K::one())], truncation).expect("validated size")
            })
            .collect()
    }

    /// All `2^n` branches in canonical order (node 1 most significant,
    /// keep-u before keep-v).
    pub fn branches(&self) -> Vec<BranchIndex> {
        (0..1usize << self.n)
            .map(|bits| {
                BranchIndex(
                    (0..self.n)
                        .map(|i| if bits >> (self.n - 1 - i) & 1 == 0 { NodeChoice::KeepU } else { NodeChoice::KeepV })
                        .collect(),
                )
            })
            .collect()
    }

    /// Parses an element written in the model's variables.
    pub fn parse<K: Field>(&self, src: &str, truncation: u32) -> Result<ModelElement<K>> {
        reduce(*self, &parse_series(src, &self.vars(), truncation)?)
    }
}

impl fmt::Display for LocalModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={},m={}", self.n, self.m)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeChoice {
    KeepU,
    KeepV,
}

/// One branch of the normalization: for each node, which coordinate
/// survives.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BranchIndex(pub Vec<NodeChoice>);

impl BranchIndex {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Indices of the model variables set to zero on this branch.
    pub fn discarded(&self, model: &LocalModel) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .map(|(i, c)| match c {
                NodeChoice::KeepU => model.v(i),
                NodeChoice::KeepV => model.u(i),
            })
            .collect()
    }

    /// Indices of the model variables that survive, in branch order.
    pub fn kept(&self, model: &LocalModel) -> Vec<usize> {
        let mut kept: Vec<usize> = self
            .0
            .iter()
            .enumerate()
            .map(|(i, c)| match c {
                NodeChoice::KeepU => model.u(i),
                NodeChoice::KeepV => model.v(i),
            })
            .collect();
        kept.extend((0..model.m()).map(|j| model.w(j)));
        kept
    }
}

impl fmt::Display for BranchIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "-");
        }
        for c in &self.0 {
            write!(f, "{}", if *c == NodeChoice::KeepU { 'u' } else { 'v' })?;
        }
        Ok(())
    }
}

/// An element of `O_std` in normal form.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelElement<K> {
    model: LocalModel,
    series: PowerSeries<K>,
}

/// Normal form of `f` modulo the relations `u_i v_i`.
pub fn reduce<K: Field>(model: LocalModel, f: &PowerSeries<K>) -> Result<ModelElement<K>> {
    if f.vars() != &model.vars() {
        return Err(Error::VariableMismatch(f.vars().to_vec(), model.var_names()));
    }
    let terms = f.terms().filter(|(m, _)| (0..model.n).all(|i| m.exponent(model.u(i)) == 0 || m.exponent(model.v(i)) == 0));
    let series = PowerSeries::from_terms(f.vars().clone(), terms.map(|(m, c)| (*m, c.clone())), f.truncation())?;
    Ok(ModelElement { model, series })
}

/// Branch orders of an element, in canonical branch order.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchOrders {
    /// `None` marks a branch on which the element vanishes to truncation.
    pub entries: Vec<(BranchIndex, Option<u32>)>,
    pub truncation: u32,
}

impl BranchOrders {
    pub fn vanishing_branches(&self) -> Vec<&BranchIndex> {
        self.entries.iter().filter(|(_, o)| o.is_none()).map(|(b, _)| b).collect()
    }

    pub fn min_order(&self) -> Option<u32> {
        self.entries.iter().filter_map(|(_, o)| *o).min()
    }
}

impl<K: Field> ModelElement<K> {
    pub fn model(&self) -> &LocalModel {
        &self.model
    }

    pub fn series(&self) -> &PowerSeries<K> {
        &self.series
    }

    pub fn truncation(&self) -> u32 {
        self.series.truncation()
    }

    pub fn is_zero(&self) -> bool {
        self.series.is_zero()
    }

    /// Image in the power series ring of one branch, over the branch
    /// variables (kept node coordinates, then `w_j`).
    pub fn branch_project(&self, branch: &BranchIndex) -> Result<PowerSeries<K>> {
        if branch.len() != self.model.n {
            return Err(Error::InvalidArgument(format!(
                "branch index has length {}, model has {} nodes",
                branch.len(),
                self.model.n
            )));
        }
        let kept = branch.kept(&self.model);
        let names = self.model.var_names();
        let target = vars(&kept.iter().map(|&i| names[i].clone()).collect::<Vec<_>>());
        let mut map = vec![None; self.model.nvars()];
        for (pos, &i) in kept.iter().enumerate() {
            map[i] = Some(pos);
        }
        self.series.set_zero(&branch.discarded(&self.model)).remap(target, &map)
    }

    /// Orders of all branch projections.
    ///
    /// Errors when the element is zero. A branch on which the projection
    /// vanishes to the working truncation is reported as `None`; this is a
    /// statement at truncation `T`, not a proof of vanishing.
    pub fn branch_orders(&self) -> Result<BranchOrders> {
        if self.is_zero() {
            return Err(Error::ZeroSeries { truncation: self.truncation() });
        }
        let entries = self
            .model
            .branches()
            .into_iter()
            .map(|b| {
                let o = self.branch_project(&b)?.order();
                Ok((b, o))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(BranchOrders { entries, truncation: self.truncation() })
    }

    /// Restriction to the locus `Z` (all node coordinates zero).
    pub fn restrict_to_z(&self) -> PowerSeries<K> {
        self.series.set_zero(&self.model.z_ideal_indices())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        reduce(self.model, &self.series.try_add(&other.series)?)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        reduce(self.model, &self.series.try_mul(&other.series)?)
    }
}

impl<K: Field> fmt::Display for ModelElement<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.series)
    }
}
