//! Exact dense and sparse linear algebra over a [`Field`].

use std::collections::HashMap;
use std::fmt;

use crate::field::Field;

/// Row-major dense matrix.
#[derive(Clone, PartialEq)]
pub struct Matrix<K> {
    rows: usize,
    cols: usize,
    data: Vec<K>,
}

impl<K: Field> Matrix<K> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![K::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = K::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<K>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[K] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &Matrix<K>) -> Matrix<K> {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Matrix { rows: self.rows + other.rows, cols: self.cols, data }
    }

    pub fn mul_vec(&self, v: &[K]) -> Vec<K> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row(i).iter().zip(v).fold(K::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect()
    }

    /// Reduced row echelon form and its pivot columns.
    pub fn rref(&self) -> (Matrix<K>, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else { continue };
            m.swap_rows(r, p);
            let inv = m[(r, c)].inv();
            for j in c..m.cols {
                m[(r, j)] = m[(r, j)].clone() * inv.clone();
            }
            for i in 0..m.rows {
                if i != r && !m[(i, c)].is_zero() {
                    let f = m[(i, c)].clone();
                    for j in c..m.cols {
                        let v = m[(r, j)].clone() * f.clone();
                        m[(i, j)] = m[(i, j)].clone() - v;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// A basis of the right kernel `{x : A x = 0}`.
    pub fn kernel(&self) -> Vec<Vec<K>> {
        let (m, pivots) = self.rref();
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|c| !pivots.contains(c)) {
            let mut v = vec![K::zero(); self.cols];
            v[free] = K::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[(r, free)].clone();
            }
            basis.push(v);
        }
        basis
    }

    /// Determinant by Bareiss fraction-free elimination.
    pub fn det(&self) -> K {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return K::one();
        }
        let mut m = self.clone();
        let mut sign = K::one();
        let mut prev = K::one();
        for k in 0..n - 1 {
            if m[(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !m[(i, k)].is_zero()) {
                    Some(p) => {
                        m.swap_rows(k, p);
                        sign = -sign;
                    }
                    None => return K::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = m[(i, j)].clone() * m[(k, k)].clone() - m[(i, k)].clone() * m[(k, j)].clone();
                    m[(i, j)] = v / prev.clone();
                }
                m[(i, k)] = K::zero();
            }
            prev = m[(k, k)].clone();
        }
        sign * m[(n - 1, n - 1)].clone()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }
}

impl<K> std::ops::Index<(usize, usize)> for Matrix<K> {
    type Output = K;
    fn index(&self, (i, j): (usize, usize)) -> &K {
        &self.data[i * self.cols + j]
    }
}

impl<K> std::ops::IndexMut<(usize, usize)> for Matrix<K> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut K {
        &mut self.data[i * self.cols + j]
    }
}

impl<K: Field> fmt::Debug for Matrix<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(Field::to_exact_string).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Sparse row, sorted by column.
pub type SparseRow<K> = Vec<(usize, K)>;

/// Incremental row echelon basis of a span of sparse vectors.
///
/// Each stored pivot row has leading coefficient one; inserting a row
/// reduces it against existing pivots on its leading column until it
/// either vanishes or exposes a new pivot.
#[derive(Debug, Default)]
pub struct SparseEchelon<K> {
    pivots: HashMap<usize, SparseRow<K>>,
}

impl<K: Field> SparseEchelon<K> {
    pub fn new() -> Self {
        SparseEchelon { pivots: HashMap::new() }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Reduces `row` fully along leading columns; returns the remainder.
    fn reduce(&self, mut row: SparseRow<K>) -> SparseRow<K> {
        while let Some((lead, c)) = row.first().cloned() {
            let Some(p) = self.pivots.get(&lead) else { break };
            row = axpy(&row, &c, p);
        }
        row
    }

    /// Inserts a row; returns whether the rank grew.
    pub fn insert(&mut self, row: SparseRow<K>) -> bool {
        let row = self.reduce(row);
        match row.first() {
            None => false,
            Some((lead, c)) => {
                let inv = c.inv();
                let lead = *lead;
                let row = row.into_iter().map(|(j, v)| (j, v * inv.clone())).collect();
                self.pivots.insert(lead, row);
                true
            }
        }
    }

    /// Whether `row` lies in the span.
    pub fn contains(&self, row: SparseRow<K>) -> bool {
        self.reduce(row).is_empty()
    }
}

/// `row - c * pivot`, where `pivot` has leading coefficient one.
fn axpy<K: Field>(row: &SparseRow<K>, c: &K, pivot: &SparseRow<K>) -> SparseRow<K> {
    let mut out = Vec::with_capacity(row.len() + pivot.len());
    let (mut i, mut j) = (0, 0);
    while i < row.len() || j < pivot.len() {
        let ci = row.get(i).map(|e| e.0);
        let cj = pivot.get(j).map(|e| e.0);
        match (ci, cj) {
            (Some(a), Some(b)) if a == b => {
                let v = row[i].1.clone() - c.clone() * pivot[j].1.clone();
                if !v.is_zero() {
                    out.push((a, v));
                }
                i += 1;
                j += 1;
            }
            (Some(a), Some(b)) if a < b => {
                out.push(row[i].clone());
                i += 1;
            }
            (Some(_), None) => {
                out.push(row[i].clone());
                i += 1;
            }
            (_, Some(b)) => {
                out.push((b, -(c.clone() * pivot[j].1.clone())));
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use proptest::prelude::*;

    use num_traits::Zero;

    type Q = BigRational;

    fn m(rows: &[&[i64]]) -> Matrix<Q> {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| Q::from_int(x)).collect()).collect())
    }

    #[test]
    fn rank_and_kernel() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(a.rank(), 2);
        let ker = a.kernel();
        assert_eq!(ker.len(), 1);
        assert!(a.mul_vec(&ker[0]).iter().all(|x| x.is_zero()));
    }

    #[test]
    fn determinants() {
        assert_eq!(m(&[&[2, 1], &[7, 4]]).det(), Q::from_int(1));
        assert_eq!(m(&[&[0, 1], &[1, 0]]).det(), Q::from_int(-1));
        assert_eq!(m(&[&[1, 2], &[2, 4]]).det(), Q::from_int(0));
        assert_eq!(Matrix::<Q>::zeros(0, 0).det(), Q::from_int(1));
    }

    #[test]
    fn sparse_echelon_span() {
        let mut e = SparseEchelon::<Q>::new();
        let q = Q::from_int;
        assert!(e.insert(vec![(0, q(1)), (2, q(1))]));
        assert!(e.insert(vec![(0, q(2)), (1, q(1))]));
        assert!(!e.insert(vec![(1, q(2)), (2, q(-4))]));
        assert!(e.contains(vec![(0, q(3)), (1, q(-1)), (2, q(5))]));
        assert!(!e.contains(vec![(2, q(1))]));
        assert_eq!(e.rank(), 2);
    }

    fn leibniz(a: &Matrix<Q>) -> Q {
        // Permutation expansion, independent of elimination.
        fn perms(n: usize) -> Vec<Vec<usize>> {
            if n == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for p in perms(n - 1) {
                for k in 0..=p.len() {
                    let mut q = p.clone();
                    q.insert(k, n - 1);
                    out.push(q);
                }
            }
            out
        }
        let n = a.nrows();
        let mut acc = Q::from_int(0);
        for p in perms(n) {
            let inversions = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
            let mut term = Q::from_int(if inversions % 2 == 0 { 1 } else { -1 });
            for (i, &j) in p.iter().enumerate() {
                term = term * a[(i, j)].clone();
            }
            acc = acc + term;
        }
        acc
    }

    proptest! {
        #[test]
        fn bareiss_matches_leibniz(n in 1usize..5, entries in prop::collection::vec(-3i64..=3, 16)) {
            let a = Matrix::from_rows((0..n).map(|i| (0..n).map(|j| Q::from_int(entries[i * 4 + j])).collect()).collect());
            prop_assert_eq!(a.det(), leibniz(&a));
        }

        #[test]
        fn sparse_rank_matches_dense(entries in prop::collection::vec(-2i64..=2, 20)) {
            let a = Matrix::from_rows((0..4).map(|i| (0..5).map(|j| Q::from_int(entries[i * 5 + j])).collect()).collect());
            let mut e = SparseEchelon::new();
            for i in 0..4 {
                e.insert(a.row(i).iter().cloned().enumerate().filter(|(_, x)| !x.is_zero()).collect());
            }
            prop_assert_eq!(e.rank(), a.rank());
            prop_assert_eq!(a.kernel().len(), 5 - a.rank());
        }
    }
}
