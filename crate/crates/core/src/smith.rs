//! Smith normal form over the truncated discrete valuation ring
//! `K[t]/(t^{N+1})`.
//!
//! Every nonzero element is `t^e · unit`, so elimination with a pivot of
//! minimal order never needs division by a non-unit. Only the exponents
//! are kept; the unimodular transforms are not needed by callers.

use crate::field::Field;
use crate::univariate::TruncSeries;

/// Elementary divisor exponents of a matrix over `K[t]/(t^{N+1})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithExponents {
    /// Exponents `e_1 <= e_2 <= ...` of the diagonal entries known to be
    /// nonzero at this precision.
    pub exponents: Vec<usize>,
    /// Diagonal entries that vanish modulo `t^{N+1}`.
    pub vanishing: usize,
    pub precision: usize,
}

impl SmithExponents {
    /// `ord_t det` for a square matrix, `None` when the determinant vanishes
    /// to precision.
    pub fn det_order(&self) -> Option<usize> {
        let sum: usize = self.exponents.iter().sum();
        (self.vanishing == 0 && sum <= self.precision).then_some(sum)
    }

    /// Dimension of the kernel of the reduction at `t = 0` (square case).
    pub fn corank_at_zero(&self) -> usize {
        self.vanishing + self.exponents.iter().filter(|&&e| e > 0).count()
    }

    /// Positive exponents only.
    pub fn nonunit_exponents(&self) -> Vec<usize> {
        self.exponents.iter().copied().filter(|&e| e > 0).collect()
    }
}

/// Smith-reduces `rows` (all entries at a common precision).
pub fn smith_exponents<K: Field>(rows: &[Vec<TruncSeries<K>>]) -> SmithExponents {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    let precision = rows.iter().flatten().map(TruncSeries::precision).min().unwrap_or(0);
    let mut m: Vec<Vec<TruncSeries<K>>> =
        rows.iter().map(|r| r.iter().map(|x| x.with_precision(precision)).collect()).collect();
    let steps = nrows.min(ncols);
    let mut exponents = Vec::new();
    for k in 0..steps {
        let best = (k..nrows)
            .flat_map(|i| (k..ncols).map(move |j| (i, j)))
            .filter_map(|(i, j)| m[i][j].order().map(|e| (e, i, j)))
            .min();
        let Some((e, pi, pj)) = best else {
            return SmithExponents { exponents, vanishing: steps - k, precision };
        };
        m.swap(k, pi);
        for row in m.iter_mut() {
            row.swap(k, pj);
        }
        let unit_inv = m[k][k].div_t_pow(e).inv().expect("minimal-order entry is t^e times a unit");
        for i in k + 1..nrows {
            if m[i][k].is_zero() {
                continue;
            }
            // Exact modulo t^{N+1-e}; every entry of row k has order >= e,
            // so the products below are exact modulo t^{N+1}.
            let factor = &m[i][k].div_t_pow(e) * &unit_inv;
            for j in k..ncols {
                let delta = &factor * &m[k][j];
                m[i][j] = &m[i][j] - &delta;
            }
        }
        exponents.push(e);
    }
    SmithExponents { exponents, vanishing: 0, precision }
}
