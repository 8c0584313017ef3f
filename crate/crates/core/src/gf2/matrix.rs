use crate::error::{Error, Result};

use super::bitvec::BitVector;
use super::solve::{self, Solution};

/// A binary matrix stored as sorted column-index lists, one per row.
///
/// Every matrix this library works with is row-sparse, so the row support
/// is the canonical representation; column structure is derived on demand.
/// Elimination-based operations (`rank`, `solve`) mirror the rows into a
/// bit-packed buffer internally.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseBinaryMatrix {
    cols: usize,
    row_supports: Vec<Vec<usize>>,
}

/// Row-weight bookkeeping for a matrix.
///
/// `density` is the total number of ones divided by `cols - rows`, the
/// convention for parity-check matrices of an `(n, n-m)` code. It is
/// undefined (`None`) when `rows >= cols`.
#[derive(Debug, Clone, PartialEq)]
pub struct RowWeightProfile {
    pub max_weight: usize,
    pub total_ones: usize,
    pub density: Option<f64>,
}

impl SparseBinaryMatrix {
    /// Builds a matrix from row supports, validating that every row is a
    /// strictly increasing list of column indices below `cols`.
    pub fn new(cols: usize, row_supports: Vec<Vec<usize>>) -> Result<Self> {
        for (i, row) in row_supports.iter().enumerate() {
            for (k, &c) in row.iter().enumerate() {
                if c >= cols {
                    return Err(Error::DimensionMismatch(format!(
                        "row {i}: column index {c} out of range (cols {cols})"
                    )));
                }
                if k > 0 && row[k - 1] >= c {
                    return Err(Error::InvalidConfig(format!(
                        "row {i}: support must be strictly increasing"
                    )));
                }
            }
        }
        Ok(SparseBinaryMatrix { cols, row_supports })
    }

    /// Internal constructor for rows already known to be sorted and in range.
    pub(crate) fn from_sorted_rows(cols: usize, row_supports: Vec<Vec<usize>>) -> Self {
        debug_assert!(row_supports
            .iter()
            .all(|r| r.windows(2).all(|w| w[0] < w[1]) && r.iter().all(|&c| c < cols)));
        SparseBinaryMatrix { cols, row_supports }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseBinaryMatrix {
            cols,
            row_supports: vec![Vec::new(); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        SparseBinaryMatrix {
            cols: n,
            row_supports: (0..n).map(|i| vec![i]).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.row_supports.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row_support(&self, i: usize) -> &[usize] {
        &self.row_supports[i]
    }

    pub fn row_supports(&self) -> &[Vec<usize>] {
        &self.row_supports
    }

    pub fn row_weight(&self, i: usize) -> usize {
        self.row_supports[i].len()
    }

    pub fn max_row_weight(&self) -> usize {
        self.row_supports.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn total_ones(&self) -> usize {
        self.row_supports.iter().map(Vec::len).sum()
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.row_supports[row].binary_search(&col).is_ok()
    }

    pub fn column_weights(&self) -> Vec<usize> {
        let mut weights = vec![0usize; self.cols];
        for row in &self.row_supports {
            for &c in row {
                weights[c] += 1;
            }
        }
        weights
    }

    /// Matrix-vector product over GF(2): `result[i]` is the XOR of `x` over
    /// row `i`'s support.
    pub fn mat_vec_mul(&self, x: &BitVector) -> Result<BitVector> {
        if self.cols != x.len() {
            return Err(Error::DimensionMismatch(format!(
                "mat_vec_mul: matrix has {} cols, vector has length {}",
                self.cols,
                x.len()
            )));
        }
        let mut out = BitVector::zeros(self.rows());
        for (i, row) in self.row_supports.iter().enumerate() {
            let mut acc = false;
            for &j in row {
                acc ^= x.get(j);
            }
            if acc {
                out.set(i, true);
            }
        }
        Ok(out)
    }

    /// Matrix product over GF(2): row `i` of the result is the XOR of the
    /// `rhs` rows selected by row `i` of `self`.
    pub fn mat_mul(&self, rhs: &SparseBinaryMatrix) -> Result<SparseBinaryMatrix> {
        if self.cols != rhs.rows() {
            return Err(Error::DimensionMismatch(format!(
                "mat_mul: lhs has {} cols, rhs has {} rows",
                self.cols,
                rhs.rows()
            )));
        }
        let words = rhs.cols().div_ceil(64);
        let mut acc = vec![0u64; words];
        let mut out_rows = Vec::with_capacity(self.rows());
        for row in &self.row_supports {
            for &j in row {
                for &c in rhs.row_support(j) {
                    acc[c / 64] ^= 1u64 << (c % 64);
                }
            }
            let mut support = Vec::new();
            for (wi, word) in acc.iter_mut().enumerate() {
                let mut w = *word;
                while w != 0 {
                    support.push(wi * 64 + w.trailing_zeros() as usize);
                    w &= w - 1;
                }
                *word = 0;
            }
            out_rows.push(support);
        }
        Ok(SparseBinaryMatrix::from_sorted_rows(rhs.cols(), out_rows))
    }

    /// GF(2) row rank.
    pub fn rank(&self) -> usize {
        solve::rank(self)
    }

    /// Solves `self * x = b` exactly. `Ambiguous` carries no witness.
    pub fn solve(&self, b: &BitVector) -> Result<Solution> {
        solve::solve(self, b, false)
    }

    /// Like [`solve`](Self::solve), but an `Ambiguous` system also returns
    /// one particular solution (free variables set to zero).
    pub fn solve_particular(&self, b: &BitVector) -> Result<Solution> {
        solve::solve(self, b, true)
    }

    pub fn row_weight_profile(&self) -> RowWeightProfile {
        let total_ones = self.total_ones();
        let density = if self.rows() < self.cols {
            Some(total_ones as f64 / (self.cols - self.rows()) as f64)
        } else {
            None
        };
        RowWeightProfile {
            max_weight: self.max_row_weight(),
            total_ones,
            density,
        }
    }
}
