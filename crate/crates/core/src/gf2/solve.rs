//! Gaussian elimination over GF(2) on a bit-packed mirror of the sparse rows.
//!
//! Pivoting is deterministic: for each column, the pivot is the first
//! not-yet-used row (lowest row index) carrying a one, so `solve` outputs
//! are reproducible.

use crate::error::{Error, Result};

use super::bitvec::BitVector;
use super::matrix::SparseBinaryMatrix;

/// Outcome of solving a linear system `Ax = b` over GF(2).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Solution {
    /// Exactly one solution; it satisfies `Ax = b` exactly.
    Unique(BitVector),
    /// Two or more solutions. The witness, when requested, is the particular
    /// solution with all free variables set to zero.
    Ambiguous(Option<BitVector>),
    /// No solution.
    Inconsistent,
}

/// Row-major bit-packed matrix used only inside elimination.
struct PackedRows {
    width: usize,
    words_per_row: usize,
    rows: Vec<u64>,
}

impl PackedRows {
    fn new(rows: usize, width: usize) -> Self {
        let words_per_row = width.div_ceil(64).max(1);
        PackedRows {
            width,
            words_per_row,
            rows: vec![0; rows * words_per_row],
        }
    }

    // words_per_row is at least 1 even for zero-width matrices
    fn row_count(&self) -> usize {
        self.rows.len() / self.words_per_row
    }

    fn get(&self, r: usize, c: usize) -> bool {
        debug_assert!(c < self.width);
        self.rows[r * self.words_per_row + c / 64] >> (c % 64) & 1 == 1
    }

    fn set(&mut self, r: usize, c: usize) {
        debug_assert!(c < self.width);
        self.rows[r * self.words_per_row + c / 64] |= 1u64 << (c % 64);
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let w = self.words_per_row;
        for k in 0..w {
            self.rows.swap(a * w + k, b * w + k);
        }
    }

    /// dst ^= src (dst != src)
    fn xor_rows(&mut self, dst: usize, src: usize) {
        debug_assert_ne!(dst, src);
        let w = self.words_per_row;
        let (d, s) = if dst < src {
            let (head, tail) = self.rows.split_at_mut(src * w);
            (&mut head[dst * w..dst * w + w], &tail[..w])
        } else {
            let (head, tail) = self.rows.split_at_mut(dst * w);
            (&mut tail[..w], &head[src * w..src * w + w])
        };
        for k in 0..w {
            d[k] ^= s[k];
        }
    }
}

fn pack(matrix: &SparseBinaryMatrix, rhs: Option<&BitVector>) -> PackedRows {
    let width = matrix.cols() + usize::from(rhs.is_some());
    let mut packed = PackedRows::new(matrix.rows(), width);
    for (i, row) in matrix.row_supports().iter().enumerate() {
        for &c in row {
            packed.set(i, c);
        }
        if let Some(b) = rhs {
            if b.get(i) {
                packed.set(i, matrix.cols());
            }
        }
    }
    packed
}

/// Reduced row echelon form restricted to the first `cols` columns.
/// Returns the pivot column of each pivot row, in order.
fn rref(packed: &mut PackedRows, cols: usize) -> Vec<usize> {
    let rows = packed.row_count();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..cols {
        if r == rows {
            break;
        }
        let Some(pivot_row) = (r..rows).find(|&i| packed.get(i, col)) else {
            continue;
        };
        packed.swap_rows(r, pivot_row);
        for i in 0..rows {
            if i != r && packed.get(i, col) {
                packed.xor_rows(i, r);
            }
        }
        pivots.push(col);
        r += 1;
    }
    pivots
}

pub(super) fn rank(matrix: &SparseBinaryMatrix) -> usize {
    let mut packed = pack(matrix, None);
    rref(&mut packed, matrix.cols()).len()
}

pub(super) fn solve(
    matrix: &SparseBinaryMatrix,
    b: &BitVector,
    want_witness: bool,
) -> Result<Solution> {
    if matrix.rows() != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "solve: matrix has {} rows, rhs has length {}",
            matrix.rows(),
            b.len()
        )));
    }
    let cols = matrix.cols();
    let mut packed = pack(matrix, Some(b));
    let pivots = rref(&mut packed, cols);
    let rank = pivots.len();

    // Any row past the pivots is all-zero on the coefficient side; a one in
    // its rhs bit makes the system inconsistent.
    for r in rank..matrix.rows() {
        if packed.get(r, cols) {
            return Ok(Solution::Inconsistent);
        }
    }

    let witness = |packed: &PackedRows| {
        let mut x = BitVector::zeros(cols);
        for (r, &c) in pivots.iter().enumerate() {
            if packed.get(r, cols) {
                x.set(c, true);
            }
        }
        x
    };

    if rank == cols {
        let x = witness(&packed);
        debug_assert_eq!(&matrix.mat_vec_mul(&x).unwrap(), b);
        Ok(Solution::Unique(x))
    } else if want_witness {
        let x = witness(&packed);
        debug_assert_eq!(&matrix.mat_vec_mul(&x).unwrap(), b);
        Ok(Solution::Ambiguous(Some(x)))
    } else {
        Ok(Solution::Ambiguous(None))
    }
}
