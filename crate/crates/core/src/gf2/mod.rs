//! Exact linear algebra over GF(2): bit vectors, sparse row-major binary
//! matrices, rank/solve via Gaussian elimination, and a line-oriented text
//! format for matrices.

mod bitvec;
mod matrix;
mod solve;
mod text;

pub use bitvec::BitVector;
pub use matrix::{RowWeightProfile, SparseBinaryMatrix};
pub use solve::Solution;
pub use text::{matrix_from_text, matrix_to_text};

/// A query-answer vector in which individual positions may have been lost.
///
/// Entries are `Some(bit)` for answered queries and `None` for erased ones.
/// Erasures never flip a bit; an unerased entry always equals the original.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErasedVector {
    entries: Vec<Option<bool>>,
}

impl ErasedVector {
    pub fn from_entries(entries: Vec<Option<bool>>) -> Self {
        ErasedVector { entries }
    }

    /// All positions present (nothing erased).
    pub fn from_bitvector(v: &BitVector) -> Self {
        ErasedVector {
            entries: (0..v.len()).map(|i| Some(v.get(i))).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<bool> {
        self.entries[i]
    }

    pub fn is_erased(&self, i: usize) -> bool {
        self.entries[i].is_none()
    }

    pub fn erased_count(&self) -> usize {
        self.entries.iter().filter(|e| e.is_none()).count()
    }

    /// Iterator over `(position, bit)` for the unerased entries.
    pub fn known(&self) -> impl Iterator<Item = (usize, bool)> + '_ {
        self.entries
            .iter()
            .enumerate()
            .filter_map(|(i, e)| e.map(|b| (i, b)))
    }
}
