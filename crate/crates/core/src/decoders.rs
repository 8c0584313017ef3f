//! Label-recovery algorithms: exact maximum-likelihood syndrome decoding
//! (meet-in-the-middle coset-leader search), linear erasure recovery, and
//! the weight-window typical sets used in the error-floor argument for the
//! uniform query ensemble.
//!
//! For i.i.d. Ber(p) labels with p < 0.5, the ML estimate given a syndrome
//! `s = Ax` is the minimum-Hamming-weight member of the coset `{x : Ax = s}`.
//! Ties are surfaced as `Ambiguous` and never silently broken: a competing
//! minimum-weight preimage is exactly the error event the bounds are about.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::gf2::{BitVector, ErasedVector, Solution, SparseBinaryMatrix};

/// Largest column count the exhaustive-search decoders accept by default.
pub const DEFAULT_ML_CAP: usize = 28;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecodeStatus {
    Recovered,
    Ambiguous,
    Inconsistent,
}

/// Result of a decode attempt. `estimate` is present iff `Recovered`;
/// `coset_min_weight` is present whenever a weight search completed (it is
/// `None` for erasure decoding, which solves a linear system instead).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeResult {
    pub status: DecodeStatus,
    pub estimate: Option<BitVector>,
    pub coset_min_weight: Option<usize>,
}

impl DecodeResult {
    pub fn recovered(&self) -> bool {
        self.status == DecodeStatus::Recovered
    }
}

/// Weight windows around `n*p` with half-width `n*p*n^-exponent`.
///
/// Set A is the window with closed (inclusive) bounds as printed; set B is
/// A shrunk by one on both ends, so flipping any single bit of a B-member
/// stays inside A.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TypicalSetParams {
    pub n: usize,
    pub p: f64,
    pub exponent: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TypicalSet {
    A,
    B,
}

impl TypicalSetParams {
    /// Window with the standard exponent 1/3.
    pub fn new(n: usize, p: f64) -> Result<Self> {
        Self::with_exponent(n, p, 1.0 / 3.0)
    }

    pub fn with_exponent(n: usize, p: f64, exponent: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("typical set needs n >= 1".into()));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!(
                "typical set needs p in [0, 1], got {p}"
            )));
        }
        if exponent <= 0.0 {
            return Err(Error::Domain(format!(
                "typical set needs a positive exponent, got {exponent}"
            )));
        }
        Ok(TypicalSetParams { n, p, exponent })
    }

    fn raw_window(&self) -> (f64, f64) {
        let center = self.n as f64 * self.p;
        let spread = center * (self.n as f64).powf(-self.exponent);
        (center - spread, center + spread)
    }

    /// Inclusive real-valued bounds of set A, clipped to [0, n].
    pub fn window_a(&self) -> (f64, f64) {
        let (lo, hi) = self.raw_window();
        (lo.max(0.0), hi.min(self.n as f64))
    }

    /// Inclusive real-valued bounds of set B (A shrunk by 1), clipped.
    pub fn window_b(&self) -> (f64, f64) {
        let (lo, hi) = self.raw_window();
        ((lo + 1.0).max(0.0), (hi - 1.0).min(self.n as f64))
    }

    /// Whether a Hamming weight falls inside the chosen window.
    pub fn contains_weight(&self, weight: usize, set: TypicalSet) -> bool {
        let (lo, hi) = match set {
            TypicalSet::A => self.window_a(),
            TypicalSet::B => self.window_b(),
        };
        let w = weight as f64;
        w >= lo && w <= hi
    }
}

/// Membership of a concrete vector; `x.len()` must equal `params.n`.
pub fn typical_membership(x: &BitVector, params: &TypicalSetParams, set: TypicalSet) -> bool {
    assert_eq!(x.len(), params.n, "vector length must match typical-set n");
    params.contains_weight(x.weight(), set)
}

/// Columns of `a` that no query touches. Any label indexed by such a column
/// is information-theoretically unrecoverable up to complementation.
pub fn all_zero_columns(a: &SparseBinaryMatrix) -> Vec<usize> {
    a.column_weights()
        .iter()
        .enumerate()
        .filter_map(|(c, &w)| (w == 0).then_some(c))
        .collect()
}

/// Exact ML syndrome decoding for an i.i.d. Ber(p) source, p in (0, 0.5):
/// finds the minimum-weight x with `a x = s` by meet-in-the-middle
/// enumeration over the two column halves. `Ambiguous` means at least two
/// coset members share the minimum weight.
pub fn ml_syndrome_decode(
    a: &SparseBinaryMatrix,
    s: &BitVector,
    p: f64,
) -> Result<DecodeResult> {
    ml_syndrome_decode_with_cap(a, s, p, DEFAULT_ML_CAP)
}

pub fn ml_syndrome_decode_with_cap(
    a: &SparseBinaryMatrix,
    s: &BitVector,
    p: f64,
    cap: usize,
) -> Result<DecodeResult> {
    let search = MitmSearch::prepare(a, s, p, cap)?;
    Ok(search.run(None))
}

/// ML decoding restricted to the typical preimages: only coset members whose
/// weight lies in the A-window are considered. `Ambiguous` here means two or
/// more window members exist regardless of their weights, matching the error
/// event of the ensemble lower bound; `Inconsistent` means the window holds
/// no preimage at all.
pub fn ml_syndrome_decode_typical(
    a: &SparseBinaryMatrix,
    s: &BitVector,
    p: f64,
    params: &TypicalSetParams,
) -> Result<DecodeResult> {
    if params.n != a.cols() {
        return Err(Error::DimensionMismatch(format!(
            "typical-set n={} does not match matrix cols={}",
            params.n,
            a.cols()
        )));
    }
    let search = MitmSearch::prepare(a, s, p, DEFAULT_ML_CAP)?;
    let (lo, hi) = params.window_a();
    let lo_w = lo.ceil().max(0.0) as usize;
    let hi_w = hi.floor() as usize;
    Ok(search.run(Some((lo_w, hi_w))))
}

/// Meet-in-the-middle state: partial syndromes of every left-half mask,
/// bucketed by syndrome with per-weight counts and one witness each.
struct MitmSearch<'a> {
    matrix: &'a SparseBinaryMatrix,
    syndrome: &'a BitVector,
    cols: usize,
    half: usize,
    col_syndromes: Vec<Vec<u64>>,
    target: Vec<u64>,
    left: HashMap<Vec<u64>, Vec<(u64, u32)>>,
}

impl<'a> MitmSearch<'a> {
    fn prepare(a: &'a SparseBinaryMatrix, s: &'a BitVector, p: f64, cap: usize) -> Result<Self> {
        if a.rows() != s.len() {
            return Err(Error::DimensionMismatch(format!(
                "decode: matrix has {} rows, syndrome has length {}",
                a.rows(),
                s.len()
            )));
        }
        if !(p > 0.0 && p < 0.5) {
            return Err(Error::Domain(format!(
                "ML syndrome decoding requires p in (0, 0.5), got {p}"
            )));
        }
        if a.cols() > cap {
            return Err(Error::InstanceTooLarge(format!(
                "ML coset search over {} columns exceeds the cap of {cap}",
                a.cols()
            )));
        }
        let cols = a.cols();
        let words = a.rows().div_ceil(64).max(1);
        let mut col_syndromes = vec![vec![0u64; words]; cols];
        for (i, row) in a.row_supports().iter().enumerate() {
            for &j in row {
                col_syndromes[j][i / 64] ^= 1u64 << (i % 64);
            }
        }
        let mut target = vec![0u64; words];
        target[..s.words().len()].copy_from_slice(s.words());

        let half = cols / 2;
        // Gray-code walk over the left half: one column XOR per step.
        let mut left: HashMap<Vec<u64>, Vec<(u64, u32)>> = HashMap::new();
        let mut syn = vec![0u64; words];
        let mut mask: u32 = 0;
        let mut record = |syn: &[u64], mask: u32| {
            let w = mask.count_ones() as usize;
            let entry = left
                .entry(syn.to_vec())
                .or_insert_with(|| vec![(0u64, 0u32); half + 1]);
            entry[w].0 += 1;
            if entry[w].0 == 1 {
                entry[w].1 = mask;
            }
        };
        record(&syn, mask);
        for g in 1u64..(1u64 << half) {
            let j = g.trailing_zeros() as usize;
            for (w, c) in syn.iter_mut().zip(&col_syndromes[j]) {
                *w ^= c;
            }
            mask ^= 1 << j;
            record(&syn, mask);
        }
        Ok(MitmSearch {
            matrix: a,
            syndrome: s,
            cols,
            half,
            col_syndromes,
            target,
            left,
        })
    }

    /// Scans the right half. `window` restricts admissible total weights to
    /// an inclusive range and switches ambiguity to "two or more window
    /// members" (the typical-preimage semantics).
    fn run(&self, window: Option<(usize, usize)>) -> DecodeResult {
        let right = self.cols - self.half;
        let mut best_weight = usize::MAX;
        let mut count: u64 = 0; // window: members in window; else: members at min weight
        let mut witness: Option<(u32, u32)> = None;

        let consider = |key: &[u64], right_mask: u32, state: &mut (usize, u64, Option<(u32, u32)>)| {
            if let Some(entry) = self.left.get(key) {
                let wr = right_mask.count_ones() as usize;
                for (wl, &(c, left_mask)) in entry.iter().enumerate() {
                    if c == 0 {
                        continue;
                    }
                    let total = wl + wr;
                    match window {
                        Some((lo, hi)) => {
                            if total < lo || total > hi {
                                continue;
                            }
                            // count *all* window members; the witness only
                            // matters when the final count is exactly one
                            state.1 += c;
                            if total < state.0 {
                                state.0 = total;
                            }
                            if state.2.is_none() {
                                state.2 = Some((left_mask, right_mask));
                            }
                        }
                        None => {
                            if total < state.0 {
                                state.0 = total;
                                state.1 = c;
                                state.2 = Some((left_mask, right_mask));
                            } else if total == state.0 {
                                state.1 += c;
                            }
                        }
                    }
                }
            }
        };

        let mut state = (best_weight, count, witness);
        let mut syn = self.target.clone();
        let mut mask: u32 = 0;
        consider(&syn, mask, &mut state);
        for g in 1u64..(1u64 << right) {
            let j = g.trailing_zeros() as usize;
            for (w, c) in syn.iter_mut().zip(&self.col_syndromes[self.half + j]) {
                *w ^= c;
            }
            mask ^= 1 << j;
            consider(&syn, mask, &mut state);
        }
        (best_weight, count, witness) = state;

        if count == 0 {
            return DecodeResult {
                status: DecodeStatus::Inconsistent,
                estimate: None,
                coset_min_weight: None,
            };
        }
        if count >= 2 {
            return DecodeResult {
                status: DecodeStatus::Ambiguous,
                estimate: None,
                coset_min_weight: Some(best_weight),
            };
        }
        let (left_mask, right_mask) = witness.expect("unique solution has a witness");
        let mut x = BitVector::zeros(self.cols);
        for j in 0..self.half {
            if left_mask >> j & 1 == 1 {
                x.set(j, true);
            }
        }
        for j in 0..right {
            if right_mask >> j & 1 == 1 {
                x.set(self.half + j, true);
            }
        }
        debug_assert_eq!(x.weight(), best_weight);
        debug_assert_eq!(&self.matrix.mat_vec_mul(&x).unwrap(), self.syndrome);
        DecodeResult {
            status: DecodeStatus::Recovered,
            estimate: Some(x),
            coset_min_weight: Some(best_weight),
        }
    }
}

/// Exact ML decoding over the erasure channel: keep the unerased rows of
/// `g` and solve the restricted linear system. `Recovered` iff the
/// restriction has full column rank (the solution then reproduces every
/// unerased answer bit exactly); `Ambiguous` iff the rank is deficient.
pub fn erasure_decode(g: &SparseBinaryMatrix, z: &ErasedVector) -> Result<DecodeResult> {
    if g.rows() != z.len() {
        return Err(Error::DimensionMismatch(format!(
            "erasure decode: matrix has {} rows, answers have length {}",
            g.rows(),
            z.len()
        )));
    }
    let mut kept_rows = Vec::new();
    let mut bits = Vec::new();
    for (i, b) in z.known() {
        kept_rows.push(g.row_support(i).to_vec());
        bits.push(b);
    }
    let restricted = SparseBinaryMatrix::from_sorted_rows(g.cols(), kept_rows);
    let rhs = BitVector::from_bools(&bits);
    let result = match restricted.solve(&rhs)? {
        Solution::Unique(x) => {
            debug_assert_eq!(restricted.mat_vec_mul(&x).unwrap(), rhs);
            DecodeResult {
                status: DecodeStatus::Recovered,
                estimate: Some(x),
                coset_min_weight: None,
            }
        }
        Solution::Ambiguous(_) => DecodeResult {
            status: DecodeStatus::Ambiguous,
            estimate: None,
            coset_min_weight: None,
        },
        Solution::Inconsistent => DecodeResult {
            status: DecodeStatus::Inconsistent,
            estimate: None,
            coset_min_weight: None,
        },
    };
    Ok(result)
}

/// Brute-force references, deliberately independent of the
/// meet-in-the-middle path so the two can check each other.
pub mod reference {
    use super::*;

    /// Summary of a full coset scan: the minimum weight, how many coset
    /// members attain it, and the first such member in Gray-scan order.
    #[derive(Debug, Clone, PartialEq, Eq)]
    pub struct CosetSummary {
        pub min_weight: Option<usize>,
        pub count_at_min: u64,
        pub leader: Option<BitVector>,
    }

    /// Enumerates all 2^cols candidate vectors with a Gray-code walk,
    /// keeping the syndrome as a single 64-bit word.
    pub fn exhaustive_coset_search(
        a: &SparseBinaryMatrix,
        s: &BitVector,
    ) -> Result<CosetSummary> {
        if a.rows() != s.len() {
            return Err(Error::DimensionMismatch(format!(
                "coset scan: matrix has {} rows, syndrome has length {}",
                a.rows(),
                s.len()
            )));
        }
        if a.rows() > 64 {
            return Err(Error::InstanceTooLarge(
                "exhaustive scan packs syndromes into one word; needs rows <= 64".into(),
            ));
        }
        if a.cols() > DEFAULT_ML_CAP {
            return Err(Error::InstanceTooLarge(format!(
                "exhaustive scan over {} columns exceeds the cap of {}",
                a.cols(),
                DEFAULT_ML_CAP
            )));
        }
        let cols = a.cols();
        let mut col_syn = vec![0u64; cols];
        for (i, row) in a.row_supports().iter().enumerate() {
            for &j in row {
                col_syn[j] ^= 1u64 << i;
            }
        }
        let mut target = 0u64;
        for i in 0..s.len() {
            if s.get(i) {
                target |= 1u64 << i;
            }
        }

        let mut best = usize::MAX;
        let mut count = 0u64;
        let mut leader_mask = 0u32;
        let mut syn = 0u64;
        let mut mask = 0u32;
        if syn == target {
            best = 0;
            count = 1;
        }
        for g in 1u64..(1u64 << cols) {
            let j = g.trailing_zeros() as usize;
            syn ^= col_syn[j];
            mask ^= 1 << j;
            if syn == target {
                let w = mask.count_ones() as usize;
                if w < best {
                    best = w;
                    count = 1;
                    leader_mask = mask;
                } else if w == best {
                    count += 1;
                }
            }
        }
        if count == 0 {
            return Ok(CosetSummary {
                min_weight: None,
                count_at_min: 0,
                leader: None,
            });
        }
        let mut leader = BitVector::zeros(cols);
        for j in 0..cols {
            if leader_mask >> j & 1 == 1 {
                leader.set(j, true);
            }
        }
        Ok(CosetSummary {
            min_weight: Some(best),
            count_at_min: count,
            leader: Some(leader),
        })
    }
}
