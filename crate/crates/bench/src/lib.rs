//! Deterministic input builders shared by the benchmarks.

use xorquery_core::ensembles::{
    sample_filtered_ldgm, sample_gallager_regular, GallagerRegularConfig, LdgmEnsembleConfig,
};
use xorquery_core::gf2::{BitVector, ErasedVector, SparseBinaryMatrix};
use xorquery_core::models::{BernoulliSource, ErasureChannel};

/// Row-regular compression instance: the matrix and a published syndrome.
pub fn compression_instance(n: usize, m: usize, delta: usize, seed: u64) -> (SparseBinaryMatrix, BitVector) {
    let h = sample_gallager_regular(&GallagerRegularConfig::new(n, m, delta), seed)
        .expect("valid benchmark parameters");
    let x = BernoulliSource::new(n, 0.1).expect("valid p").sample(seed);
    let s = h.mat_vec_mul(&x).expect("dimensions match");
    (h, s)
}

/// Filtered sparse-generator instance with erased answers.
pub fn erasure_instance(
    code_len: usize,
    msg_len: usize,
    r_erase: f64,
    seed: u64,
) -> (SparseBinaryMatrix, ErasedVector) {
    let (a, _) = sample_filtered_ldgm(
        &LdgmEnsembleConfig::with_default_density(code_len, msg_len),
        seed,
    )
    .expect("valid benchmark parameters");
    let y = BernoulliSource::new(msg_len, 0.49).expect("valid p").sample(seed);
    let z = a.mat_vec_mul(&y).expect("dimensions match");
    let erased = ErasureChannel::new(r_erase)
        .expect("valid channel")
        .apply(&z, seed);
    (a, erased)
}

/// Square-ish sparse matrix for elimination benchmarks.
pub fn rank_instance(n: usize, seed: u64) -> SparseBinaryMatrix {
    sample_gallager_regular(&GallagerRegularConfig::new(n, n * 3 / 4, 6), seed)
        .expect("valid benchmark parameters")
}
