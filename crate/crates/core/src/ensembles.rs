//! Samplers for the random query-matrix ensembles, plus the concatenation
//! constructor used by the erasure-tolerant scheme.
//!
//! All samplers are pure functions of (config, seed) — or of an explicit
//! RNG via the `*_with` variants — and all logarithms are base 2.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::gf2::SparseBinaryMatrix;
use crate::seeding::seed_rng;

/// Default constant in the LDGM density rho(N) = RHO_C * log2(N) / N.
pub const DEFAULT_RHO_C: f64 = 2.0;
/// Default rejection cap for the heavy-row filter.
pub const DEFAULT_REJECTION_CAP: usize = 1000;

/// `m` independent queries, each a uniform Δ-subset of the `n` items.
/// Duplicate rows are permitted; the ensemble has i.i.d. rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UniformDeltaConfig {
    pub n: usize,
    pub m: usize,
    pub delta: usize,
}

impl UniformDeltaConfig {
    pub fn new(n: usize, m: usize, delta: usize) -> Self {
        UniformDeltaConfig { n, m, delta }
    }

    pub fn validate(&self) -> Result<()> {
        if self.delta < 1 || self.delta > self.n {
            return Err(Error::InvalidConfig(format!(
                "uniform-delta: need 1 <= delta <= n, got delta={} n={}",
                self.delta, self.n
            )));
        }
        Ok(())
    }
}

/// Row-regular parity-check ensemble: `m` rows of weight exactly `row_weight`
/// over `n` columns, with column weights balanced by construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GallagerRegularConfig {
    pub n: usize,
    pub m: usize,
    pub row_weight: usize,
}

impl GallagerRegularConfig {
    pub fn new(n: usize, m: usize, row_weight: usize) -> Self {
        GallagerRegularConfig { n, m, row_weight }
    }

    pub fn validate(&self) -> Result<()> {
        if self.row_weight < 2 {
            return Err(Error::InvalidConfig(format!(
                "gallager: row weight must be >= 2, got {}",
                self.row_weight
            )));
        }
        if self.row_weight > self.n {
            return Err(Error::InvalidConfig(format!(
                "gallager: row weight {} exceeds n={}",
                self.row_weight, self.n
            )));
        }
        Ok(())
    }
}

/// Sparse generator ensemble: `code_len x msg_len` matrices with i.i.d.
/// Ber(rho) entries, optionally filtered to reject any matrix with a heavy
/// row (weight >= heavy_row_factor * c_high * log2(code_len)).
#[derive(Debug, Clone, PartialEq)]
pub struct LdgmEnsembleConfig {
    /// N: codeword length (rows).
    pub code_len: usize,
    /// K: message length (columns).
    pub msg_len: usize,
    /// Per-entry one-probability; Θ(log2(N)/N) in the regime of interest.
    pub rho: f64,
    /// Lower density constant: c_low * log2(N)/N <= rho.
    pub c_low: f64,
    /// Upper density constant: rho <= c_high * log2(N)/N.
    pub c_high: f64,
    /// δ > 1 with (δ-1)^2 * c_low / (δ+1) > 2; see [`heavy_row_factor`].
    pub heavy_row_factor: f64,
    /// Attempt cap for the rejection sampler.
    pub rejection_cap: usize,
}

impl LdgmEnsembleConfig {
    /// Config with rho = DEFAULT_RHO_C * log2(N)/N, c_low = c_high = 2, and
    /// the minimal admissible heavy-row factor.
    pub fn with_default_density(code_len: usize, msg_len: usize) -> Self {
        Self::with_density_constant(code_len, msg_len, DEFAULT_RHO_C)
    }

    /// Config with rho = rho_c * log2(N)/N and c_low = c_high = rho_c.
    pub fn with_density_constant(code_len: usize, msg_len: usize, rho_c: f64) -> Self {
        let rho = (rho_c * (code_len as f64).log2() / code_len as f64).min(1.0);
        LdgmEnsembleConfig {
            code_len,
            msg_len,
            rho,
            c_low: rho_c,
            c_high: rho_c,
            heavy_row_factor: heavy_row_factor(rho_c),
            rejection_cap: DEFAULT_REJECTION_CAP,
        }
    }

    /// Row-weight rejection threshold δ * c_high * log2(N).
    pub fn heavy_row_threshold(&self) -> f64 {
        self.heavy_row_factor * self.c_high * (self.code_len as f64).log2()
    }

    pub fn validate(&self) -> Result<()> {
        if self.msg_len == 0 || self.msg_len >= self.code_len {
            return Err(Error::InvalidConfig(format!(
                "ldgm: need 0 < msg_len < code_len, got K={} N={}",
                self.msg_len, self.code_len
            )));
        }
        if !(0.0..=1.0).contains(&self.rho) {
            return Err(Error::InvalidConfig(format!(
                "ldgm: rho must lie in [0, 1], got {}",
                self.rho
            )));
        }
        if self.c_low <= 0.0 || self.c_high < self.c_low {
            return Err(Error::InvalidConfig(format!(
                "ldgm: need 0 < c_low <= c_high, got c_low={} c_high={}",
                self.c_low, self.c_high
            )));
        }
        let d = self.heavy_row_factor;
        if !(d > 1.0 && (d - 1.0) * (d - 1.0) * self.c_low / (d + 1.0) > 2.0) {
            return Err(Error::InvalidConfig(format!(
                "ldgm: heavy-row factor {d} does not satisfy (d-1)^2*c_low/(d+1) > 2"
            )));
        }
        if self.rejection_cap == 0 {
            return Err(Error::InvalidConfig(
                "ldgm: rejection cap must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// Smallest δ on a 10^-3 grid with (δ-1)^2 * c_low / (δ+1) > 2. This makes
/// the per-row Chernoff tail exp(-((δ-1)^2/(δ+1)) * c_low * log N) fall
/// below N^-2, so a union bound over the N rows still vanishes.
pub fn heavy_row_factor(c_low: f64) -> f64 {
    assert!(c_low > 0.0, "c_low must be positive");
    let mut k: u64 = 1;
    loop {
        let d = 1.0 + k as f64 / 1000.0;
        if (d - 1.0) * (d - 1.0) * c_low / (d + 1.0) > 2.0 {
            return d;
        }
        k += 1;
    }
}

/// Samples `m` rows, each an independent uniform Δ-subset of {0..n}.
pub fn sample_uniform_delta(cfg: &UniformDeltaConfig, seed: u64) -> Result<SparseBinaryMatrix> {
    sample_uniform_delta_with(cfg, &mut seed_rng(seed))
}

pub fn sample_uniform_delta_with<R: Rng>(
    cfg: &UniformDeltaConfig,
    rng: &mut R,
) -> Result<SparseBinaryMatrix> {
    cfg.validate()?;
    let rows = (0..cfg.m)
        .map(|_| {
            let mut support = rand::seq::index::sample(rng, cfg.n, cfg.delta).into_vec();
            support.sort_unstable();
            support
        })
        .collect();
    Ok(SparseBinaryMatrix::from_sorted_rows(cfg.n, rows))
}

/// Samples a row-regular matrix by dealing a pool of stacked column
/// permutations into Δ-sized chunks, then repairing within-row duplicates by
/// degree-preserving swaps. Column weights stay within 1 of each other when
/// n divides m*Δ, within 2 otherwise.
pub fn sample_gallager_regular(
    cfg: &GallagerRegularConfig,
    seed: u64,
) -> Result<SparseBinaryMatrix> {
    sample_gallager_regular_with(cfg, &mut seed_rng(seed))
}

pub fn sample_gallager_regular_with<R: Rng>(
    cfg: &GallagerRegularConfig,
    rng: &mut R,
) -> Result<SparseBinaryMatrix> {
    cfg.validate()?;
    let (n, m, dw) = (cfg.n, cfg.m, cfg.row_weight);
    if m == 0 {
        return Ok(SparseBinaryMatrix::zeros(0, n));
    }
    let total = m * dw;
    let mut pool = Vec::with_capacity(total.div_ceil(n) * n);
    let mut perm: Vec<usize> = (0..n).collect();
    while pool.len() < total {
        perm.shuffle(rng);
        pool.extend_from_slice(&perm);
    }
    pool.truncate(total);

    repair_chunk_duplicates(&mut pool, dw)?;

    let mut row_supports: Vec<Vec<usize>> = pool
        .chunks(dw)
        .map(|chunk| {
            let mut row = chunk.to_vec();
            row.sort_unstable();
            row
        })
        .collect();
    repair_duplicate_rows(&mut row_supports);
    Ok(SparseBinaryMatrix::from_sorted_rows(n, row_supports))
}

/// Swap-repairs positions whose value already occurs earlier in the same
/// Δ-chunk. Swaps preserve the pool multiset, hence the column balance.
fn repair_chunk_duplicates(pool: &mut [usize], dw: usize) -> Result<()> {
    let total = pool.len();
    let chunk_of = |pos: usize| pos / dw;
    let chunk_contains = |pool: &[usize], chunk: usize, value: usize| {
        pool[chunk * dw..(chunk + 1) * dw].contains(&value)
    };

    for pos in 0..total {
        let value = pool[pos];
        let chunk = chunk_of(pos);
        let dup = pool[chunk * dw..pos].contains(&value);
        if !dup {
            continue;
        }
        let mut fixed = false;
        for step in 1..total {
            let cand = (pos + step) % total;
            let cand_chunk = chunk_of(cand);
            if cand_chunk == chunk {
                continue;
            }
            let cand_value = pool[cand];
            if chunk_contains(pool, chunk, cand_value) {
                continue;
            }
            if chunk_contains(pool, cand_chunk, value) {
                continue;
            }
            pool.swap(pos, cand);
            fixed = true;
            break;
        }
        if !fixed {
            return Err(Error::InvalidConfig(
                "gallager: could not repair a duplicate entry; parameters too degenerate".into(),
            ));
        }
    }
    Ok(())
}

/// Best-effort de-duplication of identical rows via weight- and
/// degree-preserving element swaps. Only swaps that do not create a new
/// duplicate pair are applied, so every pass strictly reduces the duplicate
/// count. Unavoidable duplicates (for instance when Δ = n) are left in
/// place.
fn repair_duplicate_rows(rows: &mut [Vec<usize>]) {
    let m = rows.len();
    'outer: for _ in 0..m {
        let mut seen: HashMap<Vec<usize>, usize> = HashMap::with_capacity(m);
        let mut dup: Option<usize> = None;
        for (i, row) in rows.iter().enumerate() {
            if seen.insert(row.clone(), i).is_some() {
                dup = Some(i);
                break;
            }
        }
        let Some(r2) = dup else {
            return;
        };
        let occupied: std::collections::HashSet<Vec<usize>> = rows.iter().cloned().collect();
        for r3 in 0..m {
            if r3 == r2 || rows[r3] == rows[r2] {
                continue;
            }
            for a in rows[r2].iter().copied().filter(|v| !rows[r3].contains(v)) {
                for b in rows[r3].iter().copied().filter(|v| !rows[r2].contains(v)) {
                    let mut new_r2: Vec<usize> =
                        rows[r2].iter().copied().filter(|&v| v != a).collect();
                    new_r2.push(b);
                    new_r2.sort_unstable();
                    let mut new_r3: Vec<usize> =
                        rows[r3].iter().copied().filter(|&v| v != b).collect();
                    new_r3.push(a);
                    new_r3.sort_unstable();
                    if occupied.contains(&new_r2) || occupied.contains(&new_r3) || new_r2 == new_r3
                    {
                        continue;
                    }
                    rows[r2] = new_r2;
                    rows[r3] = new_r3;
                    continue 'outer;
                }
            }
        }
        return; // no clean swap: treat the duplicate as unavoidable
    }
}

/// Samples an N x K matrix with i.i.d. Ber(rho) entries.
///
/// Each row is drawn as a Binomial(K, rho) weight plus a uniform support of
/// that size, which has exactly the i.i.d.-entries distribution but costs
/// O(ones) instead of O(N*K).
pub fn sample_bernoulli_ldgm(cfg: &LdgmEnsembleConfig, seed: u64) -> Result<SparseBinaryMatrix> {
    sample_bernoulli_ldgm_with(cfg, &mut seed_rng(seed))
}

pub fn sample_bernoulli_ldgm_with<R: Rng>(
    cfg: &LdgmEnsembleConfig,
    rng: &mut R,
) -> Result<SparseBinaryMatrix> {
    cfg.validate()?;
    let weight_distr = Binomial::new(cfg.msg_len as u64, cfg.rho)
        .map_err(|e| Error::InvalidConfig(format!("ldgm: bad row-weight distribution: {e}")))?;
    let rows = (0..cfg.code_len)
        .map(|_| {
            let w = weight_distr.sample(rng) as usize;
            let mut support = rand::seq::index::sample(rng, cfg.msg_len, w).into_vec();
            support.sort_unstable();
            support
        })
        .collect();
    Ok(SparseBinaryMatrix::from_sorted_rows(cfg.msg_len, rows))
}

/// Rejection-samples the Bernoulli ensemble until no row reaches the
/// heavy-row threshold; returns the accepted matrix and the number of
/// rejected draws.
pub fn sample_filtered_ldgm(
    cfg: &LdgmEnsembleConfig,
    seed: u64,
) -> Result<(SparseBinaryMatrix, usize)> {
    sample_filtered_ldgm_with(cfg, &mut seed_rng(seed))
}

pub fn sample_filtered_ldgm_with<R: Rng>(
    cfg: &LdgmEnsembleConfig,
    rng: &mut R,
) -> Result<(SparseBinaryMatrix, usize)> {
    cfg.validate()?;
    let threshold = cfg.heavy_row_threshold();
    for attempt in 0..cfg.rejection_cap {
        let matrix = sample_bernoulli_ldgm_with(cfg, rng)?;
        if (matrix.max_row_weight() as f64) < threshold {
            return Ok((matrix, attempt));
        }
    }
    Err(Error::RejectionBudgetExceeded {
        attempts: cfg.rejection_cap,
    })
}

/// True iff some row weight reaches the heavy-row threshold.
pub fn has_heavy_row(matrix: &SparseBinaryMatrix, threshold: f64) -> bool {
    (matrix.max_row_weight() as f64) >= threshold
}

/// Overall encoding matrix G·H of an erasure stage stacked on a compression
/// stage. The product's row weights never exceed the product of the two
/// maximum row weights.
pub fn concatenate(
    g: &SparseBinaryMatrix,
    h: &SparseBinaryMatrix,
) -> Result<SparseBinaryMatrix> {
    let product = g.mat_mul(h)?;
    assert!(
        product.max_row_weight() <= g.max_row_weight() * h.max_row_weight(),
        "row-weight product bound violated"
    );
    Ok(product)
}
