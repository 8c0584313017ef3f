//! Label sources, the worker erasure channel, and the closed-form
//! information quantities the schemes are budgeted against.
//!
//! Naming note: the erasure probability is `r_erase` and the conditional
//! label probability P(Y=1 | X=0) is `r_flip`; the two play completely
//! different roles and must not be conflated.

use rand::Rng;

use crate::error::{Error, Result};
use crate::gf2::{BitVector, ErasedVector};
use crate::seeding::seed_rng;

/// `n` i.i.d. Ber(p) binary labels with `p` in (0, 0.5).
///
/// Callers wanting p > 0.5 must complement labels themselves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BernoulliSource {
    n: usize,
    p: f64,
}

impl BernoulliSource {
    pub fn new(n: usize, p: f64) -> Result<Self> {
        if !(p > 0.0 && p < 0.5) {
            return Err(Error::Domain(format!(
                "label probability must lie in (0, 0.5), got {p}"
            )));
        }
        Ok(BernoulliSource { n, p })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn sample(&self, seed: u64) -> BitVector {
        self.sample_with(&mut seed_rng(seed))
    }

    pub fn sample_with<R: Rng>(&self, rng: &mut R) -> BitVector {
        let mut v = BitVector::zeros(self.n);
        for i in 0..self.n {
            if rng.random_bool(self.p) {
                v.set(i, true);
            }
        }
        v
    }
}

/// A pair of correlated labelings of the same `n` items:
/// `X_i ~ Ber(p)`, `Y_i | X_i=1 ~ Ber(q)`, `Y_i | X_i=0 ~ Ber(r_flip)`,
/// pairs i.i.d. across items.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelatedPairSource {
    n: usize,
    p: f64,
    q: f64,
    r_flip: f64,
}

impl CorrelatedPairSource {
    pub fn new(n: usize, p: f64, q: f64, r_flip: f64) -> Result<Self> {
        if !(p > 0.0 && p < 0.5) {
            return Err(Error::Domain(format!(
                "P(X=1) must lie in (0, 0.5), got {p}"
            )));
        }
        for (name, v) in [("q", q), ("r_flip", r_flip)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Domain(format!("{name} must lie in [0, 1], got {v}")));
            }
        }
        Ok(CorrelatedPairSource { n, p, q, r_flip })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn r_flip(&self) -> f64 {
        self.r_flip
    }

    pub fn sample(&self, seed: u64) -> (BitVector, BitVector) {
        self.sample_with(&mut seed_rng(seed))
    }

    /// Draw order is (x_i, y_i) per item, pinned for reproducibility.
    pub fn sample_with<R: Rng>(&self, rng: &mut R) -> (BitVector, BitVector) {
        let mut x = BitVector::zeros(self.n);
        let mut y = BitVector::zeros(self.n);
        for i in 0..self.n {
            let xi = rng.random_bool(self.p);
            let cond = if xi { self.q } else { self.r_flip };
            let yi = sample_bool(rng, cond);
            if xi {
                x.set(i, true);
            }
            if yi {
                y.set(i, true);
            }
        }
        (x, y)
    }
}

// random_bool panics outside [0,1] and we allow the closed endpoints here.
fn sample_bool<R: Rng>(rng: &mut R, p: f64) -> bool {
    if p <= 0.0 {
        rng.random_bool(0.0)
    } else if p >= 1.0 {
        rng.random_bool(1.0)
    } else {
        rng.random_bool(p)
    }
}

/// Each query answer is lost independently with probability `r_erase`;
/// answered queries are always correct (no bit flips).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErasureChannel {
    r_erase: f64,
}

impl ErasureChannel {
    pub fn new(r_erase: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&r_erase) {
            return Err(Error::Domain(format!(
                "erasure probability must lie in [0, 1), got {r_erase}"
            )));
        }
        Ok(ErasureChannel { r_erase })
    }

    pub fn r_erase(&self) -> f64 {
        self.r_erase
    }

    pub fn apply(&self, z: &BitVector, seed: u64) -> ErasedVector {
        self.apply_with(z, &mut seed_rng(seed))
    }

    pub fn apply_with<R: Rng>(&self, z: &BitVector, rng: &mut R) -> ErasedVector {
        ErasedVector::from_entries(
            (0..z.len())
                .map(|i| {
                    if rng.random_bool(self.r_erase) {
                        None
                    } else {
                        Some(z.get(i))
                    }
                })
                .collect(),
        )
    }
}

/// Binary entropy in bits, with the continuous extension H(0) = H(1) = 0.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!(
            "entropy argument must lie in [0, 1], got {p}"
        )));
    }
    if p == 0.0 || p == 1.0 {
        return Ok(0.0);
    }
    Ok(-p * p.log2() - (1.0 - p) * (1.0 - p).log2())
}

/// Per-query collision probability `(1 + (1 - 4p(1-p))^delta) / 2`: the
/// chance that a query XOR-ing `delta` items answers identically on two
/// independent Ber(p) label vectors. Each coordinate of the two vectors
/// disagrees with probability 2p(1-p), so by the piling-up identity this
/// equals the probability that the parity of `delta` i.i.d. Ber(2p(1-p))
/// bits (equivalently of `2*delta` Ber(p) bits) is zero.
pub fn alpha(p: f64, delta: usize) -> Result<f64> {
    if !(p > 0.0 && p < 0.5) {
        return Err(Error::Domain(format!(
            "alpha requires p in (0, 0.5), got {p}"
        )));
    }
    if delta == 0 {
        return Err(Error::Domain("alpha requires delta >= 1".into()));
    }
    let base = 1.0 - 4.0 * p * (1.0 - p);
    Ok(0.5 * (1.0 + base.powi(delta as i32)))
}

/// Joint entropy H(X,Y) in bits via the chain rule:
/// `H_b(p) + p H_b(q) + (1-p) H_b(r_flip)`.
pub fn joint_entropy(src: &CorrelatedPairSource) -> f64 {
    let hp = binary_entropy(src.p()).expect("p validated at construction");
    let hq = binary_entropy(src.q()).expect("q validated at construction");
    let hr = binary_entropy(src.r_flip()).expect("r_flip validated at construction");
    hp + src.p() * hq + (1.0 - src.p()) * hr
}

/// Upper bound on `Pr[sum >= (1 + delta) mu]` for a sum of independent
/// Bernoulli variables with mean sum `mu`: `exp(-delta^2 mu / (2 + delta))`.
pub fn chernoff_tail_bound(mu: f64, delta: f64) -> Result<f64> {
    if mu <= 0.0 || !mu.is_finite() {
        return Err(Error::Domain(format!("mu must be positive, got {mu}")));
    }
    if delta <= 0.0 || !delta.is_finite() {
        return Err(Error::Domain(format!("delta must be positive, got {delta}")));
    }
    Ok((-delta * delta * mu / (2.0 + delta)).exp())
}
