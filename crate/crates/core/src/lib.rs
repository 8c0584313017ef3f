//! Simulation library for crowdsourced binary classification with XOR
//! queries. Labels are compressed by sparse GF(2) query matrices (LDPC-style
//! parity checks), recovered by exact maximum-likelihood syndrome decoding,
//! and protected against unresponsive workers by sparse (LDGM-style) erasure
//! coding; two-stage schemes handle a pair of correlated labelings. A seeded
//! Monte Carlo harness measures block-error rates and checks them against
//! the closed-form references.

pub mod config;
pub mod decoders;
pub mod ensembles;
pub mod error;
pub mod gf2;
pub mod harness;
pub mod models;
pub mod schemes;
pub mod seeding;
pub mod verify;

pub use decoders::{DecodeResult, DecodeStatus};
pub use error::{Error, Result};
pub use harness::{Experiment, SweepResult, Verdict};
pub use models::{BernoulliSource, CorrelatedPairSource, ErasureChannel};
pub use schemes::{BudgetReport, SchemeConfig, SchemeVariant, TrialOutcome};
pub use gf2::{
    matrix_from_text, matrix_to_text, BitVector, ErasedVector, RowWeightProfile, Solution,
    SparseBinaryMatrix,
};
