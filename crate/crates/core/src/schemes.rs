//! End-to-end querying schemes: budget formulas and single-trial pipelines.
//!
//! Each `run_*` function executes one full trial — sample a query matrix,
//! sample labels, publish the XOR answers, corrupt them if a channel is
//! configured, decode, and compare against the truth — as a pure function
//! of (config, trial seed). Query budgets are always rounded up, and
//! stage-two budgets are computed from the realized partition sizes, not
//! their expectations.

use crate::decoders::{
    self, all_zero_columns, ml_syndrome_decode_with_cap, DecodeStatus, DEFAULT_ML_CAP,
};
use crate::ensembles::{
    concatenate, sample_gallager_regular_with, sample_uniform_delta_with, GallagerRegularConfig,
    LdgmEnsembleConfig, UniformDeltaConfig, DEFAULT_RHO_C,
};
use crate::error::{Error, Result};
use crate::gf2::{BitVector, SparseBinaryMatrix};
use crate::models::{
    alpha, binary_entropy, joint_entropy, BernoulliSource, CorrelatedPairSource, ErasureChannel,
};
use crate::seeding::{component_rng, tags};

/// Default multiplicative slack over 1/(1-r) in the erasure budget.
pub const DEFAULT_ERASURE_MARGIN: f64 = 0.05;
/// Default concentration slack for the two-stage partition sizes.
pub const DEFAULT_EPSILON_PRIME: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeVariant {
    /// Uniform Δ-subset queries with the ensemble-average budget.
    Prop1Ensemble,
    /// Row-regular compression queries, perfect answers, ML recovery.
    NoiselessLdpc,
    /// Compression stage concatenated with a sparse erasure code.
    ConcatenatedErasure,
    /// Recover X first, then query the two X-partitions for Y.
    TwoStageCorrelated,
}

impl SchemeVariant {
    pub fn as_str(&self) -> &'static str {
        match self {
            SchemeVariant::Prop1Ensemble => "prop1-ensemble",
            SchemeVariant::NoiselessLdpc => "noiseless-ldpc",
            SchemeVariant::ConcatenatedErasure => "concatenated-erasure",
            SchemeVariant::TwoStageCorrelated => "two-stage-correlated",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "prop1-ensemble" => Ok(SchemeVariant::Prop1Ensemble),
            "noiseless-ldpc" => Ok(SchemeVariant::NoiselessLdpc),
            "concatenated-erasure" => Ok(SchemeVariant::ConcatenatedErasure),
            "two-stage-correlated" => Ok(SchemeVariant::TwoStageCorrelated),
            other => Err(Error::InvalidConfig(format!(
                "unknown scheme variant {other:?}"
            ))),
        }
    }
}

/// Full parameterization of one scheme run. Variant-irrelevant fields are
/// ignored; `validate` checks the ones the variant needs.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeConfig {
    pub variant: SchemeVariant,
    /// Number of items to label.
    pub n: usize,
    /// Label-one probability, in (0, 0.5).
    pub p: f64,
    /// P(Y=1 | X=1), two-stage only.
    pub q: Option<f64>,
    /// P(Y=1 | X=0), two-stage only.
    pub r_flip: Option<f64>,
    /// Per-query erasure probability, concatenated scheme only.
    pub r_erase: f64,
    /// Rate slack in (0, 1].
    pub epsilon: f64,
    /// Concentration slack for the two-stage accounting.
    pub epsilon_prime: f64,
    /// Multiplicative slack over 1/(1-r) in the erasure budget.
    pub margin: f64,
    /// Items per query for the uniform and row-regular ensembles.
    pub delta: usize,
    /// LDGM density constant: rho = rho_c * log2(N) / N.
    pub rho_c: f64,
    pub c_low: f64,
    pub c_high: f64,
    /// Column cap for the exhaustive ML decoders.
    pub ml_cap: usize,
    /// Overrides the variant's query-count formula when set.
    pub m_override: Option<usize>,
    /// Cross-check every ML decode against the exhaustive reference.
    pub check_oracle: bool,
    /// Attempt cap for the filtered-LDGM rejection sampler.
    pub rejection_cap: usize,
}

impl SchemeConfig {
    pub fn new(variant: SchemeVariant, n: usize, p: f64) -> Self {
        SchemeConfig {
            variant,
            n,
            p,
            q: None,
            r_flip: None,
            r_erase: 0.0,
            epsilon: 0.1,
            epsilon_prime: DEFAULT_EPSILON_PRIME,
            margin: DEFAULT_ERASURE_MARGIN,
            delta: 3,
            rho_c: DEFAULT_RHO_C,
            c_low: DEFAULT_RHO_C,
            c_high: DEFAULT_RHO_C,
            ml_cap: DEFAULT_ML_CAP,
            m_override: None,
            check_oracle: false,
            rejection_cap: crate::ensembles::DEFAULT_REJECTION_CAP,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidConfig("scheme needs n >= 1".into()));
        }
        if !(self.p > 0.0 && self.p < 0.5) {
            return Err(Error::InvalidConfig(format!(
                "scheme needs p in (0, 0.5), got {}",
                self.p
            )));
        }
        if self.delta < 1 || self.delta > self.n {
            return Err(Error::InvalidConfig(format!(
                "scheme needs 1 <= delta <= n, got delta={} n={}",
                self.delta, self.n
            )));
        }
        match self.variant {
            SchemeVariant::Prop1Ensemble => {}
            _ => {
                if !(self.epsilon > 0.0 && self.epsilon <= 1.0) {
                    return Err(Error::InvalidConfig(format!(
                        "scheme needs epsilon in (0, 1], got {}",
                        self.epsilon
                    )));
                }
                if self.delta < 2 {
                    return Err(Error::InvalidConfig(
                        "row-regular schemes need delta >= 2".into(),
                    ));
                }
            }
        }
        match self.variant {
            SchemeVariant::NoiselessLdpc | SchemeVariant::ConcatenatedErasure
            | SchemeVariant::TwoStageCorrelated => {
                if self.n > self.ml_cap {
                    return Err(Error::InstanceTooLarge(format!(
                        "n={} exceeds the ML decoding cap {}",
                        self.n, self.ml_cap
                    )));
                }
            }
            SchemeVariant::Prop1Ensemble => {}
        }
        if self.variant == SchemeVariant::ConcatenatedErasure {
            if !(0.0..1.0).contains(&self.r_erase) {
                return Err(Error::InvalidConfig(format!(
                    "concatenated scheme needs r_erase in [0, 1), got {}",
                    self.r_erase
                )));
            }
            if self.margin < 0.0 {
                return Err(Error::InvalidConfig("margin must be >= 0".into()));
            }
        }
        if self.variant == SchemeVariant::TwoStageCorrelated {
            let q = self.q.ok_or_else(|| {
                Error::InvalidConfig("two-stage scheme needs q = P(Y=1|X=1)".into())
            })?;
            let r = self.r_flip.ok_or_else(|| {
                Error::InvalidConfig("two-stage scheme needs r_flip = P(Y=1|X=0)".into())
            })?;
            for (name, v) in [("q", q), ("r_flip", r)] {
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::InvalidConfig(format!(
                        "two-stage scheme needs {name} in [0, 1], got {v}"
                    )));
                }
                // at exactly 1/2 the prior carries no bias and min-weight
                // decoding is not ML; refuse rather than guess
                if v == 0.5 {
                    return Err(Error::InvalidConfig(format!(
                        "two-stage scheme needs {name} != 0.5"
                    )));
                }
            }
        }
        Ok(())
    }

    fn correlated_source(&self) -> Result<CorrelatedPairSource> {
        CorrelatedPairSource::new(
            self.n,
            self.p,
            self.q.expect("validated"),
            self.r_flip.expect("validated"),
        )
    }
}

/// Why a trial failed; the labels feed the harness failure accounting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureReason {
    /// ML coset search found a minimum-weight tie.
    MlAmbiguous,
    /// Decoding succeeded but the estimate differs from the truth.
    WrongEstimate,
    /// The unerased equations do not determine the message uniquely.
    ErasureAmbiguous,
    /// Two-stage: stage one did not recover, stage two was skipped.
    StageOneFailed,
    /// Two-stage: a stage-two partition decode was ambiguous.
    StageTwoAmbiguous,
}

impl FailureReason {
    pub fn label(&self) -> &'static str {
        match self {
            FailureReason::MlAmbiguous => "ml_ambiguous",
            FailureReason::WrongEstimate => "wrong_estimate",
            FailureReason::ErasureAmbiguous => "erasure_ambiguous",
            FailureReason::StageOneFailed => "stage_one_failed",
            FailureReason::StageTwoAmbiguous => "stage_two_ambiguous",
        }
    }
}

/// Record of one trial: recovery outcome, query accounting, and named
/// auxiliary observables (0/1 flags aggregate to frequencies).
#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub success: bool,
    pub failure_reason: Option<FailureReason>,
    pub queries_issued: usize,
    pub max_row_weight: usize,
    pub aux: Vec<(String, f64)>,
}

impl TrialOutcome {
    fn aux(&mut self, name: &str, value: f64) {
        self.aux.push((name.to_string(), value));
    }

    pub fn aux_value(&self, name: &str) -> Option<f64> {
        self.aux
            .iter()
            .find(|(k, _)| k == name)
            .map(|&(_, v)| v)
    }

    pub const CSV_HEADER: &'static str =
        "trial,success,failure_reason,queries_issued,max_row_weight,aux";

    /// One-line CSV rendering; aux pairs are `name=value` joined by `;`.
    pub fn to_csv_row(&self, trial: usize) -> String {
        let reason = self.failure_reason.map(|r| r.label()).unwrap_or("");
        let aux = self
            .aux
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(";");
        format!(
            "{trial},{},{reason},{},{},{aux}",
            u8::from(self.success),
            self.queries_issued,
            self.max_row_weight
        )
    }
}

fn outcome(success: bool, reason: Option<FailureReason>) -> TrialOutcome {
    TrialOutcome {
        success,
        failure_reason: reason,
        queries_issued: 0,
        max_row_weight: 0,
        aux: Vec::new(),
    }
}

/// Query budget and its provenance. `stage_split`/`total_bound` are filled
/// by the two-stage budget only.
#[derive(Debug, Clone, PartialEq)]
pub struct BudgetReport {
    pub m: usize,
    pub max_items_per_query: Option<usize>,
    pub rate_normalized: f64,
    pub bound_formula: &'static str,
    pub stage_split: Option<[usize; 3]>,
    pub total_bound: Option<f64>,
}

fn entropy_rate(p: f64, epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::Domain(format!(
            "budget needs epsilon in (0, 1], got {epsilon}"
        )));
    }
    let hb = binary_entropy(p)?;
    // the rate cannot exceed 1 bit per item; clamp away float residue
    Ok((hb + epsilon * (1.0 - hb)).min(1.0))
}

/// `m = ceil(n (Hb(p) + eps (1 - Hb(p))))`: the compression budget for a
/// noiseless Ber(p) source at rate slack eps.
pub fn budget_noiseless(n: usize, p: f64, epsilon: f64) -> Result<BudgetReport> {
    if n == 0 {
        return Err(Error::Domain("budget needs n >= 1".into()));
    }
    let m = (n as f64 * entropy_rate(p, epsilon)?).ceil() as usize;
    Ok(BudgetReport {
        m,
        max_items_per_query: None,
        rate_normalized: m as f64 / n as f64,
        bound_formula: "ceil(n*(Hb(p)+eps*(1-Hb(p))))",
        stage_split: None,
        total_bound: None,
    })
}

/// `m = ceil(n (Hb(p) + eps (1 - Hb(p))) / (1 - r) * (1 + margin))`: the
/// erasure-protected budget. The margin keeps the realized code rate
/// strictly below the channel capacity 1-r; [`run_concatenated`] bumps the
/// count further if integer rounding still lands on the boundary.
pub fn budget_erasure(
    n: usize,
    p: f64,
    epsilon: f64,
    r_erase: f64,
    margin: f64,
) -> Result<BudgetReport> {
    if n == 0 {
        return Err(Error::Domain("budget needs n >= 1".into()));
    }
    if !(0.0..1.0).contains(&r_erase) {
        return Err(Error::Domain(format!(
            "budget needs r_erase in [0, 1), got {r_erase}"
        )));
    }
    if margin < 0.0 {
        return Err(Error::Domain(format!("margin must be >= 0, got {margin}")));
    }
    let m = (n as f64 * entropy_rate(p, epsilon)? / (1.0 - r_erase) * (1.0 + margin)).ceil()
        as usize;
    Ok(BudgetReport {
        m,
        max_items_per_query: None,
        rate_normalized: m as f64 / n as f64,
        bound_formula: "ceil(n*(Hb(p)+eps*(1-Hb(p)))/(1-r)*(1+margin))",
        stage_split: None,
        total_bound: None,
    })
}

/// Stage budgets `m1` over all n items with p, `m2` over the n1 items with
/// X=1 using q, `m3` over the n2 items with X=0 using r_flip, plus the
/// joint-entropy bound `n (H(X,Y) + 2 eps) + 3` (the +3 absorbs the three
/// ceilings).
pub fn budget_two_stage(
    src: &CorrelatedPairSource,
    epsilon: f64,
    n1: usize,
    n2: usize,
) -> Result<BudgetReport> {
    let n = src.n();
    if n1 + n2 != n {
        return Err(Error::InvalidConfig(format!(
            "two-stage budget: partition {n1}+{n2} != n={n}"
        )));
    }
    if n == 0 {
        return Err(Error::Domain("budget needs n >= 1".into()));
    }
    let stage = |items: usize, prob: f64, epsilon: f64| -> Result<usize> {
        if items == 0 {
            return Ok(0);
        }
        Ok((items as f64 * entropy_rate(prob, epsilon)?).ceil() as usize)
    };
    let m1 = stage(n, src.p(), epsilon)?;
    let m2 = stage(n1, src.q(), epsilon)?;
    let m3 = stage(n2, src.r_flip(), epsilon)?;
    let total = m1 + m2 + m3;
    let bound = n as f64 * (joint_entropy(src) + 2.0 * epsilon) + 3.0;
    Ok(BudgetReport {
        m: total,
        max_items_per_query: None,
        rate_normalized: total as f64 / n as f64,
        bound_formula: "m1+m2+m3 <= n*(H(X,Y)+2*eps)+3",
        stage_split: Some([m1, m2, m3]),
        total_bound: Some(bound),
    })
}

/// Display-only sparsity bound `(Hb(p)^-1 - 1)(K1 - K2 ln(eps)) / (1-eps)`
/// on the items-per-query of a capacity-approaching row-regular ensemble.
/// The channel constants K1, K2 have no pinned numeric values; callers
/// supply candidates for reporting.
pub fn row_weight_bound(p: f64, epsilon: f64, k1: f64, k2: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Domain(format!(
            "row-weight bound needs epsilon in (0, 1), got {epsilon}"
        )));
    }
    let hb = binary_entropy(p)?;
    if hb == 0.0 {
        return Err(Error::Domain("row-weight bound needs Hb(p) > 0".into()));
    }
    Ok((1.0 / hb - 1.0) * (k1 - k2 * epsilon.ln()) / (1.0 - epsilon))
}

/// Dispatches on the configured variant.
pub fn run_trial(cfg: &SchemeConfig, seed: u64) -> Result<TrialOutcome> {
    match cfg.variant {
        SchemeVariant::Prop1Ensemble => run_prop1_ensemble(cfg, seed),
        SchemeVariant::NoiselessLdpc => run_noiseless(cfg, seed),
        SchemeVariant::ConcatenatedErasure => run_concatenated(cfg, seed),
        SchemeVariant::TwoStageCorrelated => run_two_stage(cfg, seed),
    }
}

/// One trial of the uniform Δ-subset ensemble. Always records whether the
/// first column was left unqueried (the tractable witness of the error
/// floor); runs full ML recovery only when n fits under the cap, flagged by
/// the `ml_ran` observable.
pub fn run_prop1_ensemble(cfg: &SchemeConfig, seed: u64) -> Result<TrialOutcome> {
    cfg.validate()?;
    if cfg.variant != SchemeVariant::Prop1Ensemble {
        return Err(Error::InvalidConfig("variant mismatch".into()));
    }
    let m = match cfg.m_override {
        Some(m) => m,
        None => prop1_budget(cfg.n, cfg.p, cfg.delta)?,
    };
    let src = BernoulliSource::new(cfg.n, cfg.p)?;
    let q = sample_uniform_delta_with(
        &UniformDeltaConfig::new(cfg.n, m, cfg.delta),
        &mut component_rng(seed, tags::MATRIX),
    )?;
    let x = src.sample_with(&mut component_rng(seed, tags::LABELS));

    let zero_cols = all_zero_columns(&q);
    let orphan_col1 = zero_cols.first() == Some(&0);

    let mut out = outcome(true, None);
    out.queries_issued = m;
    out.max_row_weight = if m > 0 { cfg.delta } else { 0 };
    debug_assert!(m == 0 || q.max_row_weight() == cfg.delta);
    out.aux("orphan_col1", f64::from(orphan_col1));
    out.aux("any_orphan", f64::from(!zero_cols.is_empty()));

    if cfg.n <= cfg.ml_cap {
        let s = q.mat_vec_mul(&x)?;
        let dec = ml_syndrome_decode_with_cap(&q, &s, cfg.p, cfg.ml_cap)?;
        out.aux("ml_ran", 1.0);
        match dec.status {
            DecodeStatus::Recovered => {
                if dec.estimate.as_ref() == Some(&x) {
                    out.success = true;
                } else {
                    out.success = false;
                    out.failure_reason = Some(FailureReason::WrongEstimate);
                }
            }
            _ => {
                out.success = false;
                out.failure_reason = Some(FailureReason::MlAmbiguous);
            }
        }
    } else {
        // block error unobserved at this size; the error-rate column is
        // not meaningful when ml_ran aggregates to 0
        out.aux("ml_ran", 0.0);
    }
    Ok(out)
}

/// Ensemble-average budget `ceil(n Hb(p) / log2(1/alpha))` with the o(1)
/// term set to zero. Can exceed n; experiments cap it via `m_override`.
pub fn prop1_budget(n: usize, p: f64, delta: usize) -> Result<usize> {
    let a = alpha(p, delta)?;
    let denom = (1.0 / a).log2();
    let m = (n as f64 * binary_entropy(p)? / denom).ceil();
    if !m.is_finite() || m > 1e8 {
        return Err(Error::InstanceTooLarge(format!(
            "ensemble budget {m} is impractical; set an explicit m"
        )));
    }
    Ok(m as usize)
}

/// `exp(-delta Hb(p) / log2(1/alpha))`: the large-n limit of the
/// orphan-column probability `(1 - delta/n)^m` at the ensemble-average
/// budget. Strictly positive for every p in (0, 0.5) and delta >= 1, which
/// is why the uniform ensemble's average error probability cannot vanish.
pub fn error_floor_bound(p: f64, delta: usize) -> Result<f64> {
    let a = alpha(p, delta)?;
    Ok((-(delta as f64) * binary_entropy(p)? / (1.0 / a).log2()).exp())
}

/// Full error lower bound `(1 - eps)(error_floor - eps')` for the uniform
/// ensemble; positive whenever the slacks are chosen below the floor.
pub fn prop1_error_lower_bound(
    p: f64,
    delta: usize,
    epsilon: f64,
    epsilon_prime: f64,
) -> Result<f64> {
    Ok((1.0 - epsilon) * (error_floor_bound(p, delta)? - epsilon_prime))
}

/// One trial of the noiseless row-regular scheme: sample H, publish
/// `s = H x`, recover x by exact ML.
pub fn run_noiseless(cfg: &SchemeConfig, seed: u64) -> Result<TrialOutcome> {
    cfg.validate()?;
    if cfg.variant != SchemeVariant::NoiselessLdpc {
        return Err(Error::InvalidConfig("variant mismatch".into()));
    }
    let budget = budget_noiseless(cfg.n, cfg.p, cfg.epsilon)?;
    let m = cfg.m_override.unwrap_or(budget.m);
    let src = BernoulliSource::new(cfg.n, cfg.p)?;

    let h = sample_gallager_regular_with(
        &GallagerRegularConfig::new(cfg.n, m, cfg.delta),
        &mut component_rng(seed, tags::MATRIX),
    )?;
    let x = src.sample_with(&mut component_rng(seed, tags::LABELS));
    let s = h.mat_vec_mul(&x)?;
    let dec = ml_syndrome_decode_with_cap(&h, &s, cfg.p, cfg.ml_cap)?;

    // row-weight ledger: every issued query involves exactly delta items
    assert!((0..h.rows()).all(|i| h.row_weight(i) == cfg.delta));

    let mut out = outcome(false, None);
    out.queries_issued = m;
    out.max_row_weight = if m > 0 { cfg.delta } else { 0 };
    out.aux("budget_m", budget.m as f64);
    out.aux("issued_m", m as f64);
    if let Some(w) = dec.coset_min_weight {
        out.aux("coset_min_weight", w as f64);
    }
    if cfg.check_oracle {
        let orc = decoders::reference::exhaustive_coset_search(&h, &s)?;
        let mismatch = match orc.count_at_min {
            0 => dec.status != DecodeStatus::Inconsistent,
            1 => {
                dec.status != DecodeStatus::Recovered
                    || dec.estimate != orc.leader
                    || dec.coset_min_weight != orc.min_weight
            }
            _ => dec.status != DecodeStatus::Ambiguous || dec.coset_min_weight != orc.min_weight,
        };
        out.aux("oracle_mismatch", f64::from(mismatch));
    }
    match dec.status {
        DecodeStatus::Recovered if dec.estimate.as_ref() == Some(&x) => {
            out.success = true;
        }
        DecodeStatus::Recovered => {
            out.failure_reason = Some(FailureReason::WrongEstimate);
        }
        _ => {
            out.failure_reason = Some(FailureReason::MlAmbiguous);
        }
    }
    Ok(out)
}

/// One trial of the erasure-tolerant scheme: X -> Y = H X -> Z = G Y, the
/// workers answer the rows of the overall matrix G·H, answers erase
/// independently, and decoding runs in two stages (linear erasure recovery
/// of Y, then ML recovery of X). The staged answers and the materialized
/// G·H answers are checked bit-for-bit against each other every trial.
pub fn run_concatenated(cfg: &SchemeConfig, seed: u64) -> Result<TrialOutcome> {
    cfg.validate()?;
    if cfg.variant != SchemeVariant::ConcatenatedErasure {
        return Err(Error::InvalidConfig("variant mismatch".into()));
    }
    let src = BernoulliSource::new(cfg.n, cfg.p)?;
    let channel = ErasureChannel::new(cfg.r_erase)?;

    let m_h = budget_noiseless(cfg.n, cfg.p, cfg.epsilon)?.m;
    let mut m_g = budget_erasure(cfg.n, cfg.p, cfg.epsilon, cfg.r_erase, cfg.margin)?.m;
    // integer rounding can land the code rate exactly on 1-r; keep it
    // strictly below
    while m_h as f64 / m_g as f64 >= 1.0 - cfg.r_erase {
        m_g += 1;
    }

    let mut matrix_rng = component_rng(seed, tags::MATRIX);
    let h = sample_gallager_regular_with(
        &GallagerRegularConfig::new(cfg.n, m_h, cfg.delta),
        &mut matrix_rng,
    )?;
    let mut ldgm = LdgmEnsembleConfig::with_density_constant(m_g, m_h, cfg.rho_c);
    ldgm.c_low = cfg.c_low.min(cfg.rho_c);
    ldgm.c_high = cfg.c_high.max(cfg.rho_c);
    ldgm.heavy_row_factor = crate::ensembles::heavy_row_factor(ldgm.c_low);
    ldgm.rejection_cap = cfg.rejection_cap;
    let (g, rejections) = crate::ensembles::sample_filtered_ldgm_with(&ldgm, &mut matrix_rng)?;

    let g_sc = concatenate(&g, &h)?;
    assert!(g_sc.max_row_weight() <= g.max_row_weight() * h.max_row_weight());

    let x = src.sample_with(&mut component_rng(seed, tags::LABELS));
    let y = h.mat_vec_mul(&x)?;
    let z_staged = g.mat_vec_mul(&y)?;
    let z_direct = g_sc.mat_vec_mul(&x)?;
    let z = channel.apply_with(&z_direct, &mut component_rng(seed, tags::ERASURE));
    let mut agree = true;
    for (i, b) in z.known() {
        agree &= z_staged.get(i) == b;
    }
    assert!(agree, "staged and materialized answers diverged");

    let mut out = outcome(false, None);
    out.queries_issued = m_g;
    out.max_row_weight = g_sc.max_row_weight();
    out.aux("m_h", m_h as f64);
    out.aux("m_g", m_g as f64);
    out.aux("r_c", m_h as f64 / m_g as f64);
    out.aux("rejections", rejections as f64);
    out.aux("erased", z.erased_count() as f64);
    out.aux("staged_concat_agree", f64::from(agree));
    out.aux(
        "row_weight_bound_ok",
        f64::from(g_sc.max_row_weight() <= g.max_row_weight() * h.max_row_weight()),
    );

    let stage1 = decoders::erasure_decode(&g, &z)?;
    out.aux(
        "erasure_recovered",
        f64::from(stage1.status == DecodeStatus::Recovered),
    );
    let Some(y_hat) = stage1.estimate else {
        out.failure_reason = Some(FailureReason::ErasureAmbiguous);
        return Ok(out);
    };
    debug_assert_eq!(y_hat, y, "unique erasure solution must be the truth");

    let dec = ml_syndrome_decode_with_cap(&h, &y_hat, cfg.p, cfg.ml_cap)?;
    match dec.status {
        DecodeStatus::Recovered if dec.estimate.as_ref() == Some(&x) => {
            out.success = true;
        }
        DecodeStatus::Recovered => {
            out.failure_reason = Some(FailureReason::WrongEstimate);
        }
        _ => {
            out.failure_reason = Some(FailureReason::MlAmbiguous);
        }
    }
    Ok(out)
}

/// One trial of the adaptive two-stage scheme for correlated labelings:
/// recover X with a noiseless scheme, partition the items by the estimate,
/// then run two independent noiseless schemes over the partitions with the
/// conditional priors. Stage-two matrices are designed after stage one, so
/// their budgets use the realized partition sizes.
pub fn run_two_stage(cfg: &SchemeConfig, seed: u64) -> Result<TrialOutcome> {
    cfg.validate()?;
    if cfg.variant != SchemeVariant::TwoStageCorrelated {
        return Err(Error::InvalidConfig("variant mismatch".into()));
    }
    let src = cfg.correlated_source()?;
    let (x, y) = src.sample_with(&mut component_rng(seed, tags::LABELS));

    let m1 = budget_noiseless(cfg.n, cfg.p, cfg.epsilon)?.m;
    let h1 = sample_gallager_regular_with(
        &GallagerRegularConfig::new(cfg.n, m1, cfg.delta),
        &mut component_rng(seed, tags::MATRIX),
    )?;
    let s1 = h1.mat_vec_mul(&x)?;
    let dec1 = ml_syndrome_decode_with_cap(&h1, &s1, cfg.p, cfg.ml_cap)?;

    let mut out = outcome(false, None);
    out.max_row_weight = cfg.delta;
    out.aux("m1", m1 as f64);

    let Some(x_hat) = dec1.estimate else {
        out.queries_issued = m1;
        out.failure_reason = Some(FailureReason::StageOneFailed);
        out.aux("stage1_recovered", 0.0);
        out.aux("m2", 0.0);
        out.aux("m3", 0.0);
        record_two_stage_accounting(&mut out, cfg, &src, x.weight(), m1);
        return Ok(out);
    };
    out.aux("stage1_recovered", 1.0);

    let ones: Vec<usize> = (0..cfg.n).filter(|&i| x_hat.get(i)).collect();
    let zeros: Vec<usize> = (0..cfg.n).filter(|&i| !x_hat.get(i)).collect();

    let stage_a = run_partition_stage(
        cfg,
        &ones,
        src.q(),
        &y,
        &mut component_rng(seed, tags::STAGE2_ONES),
    )?;
    let stage_b = run_partition_stage(
        cfg,
        &zeros,
        src.r_flip(),
        &y,
        &mut component_rng(seed, tags::STAGE2_ZEROS),
    )?;
    let (m2, m3) = (stage_a.queries, stage_b.queries);
    out.queries_issued = m1 + m2 + m3;
    out.max_row_weight = cfg
        .delta
        .max(stage_a.max_row_weight)
        .max(stage_b.max_row_weight);
    out.aux("m2", m2 as f64);
    out.aux("m3", m3 as f64);
    record_two_stage_accounting(&mut out, cfg, &src, ones.len(), m1 + m2 + m3);

    let (Some(y_ones), Some(y_zeros)) = (stage_a.estimate, stage_b.estimate) else {
        out.failure_reason = Some(FailureReason::StageTwoAmbiguous);
        return Ok(out);
    };
    let mut y_hat = BitVector::zeros(cfg.n);
    for (k, &i) in ones.iter().enumerate() {
        if y_ones.get(k) {
            y_hat.set(i, true);
        }
    }
    for (k, &i) in zeros.iter().enumerate() {
        if y_zeros.get(k) {
            y_hat.set(i, true);
        }
    }
    if x_hat == x && y_hat == y {
        out.success = true;
    } else {
        out.failure_reason = Some(FailureReason::WrongEstimate);
    }
    Ok(out)
}

/// Realized-budget accounting against the joint-entropy bound, conditioned
/// on the partition-size concentration event.
fn record_two_stage_accounting(
    out: &mut TrialOutcome,
    cfg: &SchemeConfig,
    src: &CorrelatedPairSource,
    n1: usize,
    total: usize,
) {
    let n = cfg.n as f64;
    let n2 = cfg.n - n1;
    let concentration = n1 as f64 <= n * cfg.p * (1.0 + cfg.epsilon_prime)
        && n2 as f64 <= n * (1.0 - cfg.p) * (1.0 + cfg.epsilon_prime);
    let bound = n * (joint_entropy(src) + 2.0 * cfg.epsilon) + 3.0;
    out.aux("n1", n1 as f64);
    out.aux("total_queries", total as f64);
    out.aux("budget_bound", bound);
    out.aux("concentration_holds", f64::from(concentration));
    out.aux(
        "budget_violation",
        f64::from(concentration && (total as f64) > bound),
    );
}

struct PartitionStage {
    queries: usize,
    max_row_weight: usize,
    estimate: Option<BitVector>,
}

/// Noiseless sub-scheme over one partition with conditional prior `prob`.
/// Degenerate priors need no queries; priors above 1/2 are decoded on the
/// complemented labels (the answers are adjusted by the all-ones syndrome).
fn run_partition_stage<R: rand::Rng>(
    cfg: &SchemeConfig,
    items: &[usize],
    prob: f64,
    y: &BitVector,
    rng: &mut R,
) -> Result<PartitionStage> {
    let len = items.len();
    if len == 0 {
        return Ok(PartitionStage {
            queries: 0,
            max_row_weight: 0,
            estimate: Some(BitVector::zeros(0)),
        });
    }
    if prob == 0.0 || prob == 1.0 {
        let mut est = BitVector::zeros(len);
        if prob == 1.0 {
            for k in 0..len {
                est.set(k, true);
            }
        }
        return Ok(PartitionStage {
            queries: 0,
            max_row_weight: 0,
            estimate: Some(est),
        });
    }

    let budget = budget_noiseless(len, prob, cfg.epsilon)?;
    let m = budget.m;
    let delta = cfg.delta.min(len);
    let matrix = if delta >= 2 {
        sample_gallager_regular_with(&GallagerRegularConfig::new(len, m, delta), rng)?
    } else {
        // single-item partition: queries cycle through the items directly
        SparseBinaryMatrix::from_sorted_rows(len, (0..m).map(|i| vec![i % len]).collect())
    };

    let truth = BitVector::from_bools(&items.iter().map(|&i| y.get(i)).collect::<Vec<_>>());
    let answers = matrix.mat_vec_mul(&truth)?;

    let (target, prior, complemented) = if prob > 0.5 {
        // decode y' = y + 1: s' = s + A*1, and A*1 is the row-parity vector
        let mut adjusted = answers.clone();
        for i in 0..matrix.rows() {
            if matrix.row_weight(i) % 2 == 1 {
                adjusted.flip(i);
            }
        }
        (adjusted, 1.0 - prob, true)
    } else {
        (answers, prob, false)
    };

    let dec = ml_syndrome_decode_with_cap(&matrix, &target, prior, cfg.ml_cap)?;
    let estimate = dec.estimate.map(|mut e| {
        if complemented {
            for k in 0..len {
                e.flip(k);
            }
        }
        e
    });
    Ok(PartitionStage {
        queries: m,
        max_row_weight: matrix.max_row_weight(),
        estimate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn budget_noiseless_values() {
        // (n=100, p=0.3, eps=0.1) -> ceil(89.316) = 90
        assert_eq!(budget_noiseless(100, 0.3, 0.1).unwrap().m, 90);
        // eps = 1: uncoded
        assert_eq!(budget_noiseless(100, 0.3, 1.0).unwrap().m, 100);
        assert_eq!(budget_noiseless(64, 0.4999999, 0.2).unwrap().m, 64);
        // prop2 acceptance point: ceil(24 * 0.6282976) = 16
        assert_eq!(budget_noiseless(24, 0.1, 0.3).unwrap().m, 16);
        assert!(budget_noiseless(10, 0.3, 0.0).is_err());
        assert!(budget_noiseless(10, 0.3, 1.5).is_err());
        let r = budget_noiseless(100, 0.3, 0.1).unwrap();
        assert_eq!(r.rate_normalized, 0.9);
    }

    #[test]
    fn budget_erasure_values() {
        // (n=100, p=0.3, eps=0.1, r=0.2, margin=0) -> ceil(89.316/0.8) = 112
        assert_eq!(budget_erasure(100, 0.3, 0.1, 0.2, 0.0).unwrap().m, 112);
        // r = 0 reduces to the noiseless budget times (1 + margin)
        assert_eq!(
            budget_erasure(100, 0.3, 0.1, 0.0, 0.0).unwrap().m,
            budget_noiseless(100, 0.3, 0.1).unwrap().m
        );
        // r = 0.5 doubles the r=0 budget up to a single ceiling
        let base = budget_erasure(100, 0.3, 0.1, 0.0, 0.0).unwrap().m;
        let doubled = budget_erasure(100, 0.3, 0.1, 0.5, 0.0).unwrap().m;
        assert!((doubled as i64 - 2 * base as i64).abs() <= 1);
        assert!(budget_erasure(100, 0.3, 0.1, 1.0, 0.0).is_err());
    }

    #[test]
    fn budget_two_stage_values() {
        let src = CorrelatedPairSource::new(1000, 0.3, 0.1, 0.2).unwrap();
        let b = budget_two_stage(&src, 0.05, 300, 700).unwrap();
        assert_eq!(b.stage_split, Some([888, 149, 516]));
        assert_eq!(b.m, 1553);
        let bound = b.total_bound.unwrap();
        assert!((bound - 1630.34).abs() < 0.01, "bound {bound}");
        assert!((b.m as f64) <= bound);

        assert!(budget_two_stage(&src, 0.05, 300, 600).is_err());

        // empty stage contributes zero queries
        let b = budget_two_stage(&src, 0.05, 0, 1000).unwrap();
        assert_eq!(b.stage_split.unwrap()[1], 0);
    }

    #[test]
    fn budget_two_stage_approaches_joint_entropy() {
        // q = r_flip and eps -> 0 with n1 = n p exactly:
        // total/n -> Hb(p) + Hb(q) = H(X,Y)
        let n = 100_000;
        let src = CorrelatedPairSource::new(n, 0.3, 0.2, 0.2).unwrap();
        let b = budget_two_stage(&src, 1e-6, 30_000, 70_000).unwrap();
        let per_item = b.m as f64 / n as f64;
        let h = joint_entropy(&src);
        assert!((per_item - h).abs() < 1e-3, "{per_item} vs {h}");
    }

    #[test]
    fn row_weight_bound_evaluates() {
        let b = row_weight_bound(0.3, 0.1, 1.0, 1.0).unwrap();
        let hb = binary_entropy(0.3).unwrap();
        let expect = (1.0 / hb - 1.0) * (1.0 - 0.1f64.ln()) / 0.9;
        assert!((b - expect).abs() < 1e-12);
        assert!(row_weight_bound(0.3, 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn prop1_budget_uses_true_log_alpha() {
        // (n=60, p=0.3, delta=3): log2(1/alpha) = 0.99410..., so the
        // ensemble-average budget is ceil(52.877/0.99410) = 54
        let m = prop1_budget(60, 0.3, 3).unwrap();
        assert_eq!(m, 54);
        let a = alpha(0.3, 3).unwrap();
        assert!(((1.0 / a).log2() - 0.994103).abs() < 1e-6);
    }

    #[test]
    fn noiseless_trial_is_deterministic_and_budget_exact() {
        let mut cfg = SchemeConfig::new(SchemeVariant::NoiselessLdpc, 24, 0.1);
        cfg.epsilon = 0.3;
        cfg.delta = 6;
        let a = run_noiseless(&cfg, 7).unwrap();
        let b = run_noiseless(&cfg, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.queries_issued, 16);
        assert_eq!(a.aux_value("issued_m"), Some(16.0));
        assert_eq!(a.max_row_weight, 6);
    }

    #[test]
    fn noiseless_m_zero_fails_on_nonzero_labels() {
        let mut cfg = SchemeConfig::new(SchemeVariant::NoiselessLdpc, 8, 0.3);
        cfg.m_override = Some(0);
        cfg.delta = 2;
        let mut saw_nonzero_failure = false;
        for seed in 0..40 {
            let out = run_noiseless(&cfg, seed).unwrap();
            // with zero queries the only consistent estimate is ambiguous
            // unless x = 0; success can only happen for the all-zero draw
            if !out.success {
                saw_nonzero_failure = true;
            }
        }
        assert!(saw_nonzero_failure);
    }

    #[test]
    fn noiseless_recovery_improves_with_budget() {
        let mut cfg = SchemeConfig::new(SchemeVariant::NoiselessLdpc, 24, 0.1);
        cfg.epsilon = 0.3;
        cfg.delta = 6;
        let trials = 300;
        let full: usize = (0..trials)
            .filter(|&s| run_noiseless(&cfg, s).unwrap().success)
            .count();
        let mut starved = cfg.clone();
        starved.m_override = Some(10);
        let control: usize = (0..trials)
            .filter(|&s| run_noiseless(&starved, s).unwrap().success)
            .count();
        assert!(
            full > control,
            "budget run {full}/{trials} vs control {control}/{trials}"
        );
    }

    #[test]
    fn prop1_trial_records_orphan_and_caps_ml() {
        let mut cfg = SchemeConfig::new(SchemeVariant::Prop1Ensemble, 60, 0.3);
        cfg.delta = 3;
        cfg.m_override = Some(53);
        let out = run_prop1_ensemble(&cfg, 3).unwrap();
        assert_eq!(out.queries_issued, 53);
        assert_eq!(out.aux_value("ml_ran"), Some(0.0));
        assert!(out.aux_value("orphan_col1").is_some());

        // delta = n: every query covers every item, no orphan possible
        let mut cfg = SchemeConfig::new(SchemeVariant::Prop1Ensemble, 12, 0.3);
        cfg.delta = 12;
        cfg.m_override = Some(5);
        let out = run_prop1_ensemble(&cfg, 4).unwrap();
        assert_eq!(out.aux_value("any_orphan"), Some(0.0));
        assert_eq!(out.aux_value("ml_ran"), Some(1.0));
    }

    #[test]
    fn concatenated_reduces_toward_noiseless_at_zero_erasure() {
        let mut cfg = SchemeConfig::new(SchemeVariant::ConcatenatedErasure, 16, 0.1);
        cfg.epsilon = 0.3;
        cfg.delta = 4;
        cfg.r_erase = 0.0;
        cfg.margin = 0.25;
        let out = run_concatenated(&cfg, 5).unwrap();
        assert_eq!(out.aux_value("erased"), Some(0.0));
        assert_eq!(out.aux_value("staged_concat_agree"), Some(1.0));
        // with no erasures the code rate condition still held
        let r_c = out.aux_value("r_c").unwrap();
        assert!(r_c < 1.0);
    }

    #[test]
    fn concatenated_at_zero_erasure_matches_noiseless_when_stage_one_recovers() {
        // same trial seed feeds the same label and matrix streams, so once
        // the generator stage recovers exactly, the remaining ML stage sees
        // the identical (H, s) instance as the plain noiseless scheme
        let mut concat = SchemeConfig::new(SchemeVariant::ConcatenatedErasure, 16, 0.1);
        concat.epsilon = 0.3;
        concat.delta = 4;
        concat.r_erase = 0.0;
        let mut plain = concat.clone();
        plain.variant = SchemeVariant::NoiselessLdpc;
        let mut compared = 0;
        for seed in 0..60 {
            let c = run_concatenated(&concat, seed).unwrap();
            if c.aux_value("erasure_recovered") == Some(1.0) {
                let p = run_noiseless(&plain, seed).unwrap();
                assert_eq!(c.success, p.success, "seed {seed}");
                compared += 1;
            }
        }
        assert!(compared > 0, "generator stage never recovered");
    }

    #[test]
    fn concatenated_total_erasure_fails() {
        let mut cfg = SchemeConfig::new(SchemeVariant::ConcatenatedErasure, 12, 0.1);
        cfg.epsilon = 0.3;
        cfg.delta = 3;
        cfg.r_erase = 0.99;
        // nearly everything erased: expect failure across seeds
        let mut failures = 0;
        for seed in 0..10 {
            let out = run_concatenated(&cfg, seed).unwrap();
            if !out.success {
                failures += 1;
            }
        }
        assert!(failures >= 9);
    }

    #[test]
    fn concatenated_keeps_code_rate_strictly_below_capacity() {
        // the thm1 acceptance point: formula gives m_g = 20 = m_h/(1-r),
        // which the run must bump to 21
        let mut cfg = SchemeConfig::new(SchemeVariant::ConcatenatedErasure, 24, 0.1);
        cfg.epsilon = 0.3;
        cfg.delta = 6;
        cfg.r_erase = 0.2;
        cfg.margin = 0.05;
        let out = run_concatenated(&cfg, 1).unwrap();
        assert_eq!(out.aux_value("m_h"), Some(16.0));
        assert_eq!(out.aux_value("m_g"), Some(21.0));
        let r_c = out.aux_value("r_c").unwrap();
        assert!(r_c < 1.0 - cfg.r_erase);
    }

    #[test]
    fn two_stage_deterministic_y_needs_no_stage_two_queries() {
        let mut cfg = SchemeConfig::new(SchemeVariant::TwoStageCorrelated, 16, 0.3);
        cfg.epsilon = 0.3;
        cfg.delta = 4;
        cfg.q = Some(1.0);
        cfg.r_flip = Some(0.0);
        for seed in 0..20 {
            let out = run_two_stage(&cfg, seed).unwrap();
            if out.aux_value("stage1_recovered") == Some(1.0) {
                assert_eq!(out.aux_value("m2"), Some(0.0));
                assert_eq!(out.aux_value("m3"), Some(0.0));
                // stage 1 correct implies full success: y is a copy of x
                if out.success {
                    continue;
                }
                assert_eq!(out.failure_reason, Some(FailureReason::WrongEstimate));
            }
        }
    }

    #[test]
    fn two_stage_realized_budget_within_bound_under_concentration() {
        let mut cfg = SchemeConfig::new(SchemeVariant::TwoStageCorrelated, 20, 0.3);
        cfg.epsilon = 0.3;
        cfg.delta = 4;
        cfg.q = Some(0.1);
        cfg.r_flip = Some(0.2);
        for seed in 0..100 {
            let out = run_two_stage(&cfg, seed).unwrap();
            assert_eq!(out.aux_value("budget_violation"), Some(0.0), "seed {seed}");
            let m_total = out.aux_value("total_queries").unwrap();
            assert_eq!(m_total as usize, out.queries_issued);
        }
    }

    #[test]
    fn two_stage_handles_empty_partition() {
        // p near zero makes n1 = 0 the common case: the ones-partition
        // issues no queries and only the r_flip scheme runs
        let mut cfg = SchemeConfig::new(SchemeVariant::TwoStageCorrelated, 10, 0.01);
        cfg.epsilon = 0.3;
        cfg.delta = 2;
        cfg.q = Some(0.1);
        cfg.r_flip = Some(0.2);
        let mut saw_empty = false;
        for seed in 0..30 {
            let out = run_two_stage(&cfg, seed).unwrap();
            if out.aux_value("stage1_recovered") == Some(1.0) && out.aux_value("n1") == Some(0.0) {
                assert_eq!(out.aux_value("m2"), Some(0.0), "seed {seed}");
                assert!(out.aux_value("m3").unwrap() > 0.0, "seed {seed}");
                saw_empty = true;
            }
        }
        assert!(saw_empty, "never observed an empty ones-partition");
    }

    #[test]
    fn two_stage_handles_priors_above_half() {
        let mut cfg = SchemeConfig::new(SchemeVariant::TwoStageCorrelated, 14, 0.3);
        cfg.epsilon = 0.3;
        cfg.delta = 3;
        cfg.q = Some(0.9); // complement path
        cfg.r_flip = Some(0.2);
        let mut successes = 0;
        for seed in 0..60 {
            if run_two_stage(&cfg, seed).unwrap().success {
                successes += 1;
            }
        }
        assert!(successes > 0, "complemented decoding never succeeded");
    }

    #[test]
    fn two_stage_rejects_unbiased_prior() {
        let mut cfg = SchemeConfig::new(SchemeVariant::TwoStageCorrelated, 14, 0.3);
        cfg.q = Some(0.5);
        cfg.r_flip = Some(0.2);
        assert!(matches!(run_two_stage(&cfg, 1), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn scheme_validation_rejects_oversize_ml_instances() {
        let cfg = SchemeConfig::new(SchemeVariant::NoiselessLdpc, 40, 0.1);
        assert!(matches!(
            run_noiseless(&cfg, 1),
            Err(Error::InstanceTooLarge(_))
        ));
    }

    #[test]
    fn trial_csv_row_shape() {
        let mut cfg = SchemeConfig::new(SchemeVariant::NoiselessLdpc, 12, 0.1);
        cfg.epsilon = 0.3;
        cfg.delta = 3;
        let out = run_noiseless(&cfg, 2).unwrap();
        let row = out.to_csv_row(0);
        assert_eq!(row.split(',').count(), 6);
        assert!(TrialOutcome::CSV_HEADER.starts_with("trial,"));
    }
}
