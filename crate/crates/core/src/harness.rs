//! Monte Carlo experiment engine: deterministic trial orchestration,
//! Wilson-interval statistics, bound/trend verdicts, and the CSV contract.
//!
//! Per-trial seeds derive from (master seed, point index, trial index), so a
//! `SweepResult` is a pure function of its `Experiment` no matter how many
//! threads execute the trials; aggregation always walks trials in index
//! order.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use rayon::prelude::*;

use crate::config;
use crate::error::{Error, Result};
use crate::schemes::{run_trial, SchemeConfig};
use crate::seeding::derive_trial_seed;

/// 97.5th normal percentile, for two-sided 95% Wilson intervals.
const Z95: f64 = 1.959963984540054;

/// One sweep axis: the namespaced config key to vary and its values.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxis {
    pub param: String,
    pub values: Vec<f64>,
}

/// A batch of seeded trials of one scheme, optionally swept along one axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub scheme: SchemeConfig,
    pub trials: usize,
    pub master_seed: u64,
    pub sweep: Option<SweepAxis>,
}

impl Experiment {
    pub fn single(scheme: SchemeConfig, trials: usize, master_seed: u64) -> Self {
        Experiment {
            scheme,
            trials,
            master_seed,
            sweep: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidConfig("experiment needs trials >= 1".into()));
        }
        if let Some(axis) = &self.sweep {
            if axis.values.is_empty() {
                return Err(Error::InvalidConfig("sweep needs at least one value".into()));
            }
        }
        Ok(())
    }
}

/// A closed-form reference value with a short provenance tag.
#[derive(Debug, Clone, PartialEq)]
pub struct Reference {
    pub value: f64,
    pub formula: String,
}

impl Reference {
    pub fn new(value: f64, formula: impl Into<String>) -> Self {
        Reference {
            value,
            formula: formula.into(),
        }
    }
}

/// A named aggregate (mean over the trials that reported it), optionally
/// annotated with a closed-form reference.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    pub name: String,
    pub value: f64,
    pub reference: Option<Reference>,
}

/// Aggregated statistics at one sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub param: String,
    /// None for single-point experiments.
    pub value: Option<f64>,
    pub trials: usize,
    pub successes: usize,
    pub error_rate: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub observables: Vec<Observable>,
    pub reference: Option<Reference>,
}

impl SweepPoint {
    pub fn observable(&self, name: &str) -> Option<&Observable> {
        self.observables.iter().find(|o| o.name == name)
    }

    pub fn observable_value(&self, name: &str) -> Option<f64> {
        self.observable(name).map(|o| o.value)
    }

    /// Wilson interval on the success rate (the error-rate CI reflected).
    pub fn success_ci(&self) -> (f64, f64) {
        (1.0 - self.ci_hi, 1.0 - self.ci_lo)
    }

    pub fn success_rate(&self) -> f64 {
        1.0 - self.error_rate
    }

    /// Attaches a reference to a named observable (adds the observable at
    /// zero if no trial reported it).
    pub fn annotate(&mut self, name: &str, reference: Reference) {
        if let Some(o) = self.observables.iter_mut().find(|o| o.name == name) {
            o.reference = Some(reference);
        } else {
            self.observables.push(Observable {
                name: name.to_string(),
                value: 0.0,
                reference: Some(reference),
            });
        }
    }

    /// Rate + CI view of a 0/1 observable, reconstructing its trial count.
    pub fn frequency(&self, name: &str) -> Option<RateCi> {
        let mean = self.observable_value(name)?;
        let k = (mean * self.trials as f64).round() as usize;
        let (lo, hi) = wilson_ci(k, self.trials);
        Some(RateCi {
            rate: mean,
            ci_lo: lo,
            ci_hi: hi,
        })
    }

    pub fn error_rate_ci(&self) -> RateCi {
        RateCi {
            rate: self.error_rate,
            ci_lo: self.ci_lo,
            ci_hi: self.ci_hi,
        }
    }

    pub fn success_rate_ci(&self) -> RateCi {
        let (lo, hi) = self.success_ci();
        RateCi {
            rate: self.success_rate(),
            ci_lo: lo,
            ci_hi: hi,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub points: Vec<SweepPoint>,
}

/// Runs every trial of every sweep point and aggregates in trial order.
/// Component errors become per-trial failures with an `error:<code>` reason
/// and never abort the sweep.
pub fn run_experiment(exp: &Experiment) -> Result<SweepResult> {
    exp.validate()?;
    let point_configs: Vec<(String, Option<f64>, SchemeConfig)> = match &exp.sweep {
        None => vec![(String::new(), None, exp.scheme.clone())],
        Some(axis) => axis
            .values
            .iter()
            .map(|&v| {
                let mut cfg = exp.scheme.clone();
                config::apply_scheme_value(&mut cfg, &axis.param, v)?;
                Ok((axis.param.clone(), Some(v), cfg))
            })
            .collect::<Result<_>>()?,
    };

    let mut points = Vec::with_capacity(point_configs.len());
    for (index, (param, value, cfg)) in point_configs.into_iter().enumerate() {
        let outcomes = point_outcomes(&cfg, exp.trials, exp.master_seed, index as u64);

        let mut successes = 0usize;
        let mut failure_counts: BTreeMap<String, usize> = BTreeMap::new();
        let mut sums: BTreeMap<String, (f64, usize)> = BTreeMap::new();
        for res in &outcomes {
            match res {
                Ok(out) => {
                    if out.success {
                        successes += 1;
                    } else {
                        let label = out
                            .failure_reason
                            .map(|r| r.label().to_string())
                            .unwrap_or_else(|| "unspecified".to_string());
                        *failure_counts.entry(label).or_insert(0) += 1;
                    }
                    for (k, v) in &out.aux {
                        let entry = sums.entry(k.clone()).or_insert((0.0, 0));
                        entry.0 += v;
                        entry.1 += 1;
                    }
                    let entry = sums.entry("queries_issued".into()).or_insert((0.0, 0));
                    entry.0 += out.queries_issued as f64;
                    entry.1 += 1;
                    let entry = sums.entry("max_row_weight".into()).or_insert((0.0, 0));
                    entry.0 += out.max_row_weight as f64;
                    entry.1 += 1;
                }
                Err(e) => {
                    *failure_counts.entry(format!("error:{}", e.code())).or_insert(0) += 1;
                }
            }
        }

        let mut observables: Vec<Observable> = sums
            .into_iter()
            .map(|(name, (sum, count))| Observable {
                name,
                value: sum / count as f64,
                reference: None,
            })
            .collect();
        for (reason, count) in &failure_counts {
            observables.push(Observable {
                name: format!("failures:{reason}"),
                value: *count as f64,
                reference: None,
            });
        }

        let failures = exp.trials - successes;
        let (ci_lo, ci_hi) = wilson_ci(failures, exp.trials);
        points.push(SweepPoint {
            param: param.clone(),
            value,
            trials: exp.trials,
            successes,
            error_rate: failures as f64 / exp.trials as f64,
            ci_lo,
            ci_hi,
            observables,
            reference: None,
        });
    }
    Ok(SweepResult { points })
}

/// The raw trial outcomes of one sweep point, in trial order. The seed of
/// trial `t` is `derive_trial_seed(master_seed, point_index, t)`.
pub fn point_outcomes(
    cfg: &SchemeConfig,
    trials: usize,
    master_seed: u64,
    point_index: u64,
) -> Vec<Result<crate::schemes::TrialOutcome>> {
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let seed = derive_trial_seed(master_seed, point_index, t as u64);
            run_trial(cfg, seed)
        })
        .collect()
}

/// 95% Wilson score interval for `k` events out of `n`.
pub fn wilson_ci(k: usize, n: usize) -> (f64, f64) {
    assert!(n > 0, "wilson interval needs n >= 1");
    assert!(k <= n);
    let nf = n as f64;
    let p = k as f64 / nf;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = Z95 / denom * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// An observed rate with its 95% interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateCi {
    pub rate: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    /// The weaker of two verdicts (Pass < Inconclusive < Fail).
    pub fn and(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (Fail, _) | (_, Fail) => Fail,
            (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
            _ => Pass,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "INCONCLUSIVE",
        };
        f.write_str(s)
    }
}

/// Claimed relation of the observed rate to a closed-form reference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Direction {
    /// Observed rate claimed <= reference.
    Le,
    /// Observed rate claimed >= reference.
    Ge,
    /// Observed rate claimed equal to the reference within `tol`.
    Approx { tol: f64 },
}

/// PASS when the interval sits on the claimed side (or the point estimate
/// matches within tolerance, for `Approx`); FAIL when it sits decisively on
/// the wrong side; INCONCLUSIVE when the interval straddles the reference.
pub fn compare_to_bound(observed: RateCi, reference: f64, direction: Direction) -> Verdict {
    match direction {
        Direction::Le => {
            if observed.ci_hi <= reference {
                Verdict::Pass
            } else if observed.ci_lo > reference {
                Verdict::Fail
            } else {
                Verdict::Inconclusive
            }
        }
        Direction::Ge => {
            if observed.ci_lo >= reference {
                Verdict::Pass
            } else if observed.ci_hi < reference {
                Verdict::Fail
            } else {
                Verdict::Inconclusive
            }
        }
        Direction::Approx { tol } => {
            if (observed.rate - reference).abs() <= tol {
                Verdict::Pass
            } else if observed.ci_hi + tol < reference || observed.ci_lo - tol > reference {
                Verdict::Fail
            } else {
                Verdict::Inconclusive
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trend {
    NonDecreasing,
    NonIncreasing,
}

/// PASS when every adjacent pair follows the direction up to overlapping-CI
/// slack; FAIL when some pair moves the wrong way with disjoint intervals.
pub fn trend_check(points: &[RateCi], trend: Trend) -> Result<Verdict> {
    if points.len() < 3 {
        return Err(Error::InvalidConfig(
            "trend check needs at least 3 sweep points".into(),
        ));
    }
    for pair in points.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let ok = match trend {
            Trend::NonDecreasing => b.rate >= a.rate || b.ci_hi >= a.ci_lo,
            Trend::NonIncreasing => b.rate <= a.rate || b.ci_lo <= a.ci_hi,
        };
        if !ok {
            return Ok(Verdict::Fail);
        }
    }
    Ok(Verdict::Pass)
}

// ---------------------------------------------------------------------------
// CSV contract
// ---------------------------------------------------------------------------

pub const CSV_HEADER: &str =
    "sweep_param,sweep_value,trials,successes,error_rate,ci_lo,ci_hi,aux_name,aux_value,reference,formula_tag";

/// 17 significant digits: round-trips every finite f64 exactly.
fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt_float(x: Option<f64>) -> String {
    x.map(fmt_float).unwrap_or_default()
}

/// One row per (point, observable), the point's error-rate row first with
/// an empty `aux_name`. UTF-8, LF line endings.
pub fn to_csv_string(result: &SweepResult) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for point in &result.points {
        let prefix = format!(
            "{},{},{},{},{},{},{}",
            point.param,
            fmt_opt_float(point.value),
            point.trials,
            point.successes,
            fmt_float(point.error_rate),
            fmt_float(point.ci_lo),
            fmt_float(point.ci_hi),
        );
        let (reference, formula) = reference_cells(&point.reference);
        out.push_str(&format!("{prefix},,,{reference},{formula}\n"));
        for obs in &point.observables {
            debug_assert!(!obs.name.contains(','));
            let (reference, formula) = reference_cells(&obs.reference);
            out.push_str(&format!(
                "{prefix},{},{},{reference},{formula}\n",
                obs.name,
                fmt_float(obs.value),
            ));
        }
    }
    out
}

fn reference_cells(r: &Option<Reference>) -> (String, String) {
    match r {
        Some(r) => {
            debug_assert!(!r.formula.contains(','));
            (fmt_float(r.value), r.formula.clone())
        }
        None => (String::new(), String::new()),
    }
}

pub fn emit_csv(result: &SweepResult, path: &Path) -> Result<()> {
    std::fs::write(path, to_csv_string(result))?;
    Ok(())
}

/// Parses a file produced by [`to_csv_string`]; numerics reproduce exactly.
pub fn parse_csv(text: &str) -> Result<SweepResult> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty CSV".into()))?;
    if header != CSV_HEADER {
        return Err(Error::Parse(format!("unexpected CSV header {header:?}")));
    }
    let mut points: Vec<SweepPoint> = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != 11 {
            return Err(Error::Parse(format!(
                "line {}: expected 11 cells, got {}",
                lineno + 2,
                cells.len()
            )));
        }
        let parse_f64 = |s: &str| -> Result<f64> {
            s.parse()
                .map_err(|_| Error::Parse(format!("line {}: bad float {s:?}", lineno + 2)))
        };
        let reference = if cells[9].is_empty() {
            None
        } else {
            Some(Reference {
                value: parse_f64(cells[9])?,
                formula: cells[10].to_string(),
            })
        };
        if cells[7].is_empty() {
            // error-rate row: opens a new point
            points.push(SweepPoint {
                param: cells[0].to_string(),
                value: if cells[1].is_empty() {
                    None
                } else {
                    Some(parse_f64(cells[1])?)
                },
                trials: cells[2]
                    .parse()
                    .map_err(|_| Error::Parse(format!("line {}: bad trials", lineno + 2)))?,
                successes: cells[3]
                    .parse()
                    .map_err(|_| Error::Parse(format!("line {}: bad successes", lineno + 2)))?,
                error_rate: parse_f64(cells[4])?,
                ci_lo: parse_f64(cells[5])?,
                ci_hi: parse_f64(cells[6])?,
                observables: Vec::new(),
                reference,
            });
        } else {
            let point = points.last_mut().ok_or_else(|| {
                Error::Parse(format!("line {}: observable before any point", lineno + 2))
            })?;
            point.observables.push(Observable {
                name: cells[7].to_string(),
                value: parse_f64(cells[8])?,
                reference,
            });
        }
    }
    Ok(SweepResult { points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schemes::SchemeVariant;

    fn small_experiment() -> Experiment {
        let mut cfg = SchemeConfig::new(SchemeVariant::NoiselessLdpc, 12, 0.1);
        cfg.epsilon = 0.3;
        cfg.delta = 3;
        Experiment::single(cfg, 50, 424242)
    }

    #[test]
    fn experiment_is_deterministic() {
        let exp = small_experiment();
        let a = run_experiment(&exp).unwrap();
        let b = run_experiment(&exp).unwrap();
        assert_eq!(a, b);
        assert_eq!(to_csv_string(&a), to_csv_string(&b));
    }

    #[test]
    fn counts_conserve() {
        let exp = small_experiment();
        let res = run_experiment(&exp).unwrap();
        let point = &res.points[0];
        let failure_total: f64 = point
            .observables
            .iter()
            .filter(|o| o.name.starts_with("failures:"))
            .map(|o| o.value)
            .sum();
        assert_eq!(
            point.successes + failure_total as usize,
            point.trials,
            "successes + failures must equal trials"
        );
    }

    #[test]
    fn sweep_points_follow_axis() {
        let mut exp = small_experiment();
        exp.trials = 20;
        exp.sweep = Some(SweepAxis {
            param: "scheme.m".into(),
            values: vec![4.0, 8.0, 12.0],
        });
        let res = run_experiment(&exp).unwrap();
        assert_eq!(res.points.len(), 3);
        for (point, m) in res.points.iter().zip([4.0, 8.0, 12.0]) {
            assert_eq!(point.value, Some(m));
            assert_eq!(point.observable_value("issued_m"), Some(m));
        }
    }

    #[test]
    fn trivial_deterministic_scheme_has_zero_error_rate() {
        // n = 1 with a single direct query: the coset is a singleton, so
        // every seed recovers and the single-trial error rate is exactly 0
        let mut cfg = SchemeConfig::new(SchemeVariant::Prop1Ensemble, 1, 0.2);
        cfg.delta = 1;
        cfg.m_override = Some(1);
        let exp = Experiment::single(cfg, 1, 7);
        let res = run_experiment(&exp).unwrap();
        let p = &res.points[0];
        assert_eq!(p.error_rate, 0.0);
        assert_eq!(p.ci_lo, 0.0);
        // single-trial wilson upper bound: z^2 / (1 + z^2) ~ 0.79
        assert!(p.ci_hi < 0.95);
    }

    #[test]
    fn component_errors_become_failure_reasons() {
        // a zero rejection cap passes scheme validation but fails when the
        // concatenated run builds its generator config; the sweep must
        // record that per trial instead of aborting
        let mut cfg = SchemeConfig::new(SchemeVariant::ConcatenatedErasure, 12, 0.1);
        cfg.epsilon = 0.3;
        cfg.delta = 3;
        cfg.r_erase = 0.2;
        cfg.rejection_cap = 0;
        let exp = Experiment::single(cfg, 10, 5);
        let res = run_experiment(&exp).unwrap();
        let point = &res.points[0];
        assert_eq!(point.successes, 0);
        assert_eq!(
            point.observable_value("failures:error:invalid_config"),
            Some(10.0)
        );
    }

    #[test]
    fn wilson_matches_bisection_oracle() {
        // endpoints of the Wilson interval are the p solving
        // (phat - p)^2 = z^2 p (1-p) / n
        fn oracle(k: usize, n: usize) -> (f64, f64) {
            let phat = k as f64 / n as f64;
            let f = |p: f64| (phat - p).powi(2) - Z95 * Z95 * p * (1.0 - p) / n as f64;
            // f is positive outside the interval, negative inside
            let mut lo = 0.0;
            let mut hi = phat;
            if f(0.0) <= 0.0 {
                lo = 0.0;
            } else {
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if f(mid) > 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                lo = 0.5 * (lo + hi);
            }
            let lower = lo;
            let (mut lo2, mut hi2) = (phat, 1.0);
            if f(1.0) <= 0.0 {
                hi2 = 1.0;
            } else {
                for _ in 0..200 {
                    let mid = 0.5 * (lo2 + hi2);
                    if f(mid) > 0.0 {
                        hi2 = mid;
                    } else {
                        lo2 = mid;
                    }
                }
                hi2 = 0.5 * (lo2 + hi2);
            }
            (lower, hi2)
        }
        for &(k, n) in &[(0usize, 10usize), (1, 10), (5, 10), (10, 10), (3, 1000), (997, 1000)] {
            let (lo, hi) = wilson_ci(k, n);
            let (olo, ohi) = oracle(k, n);
            assert!((lo - olo).abs() < 1e-9, "k={k} n={n}: lo {lo} vs {olo}");
            assert!((hi - ohi).abs() < 1e-9, "k={k} n={n}: hi {hi} vs {ohi}");
        }
    }

    #[test]
    fn comparator_examples() {
        let obs = RateCi {
            rate: 0.07,
            ci_lo: 0.05,
            ci_hi: 0.09,
        };
        assert_eq!(
            compare_to_bound(obs, 0.066, Direction::Approx { tol: 0.01 }),
            Verdict::Pass
        );
        let obs = RateCi {
            rate: 0.0005,
            ci_lo: 0.0,
            ci_hi: 0.001,
        };
        assert_eq!(compare_to_bound(obs, 0.05, Direction::Ge), Verdict::Fail);
        let obs = RateCi {
            rate: 0.05,
            ci_lo: 0.02,
            ci_hi: 0.08,
        };
        assert_eq!(
            compare_to_bound(obs, 0.05, Direction::Ge),
            Verdict::Inconclusive
        );
        let obs = RateCi {
            rate: 0.01,
            ci_lo: 0.005,
            ci_hi: 0.015,
        };
        assert_eq!(compare_to_bound(obs, 0.02, Direction::Le), Verdict::Pass);
        assert_eq!(compare_to_bound(obs, 0.001, Direction::Le), Verdict::Fail);
    }

    #[test]
    fn trend_examples() {
        let tight = |r: f64| RateCi {
            rate: r,
            ci_lo: r - 0.01,
            ci_hi: r + 0.01,
        };
        assert_eq!(
            trend_check(&[tight(0.4), tight(0.6), tight(0.9)], Trend::NonDecreasing).unwrap(),
            Verdict::Pass
        );
        assert_eq!(
            trend_check(&[tight(0.9), tight(0.5), tight(0.6)], Trend::NonDecreasing).unwrap(),
            Verdict::Fail
        );
        assert_eq!(
            trend_check(&[tight(0.9), tight(0.5), tight(0.2)], Trend::NonIncreasing).unwrap(),
            Verdict::Pass
        );
        // overlapping intervals excuse a small wobble
        let loose = |r: f64| RateCi {
            rate: r,
            ci_lo: r - 0.2,
            ci_hi: r + 0.2,
        };
        assert_eq!(
            trend_check(&[loose(0.5), loose(0.45), loose(0.6)], Trend::NonDecreasing).unwrap(),
            Verdict::Pass
        );
        assert!(trend_check(&[tight(0.1), tight(0.2)], Trend::NonDecreasing).is_err());
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let exp = small_experiment();
        let mut res = run_experiment(&exp).unwrap();
        res.points[0].reference = Some(Reference::new(0.25, "hand"));
        res.points[0].annotate("issued_m", Reference::new(9.0, "ceil(n*rate)"));
        let text = to_csv_string(&res);
        let parsed = parse_csv(&text).unwrap();
        assert_eq!(parsed, res);
        assert_eq!(to_csv_string(&parsed), text);
    }

    #[test]
    fn csv_header_only_for_empty_sweep() {
        let res = SweepResult { points: vec![] };
        let text = to_csv_string(&res);
        assert_eq!(text, format!("{CSV_HEADER}\n"));
        assert_eq!(parse_csv(&text).unwrap(), res);
    }

    #[test]
    fn csv_single_point_single_observable_is_one_data_row() {
        let res = SweepResult {
            points: vec![SweepPoint {
                param: String::new(),
                value: None,
                trials: 4,
                successes: 4,
                error_rate: 0.0,
                ci_lo: 0.0,
                ci_hi: 0.49,
                observables: vec![],
                reference: None,
            }],
        };
        let text = to_csv_string(&res);
        assert_eq!(text.lines().count(), 2, "header + one data row:\n{text}");
        assert_eq!(parse_csv(&text).unwrap(), res);
    }

    #[test]
    fn csv_float_precision_is_lossless() {
        let values = [
            0.1,
            1.0 / 3.0,
            6.588_549_858_403_98e-2,
            f64::MIN_POSITIVE,
            123456789.123456789,
        ];
        for v in values {
            let s = fmt_float(v);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), v.to_bits(), "{v} -> {s}");
        }
    }
}
