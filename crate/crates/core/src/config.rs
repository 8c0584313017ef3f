//! Flat `key = value` configuration files.
//!
//! Two schemas share the same syntax (`#` comments, one `key=value` per
//! line):
//!
//! * experiment configs use namespaced keys (`scheme.variant`, `source.p`,
//!   `channel.r_erase`, `ensemble.delta`, `harness.trials`, `harness.seed`,
//!   `sweep.param`, `sweep.values`, ...);
//! * matrix-generation configs use the short keys `ensemble`, `n`, `m`,
//!   `delta`, `N`, `K`, `rho_c`, `M`, `c_low`, `seed`.
//!
//! Command-line `key=value` overrides are applied on top of the file before
//! any typed extraction, so they always win.

use std::collections::BTreeMap;

use crate::ensembles::{
    heavy_row_factor, GallagerRegularConfig, LdgmEnsembleConfig, UniformDeltaConfig,
    DEFAULT_REJECTION_CAP,
};
use crate::error::{Error, Result};
use crate::harness::{Experiment, SweepAxis};
use crate::schemes::{SchemeConfig, SchemeVariant};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FlatConfig {
    entries: BTreeMap<String, String>,
}

impl FlatConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Parse(format!(
                    "line {}: expected key=value, got {raw:?}",
                    lineno + 1
                )));
            };
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if entries.insert(key.clone(), value).is_some() {
                return Err(Error::Parse(format!(
                    "line {}: duplicate key {key:?}",
                    lineno + 1
                )));
            }
        }
        Ok(FlatConfig { entries })
    }

    pub fn set(&mut self, key: &str, value: &str) {
        self.entries.insert(key.to_string(), value.to_string());
    }

    /// Applies `key=value` strings on top of the file contents.
    pub fn apply_overrides(&mut self, overrides: &[String]) -> Result<()> {
        for item in overrides {
            let Some((key, value)) = item.split_once('=') else {
                return Err(Error::InvalidConfig(format!(
                    "override must look like key=value, got {item:?}"
                )));
            };
            self.set(key.trim(), value.trim());
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn require(&self, key: &str) -> Result<&str> {
        self.get(key)
            .ok_or_else(|| Error::InvalidConfig(format!("missing required key `{key}`")))
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn get_f64(&self, key: &str) -> Result<Option<f64>> {
        self.get(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| Error::InvalidConfig(format!("key `{key}`: bad number {v:?}")))
            })
            .transpose()
    }

    pub fn require_f64(&self, key: &str) -> Result<f64> {
        self.require(key)?;
        Ok(self.get_f64(key)?.expect("key present"))
    }

    pub fn get_usize(&self, key: &str) -> Result<Option<usize>> {
        self.get(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| Error::InvalidConfig(format!("key `{key}`: bad integer {v:?}")))
            })
            .transpose()
    }

    pub fn require_usize(&self, key: &str) -> Result<usize> {
        self.require(key)?;
        Ok(self.get_usize(key)?.expect("key present"))
    }

    pub fn get_u64(&self, key: &str) -> Result<Option<u64>> {
        self.get(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| Error::InvalidConfig(format!("key `{key}`: bad integer {v:?}")))
            })
            .transpose()
    }

    pub fn require_u64(&self, key: &str) -> Result<u64> {
        self.require(key)?;
        Ok(self.get_u64(key)?.expect("key present"))
    }

    pub fn get_bool(&self, key: &str) -> Result<Option<bool>> {
        self.get(key)
            .map(|v| match v {
                "true" | "1" | "yes" => Ok(true),
                "false" | "0" | "no" => Ok(false),
                other => Err(Error::InvalidConfig(format!(
                    "key `{key}`: bad boolean {other:?}"
                ))),
            })
            .transpose()
    }
}

/// Keys an experiment config may contain; anything else is rejected so
/// typos fail loudly.
const EXPERIMENT_KEYS: &[&str] = &[
    "scheme.variant",
    "scheme.epsilon",
    "scheme.epsilon_prime",
    "scheme.margin",
    "scheme.m",
    "scheme.ml_cap",
    "scheme.check_oracle",
    "scheme.k1",
    "scheme.k2",
    "source.n",
    "source.p",
    "source.q",
    "source.r_flip",
    "channel.r_erase",
    "ensemble.delta",
    "ensemble.rho_c",
    "ensemble.c_low",
    "ensemble.c_high",
    "ensemble.rejection_cap",
    "harness.trials",
    "harness.seed",
    "sweep.param",
    "sweep.values",
    "check.reference",
    "check.direction",
    "check.tolerance",
];

pub fn scheme_from_config(cfg: &FlatConfig) -> Result<SchemeConfig> {
    for key in cfg.keys() {
        if !EXPERIMENT_KEYS.contains(&key) && !key.starts_with("verify.") {
            return Err(Error::InvalidConfig(format!("unknown key `{key}`")));
        }
    }
    let variant = SchemeVariant::parse(cfg.require("scheme.variant")?)?;
    let n = cfg.require_usize("source.n")?;
    let p = cfg.require_f64("source.p")?;
    let mut scheme = SchemeConfig::new(variant, n, p);
    scheme.delta = cfg.require_usize("ensemble.delta")?;
    scheme.q = cfg.get_f64("source.q")?;
    scheme.r_flip = cfg.get_f64("source.r_flip")?;
    if let Some(v) = cfg.get_f64("channel.r_erase")? {
        scheme.r_erase = v;
    }
    match variant {
        SchemeVariant::Prop1Ensemble => {
            if let Some(v) = cfg.get_f64("scheme.epsilon")? {
                scheme.epsilon = v;
            }
        }
        _ => scheme.epsilon = cfg.require_f64("scheme.epsilon")?,
    }
    if let Some(v) = cfg.get_f64("scheme.epsilon_prime")? {
        scheme.epsilon_prime = v;
    }
    if let Some(v) = cfg.get_f64("scheme.margin")? {
        scheme.margin = v;
    }
    if let Some(v) = cfg.get_usize("scheme.m")? {
        scheme.m_override = Some(v);
    }
    if let Some(v) = cfg.get_usize("scheme.ml_cap")? {
        scheme.ml_cap = v;
    }
    if let Some(v) = cfg.get_bool("scheme.check_oracle")? {
        scheme.check_oracle = v;
    }
    if let Some(v) = cfg.get_f64("ensemble.rho_c")? {
        scheme.rho_c = v;
        scheme.c_low = v;
        scheme.c_high = v;
    }
    if let Some(v) = cfg.get_f64("ensemble.c_low")? {
        scheme.c_low = v;
    }
    if let Some(v) = cfg.get_f64("ensemble.c_high")? {
        scheme.c_high = v;
    }
    if let Some(v) = cfg.get_usize("ensemble.rejection_cap")? {
        scheme.rejection_cap = v;
    }
    scheme.validate()?;
    Ok(scheme)
}

pub fn experiment_from_config(cfg: &FlatConfig) -> Result<Experiment> {
    let scheme = scheme_from_config(cfg)?;
    let trials = cfg.require_usize("harness.trials")?;
    let master_seed = cfg.require_u64("harness.seed")?;
    let sweep = match cfg.get("sweep.param") {
        None => {
            if cfg.get("sweep.values").is_some() {
                return Err(Error::InvalidConfig(
                    "sweep.values given without sweep.param".into(),
                ));
            }
            None
        }
        Some(param) => {
            let values = cfg
                .require("sweep.values")?
                .split(',')
                .map(|tok| {
                    let tok = tok.trim();
                    tok.parse::<f64>().map_err(|_| {
                        Error::InvalidConfig(format!("sweep.values: bad number {tok:?}"))
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            Some(SweepAxis {
                param: param.to_string(),
                values,
            })
        }
    };
    let exp = Experiment {
        scheme,
        trials,
        master_seed,
        sweep,
    };
    exp.validate()?;
    // sweeping must produce valid configs at every point
    if let Some(axis) = &exp.sweep {
        for &v in &axis.values {
            let mut probe = exp.scheme.clone();
            apply_scheme_value(&mut probe, &axis.param, v)?;
            probe.validate()?;
        }
    }
    Ok(exp)
}

fn as_usize(key: &str, v: f64) -> Result<usize> {
    if v < 0.0 || v.fract() != 0.0 || v > usize::MAX as f64 {
        return Err(Error::InvalidConfig(format!(
            "key `{key}` needs a nonnegative integer, got {v}"
        )));
    }
    Ok(v as usize)
}

/// Applies one numeric sweep value to its scheme field.
pub fn apply_scheme_value(scheme: &mut SchemeConfig, key: &str, value: f64) -> Result<()> {
    match key {
        "source.n" => scheme.n = as_usize(key, value)?,
        "source.p" => scheme.p = value,
        "source.q" => scheme.q = Some(value),
        "source.r_flip" => scheme.r_flip = Some(value),
        "channel.r_erase" => scheme.r_erase = value,
        "scheme.epsilon" => scheme.epsilon = value,
        "scheme.epsilon_prime" => scheme.epsilon_prime = value,
        "scheme.margin" => scheme.margin = value,
        "scheme.m" => scheme.m_override = Some(as_usize(key, value)?),
        "ensemble.delta" => scheme.delta = as_usize(key, value)?,
        "ensemble.rho_c" => {
            scheme.rho_c = value;
            scheme.c_low = value;
            scheme.c_high = value;
        }
        "ensemble.c_low" => scheme.c_low = value,
        "ensemble.c_high" => scheme.c_high = value,
        other => {
            return Err(Error::InvalidConfig(format!(
                "parameter `{other}` cannot be swept"
            )))
        }
    }
    Ok(())
}

/// A parsed matrix-generation request.
#[derive(Debug, Clone, PartialEq)]
pub enum EnsembleSpec {
    UniformDelta(UniformDeltaConfig),
    Gallager(GallagerRegularConfig),
    BernoulliLdgm(LdgmEnsembleConfig),
    FilteredLdgm(LdgmEnsembleConfig),
}

impl EnsembleSpec {
    /// Samples the configured ensemble; the second element is the rejection
    /// count for the filtered sampler.
    pub fn sample(
        &self,
        seed: u64,
    ) -> Result<(crate::gf2::SparseBinaryMatrix, Option<usize>)> {
        match self {
            EnsembleSpec::UniformDelta(cfg) => {
                Ok((crate::ensembles::sample_uniform_delta(cfg, seed)?, None))
            }
            EnsembleSpec::Gallager(cfg) => {
                Ok((crate::ensembles::sample_gallager_regular(cfg, seed)?, None))
            }
            EnsembleSpec::BernoulliLdgm(cfg) => {
                Ok((crate::ensembles::sample_bernoulli_ldgm(cfg, seed)?, None))
            }
            EnsembleSpec::FilteredLdgm(cfg) => {
                let (m, rejections) = crate::ensembles::sample_filtered_ldgm(cfg, seed)?;
                Ok((m, Some(rejections)))
            }
        }
    }
}

const ENSEMBLE_KEYS: &[&str] = &[
    "ensemble", "n", "m", "delta", "N", "K", "rho_c", "M", "c_low", "seed", "rejection_cap",
];

/// Parses a matrix-generation config; returns the ensemble and the seed.
pub fn ensemble_from_config(cfg: &FlatConfig) -> Result<(EnsembleSpec, u64)> {
    for key in cfg.keys() {
        if !ENSEMBLE_KEYS.contains(&key) {
            return Err(Error::InvalidConfig(format!("unknown key `{key}`")));
        }
    }
    let seed = cfg.require_u64("seed")?;
    let kind = cfg.require("ensemble")?;
    let spec = match kind {
        "uniform-delta" => EnsembleSpec::UniformDelta(UniformDeltaConfig::new(
            cfg.require_usize("n")?,
            cfg.require_usize("m")?,
            cfg.require_usize("delta")?,
        )),
        "gallager" => EnsembleSpec::Gallager(GallagerRegularConfig::new(
            cfg.require_usize("n")?,
            cfg.require_usize("m")?,
            cfg.require_usize("delta")?,
        )),
        "bernoulli-ldgm" | "filtered-ldgm" => {
            let code_len = cfg.require_usize("N")?;
            let msg_len = cfg.require_usize("K")?;
            let rho_c = cfg.get_f64("rho_c")?.unwrap_or(crate::ensembles::DEFAULT_RHO_C);
            let mut ldgm = LdgmEnsembleConfig::with_density_constant(code_len, msg_len, rho_c);
            if let Some(m_big) = cfg.get_f64("M")? {
                ldgm.c_high = m_big;
            }
            if let Some(c_low) = cfg.get_f64("c_low")? {
                ldgm.c_low = c_low;
                ldgm.heavy_row_factor = heavy_row_factor(c_low);
            }
            ldgm.rejection_cap = cfg
                .get_usize("rejection_cap")?
                .unwrap_or(DEFAULT_REJECTION_CAP);
            if kind == "bernoulli-ldgm" {
                EnsembleSpec::BernoulliLdgm(ldgm)
            } else {
                EnsembleSpec::FilteredLdgm(ldgm)
            }
        }
        other => {
            return Err(Error::InvalidConfig(format!(
                "unknown ensemble {other:?} (expected uniform-delta, gallager, bernoulli-ldgm, or filtered-ldgm)"
            )))
        }
    };
    // fail early on invalid parameters rather than at sampling time
    match &spec {
        EnsembleSpec::UniformDelta(c) => c.validate()?,
        EnsembleSpec::Gallager(c) => c.validate()?,
        EnsembleSpec::BernoulliLdgm(c) | EnsembleSpec::FilteredLdgm(c) => c.validate()?,
    }
    Ok((spec, seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_comments_and_blanks() {
        let cfg = FlatConfig::parse(
            "# full-line comment\n\
             source.n = 24   # trailing comment\n\
             \n\
             source.p=0.1\n",
        )
        .unwrap();
        assert_eq!(cfg.get("source.n"), Some("24"));
        assert_eq!(cfg.get("source.p"), Some("0.1"));
        assert!(FlatConfig::parse("novalue\n").is_err());
        assert!(FlatConfig::parse("a=1\na=2\n").is_err());
    }

    #[test]
    fn overrides_beat_file_values() {
        let mut cfg = FlatConfig::parse("source.p = 0.1\n").unwrap();
        cfg.apply_overrides(&["source.p=0.2".into(), "source.q = 0.3".into()])
            .unwrap();
        assert_eq!(cfg.get("source.p"), Some("0.2"));
        assert_eq!(cfg.get("source.q"), Some("0.3"));
        assert!(cfg.apply_overrides(&["nonsense".into()]).is_err());
    }

    fn experiment_text() -> &'static str {
        "scheme.variant = noiseless-ldpc\n\
         source.n = 24\n\
         source.p = 0.1\n\
         scheme.epsilon = 0.3\n\
         ensemble.delta = 6\n\
         harness.trials = 10\n\
         harness.seed = 7\n"
    }

    #[test]
    fn experiment_round_trip() {
        let cfg = FlatConfig::parse(experiment_text()).unwrap();
        let exp = experiment_from_config(&cfg).unwrap();
        assert_eq!(exp.trials, 10);
        assert_eq!(exp.master_seed, 7);
        assert_eq!(exp.scheme.variant, SchemeVariant::NoiselessLdpc);
        assert_eq!(exp.scheme.delta, 6);
        assert!(exp.sweep.is_none());
    }

    #[test]
    fn missing_key_is_named() {
        let cfg = FlatConfig::parse("scheme.variant = noiseless-ldpc\n").unwrap();
        let err = experiment_from_config(&cfg).unwrap_err();
        assert!(err.to_string().contains("source.n"), "{err}");
    }

    #[test]
    fn unknown_key_is_rejected() {
        let mut cfg = FlatConfig::parse(experiment_text()).unwrap();
        cfg.set("source.typo", "1");
        let err = experiment_from_config(&cfg).unwrap_err();
        assert!(err.to_string().contains("source.typo"), "{err}");
    }

    #[test]
    fn sweep_axis_parses_and_validates() {
        let mut cfg = FlatConfig::parse(experiment_text()).unwrap();
        cfg.set("sweep.param", "scheme.m");
        cfg.set("sweep.values", "16, 10");
        let exp = experiment_from_config(&cfg).unwrap();
        let axis = exp.sweep.unwrap();
        assert_eq!(axis.param, "scheme.m");
        assert_eq!(axis.values, vec![16.0, 10.0]);

        let mut cfg = FlatConfig::parse(experiment_text()).unwrap();
        cfg.set("sweep.values", "1,2");
        assert!(experiment_from_config(&cfg).is_err());

        // sweep values must keep the config valid
        let mut cfg = FlatConfig::parse(experiment_text()).unwrap();
        cfg.set("sweep.param", "source.p");
        cfg.set("sweep.values", "0.1,0.7");
        assert!(experiment_from_config(&cfg).is_err());
    }

    #[test]
    fn ensemble_specs_parse() {
        let cfg = FlatConfig::parse("ensemble=gallager\nn=24\nm=16\ndelta=6\nseed=1\n").unwrap();
        let (spec, seed) = ensemble_from_config(&cfg).unwrap();
        assert_eq!(seed, 1);
        match spec {
            EnsembleSpec::Gallager(c) => {
                assert_eq!((c.n, c.m, c.row_weight), (24, 16, 6));
            }
            other => panic!("wrong spec {other:?}"),
        }

        let cfg =
            FlatConfig::parse("ensemble=filtered-ldgm\nN=256\nK=128\nrho_c=2\nM=2\nc_low=2\nseed=3\n")
                .unwrap();
        let (spec, _) = ensemble_from_config(&cfg).unwrap();
        match spec {
            EnsembleSpec::FilteredLdgm(c) => {
                assert_eq!((c.code_len, c.msg_len), (256, 128));
                assert!((c.rho - 2.0 * 8.0 / 256.0).abs() < 1e-12);
                assert!((c.heavy_row_factor - 3.001).abs() < 1e-9);
            }
            other => panic!("wrong spec {other:?}"),
        }

        let cfg = FlatConfig::parse("ensemble=unknown\nseed=1\n").unwrap();
        assert!(ensemble_from_config(&cfg).is_err());
        let cfg = FlatConfig::parse("ensemble=gallager\nn=24\nm=16\nseed=1\n").unwrap();
        let err = ensemble_from_config(&cfg).unwrap_err();
        assert!(err.to_string().contains("delta"), "{err}");
    }
}
