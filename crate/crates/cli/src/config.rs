//! Effective run configuration: flags over config file over built-in defaults.
//! `GAMMA1_LAB_THREADS` replaces the built-in thread default.

use std::path::{Path, PathBuf};

use gamma1_core::family::{FamilyParams, TruncationPolicy};
use gamma1_core::TestFnKind;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const THREADS_ENV: &str = "GAMMA1_LAB_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

/// Inclusive level range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QRange {
    pub min: u64,
    pub max: u64,
    pub primes_only: bool,
}

impl QRange {
    pub fn levels(&self) -> Vec<u64> {
        if self.min > self.max {
            return Vec::new();
        }
        (self.min..=self.max)
            .filter(|&q| !self.primes_only || gamma1_core::arith::is_prime(q))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub q: Option<u64>,
    pub q_range: Option<QRange>,
    pub k: u32,
    pub delta: f64,
    pub testfn: TestFnKind,
    pub tail_eps: f64,
    pub st_cap: u64,
    pub deterministic: bool,
    /// Worker count; 0 lets the pool choose.
    pub threads: usize,
    pub output_path: Option<PathBuf>,
    pub format: OutputFormat,
}

/// One configuration layer; unset fields fall through to the next.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigLayer {
    pub q: Option<u64>,
    pub q_min: Option<u64>,
    pub q_max: Option<u64>,
    pub primes_only: Option<bool>,
    pub k: Option<u32>,
    pub delta: Option<f64>,
    pub testfn: Option<TestFnKind>,
    pub tail_eps: Option<f64>,
    pub st_cap: Option<u64>,
    pub deterministic: Option<bool>,
    pub threads: Option<usize>,
    pub output_path: Option<PathBuf>,
    pub format: Option<OutputFormat>,
}

impl ConfigLayer {
    pub fn from_file(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// Fields of `self` win over `lower`.
    pub fn over(self, lower: ConfigLayer) -> ConfigLayer {
        ConfigLayer {
            q: self.q.or(lower.q),
            q_min: self.q_min.or(lower.q_min),
            q_max: self.q_max.or(lower.q_max),
            primes_only: self.primes_only.or(lower.primes_only),
            k: self.k.or(lower.k),
            delta: self.delta.or(lower.delta),
            testfn: self.testfn.or(lower.testfn),
            tail_eps: self.tail_eps.or(lower.tail_eps),
            st_cap: self.st_cap.or(lower.st_cap),
            deterministic: self.deterministic.or(lower.deterministic),
            threads: self.threads.or(lower.threads),
            output_path: self.output_path.or(lower.output_path),
            format: self.format.or(lower.format),
        }
    }
}

fn env_threads() -> CliResult<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(v) if !v.trim().is_empty() => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::Config(format!("{THREADS_ENV}={v:?} is not a thread count"))),
        _ => Ok(None),
    }
}

impl RunConfig {
    /// `default_format` applies when neither flags nor file set one.
    pub fn resolve(flags: ConfigLayer, file: Option<ConfigLayer>, default_format: OutputFormat) -> CliResult<Self> {
        let layer = flags.over(file.unwrap_or_default());
        let policy = TruncationPolicy::default();
        let q_range = match (layer.q_min, layer.q_max) {
            (Some(min), Some(max)) => Some(QRange { min, max, primes_only: layer.primes_only.unwrap_or(false) }),
            (None, None) => None,
            _ => return Err(CliError::Config("q_min and q_max must be given together".into())),
        };
        let deterministic = layer.deterministic.unwrap_or(false);
        let threads = match layer.threads {
            Some(t) => t,
            None => env_threads()?.unwrap_or(0),
        };
        let cfg = RunConfig {
            q: layer.q,
            q_range,
            k: layer.k.unwrap_or(3),
            delta: layer.delta.unwrap_or(1.0),
            testfn: layer.testfn.unwrap_or(TestFnKind::Fejer),
            tail_eps: layer.tail_eps.unwrap_or(policy.tail_eps),
            st_cap: layer.st_cap.unwrap_or(policy.st_cap),
            deterministic,
            threads: if deterministic { 1 } else { threads },
            output_path: layer.output_path,
            format: layer.format.unwrap_or(default_format),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> CliResult<()> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.k < 3 || self.k % 2 == 0 {
            return bad(format!("k = {} must be odd and >= 3", self.k));
        }
        if let Some(q) = self.q {
            if q < 3 {
                return bad(format!("q = {q} must be >= 3"));
            }
        }
        if let Some(r) = self.q_range {
            if r.min < 3 {
                return bad(format!("q_min = {} must be >= 3", r.min));
            }
        }
        if !(self.tail_eps > 0.0 && self.tail_eps < 1.0) {
            return bad(format!("tail_eps = {} must lie in (0, 1)", self.tail_eps));
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return bad(format!("delta = {} must be positive", self.delta));
        }
        if self.st_cap == 0 {
            return bad("st_cap must be positive".into());
        }
        Ok(())
    }

    pub fn policy(&self) -> TruncationPolicy {
        TruncationPolicy { tail_eps: self.tail_eps, st_cap: self.st_cap, deterministic: self.deterministic }
    }

    pub fn params_for(&self, q: u64) -> CliResult<FamilyParams> {
        Ok(FamilyParams::new(q, self.k)?)
    }

    pub fn single_q(&self) -> CliResult<u64> {
        self.q.ok_or_else(|| CliError::Usage("--q is required".into()))
    }

    pub fn range(&self) -> CliResult<QRange> {
        self.q_range.ok_or_else(|| CliError::Usage("--q-min and --q-max are required".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_beat_file_beat_defaults() {
        let file = ConfigLayer { q: Some(211), k: Some(5), delta: Some(0.5), ..Default::default() };
        let flags = ConfigLayer { q: Some(101), ..Default::default() };
        let cfg = RunConfig::resolve(flags, Some(file), OutputFormat::Json).unwrap();
        assert_eq!((cfg.q, cfg.k, cfg.delta), (Some(101), 5, 0.5));
        assert_eq!(cfg.tail_eps, TruncationPolicy::default().tail_eps);
    }

    #[test]
    fn invalid_values_rejected() {
        for layer in [
            ConfigLayer { k: Some(4), ..Default::default() },
            ConfigLayer { q: Some(2), ..Default::default() },
            ConfigLayer { tail_eps: Some(1.5), ..Default::default() },
            ConfigLayer { q_min: Some(101), ..Default::default() },
        ] {
            assert!(RunConfig::resolve(layer, None, OutputFormat::Json).is_err());
        }
    }

    #[test]
    fn deterministic_forces_one_worker() {
        let layer = ConfigLayer { deterministic: Some(true), threads: Some(8), ..Default::default() };
        assert_eq!(RunConfig::resolve(layer, None, OutputFormat::Json).unwrap().threads, 1);
    }

    #[test]
    fn ranges() {
        let r = QRange { min: 101, max: 199, primes_only: true };
        assert_eq!(r.levels().len(), 21);
        assert!(QRange { min: 10, max: 5, primes_only: false }.levels().is_empty());
    }
}
