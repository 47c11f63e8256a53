//! Synthetic benchmark: ground truth graph, GMRF samples, both estimators,
//! FM/RE against the truth.
//!
//! Trial `t` of a run with base seed `s` uses `derive_seed(s, t)` as its own
//! seed, from which the graph, sample and learner streams are derived, so
//! trials are independent of each other and of the number of worker threads.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::greedy_balance_laplacian;
use crate::learn::{
    clime_unconstrained, learn_balanced_laplacian, sample_covariance, LearnConfig,
};
use crate::synth::{
    derive_seed, f_measure, gen_pd_balanced_er_graph, relative_error, sample_gmrf, SynthSpec,
    FM_EPS,
};

pub const METHOD_PROPOSED: &str = "proposed";
pub const METHOD_CLIME_GREED: &str = "clime-greed";
const PD_ATTEMPTS: u64 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    /// Graph parameters; `synth.seed` is the base seed of the whole run.
    pub synth: SynthSpec,
    pub k: usize,
    pub trials: usize,
    pub learn: LearnConfig,
    /// `rho` of the CLIME-Greed baseline. `None` uses the mean of the
    /// proposed method's per-node `rho` in the same trial.
    pub baseline_rho: Option<f64>,
    pub jobs: usize,
    /// Record wall-clock runtimes (makes outputs non-reproducible).
    pub timing: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            synth: SynthSpec::default(),
            k: 500,
            trials: 30,
            learn: LearnConfig::default(),
            baseline_rho: None,
            jobs: 1,
            timing: false,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        self.synth.validate()?;
        self.learn.validate()?;
        if self.trials == 0 || self.jobs == 0 {
            return Err(Error::InvalidInput("trials and jobs must be >= 1".into()));
        }
        if self.k <= self.synth.n {
            return Err(Error::InsufficientSamples {
                n: self.synth.n,
                k: self.k,
            });
        }
        if let Some(r) = self.baseline_rho {
            if !(r > 0.0) {
                return Err(Error::NonPositiveRho(r));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub seed: u64,
    pub fm: f64,
    pub re: f64,
    /// Sweeps of the proposed learner; `None` for the baseline.
    pub sweeps: Option<usize>,
    pub runtime_ms: Option<f64>,
    pub method: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: String,
    pub trials: usize,
    pub fm_mean: f64,
    pub fm_std: f64,
    pub re_mean: f64,
    pub re_std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub records: Vec<TrialRecord>,
    pub summary: Vec<MethodSummary>,
}

impl BenchReport {
    pub fn method(&self, name: &str) -> Option<&MethodSummary> {
        self.summary.iter().find(|s| s.method == name)
    }
}

fn elapsed_ms(start: Instant, timing: bool) -> Option<f64> {
    timing.then(|| start.elapsed().as_secs_f64() * 1e3)
}

/// Runs trial `t` and returns the proposed and baseline records, in that order.
pub fn run_trial(cfg: &BenchConfig, t: usize) -> Result<[TrialRecord; 2]> {
    let seed = derive_seed(cfg.synth.seed, t as u64);
    let spec = SynthSpec {
        seed: derive_seed(seed, 0),
        ..cfg.synth
    };
    let (truth, _) = gen_pd_balanced_er_graph(&spec, PD_ATTEMPTS)?;
    let x = sample_gmrf(truth.laplacian(), cfg.k, derive_seed(seed, 1))?;
    let c = sample_covariance(&x)?;
    let truth = truth.laplacian().matrix();
    let learn_cfg = LearnConfig {
        seed: derive_seed(seed, 2),
        ..cfg.learn
    };

    let start = Instant::now();
    let learned = learn_balanced_laplacian(&c, &learn_cfg)?;
    let proposed_ms = elapsed_ms(start, cfg.timing);
    let est = learned.balanced.laplacian().matrix();
    let proposed = TrialRecord {
        seed,
        fm: f_measure(est, truth, FM_EPS)?,
        re: relative_error(est, truth)?,
        sweeps: Some(learned.sweeps),
        runtime_ms: proposed_ms,
        method: METHOD_PROPOSED.into(),
    };

    let rho = cfg
        .baseline_rho
        .unwrap_or_else(|| learned.rhos.iter().sum::<f64>() / learned.rhos.len() as f64);
    let start = Instant::now();
    let baseline = greedy_balance_laplacian(&clime_unconstrained(&c, rho)?, learn_cfg.seed);
    let baseline_ms = elapsed_ms(start, cfg.timing);
    let est = baseline.laplacian().matrix();
    let greed = TrialRecord {
        seed,
        fm: f_measure(est, truth, FM_EPS)?,
        re: relative_error(est, truth)?,
        sweeps: None,
        runtime_ms: baseline_ms,
        method: METHOD_CLIME_GREED.into(),
    };
    Ok([proposed, greed])
}

/// Mean and sample standard deviation (zero for a single value).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

pub fn summarize(records: &[TrialRecord]) -> Vec<MethodSummary> {
    [METHOD_PROPOSED, METHOD_CLIME_GREED]
        .iter()
        .filter_map(|&method| {
            let rows: Vec<&TrialRecord> = records.iter().filter(|r| r.method == method).collect();
            if rows.is_empty() {
                return None;
            }
            let fm: Vec<f64> = rows.iter().map(|r| r.fm).collect();
            let re: Vec<f64> = rows.iter().map(|r| r.re).collect();
            let (fm_mean, fm_std) = mean_std(&fm);
            let (re_mean, re_std) = mean_std(&re);
            Some(MethodSummary {
                method: method.into(),
                trials: rows.len(),
                fm_mean,
                fm_std,
                re_mean,
                re_std,
            })
        })
        .collect()
}

/// Runs all trials on a pool of `cfg.jobs` threads. Records come back in trial
/// order whatever the thread count.
pub fn run_bench(cfg: &BenchConfig) -> Result<BenchReport> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| Error::InvalidInput(e.to_string()))?;
    let per_trial: Vec<[TrialRecord; 2]> = pool.install(|| {
        (0..cfg.trials)
            .into_par_iter()
            .map(|t| run_trial(cfg, t))
            .collect::<Result<_>>()
    })?;
    let records: Vec<TrialRecord> = per_trial.into_iter().flatten().collect();
    let summary = summarize(&records);
    Ok(BenchReport { records, summary })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_std_examples() {
        assert_eq!(mean_std(&[2.0]), (2.0, 0.0));
        let (m, s) = mean_std(&[1.0, 2.0, 3.0]);
        assert_eq!(m, 2.0);
        assert!((s - 1.0).abs() < 1e-15);
    }

    #[test]
    fn single_trial_summary_equals_record() {
        let cfg = BenchConfig {
            synth: SynthSpec {
                n: 8,
                p: 0.4,
                seed: 3,
                ..Default::default()
            },
            k: 200,
            trials: 1,
            ..Default::default()
        };
        let report = run_bench(&cfg).unwrap();
        assert_eq!(report.records.len(), 2);
        for rec in &report.records {
            let s = report.method(&rec.method).unwrap();
            assert_eq!((s.fm_mean, s.re_mean, s.fm_std, s.trials), (rec.fm, rec.re, 0.0, 1));
            assert_eq!(rec.runtime_ms, None);
        }
    }

    #[test]
    fn invalid_configs() {
        let base = BenchConfig::default();
        assert!(BenchConfig { trials: 0, ..base }.validate().is_err());
        assert!(BenchConfig { k: 50, ..base }.validate().is_err());
        assert!(BenchConfig { baseline_rho: Some(0.0), ..base }.validate().is_err());
    }
}
