//! Seeded experiments: many independent tester runs on one instance, with
//! aggregated decisions and query counts.

mod report;

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constants::Constants;
use crate::distcore::Pmf;
use crate::instances::{InstanceError, InstanceSpec};
use crate::oracles::{AccessModel, OracleKind, OracleSession, QueryLog};
use crate::testers::{budget, run_tester, Decision, Step, TestParams, TesterError, TesterKind};

pub use report::{csv_header, write_report, write_report_to, Format, SCHEMA_VERSION};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error("trial {trial}: {source}")]
    Trial { trial: u64, source: TesterError },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Csv { path: String, source: csv::Error },
    #[error("{path}: {source}")]
    Json { path: String, source: serde_json::Error },
}

/// Everything that determines an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub tester: TesterKind,
    pub model: AccessModel,
    pub instance: InstanceSpec,
    pub params: TestParams,
    pub trials: u64,
    pub seed: u64,
    pub constants: Constants,
    /// Record per-trial wall time; off for byte-reproducible reports.
    #[serde(default)]
    pub timing: bool,
}

impl ExperimentConfig {
    /// A config with the tester's own model and default constants.
    pub fn new(tester: TesterKind, instance: InstanceSpec, params: TestParams, trials: u64, seed: u64) -> Self {
        ExperimentConfig {
            tester,
            model: tester.model(),
            instance,
            params,
            trials,
            seed,
            constants: Constants::default(),
            timing: false,
        }
    }

    /// Checks everything that can be checked without running a trial.
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.model != self.tester.model() {
            return Err(HarnessError::Config(format!(
                "tester {} runs under the {} model, not {}",
                self.tester,
                self.tester.model(),
                self.model
            )));
        }
        if self.trials == 0 {
            return Err(HarnessError::Config("trials must be at least 1".into()));
        }
        if self.instance.n == 0 {
            return Err(HarnessError::Config("n must be at least 1".into()));
        }
        if !self.tester.is_tolerant() && !(self.params.eps > 0.0 && self.params.eps < 1.0) {
            return Err(HarnessError::Config(format!("eps must lie in (0, 1), got {}", self.params.eps)));
        }
        if let Some(t) = &self.params.tolerance {
            t.validate().map_err(|e| HarnessError::Config(e.to_string()))?;
        }
        budget(self.tester, self.instance.n, &self.params, &self.constants)
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        Ok(())
    }
}

/// Seed of trial `i`, independent of the order trials run in.
pub fn trial_seed(master: u64, i: u64) -> u64 {
    let mut seed = [0u8; 32];
    seed[..8].copy_from_slice(&master.to_le_bytes());
    seed[8..16].copy_from_slice(&i.to_le_bytes());
    rand::RngCore::next_u64(&mut ChaCha8Rng::from_seed(seed))
}

/// One trial of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ReportRow {
    pub trial: u64,
    pub seed: u64,
    pub decision: Decision,
    pub log: QueryLog,
    pub rejected_at: Option<Step>,
    pub wall_ms: Option<f64>,
}

/// Mean and maximum of each query count over the trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Aggregates {
    pub trials: u64,
    pub accept_fraction: f64,
    pub mean: BTreeMap<String, f64>,
    pub max: QueryLog,
    pub mean_total: f64,
    pub max_total: u64,
    pub rejections: BTreeMap<String, u64>,
}

/// Per-trial checks against the configured budget and the access model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Checks {
    pub budget: QueryLog,
    /// Trials whose counts exceed [`Checks::budget`].
    pub over_budget: Vec<u64>,
    /// Trials that used an oracle kind outside the model.
    pub model_violations: Vec<u64>,
}

impl Checks {
    pub fn passed(&self) -> bool {
        self.over_budget.is_empty() && self.model_violations.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Report {
    pub schema: String,
    pub config: ExperimentConfig,
    /// Exact distance of the instance to monotone.
    pub certified: f64,
    pub rows: Vec<ReportRow>,
    pub aggregates: Aggregates,
    pub checks: Checks,
}

fn pool(threads: Option<usize>) -> rayon::ThreadPool {
    let env = std::env::var("MONOTEST_THREADS").ok().and_then(|v| v.parse::<usize>().ok());
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads.or(env).filter(|&t| t > 0) {
        b = b.num_threads(t);
    }
    b.build().expect("thread pool")
}

fn run_trial(cfg: &ExperimentConfig, hidden: &Arc<Pmf>, trial: u64) -> Result<ReportRow, HarnessError> {
    let seed = trial_seed(cfg.seed, trial);
    let start = Instant::now();
    let mut s = OracleSession::new(hidden.clone(), cfg.model, seed);
    let v = run_tester(cfg.tester, &mut s, &cfg.params, &cfg.constants)
        .map_err(|source| HarnessError::Trial { trial, source })?;
    Ok(ReportRow {
        trial,
        seed,
        decision: v.decision,
        log: v.log,
        rejected_at: v.rejected_at,
        wall_ms: cfg.timing.then(|| start.elapsed().as_secs_f64() * 1e3),
    })
}

fn aggregate(rows: &[ReportRow]) -> Aggregates {
    let t = rows.len().max(1) as f64;
    let accepted = rows.iter().filter(|r| r.decision == Decision::Accept).count();
    let mut max = QueryLog::default();
    let mut mean = BTreeMap::new();
    for kind in OracleKind::ALL {
        let m = rows.iter().map(|r| r.log.get(kind)).max().unwrap_or(0);
        max.add(kind, m);
        mean.insert(kind.name().to_string(), rows.iter().map(|r| r.log.get(kind) as f64).sum::<f64>() / t);
    }
    let mut rejections = BTreeMap::new();
    for step in rows.iter().filter_map(|r| r.rejected_at) {
        *rejections.entry(step.name().to_string()).or_insert(0) += 1;
    }
    Aggregates {
        trials: rows.len() as u64,
        accept_fraction: accepted as f64 / t,
        mean,
        max,
        mean_total: rows.iter().map(|r| r.log.total() as f64).sum::<f64>() / t,
        max_total: rows.iter().map(|r| r.log.total()).max().unwrap_or(0),
        rejections,
    }
}

/// Runs the experiment on a pool capped by `MONOTEST_THREADS`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Report, HarnessError> {
    run_experiment_with(cfg, None)
}

/// Runs the experiment on `threads` workers (all cores when `None`).
pub fn run_experiment_with(cfg: &ExperimentConfig, threads: Option<usize>) -> Result<Report, HarnessError> {
    cfg.validate()?;
    let mut instance = cfg.instance.clone();
    let (hidden, certified) = instance.certify()?;
    let hidden = Arc::new(hidden);
    let rows = pool(threads).install(|| {
        (0..cfg.trials)
            .into_par_iter()
            .map(|i| run_trial(cfg, &hidden, i))
            .collect::<Result<Vec<_>, _>>()
    })?;
    let bound = budget(cfg.tester, cfg.instance.n, &cfg.params, &cfg.constants)
        .map_err(|e| HarnessError::Config(e.to_string()))?;
    let checks = Checks {
        budget: bound,
        over_budget: rows.iter().filter(|r| !r.log.within(&bound)).map(|r| r.trial).collect(),
        model_violations: rows
            .iter()
            .filter(|r| r.log.used().any(|k| !cfg.model.allows(k)))
            .map(|r| r.trial)
            .collect(),
    };
    Ok(Report {
        schema: SCHEMA_VERSION.to_string(),
        aggregates: aggregate(&rows),
        config: cfg.clone(),
        certified,
        rows,
        checks,
    })
}

/// One config per `(n, eps)` cell of a grid around `base`.
pub fn sweep_configs(base: &ExperimentConfig, ns: &[usize], epss: &[f64]) -> Vec<ExperimentConfig> {
    let mut out = Vec::new();
    for &n in ns {
        for &eps in epss {
            let mut c = base.clone();
            c.instance.n = n;
            c.params.eps = eps;
            out.push(c);
        }
    }
    out
}
