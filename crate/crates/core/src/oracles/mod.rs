//! Simulated oracle access to a hidden pmf, with per-kind query metering.
//!
//! Batched methods (`samp_counts`, `cond_hits`, ...) return the same
//! distribution as the corresponding number of single queries and charge
//! one query per draw.

mod index_set;

use std::fmt;
use std::ops::Range;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distcore::Pmf;

pub use index_set::IndexSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OracleKind {
    Samp,
    Cond,
    IntCond,
    PairCond,
    Eval,
    CEval,
}

impl OracleKind {
    pub const ALL: [OracleKind; 6] = [
        OracleKind::Samp,
        OracleKind::Cond,
        OracleKind::IntCond,
        OracleKind::PairCond,
        OracleKind::Eval,
        OracleKind::CEval,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OracleKind::Samp => "samp",
            OracleKind::Cond => "cond",
            OracleKind::IntCond => "intcond",
            OracleKind::PairCond => "paircond",
            OracleKind::Eval => "eval",
            OracleKind::CEval => "ceval",
        }
    }
}

/// Access model: which oracle kinds a session answers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AccessModel {
    Samp,
    Cond,
    IntCond,
    PairCond,
    Eval,
    Dual,
    CumulativeDual,
}

impl AccessModel {
    pub fn allows(self, kind: OracleKind) -> bool {
        use OracleKind as K;
        match self {
            AccessModel::Samp => kind == K::Samp,
            AccessModel::Cond => matches!(kind, K::Samp | K::Cond),
            AccessModel::IntCond => matches!(kind, K::Samp | K::IntCond),
            AccessModel::PairCond => matches!(kind, K::Samp | K::PairCond),
            AccessModel::Eval => kind == K::Eval,
            AccessModel::Dual => matches!(kind, K::Samp | K::Eval),
            AccessModel::CumulativeDual => matches!(kind, K::Samp | K::CEval),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            AccessModel::Samp => "samp",
            AccessModel::Cond => "cond",
            AccessModel::IntCond => "intcond",
            AccessModel::PairCond => "paircond",
            AccessModel::Eval => "eval",
            AccessModel::Dual => "dual",
            AccessModel::CumulativeDual => "cumulative_dual",
        }
    }
}

impl fmt::Display for AccessModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AccessModel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "samp" => AccessModel::Samp,
            "cond" => AccessModel::Cond,
            "intcond" => AccessModel::IntCond,
            "paircond" => AccessModel::PairCond,
            "eval" => AccessModel::Eval,
            "dual" => AccessModel::Dual,
            "cumulative_dual" | "cumulative" => AccessModel::CumulativeDual,
            _ => return Err(format!("unknown access model `{s}`")),
        })
    }
}

/// Number of queries made, per oracle kind.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryLog {
    pub samp: u64,
    pub cond: u64,
    pub intcond: u64,
    pub paircond: u64,
    pub eval: u64,
    pub ceval: u64,
}

impl QueryLog {
    pub fn get(&self, kind: OracleKind) -> u64 {
        match kind {
            OracleKind::Samp => self.samp,
            OracleKind::Cond => self.cond,
            OracleKind::IntCond => self.intcond,
            OracleKind::PairCond => self.paircond,
            OracleKind::Eval => self.eval,
            OracleKind::CEval => self.ceval,
        }
    }

    fn slot(&mut self, kind: OracleKind) -> &mut u64 {
        match kind {
            OracleKind::Samp => &mut self.samp,
            OracleKind::Cond => &mut self.cond,
            OracleKind::IntCond => &mut self.intcond,
            OracleKind::PairCond => &mut self.paircond,
            OracleKind::Eval => &mut self.eval,
            OracleKind::CEval => &mut self.ceval,
        }
    }

    pub fn add(&mut self, kind: OracleKind, count: u64) {
        let s = self.slot(kind);
        *s = s.saturating_add(count);
    }

    pub fn total(&self) -> u64 {
        OracleKind::ALL.iter().map(|&k| self.get(k)).fold(0u64, u64::saturating_add)
    }

    /// True if every count is at most the corresponding count of `bound`.
    pub fn within(&self, bound: &QueryLog) -> bool {
        OracleKind::ALL.iter().all(|&k| self.get(k) <= bound.get(k))
    }

    /// Kinds with a nonzero count.
    pub fn used(&self) -> impl Iterator<Item = OracleKind> + '_ {
        OracleKind::ALL.into_iter().filter(|&k| self.get(k) > 0)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("{0:?} queries are not allowed under the {1} model")]
    Forbidden(OracleKind, AccessModel),
    #[error("conditioning set carries zero mass")]
    ZeroMass,
    #[error("index {index} out of range for domain of size {n}")]
    OutOfRange { index: usize, n: usize },
    #[error("malformed query: {0}")]
    Malformed(&'static str),
}

/// One recorded oracle call; batched calls record their draw count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum QueryRecord {
    Samp { draws: u64 },
    Cond { set: Vec<(usize, usize)>, draws: u64 },
    IntCond { lo: usize, hi: usize, draws: u64 },
    PairCond { x: usize, y: usize, draws: u64 },
    Eval { x: usize },
    CEval { j: usize },
}

/// Sparse histogram of sample indices, sorted by index.
pub type SampleCounts = Vec<(usize, u64)>;

/// A metered oracle over a hidden pmf.
///
/// Oracle answers and the caller's own coins come from two independent
/// ChaCha streams derived from the session seed.
pub struct OracleSession {
    hidden: Arc<Pmf>,
    model: AccessModel,
    oracle_rng: ChaCha8Rng,
    coins: ChaCha8Rng,
    log: QueryLog,
    transcript: Option<Vec<QueryRecord>>,
}

impl OracleSession {
    pub fn new(hidden: Arc<Pmf>, model: AccessModel, seed: u64) -> Self {
        let mut oracle_rng = ChaCha8Rng::seed_from_u64(seed);
        oracle_rng.set_stream(1);
        let mut coins = ChaCha8Rng::seed_from_u64(seed);
        coins.set_stream(2);
        OracleSession {
            hidden,
            model,
            oracle_rng,
            coins,
            log: QueryLog::default(),
            transcript: None,
        }
    }

    /// Starts recording every query made from now on.
    pub fn record_transcript(&mut self) {
        self.transcript.get_or_insert_with(Vec::new);
    }

    pub fn transcript(&self) -> Option<&[QueryRecord]> {
        self.transcript.as_deref()
    }

    pub fn domain_size(&self) -> usize {
        self.hidden.len()
    }

    pub fn model(&self) -> AccessModel {
        self.model
    }

    pub fn log(&self) -> QueryLog {
        self.log
    }

    /// Randomness for the algorithm itself, independent of oracle answers.
    pub fn coins(&mut self) -> &mut ChaCha8Rng {
        &mut self.coins
    }

    /// The hidden pmf, for reference plugins that are allowed to peek.
    pub fn whitebox_view(&self) -> &Pmf {
        &self.hidden
    }

    fn charge(&mut self, kind: OracleKind, count: u64, rec: impl FnOnce() -> QueryRecord) -> Result<(), OracleError> {
        if !self.model.allows(kind) {
            return Err(OracleError::Forbidden(kind, self.model));
        }
        self.log.add(kind, count);
        if let Some(t) = self.transcript.as_mut() {
            t.push(rec());
        }
        Ok(())
    }

    fn check_index(&self, i: usize) -> Result<(), OracleError> {
        if i >= self.hidden.len() {
            return Err(OracleError::OutOfRange {
                index: i,
                n: self.hidden.len(),
            });
        }
        Ok(())
    }

    fn check_range(&self, r: &Range<usize>) -> Result<(), OracleError> {
        if r.start >= r.end {
            return Err(OracleError::Malformed("empty interval"));
        }
        if r.end > self.hidden.len() {
            return Err(OracleError::OutOfRange {
                index: r.end - 1,
                n: self.hidden.len(),
            });
        }
        Ok(())
    }

    fn draw_in(&mut self, r: Range<usize>) -> Result<usize, OracleError> {
        let u: f64 = self.oracle_rng.random();
        self.hidden.quantile_in(r, u).ok_or(OracleError::ZeroMass)
    }

    fn draw_in_set(&mut self, set: &IndexSet) -> Result<usize, OracleError> {
        let total: f64 = set.runs().iter().map(|r| self.hidden.mass(r.clone())).sum();
        if !(total > 0.0) {
            return Err(OracleError::ZeroMass);
        }
        let mut u: f64 = self.oracle_rng.random::<f64>() * total;
        let runs = set.runs();
        for (idx, r) in runs.iter().enumerate() {
            let m = self.hidden.mass(r.clone());
            if m > 0.0 && (u < m || idx + 1 == runs.len()) {
                let v: f64 = self.oracle_rng.random();
                return self.hidden.quantile_in(r.clone(), v).ok_or(OracleError::ZeroMass);
            }
            u -= m;
        }
        let r = runs.iter().rev().find(|r| self.hidden.mass((*r).clone()) > 0.0).unwrap().clone();
        self.draw_in(r)
    }

    fn binomial(&mut self, n: u64, p: f64) -> u64 {
        if n == 0 || p <= 0.0 {
            return 0;
        }
        if p >= 1.0 {
            return n;
        }
        Binomial::new(n, p).expect("valid binomial").sample(&mut self.oracle_rng)
    }

    /// Splits `t` draws from `D` restricted to `r` into per-index counts.
    fn split_counts(&mut self, r: Range<usize>, t: u64, out: &mut SampleCounts) {
        if t == 0 {
            return;
        }
        if r.end - r.start == 1 {
            out.push((r.start, t));
            return;
        }
        let mid = r.start + (r.end - r.start) / 2;
        let total = self.hidden.mass(r.clone());
        let left = self.hidden.mass(r.start..mid);
        let k = self.binomial(t, left / total);
        self.split_counts(r.start..mid, k, out);
        self.split_counts(mid..r.end, t - k, out);
    }

    /// Number of `t` draws from `D` conditioned on `within` that land in
    /// `target`, given masses.
    fn hits(&mut self, within_mass: f64, target_mass: f64, t: u64) -> Result<u64, OracleError> {
        if !(within_mass > 0.0) {
            return Err(OracleError::ZeroMass);
        }
        Ok(self.binomial(t, target_mass / within_mass))
    }

    pub fn samp(&mut self) -> Result<usize, OracleError> {
        self.charge(OracleKind::Samp, 1, || QueryRecord::Samp { draws: 1 })?;
        self.draw_in(0..self.hidden.len())
    }

    /// `t` independent samples, as sorted per-index counts.
    pub fn samp_counts(&mut self, t: u64) -> Result<SampleCounts, OracleError> {
        self.charge(OracleKind::Samp, t, || QueryRecord::Samp { draws: t })?;
        let mut out = Vec::new();
        self.split_counts(0..self.hidden.len(), t, &mut out);
        Ok(out)
    }

    pub fn cond(&mut self, set: &IndexSet) -> Result<usize, OracleError> {
        self.check_set(set)?;
        self.charge(OracleKind::Cond, 1, || QueryRecord::Cond {
            set: set.pairs(),
            draws: 1,
        })?;
        self.draw_in_set(set)
    }

    fn check_set(&self, set: &IndexSet) -> Result<(), OracleError> {
        if set.is_empty() {
            return Err(OracleError::Malformed("empty set"));
        }
        self.check_index(set.max().unwrap())
    }

    /// Of `t` COND queries on `within`, how many return an element of `target`.
    pub fn cond_hits(&mut self, within: &IndexSet, target: &IndexSet, t: u64) -> Result<u64, OracleError> {
        self.check_set(within)?;
        if !target.is_subset_of(within) {
            return Err(OracleError::Malformed("target must be a subset of the conditioning set"));
        }
        self.charge(OracleKind::Cond, t, || QueryRecord::Cond {
            set: within.pairs(),
            draws: t,
        })?;
        let wm = self.set_mass(within);
        let tm = self.set_mass(target);
        self.hits(wm, tm, t)
    }

    fn set_mass(&self, s: &IndexSet) -> f64 {
        s.runs().iter().map(|r| self.hidden.mass(r.clone())).sum()
    }

    pub fn intcond(&mut self, r: Range<usize>) -> Result<usize, OracleError> {
        self.check_range(&r)?;
        self.charge(OracleKind::IntCond, 1, || QueryRecord::IntCond {
            lo: r.start,
            hi: r.end,
            draws: 1,
        })?;
        self.draw_in(r)
    }

    /// Of `t` INTCOND queries on `r`, how many land in the sub-interval `target`.
    pub fn intcond_hits(&mut self, r: Range<usize>, target: Range<usize>, t: u64) -> Result<u64, OracleError> {
        self.check_range(&r)?;
        if target.start < r.start || target.end > r.end {
            return Err(OracleError::Malformed("target must lie inside the interval"));
        }
        self.charge(OracleKind::IntCond, t, || QueryRecord::IntCond {
            lo: r.start,
            hi: r.end,
            draws: t,
        })?;
        let wm = self.hidden.mass(r);
        let tm = if target.start < target.end { self.hidden.mass(target) } else { 0.0 };
        self.hits(wm, tm, t)
    }

    pub fn paircond(&mut self, x: usize, y: usize) -> Result<usize, OracleError> {
        let hits = self.paircond_hits(x, y, 1)?;
        Ok(if hits == 1 { y } else { x })
    }

    /// Of `t` PAIRCOND queries on `{x, y}`, how many return `y`.
    pub fn paircond_hits(&mut self, x: usize, y: usize, t: u64) -> Result<u64, OracleError> {
        self.check_index(x)?;
        self.check_index(y)?;
        self.charge(OracleKind::PairCond, t, || QueryRecord::PairCond { x, y, draws: t })?;
        let (dx, dy) = (self.hidden.weight(x), self.hidden.weight(y));
        if x == y {
            return if dx > 0.0 { Ok(t) } else { Err(OracleError::ZeroMass) };
        }
        self.hits(dx + dy, dy, t)
    }

    pub fn eval(&mut self, x: usize) -> Result<f64, OracleError> {
        self.check_index(x)?;
        self.charge(OracleKind::Eval, 1, || QueryRecord::Eval { x })?;
        Ok(self.hidden.weight(x))
    }

    /// Mass of `{0, .., j}`.
    pub fn ceval(&mut self, j: usize) -> Result<f64, OracleError> {
        self.check_index(j)?;
        self.charge(OracleKind::CEval, 1, || QueryRecord::CEval { j })?;
        Ok(self.hidden.prefix(j + 1))
    }

    /// Mass of the interval `r` from at most two CEVAL queries.
    pub fn ceval_mass(&mut self, r: Range<usize>) -> Result<f64, OracleError> {
        self.check_range(&r)?;
        let hi = self.ceval(r.end - 1)?;
        let lo = if r.start == 0 { 0.0 } else { self.ceval(r.start - 1)? };
        Ok((hi - lo).max(0.0))
    }
}

/// Uniform draws of conditional pairs, used by comparison subroutines that
/// run on either a session or a block-reduced view of one.
pub trait PairConditional {
    fn domain_len(&self) -> usize;

    fn sample(&mut self) -> Result<usize, OracleError>;

    /// Of `t` conditional draws on `{x, y}`, how many return `y`.
    fn pair_hits(&mut self, x: usize, y: usize, t: u64) -> Result<u64, OracleError>;
}

impl PairConditional for OracleSession {
    fn domain_len(&self) -> usize {
        self.domain_size()
    }

    fn sample(&mut self) -> Result<usize, OracleError> {
        self.samp()
    }

    fn pair_hits(&mut self, x: usize, y: usize, t: u64) -> Result<u64, OracleError> {
        match self.model {
            AccessModel::Cond => {
                let within = IndexSet::pair(x, y);
                self.cond_hits(&within, &IndexSet::singleton(y), t)
            }
            _ => self.paircond_hits(x, y, t),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn session(w: Vec<f64>, model: AccessModel, seed: u64) -> OracleSession {
        OracleSession::new(Arc::new(Pmf::new(w).unwrap()), model, seed)
    }

    #[test]
    fn policy_enforced() {
        let mut s = session(vec![0.5, 0.5], AccessModel::Samp, 1);
        assert!(s.samp().is_ok());
        assert_eq!(s.eval(0), Err(OracleError::Forbidden(OracleKind::Eval, AccessModel::Samp)));
        assert!(s.intcond(0..2).is_err());
        assert_eq!(s.log().total(), 1);
    }

    #[test]
    fn ceval_example() {
        let mut s = session(vec![0.25; 4], AccessModel::CumulativeDual, 1);
        assert_eq!(s.ceval(1).unwrap(), 0.5);
        assert_eq!(s.ceval(3).unwrap(), 1.0);
        assert_eq!(s.log().ceval, 2);
    }

    #[test]
    fn zero_mass_conditioning_fails() {
        let mut s = session(vec![1.0, 0.0, 0.0], AccessModel::Cond, 1);
        assert_eq!(s.cond(&IndexSet::interval(1..3)), Err(OracleError::ZeroMass));
        let mut s = session(vec![1.0, 0.0, 0.0], AccessModel::IntCond, 1);
        assert_eq!(s.intcond(1..3), Err(OracleError::ZeroMass));
    }

    #[test]
    fn determinism_per_seed() {
        let run = |seed| {
            let mut s = session(vec![0.1, 0.2, 0.3, 0.4], AccessModel::Cond, seed);
            let a: Vec<usize> = (0..50).map(|_| s.cond(&IndexSet::from_indices([0, 2, 3])).unwrap()).collect();
            let b = s.samp_counts(1000).unwrap();
            (a, b)
        };
        assert_eq!(run(9), run(9));
        assert_ne!(run(9), run(10));
    }

    #[test]
    fn batched_counts_sum_and_support() {
        let mut s = session(vec![0.5, 0.0, 0.25, 0.25], AccessModel::Samp, 3);
        let c = s.samp_counts(10_000).unwrap();
        assert_eq!(c.iter().map(|x| x.1).sum::<u64>(), 10_000);
        assert!(c.iter().all(|&(i, k)| i != 1 && k > 0));
        assert_eq!(s.log().samp, 10_000);
    }

    #[test]
    fn transcript_records_calls() {
        let mut s = session(vec![0.5, 0.5], AccessModel::Eval, 3);
        s.record_transcript();
        s.eval(1).unwrap();
        s.eval(0).unwrap();
        assert_eq!(s.transcript().unwrap(), &[QueryRecord::Eval { x: 1 }, QueryRecord::Eval { x: 0 }]);
    }
}
