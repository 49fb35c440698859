use serde::{Deserialize, Serialize};

use super::{guarded, require, Step, TesterError, TesterKind, Verdict};
use crate::constants::{count, log2, Constants};
use crate::distcore::{distance_to_monotone_flat, oblivious_partition, Histogram, Partition};
use crate::oracles::OracleSession;
use crate::subroutines::{estimate_tv_to_known_eval, identity_points};

/// Closeness and farness radii of a tolerant test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceParams {
    pub eps1: f64,
    pub eps2: f64,
    pub gamma: f64,
}

impl ToleranceParams {
    pub fn new(eps1: f64, eps2: f64, gamma: f64) -> Result<Self, TesterError> {
        let p = ToleranceParams { eps1, eps2, gamma };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), TesterError> {
        let bad = |m: String| Err(TesterError::InvalidParameter(m));
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return bad(format!("gamma must be positive, got {}", self.gamma));
        }
        if !(self.eps1 >= 0.0 && self.eps2 < 1.0) {
            return bad(format!("need 0 <= eps1 and eps2 < 1, got {} and {}", self.eps1, self.eps2));
        }
        if !(self.eps2 > (3.0 + self.gamma) * self.eps1) {
            return bad(format!(
                "need eps2 > (3 + gamma) eps1, got eps1 = {}, eps2 = {}, gamma = {}",
                self.eps1, self.eps2, self.gamma
            ));
        }
        if !(self.gamma2() > self.gamma1()) {
            return bad("gamma2 must exceed gamma1".into());
        }
        Ok(())
    }

    pub fn alpha(&self) -> f64 {
        self.gamma / (6.0 * (3.0 + self.gamma))
    }

    /// Granularity `alpha * eps2` of the learned flattening.
    pub fn beta(&self) -> f64 {
        self.alpha() * self.eps2
    }

    pub fn gamma1(&self) -> f64 {
        2.0 * self.eps1 + 2.0 * self.beta()
    }

    pub fn gamma2(&self) -> f64 {
        (1.0 - self.alpha()) * self.eps2 - self.eps1
    }
}

/// Query plan of a tolerant test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TolerantSchedule {
    /// Blocks of the learned flattening.
    pub blocks: usize,
    /// Samples used to learn the flattening (dual access only).
    pub learn_samples: u64,
    /// Points of the identity estimate.
    pub identity_points: u64,
    /// Offline threshold on the learned flattening's distance to monotone.
    pub flat_threshold: f64,
    /// Accuracy of the identity estimate.
    pub identity_eps: f64,
    /// Rejection threshold of the identity estimate.
    pub identity_threshold: f64,
}

pub fn tolerant_schedule(n: usize, p: &ToleranceParams, c: &Constants) -> TolerantSchedule {
    let (g1, g2) = (p.gamma1(), p.gamma2());
    let identity_eps = (g2 - g1) / 2.0;
    TolerantSchedule {
        blocks: oblivious_partition(n, p.beta()).map(|o| o.len()).unwrap_or(1),
        learn_samples: count(c.c_tol * log2(n) / p.eps2.powi(3)),
        identity_points: identity_points(identity_eps, 1.0 / 6.0, c),
        flat_threshold: p.eps1 + p.beta(),
        identity_eps,
        identity_threshold: (g1 + g2) / 2.0,
    }
}

/// The exact flattening of the hidden pmf from one CEVAL query per block end.
pub fn learn_flattening_cumulative(s: &mut OracleSession, part: &Partition) -> Result<Histogram, TesterError> {
    let mut w = Vec::with_capacity(part.len());
    let mut prev = 0.0;
    for k in 0..part.len() {
        let f = s.ceval(part.block(k).end - 1)?;
        w.push(f - prev);
        prev = f;
    }
    Ok(Histogram::new(part.clone(), w)?)
}

/// Empirical block weights of the flattening from `t` samples.
fn learn_flattening_samples(s: &mut OracleSession, part: &Partition, t: u64) -> Result<Histogram, TesterError> {
    let mut w = vec![0.0; part.len()];
    for (i, k) in s.samp_counts(t)? {
        w[part.block_of(i)] += k as f64;
    }
    for x in &mut w {
        *x /= t as f64;
    }
    Ok(Histogram::new(part.clone(), w)?)
}

fn decide(
    s: &mut OracleSession,
    learned: &Histogram,
    sched: &TolerantSchedule,
    c: &Constants,
) -> Result<Verdict, TesterError> {
    if distance_to_monotone_flat(learned) > sched.flat_threshold {
        return Ok(Verdict::reject(s, Step::FlatDistance));
    }
    let est = estimate_tv_to_known_eval(s, &learned.to_pmf(), sched.identity_eps, 1.0 / 6.0, c)?;
    if est.value > sched.identity_threshold {
        return Ok(Verdict::reject(s, Step::Identity));
    }
    Ok(Verdict::accept(s))
}

fn tolerant(
    s: &mut OracleSession,
    p: &ToleranceParams,
    kind: TesterKind,
    c: &Constants,
    learn: impl FnOnce(&mut OracleSession, &Partition, &TolerantSchedule) -> Result<Histogram, TesterError>,
) -> Result<Verdict, TesterError> {
    require(s, kind)?;
    p.validate()?;
    let part = oblivious_partition(s.domain_size(), p.beta())?.partition;
    let sched = tolerant_schedule(s.domain_size(), p, c);
    guarded(s, |s| {
        let learned = learn(s, &part, &sched)?;
        decide(s, &learned, &sched, c)
    })
}

/// Tolerant tester with SAMP + EVAL access: accepts when `tv(D, M) <= eps1`
/// and rejects when `tv(D, M) >= eps2`.
pub fn tolerant_test_monotone_dual(
    s: &mut OracleSession,
    p: &ToleranceParams,
    c: &Constants,
) -> Result<Verdict, TesterError> {
    tolerant(s, p, TesterKind::TolerantDual, c, |s, part, sched| {
        learn_flattening_samples(s, part, sched.learn_samples)
    })
}

/// Tolerant tester with SAMP + CEVAL access; the flattening is learned exactly.
pub fn tolerant_test_monotone_cumulative(
    s: &mut OracleSession,
    p: &ToleranceParams,
    c: &Constants,
) -> Result<Verdict, TesterError> {
    tolerant(s, p, TesterKind::TolerantCumulative, c, |s, part, _| learn_flattening_cumulative(s, part))
}
