use super::{check_eps, guarded, require, Step, TesterError, TesterKind, Verdict};
use crate::constants::{count, Constants};
use crate::distcore::GrowthCaps;
use crate::oracles::{OracleError, OracleSession, PairConditional};
use crate::subroutines::{compare_pair, CompareOutcome, CompareParams};

/// Parameters of one exponential-property test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpSchedule {
    /// Samples from the tested distribution.
    pub samples: u64,
    /// Violation slack `eps * alpha^2`.
    pub tau: f64,
    /// Relative accuracy of each comparison.
    pub eta: f64,
    pub delta: f64,
}

/// `alpha` is the growth slack, `max_cap` the largest cap in use.
pub fn exp_property_schedule(alpha: f64, eps: f64, max_cap: f64, c: &Constants) -> ExpSchedule {
    let samples = count(c.c_e / (eps * alpha));
    let tau = eps * alpha * alpha;
    ExpSchedule {
        samples,
        tau,
        eta: tau / (4.0 * max_cap.max(1.0)),
        delta: 1.0 / (10.0 * samples as f64),
    }
}

pub(crate) fn max_cap(caps: &GrowthCaps) -> f64 {
    caps.as_slice().iter().copied().fold(1.0, f64::max)
}

/// Comparison parameters used at a sample whose left cap is `cap`.
pub(crate) fn compare_params(sched: &ExpSchedule, cap: f64) -> CompareParams {
    CompareParams {
        eta: sched.eta,
        k: cap.max(2.0),
        delta: sched.delta,
    }
}

/// Samples `s ~ Q` and compares `Q(s)` with `Q(s-1)`; returns `true` when a
/// ratio above `cap * (1 + eta)` is observed.
pub fn test_growth_property<O: PairConditional + ?Sized>(
    o: &mut O,
    caps: &GrowthCaps,
    alpha: f64,
    eps: f64,
    c: &Constants,
) -> Result<bool, OracleError> {
    let sched = exp_property_schedule(alpha, eps, max_cap(caps), c);
    for _ in 0..sched.samples {
        let s = o.sample()?;
        if s == 0 {
            continue;
        }
        let cap = caps.cap(s - 1);
        match compare_pair(o, s - 1, s, compare_params(&sched, cap), c)? {
            CompareOutcome::High => return Ok(true),
            CompareOutcome::Ratio(r) if r > cap * (1.0 + sched.eta) => return Ok(true),
            _ => {}
        }
    }
    Ok(false)
}

/// Tests whether the hidden pmf over `{0, .., l-1}` has the property
/// `Q(k+1) <= (1 + alpha) Q(k)` or is `eps`-far from it, with PAIRCOND.
pub fn test_exponential_property(
    s: &mut OracleSession,
    alpha: f64,
    eps: f64,
    c: &Constants,
) -> Result<Verdict, TesterError> {
    require(s, TesterKind::ExpProperty)?;
    check_eps(eps)?;
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(TesterError::InvalidParameter(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    let caps = GrowthCaps::uniform(s.domain_size(), alpha);
    guarded(s, |s| {
        if test_growth_property(s, &caps, alpha, eps, c)? {
            Ok(Verdict::reject(s, Step::ExpProperty))
        } else {
            Ok(Verdict::accept(s))
        }
    })
}
