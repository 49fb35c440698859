use std::collections::BTreeSet;

use super::{check_eps, guarded, require, Step, TesterError, TesterKind, Verdict};
use crate::constants::{count, Constants};
use crate::distcore::{oblivious_partition, GrowthCaps};
use crate::oracles::OracleSession;
use crate::subroutines::{cumulative_budget, estimate_dist_to_flattening_cumulative};

/// Sample sizes of the cumulative-dual tester.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CumulativeSchedule {
    /// Samples checked for witnesses.
    pub witness_samples: u64,
    /// Worst-case `(samp, ceval)` spent by the flattening estimate.
    pub estimator: (u64, u64),
}

pub fn cumulative_schedule(eps: f64, c: &Constants) -> CumulativeSchedule {
    let alpha = eps / 4.0;
    CumulativeSchedule {
        witness_samples: count(c.c_e / ((eps / 4.0) * alpha)),
        estimator: cumulative_budget(eps / 4.0, 0.1, c),
    }
}

/// SAMP + CEVAL tester whose query count does not depend on `n`.
///
/// Sampled blocks are checked exactly against their left neighbour with
/// three cdf queries; then the distance to the flattening is estimated.
pub fn test_monotone_cumulative(s: &mut OracleSession, eps: f64, c: &Constants) -> Result<Verdict, TesterError> {
    require(s, TesterKind::Cumulative)?;
    check_eps(eps)?;
    let part = oblivious_partition(s.domain_size(), eps / 4.0)?.partition;
    let caps = GrowthCaps::for_partition(&part);
    let sched = cumulative_schedule(eps, c);
    guarded(s, |s| {
        let blocks: BTreeSet<usize> = s
            .samp_counts(sched.witness_samples)?
            .into_iter()
            .map(|(i, _)| part.block_of(i))
            .collect();
        for k in blocks.into_iter().filter(|&k| k > 0) {
            let cur = part.block(k);
            let prev = part.block(k - 1);
            let hi = s.ceval(cur.end - 1)?;
            let mid = s.ceval(prev.end - 1)?;
            let lo = if prev.start == 0 { 0.0 } else { s.ceval(prev.start - 1)? };
            let (q, q_prev) = (hi - mid, mid - lo);
            if q > caps.cap(k - 1) * q_prev * (1.0 + 1e-9) + 1e-15 {
                return Ok(Verdict::reject(s, Step::Witness));
            }
        }
        let d = estimate_dist_to_flattening_cumulative(s, &part, eps / 4.0, 0.1, c)?;
        if d.value > eps / 2.0 {
            return Ok(Verdict::reject(s, Step::FlatteningDistance));
        }
        Ok(Verdict::accept(s))
    })
}
