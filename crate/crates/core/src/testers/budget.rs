use super::bisection::bisection_schedule;
use super::cumulative::cumulative_schedule;
use super::eval::eval_schedule;
use super::exp_property::{compare_params, exp_property_schedule, max_cap};
use super::tolerant::tolerant_schedule;
use super::{TestParams, TesterError, TesterKind};
use crate::constants::Constants;
use crate::distcore::{oblivious_partition, GrowthCaps};
use crate::oracles::QueryLog;
use crate::subroutines::{cond_outer_samples, decider_pairs, descent_depth, descent_draws, CompareParams};

/// Worst-case per-kind query counts of one run of `kind` on a domain of
/// size `n`. No run ever exceeds them.
pub fn budget(kind: TesterKind, n: usize, p: &TestParams, c: &Constants) -> Result<QueryLog, TesterError> {
    let eps = p.eps;
    let mut log = QueryLog::default();
    match kind {
        TesterKind::Samp => {
            let b = bisection_schedule(n, eps, c);
            log.samp = b.samp_samples + b.final_samples;
        }
        TesterKind::IntCond | TesterKind::CondPolylog => {
            let b = bisection_schedule(n, eps, c);
            log.samp = b.reference + b.final_samples;
            let nodes = 2 * b.lmax + 1;
            let pairs = decider_pairs(eps, b.delta, c);
            let inner = CompareParams {
                eta: eps / 32.0,
                k: 2.0,
                delta: b.delta / (2.0 * pairs as f64),
            };
            if kind == TesterKind::CondPolylog {
                log.cond = nodes * pairs * (1 + inner.draws(c));
            } else {
                let per_pair = 2 * descent_depth(n) as u64 * descent_draws(n, inner.eta, inner.delta, c);
                log.intcond = nodes * pairs * (1 + per_pair);
            }
        }
        TesterKind::CondPolyeps => {
            let alpha = eps / 4.0;
            let part = oblivious_partition(n, alpha)?.partition;
            let caps = GrowthCaps::for_partition(&part);
            let mc = max_cap(&caps);
            let e = exp_property_schedule(alpha, eps / 4.0, mc, c);
            log.samp = e.samples + cond_outer_samples(eps / 8.0, 0.1, c);
            log.cond = e.samples * compare_params(&e, mc).draws(c);
        }
        TesterKind::Eval => {
            let e = eval_schedule(n, eps, c);
            log.eval = e.learner + e.points;
        }
        TesterKind::Cumulative => {
            let s = cumulative_schedule(eps, c);
            let blocks = oblivious_partition(n, eps / 4.0)?.len() as u64;
            log.samp = s.witness_samples + s.estimator.0;
            log.ceval = 3 * s.witness_samples.min(blocks) + s.estimator.1;
        }
        TesterKind::TolerantDual | TesterKind::TolerantCumulative => {
            let t = p
                .tolerance
                .ok_or_else(|| TesterError::InvalidParameter("tolerant testers need eps1, eps2 and gamma".into()))?;
            let s = tolerant_schedule(n, &t, c);
            if kind == TesterKind::TolerantDual {
                log.samp = s.learn_samples;
                log.eval = s.identity_points;
            } else {
                log.ceval = s.blocks as u64 + 2 * s.identity_points;
            }
        }
        TesterKind::ExpProperty => {
            let alpha = p
                .alpha
                .ok_or_else(|| TesterError::InvalidParameter("exp_property needs alpha".into()))?;
            let e = exp_property_schedule(alpha, eps, 1.0 + alpha, c);
            log.samp = e.samples;
            log.paircond = e.samples * compare_params(&e, 1.0 + alpha).draws(c);
        }
    }
    Ok(log)
}
