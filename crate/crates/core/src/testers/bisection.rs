use std::ops::Range;

use super::{check_eps, guarded, require, TesterError, TesterKind, Step, Verdict};
use crate::constants::{count, log2, Constants};
use crate::distcore::{distance_to_monotone_flat, Histogram, Partition};
use crate::oracles::{OracleSession, SampleCounts};
use crate::subroutines::{collision_accepts, collision_samples, collision_statistic, near_uniform_decider, DeciderModel};

/// Sample sizes of the bisection testers on a domain of size `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BisectionSchedule {
    /// Maximum number of splits before rejecting.
    pub lmax: u64,
    /// Reference samples deciding which intervals are light.
    pub reference: u64,
    /// Failure probability of each near-uniformity check.
    pub delta: f64,
    /// Fresh samples weighting the final histogram.
    pub final_samples: u64,
    /// Samples shared by all collision tests of the sampling-only tester.
    pub samp_samples: u64,
}

pub fn bisection_schedule(n: usize, eps: f64, c: &Constants) -> BisectionSchedule {
    let l = log2(n);
    let lmax = count(c.c_s * l * l / eps);
    BisectionSchedule {
        lmax,
        reference: count(c.c_h * (lmax as f64 / eps) * (lmax.max(2) as f64).log2()),
        delta: 1.0 / (10.0 * lmax as f64),
        final_samples: count(c.c_final * l.powi(4) / (eps * eps)),
        samp_samples: count(c.c_samp * (n as f64).sqrt() * l * l / eps.powi(4)),
    }
}

/// Sum of the counts of sampled indices inside `r`.
fn counts_in<'a>(counts: &'a SampleCounts, r: &Range<usize>) -> &'a [(usize, u64)] {
    let lo = counts.partition_point(|&(i, _)| i < r.start);
    let hi = counts.partition_point(|&(i, _)| i < r.end);
    &counts[lo..hi]
}

/// Accepts iff the leaf histogram weighted by fresh samples is
/// `eps/2`-close to monotone.
fn finish(s: &mut OracleSession, mut leaves: Vec<Range<usize>>, eps: f64, t: u64) -> Result<Verdict, TesterError> {
    leaves.sort_by_key(|r| r.start);
    let mut bounds: Vec<usize> = leaves.iter().map(|r| r.start).collect();
    bounds.push(s.domain_size());
    let part = Partition::from_bounds(bounds)?;
    let counts = s.samp_counts(t)?;
    let w: Vec<f64> = leaves
        .iter()
        .map(|r| counts_in(&counts, r).iter().map(|x| x.1).sum::<u64>() as f64 / t as f64)
        .collect();
    let h = Histogram::new(part, w)?;
    if distance_to_monotone_flat(&h) > eps / 2.0 {
        return Ok(Verdict::reject(s, Step::FlatDistance));
    }
    Ok(Verdict::accept(s))
}

enum Check<'a> {
    Conditional(DeciderModel, &'a SampleCounts),
    Collision(&'a SampleCounts),
}

/// Recursive bisection; returns the leaves, or `None` past `lmax` splits.
fn bisect(
    s: &mut OracleSession,
    eps: f64,
    sched: &BisectionSchedule,
    check: Check<'_>,
    c: &Constants,
) -> Result<Option<Vec<Range<usize>>>, TesterError> {
    let mut stack = vec![0..s.domain_size()];
    let mut leaves = Vec::new();
    let mut splits = 0u64;
    while let Some(r) = stack.pop() {
        let uniform = match &check {
            Check::Conditional(model, refs) => {
                if counts_in(refs, &r).is_empty() {
                    leaves.push(r);
                    continue;
                }
                near_uniform_decider(s, r.clone(), eps, sched.delta, *model, c)?
            }
            Check::Collision(counts) => {
                let inside = counts_in(counts, &r);
                let got: u64 = inside.iter().map(|x| x.1).sum();
                if r.end - r.start == 1 || got < collision_samples(r.end - r.start, eps, c) {
                    leaves.push(r);
                    continue;
                }
                let stat = collision_statistic(inside.iter().map(|x| x.1), r.end - r.start).unwrap_or(0.0);
                collision_accepts(stat, eps)
            }
        };
        if uniform {
            leaves.push(r);
            continue;
        }
        splits += 1;
        if splits > sched.lmax {
            return Ok(None);
        }
        let mid = r.start + (r.end - r.start) / 2;
        stack.push(mid..r.end);
        stack.push(r.start..mid);
    }
    Ok(Some(leaves))
}

fn conditional_tester(
    s: &mut OracleSession,
    eps: f64,
    kind: TesterKind,
    model: DeciderModel,
    c: &Constants,
) -> Result<Verdict, TesterError> {
    require(s, kind)?;
    check_eps(eps)?;
    let sched = bisection_schedule(s.domain_size(), eps, c);
    guarded(s, |s| {
        let refs = s.samp_counts(sched.reference)?;
        match bisect(s, eps, &sched, Check::Conditional(model, &refs), c)? {
            None => Ok(Verdict::reject(s, Step::SplitLimit)),
            Some(leaves) => finish(s, leaves, eps, sched.final_samples),
        }
    })
}

/// Bisection tester with INTCOND near-uniformity checks.
pub fn test_monotone_intcond(s: &mut OracleSession, eps: f64, c: &Constants) -> Result<Verdict, TesterError> {
    conditional_tester(s, eps, TesterKind::IntCond, DeciderModel::IntCond, c)
}

/// Bisection tester with COND near-uniformity checks.
pub fn test_monotone_cond_polylog(s: &mut OracleSession, eps: f64, c: &Constants) -> Result<Verdict, TesterError> {
    conditional_tester(s, eps, TesterKind::CondPolylog, DeciderModel::Cond, c)
}

/// Sampling-only bisection tester with collision-based uniformity checks.
///
/// One batch of samples serves all collision tests; intervals holding too
/// few of them to be tested are light.
pub fn test_monotone_samp(s: &mut OracleSession, eps: f64, c: &Constants) -> Result<Verdict, TesterError> {
    require(s, TesterKind::Samp)?;
    check_eps(eps)?;
    let sched = bisection_schedule(s.domain_size(), eps, c);
    guarded(s, |s| {
        let counts = s.samp_counts(sched.samp_samples)?;
        match bisect(s, eps, &sched, Check::Collision(&counts), c)? {
            None => Ok(Verdict::reject(s, Step::SplitLimit)),
            Some(leaves) => finish(s, leaves, eps, sched.final_samples),
        }
    })
}
