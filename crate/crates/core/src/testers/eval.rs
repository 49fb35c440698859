use super::{check_eps, guarded, require, Step, TesterError, TesterKind, Verdict};
use crate::constants::{count, Constants};
use crate::distcore::{distance_to_monotone_flat, oblivious_partition};
use crate::oracles::OracleSession;
use crate::subroutines::{harmonic_points, harmonic_tv_estimate, learner_histogram, learner_points};

/// Query plan sizes of the evaluation tester.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalSchedule {
    /// Learner queries (block endpoints).
    pub learner: u64,
    /// Harmonic proposal points.
    pub points: u64,
}

pub fn eval_schedule(n: usize, eps: f64, c: &Constants) -> EvalSchedule {
    let part = oblivious_partition(n, eps / 4.0).expect("valid partition");
    let harmonic: f64 = (1..=n).map(|k| 1.0 / k as f64).sum();
    EvalSchedule {
        learner: learner_points(&part).len() as u64,
        points: count(c.c_ne * harmonic / eps),
    }
}

/// Non-adaptive EVAL tester.
///
/// All query points are fixed before the first answer arrives: the learner's
/// block endpoints, then points from the proposal `P(x) ∝ 1/(x+1)`.
pub fn test_monotone_eval(s: &mut OracleSession, eps: f64, c: &Constants) -> Result<Verdict, TesterError> {
    require(s, TesterKind::Eval)?;
    check_eps(eps)?;
    let n = s.domain_size();
    let part = oblivious_partition(n, eps / 4.0)?.partition;
    let sched = eval_schedule(n, eps, c);
    let learn_pts = learner_points(&part);
    let probe_pts = harmonic_points(n, sched.points, s.coins());
    guarded(s, |s| {
        let learn_vals = learn_pts.iter().map(|&x| s.eval(x)).collect::<Result<Vec<_>, _>>()?;
        let probe_vals = probe_pts.iter().map(|&x| s.eval(x)).collect::<Result<Vec<_>, _>>()?;
        let hyp = learner_histogram(&part, &learn_vals)?;
        if distance_to_monotone_flat(&hyp) > eps / 4.0 {
            return Ok(Verdict::reject(s, Step::FlatDistance));
        }
        if harmonic_tv_estimate(&hyp.to_pmf(), &probe_pts, &probe_vals) > eps / 2.0 {
            return Ok(Verdict::reject(s, Step::Identity));
        }
        Ok(Verdict::accept(s))
    })
}
