use serde::{Deserialize, Serialize};

use crate::constants::{count, Constants};
use crate::oracles::{AccessModel, IndexSet, OracleError, OracleKind, OracleSession, PairConditional};

/// Outcome of comparing the masses of two disjoint sets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag", content = "rho")]
pub enum CompareOutcome {
    /// `D(Y)` is much smaller than `D(X)`.
    Low,
    /// `D(Y)` is much larger than `D(X)`.
    High,
    /// Estimate of `D(Y) / D(X)`.
    Ratio(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompareParams {
    pub eta: f64,
    pub k: f64,
    pub delta: f64,
}

impl CompareParams {
    /// Conditional draws spent by one comparison.
    pub fn draws(&self, c: &Constants) -> u64 {
        count(c.c_cmp * self.k * (1.0 / self.delta).ln().max(1.0) / (self.eta * self.eta))
    }
}

/// Decides from `hits` of `t` draws landing in `Y`.
pub fn classify(hits: u64, t: u64, k: f64) -> CompareOutcome {
    let f = hits as f64 / t as f64;
    if f >= 1.0 - 1.0 / (4.0 * k) {
        CompareOutcome::High
    } else if f <= 1.0 / (4.0 * k) {
        CompareOutcome::Low
    } else {
        CompareOutcome::Ratio(f / (1.0 - f))
    }
}

/// Compares `D(y)` with `D(x)` through conditional draws on `{x, y}`.
pub fn compare_pair<O: PairConditional + ?Sized>(
    o: &mut O,
    x: usize,
    y: usize,
    p: CompareParams,
    c: &Constants,
) -> Result<CompareOutcome, OracleError> {
    let t = p.draws(c);
    let hits = o.pair_hits(x, y, t)?;
    Ok(classify(hits, t, p.k))
}

/// Compares `D(Y)` with `D(X)` for disjoint non-empty sets.
///
/// Uses COND on `X ∪ Y`, or PAIRCOND / INTCOND when the model and the shape
/// of the sets allow it.
pub fn compare(
    s: &mut OracleSession,
    x: &IndexSet,
    y: &IndexSet,
    p: CompareParams,
    c: &Constants,
) -> Result<CompareOutcome, OracleError> {
    if x.is_empty() || y.is_empty() || !x.is_disjoint(y) {
        return Err(OracleError::Malformed("compare needs disjoint non-empty sets"));
    }
    let t = p.draws(c);
    let union = x.union(y);
    let hits = match s.model() {
        AccessModel::Cond => s.cond_hits(&union, y, t)?,
        AccessModel::PairCond if x.len() == 1 && y.len() == 1 => {
            s.paircond_hits(x.runs()[0].start, y.runs()[0].start, t)?
        }
        AccessModel::IntCond if union.runs().len() == 1 && y.runs().len() == 1 => {
            s.intcond_hits(union.runs()[0].clone(), y.runs()[0].clone(), t)?
        }
        m => return Err(OracleError::Forbidden(OracleKind::Cond, m)),
    };
    Ok(classify(hits, t, p.k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distcore::Pmf;
    use std::sync::Arc;

    #[test]
    fn classify_thresholds() {
        assert_eq!(classify(95, 100, 2.0), CompareOutcome::High);
        assert_eq!(classify(5, 100, 2.0), CompareOutcome::Low);
        match classify(50, 100, 2.0) {
            CompareOutcome::Ratio(r) => assert!((r - 1.0).abs() < 1e-12),
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn uniform_ratios_are_accurate() {
        let d = Arc::new(Pmf::uniform(10).unwrap());
        let c = Constants::default();
        let p = CompareParams { eta: 0.1, k: 1.0, delta: 0.1 };
        let mut good = 0;
        for seed in 0..500 {
            let mut s = OracleSession::new(d.clone(), AccessModel::Cond, seed);
            if let CompareOutcome::Ratio(r) = compare(&mut s, &IndexSet::singleton(2), &IndexSet::singleton(7), p, &c).unwrap() {
                if (0.9..=1.1).contains(&r) {
                    good += 1;
                }
            }
            assert_eq!(s.log().cond, p.draws(&c));
        }
        assert!(good >= 425, "{good}");
    }

    #[test]
    fn large_gap_is_high() {
        let d = Arc::new(Pmf::new(vec![0.01, 0.99]).unwrap());
        let c = Constants::default();
        let p = CompareParams { eta: 0.1, k: 2.0, delta: 0.01 };
        let mut s = OracleSession::new(d, AccessModel::PairCond, 1);
        assert_eq!(compare_pair(&mut s, 0, 1, p, &c).unwrap(), CompareOutcome::High);
        assert_eq!(compare_pair(&mut s, 1, 0, p, &c).unwrap(), CompareOutcome::Low);
    }

    #[test]
    fn intcond_compare_on_adjacent_intervals() {
        let d = Arc::new(Pmf::new(vec![0.25, 0.25, 0.25, 0.25]).unwrap());
        let c = Constants::default();
        let p = CompareParams { eta: 0.05, k: 2.0, delta: 0.01 };
        let mut s = OracleSession::new(d, AccessModel::IntCond, 4);
        match compare(&mut s, &IndexSet::interval(0..1), &IndexSet::interval(1..3), p, &c).unwrap() {
            CompareOutcome::Ratio(r) => assert!((r - 2.0).abs() < 0.2),
            o => panic!("{o:?}"),
        }
    }
}
