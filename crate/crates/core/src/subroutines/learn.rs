use crate::distcore::{nearest_monotone_histogram, oblivious_partition, DistError, Histogram, Partition};
use crate::oracles::{OracleError, OracleSession};

#[derive(Debug, thiserror::Error)]
pub enum LearnError {
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Dist(#[from] DistError),
}

/// Points queried by the learner on `part`: the first element and the last
/// element of every block.
pub fn learner_points(part: &Partition) -> Vec<usize> {
    let mut pts = vec![0];
    for k in 0..part.len() {
        let last = part.block(k).end - 1;
        if last != 0 {
            pts.push(last);
        }
    }
    pts
}

/// Builds the learner's histogram from point values at [`learner_points`].
///
/// Block `k` gets the average of the value just before it and its own last
/// value (singletons keep their exact value); the result is projected onto
/// the monotone histograms on `part`.
pub fn learner_histogram(part: &Partition, values: &[f64]) -> Result<Histogram, DistError> {
    let mut masses = Vec::with_capacity(part.len());
    let mut prev_last = values[0];
    let mut next = 1;
    for k in 0..part.len() {
        let b = part.block(k);
        let last = if b.end - 1 == 0 {
            values[0]
        } else {
            next += 1;
            values[next - 1]
        };
        let level = if b.end - b.start == 1 { last } else { 0.5 * (prev_last + last) };
        masses.push(level * (b.end - b.start) as f64);
        prev_last = last;
    }
    nearest_monotone_histogram(&masses, part)
}

/// Learns a monotone histogram on `I_eps` from at most `len() + 1`
/// deterministic EVAL queries.
pub fn learn_monotone_eval(s: &mut OracleSession, eps: f64) -> Result<Histogram, LearnError> {
    let part = oblivious_partition(s.domain_size(), eps)?;
    let pts = learner_points(&part);
    let values = pts.iter().map(|&x| s.eval(x)).collect::<Result<Vec<_>, _>>()?;
    Ok(learner_histogram(&part, &values)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distcore::{tv_distance, Pmf};
    use crate::oracles::AccessModel;
    use std::sync::Arc;

    #[test]
    fn uniform_is_learned_exactly() {
        let d = Arc::new(Pmf::uniform(1000).unwrap());
        let mut s = OracleSession::new(d.clone(), AccessModel::Eval, 0);
        let h = learn_monotone_eval(&mut s, 0.1).unwrap();
        assert!(tv_distance(&h.to_pmf(), &d).unwrap() < 1e-12);
        assert!(s.log().eval <= 2 * h.partition().len() as u64);
    }

    #[test]
    fn geometric_within_three_eps() {
        let n = 1 << 10;
        let d = Arc::new(Pmf::from_masses((0..n).map(|i| 0.5f64.powi(i as i32 + 1)).collect()).unwrap());
        let mut s = OracleSession::new(d.clone(), AccessModel::Eval, 0);
        let h = learn_monotone_eval(&mut s, 0.1).unwrap();
        assert!(tv_distance(&h.to_pmf(), &d).unwrap() <= 0.3);
        assert!(h.to_pmf().is_monotone());
    }

    #[test]
    fn deterministic() {
        let d = Arc::new(Pmf::from_masses((0..500).map(|i| 1.0 / (i + 1) as f64).collect()).unwrap());
        let a = learn_monotone_eval(&mut OracleSession::new(d.clone(), AccessModel::Eval, 1), 0.2).unwrap();
        let b = learn_monotone_eval(&mut OracleSession::new(d, AccessModel::Eval, 2), 0.2).unwrap();
        assert_eq!(a, b);
    }
}
