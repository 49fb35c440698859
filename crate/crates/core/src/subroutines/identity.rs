use rand::Rng;

use super::uniformity::DistanceEstimate;
use crate::constants::{count, Constants};
use crate::distcore::Pmf;
use crate::oracles::{AccessModel, OracleError, OracleSession};

/// Points drawn by [`estimate_tv_to_known_eval`].
pub fn identity_points(eps: f64, delta: f64, c: &Constants) -> u64 {
    count(c.c_id * (1.0 / delta).ln() / (eps * eps))
}

/// `D(x)` with one EVAL query, or two CEVAL queries when EVAL is unavailable.
pub fn point_value(s: &mut OracleSession, x: usize) -> Result<f64, OracleError> {
    if s.model().allows(crate::oracles::OracleKind::Eval) {
        s.eval(x)
    } else {
        s.ceval_mass(x..x + 1)
    }
}

/// Estimates `tv(D, dstar)` as the mean of `max(0, 1 - D(x)/dstar(x))` over
/// points `x ~ dstar`.
pub fn estimate_tv_to_known_eval(
    s: &mut OracleSession,
    dstar: &Pmf,
    eps: f64,
    delta: f64,
    c: &Constants,
) -> Result<DistanceEstimate, OracleError> {
    if dstar.len() != s.domain_size() {
        return Err(OracleError::Malformed("reference pmf has the wrong domain"));
    }
    let before = s.log().total();
    let m = identity_points(eps, delta, c);
    let mut sum = 0.0;
    for _ in 0..m {
        let u: f64 = s.coins().random();
        let x = dstar.quantile_in(0..dstar.len(), u).expect("pmf has mass");
        let d = point_value(s, x)?;
        sum += (1.0 - d / dstar.weight(x)).max(0.0);
    }
    Ok(DistanceEstimate {
        value: (sum / m as f64).clamp(0.0, 1.0),
        budget: s.log().total() - before,
    })
}

/// The proposal `P(x) = 1 / ((x+1) H_n)` used by the non-adaptive estimator.
pub fn harmonic_proposal(n: usize) -> Pmf {
    Pmf::from_masses((0..n).map(|x| 1.0 / (x + 1) as f64).collect()).expect("positive masses")
}

/// Draws `count` evaluation points from [`harmonic_proposal`].
pub fn harmonic_points<R: Rng + ?Sized>(n: usize, count: u64, rng: &mut R) -> Vec<usize> {
    let p = harmonic_proposal(n);
    (0..count)
        .map(|_| p.quantile_in(0..n, rng.random()).expect("pmf has mass"))
        .collect()
}

/// Importance-weighted estimate of `sum_x (dstar(x) - D(x))_+` from `D`
/// evaluated at proposal points.
///
/// For non-increasing `dstar`, each term is at most `H_n`.
pub fn harmonic_tv_estimate(dstar: &Pmf, points: &[usize], values: &[f64]) -> f64 {
    let p = harmonic_proposal(dstar.len());
    let sum: f64 = points
        .iter()
        .zip(values)
        .map(|(&x, &d)| (dstar.weight(x) - d).max(0.0) / p.weight(x))
        .sum();
    (sum / points.len().max(1) as f64).clamp(0.0, 1.0)
}

/// True when the session can answer point-value queries.
pub fn has_point_access(model: AccessModel) -> bool {
    matches!(model, AccessModel::Eval | AccessModel::Dual | AccessModel::CumulativeDual)
}
