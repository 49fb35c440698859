use rand::Rng;

use super::uniformity::{DistanceEstimate, UniformityDistance};
use crate::constants::{count, Constants};
use crate::distcore::Partition;
use crate::oracles::{OracleError, OracleSession};

/// Outer samples of the conditional estimator.
pub fn cond_outer_samples(eps: f64, delta: f64, c: &Constants) -> u64 {
    count(c.c_z * (2.0 / delta).ln().max(8.0) / 8.0 / (eps * eps))
}

/// Outer samples and inner uniform draws of the cumulative estimator.
pub fn cumulative_samples(eps: f64, delta: f64, c: &Constants) -> (u64, u64) {
    let m = count(c.c_cd * (2.0 / delta).ln().max(8.0) / 8.0 / (eps * eps));
    let r = count(2.0 * (20.0 * m as f64).ln() / (eps * eps));
    (m, r)
}

/// Worst-case queries of [`estimate_dist_to_flattening_cumulative`]:
/// `(samp, ceval)`.
pub fn cumulative_budget(eps: f64, delta: f64, c: &Constants) -> (u64, u64) {
    let (m, r) = cumulative_samples(eps, delta, c);
    (m, m.saturating_mul(2 + 2 * r))
}

/// Estimates `tv(D, flatten(D, part))` as the mean of `tv(D_{I_k}, U_{I_k})`
/// over blocks `I_k` holding samples `i ~ D`.
pub fn estimate_dist_to_flattening_cond(
    s: &mut OracleSession,
    part: &Partition,
    eps: f64,
    delta: f64,
    plugin: &mut dyn UniformityDistance,
    c: &Constants,
) -> Result<DistanceEstimate, OracleError> {
    let before = s.log().total();
    let m = cond_outer_samples(eps, delta, c);
    let inner_delta = 1.0 / (10.0 * m as f64);
    let mut sum = 0.0;
    for (i, k) in s.samp_counts(m)? {
        let b = part.block(part.block_of(i));
        for _ in 0..k {
            sum += plugin.estimate(s, b.clone(), eps / 2.0, inner_delta)?.value;
        }
    }
    Ok(DistanceEstimate {
        value: (sum / m as f64).clamp(0.0, 1.0),
        budget: s.log().total() - before,
    })
}

/// Same target as the conditional estimator, with each `tv(D_{I_k}, U_{I_k})`
/// estimated from point masses `D(j) = F(j) - F(j-1)` at uniform `j ∈ I_k`.
pub fn estimate_dist_to_flattening_cumulative(
    s: &mut OracleSession,
    part: &Partition,
    eps: f64,
    delta: f64,
    c: &Constants,
) -> Result<DistanceEstimate, OracleError> {
    let before = s.log().total();
    let (m, r) = cumulative_samples(eps, delta, c);
    let mut sum = 0.0;
    for (i, k) in s.samp_counts(m)? {
        let b = part.block(part.block_of(i));
        let len = b.end - b.start;
        for _ in 0..k {
            let mass = s.ceval_mass(b.clone())?;
            if len == 1 || !(mass > 0.0) {
                continue;
            }
            let mut z = 0.0;
            for _ in 0..r {
                let j = s.coins().random_range(b.clone());
                let dj = s.ceval_mass(j..j + 1)?;
                z += (1.0 - dj * len as f64 / mass).max(0.0);
            }
            sum += z / r as f64;
        }
    }
    Ok(DistanceEstimate {
        value: (sum / m as f64).clamp(0.0, 1.0),
        budget: s.log().total() - before,
    })
}

#[cfg(test)]
mod tests {
    use super::super::uniformity::Whitebox;
    use super::*;
    use crate::distcore::{flatten, oblivious_partition, tv_distance, Pmf};
    use crate::oracles::AccessModel;
    use std::sync::Arc;

    fn planted(n: usize, alpha: f64) -> (Pmf, Partition) {
        let part = oblivious_partition(n, alpha).unwrap().partition;
        let mut w: Vec<f64> = (0..n).map(|i| 1.0 / (i + 1) as f64).collect();
        let k = part.len() - 3;
        let b = part.block(k);
        for (t, j) in b.clone().enumerate() {
            w[j] = if t % 2 == 0 { 3.0 } else { 0.0 } / n as f64 * 10.0;
        }
        (Pmf::from_masses(w).unwrap(), part)
    }

    #[test]
    fn flat_input_is_near_zero() {
        let c = Constants::default();
        let d = Arc::new(Pmf::uniform(512).unwrap());
        let part = oblivious_partition(512, 0.2).unwrap().partition;
        let mut s = OracleSession::new(d.clone(), AccessModel::Cond, 1);
        let e = estimate_dist_to_flattening_cond(&mut s, &part, 0.05, 0.1, &mut Whitebox::default(), &c).unwrap();
        assert!(e.value <= 0.05);
        let mut s = OracleSession::new(d, AccessModel::CumulativeDual, 1);
        let e = estimate_dist_to_flattening_cumulative(&mut s, &part, 0.05, 0.1, &c).unwrap();
        assert!(e.value <= 0.05);
        assert_eq!(e.budget, s.log().total());
    }

    #[test]
    fn planted_block_is_recovered() {
        let c = Constants::default();
        let (d, part) = planted(1024, 0.25);
        let truth = tv_distance(&d, &flatten(&d, &part).unwrap()).unwrap();
        assert!(truth > 0.05);
        let d = Arc::new(d);
        let eps = 0.05;
        let (mut ok_cond, mut ok_cum) = (0, 0);
        for seed in 0..300 {
            let mut s = OracleSession::new(d.clone(), AccessModel::Cond, seed);
            let e = estimate_dist_to_flattening_cond(&mut s, &part, eps, 0.1, &mut Whitebox::default(), &c).unwrap();
            ok_cond += ((e.value - truth).abs() <= eps) as u32;
            if seed < 100 {
                let mut s = OracleSession::new(d.clone(), AccessModel::CumulativeDual, seed);
                let e = estimate_dist_to_flattening_cumulative(&mut s, &part, eps, 0.1, &c).unwrap();
                ok_cum += ((e.value - truth).abs() <= eps) as u32;
                let (bs, bc) = cumulative_budget(eps, 0.1, &c);
                assert!(s.log().samp <= bs && s.log().ceval <= bc);
            }
        }
        assert!(ok_cond >= 270, "{ok_cond}");
        assert!(ok_cum >= 90, "{ok_cum}");
    }
}
