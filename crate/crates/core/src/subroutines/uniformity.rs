use std::collections::HashMap;
use std::ops::Range;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::compare::{compare_pair, CompareOutcome, CompareParams};
use crate::constants::{count, Constants};
use crate::distcore::Pmf;
use crate::oracles::{OracleError, OracleSession};

/// How the near-uniformity decider reaches the hidden distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DeciderModel {
    Cond,
    IntCond,
    Samp,
}

/// Point pairs drawn by the conditional deciders.
pub fn decider_pairs(eps: f64, delta: f64, c: &Constants) -> u64 {
    count(c.c_u * (2.0 / delta).ln() / eps)
}

/// Depth of the bisection tree over an interval of `len` points.
pub fn descent_depth(len: usize) -> u32 {
    (len.max(2) as f64).log2().ceil() as u32
}

/// INTCOND draws per bisection level of [`intcond_point_ratio`].
pub fn descent_draws(len: usize, eta: f64, delta: f64, c: &Constants) -> u64 {
    let l = descent_depth(len) as f64;
    count(c.c_bd * l * (2.0 * l / delta).ln() / (eta * eta))
}

/// Samples an interval needs before its collision statistic is trusted.
pub fn collision_samples(len: usize, eps: f64, c: &Constants) -> u64 {
    count(c.c_coll * (len as f64).sqrt() / (eps * eps))
}

/// `|I| * sum c_i (c_i - 1) / (c (c - 1))`, an estimate of `|I| * ||D_I||^2`.
///
/// `counts` are the per-point sample counts inside the interval.
pub fn collision_statistic(counts: impl IntoIterator<Item = u64>, len: usize) -> Option<f64> {
    let (mut total, mut pairs) = (0f64, 0f64);
    for c in counts {
        let c = c as f64;
        total += c;
        pairs += c * (c - 1.0);
    }
    if total < 2.0 {
        return None;
    }
    Some(len as f64 * pairs / (total * (total - 1.0)))
}

/// Collision-based acceptance rule: `|I| ||D_I||^2 <= 1 + eps^2 / 8`.
pub fn collision_accepts(stat: f64, eps: f64) -> bool {
    stat <= 1.0 + eps * eps / 8.0
}

/// Estimates `D(y) / D(x)` for `x, y` in `I` by INTCOND descent from their
/// lowest common bisection node down to each singleton.
pub fn intcond_point_ratio(
    s: &mut OracleSession,
    x: usize,
    y: usize,
    i: Range<usize>,
    eta: f64,
    delta: f64,
    c: &Constants,
) -> Result<f64, OracleError> {
    if x == y {
        return Ok(1.0);
    }
    let t = descent_draws(i.end - i.start, eta, delta, c);
    let (mut lo, mut hi) = (i.start, i.end);
    loop {
        let mid = lo + (hi - lo) / 2;
        if x < mid && y < mid {
            hi = mid;
        } else if x >= mid && y >= mid {
            lo = mid;
        } else {
            break;
        }
    }
    let px = path_mass(s, lo..hi, x, t)?;
    let py = path_mass(s, lo..hi, y, t)?;
    Ok(if px == 0.0 {
        f64::INFINITY
    } else {
        py / px
    })
}

fn path_mass(s: &mut OracleSession, r: Range<usize>, z: usize, t: u64) -> Result<f64, OracleError> {
    let (mut a, mut b) = (r.start, r.end);
    let mut est = 1.0;
    while b - a > 1 {
        let mid = a + (b - a) / 2;
        let child = if z < mid { a..mid } else { mid..b };
        let hits = s.intcond_hits(a..b, child.clone(), t)?;
        if hits == 0 {
            return Ok(0.0);
        }
        est *= hits as f64 / t as f64;
        a = child.start;
        b = child.end;
    }
    Ok(est)
}

/// Distinguishes `tv(D_I, U_I) > eps/4` (reject) from
/// `max_i |D_I(i) - 1/|I|| <= eps/(16|I|)` (accept).
pub fn near_uniform_decider(
    s: &mut OracleSession,
    i: Range<usize>,
    eps: f64,
    delta: f64,
    model: DeciderModel,
    c: &Constants,
) -> Result<bool, OracleError> {
    let len = i.end - i.start;
    if len <= 1 {
        return Ok(true);
    }
    match model {
        DeciderModel::Samp => samp_decider(s, i, eps, c),
        DeciderModel::Cond | DeciderModel::IntCond => {
            let pairs = decider_pairs(eps, delta, c);
            let p = CompareParams {
                eta: eps / 32.0,
                k: 2.0,
                delta: delta / (2.0 * pairs as f64),
            };
            let (lo, hi) = (1.0 - eps / 8.0, 1.0 + eps / 8.0);
            let interval = crate::oracles::IndexSet::interval(i.clone());
            for _ in 0..pairs {
                let x = match model {
                    DeciderModel::Cond => s.cond(&interval)?,
                    _ => s.intcond(i.clone())?,
                };
                let y = s.coins().random_range(i.clone());
                if x == y {
                    continue;
                }
                let rho = if model == DeciderModel::Cond {
                    match compare_pair(s, x, y, p, c)? {
                        CompareOutcome::Ratio(r) => r,
                        _ => return Ok(false),
                    }
                } else {
                    intcond_point_ratio(s, x, y, i.clone(), p.eta, p.delta, c)?
                };
                if !(lo..=hi).contains(&rho) {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

fn samp_decider(s: &mut OracleSession, i: Range<usize>, eps: f64, c: &Constants) -> Result<bool, OracleError> {
    let need = collision_samples(i.end - i.start, eps, c);
    let mut batch = need;
    let mut inside: HashMap<usize, u64> = HashMap::new();
    let mut got = 0u64;
    while got < need {
        for (idx, k) in s.samp_counts(batch)? {
            if i.contains(&idx) {
                *inside.entry(idx).or_default() += k;
                got += k;
            }
        }
        if batch > 1 << 40 {
            return Err(OracleError::ZeroMass);
        }
        batch *= 2;
    }
    let stat = collision_statistic(inside.values().copied(), i.end - i.start).unwrap_or(0.0);
    Ok(collision_accepts(stat, eps))
}

/// An estimate together with the queries spent producing it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceEstimate {
    pub value: f64,
    pub budget: u64,
}

/// Estimator of `tv(D_I, U_I)` for an interval `I`.
pub trait UniformityDistance {
    fn estimate(
        &mut self,
        s: &mut OracleSession,
        block: Range<usize>,
        eps: f64,
        delta: f64,
    ) -> Result<DistanceEstimate, OracleError>;
}

/// Exact `tv(D_I, U_I)` read off the hidden pmf; spends no queries.
#[derive(Debug, Default)]
pub struct Whitebox {
    cache: HashMap<(usize, usize), f64>,
    owner: usize,
}

/// `tv(D_I, U_I)` computed from the pmf.
pub fn uniformity_distance(d: &Pmf, block: Range<usize>) -> f64 {
    let m = d.mass(block.clone());
    if !(m > 0.0) {
        return 0.0;
    }
    let u = 1.0 / (block.end - block.start) as f64;
    let s: f64 = block.map(|k| (d.weight(k) / m - u).abs()).sum();
    (0.5 * s).clamp(0.0, 1.0)
}

impl UniformityDistance for Whitebox {
    fn estimate(
        &mut self,
        s: &mut OracleSession,
        block: Range<usize>,
        _eps: f64,
        _delta: f64,
    ) -> Result<DistanceEstimate, OracleError> {
        let d = s.whitebox_view();
        let id = d as *const Pmf as usize;
        if id != self.owner {
            self.cache.clear();
            self.owner = id;
        }
        let v = *self
            .cache
            .entry((block.start, block.end))
            .or_insert_with(|| uniformity_distance(d, block));
        Ok(DistanceEstimate { value: v, budget: 0 })
    }
}

/// The exact value shifted by a fixed bias, for fault injection.
#[derive(Debug, Default)]
pub struct Biased {
    pub inner: Whitebox,
    pub bias: f64,
}

impl UniformityDistance for Biased {
    fn estimate(
        &mut self,
        s: &mut OracleSession,
        block: Range<usize>,
        eps: f64,
        delta: f64,
    ) -> Result<DistanceEstimate, OracleError> {
        let e = self.inner.estimate(s, block, eps, delta)?;
        Ok(DistanceEstimate {
            value: (e.value + self.bias).clamp(0.0, 1.0),
            budget: e.budget,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::AccessModel;
    use std::sync::Arc;

    fn two_level(n: usize) -> Pmf {
        let w = (0..n).map(|i| if i < n / 2 { 1.5 } else { 0.5 } / n as f64).collect();
        Pmf::new(w).unwrap()
    }

    #[test]
    fn singleton_is_free() {
        let c = Constants::default();
        let mut s = OracleSession::new(Arc::new(Pmf::uniform(8).unwrap()), AccessModel::Cond, 0);
        assert!(near_uniform_decider(&mut s, 3..4, 0.5, 0.1, DeciderModel::Cond, &c).unwrap());
        assert_eq!(s.log().total(), 0);
    }

    #[test]
    fn deciders_on_uniform_and_skewed() {
        let c = Constants::default();
        let delta = 0.1;
        for (model, access) in [
            (DeciderModel::Cond, AccessModel::Cond),
            (DeciderModel::IntCond, AccessModel::IntCond),
            (DeciderModel::Samp, AccessModel::Samp),
        ] {
            let uni = Arc::new(Pmf::uniform(64).unwrap());
            let skew = Arc::new(two_level(64));
            let (mut acc, mut rej) = (0, 0);
            for seed in 0..200 {
                let mut s = OracleSession::new(uni.clone(), access, seed);
                acc += near_uniform_decider(&mut s, 0..64, 0.5, delta, model, &c).unwrap() as u32;
                let mut s = OracleSession::new(skew.clone(), access, seed);
                rej += !near_uniform_decider(&mut s, 0..64, 0.5, delta, model, &c).unwrap() as u32;
            }
            assert!(acc >= 180, "{model:?} accepted uniform {acc}/200");
            assert!(rej >= 180, "{model:?} rejected skewed {rej}/200");
        }
    }

    #[test]
    fn point_ratio_examples() {
        let c = Constants::default();
        let d = Arc::new(Pmf::new(vec![0.2, 0.4, 0.2, 0.2]).unwrap());
        let mut s = OracleSession::new(d, AccessModel::IntCond, 5);
        assert_eq!(intcond_point_ratio(&mut s, 2, 2, 0..4, 0.1, 0.1, &c).unwrap(), 1.0);
        assert_eq!(s.log().total(), 0);
        let r = intcond_point_ratio(&mut s, 0, 1, 0..2, 0.1, 0.1, &c).unwrap();
        assert!((1.8..=2.2).contains(&r), "{r}");
        let r = intcond_point_ratio(&mut s, 3, 1, 0..4, 0.1, 0.1, &c).unwrap();
        assert!((1.8..=2.2).contains(&r), "{r}");
    }

    #[test]
    fn whitebox_matches_definition() {
        let d = Arc::new(two_level(10));
        let mut s = OracleSession::new(d.clone(), AccessModel::Cond, 0);
        let e = Whitebox::default().estimate(&mut s, 0..10, 0.1, 0.1).unwrap();
        assert!((e.value - 0.25).abs() < 1e-12);
        assert_eq!(e.budget, 0);
        let e = Whitebox::default().estimate(&mut s, 0..5, 0.1, 0.1).unwrap();
        assert!(e.value.abs() < 1e-12);
    }

    #[test]
    fn collision_statistic_values() {
        assert_eq!(collision_statistic([1, 1, 1, 1], 4), Some(0.0));
        assert_eq!(collision_statistic([1], 4), None);
        assert!((collision_statistic([2, 0], 2).unwrap() - 2.0).abs() < 1e-12);
    }
}
