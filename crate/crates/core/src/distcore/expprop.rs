//! The exponential property: `Q(k+1) <= cap_k * Q(k)` for every `k`.
//!
//! With all caps equal to `1 + alpha` this is `P_alpha`. With the
//! block-size ratios of a partition it characterizes exactly the reductions
//! of monotone pmfs on that partition.

use serde::{Deserialize, Serialize};

use super::{lp, DistError, Partition, Pmf};

/// Ratio caps between consecutive entries; `caps[k]` bounds `Q(k+1)/Q(k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthCaps(Vec<f64>);

impl GrowthCaps {
    pub fn uniform(len: usize, alpha: f64) -> Self {
        GrowthCaps(vec![1.0 + alpha; len.saturating_sub(1)])
    }

    /// Caps `|I_{k+1}| / |I_k|` of a partition.
    pub fn for_partition(part: &Partition) -> Self {
        let s: Vec<usize> = part.sizes().collect();
        GrowthCaps(s.windows(2).map(|w| w[1] as f64 / w[0] as f64).collect())
    }

    pub fn from_vec(caps: Vec<f64>) -> Self {
        GrowthCaps(caps)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn cap(&self, k: usize) -> f64 {
        self.0[k]
    }

    fn check(&self, q: &Pmf) -> Result<(), DistError> {
        if self.0.len() + 1 != q.len() {
            return Err(DistError::LengthMismatch {
                expected: self.0.len() + 1,
                found: q.len(),
            });
        }
        Ok(())
    }
}

/// Indices violating the property with slack `tau`, and their mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub indices: Vec<usize>,
    pub mass: f64,
}

pub fn satisfies_growth(q: &Pmf, caps: &GrowthCaps) -> Result<bool, DistError> {
    caps.check(q)?;
    let w = q.weights();
    Ok((1..w.len()).all(|k| w[k] <= caps.cap(k - 1) * w[k - 1] * (1.0 + 1e-12)))
}

pub fn satisfies_expprop(q: &Pmf, alpha: f64) -> bool {
    satisfies_growth(q, &GrowthCaps::uniform(q.len(), alpha)).unwrap()
}

/// Exact distance from `q` to the pmfs obeying `caps`, by the simplex method.
pub fn distance_to_growth_property(q: &Pmf, caps: &GrowthCaps) -> Result<f64, DistError> {
    caps.check(q)?;
    if satisfies_growth(q, caps)? {
        return Ok(0.0);
    }
    let (v, _) = lp::growth_fit_lp(q.weights(), caps.as_slice())?;
    Ok((0.5 * v).clamp(0.0, 1.0))
}

pub fn distance_to_expprop_exact(q: &Pmf, alpha: f64) -> f64 {
    distance_to_growth_property(q, &GrowthCaps::uniform(q.len(), alpha))
        .expect("growth LP is always feasible")
}

/// `{k >= 1 : Q(k) > (cap_{k-1} + tau) Q(k-1)}`.
pub fn witnesses(q: &Pmf, caps: &GrowthCaps, tau: f64) -> Result<WitnessReport, DistError> {
    caps.check(q)?;
    let w = q.weights();
    let indices: Vec<usize> = (1..w.len())
        .filter(|&k| w[k] > (caps.cap(k - 1) + tau) * w[k - 1])
        .collect();
    let mass = indices.iter().map(|&k| w[k]).sum();
    Ok(WitnessReport { indices, mass })
}

pub fn tau_witnesses(q: &Pmf, alpha: f64, tau: f64) -> WitnessReport {
    witnesses(q, &GrowthCaps::uniform(q.len(), alpha), tau).unwrap()
}

/// Repairs witnesses left to right: raise the predecessors of each witness
/// until the caps hold, then take the added mass from the rightmost points.
pub fn fixup_with(q: &Pmf, caps: &GrowthCaps) -> Result<Pmf, DistError> {
    caps.check(q)?;
    let mut v = q.weights().to_vec();
    let l = v.len();
    for i in 1..l {
        if !(v[i] > caps.cap(i - 1) * v[i - 1]) {
            continue;
        }
        let mut delta = 0.0;
        let mut target = v[i];
        let mut j = i;
        while j > 0 {
            target /= caps.cap(j - 1);
            if v[j - 1] >= target {
                break;
            }
            delta += target - v[j - 1];
            v[j - 1] = target;
            j -= 1;
        }
        let mut k = l;
        while delta > 0.0 && k > 0 {
            k -= 1;
            let take = delta.min(v[k]);
            v[k] -= take;
            delta -= take;
        }
    }
    Pmf::new(v)
}

pub fn fixup(q: &Pmf, alpha: f64) -> Pmf {
    fixup_with(q, &GrowthCaps::uniform(q.len(), alpha)).expect("fixup preserves mass")
}
