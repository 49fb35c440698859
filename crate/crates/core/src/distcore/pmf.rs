use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::DistError;

/// Deviation from total mass 1 that is silently normalized away.
pub const NORMALIZE_TOL: f64 = 1e-9;

/// A probability mass function on `{0, .., n-1}`.
///
/// Weights are non-negative and sum to 1. Prefix sums are cached so that
/// interval masses and inverse-cdf sampling are `O(1)` and `O(log n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PmfRepr", into = "PmfRepr")]
pub struct Pmf {
    weights: Vec<f64>,
    cdf: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct PmfRepr {
    n: usize,
    weights: Vec<f64>,
}

impl TryFrom<PmfRepr> for Pmf {
    type Error = DistError;

    fn try_from(r: PmfRepr) -> Result<Self, DistError> {
        if r.n != r.weights.len() {
            return Err(DistError::LengthMismatch {
                expected: r.n,
                found: r.weights.len(),
            });
        }
        Pmf::new(r.weights)
    }
}

impl From<Pmf> for PmfRepr {
    fn from(p: Pmf) -> Self {
        PmfRepr {
            n: p.weights.len(),
            weights: p.weights,
        }
    }
}

impl Pmf {
    /// Builds a pmf, normalizing sums within [`NORMALIZE_TOL`] of 1.
    pub fn new(weights: Vec<f64>) -> Result<Self, DistError> {
        if weights.is_empty() {
            return Err(DistError::Empty);
        }
        for (i, &w) in weights.iter().enumerate() {
            if !w.is_finite() || w < 0.0 {
                return Err(DistError::InvalidWeight { index: i, value: w });
            }
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > NORMALIZE_TOL {
            return Err(DistError::NotNormalized(total));
        }
        let weights = if (total - 1.0).abs() <= 1e-14 {
            weights
        } else {
            weights.into_iter().map(|w| w / total).collect()
        };
        Ok(Self::from_normalized(weights))
    }

    /// Rescales arbitrary non-negative masses to sum to 1.
    pub fn from_masses(masses: Vec<f64>) -> Result<Self, DistError> {
        let total: f64 = masses.iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(DistError::NotNormalized(total));
        }
        Self::new(masses.into_iter().map(|w| w / total).collect())
    }

    pub(crate) fn from_normalized(weights: Vec<f64>) -> Self {
        let mut cdf = Vec::with_capacity(weights.len() + 1);
        let mut acc = 0.0;
        cdf.push(0.0);
        for &w in &weights {
            acc += w;
            cdf.push(acc);
        }
        Pmf { weights, cdf }
    }

    pub fn uniform(n: usize) -> Result<Self, DistError> {
        if n == 0 {
            return Err(DistError::Empty);
        }
        Ok(Self::from_normalized(vec![1.0 / n as f64; n]))
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    /// Mass of `{0, .., j-1}`; `prefix(n)` is the total mass.
    pub fn prefix(&self, j: usize) -> f64 {
        self.cdf[j]
    }

    /// Mass of the half-open index range.
    pub fn mass(&self, r: Range<usize>) -> f64 {
        self.cdf[r.end] - self.cdf[r.start]
    }

    /// Maps `u` in `[0,1)` to the index whose cdf segment inside `r` contains it.
    ///
    /// Returns `None` when `r` carries no mass.
    pub fn quantile_in(&self, r: Range<usize>, u: f64) -> Option<usize> {
        let lo = self.cdf[r.start];
        let hi = self.cdf[r.end];
        if !(hi > lo) {
            return None;
        }
        let target = lo + u * (hi - lo);
        let seg = &self.cdf[r.start + 1..=r.end];
        let mut i = r.start + seg.partition_point(|&c| c <= target);
        if i >= r.end {
            i = r.end - 1;
            while self.weights[i] == 0.0 {
                i -= 1;
            }
        }
        Some(i)
    }

    pub fn is_monotone(&self) -> bool {
        self.weights.windows(2).all(|w| w[1] <= w[0])
    }
}
