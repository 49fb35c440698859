use serde::{Deserialize, Serialize};

use super::{DistError, Partition, Pmf, NORMALIZE_TOL};

/// A distribution that is flat on each block of a partition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "HistogramRepr", into = "HistogramRepr")]
pub struct Histogram {
    partition: Partition,
    block_weights: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct HistogramRepr {
    bounds: Partition,
    block_weights: Vec<f64>,
}

impl TryFrom<HistogramRepr> for Histogram {
    type Error = DistError;

    fn try_from(r: HistogramRepr) -> Result<Self, DistError> {
        Histogram::new(r.bounds, r.block_weights)
    }
}

impl From<Histogram> for HistogramRepr {
    fn from(h: Histogram) -> Self {
        HistogramRepr {
            bounds: h.partition,
            block_weights: h.block_weights,
        }
    }
}

impl Histogram {
    /// `block_weights[k]` is the total mass of block `k`.
    pub fn new(partition: Partition, block_weights: Vec<f64>) -> Result<Self, DistError> {
        if partition.len() != block_weights.len() {
            return Err(DistError::LengthMismatch {
                expected: partition.len(),
                found: block_weights.len(),
            });
        }
        for (i, &w) in block_weights.iter().enumerate() {
            if !w.is_finite() || w < 0.0 {
                return Err(DistError::InvalidWeight { index: i, value: w });
            }
        }
        let total: f64 = block_weights.iter().sum();
        if (total - 1.0).abs() > NORMALIZE_TOL {
            return Err(DistError::NotNormalized(total));
        }
        let block_weights = if (total - 1.0).abs() <= 1e-14 {
            block_weights
        } else {
            block_weights.into_iter().map(|w| w / total).collect()
        };
        Ok(Histogram {
            partition,
            block_weights,
        })
    }

    /// Block masses of `d` on `partition`.
    pub fn from_pmf(d: &Pmf, partition: &Partition) -> Result<Self, DistError> {
        if d.len() != partition.n() {
            return Err(DistError::LengthMismatch {
                expected: partition.n(),
                found: d.len(),
            });
        }
        let w = (0..partition.len()).map(|k| d.mass(partition.block(k))).collect();
        Ok(Histogram {
            partition: partition.clone(),
            block_weights: w,
        })
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn block_weights(&self) -> &[f64] {
        &self.block_weights
    }

    /// Per-element value on block `k`.
    pub fn level(&self, k: usize) -> f64 {
        self.block_weights[k] / self.partition.size(k) as f64
    }

    pub fn to_pmf(&self) -> Pmf {
        let mut w = Vec::with_capacity(self.partition.n());
        for k in 0..self.partition.len() {
            let v = self.level(k);
            w.extend(std::iter::repeat(v).take(self.partition.size(k)));
        }
        Pmf::new(w).expect("histogram masses sum to 1")
    }
}
