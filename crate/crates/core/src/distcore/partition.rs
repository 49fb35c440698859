use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::DistError;

/// A partition of `{0, .., n-1}` into consecutive non-empty intervals.
///
/// `bounds` starts at 0, ends at `n` and is strictly increasing; block `k`
/// is `bounds[k]..bounds[k+1]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Partition {
    bounds: Vec<usize>,
}

impl TryFrom<Vec<usize>> for Partition {
    type Error = DistError;

    fn try_from(bounds: Vec<usize>) -> Result<Self, DistError> {
        Partition::from_bounds(bounds)
    }
}

impl From<Partition> for Vec<usize> {
    fn from(p: Partition) -> Self {
        p.bounds
    }
}

impl Partition {
    pub fn from_bounds(bounds: Vec<usize>) -> Result<Self, DistError> {
        if bounds.len() < 2 || bounds[0] != 0 || bounds.windows(2).any(|w| w[1] <= w[0]) {
            return Err(DistError::InvalidPartition);
        }
        Ok(Partition { bounds })
    }

    pub fn from_sizes(sizes: &[usize]) -> Result<Self, DistError> {
        let mut bounds = Vec::with_capacity(sizes.len() + 1);
        bounds.push(0);
        let mut acc = 0;
        for &s in sizes {
            acc += s;
            bounds.push(acc);
        }
        Self::from_bounds(bounds)
    }

    /// The partition of `{0, .., n-1}` into singletons.
    pub fn singletons(n: usize) -> Result<Self, DistError> {
        Self::from_bounds((0..=n).collect())
    }

    /// Number of blocks.
    pub fn len(&self) -> usize {
        self.bounds.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Size of the underlying domain.
    pub fn n(&self) -> usize {
        *self.bounds.last().unwrap()
    }

    pub fn bounds(&self) -> &[usize] {
        &self.bounds
    }

    pub fn block(&self, k: usize) -> Range<usize> {
        self.bounds[k]..self.bounds[k + 1]
    }

    pub fn size(&self, k: usize) -> usize {
        self.bounds[k + 1] - self.bounds[k]
    }

    pub fn sizes(&self) -> impl Iterator<Item = usize> + '_ {
        self.bounds.windows(2).map(|w| w[1] - w[0])
    }

    /// Index of the block containing element `i`.
    pub fn block_of(&self, i: usize) -> usize {
        debug_assert!(i < self.n());
        self.bounds.partition_point(|&b| b <= i) - 1
    }
}

/// The oblivious decomposition `I_alpha` of `{0, .., n-1}`.
///
/// Block `k` (1-based) has size `floor((1+alpha)^k)`; the last block is
/// truncated at `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObliviousPartition {
    pub alpha: f64,
    pub partition: Partition,
}

impl std::ops::Deref for ObliviousPartition {
    type Target = Partition;

    fn deref(&self) -> &Partition {
        &self.partition
    }
}

pub fn oblivious_partition(n: usize, alpha: f64) -> Result<ObliviousPartition, DistError> {
    if n == 0 {
        return Err(DistError::Empty);
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(DistError::InvalidAlpha(alpha));
    }
    let mut bounds = vec![0];
    let mut covered = 0usize;
    let mut k = 1i32;
    let base = 1.0 + alpha;
    while covered < n {
        let size = base.powi(k).floor().max(1.0);
        let size = if size >= (n - covered) as f64 {
            n - covered
        } else {
            size as usize
        };
        covered += size;
        bounds.push(covered);
        k += 1;
    }
    Ok(ObliviousPartition {
        alpha,
        partition: Partition { bounds },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn doubling_partition_sizes() {
        let p = oblivious_partition(14, 1.0).unwrap();
        assert_eq!(p.sizes().collect::<Vec<_>>(), vec![2, 4, 8]);
        let p = oblivious_partition(15, 1.0).unwrap();
        assert_eq!(p.sizes().collect::<Vec<_>>(), vec![2, 4, 8, 1]);
    }

    #[test]
    fn small_alpha_gives_singletons() {
        let p = oblivious_partition(3, 0.1).unwrap();
        assert_eq!(p.sizes().collect::<Vec<_>>(), vec![1, 1, 1]);
        assert_eq!(oblivious_partition(1, 0.5).unwrap().len(), 1);
    }

    #[test]
    fn rejects_bad_alpha() {
        assert!(oblivious_partition(10, 0.0).is_err());
        assert!(oblivious_partition(10, 1.5).is_err());
        assert!(oblivious_partition(0, 0.5).is_err());
    }

    #[test]
    fn block_count_is_logarithmic() {
        for &n in &[1usize, 7, 100, 4096, 1 << 16] {
            for &a in &[0.01, 0.05, 0.1, 0.25, 0.5, 1.0] {
                let p = oblivious_partition(n, a).unwrap();
                assert_eq!(p.n(), n);
                let bound = 4.0 * (a * n as f64 + 2.0).ln() / a;
                assert!((p.len() as f64) <= bound, "n={n} a={a} l={}", p.len());
            }
        }
    }

    #[test]
    fn block_of_matches_ranges() {
        let p = oblivious_partition(500, 0.2).unwrap();
        for k in 0..p.len() {
            for i in p.block(k) {
                assert_eq!(p.block_of(i), k);
            }
        }
    }
}
