//! Exact l1 projection onto non-increasing step functions.
//!
//! The overlap `sum_k min(w_k, s_k v_k)` is maximized over non-increasing
//! `v >= 0` with `sum_k s_k v_k <= 1`. Dualizing the mass constraint with a
//! multiplier `mu` leaves an isotonic problem whose block optimum is a
//! weighted quantile, solved by pool-adjacent-violators. The outer convex
//! problem in `mu` is solved by bisection on its subgradient.

use super::{DistError, Histogram, Pmf};

#[derive(Clone, Copy, Default)]
struct Node {
    left: u32,
    right: u32,
    size: f64,
}

/// Persistent segment tree over value ranks (descending), one version per
/// prefix of items.
struct RankTree {
    nodes: Vec<Node>,
    roots: Vec<u32>,
    width: usize,
}

impl RankTree {
    fn build(ranks: &[usize], sizes: &[f64], width: usize) -> Self {
        let mut t = RankTree {
            nodes: vec![Node::default()],
            roots: Vec::with_capacity(ranks.len() + 1),
            width,
        };
        t.roots.push(0);
        for (&r, &s) in ranks.iter().zip(sizes) {
            let prev = *t.roots.last().unwrap();
            let root = t.insert(prev, 0, width, r, s);
            t.roots.push(root);
        }
        t
    }

    fn insert(&mut self, prev: u32, lo: usize, hi: usize, rank: usize, size: f64) -> u32 {
        let mut node = self.nodes[prev as usize];
        node.size += size;
        if hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if rank < mid {
                node.left = self.insert(node.left, lo, mid, rank, size);
            } else {
                node.right = self.insert(node.right, mid, hi, rank, size);
            }
        }
        self.nodes.push(node);
        (self.nodes.len() - 1) as u32
    }

    /// Largest rank `p` such that the items of `l..r` with rank `< p` weigh
    /// at most `target`.
    fn split_rank(&self, l: usize, r: usize, target: f64) -> usize {
        let (mut a, mut b) = (self.roots[r] as usize, self.roots[l] as usize);
        let (mut lo, mut hi) = (0, self.width);
        let mut acc = 0.0;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            let (na, nb) = (self.nodes[a], self.nodes[b]);
            let left = self.nodes[na.left as usize].size - self.nodes[nb.left as usize].size;
            if acc + left <= target {
                acc += left;
                a = na.right as usize;
                b = nb.right as usize;
                lo = mid;
            } else {
                a = na.left as usize;
                b = nb.left as usize;
                hi = mid;
            }
        }
        lo
    }
}

struct Problem<'a> {
    w: &'a [f64],
    s: &'a [f64],
    prefix_s: Vec<f64>,
    distinct: Vec<f64>,
    tree: RankTree,
}

struct Inner {
    levels: Vec<f64>,
    overlap: f64,
    mass: f64,
}

impl<'a> Problem<'a> {
    fn new(w: &'a [f64], s: &'a [f64]) -> Self {
        let d: Vec<f64> = w.iter().zip(s).map(|(w, s)| w / s).collect();
        let mut distinct = d.clone();
        distinct.sort_by(|a, b| b.partial_cmp(a).unwrap());
        distinct.dedup();
        let ranks: Vec<usize> = d
            .iter()
            .map(|v| distinct.partition_point(|x| x > v))
            .collect();
        let mut prefix_s = Vec::with_capacity(s.len() + 1);
        prefix_s.push(0.0);
        for &x in s {
            prefix_s.push(prefix_s.last().unwrap() + x);
        }
        let tree = RankTree::build(&ranks, s, distinct.len());
        Problem {
            w,
            s,
            prefix_s,
            distinct,
            tree,
        }
    }

    fn block_level(&self, l: usize, r: usize, mu: f64) -> f64 {
        let total = self.prefix_s[r] - self.prefix_s[l];
        self.distinct[self.tree.split_rank(l, r, mu * total)]
    }

    fn solve_inner(&self, mu: f64) -> Inner {
        let mut stack: Vec<(usize, usize, f64)> = Vec::new();
        for k in 0..self.w.len() {
            let mut top = (k, k + 1, self.block_level(k, k + 1, mu));
            while let Some(&below) = stack.last() {
                if top.2 > below.2 {
                    stack.pop();
                    top = (below.0, top.1, self.block_level(below.0, top.1, mu));
                } else {
                    break;
                }
            }
            stack.push(top);
        }
        let mut levels = vec![0.0; self.w.len()];
        let (mut overlap, mut mass) = (0.0, 0.0);
        for &(l, r, v) in &stack {
            for k in l..r {
                levels[k] = v;
                overlap += self.w[k].min(self.s[k] * v);
                mass += self.s[k] * v;
            }
        }
        Inner {
            levels,
            overlap,
            mass,
        }
    }
}

/// Result of projecting masses onto monotone step functions.
#[derive(Debug, Clone)]
pub struct MonotoneFit {
    /// `sum |w_k - s_k v_k|` at the optimum.
    pub l1: f64,
    /// Optimal per-element levels `v`, non-increasing with `sum s_k v_k = 1`.
    pub levels: Vec<f64>,
}

/// Nearest non-increasing step function of total mass 1 in l1.
///
/// `w[k]` is the target mass of item `k` and `s[k] > 0` its size. The masses
/// need not sum to 1.
pub fn monotone_fit(w: &[f64], s: &[f64]) -> MonotoneFit {
    assert_eq!(w.len(), s.len());
    assert!(!w.is_empty());
    let total: f64 = w.iter().sum();
    let p = Problem::new(w, s);
    let lagrangian = |x: &Inner, mu: f64| mu + x.overlap - mu * x.mass;

    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut at_lo = p.solve_inner(lo);
    let mut at_hi = p.solve_inner(hi);
    if at_lo.mass > 1.0 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let x = p.solve_inner(mid);
            if x.mass > 1.0 {
                lo = mid;
                at_lo = x;
            } else {
                hi = mid;
                at_hi = x;
            }
        }
    } else {
        hi = 0.0;
        at_hi = p.solve_inner(0.0);
    }
    let best = lagrangian(&at_lo, lo).min(lagrangian(&at_hi, hi));
    let l1 = (total + 1.0 - 2.0 * best).max(0.0);

    // primal: mix the two bracketing solutions to hit mass 1
    let mut levels = if at_lo.mass > at_hi.mass && at_hi.mass <= 1.0 && at_lo.mass >= 1.0 {
        let lam = (1.0 - at_hi.mass) / (at_lo.mass - at_hi.mass);
        at_lo
            .levels
            .iter()
            .zip(&at_hi.levels)
            .map(|(a, b)| lam * a + (1.0 - lam) * b)
            .collect()
    } else {
        at_hi.levels
    };
    let mass: f64 = levels.iter().zip(s).map(|(v, s)| v * s).sum();
    if mass < 1.0 {
        levels[0] += (1.0 - mass) / s[0];
    } else if mass > 1.0 {
        for v in levels.iter_mut() {
            *v /= mass;
        }
    }
    MonotoneFit { l1, levels }
}

/// Exact total variation distance from `d` to the non-increasing pmfs.
pub fn distance_to_monotone_exact(d: &Pmf) -> f64 {
    if d.is_monotone() {
        return 0.0;
    }
    let s = vec![1.0; d.len()];
    (0.5 * monotone_fit(d.weights(), &s).l1).clamp(0.0, 1.0)
}

/// Distance from a histogram to the monotone pmfs, in `len()` variables.
///
/// An optimal comparator can be taken flat on the same blocks, so this
/// equals [`distance_to_monotone_exact`] of the expanded pmf.
pub fn distance_to_monotone_flat(h: &Histogram) -> f64 {
    let s: Vec<f64> = h.partition().sizes().map(|x| x as f64).collect();
    (0.5 * monotone_fit(h.block_weights(), &s).l1).clamp(0.0, 1.0)
}

/// The monotone histogram closest in l1 to block masses `w` on `part`.
pub fn nearest_monotone_histogram(
    w: &[f64],
    part: &super::Partition,
) -> Result<Histogram, DistError> {
    let s: Vec<f64> = part.sizes().map(|x| x as f64).collect();
    let fit = monotone_fit(w, &s);
    let masses: Vec<f64> = fit.levels.iter().zip(&s).map(|(v, s)| v * s).collect();
    let total: f64 = masses.iter().sum();
    Histogram::new(part.clone(), masses.into_iter().map(|m| m / total).collect())
}

#[cfg(test)]
mod tests {
    use super::super::lp::monotone_fit_lp;
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn two_point_example() {
        let d = Pmf::new(vec![0.2, 0.8]).unwrap();
        assert!((distance_to_monotone_exact(&d) - 0.3).abs() < 1e-12);
    }

    #[test]
    fn monotone_is_zero() {
        let d = Pmf::new(vec![0.4, 0.3, 0.2, 0.1]).unwrap();
        assert!(distance_to_monotone_exact(&d) < 1e-12);
        assert!(distance_to_monotone_exact(&Pmf::uniform(1000).unwrap()) < 1e-12);
    }

    #[test]
    fn increasing_point_mass() {
        let mut w = vec![0.0; 10];
        w[9] = 1.0;
        let d = Pmf::new(w).unwrap();
        // best comparator is uniform on [10]
        assert!((distance_to_monotone_exact(&d) - 0.9).abs() < 1e-12);
    }

    #[test]
    fn agrees_with_simplex() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for trial in 0..200 {
            let n = rng.random_range(1..=30);
            let sizes: Vec<f64> = (0..n).map(|_| rng.random_range(1..5) as f64).collect();
            let mut w: Vec<f64> = (0..n)
                .map(|_| if rng.random_bool(0.2) { 0.0 } else { rng.random::<f64>() })
                .collect();
            let scale = if trial % 3 == 0 { 0.7 } else { 1.0 };
            let t: f64 = w.iter().sum::<f64>().max(1e-9);
            w.iter_mut().for_each(|x| *x *= scale / t);
            let fit = monotone_fit(&w, &sizes);
            let (lp, _) = monotone_fit_lp(&w, &sizes).unwrap();
            assert!((fit.l1 - lp).abs() < 1e-9, "trial {trial}: {} vs {lp}", fit.l1);
            // primal is feasible and attains the value
            let mass: f64 = fit.levels.iter().zip(&sizes).map(|(v, s)| v * s).sum();
            assert!((mass - 1.0).abs() < 1e-9);
            assert!(fit.levels.windows(2).all(|p| p[1] <= p[0] + 1e-12));
            let obj: f64 = w
                .iter()
                .zip(&sizes)
                .zip(&fit.levels)
                .map(|((w, s), v)| (w - s * v).abs())
                .sum();
            assert!((obj - lp).abs() < 1e-8, "trial {trial}: primal {obj} vs {lp}");
        }
    }
}
