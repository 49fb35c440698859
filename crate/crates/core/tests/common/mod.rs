//! Reference computations written independently of the library code.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            if f != 0.0 {
                for c in col..n {
                    a[r][c] -= f * a[col][c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

fn combinations(n: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, f);
            cur.pop();
        }
    }
    go(0, n, k, &mut Vec::new(), f);
}

/// `min_m tv(d, m)` over non-increasing pmfs `m`, by enumerating every
/// vertex of the hyperplane arrangement `{m_i = d_i}`, `{m_i = m_{i+1}}`,
/// `{m_last = 0}` inside `{sum m = 1}`.
///
/// The objective is piecewise linear and convex on a bounded polytope, so
/// its minimum sits at one of these vertices. Practical for `n <= 7`.
pub fn distance_to_monotone_vertices(d: &[f64]) -> f64 {
    let n = d.len();
    let mut planes: Vec<(Vec<f64>, f64)> = Vec::new();
    for i in 0..n {
        let mut row = vec![0.0; n];
        row[i] = 1.0;
        planes.push((row, d[i]));
    }
    for i in 0..n - 1 {
        let mut row = vec![0.0; n];
        row[i] = 1.0;
        row[i + 1] = -1.0;
        planes.push((row, 0.0));
    }
    let mut last = vec![0.0; n];
    last[n - 1] = 1.0;
    planes.push((last, 0.0));
    let mut best = f64::INFINITY;
    combinations(planes.len(), n - 1, &mut |pick| {
        let mut a = vec![vec![1.0; n]];
        let mut b = vec![1.0];
        for &p in pick {
            a.push(planes[p].0.clone());
            b.push(planes[p].1);
        }
        if let Some(m) = solve(a, b) {
            let feasible = m.iter().all(|&x| x >= -1e-12) && m.windows(2).all(|w| w[0] >= w[1] - 1e-12);
            if feasible {
                let v = 0.5 * d.iter().zip(&m).map(|(a, b)| (a - b).abs()).sum::<f64>();
                best = best.min(v);
            }
        }
    });
    best
}

/// Grid search over non-increasing pmfs whose values are multiples of
/// `1/steps`; an upper bound on the distance.
pub fn distance_to_monotone_grid(d: &[f64], steps: usize) -> f64 {
    fn go(d: &[f64], i: usize, left: usize, cap: usize, steps: usize, acc: f64, best: &mut f64) {
        if i == d.len() {
            if left == 0 {
                *best = best.min(acc);
            }
            return;
        }
        for v in 0..=cap.min(left) {
            let x = v as f64 / steps as f64;
            go(d, i + 1, left - v, v, steps, acc + 0.5 * (d[i] - x).abs(), best);
        }
    }
    let mut best = f64::INFINITY;
    go(d, 0, steps, steps, steps, 0.0, &mut best);
    best
}

/// Random pmf with a mix of flat, spiky and sparse shapes.
pub fn random_pmf(r: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut w: Vec<f64> = match r.random_range(0..3) {
        0 => (0..n).map(|_| r.random::<f64>()).collect(),
        1 => (0..n).map(|_| r.random::<f64>().powi(4)).collect(),
        _ => (0..n).map(|_| if r.random_bool(0.4) { 0.0 } else { r.random::<f64>() }).collect(),
    };
    if w.iter().sum::<f64>() == 0.0 {
        w[0] = 1.0;
    }
    let s: f64 = w.iter().sum();
    w.iter().map(|x| x / s).collect()
}

/// Random non-increasing pmf with a random decay profile.
pub fn random_monotone_pmf(r: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let shape = r.random_range(0..4);
    let p: f64 = r.random_range(0.2..3.0);
    let mut w: Vec<f64> = (0..n)
        .map(|i| match shape {
            0 => r.random::<f64>(),
            1 => 1.0 / (i as f64 + 1.0).powf(p),
            2 => (-(i as f64) * p / n as f64 * 10.0).exp(),
            _ => r.random::<f64>().powf(p * 3.0),
        })
        .collect();
    w.sort_by(|a, b| b.total_cmp(a));
    let s: f64 = w.iter().sum();
    w.iter().map(|x| x / s).collect()
}

/// Upper quantile of the chi-square distribution with `k` degrees of
/// freedom (Wilson–Hilferty), `z` standard deviations out.
pub fn chi_square_quantile(k: f64, z: f64) -> f64 {
    let h = 2.0 / (9.0 * k);
    k * (1.0 - h + z * h.sqrt()).powi(3)
}

/// Pearson statistic of observed counts against expected probabilities,
/// pooling cells whose expectation is below 5.
pub fn pearson(counts: &[u64], probs: &[f64]) -> (f64, usize) {
    let total: u64 = counts.iter().sum();
    let (mut stat, mut cells) = (0.0, 0usize);
    let (mut po, mut pe) = (0.0, 0.0);
    for (&c, &p) in counts.iter().zip(probs) {
        po += c as f64;
        pe += p * total as f64;
        if pe >= 5.0 {
            stat += (po - pe).powi(2) / pe;
            cells += 1;
            po = 0.0;
            pe = 0.0;
        }
    }
    if pe > 0.0 {
        stat += (po - pe).powi(2) / pe;
        cells += 1;
    }
    (stat, cells)
}

/// Neumaier-compensated sum.
pub fn exact_sum(xs: &[f64]) -> f64 {
    let (mut s, mut c) = (0.0f64, 0.0f64);
    for &x in xs {
        let t = s + x;
        c += if s.abs() >= x.abs() { (s - t) + x } else { (x - t) + s };
        s = t;
    }
    s + c
}
