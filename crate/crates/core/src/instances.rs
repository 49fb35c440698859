//! Benchmark and adversarial distributions with certified distances to
//! monotonicity.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distcore::{distance_to_monotone_exact, mirror, oblivious_partition, DistError, Pmf};

#[derive(Debug, Error, PartialEq)]
pub enum InstanceError {
    #[error("infeasible geometry: {0}")]
    Infeasible(String),
    #[error("unknown instance family `{0}`")]
    UnknownFamily(String),
    #[error("family `{0}` needs parameter `{1}`")]
    MissingParam(&'static str, &'static str),
    #[error(transparent)]
    Dist(#[from] DistError),
}

pub fn gen_uniform(n: usize) -> Result<Pmf, InstanceError> {
    Ok(Pmf::uniform(n)?)
}

/// Sorted-descending normalized uniform random weights.
pub fn gen_random_monotone(n: usize, seed: u64) -> Result<Pmf, InstanceError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w: Vec<f64> = (0..n).map(|_| rng.random::<f64>() + 1e-12).collect();
    w.sort_by(|a, b| b.total_cmp(a));
    Ok(Pmf::from_masses(w)?)
}

/// Monotone histogram on `I_alpha`: every element of block `k` carries a
/// value proportional to `(1+alpha)^(-2k)`.
pub fn gen_staircase(n: usize, alpha: f64) -> Result<Pmf, InstanceError> {
    let part = oblivious_partition(n, alpha)?;
    let mut w = Vec::with_capacity(n);
    for k in 0..part.len() {
        let v = (1.0 + alpha).powi(-2 * k as i32);
        w.extend(std::iter::repeat(v).take(part.size(k)));
    }
    Ok(Pmf::from_masses(w)?)
}

/// `(d, mirror(d))`.
pub fn gen_mirror_pair(d: &Pmf) -> (Pmf, Pmf) {
    (d.clone(), mirror(d))
}

/// `kappa = 4 / (1 - 2 eps)`.
pub fn eval_lb_kappa(eps: f64) -> f64 {
    4.0 / (1.0 - 2.0 * eps)
}

fn floor_tol(x: f64) -> usize {
    (x + 1e-9).floor() as usize
}

/// Band boundaries `(m, b1, b2, b3)` of the two-hump instance.
pub fn eval_lb_bands(eps: f64, m: usize) -> (usize, usize, usize, usize) {
    let ke = eval_lb_kappa(eps) * eps;
    let m_f = m as f64;
    (
        m,
        floor_tol((1.0 + ke / 2.0) * m_f),
        floor_tol((1.0 + ke) * m_f),
        floor_tol((2.0 + ke) * m_f),
    )
}

/// Largest `m` with `(2 + kappa eps) m <= n` for which the band boundaries
/// are exact, falling back to the largest feasible `m`.
pub fn eval_lb_default_m(n: usize, eps: f64) -> Option<usize> {
    let ke = eval_lb_kappa(eps) * eps;
    let top = floor_tol(n as f64 / (2.0 + ke));
    if top == 0 {
        return None;
    }
    let near = |x: f64| (x - x.round()).abs() < 1e-6;
    (1..=top)
        .rev()
        .find(|&m| near(ke * m as f64 / 2.0) && near(ke * m as f64))
        .or(Some(top))
}

/// The pair `(D1, D2)`: `D1` uniform on the first `floor((2 + kappa eps) m)`
/// points, `D2` the four-band histogram at distance `eps` from monotone.
pub fn gen_eval_lb_pair(n: usize, eps: f64, m: usize) -> Result<(Pmf, Pmf), InstanceError> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(InstanceError::Infeasible(format!("eps must lie in (0, 1/2), got {eps}")));
    }
    let (m, b1, b2, b3) = eval_lb_bands(eps, m);
    if m == 0 || b3 > n || !(m < b1 && b1 < b2 && b2 < b3) {
        return Err(InstanceError::Infeasible(format!("bands ({m}, {b1}, {b2}, {b3}) do not fit n = {n}")));
    }
    let mut d1 = vec![0.0; n];
    d1[..b3].fill(1.0 / b3 as f64);
    let mut d2 = vec![0.0; n];
    d2[..m].fill((0.5 - eps) / m as f64);
    d2[b1..b2].fill(2.0 * eps / (b2 - b1) as f64);
    d2[b2..b3].fill((0.5 - eps) / (b3 - b2) as f64);
    Ok((Pmf::from_masses(d1)?, Pmf::from_masses(d2)?))
}

/// `beta = 2L / (2L - 1)`, which makes the raised sequence sum to one.
pub fn harpeled_beta(l: usize) -> f64 {
    let l = l as f64;
    2.0 * l / (2.0 * l - 1.0)
}

/// Block `i = 1..=L` holds `L^i` copies of `beta / (2 L^(i+1))`; the values
/// are non-increasing and sum to `beta / 2`.
pub fn harpeled_base_sequence(l: usize) -> Result<Vec<f64>, InstanceError> {
    if l < 2 {
        return Err(InstanceError::Infeasible(format!("L must be at least 2, got {l}")));
    }
    let beta = harpeled_beta(l);
    let mut seq = Vec::new();
    let mut size = 1usize;
    for _ in 1..=l {
        size = size
            .checked_mul(l)
            .ok_or_else(|| InstanceError::Infeasible("sequence too long".into()))?;
        seq.extend(std::iter::repeat(beta / (2.0 * l as f64 * size as f64)).take(size));
    }
    Ok(seq)
}

/// The base sequence with block `j` (1-based) raised to the value of block
/// `j-1`; it sums to exactly one.
pub fn harpeled_raised_sequence(l: usize, j: usize) -> Result<Vec<f64>, InstanceError> {
    let mut seq = harpeled_base_sequence(l)?;
    if !(1..=l).contains(&j) {
        return Err(InstanceError::Infeasible(format!("block {j} outside 1..={l}")));
    }
    let start: usize = (1..j as u32).map(|i| l.pow(i)).sum();
    let raised = harpeled_beta(l) / (2.0 * l as f64 * l.pow(j as u32 - 1) as f64);
    seq[start..start + l.pow(j as u32)].fill(raised);
    Ok(seq)
}

/// Length `sum L^i` of the base sequence.
pub fn harpeled_len(l: usize) -> usize {
    (1..=l as u32).map(|i| l.pow(i)).sum()
}

/// Distribution instance on `n >= sum L^i` points (zero-padded).
///
/// `modified` raises a random block `j` to the level of block `j-1`, giving
/// a monotone pmf. Otherwise the missing `1 - beta/2` mass sits at a hidden
/// position in the second half of the sequence.
pub fn gen_harpeled_instance(l: usize, modified: bool, seed: u64, n: usize) -> Result<Pmf, InstanceError> {
    let mut seq = harpeled_base_sequence(l)?;
    let len = seq.len();
    if n < len {
        return Err(InstanceError::Infeasible(format!("n = {n} is below the sequence length {len}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if modified {
        seq = harpeled_raised_sequence(l, rng.random_range(1..=l))?;
    } else {
        let beta = harpeled_beta(l);
        let k = rng.random_range(len / 2..len);
        seq[k] += 1.0 - beta / 2.0;
    }
    seq.resize(n, 0.0);
    Ok(Pmf::from_masses(seq)?)
}

/// `(1 - eps) * random_monotone + eps * delta_k` for a random `k` in the
/// second half.
pub fn gen_perturbed_monotone(n: usize, eps: f64, seed: u64) -> Result<Pmf, InstanceError> {
    if !(0.0..1.0).contains(&eps) {
        return Err(InstanceError::Infeasible(format!("eps must lie in [0, 1), got {eps}")));
    }
    let base = gen_random_monotone(n, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let k = rng.random_range(n / 2..n);
    let mut w: Vec<f64> = base.weights().iter().map(|x| (1.0 - eps) * x).collect();
    w[k] += eps;
    Ok(Pmf::from_masses(w)?)
}

/// A named instance family with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    Uniform,
    RandomMonotone { seed: u64 },
    Staircase { alpha: f64 },
    MirroredStaircase { alpha: f64 },
    EvalLbD1 { eps: f64, m: Option<usize> },
    EvalLbD2 { eps: f64, m: Option<usize> },
    Harpeled { l: usize, modified: bool, seed: u64 },
    PerturbedMonotone { eps: f64, seed: u64 },
}

/// Loosely typed family parameters, as given on a command line.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FamilyParams {
    pub eps: Option<f64>,
    pub alpha: Option<f64>,
    pub m: Option<usize>,
    pub l: Option<usize>,
    pub modified: bool,
    pub seed: u64,
}

impl Family {
    pub const NAMES: [&'static str; 8] = [
        "uniform",
        "random_monotone",
        "staircase",
        "mirrored_staircase",
        "eval_lb_d1",
        "eval_lb_d2",
        "harpeled",
        "perturbed_monotone",
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Family::Uniform => "uniform",
            Family::RandomMonotone { .. } => "random_monotone",
            Family::Staircase { .. } => "staircase",
            Family::MirroredStaircase { .. } => "mirrored_staircase",
            Family::EvalLbD1 { .. } => "eval_lb_d1",
            Family::EvalLbD2 { .. } => "eval_lb_d2",
            Family::Harpeled { .. } => "harpeled",
            Family::PerturbedMonotone { .. } => "perturbed_monotone",
        }
    }

    pub fn from_name(name: &str, p: &FamilyParams) -> Result<Self, InstanceError> {
        let need_eps = |f| p.eps.ok_or(InstanceError::MissingParam(f, "eps"));
        Ok(match name {
            "uniform" => Family::Uniform,
            "random_monotone" => Family::RandomMonotone { seed: p.seed },
            "staircase" => Family::Staircase {
                alpha: p.alpha.unwrap_or(0.1),
            },
            "mirrored_staircase" => Family::MirroredStaircase {
                alpha: p.alpha.unwrap_or(0.1),
            },
            "eval_lb_d1" => Family::EvalLbD1 {
                eps: need_eps("eval_lb_d1")?,
                m: p.m,
            },
            "eval_lb_d2" => Family::EvalLbD2 {
                eps: need_eps("eval_lb_d2")?,
                m: p.m,
            },
            "harpeled" => Family::Harpeled {
                l: p.l.ok_or(InstanceError::MissingParam("harpeled", "l"))?,
                modified: p.modified,
                seed: p.seed,
            },
            "perturbed_monotone" => Family::PerturbedMonotone {
                eps: need_eps("perturbed_monotone")?,
                seed: p.seed,
            },
            other => return Err(InstanceError::UnknownFamily(other.to_string())),
        })
    }
}

/// An instance: family, domain size, and optionally its exact distance to
/// monotone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceSpec {
    #[serde(flatten)]
    pub family: Family,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certified: Option<f64>,
}

impl InstanceSpec {
    pub fn new(family: Family, n: usize) -> Self {
        InstanceSpec {
            family,
            n,
            certified: None,
        }
    }

    pub fn generate(&self) -> Result<Pmf, InstanceError> {
        let n = self.n;
        let lb_m = |eps: f64, m: Option<usize>| {
            m.or_else(|| eval_lb_default_m(n, eps))
                .ok_or_else(|| InstanceError::Infeasible(format!("no band width fits n = {n}")))
        };
        match self.family {
            Family::Uniform => gen_uniform(n),
            Family::RandomMonotone { seed } => gen_random_monotone(n, seed),
            Family::Staircase { alpha } => gen_staircase(n, alpha),
            Family::MirroredStaircase { alpha } => Ok(mirror(&gen_staircase(n, alpha)?)),
            Family::EvalLbD1 { eps, m } => Ok(gen_eval_lb_pair(n, eps, lb_m(eps, m)?)?.0),
            Family::EvalLbD2 { eps, m } => Ok(gen_eval_lb_pair(n, eps, lb_m(eps, m)?)?.1),
            Family::Harpeled { l, modified, seed } => gen_harpeled_instance(l, modified, seed, n),
            Family::PerturbedMonotone { eps, seed } => gen_perturbed_monotone(n, eps, seed),
        }
    }

    /// Generates the instance and records its exact distance to monotone.
    pub fn certify(&mut self) -> Result<(Pmf, f64), InstanceError> {
        let d = self.generate()?;
        let dist = distance_to_monotone_exact(&d);
        self.certified = Some(dist);
        Ok((d, dist))
    }
}
