//! Named constants behind every sample size and query budget.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConstantError {
    #[error("unknown constant `{0}`")]
    Unknown(String),
    #[error("constant `{0}` must be a positive number, got `{1}`")]
    BadValue(String, String),
}

/// Multipliers for the sample sizes of subroutines and testers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Constants {
    /// Draws per comparison: `c_cmp * K * ln(1/delta) / eta^2`.
    pub c_cmp: f64,
    /// Point pairs per near-uniformity check: `c_u * ln(2/delta) / eps`.
    pub c_u: f64,
    /// Draws per bisection level in the interval point-ratio estimate.
    pub c_bd: f64,
    /// Outer samples of the conditional flattening-distance estimator.
    pub c_z: f64,
    /// Outer samples of the cumulative flattening-distance estimator.
    pub c_cd: f64,
    /// Points of the identity-distance estimator: `c_id * ln(1/delta) / eps^2`.
    pub c_id: f64,
    /// Split limit `c_s * log2(n)^2 / eps` of the bisection testers.
    pub c_s: f64,
    /// Reference samples `c_h * (lmax/eps) * log2(lmax)`.
    pub c_h: f64,
    /// Final histogram samples `c_final * log2(n)^4 / eps^2`.
    pub c_final: f64,
    /// Samples of the exponential-property tester `c_e / (eps * alpha)`.
    pub c_e: f64,
    /// Learning samples of the tolerant tester `c_tol * log2(n) / eps2^3`.
    pub c_tol: f64,
    /// Samples of the sampling-only tester `c_samp * sqrt(n) * log2(n)^2 / eps^4`.
    pub c_samp: f64,
    /// Samples an interval needs before its collision test runs: `c_coll * sqrt(|I|) / eps^2`.
    pub c_coll: f64,
    /// Harmonic evaluation points of the evaluation tester `c_ne * H_n / eps`.
    pub c_ne: f64,
}

impl Default for Constants {
    fn default() -> Self {
        Constants {
            c_cmp: 8.0,
            c_u: 8.0,
            c_bd: 8.0,
            c_z: 16.0,
            c_cd: 4.0,
            c_id: 1.0,
            c_s: 4.0,
            c_h: 2.0,
            c_final: 4.0,
            c_e: 8.0,
            c_tol: 1024.0,
            c_samp: 2.0,
            c_coll: 32.0,
            c_ne: 4.0,
        }
    }
}

impl Constants {
    pub const NAMES: [&'static str; 14] = [
        "c_cmp", "c_u", "c_bd", "c_z", "c_cd", "c_id", "c_s", "c_h", "c_final", "c_e", "c_tol", "c_samp", "c_coll",
        "c_ne",
    ];

    fn slot(&mut self, name: &str) -> Option<&mut f64> {
        Some(match name {
            "c_cmp" => &mut self.c_cmp,
            "c_u" => &mut self.c_u,
            "c_bd" => &mut self.c_bd,
            "c_z" => &mut self.c_z,
            "c_cd" => &mut self.c_cd,
            "c_id" => &mut self.c_id,
            "c_s" => &mut self.c_s,
            "c_h" => &mut self.c_h,
            "c_final" => &mut self.c_final,
            "c_e" => &mut self.c_e,
            "c_tol" => &mut self.c_tol,
            "c_samp" => &mut self.c_samp,
            "c_coll" => &mut self.c_coll,
            "c_ne" => &mut self.c_ne,
            _ => return None,
        })
    }

    /// Overrides one constant by name.
    pub fn set(&mut self, name: &str, value: &str) -> Result<(), ConstantError> {
        let v: f64 = value
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite() && *v > 0.0)
            .ok_or_else(|| ConstantError::BadValue(name.into(), value.into()))?;
        *self.slot(name).ok_or_else(|| ConstantError::Unknown(name.into()))? = v;
        Ok(())
    }
}

/// `ceil(x)` as a count, saturating.
pub(crate) fn count(x: f64) -> u64 {
    if x >= u64::MAX as f64 {
        u64::MAX
    } else {
        x.ceil().max(1.0) as u64
    }
}

pub(crate) fn log2(n: usize) -> f64 {
    (n.max(2) as f64).log2()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_by_name() {
        let mut c = Constants::default();
        c.set("c_s", "16").unwrap();
        assert_eq!(c.c_s, 16.0);
        assert!(matches!(c.set("c_zz", "1"), Err(ConstantError::Unknown(_))));
        assert!(matches!(c.set("c_s", "-1"), Err(ConstantError::BadValue(..))));
        for name in Constants::NAMES {
            c.set(name, "3").unwrap();
        }
    }
}
