//! Distributions on `{0, .., n-1}`, the oblivious decomposition, and exact
//! distances to monotonicity and to the exponential property.

mod expprop;
mod histogram;
pub mod lp;
mod monotone;
mod ops;
mod partition;
mod pmf;

use thiserror::Error;

pub use expprop::{
    distance_to_expprop_exact, distance_to_growth_property, fixup, fixup_with, satisfies_expprop,
    satisfies_growth, tau_witnesses, witnesses, GrowthCaps, WitnessReport,
};
pub use histogram::Histogram;
pub use monotone::{
    distance_to_monotone_exact, distance_to_monotone_flat, monotone_fit, nearest_monotone_histogram,
    MonotoneFit,
};
pub use ops::{expand, flatten, mirror, reduce, tv_distance};
pub use partition::{oblivious_partition, ObliviousPartition, Partition};
pub use pmf::{Pmf, NORMALIZE_TOL};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DistError {
    #[error("empty domain")]
    Empty,
    #[error("weight {value} at index {index} is negative or not finite")]
    InvalidWeight { index: usize, value: f64 },
    #[error("weights sum to {0}, not 1")]
    NotNormalized(f64),
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("alpha must lie in (0, 1], got {0}")]
    InvalidAlpha(f64),
    #[error("partition bounds must start at 0 and strictly increase")]
    InvalidPartition,
    #[error("linear program: {0}")]
    Lp(&'static str),
}
