//! Monotonicity testing for distributions on `{0, .., n-1}`.
//!
//! The crate simulates sampling, conditional, evaluation and cumulative
//! oracles over a hidden pmf, implements testers for each access model, and
//! runs seeded experiments that report acceptance rates and query counts.

pub mod constants;
pub mod distcore;
pub mod harness;
pub mod instances;
pub mod oracles;
pub mod subroutines;
pub mod testers;

pub use constants::Constants;
