//! Randomized building blocks shared by the testers.

mod compare;
mod flattening;
mod identity;
mod learn;
mod uniformity;

pub use compare::{classify, compare, compare_pair, CompareOutcome, CompareParams};
pub use flattening::{
    cond_outer_samples, cumulative_budget, cumulative_samples, estimate_dist_to_flattening_cond,
    estimate_dist_to_flattening_cumulative,
};
pub use identity::{
    estimate_tv_to_known_eval, harmonic_points, harmonic_proposal, harmonic_tv_estimate, has_point_access,
    identity_points, point_value,
};
pub use learn::{learn_monotone_eval, learner_histogram, learner_points, LearnError};
pub use uniformity::{
    collision_accepts, collision_samples, collision_statistic, decider_pairs, descent_depth, descent_draws,
    intcond_point_ratio, near_uniform_decider, uniformity_distance, Biased, DeciderModel, DistanceEstimate,
    UniformityDistance, Whitebox,
};
