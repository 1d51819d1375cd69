//! The Bayesian-optimisation loop, the random and grid baselines, and the
//! analyses run on their outputs.

mod analysis;
mod problem;
mod search;

pub use analysis::{
    chunk_evaluations, compare_hv, compare_hv_values, front_of, hv_trajectory, variability_fronts, HvComparison,
    VariabilityFronts, SIGNIFICANCE,
};
pub use problem::{PrivacyOracle, Problem, UtilityOracle};
pub use search::{
    dpareto_run, dpareto_run_resumable, grid_points, grid_search_run, grid_search_run_resumable, random_search_run,
    random_search_run_resumable, uniform_point, DimensionSampler, Distribution, Resume, RunObserver, RunResult,
    SamplingDistribution, SlotRecord, MAX_REJECTIONS,
};
