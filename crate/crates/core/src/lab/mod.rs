//! Maximal multiplier operators over dilation sets, the square functional
//! that dominates them, H-space norms and the experiment drivers.

mod experiments;
mod operators;
mod weights;

pub use operators::{
    apply_dilated_multiplier, dilation_times, maximal_function, square_functional, sup_over_times, Histogram,
    MaximalOutput, SquareFunctional, PATH_HOELDER,
};
pub use weights::{HBlock, HWeights, PathResolution};
pub use experiments::{
    h_norm_experiment, halfwave_convergence, halfwave_evolve, halfwave_experiment, kappa_estimate, lemma31_ratio,
    log_samples, maximal_experiment, mm_linf_h_norm, operator_norm_probe, run_experiment, sigma2_sup,
    ExperimentConfig, ExperimentKind, ExperimentReport, ExperimentResult, FProfile, GridSpec, HNormReport,
    HalfwaveReport, Lemma31Level, Lemma31Report, MaximalReport, ProbeReport, Table, TimeSchedule, EXCLUSION,
    H_NORM_CONSTANT, MAXIMAL_INCREMENT, RATE_SLACK, REFINEMENT_TOLERANCE,
};
