//! Index of convergence for single and double sequences, and the Lagrange
//! and Shepard operators whose behavior at a jump it describes.

pub mod density;
pub mod error;
pub mod harness;
pub mod lagrange;
pub mod point;
pub mod shepard;
pub mod step;
pub mod zeta;

pub use density::{
    default_checkpoints, density_bounds, index_to_target, sum_rule_check, DensityEstimate, Dilation, Dim,
    IndexReport, IndexSet, Interval, Prediction, SeqWindow, SumRule, Target, Verdict,
};
pub use error::{Error, Result};
pub use harness::{
    generate_window, predict_lagrange_1d, predict_lagrange_2d, predict_shepard_1d, predict_shepard_2d,
    run_index_experiment, run_index_experiment_on, ExperimentOutcome, ExperimentSpec, Operator, PredictionTable,
};
pub use lagrange::{
    cheb_grid, fn_sigma_decomposition, fundamental_weight, lagrange_eval_1d, lagrange_eval_2d,
    lagrange_eval_at_angle, lagrange_eval_c_plus_h, lagrange_step, sigma_n, subsequence_k_m, ChebGrid, EvalAt,
    Jump,
};
pub use point::{AngleSpec, GridPointSpec, NamedIrrational, PointSpec};
pub use shepard::{shepard_eval_1d, shepard_eval_2d, shepard_eval_samples, shepard_weights_1d, ShepardParams};
pub use step::{Abscissa, Convention, Orientation, StepFn1D, StepFn2D};
pub use zeta::{
    g_profile, g_s_profile, hurwitz_zeta, lerch_j1, preimage_measure_1d, preimage_measure_2d, Profile1D,
    Profile2D, ProfileKind, SeriesTolerance,
};
