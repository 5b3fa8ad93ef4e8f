//! Floating-point realizations and numerical checks: decompositions, ball
//! volumes, limits of subalgebras, and Schwartz seminorms.

mod decomp;
mod limit;
mod realization;
mod seminorms;
mod volume;

pub use decomp::{iwasawa, op_norm, polar_coordinate, Iwasawa};
pub use limit::{
    grassmann_distance, limit_subalgebra, numerical_rank, sphericality_check, sphericality_check_with,
    subalgebra_limit_scan, unimodularity_check, LimitRow,
};
pub use realization::{realization, realization_names, HKind, Mat, MatrixRealization};
pub use seminorms::{comparison_constant, p_seminorm, q_seminorm, schwartz_seminorms, Profile, Seminorms};
pub use volume::{
    ball_volume, fit_slope, growth_scan, in_translated_ball, sup_weight, translate_radius, weights_at, BallSpec,
    GrowthScan, ScanRow, VolumeEstimate, WeightSample, MIN_SAMPLES,
};
