//! Closed forms for the binary erasure and quadratic Gaussian CEO problems.

pub mod erasure;
pub mod gaussian;
pub mod linear_gaussian;

pub use erasure::{
    curve_csv, erasure_bt_counterexample, erasure_curve, erasure_sum_rate, g_function, g_power_shape, g_shape_report,
    noise_info_minimum, CurvePoint, ErasureCounterexample, ErasureParams, ShapeReport,
};
pub use gaussian::{
    gaussian_bt_counterexample, gaussian_counterexample_search, gaussian_min_sum_rate, gaussian_region_contains,
    gaussian_subset_bound, log_plus, oohama_gap, GaussianCounterexample, GaussianParams, GaussianSumRate,
};
