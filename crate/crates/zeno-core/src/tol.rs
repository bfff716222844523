//! Tolerance constants used across the engine and its tests.

/// Tolerance for end-to-end assertions (probability conservation, oracle
/// equivalence, overlap constancy).
pub const ASSERT: f64 = 1e-12;

/// Tolerance for single-step algebra (one rotation or absorption).
pub const STEP: f64 = 1e-15;

/// Tolerance for the weak-value sum rule.
pub const WEAK_SUM: f64 = 1e-10;

/// Tolerance for pointer-density normalization on the default grid.
pub const DENSITY_NORM: f64 = 1e-6;

/// Amplitudes below this magnitude are treated as protocol-exact zeros for
/// post-selection purposes. The threshold sits far above the cos(pi/2)
/// rounding floor (~6e-17) that exact-zero outcomes leave behind in floating
/// point, and far below any attainable amplitude at desk-scale (M, N <= 50).
pub const POST_SELECTION_AMP: f64 = 1e-14;

/// Probability floor for conditioning events; `POST_SELECTION_AMP` squared.
pub const CONDITIONING_PROB: f64 = 1e-28;
