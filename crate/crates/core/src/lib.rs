//! Relative and absolute joint invariants of the planar projective group.
//!
//! PGL(3,ℝ) acts diagonally on ordered configurations of `n` planar points. The
//! crate builds a moving frame for that action, invariantizes functions and the
//! Jacobian multiplier with it, and uses the result in three ways:
//!
//! - [`cocycle`]: the multiplicative bar complex. Multipliers are 1-cocycles, and
//!   every one of them is the coboundary of a gauge factor obtained from the frame.
//! - [`invariants`]: the fundamental absolute invariants `I1_i`, `I2_i` and the
//!   invariantized Jacobian, a relative invariant of weight −1. Any relative
//!   invariant of weight `ω` is `jinv^(−ω) · F(I1, I2)`.
//! - [`image`]: Monte-Carlo estimates of integral invariants of grayscale images
//!   built from those relative invariants.
//!
//! ```
//! use relinv::{invariants, PointConfig, Homography, apply_config};
//!
//! let cfg = PointConfig::from_coords(&[(0.1, 0.2), (0.9, -0.3), (-0.5, 0.8), (0.4, 0.6), (0.2, -0.7)])?;
//! let g = Homography::from_rows([[1.1, 0.2, 0.0], [-0.1, 0.9, 0.3], [0.2, 0.1, 1.0]])?;
//! let before = invariants::fundamental_invariants(&cfg)?;
//! let after = invariants::fundamental_invariants(&apply_config(&g, &cfg)?)?;
//! assert!((before.0[0] - after.0[0]).abs() < 1e-9 * before.0[0].abs());
//! # Ok::<(), relinv::Error>(())
//! ```

pub mod checks;
pub mod cli;
pub mod cocycle;
pub mod error;
pub mod exact;
pub mod expr;
pub mod frame;
pub mod image;
pub mod invariants;
pub mod projective;
pub mod report;
pub mod sampling;

pub use cocycle::Cochain;
pub use error::{Error, Result};
pub use frame::{solve_frame, ExtendedPoint, FrameResult, CROSS_SECTION};
pub use invariants::InvariantVector;
pub use projective::{
    apply_config, apply_homography, delta, jacobian_point, total_jacobian, Homography, MultiplierValue, Point2,
    PointConfig,
};
pub use report::PropertyReport;

/// Seed used whenever none is given.
pub const DEFAULT_SEED: u64 = 0xC0FFEE;
