//! Kinematic rolling (without skidding or spinning) of balls and general
//! surfaces on parametric surfaces.
//!
//! The crate is organised bottom-up:
//!
//! - [`geometry`]: parametric charts, fundamental forms, principal curvatures.
//! - [`curves`]: unit-speed surface curves, Darboux frames, geodesics.
//! - [`rolling`]: anti-development, the rigid-motion family of a rolling and
//!   its angular velocity.
//! - [`experiments`]: the center-speed function of a rolling ball and the
//!   isotropy / constant-mean-curvature tests built on it.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod curves;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod numeric;
pub mod output;
pub mod rolling;

pub use error::{Error, Result};

/// Ambient 3-vector.
pub type Vec3 = nalgebra::Vector3<f64>;
/// Ambient 3x3 matrix.
pub type Mat3 = nalgebra::Matrix3<f64>;
