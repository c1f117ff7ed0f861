//! Projective-invariant metrics on convex domains and numerical estimates of
//! the projective squeezing function.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod directions;
pub mod domains;
pub mod error;
pub mod experiments;
pub mod metrics;
pub mod projective;
pub mod rng;
pub mod squeezing;

pub use domains::Body;
pub use error::{Error, Result};
pub use projective::{AffinePoint, HomogeneousPoint, ProjectiveMap, TangentVector};
