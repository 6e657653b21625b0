//! Gaussian polytopes and their parabolic scaling limit.
//!
//! The crate is organised in five layers:
//!
//! * [`hull`]: d-dimensional convex hulls, face lattices, volumes and cone
//!   solid angles.
//! * [`gauss`]: Gaussian / Poisson samplers, the scaling transform onto the
//!   tangent-height picture, finite-intensity score functionals, Kubota
//!   intrinsic volumes and quasi-paraboloid boundaries.
//! * [`limit`]: the limiting Poisson process with intensity `e^h dh dv`, its
//!   extreme points, the parabolic festoon and the limit score functionals.
//! * [`estimators`]: deterministic replication, variance traces and the three
//!   independent routes to the k-face variance constant.
//! * [`cli`]: configuration, report bundles and the command implementations
//!   behind the `gauss-festoon` binary.

// `!(x > 0.0)`-style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod estimators;
pub mod gauss;
pub mod hull;
pub mod limit;
pub mod linalg;
pub mod rng;

pub use error::{Error, Result};
