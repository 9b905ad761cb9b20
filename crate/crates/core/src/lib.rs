//! Deployment planning for ceiling-mounted radio-stripe transmitters that
//! wirelessly power indoor energy hotspots.
//!
//! The library covers the full pipeline:
//!
//! - [`scene`]: rooms, hotspots and element placement for polygon, line and
//!   the two central benchmark arrays;
//! - [`channel`]: the near-field line-of-sight channel model and the
//!   Fresnel/Fraunhofer boundary distances;
//! - [`precoding`]: MRT beams, exact received power and the closed-form
//!   max-min power split;
//! - [`gp`]: posynomial algebra, AM-GM condensation, a log-domain
//!   interior-point solve and the successive trust-region loop;
//! - [`deploy`]: the polygon and line deployment optimizers;
//! - [`eval`]: paired Monte Carlo evaluation, sweeps, near-field reports and
//!   the brute-force grid oracle.
//!
//! All numerics are generic over [`scalar::Scalar`] (`f32` or `f64`);
//! concrete `f64` aliases for the main types live at the crate root.

// Guards are written `!(x > 0)` so NaN fails validation like any other
// out-of-domain value.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod deploy;
pub mod error;
pub mod eval;
pub mod gp;
pub mod precoding;
pub mod scalar;
pub mod scene;

pub use error::{Error, Result};
pub use scalar::{Scalar, SPEED_OF_LIGHT};

/// `f64` aliases for the common types.
pub type Scenario64 = scene::Scenario<f64>;
pub type Hotspot64 = scene::Hotspot<f64>;
pub type Deployment64 = scene::Deployment<f64>;
pub type ChannelVector64 = channel::ChannelVector<f64>;
pub type DeploymentSolution64 = deploy::DeploymentSolution<f64>;
pub type EvalResult64 = eval::EvalResult<f64>;

/// `f32` aliases for the common types.
pub type Scenario32 = scene::Scenario<f32>;
pub type Hotspot32 = scene::Hotspot<f32>;
pub type Deployment32 = scene::Deployment<f32>;
pub type ChannelVector32 = channel::ChannelVector<f32>;
