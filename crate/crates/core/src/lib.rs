//! Purification of noisy qubit state preparation and measurement (SPAM).
//!
//! Repeated noisy SPAM plus collective CNOTs can push preparation and
//! readout errors to arbitrarily low levels through post-selection. This
//! crate implements the protocol's closed-form recurrences and fixed points
//! (`purify`), the noise resources they assume (`noise`), SPAM-parameter
//! verification from two-qubit statistics (`verify`), and the protocol's two
//! network applications — entanglement distillation and repeater swapping
//! (`netapps`). Every closed form is validated against an independent
//! brute-force density-matrix simulator (`oracle`, `crosscheck`) built on a
//! small dense complex-matrix engine (`qops`).
//!
//! The numeric core is generic over the real scalar type (`f32`/`f64`, see
//! [`scalar::Scalar`]); `*64` aliases below are the defaults used by the CLI
//! and the test suites.

pub mod crosscheck;
mod error;
pub mod netapps;
pub mod noise;
pub mod oracle;
pub mod purify;
pub mod qops;
pub mod scalar;
pub mod verify;

pub use error::{Error, Result};

/// f64 instantiations of the core types.
pub type ComplexMatrix64 = qops::ComplexMatrix<f64>;
pub type DensityMatrix64 = qops::DensityMatrix<f64>;
pub type PovmElement64 = qops::PovmElement<f64>;
pub type SpamParams64 = noise::SpamParams<f64>;
pub type OutcomeDistribution64 = verify::OutcomeDistribution<f64>;
pub type PurificationCurve64 = purify::PurificationCurve<f64>;
pub type DistillationTrace64 = netapps::DistillationTrace<f64>;

/// f32 instantiations, for callers trading precision for footprint.
pub type ComplexMatrix32 = qops::ComplexMatrix<f32>;
pub type DensityMatrix32 = qops::DensityMatrix<f32>;
pub type PovmElement32 = qops::PovmElement<f32>;
pub type SpamParams32 = noise::SpamParams<f32>;
