//! Chained Bell correlations on noisy maximally entangled qubits, checks on
//! non-signalling extensions of the observed statistics, and an LP search for
//! the extension that best predicts a measurement outcome.
//!
//! The numeric core is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix it to `f64`, which is what the CLI and file formats use.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod experiment;
pub mod fmt;
pub mod lp;
pub mod nonlocality;
pub mod quantum;
pub mod scalar;
pub mod table;

pub use error::{Error, Result};
pub use scalar::Scalar;
pub use table::Axis;

pub type ConditionalTable = table::ConditionalTable<f64>;
pub type ComplexMatrix = quantum::ComplexMatrix<f64>;
pub type TwoQubitState = quantum::TwoQubitState<f64>;
pub type ProjectiveQubitMeasurement = quantum::ProjectiveQubitMeasurement<f64>;
pub type ChainedMeasurementFamily = quantum::ChainedMeasurementFamily<f64>;
pub type LinearProgram = lp::LinearProgram<f64>;
pub type DualCertificate = lp::DualCertificate<f64>;
pub type AdversaryResult = lp::AdversaryResult<f64>;
pub type NonsignallingReport = nonlocality::NonsignallingReport<f64>;
pub type FlatteningScheme = nonlocality::FlatteningScheme<f64>;
