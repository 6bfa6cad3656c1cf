//! Exact continued-fraction and inhomogeneous Diophantine approximation toolkit.

pub mod cf;
pub mod error;
pub mod exact;
pub mod experiments;
mod fixed;
pub mod inhom;
pub mod lacunary;

pub use error::{Error, Result};
pub use exact::{Comparison, ExactReal, Threshold};

/// Convergent table over arbitrary-precision integers.
pub type Convergents = cf::ConvergentTable<num_bigint::BigInt>;
pub use experiments::FourierEstimate;
