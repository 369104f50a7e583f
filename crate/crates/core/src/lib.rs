//! Exact finite models of summation, measure, dyadic analysis, martingales and paths.

pub mod dyadic;
pub mod error;
pub mod json;
pub mod martingale;
pub mod measure;
pub mod norms;
pub mod paths;
pub mod scalar;
pub mod sums;

pub use error::{Error, Result};
pub use norms::{NormDescriptor, NormValue, SeqVector};
pub use scalar::{Exponent, Scalar, Q};
