//! Numerical and exact verification toolkit for sharp concentration bounds
//! of derivatives in weighted Bergman spaces on the unit disc.

// `!(x > 0.0)` style guards also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bergman;
pub mod concentration;
pub mod error;
pub mod estimate;
pub mod exact;
pub mod poly;
pub mod specfun;
pub mod symmetric;

pub use error::{Error, Result};
pub use estimate::Estimate;
pub use exact::ExactScalar;
