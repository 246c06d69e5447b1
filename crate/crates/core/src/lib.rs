//! Numerically erasure-robust frame (NERF) certificates for random Gaussian
//! frames, and the Monte Carlo machinery to check them.
//!
//! - [`bounds`]: closed-form tail bounds, the constants `c`, `C`, `L` and the
//!   certificate pipeline.
//! - [`random`]: seeded Gaussian matrices and their extremal singular values.
//! - [`erasure`]: worst-case condition numbers over column subsets.

pub mod bounds;
pub mod erasure;
pub mod error;
pub mod field;
pub mod random;

pub use error::{Error, Result};
pub use field::{ConstantConvention, Field};
