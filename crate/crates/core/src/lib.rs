pub mod bergman;
pub mod bounds;
pub mod cli;
pub mod beurling;
pub mod conformal;
pub mod error;
pub mod geometry;
pub mod layerpot;
pub mod pipeline;
pub mod quadrature;
pub mod spectrum;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
