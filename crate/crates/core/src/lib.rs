//! Numerical toolkit for parabolic-like maps.

pub mod arc;
pub mod cli;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod fatou;
pub mod germ;
pub mod green;
pub mod instances;
pub mod plm;
pub mod poly;
pub mod region;
pub mod render;
pub mod series;
pub mod straighten;

pub use dynamics::{FixedPointRecord, LocalMap, MapSpec, Point};
pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
