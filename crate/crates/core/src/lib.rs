//! Polynomial and exponential B-splines of integer and complex order, their
//! Fourier transforms, and self-referential (fractal) extensions defined as fixed
//! points of Read–Bajraktarević operators.
//!
//! Module map:
//!
//! - [`special`]: complex gamma, binomial coefficients, truncated and principal powers
//! - [`bspline`]: B_n and B_z in the time domain
//! - [`expspline`]: E_{N,a} by exact convolution, E_{z,a} by series
//! - [`fourier`]: closed-form transforms and a quadrature oracle
//! - [`selfref`]: partitions, RB operators, fixed points and the fractal families
//! - [`analysis`]: verification studies producing [`analysis::StudyReport`]s

pub mod analysis;
pub mod bspline;
pub mod error;
pub mod expspline;
pub mod family;
pub mod fourier;
pub mod grid;
pub mod quadrature;
pub mod selfref;
pub mod special;

pub use error::{Result, SplineError};
pub use family::Family;
pub use grid::{GridSpec, SampledFunction};
pub use num_complex::Complex64;
