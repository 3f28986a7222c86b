//! Numerical toolkit for Littlewood-Paley square functions with rough
//! kernels: kernel catalog, kernel conditions, Fourier-decay checks,
//! weighted norms, Carleson measures and paraproducts.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod carleson;
pub mod cli;
pub mod conditions;
pub mod error;
pub mod fourier_checks;
pub mod grid;
pub mod harness;
pub mod kernels;
pub mod operators;
pub mod quad;
pub mod weights;

pub use error::{Error, Result};
pub use grid::{Geometry, SampledFunction, SpectralFunction, TimeGrid};
pub use kernels::{Kernel, SphereFunction};
pub use rustfft::num_complex::Complex64;
pub use weights::{Cube, CubeFamily, Weight};
