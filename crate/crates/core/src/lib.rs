//! Numerical laboratory for weighted harmonic Bergman spaces `L²_h(ω)` on the
//! unit disk.
//!
//! The crate builds the basic objects at desk scale (kernels, lattices,
//! truncated Toeplitz matrices, Berezin transforms, Carleson densities) and
//! exposes checks that compare them against closed forms or against each
//! other. All area integrals use the normalized measure `dA = dx dy / pi`.

pub mod acceptance;
pub mod basis;
pub mod carleson;
pub mod dsl;
pub mod error;
pub mod geometry;
pub mod invertibility;
pub mod kernels;
pub mod lattice;
pub mod numeric;
pub mod quadrature;
pub mod symbol;
pub mod toeplitz;
pub mod weights;

pub use error::{Error, Result};
pub use num_complex::Complex64;
