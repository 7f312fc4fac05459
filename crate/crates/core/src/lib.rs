//! Spectral analysis of few-body quantum systems with contact interactions.
//!
//! The crate is `no_std` (with `alloc`) and free of IO. It evaluates the
//! momentum-space exchange kernels of the three-body problem, diagonalizes the
//! homogeneous channel operators by Mellin transform, discretizes them on
//! logarithmic grids, estimates the four-fermion forms by Monte Carlo, and
//! provides the two-body and one-dimensional relativistic reference models.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod approx;
pub mod assembly;
pub mod channels;
pub mod error;
pub mod fourbody;
pub mod kernels;
pub mod quad;
pub mod roots;
pub mod salpeter;
pub mod spectra;

pub use error::{Error, Result};
