//! Finite sections of Hankel and Toeplitz operators over ordered lattices Z^d.
//!
//! The positive cone of a translation-invariant total order on Z^d plays the
//! role of the non-negative integers in the classical theory. This crate
//! assembles truncations of the operators built on such cones, checks their
//! structural identities exactly, and studies their singular values.

pub mod error;
pub mod fourier;
pub mod io;
pub mod nehari;
pub mod operators;
pub mod ordered_group;
pub mod sampling;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;
