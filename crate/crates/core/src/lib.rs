//! SPPS solver: eigenvalues and solutions of
//! `(p u′)′ + q u = λ r u` from power series in λ.
//!
//! The crate is `no_std` + `alloc`; file formats and the command line live
//! in the `spps` companion crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod catalog;
pub mod error;
pub mod expr;
pub mod grid;
pub mod precision;
pub mod problem;
pub mod quadrature;
pub mod spectral;
pub mod spps;

pub use error::{Error, Result};
