//! Spectral regularity analysis for indefinite Sturm-Liouville operators
//! -(1/w)((1/r) f')' on (b-, 0) ∪ (0, b+) with weight changing sign at 0.

pub mod catalog;
pub mod classify;
pub mod coeffs;
pub mod eigen;
pub mod error;
pub mod karamata;
pub mod quad;
pub mod report;
pub mod weyl;

pub use error::{Error, Result};
