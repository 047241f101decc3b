//! Exact symbolic engine for generalized complex geometry on polynomial
//! coordinate charts: Clifford and Courant calculus on `T + T*`, pure
//! spinors, Poisson modules, the distributional Serre local model and the
//! induced structure on projective line bundles.

#![allow(clippy::needless_range_loop)]

pub mod coeffs;
pub mod error;
pub mod forms;
pub mod gcs;
pub mod gtangent;
pub mod linalg;
pub mod pbundle;
pub mod poismod;
pub mod sample;
pub mod serre;
pub mod verdict;

pub use error::{Error, Result};
pub use verdict::Verdict;
