//! Exact scalars: Gaussian rationals, multivariate polynomials in the chart
//! variables and their fraction field.

pub mod chart;
pub mod gaussian;
pub mod gcd;
pub mod poly;
pub mod ratfn;

pub use chart::{Chart, Var};
pub use gaussian::GaussianRational;
pub use gcd::gcd;
pub use poly::{point_to_vars, Exponents, Polynomial};
pub use ratfn::RationalFn;
