//! Numerical laboratory for chordal SLE_κ.
//!
//! The crate is split along the lines of the computation:
//!
//! * [`params`] and [`green`] hold the closed-form quantities (derived
//!   exponents, the one-point Green's function, the Φ functional and the
//!   two-point envelope).
//! * [`loewner`] runs the discretized forward Loewner flow: Brownian
//!   driving, exact slit steps, tracked points and tip reconstruction.
//! * [`estimators`] turns independent Loewner paths into Monte Carlo
//!   estimates with confidence intervals.
//! * [`harness`] is the experiment runner behind the `sle-lab` binary.

pub mod error;
pub mod estimators;
pub mod green;
pub mod harness;
pub mod loewner;
pub mod params;
pub mod quadrature;

pub use error::{Result, SleError};
pub use green::HPoint;
pub use params::SleParams;
