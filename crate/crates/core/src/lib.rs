//! Ergodic capacity of bidirectional amplify-and-forward relay selection when
//! the selector works from outdated, noisy or predicted channel state.
//!
//! The crate has two independent routes to the same quantity:
//!
//! * [`analytic`] evaluates a closed-form lower bound from the distribution of
//!   the selected link gain;
//! * [`montecarlo`] simulates correlated Rayleigh channels ([`channel`]), runs
//!   the selection rule ([`selection`]) and averages the instantaneous
//!   capacity ([`sinr`]).
//!
//! [`validation`] cross-checks the two.

// index loops mirror the matrix algebra; quadrature tables keep their published digits
#![allow(clippy::needless_range_loop, clippy::excessive_precision)]

pub mod analytic;
pub mod channel;
pub mod linalg;
pub mod montecarlo;
pub mod selection;
pub mod sinr;
pub mod specfun;
mod sum;
pub mod validation;

pub use sum::CompensatedSum;
