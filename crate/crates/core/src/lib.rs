//! Waves in three dimensions with nonlinearities concentrated at points.
//!
//! The field is reduced to a delay ODE for the point charges `ζ_j(t)`, driven
//! by the free evolution of the initial data evaluated at the points. Around
//! that core sit the field reconstruction, energy audits, the stationary
//! (resolvent) side and a scalar blow-up analysis.

pub mod blowup;
pub mod cli;
pub mod delayode;
pub mod energy;
mod error;
pub mod field;
pub mod freewave;
pub mod model;
mod newton;
pub mod quadrature;
pub mod resolvent;

pub use error::{Error, Result};
pub use num_complex::Complex64;
