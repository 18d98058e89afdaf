//! Travelling waves of the generalized Fisher-KPP equation
//! `u_t = (u^{m-1} u_x)_x + u^p − u^q` in the regime `p > q`, `m + q > 0`.
//!
//! * [`model`]: parameters, scaling to canonical form, critical speed.
//! * [`phaseplane`]: reduced planar systems, equilibria, analytic certificates.
//! * [`connect`]: shooting for the heteroclinic connection, wave profiles,
//!   oscillation and finite-propagation diagnostics.
//! * [`pde`]: explicit finite-volume solver used to validate profiles.

// Guards are written as `!(x >= 0.0)` so that NaN is rejected with the bad values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod connect;
pub mod error;
mod math;
pub mod model;
pub mod ode;
pub mod pde;
pub mod phaseplane;

pub use error::{Error, Hypothesis, Result};
