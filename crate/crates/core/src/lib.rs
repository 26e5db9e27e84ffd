//! Finite-volume simulation of two-phase compressible/incompressible flow
//! with a singular congestion pressure and inflow/outflow boundaries.

// `!(x > 0.0)` style guards are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod boundary;
pub mod continuation;
pub mod diagnostics;
pub mod error;
pub mod grid;
pub mod io;
pub mod linalg;
pub mod pressure;
pub mod quadrature;
pub mod run;
pub mod scenario;
pub mod solver;
pub mod validate;

pub use error::{Error, Result};
