//! Kinetic traffic flow with velocity alignment and interaction, its
//! regularized approximation, and the pressureless Euler limit.
//!
//! The phase space `(x, v) ∈ [x_min, x_max] × [0, V_max]` is discretized by
//! cell averages. [`solver`] advances the kinetic equation, [`euler`] solves
//! the limiting pressureless system, and [`metrics`] measures the distance
//! between the two.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod diagnostics;
pub mod error;
pub mod euler;
pub mod experiments;
pub mod grid;
pub mod init;
pub mod io;
pub mod metrics;
pub mod moments;
pub mod mollifier;
pub mod operators;
pub mod solver;

pub use error::{Error, Result};
pub use grid::{DistributionState, PhaseGrid, XBoundary};
