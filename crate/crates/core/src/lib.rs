//! Inverse scattering on the half-line.
//!
//! The crate maps between a potential `q(x)` on `[0, ∞)` and its scattering
//! data `{S(k), κ_j, s_j}`: the forward direction through Jost solutions, the
//! inverse direction through the Marchenko equation, and a Riemann-problem
//! route that rebuilds the Jost function from `S` alone.

// `!(x > 0.0)` style checks reject NaN on purpose; the numeric kernels index
// several arrays per loop.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop, clippy::explicit_counter_loop)]

pub mod error;
pub mod model;
pub mod numkit;
pub mod characterize;
pub mod cli;
pub mod forward;
pub mod io;
pub mod marchenko;
pub mod riemann;

pub use error::{Error, Result, Stage};
