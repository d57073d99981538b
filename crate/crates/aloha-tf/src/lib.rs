//! Throughput-fairness tradeoff of finite-user slotted Aloha on the
//! collision channel, over the saturated-queue (worst-case service rate)
//! feasible region.
//!
//! The crate computes, for a target sum throughput `theta`:
//!
//! - the maximum Jain fairness and its optimal contention control
//!   ([`jain::jain_optimal_point`], curves via [`jain::jain_curve`]);
//! - the maximum alpha-fair (isoelastic, `alpha >= 1`) sum utility
//!   ([`alpha::alpha_optimal_point`]) together with the convex/concave
//!   inflection threshold of the curve ([`alpha::inflection_threshold`]);
//! - under either a throughput equality or inequality constraint.
//!
//! Optimal controls take at most two distinct nonzero values, so solvers
//! reduce to a monotone one-dimensional constraint solve ([`solver`]).
//! Everything analytic is cross-checkable against a brute-force grid oracle
//! and a slot-level channel simulator ([`verify`]).
//!
//! Grid sweeps run on rayon when the `parallel` feature (default) is
//! enabled and fall back to sequential loops otherwise; results are
//! identical either way.

pub mod alpha;
mod error;
mod exec;
pub mod grid;
pub mod jain;
pub mod model;
mod rng;
pub mod solver;
pub mod verify;

pub use error::{Error, Result};
pub use exec::ExecMode;
