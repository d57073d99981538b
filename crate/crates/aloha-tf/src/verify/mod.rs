//! Independent ground truth for the analytic solvers: a brute-force grid
//! oracle over control space, a majorization probe, and a slot-level
//! collision-channel simulator.

pub mod majorize;
pub mod oracle;
pub mod sim;

pub use majorize::{majorization_probe, MajorizationReport};
pub use oracle::{default_band, default_resolution, oracle_optimum, oracle_optimum_with, OracleResult};
pub use sim::{simulate_saturated, SimReport};
