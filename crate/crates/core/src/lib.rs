//! Online scheduling on uniform machines with bounded migration.
//!
//! Maintains approximate schedules for makespan minimization and machine
//! covering under job insertions and removals, using exact rational
//! arithmetic throughout. The engine keeps a parameter state `(α, μᵇ, ν)`
//! of a configuration integer program whose lexicographically minimal
//! solution defines the schedule of the slow ("red") machines, while the
//! fast ("blue") machines are filled greedily.

pub mod blue_greedy;
pub mod configurations;
pub mod core;
pub mod engine_cmax;
pub mod engine_cmin;
pub mod error;
pub mod grouping;
pub mod harness;
pub mod legacy;
pub mod lexsolver;
pub mod rounding;

pub use crate::error::{Error, Result};
