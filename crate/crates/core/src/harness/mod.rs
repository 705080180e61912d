//! Trace format, generator, brute-force oracle, replay pipeline and CSV output.

pub mod brute;
pub mod generate;
pub mod replay;
pub mod report;
pub mod trace;

pub use brute::brute_force_opt;
pub use generate::{generate, GenParams};
pub use replay::{replay, Mode, Pipeline, ReplayOptions, StepMetrics, Verdict};
pub use trace::{parse_trace, Event, EventTrace, Op};
