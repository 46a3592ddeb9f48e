//! Coordinative schedule optimization for tanker vessels and terminals.
//!
//! The pipeline: stay records are parsed ([`ingest`]) or synthesized
//! ([`synth`]), fixedness flags are drawn from the (T, S) flexibility
//! hyper-parameters ([`scenario`]), the two-step compaction heuristic
//! rewrites the schedule ([`heuristic`]), and the weekly rolling-horizon
//! harness aggregates turnaround savings ([`horizon`]). [`oracle`] holds an
//! exhaustive optimizer for tiny instances used to check the heuristic.

pub mod heuristic;
pub mod horizon;
pub mod ingest;
pub mod model;
pub mod oracle;
pub mod scenario;
pub mod synth;
