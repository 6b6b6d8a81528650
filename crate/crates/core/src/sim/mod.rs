//! Graph-level simulation.

pub mod drift;
pub mod run;
pub mod sampler;
pub mod state;
pub mod statespace;

pub use drift::{additive_flow, drift_from_aggregates, exact_drift, Aggregates, Drift};
pub use run::{run, run_with_rng, Record, TerminalSummary, Trajectory, CSV_HEADER};
pub use sampler::WeightIndex;
pub use state::{InitialGraph, InitialVertex, SimConfig, SimState, StepOutcome};
pub use statespace::AdditiveDomain;
