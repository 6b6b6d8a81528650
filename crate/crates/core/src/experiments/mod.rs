//! Ensembles, domination classification, parameter scans, Lyapunov checks,
//! plots and the verification suite.

pub mod domination;
pub mod ensemble;
pub mod lyapunov;
pub mod ode;
pub mod plot;
pub mod scan;
pub mod verify;

pub use domination::{classify_domination, Domination, DominationRule};
pub use ensemble::{quantile, run_ensemble, wilson_interval, Engine, EnsembleResult, Frequency, Interval, Z95};
pub use lyapunov::{
    check_descent, flow_run, lyapunov_monitor, DescentBound, DescentCheck, FlowRun, LyapunovParams, LyapunovReport,
    S2Choice,
};
pub use scan::{linspace, phase_scan, stepped, Boundary, BoundaryCause, PhaseScan, ScanPoint};
pub use verify::{default_suite, suite_passed, CheckResult};
