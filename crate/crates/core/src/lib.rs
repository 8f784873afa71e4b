//! Evaluation of solvers and meta-solvers from recorded run tables.
//!
//! A [`Scenario`] holds instances, solvers, a timeout and one outcome per
//! (instance, solver) pair. [`metrics`] scores solvers on it, [`baselines`]
//! builds VBS and SBS references, [`harness`] runs cross-validated
//! evaluations and diagnostics, [`synthkit`] generates seeded scenarios with
//! brute-force reference scores, and [`io`] reads run tables and writes
//! reports.

pub mod baselines;
pub mod harness;
pub mod io;
pub mod metrics;
pub mod rng;
pub mod scenario;
pub mod synthkit;

pub use baselines::{baseline_report, BaselineError, BaselineReport, SbsPolicy};
pub use harness::{evaluate, EvalConfig, Evaluation, HarnessError};
pub use metrics::{BaseMetric, Metric, MetricError, ScoreTable};
pub use scenario::{
    validate_scenario, Instance, InstanceId, InstanceKind, RawScenario, RunOutcome, RunStatus, Scenario,
    ScenarioError, SolverId, Trajectory, TrajectoryEvent,
};

/// Version string recorded in report provenance.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
