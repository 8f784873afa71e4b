//! Evaluation orchestration: cross-validation, aggregation, rankings and the
//! diagnostics used to explain why rankings disagree across metrics.

pub mod aggregate;
pub mod diagnostics;
pub mod evaluate;
pub mod folds;
pub mod rank;

use thiserror::Error;

use crate::baselines::BaselineError;
use crate::metrics::MetricError;
use crate::scenario::{ScenarioError, SolverId};

pub use aggregate::{aggregate, aggregate_tables, default_fold_aggregation, default_scenario_aggregation, AggregationMethod};
pub use diagnostics::{delta_sweep, head_to_head, mznc_flip_point, runtime_distribution, DeltaSweep, HeadToHead};
pub use evaluate::{evaluate, CellResult, EvalConfig, Evaluation};
pub use folds::{make_fold_plan, FoldPlan};
pub use rank::{rank, RankEntry};

#[derive(Debug, Error, PartialEq)]
pub enum HarnessError {
    #[error("k must satisfy 2 <= k <= {n_instances}, got {k}")]
    BadK { k: usize, n_instances: usize },
    #[error("repeats must be >= 1")]
    BadRepeats,
    #[error("cannot aggregate an empty list")]
    EmptyInput,
    #[error("geometric mean needs strictly positive values, got {0}")]
    NonPositiveForGeomean(f64),
    #[error("score tables mix metrics: `{0}` vs `{1}`")]
    MixedMetrics(String, String),
    #[error("solver `{0}` appears in more than one score table")]
    DuplicateSolver(SolverId),
    #[error("metric `{metric}` cannot be evaluated here: {reason}")]
    UnsupportedMetricForFolds { metric: String, reason: String },
    #[error("deltas must be sorted ascending and non-negative")]
    UnsortedDeltas,
    #[error("fold plan does not cover exactly the scenario's instances")]
    FoldPlanMismatch,
    #[error("repeat {repeat}, fold {fold}: {source}")]
    Cell {
        repeat: usize,
        fold: usize,
        #[source]
        source: Box<HarnessError>,
    },
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Baseline(#[from] BaselineError),
}

impl From<ScenarioError> for HarnessError {
    fn from(e: ScenarioError) -> Self {
        HarnessError::Baseline(e.into())
    }
}
