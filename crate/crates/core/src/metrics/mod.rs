//! Scoring functions for solver runs.
//!
//! Absolute metrics ([`par`], [`runtime::normalized_runtime_score`],
//! [`quality::ratio_score`]) depend only on the scored solver's own runs.
//! Relative metrics ([`mznc`], [`runtime::speedup_score`], [`gap`],
//! [`quality::bounded_reward_score`]) also depend on the other solvers of the
//! scenario or on a baseline built from them.
//!
//! Every function here is pure.

pub mod gap;
pub mod mznc;
pub mod par;
pub mod quality;
pub mod runtime;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scenario::{InstanceId, ScenarioError, SolverId};

pub use gap::closed_gap;
pub use mznc::{mznc_pair, mznc_score, mznc_scores};
pub use par::{par_instance, par_score, par_scores, solved_ranking, SolvedEntry};
pub use quality::{area_score, bounded_reward_score, ratio_score, AreaBounds};
pub use runtime::{normalized_runtime_score, speedup_score};

#[derive(Debug, Error, PartialEq)]
pub enum MetricError {
    #[error("PAR penalty must be >= 1, got {0}")]
    BadLambda(f64),
    #[error("time threshold delta must be >= 0, got {0}")]
    BadDelta(f64),
    #[error("bounded reward needs 0 <= alpha <= beta <= 1, got alpha={alpha}, beta={beta}")]
    BadAlphaBeta { alpha: f64, beta: f64 },
    #[error("area bounds need best <= worst, got best={best}, worst={worst}")]
    BadBounds { best: f64, worst: f64 },
    #[error("unknown solver `{0}`")]
    UnknownSolver(SolverId),
    #[error("unknown instance `{0}`")]
    UnknownInstance(InstanceId),
    #[error("a solver cannot be compared with itself (`{0}`)")]
    SameSolver(SolverId),
    #[error("relative scoring needs at least two solvers")]
    SingleSolverScenario,
    #[error("closed gap is undefined: SBS score {m_sbs} does not exceed VBS score {m_vbs}")]
    DegenerateGap { m_sbs: f64, m_vbs: f64 },
    #[error("ratio score needs strictly positive objectives, got {0}")]
    NonPositiveObjective(f64),
    #[error("instance `{0}` is not an optimization instance")]
    NotOptimization(InstanceId),
    #[error("scenario has no optimization instances")]
    NoOptimizationInstances,
    #[error("no trajectory for instance `{instance}`, solver `{solver}` although it found a solution")]
    MissingTrajectory { instance: InstanceId, solver: SolverId },
    #[error("no runtime given for instance `{0}`")]
    MissingTime(InstanceId),
    #[error("`{0}` is not a per-instance, lower-is-better metric and cannot serve as a baseline metric")]
    NonDecomposableMetric(String),
}

impl From<ScenarioError> for MetricError {
    fn from(e: ScenarioError) -> Self {
        match e {
            ScenarioError::UnknownSolver(s) => MetricError::UnknownSolver(s),
            ScenarioError::UnknownInstance(i) => MetricError::UnknownInstance(i),
            other => unreachable!("metric lookups only fail on unknown ids: {other}"),
        }
    }
}

pub(crate) fn check_lambda(lambda: f64) -> Result<(), MetricError> {
    if lambda >= 1.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(MetricError::BadLambda(lambda))
    }
}

pub(crate) fn check_delta(delta: f64) -> Result<(), MetricError> {
    if delta >= 0.0 && !delta.is_nan() {
        Ok(())
    } else {
        Err(MetricError::BadDelta(delta))
    }
}

pub(crate) fn check_alpha_beta(alpha: f64, beta: f64) -> Result<(), MetricError> {
    if 0.0 <= alpha && alpha <= beta && beta <= 1.0 {
        Ok(())
    } else {
        Err(MetricError::BadAlphaBeta { alpha, beta })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    HigherBetter,
    LowerBetter,
}

impl Direction {
    /// True when `a` is a strictly better score than `b`.
    pub fn better(self, a: f64, b: f64) -> bool {
        match self {
            Direction::HigherBetter => a > b,
            Direction::LowerBetter => a < b,
        }
    }
}

/// Per-instance, lower-is-better metric usable to build VBS/SBS baselines
/// and closed gaps.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "snake_case")]
pub enum BaseMetric {
    Par { lambda: f64 },
    Runtime,
    Area,
}

impl Default for BaseMetric {
    fn default() -> Self {
        BaseMetric::Par { lambda: 10.0 }
    }
}

impl BaseMetric {
    pub fn label(&self) -> String {
        match self {
            BaseMetric::Par { lambda } => format!("par{lambda}"),
            BaseMetric::Runtime => "runtime".into(),
            BaseMetric::Area => "area".into(),
        }
    }

    pub fn validate(&self) -> Result<(), MetricError> {
        match self {
            BaseMetric::Par { lambda } => check_lambda(*lambda),
            _ => Ok(()),
        }
    }
}

impl TryFrom<&Metric> for BaseMetric {
    type Error = MetricError;

    fn try_from(m: &Metric) -> Result<Self, MetricError> {
        match m {
            Metric::Par { lambda } => Ok(BaseMetric::Par { lambda: *lambda }),
            Metric::Area => Ok(BaseMetric::Area),
            other => Err(MetricError::NonDecomposableMetric(other.id().into())),
        }
    }
}

/// Every metric the toolkit can compute, with its parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "snake_case")]
pub enum Metric {
    /// Penalized average runtime.
    Par { lambda: f64 },
    /// Number of solved instances (ties broken on PAR1 by [`solved_ranking`]).
    Solved,
    /// MiniZinc-challenge Borda score with time-equivalence threshold.
    Mznc { delta: f64 },
    NormalizedRuntime,
    /// Mean ratio of VBS runtime to the solver's runtime.
    Speedup,
    ClosedGap { base: BaseMetric },
    Ratio,
    Area,
    BoundedReward { alpha: f64, beta: f64 },
}

impl Metric {
    pub fn id(&self) -> &'static str {
        match self {
            Metric::Par { .. } => "par",
            Metric::Solved => "solved",
            Metric::Mznc { .. } => "mznc",
            Metric::NormalizedRuntime => "norm-runtime",
            Metric::Speedup => "speedup",
            Metric::ClosedGap { .. } => "closed-gap",
            Metric::Ratio => "ratio",
            Metric::Area => "area",
            Metric::BoundedReward { .. } => "bounded-reward",
        }
    }

    pub fn params(&self) -> BTreeMap<String, ParamValue> {
        let mut p = BTreeMap::new();
        match self {
            Metric::Par { lambda } => {
                p.insert("lambda".into(), ParamValue::Number(*lambda));
            }
            Metric::Mznc { delta } => {
                p.insert("delta".into(), ParamValue::Number(*delta));
            }
            Metric::ClosedGap { base } => {
                p.insert("base_metric".into(), ParamValue::Text(base.label()));
            }
            Metric::BoundedReward { alpha, beta } => {
                p.insert("alpha".into(), ParamValue::Number(*alpha));
                p.insert("beta".into(), ParamValue::Number(*beta));
            }
            _ => {}
        }
        p
    }

    pub fn direction(&self) -> Direction {
        match self {
            Metric::Par { .. } | Metric::Area => Direction::LowerBetter,
            _ => Direction::HigherBetter,
        }
    }

    /// Whether the metric compares a solver against other solvers or baselines.
    pub fn is_relative(&self) -> bool {
        matches!(
            self,
            Metric::Mznc { .. } | Metric::Speedup | Metric::ClosedGap { .. } | Metric::BoundedReward { .. }
        )
    }

    pub fn validate(&self) -> Result<(), MetricError> {
        match self {
            Metric::Par { lambda } => check_lambda(*lambda),
            Metric::Mznc { delta } => check_delta(*delta),
            Metric::ClosedGap { base } => base.validate(),
            Metric::BoundedReward { alpha, beta } => check_alpha_beta(*alpha, *beta),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())?;
        let params = self.params();
        if !params.is_empty() {
            let parts: Vec<String> = params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            write!(f, "({})", parts.join(","))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Number(f64),
    Text(String),
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Number(x) => write!(f, "{x}"),
            ParamValue::Text(s) => f.write_str(s),
        }
    }
}

/// Metric values per solver, optionally with the per-instance values they
/// aggregate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoreTable {
    pub metric_id: String,
    pub params: BTreeMap<String, ParamValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_instance: Option<BTreeMap<SolverId, BTreeMap<InstanceId, f64>>>,
    pub per_solver: BTreeMap<SolverId, f64>,
    pub direction: Direction,
}

impl ScoreTable {
    pub fn new(metric: &Metric) -> Self {
        Self {
            metric_id: metric.id().into(),
            params: metric.params(),
            per_instance: None,
            per_solver: BTreeMap::new(),
            direction: metric.direction(),
        }
    }

    pub fn same_metric(&self, other: &ScoreTable) -> bool {
        self.metric_id == other.metric_id && self.params == other.params
    }

    pub fn score(&self, solver: &SolverId) -> Option<f64> {
        self.per_solver.get(solver).copied()
    }
}
