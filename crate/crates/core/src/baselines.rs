//! Virtual best solver (VBS) and single best solver (SBS) baselines.
//!
//! Both are defined over a per-instance, lower-is-better [`BaseMetric`].
//! The VBS takes the per-instance minimum over the solver pool; the SBS is
//! the pool member with the lowest summed value over a policy-dependent
//! instance set.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::quality::area_values;
use crate::metrics::{par_instance, BaseMetric, MetricError};
use crate::scenario::{InstanceId, Scenario, ScenarioError, SolverId};

/// Gap ratio below which a baseline report warns that the closed gap has
/// little resolution.
pub const DEFAULT_GAP_WARNING: f64 = 0.01;

#[derive(Debug, Error, PartialEq)]
pub enum BaselineError {
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("SBS policy `{0}` needs a train/test split")]
    MissingFoldContext(SbsPolicy),
    #[error("unknown instance `{0}` in fold context")]
    UnknownInstance(InstanceId),
    #[error("instance set for SBS selection is empty")]
    EmptySelectionSet,
}

impl From<ScenarioError> for BaselineError {
    fn from(e: ScenarioError) -> Self {
        match e {
            ScenarioError::UnknownInstance(i) => BaselineError::UnknownInstance(i),
            ScenarioError::EmptyRestriction => BaselineError::EmptySelectionSet,
            other => BaselineError::Metric(other.into()),
        }
    }
}

/// Which instances the SBS is selected on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SbsPolicy {
    TrainSplit,
    TestSplit,
    FullDataset,
}

impl SbsPolicy {
    /// Train split when folds are in play, full dataset otherwise.
    pub fn default_for(has_folds: bool) -> Self {
        if has_folds {
            SbsPolicy::TrainSplit
        } else {
            SbsPolicy::FullDataset
        }
    }

    pub fn needs_folds(self) -> bool {
        self != SbsPolicy::FullDataset
    }
}

impl std::fmt::Display for SbsPolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SbsPolicy::TrainSplit => "train_split",
            SbsPolicy::TestSplit => "test_split",
            SbsPolicy::FullDataset => "full_dataset",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoldContext {
    pub train: Vec<InstanceId>,
    pub test: Vec<InstanceId>,
}

/// Per-instance values of `base` for solver position `s`, keyed by instance
/// position. Area values only exist for optimization instances.
pub fn base_values(scenario: &Scenario, base: &BaseMetric, s: usize) -> Result<Vec<(usize, f64)>, MetricError> {
    base.validate()?;
    let tau = scenario.timeout_s();
    match *base {
        BaseMetric::Par { lambda } => scenario
            .solver_outcomes(s)
            .enumerate()
            .map(|(i, o)| par_instance(o, lambda, tau).map(|v| (i, v)))
            .collect(),
        BaseMetric::Runtime => Ok(scenario.solver_outcomes(s).map(|o| o.time_s).enumerate().collect()),
        BaseMetric::Area => area_values(scenario, s),
    }
}

/// Sum of `base` over the scenario for one solver.
pub fn base_total(scenario: &Scenario, base: &BaseMetric, solver: &SolverId) -> Result<f64, MetricError> {
    let s = scenario.require_solver(solver)?;
    Ok(base_values(scenario, base, s)?.iter().map(|(_, v)| v).sum())
}

/// Per-instance minimum of `base` over the scenario's solvers.
pub fn vbs_values(scenario: &Scenario, base: &BaseMetric) -> Result<BTreeMap<InstanceId, f64>, MetricError> {
    let mut best: BTreeMap<usize, f64> = BTreeMap::new();
    for s in 0..scenario.n_solvers() {
        for (i, v) in base_values(scenario, base, s)? {
            best.entry(i).and_modify(|b| *b = b.min(v)).or_insert(v);
        }
    }
    Ok(best.into_iter().map(|(i, v)| (scenario.instances()[i].id.clone(), v)).collect())
}

fn argmin_total(scenario: &Scenario, base: &BaseMetric) -> Result<(SolverId, f64), MetricError> {
    let mut best: Option<(SolverId, f64)> = None;
    for (s, solver) in scenario.solvers().iter().enumerate() {
        let total: f64 = base_values(scenario, base, s)?.iter().map(|(_, v)| v).sum();
        let replace = match &best {
            None => true,
            Some((id, b)) => total < *b || (total == *b && solver < id),
        };
        if replace {
            best = Some((solver.clone(), total));
        }
    }
    Ok(best.expect("scenarios have at least one solver"))
}

fn selection_set(policy: SbsPolicy, fold: Option<&FoldContext>) -> Result<Option<&[InstanceId]>, BaselineError> {
    match (policy, fold) {
        (SbsPolicy::FullDataset, _) => Ok(None),
        (p, None) => Err(BaselineError::MissingFoldContext(p)),
        (SbsPolicy::TrainSplit, Some(f)) => Ok(Some(&f.train)),
        (SbsPolicy::TestSplit, Some(f)) => Ok(Some(&f.test)),
    }
}

/// Solver with the lowest summed base metric over the policy's instance set;
/// ties go to the lexicographically smallest id.
pub fn select_sbs(
    scenario: &Scenario,
    base: &BaseMetric,
    policy: SbsPolicy,
    fold: Option<&FoldContext>,
) -> Result<SolverId, BaselineError> {
    let pick = match selection_set(policy, fold)? {
        None => argmin_total(scenario, base)?,
        Some(ids) => argmin_total(&scenario.restrict(ids)?, base)?,
    };
    Ok(pick.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaselineReport {
    pub vbs_per_instance: BTreeMap<InstanceId, f64>,
    pub sbs_id: SolverId,
    pub sbs_policy: SbsPolicy,
    pub base_metric_id: String,
    pub m_vbs: f64,
    pub m_sbs: f64,
    /// `(m_sbs - m_vbs) / m_sbs`; 0 when `m_sbs` is 0.
    pub gap_ratio: f64,
    pub low_resolution: bool,
}

impl BaselineReport {
    pub fn warning(&self) -> Option<String> {
        self.low_resolution.then(|| {
            format!(
                "SBS `{}` is within {:.4}% of the VBS under {}; closed gap values are strongly magnified",
                self.sbs_id,
                100.0 * self.gap_ratio,
                self.base_metric_id
            )
        })
    }
}

/// VBS and SBS totals on the evaluation set: the test split when `fold` is
/// given, the whole scenario otherwise.
pub fn baseline_report(
    scenario: &Scenario,
    base: &BaseMetric,
    policy: SbsPolicy,
    fold: Option<&FoldContext>,
    gap_warning: f64,
) -> Result<BaselineReport, BaselineError> {
    let sbs_id = select_sbs(scenario, base, policy, fold)?;
    let eval = match fold {
        Some(f) => scenario.restrict(&f.test)?,
        None => scenario.clone(),
    };
    let vbs_per_instance = vbs_values(&eval, base)?;
    let m_vbs: f64 = vbs_per_instance.values().sum();
    let m_sbs = base_total(&eval, base, &sbs_id)?;
    let gap_ratio = if m_sbs == 0.0 { 0.0 } else { (m_sbs - m_vbs) / m_sbs };
    Ok(BaselineReport {
        vbs_per_instance,
        sbs_id,
        sbs_policy: policy,
        base_metric_id: base.label(),
        m_vbs,
        m_sbs,
        gap_ratio,
        low_resolution: gap_ratio < gap_warning,
    })
}
