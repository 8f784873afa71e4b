//! Scores a scenario under one metric, optionally per cross-validation cell.
//!
//! Each (repeat, fold) cell is scored on its test fold only, with SBS/VBS
//! baselines resolved against that split. Cells are independent and run in
//! parallel; results are collected in cell order and merged by a single
//! reducer, so the outcome does not depend on the thread count.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::aggregate::{aggregate, default_fold_aggregation, AggregationMethod};
use super::folds::FoldPlan;
use super::HarnessError;
use crate::baselines::{
    base_total, baseline_report, vbs_values, BaselineReport, FoldContext, SbsPolicy, DEFAULT_GAP_WARNING,
};
use crate::metrics::quality::{area_scores, bounded_reward_scores, ratio_scores};
use crate::metrics::runtime::{normalized_runtime_scores, speedup_scores};
use crate::metrics::{closed_gap, mznc_scores, par_scores, BaseMetric, Metric, MetricError, ScoreTable};
use crate::scenario::{Scenario, SolverId};

#[derive(Clone, Debug, PartialEq)]
pub struct EvalConfig {
    pub metric: Metric,
    pub fold_plan: Option<FoldPlan>,
    /// Defaults to train split with folds, full dataset without.
    pub sbs_policy: Option<SbsPolicy>,
    /// Solvers to score and rank; all solvers when `None`.
    pub candidates: Option<Vec<SolverId>>,
    /// Solvers the VBS and SBS are built from; all solvers when `None`.
    pub portfolio: Option<Vec<SolverId>>,
    /// How fold values are merged; metric default when `None`.
    pub aggregation: Option<AggregationMethod>,
    pub gap_warning: f64,
}

impl EvalConfig {
    pub fn new(metric: Metric) -> Self {
        Self {
            metric,
            fold_plan: None,
            sbs_policy: None,
            candidates: None,
            portfolio: None,
            aggregation: None,
            gap_warning: DEFAULT_GAP_WARNING,
        }
    }

    pub fn with_folds(mut self, plan: FoldPlan) -> Self {
        self.fold_plan = Some(plan);
        self
    }

    pub fn with_policy(mut self, policy: SbsPolicy) -> Self {
        self.sbs_policy = Some(policy);
        self
    }

    pub fn effective_policy(&self) -> SbsPolicy {
        self.sbs_policy.unwrap_or_else(|| SbsPolicy::default_for(self.fold_plan.is_some()))
    }

    pub fn effective_aggregation(&self) -> AggregationMethod {
        self.aggregation.unwrap_or_else(|| default_fold_aggregation(&self.metric))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub repeat: usize,
    pub fold: usize,
    pub table: ScoreTable,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub baseline: Option<BaselineReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    /// One entry per (repeat, fold); a single entry without a fold plan.
    pub cells: Vec<CellResult>,
    pub merged: ScoreTable,
    pub aggregation: AggregationMethod,
    pub sbs_policy: SbsPolicy,
    pub warnings: Vec<String>,
}

pub fn evaluate(scenario: &Scenario, cfg: &EvalConfig) -> Result<Evaluation, HarnessError> {
    cfg.metric.validate()?;
    let policy = cfg.effective_policy();
    let candidates = match &cfg.candidates {
        Some(c) => c.clone(),
        None => scenario.solvers().to_vec(),
    };
    let pool = match &cfg.portfolio {
        Some(p) => scenario.restrict_solvers(p)?,
        None => scenario.clone(),
    };
    for c in &candidates {
        scenario.require_solver(c)?;
    }

    let aggregation = cfg.effective_aggregation();
    let cells: Vec<CellResult> = match &cfg.fold_plan {
        None => {
            if policy.needs_folds() {
                return Err(crate::baselines::BaselineError::MissingFoldContext(policy).into());
            }
            let (table, baseline) = score_cell(scenario, &pool, None, &candidates, cfg, policy)?;
            vec![CellResult { repeat: 0, fold: 0, table, baseline }]
        }
        Some(plan) => {
            plan.check_covers(scenario)?;
            plan.contexts()
                .into_par_iter()
                .map(|(repeat, fold, ctx)| {
                    score_cell(scenario, &pool, Some(&ctx), &candidates, cfg, policy)
                        .map(|(table, baseline)| CellResult { repeat, fold, table, baseline })
                        .map_err(|e| HarnessError::Cell { repeat, fold, source: Box::new(e) })
                })
                .collect::<Result<_, _>>()?
        }
    };

    let mut warnings = Vec::new();
    for cell in &cells {
        if let Some(w) = cell.baseline.as_ref().and_then(BaselineReport::warning) {
            if cfg.fold_plan.is_some() {
                warnings.push(format!("repeat {}, fold {}: {w}", cell.repeat, cell.fold));
            } else {
                warnings.push(w);
            }
        }
    }

    let merged = if cells.len() == 1 {
        cells[0].table.clone()
    } else {
        let mut merged = cells[0].table.clone();
        merged.per_instance = None;
        merged.per_solver.clear();
        for solver in &candidates {
            let values: Vec<f64> = cells.iter().filter_map(|c| c.table.score(solver)).collect();
            merged.per_solver.insert(solver.clone(), aggregate(&values, aggregation)?);
        }
        merged
    };
    Ok(Evaluation { cells, merged, aggregation, sbs_policy: policy, warnings })
}

fn keep_candidates(mut table: ScoreTable, candidates: &[SolverId]) -> ScoreTable {
    table.per_solver.retain(|s, _| candidates.contains(s));
    if let Some(pi) = table.per_instance.as_mut() {
        pi.retain(|s, _| candidates.contains(s));
    }
    table
}

fn score_cell(
    scenario: &Scenario,
    pool: &Scenario,
    fold: Option<&FoldContext>,
    candidates: &[SolverId],
    cfg: &EvalConfig,
    policy: SbsPolicy,
) -> Result<(ScoreTable, Option<BaselineReport>), HarnessError> {
    let eval = match fold {
        Some(f) => scenario.restrict(&f.test)?,
        None => scenario.clone(),
    };
    let metric = cfg.metric;
    let unsupported = |reason: &str| HarnessError::UnsupportedMetricForFolds {
        metric: metric.id().into(),
        reason: reason.into(),
    };
    let table = match metric {
        Metric::Par { lambda } => keep_candidates(par_scores(&eval, lambda)?, candidates),
        Metric::Solved => keep_candidates(solved_table(&eval), candidates),
        Metric::Mznc { delta } => {
            let contenders = eval.restrict_solvers(candidates)?;
            match mznc_scores(&contenders, delta) {
                Err(MetricError::SingleSolverScenario) => {
                    return Err(unsupported("MZNC needs at least two scored solvers"))
                }
                other => other?,
            }
        }
        Metric::NormalizedRuntime => keep_candidates(normalized_runtime_scores(&eval), candidates),
        Metric::Speedup => {
            let pool_eval = match fold {
                Some(f) => pool.restrict(&f.test)?,
                None => pool.clone(),
            };
            let vbs = vbs_values(&pool_eval, &BaseMetric::Runtime)?;
            keep_candidates(speedup_scores(&eval, &vbs)?, candidates)
        }
        Metric::ClosedGap { base } => {
            if pool.n_solvers() < 2 {
                return Err(unsupported("closed gap needs at least two solvers in the baseline pool"));
            }
            let report = baseline_report(pool, &base, policy, fold, cfg.gap_warning)?;
            let mut table = ScoreTable::new(&metric);
            table.params.insert("sbs_policy".into(), crate::metrics::ParamValue::Text(policy.to_string()));
            for solver in candidates {
                let m = base_total(&eval, &base, solver)?;
                table.per_solver.insert(solver.clone(), closed_gap(m, report.m_sbs, report.m_vbs)?);
            }
            return Ok((table, Some(report)));
        }
        Metric::Ratio => keep_candidates(ratio_scores(&eval)?, candidates),
        Metric::Area => keep_candidates(area_scores(&eval)?, candidates),
        Metric::BoundedReward { alpha, beta } => keep_candidates(bounded_reward_scores(&eval, alpha, beta)?, candidates),
    };
    Ok((table, None))
}

fn solved_table(scenario: &Scenario) -> ScoreTable {
    let mut table = ScoreTable::new(&Metric::Solved);
    let mut per_instance = BTreeMap::new();
    for (s, solver) in scenario.solvers().iter().enumerate() {
        let row: BTreeMap<_, _> = scenario
            .instances()
            .iter()
            .zip(scenario.solver_outcomes(s))
            .map(|(inst, o)| (inst.id.clone(), if o.status.is_solved() { 1.0 } else { 0.0 }))
            .collect();
        table.per_solver.insert(solver.clone(), row.values().sum());
        per_instance.insert(solver.clone(), row);
    }
    table.per_instance = Some(per_instance);
    table
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::folds::make_fold_plan;
    use crate::scenario::{validate_scenario, Instance, RawScenario, RunOutcome};

    const TAU: f64 = 100.0;

    fn scenario(rows: &[(&str, &[Option<f64>])]) -> Scenario {
        let n = rows[0].1.len();
        let mut raw = RawScenario {
            id: "t".into(),
            instances: (0..n).map(|i| Instance::decision(format!("i{i}"))).collect(),
            solvers: rows.iter().map(|(s, _)| SolverId::from(*s)).collect(),
            timeout_s: TAU,
            ..Default::default()
        };
        for (s, times) in rows {
            for (i, t) in times.iter().enumerate() {
                raw.outcomes.push((format!("i{i}").into(), (*s).into(), t.map_or(RunOutcome::timeout(TAU), RunOutcome::solved)));
            }
        }
        validate_scenario(raw).unwrap()
    }

    #[test]
    fn no_plan_is_one_evaluation_over_everything() {
        let sc = scenario(&[("a", &[Some(10.0), None]), ("b", &[Some(20.0), Some(5.0)])]);
        let ev = evaluate(&sc, &EvalConfig::new(Metric::Par { lambda: 10.0 })).unwrap();
        assert_eq!(ev.cells.len(), 1);
        assert_eq!(ev.sbs_policy, SbsPolicy::FullDataset);
        assert_eq!(ev.merged.score(&"a".into()), Some(505.0));
        assert_eq!(ev.merged.score(&"b".into()), Some(12.5));
    }

    #[test]
    fn train_policy_without_folds_is_an_error() {
        let sc = scenario(&[("a", &[Some(10.0)]), ("b", &[Some(20.0)])]);
        let cfg = EvalConfig::new(Metric::ClosedGap { base: BaseMetric::default() }).with_policy(SbsPolicy::TrainSplit);
        assert!(matches!(evaluate(&sc, &cfg), Err(HarnessError::Baseline(_))));
    }

    #[test]
    fn single_solver_relative_metrics_are_unsupported() {
        let sc = scenario(&[("a", &[Some(10.0), None])]);
        for m in [Metric::Mznc { delta: 0.0 }, Metric::ClosedGap { base: BaseMetric::default() }] {
            assert!(matches!(evaluate(&sc, &EvalConfig::new(m)), Err(HarnessError::UnsupportedMetricForFolds { .. })));
        }
    }

    #[test]
    fn plan_must_cover_the_scenario() {
        let sc = scenario(&[("a", &[Some(10.0), None, None]), ("b", &[Some(1.0), Some(2.0), None])]);
        let plan = make_fold_plan(&["i0".into(), "i1".into()], 2, 1, 0).unwrap();
        let cfg = EvalConfig::new(Metric::Par { lambda: 10.0 }).with_folds(plan);
        assert_eq!(evaluate(&sc, &cfg), Err(HarnessError::FoldPlanMismatch));
    }
}
