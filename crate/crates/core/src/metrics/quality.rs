//! Solution-quality scores for optimization instances.

use std::collections::BTreeMap;

use super::{check_alpha_beta, Metric, MetricError, ScoreTable};
use crate::scenario::{Instance, RunOutcome, Scenario, Trajectory};

fn require_optimization(instance: &Instance) -> Result<(), MetricError> {
    if instance.is_optimization() {
        Ok(())
    } else {
        Err(MetricError::NotOptimization(instance.id.clone()))
    }
}

/// `best_known / obj`, or 0 without a solution. `best_known` is `None` when
/// no solver found any solution, in which case everybody scores 0.
pub fn ratio_score(instance: &Instance, best_known: Option<f64>, outcome: &RunOutcome) -> Result<f64, MetricError> {
    require_optimization(instance)?;
    let Some(best) = best_known else { return Ok(0.0) };
    if !outcome.obj.is_finite() {
        return Ok(0.0);
    }
    if best <= 0.0 {
        return Err(MetricError::NonPositiveObjective(best));
    }
    if outcome.obj <= 0.0 {
        return Err(MetricError::NonPositiveObjective(outcome.obj));
    }
    Ok((best / outcome.obj).min(1.0))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AreaBounds {
    pub best: f64,
    pub worst: f64,
}

/// Normalized area under the incumbent-quality step function; lower is better.
///
/// The step function is 1 before the first solution, the incumbent's
/// position between `best` (0) and `worst` (1) afterwards, and 0 once
/// optimality is proven. `None` stands for a run without any solution.
pub fn area_score(
    instance: &Instance,
    trajectory: Option<&Trajectory>,
    bounds: AreaBounds,
    timeout_s: f64,
) -> Result<f64, MetricError> {
    require_optimization(instance)?;
    if !(bounds.best <= bounds.worst) {
        return Err(MetricError::BadBounds { best: bounds.best, worst: bounds.worst });
    }
    let Some(traj) = trajectory else { return Ok(1.0) };
    let width = bounds.worst - bounds.best;
    let level = |obj: f64| {
        if width > 0.0 {
            ((obj - bounds.best) / width).clamp(0.0, 1.0)
        } else if obj <= bounds.best {
            0.0
        } else {
            1.0
        }
    };
    let end = traj.proved_optimal_at.map_or(timeout_s, |p| p.min(timeout_s));
    let mut area = 0.0;
    let mut prev = 0.0;
    let mut u = 1.0;
    for e in &traj.events {
        let t = e.t_s.min(end);
        area += u * (t - prev);
        prev = t;
        u = level(e.obj);
    }
    area += u * (end - prev);
    Ok(area / timeout_s)
}

/// Reward in `{0} ∪ [alpha, beta] ∪ {1}`: 1 for a solved run, 0 without a
/// solution, otherwise the objective scaled linearly so the pool's best
/// value maps to `beta` and its worst to `alpha`.
///
/// On decision instances this reduces to 1 for solved runs and 0 otherwise.
pub fn bounded_reward_score(
    instance: &Instance,
    outcome: &RunOutcome,
    pool_best: f64,
    pool_worst: f64,
    alpha: f64,
    beta: f64,
) -> Result<f64, MetricError> {
    check_alpha_beta(alpha, beta)?;
    if outcome.status.is_solved() {
        return Ok(1.0);
    }
    if !instance.is_optimization() || !outcome.obj.is_finite() {
        return Ok(0.0);
    }
    if !(pool_best <= pool_worst) {
        return Err(MetricError::BadBounds { best: pool_best, worst: pool_worst });
    }
    if pool_best == pool_worst {
        return Ok(beta);
    }
    let frac = ((pool_worst - outcome.obj) / (pool_worst - pool_best)).clamp(0.0, 1.0);
    Ok(alpha + (beta - alpha) * frac)
}

fn optimization_indices(scenario: &Scenario) -> Result<Vec<usize>, MetricError> {
    let idx: Vec<usize> = (0..scenario.n_instances()).filter(|&i| scenario.instances()[i].is_optimization()).collect();
    if idx.is_empty() {
        Err(MetricError::NoOptimizationInstances)
    } else {
        Ok(idx)
    }
}

fn finite_objs(scenario: &Scenario, i: usize) -> impl Iterator<Item = f64> + '_ {
    (0..scenario.n_solvers()).map(move |s| scenario.outcome_at(i, s).obj).filter(|o| o.is_finite())
}

fn sum_table(metric: &Metric, per_instance: BTreeMap<crate::SolverId, BTreeMap<crate::InstanceId, f64>>) -> ScoreTable {
    let mut table = ScoreTable::new(metric);
    for (solver, row) in &per_instance {
        table.per_solver.insert(solver.clone(), row.values().sum());
    }
    table.per_instance = Some(per_instance);
    table
}

/// Ratio score summed over the optimization instances.
pub fn ratio_scores(scenario: &Scenario) -> Result<ScoreTable, MetricError> {
    let opt = optimization_indices(scenario)?;
    let mut per_instance = BTreeMap::new();
    for (s, solver) in scenario.solvers().iter().enumerate() {
        let mut row = BTreeMap::new();
        for &i in &opt {
            let inst = &scenario.instances()[i];
            row.insert(inst.id.clone(), ratio_score(inst, scenario.resolved_best_known(i), scenario.outcome_at(i, s))?);
        }
        per_instance.insert(solver.clone(), row);
    }
    Ok(sum_table(&Metric::Ratio, per_instance))
}

/// Area bounds for one optimization instance: best known value and worst
/// value ever reported by any solver. `None` if nobody found a solution.
pub fn instance_area_bounds(scenario: &Scenario, i: usize) -> Option<AreaBounds> {
    let best = scenario.resolved_best_known(i)?;
    let reported = (0..scenario.n_solvers())
        .filter_map(|s| scenario.trajectory_at(i, s))
        .flat_map(|t| t.events.iter().map(|e| e.obj));
    let worst = finite_objs(scenario, i).chain(reported).fold(best, f64::max);
    Some(AreaBounds { best, worst })
}

/// Per-instance area scores of one solver over the optimization instances.
pub fn area_values(scenario: &Scenario, s: usize) -> Result<Vec<(usize, f64)>, MetricError> {
    let mut out = Vec::new();
    for i in optimization_indices(scenario)? {
        let inst = &scenario.instances()[i];
        let Some(bounds) = instance_area_bounds(scenario, i) else {
            out.push((i, 0.0));
            continue;
        };
        let traj = scenario.trajectory_at(i, s);
        if traj.is_none() && scenario.outcome_at(i, s).has_solution() {
            return Err(MetricError::MissingTrajectory {
                instance: inst.id.clone(),
                solver: scenario.solvers()[s].clone(),
            });
        }
        out.push((i, area_score(inst, traj, bounds, scenario.timeout_s())?));
    }
    Ok(out)
}

/// Area score summed over the optimization instances.
pub fn area_scores(scenario: &Scenario) -> Result<ScoreTable, MetricError> {
    let mut per_instance = BTreeMap::new();
    for (s, solver) in scenario.solvers().iter().enumerate() {
        let row = area_values(scenario, s)?
            .into_iter()
            .map(|(i, v)| (scenario.instances()[i].id.clone(), v))
            .collect();
        per_instance.insert(solver.clone(), row);
    }
    Ok(sum_table(&Metric::Area, per_instance))
}

/// Bounded reward summed over all instances, with the pool taken from the
/// scenario's solvers.
pub fn bounded_reward_scores(scenario: &Scenario, alpha: f64, beta: f64) -> Result<ScoreTable, MetricError> {
    check_alpha_beta(alpha, beta)?;
    let pools: Vec<(f64, f64)> = (0..scenario.n_instances())
        .map(|i| {
            finite_objs(scenario, i).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), o| (lo.min(o), hi.max(o)))
        })
        .collect();
    let mut per_instance = BTreeMap::new();
    for (s, solver) in scenario.solvers().iter().enumerate() {
        let mut row = BTreeMap::new();
        for (i, inst) in scenario.instances().iter().enumerate() {
            let (lo, hi) = pools[i];
            let o = scenario.outcome_at(i, s);
            // an empty pool only happens when this run has no solution either
            let v = if lo > hi { bounded_reward_score(inst, o, 0.0, 0.0, alpha, beta)? } else {
                bounded_reward_score(inst, o, lo, hi, alpha, beta)?
            };
            row.insert(inst.id.clone(), v);
        }
        per_instance.insert(solver.clone(), row);
    }
    Ok(sum_table(&Metric::BoundedReward { alpha, beta }, per_instance))
}
