//! Runtime-based scores normalized to `[0, 1]`.

use std::collections::BTreeMap;

use super::{Metric, MetricError, ScoreTable};
use crate::scenario::{InstanceId, Scenario, SolverId};

/// `1 - mean(time / timeout)`; higher is better.
pub fn normalized_runtime_score(scenario: &Scenario, solver: &SolverId) -> Result<f64, MetricError> {
    let s = scenario.require_solver(solver)?;
    Ok(normalized_runtime(scenario, s))
}

fn normalized_runtime(scenario: &Scenario, s: usize) -> f64 {
    let tau = scenario.timeout_s();
    let sum: f64 = scenario.solver_outcomes(s).map(|o| o.time_s / tau).sum();
    1.0 - sum / scenario.n_instances() as f64
}

pub fn normalized_runtime_scores(scenario: &Scenario) -> ScoreTable {
    let tau = scenario.timeout_s();
    let mut table = ScoreTable::new(&Metric::NormalizedRuntime);
    let mut per_instance = BTreeMap::new();
    for (s, solver) in scenario.solvers().iter().enumerate() {
        let row = scenario
            .instances()
            .iter()
            .zip(scenario.solver_outcomes(s))
            .map(|(inst, o)| (inst.id.clone(), 1.0 - o.time_s / tau))
            .collect();
        per_instance.insert(solver.clone(), row);
        table.per_solver.insert(solver.clone(), normalized_runtime(scenario, s));
    }
    table.per_instance = Some(per_instance);
    table
}

fn time_ratio(vbs: f64, solver: f64) -> f64 {
    if vbs == 0.0 && solver == 0.0 {
        1.0
    } else {
        vbs / solver
    }
}

/// Mean over instances of `vbs_time / solver_time`, with `0/0` counted as 1.
pub fn speedup_score(
    scenario: &Scenario,
    solver_times: &BTreeMap<InstanceId, f64>,
    vbs_times: &BTreeMap<InstanceId, f64>,
) -> Result<f64, MetricError> {
    let mut sum = 0.0;
    for inst in scenario.instances() {
        let t = *solver_times.get(&inst.id).ok_or_else(|| MetricError::MissingTime(inst.id.clone()))?;
        let v = *vbs_times.get(&inst.id).ok_or_else(|| MetricError::MissingTime(inst.id.clone()))?;
        sum += time_ratio(v, t);
    }
    Ok(sum / scenario.n_instances() as f64)
}

/// Speedup of every solver of `scenario` against the given VBS runtimes.
pub fn speedup_scores(scenario: &Scenario, vbs_times: &BTreeMap<InstanceId, f64>) -> Result<ScoreTable, MetricError> {
    let mut table = ScoreTable::new(&Metric::Speedup);
    let mut per_instance = BTreeMap::new();
    for (s, solver) in scenario.solvers().iter().enumerate() {
        let mut row = BTreeMap::new();
        for (inst, o) in scenario.instances().iter().zip(scenario.solver_outcomes(s)) {
            let v = *vbs_times.get(&inst.id).ok_or_else(|| MetricError::MissingTime(inst.id.clone()))?;
            row.insert(inst.id.clone(), time_ratio(v, o.time_s));
        }
        let times: BTreeMap<_, _> =
            scenario.instances().iter().zip(scenario.solver_outcomes(s)).map(|(i, o)| (i.id.clone(), o.time_s)).collect();
        table.per_solver.insert(solver.clone(), speedup_score(scenario, &times, vbs_times)?);
        per_instance.insert(solver.clone(), row);
    }
    table.per_instance = Some(per_instance);
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::par_score;
    use crate::scenario::{validate_scenario, Instance, RawScenario, RunOutcome};

    fn scenario(times: &[&[Option<f64>]]) -> Scenario {
        let tau = 100.0;
        let n = times[0].len();
        let mut raw = RawScenario {
            id: "t".into(),
            instances: (0..n).map(|i| Instance::decision(format!("i{i}"))).collect(),
            solvers: (0..times.len()).map(|s| SolverId(format!("s{s}"))).collect(),
            timeout_s: tau,
            ..Default::default()
        };
        for (s, row) in times.iter().enumerate() {
            for (i, t) in row.iter().enumerate() {
                raw.outcomes.push((
                    format!("i{i}").into(),
                    format!("s{s}").into(),
                    t.map_or(RunOutcome::timeout(tau), RunOutcome::solved),
                ));
            }
        }
        validate_scenario(raw).unwrap()
    }

    #[test]
    fn normalized_runtime_examples() {
        let sc = scenario(&[&[None, None], &[Some(0.0), Some(0.0)], &[Some(50.0), None]]);
        assert_eq!(normalized_runtime_score(&sc, &"s0".into()), Ok(0.0));
        assert_eq!(normalized_runtime_score(&sc, &"s1".into()), Ok(1.0));
        assert_eq!(normalized_runtime_score(&sc, &"s2".into()), Ok(0.25));
        let par1 = par_score(&sc, &"s2".into(), 1.0).unwrap();
        assert_eq!(normalized_runtime_score(&sc, &"s2".into()).unwrap(), 1.0 - par1 / 100.0);
    }

    fn times(v: &[f64]) -> BTreeMap<InstanceId, f64> {
        v.iter().enumerate().map(|(i, t)| (InstanceId(format!("i{i}")), *t)).collect()
    }

    #[test]
    fn speedup_examples() {
        let sc = scenario(&[&[Some(1.0), Some(1.0)]]);
        assert_eq!(speedup_score(&sc, &times(&[10.0, 100.0]), &times(&[10.0, 100.0])), Ok(1.0));
        assert_eq!(speedup_score(&sc, &times(&[20.0, 100.0]), &times(&[10.0, 100.0])), Ok(0.75));
        assert_eq!(speedup_score(&sc, &times(&[0.0, 100.0]), &times(&[0.0, 100.0])), Ok(1.0));
        assert_eq!(
            speedup_score(&sc, &times(&[1.0]), &times(&[1.0, 1.0])),
            Err(MetricError::MissingTime("i1".into()))
        );
    }
}
