//! Penalized average runtime and solved-count ranking.

use std::collections::BTreeMap;

use serde::Serialize;

use super::{check_lambda, Metric, MetricError, ScoreTable};
use crate::scenario::{RunOutcome, Scenario, SolverId};

/// Runtime of a run, or `lambda * timeout` when it did not finish in time.
pub fn par_instance(outcome: &RunOutcome, lambda: f64, timeout_s: f64) -> Result<f64, MetricError> {
    check_lambda(lambda)?;
    Ok(if outcome.time_s < timeout_s { outcome.time_s } else { lambda * timeout_s })
}

pub fn par_score(scenario: &Scenario, solver: &SolverId, lambda: f64) -> Result<f64, MetricError> {
    check_lambda(lambda)?;
    let s = scenario.require_solver(solver)?;
    Ok(par_mean(scenario, s, lambda))
}

fn par_mean(scenario: &Scenario, s: usize, lambda: f64) -> f64 {
    let tau = scenario.timeout_s();
    let total: f64 = scenario
        .solver_outcomes(s)
        .map(|o| if o.time_s < tau { o.time_s } else { lambda * tau })
        .sum();
    total / scenario.n_instances() as f64
}

/// PAR_lambda for every solver, with per-instance penalized runtimes.
pub fn par_scores(scenario: &Scenario, lambda: f64) -> Result<ScoreTable, MetricError> {
    check_lambda(lambda)?;
    let tau = scenario.timeout_s();
    let mut table = ScoreTable::new(&Metric::Par { lambda });
    let mut per_instance = BTreeMap::new();
    for (s, solver) in scenario.solvers().iter().enumerate() {
        let row: BTreeMap<_, _> = scenario
            .instances()
            .iter()
            .zip(scenario.solver_outcomes(s))
            .map(|(inst, o)| (inst.id.clone(), if o.time_s < tau { o.time_s } else { lambda * tau }))
            .collect();
        per_instance.insert(solver.clone(), row);
        table.per_solver.insert(solver.clone(), par_mean(scenario, s, lambda));
    }
    table.per_instance = Some(per_instance);
    Ok(table)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolvedEntry {
    pub solver: SolverId,
    pub solved: usize,
    pub par1: f64,
}

/// Solvers ordered by solved count (descending), then PAR1 (ascending), then id.
pub fn solved_ranking(scenario: &Scenario) -> Vec<SolvedEntry> {
    let mut entries: Vec<SolvedEntry> = scenario
        .solvers()
        .iter()
        .enumerate()
        .map(|(s, solver)| SolvedEntry {
            solver: solver.clone(),
            solved: scenario.solver_outcomes(s).filter(|o| o.status.is_solved()).count(),
            par1: par_mean(scenario, s, 1.0),
        })
        .collect();
    entries.sort_by(|a, b| {
        b.solved
            .cmp(&a.solved)
            .then(a.par1.total_cmp(&b.par1))
            .then_with(|| a.solver.cmp(&b.solver))
    });
    entries
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{validate_scenario, Instance, RawScenario, RunOutcome};

    fn scenario(rows: &[(&str, &[Option<f64>])], tau: f64) -> Scenario {
        let n = rows[0].1.len();
        let mut raw = RawScenario {
            id: "t".into(),
            instances: (0..n).map(|i| Instance::decision(format!("i{i}"))).collect(),
            solvers: rows.iter().map(|(s, _)| SolverId::from(*s)).collect(),
            timeout_s: tau,
            ..Default::default()
        };
        for (s, times) in rows {
            for (i, t) in times.iter().enumerate() {
                let o = t.map_or(RunOutcome::timeout(tau), RunOutcome::solved);
                raw.outcomes.push((format!("i{i}").into(), (*s).into(), o));
            }
        }
        validate_scenario(raw).unwrap()
    }

    #[test]
    fn par_instance_branches() {
        assert_eq!(par_instance(&RunOutcome::solved(50.0), 10.0, 100.0), Ok(50.0));
        assert_eq!(par_instance(&RunOutcome::timeout(100.0), 10.0, 100.0), Ok(1000.0));
        assert_eq!(par_instance(&RunOutcome::timeout(100.0), 1.0, 100.0), Ok(100.0));
        assert_eq!(par_instance(&RunOutcome::error(100.0), 2.0, 100.0), Ok(200.0));
        assert_eq!(par_instance(&RunOutcome::solved(1.0), 0.5, 100.0), Err(MetricError::BadLambda(0.5)));
    }

    #[test]
    fn par_score_examples() {
        let sc = scenario(&[("a", &[Some(50.0), None]), ("b", &[None, None]), ("c", &[Some(7.0), Some(7.0)])], 100.0);
        assert_eq!(par_score(&sc, &"a".into(), 2.0), Ok(125.0));
        assert_eq!(par_score(&sc, &"b".into(), 10.0), Ok(1000.0));
        assert_eq!(par_score(&sc, &"c".into(), 10.0), Ok(7.0));
        assert_eq!(par_score(&sc, &"zz".into(), 10.0), Err(MetricError::UnknownSolver("zz".into())));
        let table = par_scores(&sc, 2.0).unwrap();
        assert_eq!(table.per_solver[&SolverId::from("a")], 125.0);
        assert_eq!(table.per_instance.unwrap()[&SolverId::from("a")][&"i1".into()], 200.0);
    }

    #[test]
    fn solved_ranking_orders_by_count_then_par1_then_id() {
        let sc = scenario(
            &[
                ("b", &[Some(60.0), Some(60.0), None]),
                ("a", &[Some(40.0), Some(40.0), None]),
                ("c", &[Some(1.0), None, None]),
                ("d", &[Some(40.0), Some(40.0), None]),
            ],
            100.0,
        );
        let order: Vec<_> = solved_ranking(&sc).into_iter().map(|e| e.solver.0).collect();
        assert_eq!(order, ["a", "d", "b", "c"]);
    }
}
