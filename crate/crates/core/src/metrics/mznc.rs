//! MiniZinc-challenge Borda score, with an optional time-equivalence threshold.
//!
//! Each instance is a voter; every ordered pair of solvers `(s, s')` awards
//! `s` a value in `[0, 1]`:
//!
//! 1. `0` if `s` produced nothing, or `s'` is better;
//! 2. `1` if `s` is better;
//! 3. `0.5` if both runtimes are within `delta` and the objectives agree;
//! 4. otherwise `time(s') / (time(s) + time(s'))`.
//!
//! "Better" means finishing while the other run hit the timeout, or ending
//! with a strictly lower objective. On decision instances the objective is
//! `+inf` for everyone, so only the runtime clause can fire.

use std::collections::BTreeMap;

use super::{check_delta, Metric, MetricError, ScoreTable};
use crate::scenario::{InstanceId, InstanceKind, RunOutcome, Scenario, SolverId};

fn unknown(kind: InstanceKind, o: &RunOutcome, tau: f64) -> bool {
    match kind {
        InstanceKind::Decision => o.time_s == tau,
        InstanceKind::Optimization => o.obj == f64::INFINITY,
    }
}

fn better(a: &RunOutcome, b: &RunOutcome, tau: f64) -> bool {
    (a.time_s < b.time_s && b.time_s == tau) || a.obj < b.obj
}

/// Points awarded to run `a` when compared against run `b` on one instance.
pub(crate) fn pair_points(kind: InstanceKind, a: &RunOutcome, b: &RunOutcome, tau: f64, delta: f64) -> f64 {
    if unknown(kind, a, tau) || better(b, a, tau) {
        0.0
    } else if better(a, b, tau) {
        1.0
    } else if (a.time_s - b.time_s).abs() <= delta && a.obj == b.obj {
        0.5
    } else {
        let denom = a.time_s + b.time_s;
        if denom == 0.0 {
            0.5
        } else {
            b.time_s / denom
        }
    }
}

pub fn mznc_pair(
    instance: &InstanceId,
    s: &SolverId,
    s_prime: &SolverId,
    scenario: &Scenario,
    delta: f64,
) -> Result<f64, MetricError> {
    check_delta(delta)?;
    let i = scenario.require_instance(instance)?;
    let a = scenario.require_solver(s)?;
    let b = scenario.require_solver(s_prime)?;
    if a == b {
        return Err(MetricError::SameSolver(s.clone()));
    }
    let kind = scenario.instances()[i].kind;
    Ok(pair_points(kind, scenario.outcome_at(i, a), scenario.outcome_at(i, b), scenario.timeout_s(), delta))
}

fn instance_points(scenario: &Scenario, i: usize, s: usize, delta: f64) -> f64 {
    let kind = scenario.instances()[i].kind;
    let tau = scenario.timeout_s();
    let mine = scenario.outcome_at(i, s);
    (0..scenario.n_solvers())
        .filter(|&o| o != s)
        .map(|o| pair_points(kind, mine, scenario.outcome_at(i, o), tau, delta))
        .sum()
}

pub fn mznc_score(scenario: &Scenario, solver: &SolverId, delta: f64) -> Result<f64, MetricError> {
    check_delta(delta)?;
    let s = scenario.require_solver(solver)?;
    if scenario.n_solvers() < 2 {
        return Err(MetricError::SingleSolverScenario);
    }
    Ok((0..scenario.n_instances()).map(|i| instance_points(scenario, i, s, delta)).sum())
}

/// MZNC score of every solver, with per-instance points.
pub fn mznc_scores(scenario: &Scenario, delta: f64) -> Result<ScoreTable, MetricError> {
    check_delta(delta)?;
    if scenario.n_solvers() < 2 {
        return Err(MetricError::SingleSolverScenario);
    }
    let mut table = ScoreTable::new(&Metric::Mznc { delta });
    let mut per_instance = BTreeMap::new();
    for (s, solver) in scenario.solvers().iter().enumerate() {
        let row: BTreeMap<_, _> = scenario
            .instances()
            .iter()
            .enumerate()
            .map(|(i, inst)| (inst.id.clone(), instance_points(scenario, i, s, delta)))
            .collect();
        table.per_solver.insert(solver.clone(), row.values().sum());
        per_instance.insert(solver.clone(), row);
    }
    table.per_instance = Some(per_instance);
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{validate_scenario, Instance, RawScenario};

    const TAU: f64 = 100.0;

    fn dec(a: Option<f64>, b: Option<f64>) -> (RunOutcome, RunOutcome) {
        let f = |t: Option<f64>| t.map_or(RunOutcome::timeout(TAU), RunOutcome::solved);
        (f(a), f(b))
    }

    #[test]
    fn both_unknown_scores_zero() {
        let (a, b) = dec(None, None);
        assert_eq!(pair_points(InstanceKind::Decision, &a, &b, TAU, 0.0), 0.0);
        assert_eq!(pair_points(InstanceKind::Decision, &b, &a, TAU, 0.0), 0.0);
    }

    #[test]
    fn fractional_branch() {
        let (a, b) = dec(Some(30.0), Some(70.0));
        assert_eq!(pair_points(InstanceKind::Decision, &a, &b, TAU, 0.0), 0.7);
        assert_eq!(pair_points(InstanceKind::Decision, &b, &a, TAU, 0.0), 0.3);
    }

    #[test]
    fn delta_turns_close_times_into_ties() {
        let (a, b) = dec(Some(30.0), Some(70.0));
        assert_eq!(pair_points(InstanceKind::Decision, &a, &b, TAU, 50.0), 0.5);
        assert_eq!(pair_points(InstanceKind::Decision, &a, &b, TAU, 40.0), 0.5);
        assert_eq!(pair_points(InstanceKind::Decision, &a, &b, TAU, 39.999), 0.7);
    }

    #[test]
    fn delta_never_overrides_a_timeout_win() {
        let (a, b) = dec(Some(30.0), None);
        assert_eq!(pair_points(InstanceKind::Decision, &a, &b, TAU, 1000.0), 1.0);
        assert_eq!(pair_points(InstanceKind::Decision, &b, &a, TAU, 1000.0), 0.0);
    }

    #[test]
    fn better_objective_wins() {
        let a = RunOutcome::timeout_with(TAU, 10.0);
        let b = RunOutcome::timeout_with(TAU, 12.0);
        assert_eq!(pair_points(InstanceKind::Optimization, &a, &b, TAU, 0.0), 1.0);
        assert_eq!(pair_points(InstanceKind::Optimization, &b, &a, TAU, 0.0), 0.0);
        // equal suboptimal objectives at the timeout tie
        assert_eq!(pair_points(InstanceKind::Optimization, &a, &a, TAU, 0.0), 0.5);
    }

    #[test]
    fn instant_ties_split_the_point() {
        let (a, b) = dec(Some(0.0), Some(0.0));
        assert_eq!(pair_points(InstanceKind::Decision, &a, &b, TAU, 0.0), 0.5);
    }

    fn two_by_two() -> Scenario {
        let mut raw = RawScenario {
            id: "t".into(),
            instances: vec![Instance::decision("i1"), Instance::decision("i2")],
            solvers: vec!["a".into(), "b".into()],
            timeout_s: TAU,
            ..Default::default()
        };
        for (i, (ta, tb)) in [("i1", (30.0, 70.0)), ("i2", (70.0, 30.0))] {
            raw.outcomes.push((i.into(), "a".into(), RunOutcome::solved(ta)));
            raw.outcomes.push((i.into(), "b".into(), RunOutcome::solved(tb)));
        }
        validate_scenario(raw).unwrap()
    }

    #[test]
    fn symmetric_scores() {
        let sc = two_by_two();
        assert!((mznc_score(&sc, &"a".into(), 0.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((mznc_score(&sc, &"b".into(), 0.0).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(mznc_pair(&"i1".into(), &"a".into(), &"b".into(), &sc, 0.0), Ok(0.7));
        assert_eq!(
            mznc_pair(&"i1".into(), &"a".into(), &"a".into(), &sc, 0.0),
            Err(MetricError::SameSolver("a".into()))
        );
    }

    #[test]
    fn single_solver_is_rejected() {
        let sc = two_by_two().restrict_solvers(&["a".into()]).unwrap();
        assert_eq!(mznc_score(&sc, &"a".into(), 0.0), Err(MetricError::SingleSolverScenario));
    }
}
