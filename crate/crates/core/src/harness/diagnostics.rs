//! Diagnostics that explain disagreements between metrics: head-to-head win
//! counts, MZNC scores as a function of the time threshold, and solved-runtime
//! distributions.

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::metrics::mznc::pair_points;
use crate::metrics::MetricError;
use crate::scenario::{Scenario, SolverId};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeadToHead {
    pub solver_a: SolverId,
    pub solver_b: SolverId,
    pub a_faster: usize,
    pub b_faster: usize,
    pub ties: usize,
}

/// Counts instances on which each solver is strictly faster. Equal runtimes,
/// double timeouts included, are ties.
pub fn head_to_head(scenario: &Scenario, solver_a: &SolverId, solver_b: &SolverId) -> Result<HeadToHead, HarnessError> {
    let a = scenario.require_solver(solver_a).map_err(MetricError::from)?;
    let b = scenario.require_solver(solver_b).map_err(MetricError::from)?;
    let mut h = HeadToHead { solver_a: solver_a.clone(), solver_b: solver_b.clone(), a_faster: 0, b_faster: 0, ties: 0 };
    for (oa, ob) in scenario.solver_outcomes(a).zip(scenario.solver_outcomes(b)) {
        if oa.time_s < ob.time_s {
            h.a_faster += 1;
        } else if ob.time_s < oa.time_s {
            h.b_faster += 1;
        } else {
            h.ties += 1;
        }
    }
    Ok(h)
}

/// Runtimes of the solved instances of a solver, ascending.
pub fn runtime_distribution(scenario: &Scenario, solver: &SolverId) -> Result<Vec<f64>, HarnessError> {
    let s = scenario.require_solver(solver).map_err(MetricError::from)?;
    let mut times: Vec<f64> = scenario.solver_outcomes(s).filter(|o| o.status.is_solved()).map(|o| o.time_s).collect();
    times.sort_by(f64::total_cmp);
    Ok(times)
}

/// MZNC scores of a fixed solver set at several time thresholds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaSweep {
    pub deltas: Vec<f64>,
    pub solvers: Vec<SolverId>,
    /// `scores[d][s]`: score of `solvers[s]` at `deltas[d]`.
    pub scores: Vec<Vec<f64>>,
}

impl DeltaSweep {
    /// Long-form rows `(delta, solver, score)`, delta-major.
    pub fn rows(&self) -> impl Iterator<Item = (f64, &SolverId, f64)> + '_ {
        self.deltas.iter().zip(&self.scores).flat_map(move |(&d, row)| {
            self.solvers.iter().zip(row).map(move |(s, &v)| (d, s, v))
        })
    }

    pub fn score(&self, delta_idx: usize, solver: &SolverId) -> Option<f64> {
        let s = self.solvers.iter().position(|x| x == solver)?;
        Some(self.scores.get(delta_idx)?[s])
    }

    /// Best solver at each delta; ties go to the smallest id.
    pub fn leaders(&self) -> Vec<&SolverId> {
        self.scores
            .iter()
            .map(|row| {
                let mut best = 0;
                for s in 1..row.len() {
                    if row[s] > row[best] || (row[s] == row[best] && self.solvers[s] < self.solvers[best]) {
                        best = s;
                    }
                }
                &self.solvers[best]
            })
            .collect()
    }

    /// Sweep deltas at which the relative order of `a` and `b` differs from
    /// the previous sweep point.
    pub fn order_changes(&self, a: &SolverId, b: &SolverId) -> Vec<f64> {
        let (Some(ia), Some(ib)) = (self.solvers.iter().position(|x| x == a), self.solvers.iter().position(|x| x == b))
        else {
            return Vec::new();
        };
        let sign = |row: &Vec<f64>| row[ia].partial_cmp(&row[ib]);
        self.scores
            .windows(2)
            .zip(&self.deltas[1..])
            .filter(|(w, _)| sign(&w[0]) != sign(&w[1]))
            .map(|(_, &d)| d)
            .collect()
    }
}

fn mznc_totals(scenario: &Scenario, delta: f64) -> Vec<f64> {
    let tau = scenario.timeout_s();
    let n = scenario.n_solvers();
    let mut totals = vec![0.0; n];
    for (i, inst) in scenario.instances().iter().enumerate() {
        for (s, total) in totals.iter_mut().enumerate() {
            let mine = scenario.outcome_at(i, s);
            for o in (0..n).filter(|&o| o != s) {
                *total += pair_points(inst.kind, mine, scenario.outcome_at(i, o), tau, delta);
            }
        }
    }
    totals
}

/// MZNC score of each of `solvers` (compared among themselves only) at every
/// threshold in `deltas`, which must be ascending.
pub fn delta_sweep(scenario: &Scenario, solvers: &[SolverId], deltas: &[f64]) -> Result<DeltaSweep, HarnessError> {
    if deltas.iter().any(|d| !(*d >= 0.0)) || deltas.windows(2).any(|w| w[1] < w[0]) {
        return Err(HarnessError::UnsortedDeltas);
    }
    let sub = scenario.restrict_solvers(solvers)?;
    if sub.n_solvers() < 2 {
        return Err(MetricError::SingleSolverScenario.into());
    }
    let scores = deltas.iter().map(|&d| mznc_totals(&sub, d)).collect();
    Ok(DeltaSweep { deltas: deltas.to_vec(), solvers: sub.solvers().to_vec(), scores })
}

/// Smallest threshold from which `a`'s MZNC score stays strictly above
/// `b`'s for every larger threshold, with MZNC computed among `solvers`.
/// `None` if `a` is not ahead once every runtime difference is within the
/// threshold.
///
/// Scores only change where the threshold crosses a runtime difference
/// between two solvers on some instance, so checking those points is exact.
pub fn mznc_flip_point(
    scenario: &Scenario,
    solvers: &[SolverId],
    a: &SolverId,
    b: &SolverId,
) -> Result<Option<f64>, HarnessError> {
    let sub = scenario.restrict_solvers(solvers)?;
    let ia = sub.require_solver(a).map_err(MetricError::from)?;
    let ib = sub.require_solver(b).map_err(MetricError::from)?;
    if sub.n_solvers() < 2 {
        return Err(MetricError::SingleSolverScenario.into());
    }
    let mut points = vec![0.0];
    for i in 0..sub.n_instances() {
        for x in 0..sub.n_solvers() {
            for y in x + 1..sub.n_solvers() {
                points.push((sub.outcome_at(i, x).time_s - sub.outcome_at(i, y).time_s).abs());
            }
        }
    }
    points.sort_by(f64::total_cmp);
    points.dedup();
    let mut flip = None;
    for &d in points.iter().rev() {
        let totals = mznc_totals(&sub, d);
        if totals[ia] > totals[ib] {
            flip = Some(d);
        } else {
            break;
        }
    }
    Ok(flip)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::mznc_score;
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
    fn head_to_head_counts() {
        let sc = scenario(&[("a", &[Some(10.0), None]), ("b", &[Some(20.0), None])]);
        let h = head_to_head(&sc, &"a".into(), &"b".into()).unwrap();
        assert_eq!((h.a_faster, h.b_faster, h.ties), (1, 0, 1));
        let same = head_to_head(&sc, &"a".into(), &"a".into()).unwrap();
        assert_eq!((same.a_faster, same.b_faster, same.ties), (0, 0, 2));
        assert!(head_to_head(&sc, &"a".into(), &"zz".into()).is_err());
    }

    #[test]
    fn runtime_distribution_filters_and_sorts() {
        let sc = scenario(&[("a", &[Some(70.0), Some(10.0), None]), ("b", &[None, None, None])]);
        assert_eq!(runtime_distribution(&sc, &"a".into()).unwrap(), [10.0, 70.0]);
        assert!(runtime_distribution(&sc, &"b".into()).unwrap().is_empty());
    }

    #[test]
    fn sweep_matches_mznc_and_saturates() {
        // a solves more, b is faster when both solve
        let sc = scenario(&[
            ("a", &[Some(50.0), Some(60.0), Some(40.0), Some(80.0)]),
            ("b", &[Some(5.0), Some(2.0), None, None]),
        ]);
        let solvers = [SolverId::from("a"), SolverId::from("b")];
        let sweep = delta_sweep(&sc, &solvers, &[0.0, 10.0, 50.0, 100.0, 200.0]).unwrap();
        assert_eq!(sweep.score(0, &solvers[0]), Some(mznc_score(&sc, &solvers[0], 0.0).unwrap()));
        assert_eq!(sweep.score(3, &solvers[0]), sweep.score(4, &solvers[0]));
        // at delta >= 58 the two shared instances are ties: a = 1 + 2, b = 1
        assert_eq!(sweep.score(3, &solvers[0]), Some(3.0));
        assert_eq!(sweep.score(3, &solvers[1]), Some(1.0));
        assert_eq!(sweep.leaders(), [&solvers[0]; 5]);
        assert!(delta_sweep(&sc, &solvers, &[5.0, 1.0]).is_err());
    }

    #[test]
    fn flip_point_is_exact() {
        // b wins both shared instances at delta 0; a wins the unshared one.
        let sc = scenario(&[("a", &[Some(50.0), Some(60.0), Some(40.0)]), ("b", &[Some(5.0), Some(2.0), None])]);
        let solvers = [SolverId::from("a"), SolverId::from("b")];
        // delta 0: a = 5/55 + 2/62 + 1 = 1.1232, b = 50/55 + 60/62 = 1.8768
        // delta 45: first shared instance ties: a = 0.5 + 2/62 + 1 = 1.532, b = 0.5 + 60/62 = 1.4677
        let flip = mznc_flip_point(&sc, &solvers, &solvers[0], &solvers[1]).unwrap();
        assert_eq!(flip, Some(45.0));
        assert_eq!(mznc_flip_point(&sc, &solvers, &solvers[1], &solvers[0]).unwrap(), None);
        let sweep = delta_sweep(&sc, &solvers, &[0.0, 44.999, 45.0]).unwrap();
        assert_eq!(sweep.order_changes(&solvers[0], &solvers[1]), [45.0]);
    }
}
