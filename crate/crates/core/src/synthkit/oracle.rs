//! Naive reference implementations of every metric.
//!
//! Written directly from the metric definitions over plain lookup tables,
//! without calling into [`crate::metrics`] or [`crate::baselines`]. Slow by
//! design; limited to small scenarios.

use std::collections::HashMap;

use thiserror::Error;

use crate::metrics::{BaseMetric, Metric};
use crate::scenario::{InstanceKind, RunOutcome, RunStatus, Scenario, SolverId, Trajectory};

pub const MAX_INSTANCES: usize = 50;
pub const MAX_SOLVERS: usize = 6;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("oracle limited to {MAX_INSTANCES} instances and {MAX_SOLVERS} solvers")]
    TooLarge,
    #[error("unknown solver `{0}`")]
    UnknownSolver(SolverId),
    #[error("metric undefined on this scenario: {0}")]
    Undefined(&'static str),
}

struct Table<'a> {
    tau: f64,
    instances: Vec<(&'a str, InstanceKind, Option<f64>)>,
    solvers: Vec<&'a str>,
    runs: HashMap<(&'a str, &'a str), RunOutcome>,
    trajectories: HashMap<(&'a str, &'a str), &'a Trajectory>,
}

impl<'a> Table<'a> {
    fn new(sc: &'a Scenario) -> Self {
        let mut runs = HashMap::new();
        let mut trajectories = HashMap::new();
        for inst in sc.instances() {
            for solver in sc.solvers() {
                runs.insert((inst.id.as_str(), solver.as_str()), *sc.outcome(&inst.id, solver).unwrap());
                if let Some(t) = sc.trajectory(&inst.id, solver) {
                    trajectories.insert((inst.id.as_str(), solver.as_str()), t);
                }
            }
        }
        Table {
            tau: sc.timeout_s(),
            instances: sc.instances().iter().map(|i| (i.id.as_str(), i.kind, i.best_known_obj)).collect(),
            solvers: sc.solvers().iter().map(|s| s.as_str()).collect(),
            runs,
            trajectories,
        }
    }

    fn time(&self, i: &str, s: &str) -> f64 {
        self.runs[&(i, s)].time_s
    }

    fn obj(&self, i: &str, s: &str) -> f64 {
        self.runs[&(i, s)].obj
    }

    fn solved(&self, i: &str, s: &str) -> bool {
        self.runs[&(i, s)].status == RunStatus::Solved
    }

    fn opt_instances(&self) -> Vec<&'a str> {
        self.instances.iter().filter(|x| x.1 == InstanceKind::Optimization).map(|x| x.0).collect()
    }

    fn best_known(&self, i: &str) -> Option<f64> {
        let given = self.instances.iter().find(|x| x.0 == i).unwrap().2;
        if given.is_some() {
            return given;
        }
        let mut best: Option<f64> = None;
        for s in &self.solvers {
            let o = self.obj(i, s);
            if o.is_finite() && best.map_or(true, |b| o < b) {
                best = Some(o);
            }
        }
        best
    }
}

/// Reference value of `metric` for `solver`.
///
/// Closed gap uses the whole scenario both as the SBS selection set and as
/// the VBS/SBS pool.
pub fn oracle_score(scenario: &Scenario, metric: &Metric, solver: &SolverId) -> Result<f64, OracleError> {
    if scenario.n_instances() > MAX_INSTANCES || scenario.n_solvers() > MAX_SOLVERS {
        return Err(OracleError::TooLarge);
    }
    if !scenario.solvers().contains(solver) {
        return Err(OracleError::UnknownSolver(solver.clone()));
    }
    let t = Table::new(scenario);
    let s = solver.as_str();
    let n = t.instances.len() as f64;
    match *metric {
        Metric::Par { lambda } => Ok(t.instances.iter().map(|(i, ..)| par(&t, i, s, lambda)).sum::<f64>() / n),
        Metric::Solved => Ok(t.instances.iter().filter(|(i, ..)| t.solved(i, s)).count() as f64),
        Metric::Mznc { delta } => {
            if t.solvers.len() < 2 {
                return Err(OracleError::Undefined("MZNC needs two solvers"));
            }
            let mut total = 0.0;
            for (i, kind, _) in &t.instances {
                for other in t.solvers.iter().filter(|o| **o != s) {
                    total += m_s(&t, i, *kind, s, other, delta);
                }
            }
            Ok(total)
        }
        Metric::NormalizedRuntime => {
            Ok(1.0 - t.instances.iter().map(|(i, ..)| t.time(i, s) / t.tau).sum::<f64>() / n)
        }
        Metric::Speedup => {
            let mut total = 0.0;
            for (i, ..) in &t.instances {
                let vbs = t.solvers.iter().map(|x| t.time(i, x)).fold(f64::INFINITY, f64::min);
                let mine = t.time(i, s);
                total += if vbs == 0.0 && mine == 0.0 { 1.0 } else { vbs / mine };
            }
            Ok(total / n)
        }
        Metric::ClosedGap { base } => {
            let per_instance = |x: &str| -> Result<Vec<f64>, OracleError> {
                match base {
                    BaseMetric::Par { lambda } => Ok(t.instances.iter().map(|(i, ..)| par(&t, i, x, lambda)).collect()),
                    BaseMetric::Runtime => Ok(t.instances.iter().map(|(i, ..)| t.time(i, x)).collect()),
                    BaseMetric::Area => t.opt_instances().iter().map(|i| area(&t, i, x)).collect(),
                }
            };
            let columns: Vec<Vec<f64>> = t.solvers.iter().map(|x| per_instance(x)).collect::<Result<_, _>>()?;
            let m_vbs: f64 = (0..columns[0].len())
                .map(|k| columns.iter().map(|c| c[k]).fold(f64::INFINITY, f64::min))
                .sum();
            let totals: Vec<f64> = columns.iter().map(|c| c.iter().sum()).collect();
            let mut sbs = 0;
            for k in 1..t.solvers.len() {
                if totals[k] < totals[sbs] || (totals[k] == totals[sbs] && t.solvers[k] < t.solvers[sbs]) {
                    sbs = k;
                }
            }
            let m_sbs = totals[sbs];
            if m_sbs <= m_vbs {
                return Err(OracleError::Undefined("SBS equals VBS"));
            }
            let mine = totals[t.solvers.iter().position(|x| *x == s).unwrap()];
            Ok((m_sbs - mine) / (m_sbs - m_vbs))
        }
        Metric::Ratio => {
            let opt = t.opt_instances();
            if opt.is_empty() {
                return Err(OracleError::Undefined("no optimization instances"));
            }
            let mut total = 0.0;
            for i in opt {
                let o = t.obj(i, s);
                if let (Some(best), true) = (t.best_known(i), o.is_finite()) {
                    if best <= 0.0 || o <= 0.0 {
                        return Err(OracleError::Undefined("non-positive objective"));
                    }
                    total += f64::min(1.0, best / o);
                }
            }
            Ok(total)
        }
        Metric::Area => {
            let opt = t.opt_instances();
            if opt.is_empty() {
                return Err(OracleError::Undefined("no optimization instances"));
            }
            opt.iter().map(|i| area(&t, i, s)).sum()
        }
        Metric::BoundedReward { alpha, beta } => {
            let mut total = 0.0;
            for (i, kind, _) in &t.instances {
                let o = t.obj(i, s);
                total += if t.solved(i, s) {
                    1.0
                } else if *kind == InstanceKind::Decision || o == f64::INFINITY {
                    0.0
                } else {
                    let found: Vec<f64> = t.solvers.iter().map(|x| t.obj(i, x)).filter(|v| v.is_finite()).collect();
                    let best = found.iter().cloned().fold(f64::INFINITY, f64::min);
                    let worst = found.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                    if best == worst {
                        beta
                    } else {
                        alpha + (beta - alpha) * (worst - o) / (worst - best)
                    }
                };
            }
            Ok(total)
        }
    }
}

fn par(t: &Table, i: &str, s: &str, lambda: f64) -> f64 {
    let time = t.time(i, s);
    if time < t.tau {
        time
    } else {
        lambda * t.tau
    }
}

/// One solver's points against another on one instance, branch by branch.
fn m_s(t: &Table, i: &str, kind: InstanceKind, s: &str, s2: &str, delta: f64) -> f64 {
    let unknown = |x: &str| match kind {
        InstanceKind::Decision => t.time(i, x) == t.tau,
        InstanceKind::Optimization => t.obj(i, x) == f64::INFINITY,
    };
    let better = |x: &str, y: &str| {
        let time_clause = t.time(i, x) < t.time(i, y) && t.time(i, y) == t.tau;
        let obj_clause = t.obj(i, x) < t.obj(i, y);
        time_clause || obj_clause
    };
    if unknown(s) || better(s2, s) {
        return 0.0;
    }
    if better(s, s2) {
        return 1.0;
    }
    let (ts, ts2) = (t.time(i, s), t.time(i, s2));
    if (ts - ts2).abs() <= delta && t.obj(i, s) == t.obj(i, s2) {
        return 0.5;
    }
    if ts + ts2 == 0.0 {
        return 0.5;
    }
    ts2 / (ts + ts2)
}

/// Area score by midpoint evaluation of the step function on every segment
/// between consecutive change points.
fn area(t: &Table, i: &str, s: &str) -> Result<f64, OracleError> {
    let Some(best) = t.best_known(i) else { return Ok(0.0) };
    let mut worst = best;
    for x in &t.solvers {
        let o = t.obj(i, x);
        if o.is_finite() {
            worst = worst.max(o);
        }
        if let Some(tr) = t.trajectories.get(&(i, *x)) {
            for e in &tr.events {
                worst = worst.max(e.obj);
            }
        }
    }
    let traj = t.trajectories.get(&(i, s));
    if traj.is_none() && t.obj(i, s).is_finite() {
        return Err(OracleError::Undefined("missing trajectory"));
    }
    let quality = |obj: f64| -> f64 {
        if worst > best {
            ((obj - best) / (worst - best)).max(0.0).min(1.0)
        } else if obj <= best {
            0.0
        } else {
            1.0
        }
    };
    let u = |time: f64| -> f64 {
        let Some(tr) = traj else { return 1.0 };
        if tr.proved_optimal_at.map_or(false, |p| time >= p) {
            return 0.0;
        }
        match tr.events.iter().filter(|e| e.t_s <= time).last() {
            None => 1.0,
            Some(e) => quality(e.obj),
        }
    };
    let mut cuts = vec![0.0, t.tau];
    if let Some(tr) = traj {
        cuts.extend(tr.events.iter().map(|e| e.t_s));
        cuts.extend(tr.proved_optimal_at);
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut integral = 0.0;
    for w in cuts.windows(2) {
        if w[1] > w[0] {
            integral += u((w[0] + w[1]) / 2.0) * (w[1] - w[0]);
        }
    }
    Ok(integral / t.tau)
}
