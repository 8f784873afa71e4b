//! Scenario data model: instances, solvers, a timeout and the recorded runs.
//!
//! A [`Scenario`] is only obtainable through [`validate_scenario`] (or the
//! projections on an already valid scenario), so every scoring function can
//! rely on the invariants below without re-checking them:
//!
//! * the timeout is positive and finite,
//! * every (instance, solver) pair has exactly one [`RunOutcome`],
//! * solved runs finish strictly before the timeout, unsolved runs are
//!   recorded at exactly the timeout,
//! * decision instances never carry an objective value,
//! * trajectories only exist for optimization instances and agree with the
//!   final outcome of their run.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Identifier of a problem instance.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct InstanceId(pub String);

/// Identifier of a (meta-)solver.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SolverId(pub String);

macro_rules! string_id {
    ($t:ty) => {
        impl $t {
            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $t {
            fn from(s: &str) -> Self {
                Self(s.to_owned())
            }
        }

        impl From<String> for $t {
            fn from(s: String) -> Self {
                Self(s)
            }
        }
    };
}

string_id!(InstanceId);
string_id!(SolverId);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceKind {
    Decision,
    Optimization,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub id: InstanceId,
    pub kind: InstanceKind,
    /// Best known value of the (minimized) objective, if supplied.
    pub best_known_obj: Option<f64>,
}

impl Instance {
    pub fn decision(id: impl Into<InstanceId>) -> Self {
        Self { id: id.into(), kind: InstanceKind::Decision, best_known_obj: None }
    }

    pub fn optimization(id: impl Into<InstanceId>) -> Self {
        Self { id: id.into(), kind: InstanceKind::Optimization, best_known_obj: None }
    }

    pub fn is_optimization(&self) -> bool {
        self.kind == InstanceKind::Optimization
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Solved,
    Timeout,
    /// Crash, memory-out or any other abnormal end. Scored exactly like a timeout.
    Error,
}

impl RunStatus {
    pub fn is_solved(self) -> bool {
        self == RunStatus::Solved
    }
}

/// Outcome of one solver on one instance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunOutcome {
    /// Runtime in seconds; equals the timeout when the run did not solve the instance.
    pub time_s: f64,
    pub status: RunStatus,
    /// Final objective value; `+inf` when no solution was found (and always for decision instances).
    pub obj: f64,
}

impl RunOutcome {
    pub fn solved(time_s: f64) -> Self {
        Self { time_s, status: RunStatus::Solved, obj: f64::INFINITY }
    }

    pub fn solved_with(time_s: f64, obj: f64) -> Self {
        Self { time_s, status: RunStatus::Solved, obj }
    }

    pub fn timeout(timeout_s: f64) -> Self {
        Self { time_s: timeout_s, status: RunStatus::Timeout, obj: f64::INFINITY }
    }

    pub fn timeout_with(timeout_s: f64, obj: f64) -> Self {
        Self { time_s: timeout_s, status: RunStatus::Timeout, obj }
    }

    pub fn error(timeout_s: f64) -> Self {
        Self { time_s: timeout_s, status: RunStatus::Error, obj: f64::INFINITY }
    }

    pub fn has_solution(&self) -> bool {
        self.obj.is_finite()
    }
}

/// One improving solution reported during an optimization run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryEvent {
    pub t_s: f64,
    pub obj: f64,
}

/// Time-ordered sequence of improving solutions of one run.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub events: Vec<TrajectoryEvent>,
    /// Time at which optimality of the incumbent was proven, if ever.
    pub proved_optimal_at: Option<f64>,
}

impl Trajectory {
    pub fn new(events: Vec<TrajectoryEvent>, proved_optimal_at: Option<f64>) -> Self {
        Self { events, proved_optimal_at }
    }

    pub fn last_obj(&self) -> Option<f64> {
        self.events.last().map(|e| e.obj)
    }
}

/// Rounds seconds to whole milliseconds, the resolution at which runtimes are compared.
pub fn round_ms(t: f64) -> f64 {
    (t * 1000.0).round() / 1000.0
}

/// Unvalidated scenario data, as produced by parsers and generators.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RawScenario {
    pub id: String,
    pub instances: Vec<Instance>,
    pub solvers: Vec<SolverId>,
    pub timeout_s: f64,
    pub outcomes: Vec<(InstanceId, SolverId, RunOutcome)>,
    pub trajectories: Vec<(InstanceId, SolverId, Trajectory)>,
}

/// A single invariant violation found by [`validate_scenario`].
#[derive(Clone, Debug, PartialEq, Error)]
pub enum Violation {
    #[error("timeout must be positive and finite, got {0}")]
    BadTimeout(f64),
    #[error("scenario has no instances")]
    NoInstances,
    #[error("scenario has no solvers")]
    NoSolvers,
    #[error("duplicate {kind} id `{id}`")]
    DuplicateId { kind: &'static str, id: String },
    #[error("missing outcome for instance `{instance}`, solver `{solver}`")]
    MissingOutcome { instance: InstanceId, solver: SolverId },
    #[error("more than one outcome for instance `{instance}`, solver `{solver}`")]
    DuplicateOutcome { instance: InstanceId, solver: SolverId },
    #[error("outcome refers to unknown instance `{0}`")]
    UnknownInstance(InstanceId),
    #[error("outcome refers to unknown solver `{0}`")]
    UnknownSolver(SolverId),
    #[error("invalid outcome for instance `{instance}`, solver `{solver}`: {reason}")]
    InvalidOutcome { instance: InstanceId, solver: SolverId, reason: String },
    #[error("instance `{0}` is a decision instance but has a best known objective")]
    BestKnownOnDecision(InstanceId),
    #[error("inconsistent trajectory for instance `{instance}`, solver `{solver}`: {reason}")]
    InconsistentTrajectory { instance: InstanceId, solver: SolverId, reason: String },
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("scenario failed validation:{}", format_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("cannot restrict a scenario to an empty set")]
    EmptyRestriction,
    #[error("unknown instance `{0}`")]
    UnknownInstance(InstanceId),
    #[error("unknown solver `{0}`")]
    UnknownSolver(SolverId),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter().map(|x| format!("\n  - {x}")).collect()
}

impl ScenarioError {
    pub fn violations(&self) -> &[Violation] {
        match self {
            ScenarioError::Invalid(v) => v,
            _ => &[],
        }
    }
}

/// A validated, immutable benchmark scenario.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    id: String,
    instances: Vec<Instance>,
    solvers: Vec<SolverId>,
    timeout_s: f64,
    /// Row-major: `outcomes[instance * solvers.len() + solver]`.
    outcomes: Vec<RunOutcome>,
    trajectories: BTreeMap<(usize, usize), Trajectory>,
    instance_index: HashMap<InstanceId, usize>,
    solver_index: HashMap<SolverId, usize>,
}

/// Checks every scenario invariant and builds a [`Scenario`].
///
/// Runtimes and trajectory timestamps are rounded to milliseconds first.
/// Empty trajectories are dropped: a missing trajectory on a run without a
/// solution means the same thing.
pub fn validate_scenario(raw: RawScenario) -> Result<Scenario, ScenarioError> {
    let mut violations = Vec::new();
    let tau = raw.timeout_s;
    if !(tau.is_finite() && tau > 0.0) {
        violations.push(Violation::BadTimeout(tau));
    }
    if raw.instances.is_empty() {
        violations.push(Violation::NoInstances);
    }
    if raw.solvers.is_empty() {
        violations.push(Violation::NoSolvers);
    }

    let mut instance_index = HashMap::new();
    for (i, inst) in raw.instances.iter().enumerate() {
        if instance_index.insert(inst.id.clone(), i).is_some() {
            violations.push(Violation::DuplicateId { kind: "instance", id: inst.id.0.clone() });
        }
        if inst.kind == InstanceKind::Decision && inst.best_known_obj.is_some() {
            violations.push(Violation::BestKnownOnDecision(inst.id.clone()));
        }
    }
    let mut solver_index = HashMap::new();
    for (s, id) in raw.solvers.iter().enumerate() {
        if solver_index.insert(id.clone(), s).is_some() {
            violations.push(Violation::DuplicateId { kind: "solver", id: id.0.clone() });
        }
    }

    let n_solvers = raw.solvers.len();
    let mut slots: Vec<Option<RunOutcome>> = vec![None; raw.instances.len() * n_solvers];
    for (inst, solver, outcome) in &raw.outcomes {
        let (Some(&i), Some(&s)) = (instance_index.get(inst), solver_index.get(solver)) else {
            if !instance_index.contains_key(inst) {
                violations.push(Violation::UnknownInstance(inst.clone()));
            }
            if !solver_index.contains_key(solver) {
                violations.push(Violation::UnknownSolver(solver.clone()));
            }
            continue;
        };
        let mut outcome = *outcome;
        if outcome.time_s.is_finite() {
            outcome.time_s = round_ms(outcome.time_s);
        }
        if let Some(reason) = outcome_problem(&raw.instances[i], &outcome, tau) {
            violations.push(Violation::InvalidOutcome {
                instance: inst.clone(),
                solver: solver.clone(),
                reason,
            });
        }
        let slot = &mut slots[i * n_solvers + s];
        if slot.is_some() {
            violations.push(Violation::DuplicateOutcome { instance: inst.clone(), solver: solver.clone() });
        } else {
            *slot = Some(outcome);
        }
    }
    for (i, inst) in raw.instances.iter().enumerate() {
        for (s, solver) in raw.solvers.iter().enumerate() {
            if slots[i * n_solvers + s].is_none() && instance_index.get(&inst.id) == Some(&i) {
                violations.push(Violation::MissingOutcome { instance: inst.id.clone(), solver: solver.clone() });
            }
        }
    }

    let mut trajectories = BTreeMap::new();
    for (inst, solver, traj) in raw.trajectories {
        let (Some(&i), Some(&s)) = (instance_index.get(&inst), solver_index.get(&solver)) else {
            violations.push(Violation::InconsistentTrajectory {
                instance: inst,
                solver,
                reason: "trajectory refers to an unknown instance or solver".into(),
            });
            continue;
        };
        let traj = Trajectory {
            events: traj
                .events
                .iter()
                .map(|e| TrajectoryEvent { t_s: round_ms(e.t_s), obj: e.obj })
                .collect(),
            proved_optimal_at: traj.proved_optimal_at.map(round_ms),
        };
        let outcome = slots[i * n_solvers + s];
        if let Some(reason) = trajectory_problem(&raw.instances[i], outcome.as_ref(), &traj, tau) {
            violations.push(Violation::InconsistentTrajectory { instance: inst, solver, reason });
            continue;
        }
        if trajectories.contains_key(&(i, s)) {
            violations.push(Violation::InconsistentTrajectory {
                instance: inst,
                solver,
                reason: "more than one trajectory for this run".into(),
            });
            continue;
        }
        if !traj.events.is_empty() || traj.proved_optimal_at.is_some() {
            trajectories.insert((i, s), traj);
        }
    }

    if !violations.is_empty() {
        return Err(ScenarioError::Invalid(violations));
    }
    Ok(Scenario {
        id: raw.id,
        instances: raw.instances,
        solvers: raw.solvers,
        timeout_s: tau,
        outcomes: slots.into_iter().map(|o| o.expect("checked total")).collect(),
        trajectories,
        instance_index,
        solver_index,
    })
}

fn outcome_problem(inst: &Instance, o: &RunOutcome, tau: f64) -> Option<String> {
    if !(o.time_s >= 0.0) || !o.time_s.is_finite() {
        return Some(format!("runtime {} is not a non-negative number", o.time_s));
    }
    if o.time_s > tau {
        return Some(format!("runtime {} exceeds the timeout {tau}", o.time_s));
    }
    match o.status {
        RunStatus::Solved if o.time_s >= tau => {
            return Some(format!("solved run must finish before the timeout, got {}", o.time_s))
        }
        RunStatus::Timeout | RunStatus::Error if o.time_s != tau => {
            return Some(format!("unsolved run must be recorded at the timeout, got {}", o.time_s))
        }
        _ => {}
    }
    if o.obj.is_nan() || o.obj == f64::NEG_INFINITY {
        return Some(format!("objective {} is not a finite value or +inf", o.obj));
    }
    match inst.kind {
        InstanceKind::Decision if o.obj != f64::INFINITY => {
            Some("decision instance runs cannot carry an objective value".into())
        }
        InstanceKind::Optimization if o.status.is_solved() && !o.obj.is_finite() => {
            Some("optimization run marked solved without a solution".into())
        }
        _ => None,
    }
}

fn trajectory_problem(inst: &Instance, outcome: Option<&RunOutcome>, traj: &Trajectory, tau: f64) -> Option<String> {
    if inst.kind != InstanceKind::Optimization {
        return Some("trajectories are only allowed on optimization instances".into());
    }
    for e in &traj.events {
        if !(e.t_s >= 0.0 && e.t_s < tau) {
            return Some(format!("event time {} outside [0, timeout)", e.t_s));
        }
        if !e.obj.is_finite() {
            return Some(format!("event objective {} is not finite", e.obj));
        }
    }
    for w in traj.events.windows(2) {
        if w[1].t_s <= w[0].t_s {
            return Some("event times must be strictly increasing".into());
        }
        if w[1].obj >= w[0].obj {
            return Some("event objectives must be strictly decreasing".into());
        }
    }
    if let Some(p) = traj.proved_optimal_at {
        if !(p >= 0.0 && p < tau) {
            return Some(format!("optimality proof time {p} outside [0, timeout)"));
        }
        match traj.events.last() {
            Some(last) if p < last.t_s => {
                return Some("optimality proven before the last solution was found".into())
            }
            None => return Some("optimality proven without any solution".into()),
            _ => {}
        }
    }
    if let Some(o) = outcome {
        match traj.last_obj() {
            Some(obj) if obj != o.obj => {
                return Some(format!("last objective {obj} differs from the run's final objective {}", o.obj))
            }
            None if o.obj.is_finite() => {
                return Some("empty trajectory for a run that found a solution".into())
            }
            _ => {}
        }
    }
    None
}

impl Scenario {
    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn timeout_s(&self) -> f64 {
        self.timeout_s
    }

    pub fn instances(&self) -> &[Instance] {
        &self.instances
    }

    pub fn solvers(&self) -> &[SolverId] {
        &self.solvers
    }

    pub fn n_instances(&self) -> usize {
        self.instances.len()
    }

    pub fn n_solvers(&self) -> usize {
        self.solvers.len()
    }

    pub fn instance_idx(&self, id: &InstanceId) -> Option<usize> {
        self.instance_index.get(id).copied()
    }

    pub fn solver_idx(&self, id: &SolverId) -> Option<usize> {
        self.solver_index.get(id).copied()
    }

    pub fn require_solver(&self, id: &SolverId) -> Result<usize, ScenarioError> {
        self.solver_idx(id).ok_or_else(|| ScenarioError::UnknownSolver(id.clone()))
    }

    pub fn require_instance(&self, id: &InstanceId) -> Result<usize, ScenarioError> {
        self.instance_idx(id).ok_or_else(|| ScenarioError::UnknownInstance(id.clone()))
    }

    /// Outcome by position.
    pub fn outcome_at(&self, instance: usize, solver: usize) -> &RunOutcome {
        &self.outcomes[instance * self.solvers.len() + solver]
    }

    pub fn outcome(&self, instance: &InstanceId, solver: &SolverId) -> Option<&RunOutcome> {
        Some(self.outcome_at(self.instance_idx(instance)?, self.solver_idx(solver)?))
    }

    pub fn trajectory_at(&self, instance: usize, solver: usize) -> Option<&Trajectory> {
        self.trajectories.get(&(instance, solver))
    }

    pub fn trajectory(&self, instance: &InstanceId, solver: &SolverId) -> Option<&Trajectory> {
        self.trajectory_at(self.instance_idx(instance)?, self.solver_idx(solver)?)
    }

    pub fn has_trajectories(&self) -> bool {
        !self.trajectories.is_empty()
    }

    /// Outcomes of one solver, in instance order.
    pub fn solver_outcomes(&self, solver: usize) -> impl Iterator<Item = &RunOutcome> + '_ {
        (0..self.instances.len()).map(move |i| self.outcome_at(i, solver))
    }

    /// Best known objective of an optimization instance: the supplied value,
    /// else the best final objective among the scenario's solvers. `None`
    /// for decision instances and when nobody found a solution.
    pub fn resolved_best_known(&self, instance: usize) -> Option<f64> {
        let inst = &self.instances[instance];
        if !inst.is_optimization() {
            return None;
        }
        if let Some(b) = inst.best_known_obj {
            return Some(b);
        }
        (0..self.solvers.len())
            .map(|s| self.outcome_at(instance, s).obj)
            .filter(|o| o.is_finite())
            .min_by(f64::total_cmp)
    }

    /// Converts back to the unvalidated representation.
    pub fn to_raw(&self) -> RawScenario {
        let mut outcomes = Vec::with_capacity(self.outcomes.len());
        for (i, inst) in self.instances.iter().enumerate() {
            for (s, solver) in self.solvers.iter().enumerate() {
                outcomes.push((inst.id.clone(), solver.clone(), *self.outcome_at(i, s)));
            }
        }
        RawScenario {
            id: self.id.clone(),
            instances: self.instances.clone(),
            solvers: self.solvers.clone(),
            timeout_s: self.timeout_s,
            outcomes,
            trajectories: self
                .trajectories
                .iter()
                .map(|(&(i, s), t)| (self.instances[i].id.clone(), self.solvers[s].clone(), t.clone()))
                .collect(),
        }
    }

    /// Projects the scenario onto a subset of its instances. The resulting
    /// instance order follows this scenario's order, not the argument's.
    pub fn restrict(&self, instances: &[InstanceId]) -> Result<Scenario, ScenarioError> {
        if instances.is_empty() {
            return Err(ScenarioError::EmptyRestriction);
        }
        let mut keep = HashSet::with_capacity(instances.len());
        for id in instances {
            keep.insert(self.require_instance(id)?);
        }
        let kept: Vec<usize> = (0..self.instances.len()).filter(|i| keep.contains(i)).collect();
        Ok(self.project(&kept, &(0..self.solvers.len()).collect::<Vec<_>>()))
    }

    /// Projects the scenario onto a subset of its solvers, keeping this
    /// scenario's solver order.
    pub fn restrict_solvers(&self, solvers: &[SolverId]) -> Result<Scenario, ScenarioError> {
        if solvers.is_empty() {
            return Err(ScenarioError::EmptyRestriction);
        }
        let mut keep = HashSet::with_capacity(solvers.len());
        for id in solvers {
            keep.insert(self.require_solver(id)?);
        }
        let kept: Vec<usize> = (0..self.solvers.len()).filter(|s| keep.contains(s)).collect();
        Ok(self.project(&(0..self.instances.len()).collect::<Vec<_>>(), &kept))
    }

    fn project(&self, inst: &[usize], solv: &[usize]) -> Scenario {
        let instances: Vec<Instance> = inst.iter().map(|&i| self.instances[i].clone()).collect();
        let solvers: Vec<SolverId> = solv.iter().map(|&s| self.solvers[s].clone()).collect();
        let mut outcomes = Vec::with_capacity(inst.len() * solv.len());
        let mut trajectories = BTreeMap::new();
        for (ni, &i) in inst.iter().enumerate() {
            for (ns, &s) in solv.iter().enumerate() {
                outcomes.push(*self.outcome_at(i, s));
                if let Some(t) = self.trajectories.get(&(i, s)) {
                    trajectories.insert((ni, ns), t.clone());
                }
            }
        }
        Scenario {
            id: self.id.clone(),
            instance_index: instances.iter().enumerate().map(|(i, x)| (x.id.clone(), i)).collect(),
            solver_index: solvers.iter().enumerate().map(|(s, x)| (x.clone(), s)).collect(),
            instances,
            solvers,
            timeout_s: self.timeout_s,
            outcomes,
            trajectories,
        }
    }
}
