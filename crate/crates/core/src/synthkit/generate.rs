use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::SplitMix64;
use crate::scenario::{
    round_ms, validate_scenario, Instance, RawScenario, RunOutcome, Scenario, SolverId, Trajectory, TrajectoryEvent,
};

#[derive(Debug, Error, PartialEq)]
pub enum SynthError {
    #[error("invalid archetype spec: {0}")]
    BadSpec(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Dist {
    Uniform { lo: f64, hi: f64 },
    Constant { value: f64 },
}

impl Dist {
    fn draw(&self, rng: &mut SplitMix64) -> f64 {
        match *self {
            Dist::Uniform { lo, hi } => rng.uniform(lo, hi),
            Dist::Constant { value } => value,
        }
    }

    fn support(&self) -> (f64, f64) {
        match *self {
            Dist::Uniform { lo, hi } => (lo, hi),
            Dist::Constant { value } => (value, value),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverSpec {
    pub name: String,
    pub solve_probability: f64,
    pub runtime: Dist,
    /// Offset above the optimum of the best solution found when an
    /// optimization instance is not solved; no solution at all when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objective_quality: Option<Dist>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArchetypeSpec {
    pub seed: u64,
    pub n_instances: usize,
    pub timeout_s: f64,
    pub solvers: Vec<SolverSpec>,
    /// Probability that an instance is an optimization instance.
    #[serde(default)]
    pub optimization_share: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
}

impl ArchetypeSpec {
    /// A slow solver that almost always finishes ("thorough") against a fast
    /// one that times out more often.
    pub fn thorough_vs_fast(seed: u64, n_instances: usize) -> Self {
        Self {
            seed,
            n_instances,
            timeout_s: 100.0,
            solvers: vec![
                SolverSpec {
                    name: "A".into(),
                    solve_probability: 0.95,
                    runtime: Dist::Uniform { lo: 40.0, hi: 90.0 },
                    objective_quality: None,
                },
                SolverSpec {
                    name: "B".into(),
                    solve_probability: 0.80,
                    runtime: Dist::Uniform { lo: 1.0, hi: 10.0 },
                    objective_quality: None,
                },
            ],
            optimization_share: 0.0,
            id: None,
        }
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |m: String| Err(SynthError::BadSpec(m));
        let tau = self.timeout_s;
        if !(tau.is_finite() && tau > 0.0) {
            return bad(format!("timeout must be positive and finite, got {tau}"));
        }
        if self.n_instances == 0 {
            return bad("n_instances must be positive".into());
        }
        if self.solvers.is_empty() {
            return bad("at least one solver is required".into());
        }
        if !(0.0..=1.0).contains(&self.optimization_share) {
            return bad(format!("optimization_share {} outside [0, 1]", self.optimization_share));
        }
        for (k, s) in self.solvers.iter().enumerate() {
            if self.solvers[..k].iter().any(|o| o.name == s.name) {
                return bad(format!("duplicate solver name `{}`", s.name));
            }
            if !(0.0..=1.0).contains(&s.solve_probability) {
                return bad(format!("solver `{}`: probability {} outside [0, 1]", s.name, s.solve_probability));
            }
            let (lo, hi) = s.runtime.support();
            if !(0.0 <= lo && lo <= hi && hi <= tau) || (lo == hi && hi >= tau) {
                return bad(format!("solver `{}`: runtime support [{lo}, {hi}] not within [0, timeout)", s.name));
            }
            if let Some(q) = s.objective_quality {
                let (lo, hi) = q.support();
                if !(0.0 <= lo && lo <= hi && hi.is_finite()) {
                    return bad(format!("solver `{}`: objective offsets must be finite and >= 0", s.name));
                }
            }
        }
        Ok(())
    }
}

fn draw_runtime(rng: &mut SplitMix64, d: &Dist, tau: f64) -> f64 {
    round_ms(d.draw(rng)).clamp(0.0, round_ms(tau - 0.001))
}

/// Staircase of 1 to 3 improving solutions ending at `final_obj`, found
/// within `[0, horizon]`.
fn staircase(rng: &mut SplitMix64, final_obj: f64, horizon: f64) -> Vec<TrajectoryEvent> {
    let steps = 1 + rng.below(3) as usize;
    let mut times: Vec<f64> = (0..steps).map(|_| round_ms(rng.uniform(0.0, horizon))).collect();
    times.sort_by(f64::total_cmp);
    times.dedup();
    let n = times.len();
    let step = (1 + rng.below(10)) as f64;
    times
        .into_iter()
        .enumerate()
        .map(|(k, t_s)| TrajectoryEvent { t_s, obj: final_obj + step * (n - 1 - k) as f64 })
        .collect()
}

/// Builds a scenario from `spec`. The same spec always yields the same
/// scenario. Runs that do not solve an instance are timeouts at `timeout_s`.
pub fn generate(spec: &ArchetypeSpec) -> Result<Scenario, SynthError> {
    spec.validate()?;
    let tau = spec.timeout_s;
    let mut rng = SplitMix64::new(spec.seed);
    let width = spec.n_instances.to_string().len().max(3);
    let mut raw = RawScenario {
        id: spec.id.clone().unwrap_or_else(|| format!("synth-{}", spec.seed)),
        solvers: spec.solvers.iter().map(|s| SolverId(s.name.clone())).collect(),
        timeout_s: tau,
        ..Default::default()
    };
    for i in 0..spec.n_instances {
        let id = format!("inst-{i:0width$}");
        let optimization = spec.optimization_share > 0.0 && rng.next_f64() < spec.optimization_share;
        let optimum = if optimization { Some((10 + rng.below(991)) as f64) } else { None };
        raw.instances.push(if optimization { Instance::optimization(id.clone()) } else { Instance::decision(id.clone()) });
        for s in &spec.solvers {
            let solved = rng.next_f64() < s.solve_probability;
            let time = draw_runtime(&mut rng, &s.runtime, tau);
            let solver = SolverId(s.name.clone());
            let outcome = match (optimum, solved) {
                (None, true) => RunOutcome::solved(time),
                (None, false) => RunOutcome::timeout(tau),
                (Some(opt), true) => {
                    let events = staircase(&mut rng, opt, time);
                    raw.trajectories.push((id.clone().into(), solver.clone(), Trajectory::new(events, Some(time))));
                    RunOutcome::solved_with(time, opt)
                }
                (Some(opt), false) => match s.objective_quality {
                    Some(q) => {
                        let obj = opt + q.draw(&mut rng).round();
                        let horizon = round_ms(tau - 0.001);
                        let events = staircase(&mut rng, obj, horizon);
                        raw.trajectories.push((id.clone().into(), solver.clone(), Trajectory::new(events, None)));
                        RunOutcome::timeout_with(tau, obj)
                    }
                    None => RunOutcome::timeout(tau),
                },
            };
            raw.outcomes.push((id.clone().into(), solver, outcome));
        }
    }
    validate_scenario(raw).map_err(|e| SynthError::BadSpec(format!("generated scenario is invalid: {e}")))
}
