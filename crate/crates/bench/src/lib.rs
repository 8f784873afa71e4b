//! Scenario builders shared by the benchmarks.

use solvmetric::synthkit::{generate, ArchetypeSpec, Dist, SolverSpec};
use solvmetric::Scenario;

/// Thorough-vs-fast archetype widened to `n_solvers` with staggered
/// solve rates and runtimes. A third of the instances are optimization.
pub fn wide_scenario(seed: u64, n_instances: usize, n_solvers: usize) -> Scenario {
    let mut spec = ArchetypeSpec::thorough_vs_fast(seed, n_instances);
    spec.optimization_share = 1.0 / 3.0;
    let template = spec.solvers[0].clone();
    spec.solvers = (0..n_solvers)
        .map(|k| {
            let f = k as f64 / n_solvers.max(1) as f64;
            SolverSpec {
                name: format!("s{k:02}"),
                solve_probability: 0.95 - 0.5 * f,
                runtime: Dist::Uniform { lo: 1.0, hi: spec.timeout_s * (1.0 - 0.7 * f) },
                objective_quality: Some(Dist::Uniform { lo: 0.0, hi: 10.0 + 40.0 * f }),
                ..template.clone()
            }
        })
        .collect();
    generate(&spec).expect("valid benchmark spec")
}
