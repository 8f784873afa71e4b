//! Every metric against the brute-force oracle on small generated scenarios.

use solvmetric::harness::{evaluate, EvalConfig};
use solvmetric::rng::SplitMix64;
use solvmetric::synthkit::{generate, oracle_score, ArchetypeSpec, Dist, SolverSpec};
use solvmetric::{BaseMetric, Metric, Scenario};

/// Small random spec: up to 10 instances and 4 solvers, with constant
/// runtimes now and then so that ties occur.
fn small_spec(seed: u64) -> ArchetypeSpec {
    let mut rng = SplitMix64::new(seed ^ 0xA5A5_5A5A);
    let timeout_s = if rng.below(2) == 0 { 10.0 } else { 100.0 };
    let n_solvers = 1 + rng.below(4) as usize;
    let solvers = (0..n_solvers)
        .map(|k| {
            let runtime = if rng.below(4) == 0 {
                Dist::Constant { value: (1 + rng.below(3)) as f64 }
            } else {
                let lo = rng.uniform(0.0, timeout_s / 2.0);
                Dist::Uniform { lo, hi: rng.uniform(lo, timeout_s - 0.01) }
            };
            SolverSpec {
                name: format!("s{k}"),
                solve_probability: [0.0, 0.3, 0.7, 1.0][rng.below(4) as usize],
                runtime,
                objective_quality: (rng.below(3) > 0).then(|| Dist::Uniform { lo: 0.0, hi: 30.0 }),
            }
        })
        .collect();
    ArchetypeSpec {
        seed,
        n_instances: 1 + rng.below(10) as usize,
        timeout_s,
        solvers,
        optimization_share: [0.0, 0.5, 1.0][rng.below(3) as usize],
        id: None,
    }
}

fn metrics() -> Vec<Metric> {
    vec![
        Metric::Par { lambda: 1.0 },
        Metric::Par { lambda: 2.0 },
        Metric::Par { lambda: 10.0 },
        Metric::Solved,
        Metric::Mznc { delta: 0.0 },
        Metric::Mznc { delta: 2.5 },
        Metric::Mznc { delta: 40.0 },
        Metric::NormalizedRuntime,
        Metric::Speedup,
        Metric::ClosedGap { base: BaseMetric::Par { lambda: 10.0 } },
        Metric::ClosedGap { base: BaseMetric::Runtime },
        Metric::ClosedGap { base: BaseMetric::Area },
        Metric::Ratio,
        Metric::Area,
        Metric::BoundedReward { alpha: 0.25, beta: 0.75 },
        Metric::BoundedReward { alpha: 0.0, beta: 1.0 },
    ]
}

fn check(scenario: &Scenario, metric: Metric) -> usize {
    let library = evaluate(scenario, &EvalConfig::new(metric));
    let mut compared = 0;
    for solver in scenario.solvers() {
        let oracle = oracle_score(scenario, &metric, solver);
        match (&library, oracle) {
            (Ok(ev), Ok(expected)) => {
                let got = ev.merged.score(solver).unwrap();
                let tol = 1e-9 * expected.abs().max(1.0);
                assert!((got - expected).abs() <= tol, "{} {metric} {solver}: library {got}, oracle {expected}", scenario.id());
                compared += 1;
            }
            (Err(_), Err(_)) => {}
            (lib, orc) => panic!("{} {metric} {solver}: library {lib:?} vs oracle {orc:?}", scenario.id()),
        }
    }
    compared
}

#[test]
fn two_hundred_scenarios_match_the_oracle() {
    let metrics = metrics();
    let mut compared = vec![0; metrics.len()];
    for seed in 0..200 {
        let sc = generate(&small_spec(seed)).unwrap();
        for (k, m) in metrics.iter().enumerate() {
            compared[k] += check(&sc, *m);
        }
    }
    for (m, n) in metrics.iter().zip(&compared) {
        assert!(*n >= 50, "{m}: only {n} defined comparisons");
    }
}

#[test]
fn oracle_refuses_large_scenarios() {
    let sc = generate(&ArchetypeSpec::thorough_vs_fast(1, 51)).unwrap();
    assert!(oracle_score(&sc, &Metric::Solved, &"A".into()).is_err());
}
