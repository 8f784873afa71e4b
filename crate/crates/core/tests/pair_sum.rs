use solvmetric::metrics::mznc_pair;
use solvmetric::rng::SplitMix64;
use solvmetric::synthkit::{generate, ArchetypeSpec, Dist, SolverSpec};
use solvmetric::InstanceKind;

fn spec(seed: u64) -> ArchetypeSpec {
    let mut rng = SplitMix64::new(seed);
    let solver = |name: &str, rng: &mut SplitMix64| SolverSpec {
        name: name.into(),
        solve_probability: rng.uniform(0.0, 1.0),
        // coarse runtimes make equal times common
        runtime: if rng.below(2) == 0 { Dist::Constant { value: 5.0 } } else { Dist::Uniform { lo: 0.0, hi: 20.0 } },
        objective_quality: (rng.below(2) == 0).then_some(Dist::Uniform { lo: 0.0, hi: 3.0 }),
    };
    ArchetypeSpec {
        seed,
        n_instances: 50,
        timeout_s: 20.0,
        solvers: vec![solver("x", &mut rng), solver("y", &mut rng), solver("z", &mut rng)],
        optimization_share: 0.5,
        id: None,
    }
}

#[test]
fn pair_points_sum_to_zero_or_one() {
    let mut cells = 0;
    let mut zeros = 0;
    for seed in 0.. {
        let sc = generate(&spec(seed)).unwrap();
        for (i, inst) in sc.instances().iter().enumerate() {
            for a in 0..sc.n_solvers() {
                for b in a + 1..sc.n_solvers() {
                    let (sa, sb) = (&sc.solvers()[a], &sc.solvers()[b]);
                    let sum = mznc_pair(&inst.id, sa, sb, &sc, 0.0).unwrap() + mznc_pair(&inst.id, sb, sa, &sc, 0.0).unwrap();
                    let unknown = |s: usize| {
                        let o = sc.outcome_at(i, s);
                        match inst.kind {
                            InstanceKind::Decision => o.time_s == sc.timeout_s(),
                            InstanceKind::Optimization => o.obj == f64::INFINITY,
                        }
                    };
                    if unknown(a) && unknown(b) {
                        assert_eq!(sum, 0.0);
                        zeros += 1;
                    } else {
                        assert!((sum - 1.0).abs() < 1e-12, "{} {} {sa} {sb}: {sum}", sc.id(), inst.id);
                    }
                    cells += 1;
                }
            }
        }
        if cells >= 10_000 {
            break;
        }
    }
    assert!(zeros > 0 && zeros < cells);
}
