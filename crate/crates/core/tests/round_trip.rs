use std::fs;

use solvmetric::io::{parse_runs, read_runs, trajectory_path_for, write_runs, write_trajectories};
use solvmetric::synthkit::{generate, ArchetypeSpec, Dist};

fn spec(seed: u64) -> ArchetypeSpec {
    let mut spec = ArchetypeSpec::thorough_vs_fast(seed, 5 + (seed as usize % 30));
    spec.optimization_share = [0.0, 0.4, 1.0][seed as usize % 3];
    spec.solvers[0].objective_quality = Some(Dist::Uniform { lo: 0.0, hi: 50.0 });
    spec.timeout_s = [100.0, 60.5, 1200.0][seed as usize % 3];
    spec.solvers[0].runtime = Dist::Uniform { lo: 0.0, hi: spec.timeout_s };
    spec
}

#[test]
fn emit_then_parse_is_identity() {
    for seed in 0..50 {
        let sc = generate(&spec(seed)).unwrap();
        let (mut runs, mut traj) = (Vec::new(), Vec::new());
        write_runs(&sc, &mut runs).unwrap();
        write_trajectories(&sc, &mut traj).unwrap();
        let back = read_runs(runs.as_slice(), Some(traj.as_slice()), sc.id(), sc.timeout_s()).unwrap();
        assert_eq!(back, sc, "seed {seed}");
    }
}

#[test]
fn files_with_sibling_trajectories() {
    let dir = std::env::temp_dir().join(format!("solvmetric-rt-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let sc = generate(&ArchetypeSpec { id: Some("demo".into()), ..spec(1) }).unwrap();
    assert!(sc.has_trajectories());
    let path = dir.join("demo.csv");
    write_runs(&sc, fs::File::create(&path).unwrap()).unwrap();
    write_trajectories(&sc, fs::File::create(trajectory_path_for(&path)).unwrap()).unwrap();
    assert_eq!(parse_runs(&path, sc.timeout_s()).unwrap(), sc);
    fs::remove_dir_all(&dir).unwrap();
}
