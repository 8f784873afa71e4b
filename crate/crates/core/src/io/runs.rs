use std::collections::HashMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use super::IoError;
use crate::scenario::{
    round_ms, validate_scenario, Instance, InstanceId, RawScenario, RunOutcome, RunStatus, Scenario, SolverId,
    Trajectory, TrajectoryEvent,
};

const RUN_COLUMNS: [&str; 5] = ["instance_id", "solver_id", "status", "time_s", "obj"];
const TRAJECTORY_COLUMNS: [&str; 4] = ["instance_id", "solver_id", "t_s", "obj"];

/// Sibling trajectory file of a runs file: `runs.csv` -> `runs_trajectories.csv`.
pub fn trajectory_path_for(runs: &Path) -> PathBuf {
    let stem = runs.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    runs.with_file_name(format!("{stem}_trajectories.csv"))
}

/// Reads a runs CSV and, if present, its sibling trajectory file. The
/// scenario id is the file stem.
pub fn parse_runs(path: &Path, timeout_s: f64) -> Result<Scenario, IoError> {
    let runs = File::open(path).map_err(|e| IoError::io(path, e))?;
    let traj_path = trajectory_path_for(path);
    let traj = if traj_path.is_file() {
        Some(File::open(&traj_path).map_err(|e| IoError::io(&traj_path, e))?)
    } else {
        None
    };
    let id = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    read_runs(runs, traj, &id, timeout_s)
}

fn column_map(headers: &csv::StringRecord, allowed: &[&str], required: &[&str]) -> Result<HashMap<String, usize>, IoError> {
    let mut map = HashMap::new();
    for (k, h) in headers.iter().enumerate() {
        let h = h.trim();
        if !allowed.contains(&h) {
            return Err(IoError::SchemaError(format!("unexpected column `{h}`; expected {}", allowed.join(","))));
        }
        if map.insert(h.to_string(), k).is_some() {
            return Err(IoError::SchemaError(format!("duplicate column `{h}`")));
        }
    }
    for r in required {
        if !map.contains_key(*r) {
            return Err(IoError::SchemaError(format!("missing column `{r}`")));
        }
    }
    Ok(map)
}

fn csv_error(e: csv::Error) -> IoError {
    let line = e.position().map_or(0, |p| p.line());
    IoError::row(line, e.to_string())
}

fn parse_number(line: u64, column: &str, text: &str) -> Result<f64, IoError> {
    let v: f64 = text.trim().parse().map_err(|_| IoError::row(line, format!("{column}: cannot parse `{text}` as a number")))?;
    if v.is_nan() {
        return Err(IoError::row(line, format!("{column}: NaN is not allowed")));
    }
    Ok(v)
}

fn parse_status(line: u64, text: &str) -> Result<RunStatus, IoError> {
    match text.trim().to_ascii_lowercase().as_str() {
        "ok" | "solved" => Ok(RunStatus::Solved),
        "timeout" => Ok(RunStatus::Timeout),
        "memout" | "crash" | "error" => Ok(RunStatus::Error),
        other => Err(IoError::row(line, format!("unknown status `{other}`"))),
    }
}

fn status_label(status: RunStatus) -> &'static str {
    match status {
        RunStatus::Solved => "ok",
        RunStatus::Timeout => "timeout",
        RunStatus::Error => "error",
    }
}

/// Parses runs (and optionally trajectories) from readers.
///
/// An instance is an optimization instance iff at least one of its rows has
/// a non-empty `obj`. Unsolved runs are recorded at the timeout whatever
/// their `time_s`. A run with trajectory rows that ended `ok` is taken to
/// have proven its final solution optimal at its runtime.
pub fn read_runs<R: Read, T: Read>(
    runs: R,
    trajectories: Option<T>,
    id: &str,
    timeout_s: f64,
) -> Result<Scenario, IoError> {
    if !(timeout_s.is_finite() && timeout_s > 0.0) {
        return Err(IoError::Validation(crate::scenario::ScenarioError::Invalid(vec![
            crate::scenario::Violation::BadTimeout(timeout_s),
        ])));
    }
    let mut reader = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(runs);
    let cols = column_map(&reader.headers().map_err(csv_error)?.clone(), &RUN_COLUMNS, &RUN_COLUMNS[..4])?;
    let (ci, cs, cst, ct) = (cols["instance_id"], cols["solver_id"], cols["status"], cols["time_s"]);
    let co = cols.get("obj").copied();

    struct Row {
        instance: InstanceId,
        solver: SolverId,
        status: RunStatus,
        time_s: f64,
        obj: Option<f64>,
    }
    let mut rows = Vec::new();
    let mut instances: Vec<InstanceId> = Vec::new();
    let mut seen_instances = HashMap::new();
    let mut solvers: Vec<SolverId> = Vec::new();
    let mut seen_solvers = HashMap::new();
    let mut optimization: HashMap<InstanceId, bool> = HashMap::new();
    for record in reader.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |k: usize| record.get(k).unwrap_or("");
        let instance = InstanceId::from(field(ci));
        let solver = SolverId::from(field(cs));
        if instance.0.is_empty() || solver.0.is_empty() {
            return Err(IoError::row(line, "empty instance_id or solver_id"));
        }
        let status = parse_status(line, field(cst))?;
        let time_s = parse_number(line, "time_s", field(ct))?;
        if time_s < 0.0 || round_ms(time_s) > round_ms(timeout_s) {
            return Err(IoError::row(line, format!("time_s {time_s} outside [0, {timeout_s}]")));
        }
        let obj = match co.map(field).filter(|t| !t.is_empty()) {
            None => None,
            Some(t) => Some(parse_number(line, "obj", t)?),
        };
        if seen_instances.insert(instance.clone(), ()).is_none() {
            instances.push(instance.clone());
        }
        if seen_solvers.insert(solver.clone(), ()).is_none() {
            solvers.push(solver.clone());
        }
        *optimization.entry(instance.clone()).or_default() |= obj.is_some();
        rows.push(Row { instance, solver, status, time_s, obj });
    }
    if rows.is_empty() {
        return Err(IoError::SchemaError("runs file has no data rows".into()));
    }

    let mut raw = RawScenario {
        id: id.to_string(),
        instances: instances
            .iter()
            .map(|i| if optimization[i] { Instance::optimization(i.clone()) } else { Instance::decision(i.clone()) })
            .collect(),
        solvers,
        timeout_s,
        ..Default::default()
    };
    let mut solved_at = HashMap::new();
    for row in rows {
        let obj = row.obj.unwrap_or(f64::INFINITY);
        let time_s = if row.status.is_solved() { row.time_s } else { timeout_s };
        if row.status.is_solved() {
            solved_at.insert((row.instance.clone(), row.solver.clone()), round_ms(time_s));
        }
        raw.outcomes.push((row.instance, row.solver, RunOutcome { time_s, status: row.status, obj }));
    }

    if let Some(t) = trajectories {
        raw.trajectories = read_trajectory_rows(t, &solved_at)?;
    }
    Ok(validate_scenario(raw)?)
}

fn read_trajectory_rows<T: Read>(
    input: T,
    solved_at: &HashMap<(InstanceId, SolverId), f64>,
) -> Result<Vec<(InstanceId, SolverId, Trajectory)>, IoError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(input);
    let cols = column_map(&reader.headers().map_err(csv_error)?.clone(), &TRAJECTORY_COLUMNS, &TRAJECTORY_COLUMNS)?;
    let mut out: Vec<(InstanceId, SolverId, Trajectory)> = Vec::new();
    let mut index: HashMap<(InstanceId, SolverId), usize> = HashMap::new();
    for record in reader.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |name: &str| record.get(cols[name]).unwrap_or("");
        let key = (InstanceId::from(field("instance_id")), SolverId::from(field("solver_id")));
        let t_s = parse_number(line, "t_s", field("t_s"))?;
        let obj = parse_number(line, "obj", field("obj"))?;
        if !obj.is_finite() {
            return Err(IoError::row(line, "trajectory obj must be finite"));
        }
        let k = *index.entry(key.clone()).or_insert_with(|| {
            let proof = solved_at.get(&key).copied();
            out.push((key.0.clone(), key.1.clone(), Trajectory::new(Vec::new(), proof)));
            out.len() - 1
        });
        out[k].2.events.push(TrajectoryEvent { t_s, obj });
    }
    Ok(out)
}

fn format_obj(obj: f64) -> String {
    format!("{obj}")
}

/// Writes the runs CSV, instance-major in scenario order. `obj` is empty on
/// decision instances and `inf` for optimization runs without a solution.
pub fn write_runs<W: Write>(scenario: &Scenario, out: W) -> Result<(), IoError> {
    let mut w = csv::Writer::from_writer(out);
    let any_opt = scenario.instances().iter().any(Instance::is_optimization);
    let header: &[&str] = if any_opt { &RUN_COLUMNS } else { &RUN_COLUMNS[..4] };
    w.write_record(header).map_err(csv_error)?;
    for (i, inst) in scenario.instances().iter().enumerate() {
        for (s, solver) in scenario.solvers().iter().enumerate() {
            let o = scenario.outcome_at(i, s);
            let time = format!("{:.3}", o.time_s);
            let mut rec = vec![inst.id.as_str(), solver.as_str(), status_label(o.status), time.as_str()];
            let obj = if inst.is_optimization() { format_obj(o.obj) } else { String::new() };
            if any_opt {
                rec.push(&obj);
            }
            w.write_record(&rec).map_err(csv_error)?;
        }
    }
    w.flush().map_err(|e| IoError::io("<output>", e))
}

/// Writes every trajectory event, grouped per run in scenario order.
pub fn write_trajectories<W: Write>(scenario: &Scenario, out: W) -> Result<(), IoError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRAJECTORY_COLUMNS).map_err(csv_error)?;
    for (i, inst) in scenario.instances().iter().enumerate() {
        for (s, solver) in scenario.solvers().iter().enumerate() {
            let Some(traj) = scenario.trajectory_at(i, s) else { continue };
            for e in &traj.events {
                w.write_record([inst.id.as_str(), solver.as_str(), &format!("{:.3}", e.t_s), &format_obj(e.obj)])
                    .map_err(csv_error)?;
            }
        }
    }
    w.flush().map_err(|e| IoError::io("<output>", e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Scenario, IoError> {
        read_runs(text.as_bytes(), None::<&[u8]>, "t", 100.0)
    }

    #[test]
    fn two_by_two() {
        let sc = parse("instance_id,solver_id,status,time_s\ni1,a,ok,1.5\ni1,b,timeout,100\ni2,a,memout,3\ni2,b,ok,7\n")
            .unwrap();
        assert_eq!(sc.n_instances(), 2);
        assert_eq!(sc.solvers(), [SolverId::from("a"), SolverId::from("b")]);
        let o = sc.outcome(&"i2".into(), &"a".into()).unwrap();
        assert_eq!((o.status, o.time_s, o.obj), (RunStatus::Error, 100.0, f64::INFINITY));
        assert!(sc.instances().iter().all(|i| !i.is_optimization()));
    }

    #[test]
    fn time_above_timeout_is_a_row_error() {
        let err = parse("instance_id,solver_id,status,time_s\ni1,a,ok,1\ni1,b,timeout,100.5\n").unwrap_err();
        assert!(matches!(err, IoError::RowError { line: 3, .. }), "{err:?}");
    }

    #[test]
    fn schema_errors() {
        assert!(matches!(parse("instance_id,solver_id,time_s\ni1,a,1\n"), Err(IoError::SchemaError(_))));
        assert!(matches!(parse("instance_id,solver_id,status,time_s,extra\n"), Err(IoError::SchemaError(_))));
        assert!(matches!(parse("instance_id,solver_id,status,time_s\ni1,a,weird,1\n"), Err(IoError::RowError { .. })));
        assert!(matches!(parse("instance_id,solver_id,status,time_s\ni1,a,ok,1\ni1,b,ok,1\ni2,a,ok,1\n"), Err(IoError::Validation(_))));
    }

    #[test]
    fn optimization_round_trip_with_trajectories() {
        let runs = "instance_id,solver_id,status,time_s,obj\ni1,a,ok,4,10\ni1,b,timeout,100,12\ni2,a,ok,1,\ni2,b,timeout,100,\ni3,a,timeout,100,inf\ni3,b,ok,50,7\n";
        let traj = "instance_id,solver_id,t_s,obj\ni1,a,1,15\ni1,a,3,10\ni1,b,20,12\ni3,b,10,7\n";
        let sc = read_runs(runs.as_bytes(), Some(traj.as_bytes()), "t", 100.0).unwrap();
        assert!(sc.instances()[0].is_optimization() && !sc.instances()[1].is_optimization());
        assert_eq!(sc.trajectory(&"i1".into(), &"a".into()).unwrap().proved_optimal_at, Some(4.0));
        assert_eq!(sc.trajectory(&"i1".into(), &"b".into()).unwrap().proved_optimal_at, None);

        let (mut r, mut t) = (Vec::new(), Vec::new());
        write_runs(&sc, &mut r).unwrap();
        write_trajectories(&sc, &mut t).unwrap();
        let back = read_runs(r.as_slice(), Some(t.as_slice()), "t", 100.0).unwrap();
        assert_eq!(back, sc);
    }
}
