//! Published per-scenario scores used as fixtures for aggregation and ranking.

use std::collections::BTreeMap;
use std::path::PathBuf;

use solvmetric::harness::{aggregate, aggregate_tables, rank, AggregationMethod};
use solvmetric::io::{emit_report, Provenance, Report, ReportFormat};
use solvmetric::{BaseMetric, Metric, ScoreTable, SolverId};

fn fixture(name: &str) -> Vec<BTreeMap<String, String>> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name);
    let mut reader = csv::Reader::from_path(path).unwrap();
    reader.deserialize().map(Result::unwrap).collect()
}

fn column(rows: &[BTreeMap<String, String>], name: &str, skip: Option<&str>) -> Vec<f64> {
    rows.iter()
        .filter(|r| Some(r["scenario"].as_str()) != skip)
        .map(|r| r[name].parse().unwrap())
        .collect()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 5e-4
}

#[test]
fn closed_gap_totals() {
    let rows = fixture("scenario_totals.csv");
    let sum = |c, skip| aggregate(&column(&rows, c, skip), AggregationMethod::Sum).unwrap();
    assert!(close(sum("asap_closed_gap", None), 9.3077));
    assert!(close(sum("rf_closed_gap", None), -18.1439));
    assert!(close(sum("asap_closed_gap", Some("TSP-LION2015")), 8.9035));
    assert!(close(sum("rf_closed_gap", Some("TSP-LION2015")), 1.013));
}

fn per_scenario_tables(metric: Metric, asap: &str, rf: &str) -> Vec<ScoreTable> {
    fixture("scenario_totals.csv")
        .iter()
        .map(|r| {
            let mut t = ScoreTable::new(&metric);
            t.per_solver.insert("ASAP".into(), r[asap].parse().unwrap());
            t.per_solver.insert("RF".into(), r[rf].parse().unwrap());
            t
        })
        .collect()
}

#[test]
fn rank_reversal_between_metrics() {
    let mznc = aggregate_tables(&per_scenario_tables(Metric::Mznc { delta: 0.0 }, "asap_mznc", "rf_mznc"), AggregationMethod::Sum)
        .unwrap();
    assert!(close(mznc.per_solver[&SolverId::from("ASAP")], 29.4573));
    assert!(close(mznc.per_solver[&SolverId::from("RF")], 40.0826));
    assert_eq!(rank(&[mznc]).unwrap()[0].solver, SolverId::from("RF"));

    let gap_metric = Metric::ClosedGap { base: BaseMetric::default() };
    let gap = aggregate_tables(&per_scenario_tables(gap_metric, "asap_closed_gap", "rf_closed_gap"), AggregationMethod::Sum)
        .unwrap();
    assert_eq!(rank(&[gap]).unwrap()[0].solver, SolverId::from("ASAP"));
}

#[test]
fn geometric_mean_refuses_negative_closed_gaps() {
    let rows = fixture("scenario_totals.csv");
    assert!(aggregate(&column(&rows, "rf_closed_gap", None), AggregationMethod::GeometricMean).is_err());
    assert!(aggregate(&column(&rows, "asap_closed_gap", None), AggregationMethod::GeometricMean).is_ok());
}

#[test]
fn leaderboard_layout() {
    let rows = fixture("leaderboard.csv");
    let metrics = [
        (Metric::ClosedGap { base: BaseMetric::default() }, "closed_gap"),
        (Metric::Speedup, "speedup"),
        (Metric::NormalizedRuntime, "norm_runtime"),
    ];
    let tables: Vec<ScoreTable> = metrics
        .iter()
        .map(|(m, col)| {
            let mut t = ScoreTable::new(m);
            for r in &rows {
                t.per_solver.insert(r["solver"].as_str().into(), r[*col].parse().unwrap());
            }
            t
        })
        .collect();
    let report = Report::from_tables("oasc", &tables, Provenance::new("t")).unwrap();
    let text = String::from_utf8(emit_report(&report, ReportFormat::Text)).unwrap();
    let line = |name: &str| text.lines().find(|l| l.starts_with(name)).unwrap().to_string();
    assert!(line("ASAP").contains("0.4866*"));
    assert!(line("sunny-as2").contains("0.4122*") && line("sunny-as2").ends_with("0.8879*"));
    assert!(!line("Random Forest").contains('*'));
    let body: Vec<&str> = text.lines().skip_while(|l| !l.starts_with("---")).skip(1).collect();
    assert_eq!(body.len(), 6);
    assert!(body[0].starts_with("ASAP") && body[5].starts_with("Random Forest"));
}
