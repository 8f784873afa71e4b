//! Machine- and human-readable result documents.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::baselines::{BaselineReport, SbsPolicy};
use crate::harness::{aggregate_tables, rank, AggregationMethod, Evaluation, HarnessError, RankEntry};
use crate::metrics::{Metric, ParamValue, ScoreTable};
use crate::scenario::SolverId;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaselineRecord {
    pub metric: String,
    pub repeat: usize,
    pub fold: usize,
    #[serde(flatten)]
    pub report: BaselineReport,
}

/// Scores of one scenario in a multi-scenario report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioRow {
    pub scenario: String,
    pub scores: BTreeMap<SolverId, f64>,
}

/// Per-fold scores of one metric.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellRecord {
    pub metric: String,
    pub repeat: usize,
    pub fold: usize,
    pub scores: BTreeMap<SolverId, f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool_version: String,
    pub seed: Option<u64>,
    pub folds: Option<usize>,
    pub repeats: Option<usize>,
    pub sbs_policy: Option<SbsPolicy>,
    /// How each metric was merged over folds or scenarios.
    pub aggregation: BTreeMap<String, AggregationMethod>,
    pub timeouts_s: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cells: Vec<CellRecord>,
}

impl Provenance {
    pub fn new(tool_version: impl Into<String>) -> Self {
        Self { tool_version: tool_version.into(), ..Default::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub scenario: String,
    /// Metric ids, in column order.
    pub metric: Vec<String>,
    pub params: BTreeMap<String, BTreeMap<String, ParamValue>>,
    pub scores: BTreeMap<String, BTreeMap<SolverId, f64>>,
    pub ranking: BTreeMap<String, Vec<RankEntry>>,
    pub baselines: Vec<BaselineRecord>,
    pub warnings: Vec<String>,
    pub provenance: Provenance,
    /// Per-scenario scores behind a cross-scenario total.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub breakdown: Vec<ScenarioRow>,
}

impl Report {
    fn empty(scenario: &str, provenance: Provenance) -> Self {
        Report {
            scenario: scenario.into(),
            metric: Vec::new(),
            params: BTreeMap::new(),
            scores: BTreeMap::new(),
            ranking: BTreeMap::new(),
            baselines: Vec::new(),
            warnings: Vec::new(),
            provenance,
            breakdown: Vec::new(),
        }
    }

    fn push_table(&mut self, table: &ScoreTable) -> Result<(), HarnessError> {
        let id = table.metric_id.clone();
        self.ranking.insert(id.clone(), rank(std::slice::from_ref(table))?);
        self.params.insert(id.clone(), table.params.clone());
        self.scores.insert(id.clone(), table.per_solver.clone());
        self.metric.push(id);
        Ok(())
    }

    /// Ready-made score tables, one column each.
    pub fn from_tables(scenario: &str, tables: &[ScoreTable], provenance: Provenance) -> Result<Self, HarnessError> {
        let mut report = Report::empty(scenario, provenance);
        for t in tables {
            if report.scores.contains_key(&t.metric_id) {
                return Err(HarnessError::MixedMetrics(t.metric_id.clone(), t.metric_id.clone()));
            }
            report.push_table(t)?;
        }
        Ok(report)
    }

    /// One scenario scored under several metrics, one column each.
    pub fn from_evaluations(
        scenario: &str,
        evaluations: &[(Metric, Evaluation)],
        mut provenance: Provenance,
    ) -> Result<Self, HarnessError> {
        let mut report = Report::empty(scenario, Provenance::default());
        let folded = provenance.folds.is_some();
        for (metric, ev) in evaluations {
            let id = metric.id().to_string();
            if report.scores.contains_key(&id) {
                return Err(HarnessError::MixedMetrics(id.clone(), id));
            }
            report.push_table(&ev.merged)?;
            provenance.aggregation.insert(id.clone(), ev.aggregation);
            for cell in &ev.cells {
                if let Some(b) = &cell.baseline {
                    report.baselines.push(BaselineRecord {
                        metric: id.clone(),
                        repeat: cell.repeat,
                        fold: cell.fold,
                        report: b.clone(),
                    });
                }
                if folded {
                    provenance.cells.push(CellRecord {
                        metric: id.clone(),
                        repeat: cell.repeat,
                        fold: cell.fold,
                        scores: cell.table.per_solver.clone(),
                    });
                }
            }
            report.warnings.extend(ev.warnings.iter().map(|w| format!("{id}: {w}")));
        }
        report.provenance = provenance;
        Ok(report)
    }

    /// Several scenarios under one metric, combined into a total per solver.
    pub fn from_scenarios(
        label: &str,
        rows: Vec<(String, ScoreTable)>,
        method: AggregationMethod,
        mut provenance: Provenance,
    ) -> Result<Self, HarnessError> {
        let tables: Vec<ScoreTable> = rows.iter().map(|(_, t)| t.clone()).collect();
        let total = aggregate_tables(&tables, method)?;
        let mut report = Report::empty(label, Provenance::default());
        report.push_table(&total)?;
        provenance.aggregation.insert(total.metric_id.clone(), method);
        report.breakdown =
            rows.into_iter().map(|(scenario, t)| ScenarioRow { scenario, scores: t.per_solver }).collect();
        report.provenance = provenance;
        Ok(report)
    }

    /// Solvers in the order of the first metric's ranking, then any others by id.
    fn solver_order(&self) -> Vec<SolverId> {
        let mut order: Vec<SolverId> = Vec::new();
        if let Some(first) = self.metric.first().and_then(|m| self.ranking.get(m)) {
            order.extend(first.iter().map(|e| e.solver.clone()));
        }
        let mut rest: Vec<SolverId> = self
            .scores
            .values()
            .flat_map(|m| m.keys())
            .chain(self.breakdown.iter().flat_map(|r| r.scores.keys()))
            .filter(|s| !order.contains(s))
            .cloned()
            .collect();
        rest.sort();
        rest.dedup();
        order.extend(rest);
        order
    }

    fn is_peak(&self, metric: &str, solver: &SolverId) -> bool {
        let Some(ranking) = self.ranking.get(metric) else { return false };
        let (Some(top), Some(mine)) = (ranking.first(), ranking.iter().find(|e| &e.solver == solver)) else {
            return false;
        };
        mine.score == top.score
    }
}

pub fn emit_report(report: &Report, format: ReportFormat) -> Vec<u8> {
    match format {
        ReportFormat::Json => {
            let mut out = serde_json::to_vec_pretty(report).expect("report serializes");
            out.push(b'\n');
            out
        }
        ReportFormat::Csv => emit_csv(report).into_bytes(),
        ReportFormat::Text => emit_text(report).into_bytes(),
    }
}

fn emit_csv(report: &Report) -> String {
    let mut out = String::from("scenario,metric,solver,score,position\n");
    for m in &report.metric {
        for e in &report.ranking[m] {
            let _ = writeln!(out, "{},{},{},{},{}", csv_field(&report.scenario), m, csv_field(e.solver.as_str()), e.score, e.position);
        }
    }
    if let Some(m) = report.metric.first() {
        for row in &report.breakdown {
            for (solver, v) in &row.scores {
                let _ = writeln!(out, "{},{},{},{},", csv_field(&row.scenario), m, csv_field(solver.as_str()), v);
            }
        }
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn cell(v: Option<f64>, peak: bool) -> String {
    match v {
        None => "-".into(),
        Some(x) => format!("{x:.4}{}", if peak { "*" } else { " " }),
    }
}

fn render_grid(header: &[String], rows: &[Vec<String>], out: &mut String) {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cells: &[String], out: &mut String| {
        let mut s = String::new();
        for (k, (c, w)) in cells.iter().zip(&widths).enumerate() {
            if k == 0 {
                let _ = write!(s, "{c:<w$}");
            } else {
                let _ = write!(s, "  {c:>w$}");
            }
        }
        out.push_str(s.trim_end());
        out.push('\n');
    };
    line(header, out);
    let total: usize = widths.iter().sum::<usize>() + 2 * widths.len().saturating_sub(1);
    out.push_str(&"-".repeat(total));
    out.push('\n');
    for r in rows {
        line(r, out);
    }
}

fn params_label(params: &BTreeMap<String, ParamValue>) -> String {
    params.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(", ")
}

fn emit_text(report: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "scenario: {}", report.scenario);
    for m in &report.metric {
        let p = &report.params[m];
        if p.is_empty() {
            let _ = writeln!(out, "metric: {m}");
        } else {
            let _ = writeln!(out, "metric: {m} ({})", params_label(p));
        }
    }
    out.push('\n');
    let solvers = report.solver_order();

    if report.breakdown.is_empty() {
        let mut header = vec!["solver".to_string()];
        header.extend(report.metric.iter().cloned());
        let rows: Vec<Vec<String>> = solvers
            .iter()
            .map(|s| {
                let mut r = vec![s.to_string()];
                for m in &report.metric {
                    r.push(cell(report.scores[m].get(s).copied(), report.is_peak(m, s)));
                }
                r
            })
            .collect();
        render_grid(&header, &rows, &mut out);
    } else {
        let m = &report.metric[0];
        let row_peak = |row: &ScenarioRow| -> Option<f64> {
            let ranking = &report.ranking[m];
            let higher = ranking.len() < 2 || ranking[0].score >= ranking[ranking.len() - 1].score;
            let vals = row.scores.values().copied();
            if higher {
                vals.fold(None, |a: Option<f64>, v| Some(a.map_or(v, |a| a.max(v))))
            } else {
                vals.fold(None, |a: Option<f64>, v| Some(a.map_or(v, |a| a.min(v))))
            }
        };
        let mut header = vec!["scenario".to_string()];
        header.extend(solvers.iter().map(|s| s.to_string()));
        let mut rows: Vec<Vec<String>> = report
            .breakdown
            .iter()
            .map(|row| {
                let peak = row_peak(row);
                let mut r = vec![row.scenario.clone()];
                for s in &solvers {
                    let v = row.scores.get(s).copied();
                    r.push(cell(v, v.is_some() && v == peak));
                }
                r
            })
            .collect();
        let mut total = vec!["Tot.".to_string()];
        for s in &solvers {
            total.push(cell(report.scores[m].get(s).copied(), report.is_peak(m, s)));
        }
        rows.push(total);
        render_grid(&header, &rows, &mut out);
    }

    if !report.baselines.is_empty() {
        out.push_str("\nbaselines:\n");
        for b in &report.baselines {
            let _ = writeln!(
                out,
                "  {} repeat {} fold {}: sbs={} ({}), m_sbs={:.4}, m_vbs={:.4}, {}",
                b.metric, b.repeat, b.fold, b.report.sbs_id, b.report.sbs_policy, b.report.m_sbs, b.report.m_vbs, b.report.base_metric_id
            );
        }
    }
    if !report.warnings.is_empty() {
        out.push_str("\nwarnings:\n");
        for w in &report.warnings {
            let _ = writeln!(out, "  - {w}");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::BaseMetric;

    fn table(metric: Metric, rows: &[(&str, f64)]) -> ScoreTable {
        let mut t = ScoreTable::new(&metric);
        t.per_solver = rows.iter().map(|(s, v)| (SolverId::from(*s), *v)).collect();
        t
    }

    fn leaderboard() -> Report {
        let cols = [
            (Metric::ClosedGap { base: BaseMetric::default() }, [0.4866, 0.4717, -0.1921]),
            (Metric::Speedup, [0.4026, 0.4122, 0.3038]),
            (Metric::NormalizedRuntime, [0.8829, 0.8879, 0.8507]),
        ];
        let mut r = Report::empty("oasc", Provenance::new("0.1.0"));
        for (m, v) in cols {
            r.push_table(&table(m, &[("ASAP", v[0]), ("sunny-as2", v[1]), ("Random Forest", v[2])])).unwrap();
        }
        r
    }

    #[test]
    fn text_table_marks_column_peaks() {
        let text = String::from_utf8(emit_report(&leaderboard(), ReportFormat::Text)).unwrap();
        let asap = text.lines().find(|l| l.starts_with("ASAP")).unwrap();
        let sunny = text.lines().find(|l| l.starts_with("sunny-as2")).unwrap();
        assert!(asap.contains("0.4866*") && asap.contains("0.4026 "));
        assert!(sunny.contains("0.4122*") && sunny.contains("0.8879*"));
        // rows follow the first column's ranking
        let pos = |name: &str| text.find(&format!("\n{name}")).unwrap();
        assert!(pos("ASAP") < pos("sunny-as2") && pos("sunny-as2") < pos("Random Forest"));
        assert!(!text.contains("warnings"));
    }

    #[test]
    fn deterministic_and_long_csv() {
        let r = leaderboard();
        for f in [ReportFormat::Json, ReportFormat::Csv, ReportFormat::Text] {
            assert_eq!(emit_report(&r, f), emit_report(&r, f));
        }
        let csv = String::from_utf8(emit_report(&r, ReportFormat::Csv)).unwrap();
        assert_eq!(csv.lines().count(), 1 + 9);
        let json: serde_json::Value = serde_json::from_slice(&emit_report(&r, ReportFormat::Json)).unwrap();
        for key in ["scenario", "metric", "params", "scores", "ranking", "baselines", "warnings", "provenance"] {
            assert!(json.get(key).is_some(), "{key}");
        }
    }

    #[test]
    fn totals_table() {
        let m = Metric::Mznc { delta: 0.0 };
        let rows = vec![
            ("s1".to_string(), table(m, &[("a", 2.0), ("b", 1.0)])),
            ("s2".to_string(), table(m, &[("a", 0.5), ("b", 3.0)])),
        ];
        let r = Report::from_scenarios("total", rows, AggregationMethod::Sum, Provenance::new("x")).unwrap();
        assert_eq!(r.scores["mznc"][&SolverId::from("b")], 4.0);
        let text = String::from_utf8(emit_report(&r, ReportFormat::Text)).unwrap();
        let tot = text.lines().find(|l| l.starts_with("Tot.")).unwrap();
        assert!(tot.contains("4.0000*") && tot.ends_with("2.5000"));
        let s1 = text.lines().find(|l| l.starts_with("s1")).unwrap();
        assert!(s1.contains("2.0000*"));
    }
}
