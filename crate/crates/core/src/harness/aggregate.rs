use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::metrics::{Metric, ScoreTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AggregationMethod {
    Sum,
    ArithmeticMean,
    GeometricMean,
    Median,
}

pub fn aggregate(values: &[f64], method: AggregationMethod) -> Result<f64, HarnessError> {
    if values.is_empty() {
        return Err(HarnessError::EmptyInput);
    }
    let n = values.len() as f64;
    Ok(match method {
        AggregationMethod::Sum => values.iter().sum(),
        AggregationMethod::ArithmeticMean => values.iter().sum::<f64>() / n,
        AggregationMethod::GeometricMean => {
            if let Some(&bad) = values.iter().find(|v| !(**v > 0.0)) {
                return Err(HarnessError::NonPositiveForGeomean(bad));
            }
            (values.iter().map(|v| v.ln()).sum::<f64>() / n).exp()
        }
        AggregationMethod::Median => {
            let mut sorted = values.to_vec();
            sorted.sort_by(f64::total_cmp);
            let mid = sorted.len() / 2;
            if sorted.len() % 2 == 0 {
                (sorted[mid - 1] + sorted[mid]) / 2.0
            } else {
                sorted[mid]
            }
        }
    })
}

/// How per-fold values of a metric are merged into one score per solver.
pub fn default_fold_aggregation(metric: &Metric) -> AggregationMethod {
    match metric {
        Metric::Solved | Metric::Mznc { .. } | Metric::Ratio | Metric::Area | Metric::BoundedReward { .. } => {
            AggregationMethod::Sum
        }
        Metric::Par { .. } | Metric::NormalizedRuntime | Metric::Speedup | Metric::ClosedGap { .. } => {
            AggregationMethod::ArithmeticMean
        }
    }
}

/// How per-scenario scores are combined into a total across scenarios.
pub fn default_scenario_aggregation(metric_id: &str) -> AggregationMethod {
    match metric_id {
        "par" | "norm-runtime" | "speedup" => AggregationMethod::ArithmeticMean,
        _ => AggregationMethod::Sum,
    }
}

/// Combines tables of the same metric (e.g. one per scenario) into one
/// table of per-solver aggregates. Solvers missing from some tables are
/// aggregated over the tables they appear in.
pub fn aggregate_tables(tables: &[ScoreTable], method: AggregationMethod) -> Result<ScoreTable, HarnessError> {
    let first = tables.first().ok_or(HarnessError::EmptyInput)?;
    let mut values: BTreeMap<_, Vec<f64>> = BTreeMap::new();
    for t in tables {
        if !t.same_metric(first) {
            return Err(HarnessError::MixedMetrics(first.metric_id.clone(), t.metric_id.clone()));
        }
        for (solver, v) in &t.per_solver {
            values.entry(solver.clone()).or_default().push(*v);
        }
    }
    let mut out = ScoreTable {
        metric_id: first.metric_id.clone(),
        params: first.params.clone(),
        per_instance: None,
        per_solver: BTreeMap::new(),
        direction: first.direction,
    };
    for (solver, vs) in values {
        out.per_solver.insert(solver, aggregate(&vs, method)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use AggregationMethod::*;

    #[test]
    fn statistics() {
        assert!((aggregate(&[1.0, 4.0], GeometricMean).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(aggregate(&[1.0, 2.0, 100.0], Median), Ok(2.0));
        assert_eq!(aggregate(&[4.0, 1.0, 3.0, 2.0], Median), Ok(2.5));
        assert_eq!(aggregate(&[1.0, 2.0, 3.0], Sum), Ok(6.0));
        assert_eq!(aggregate(&[1.0, 2.0, 3.0], ArithmeticMean), Ok(2.0));
    }

    #[test]
    fn errors() {
        assert_eq!(aggregate(&[], Sum), Err(HarnessError::EmptyInput));
        assert_eq!(aggregate(&[0.5, -0.2], GeometricMean), Err(HarnessError::NonPositiveForGeomean(-0.2)));
        assert_eq!(aggregate(&[0.0], GeometricMean), Err(HarnessError::NonPositiveForGeomean(0.0)));
    }
}
