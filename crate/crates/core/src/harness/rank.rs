use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::metrics::ScoreTable;
use crate::scenario::SolverId;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankEntry {
    /// 1-based position.
    pub position: usize,
    pub solver: SolverId,
    pub score: f64,
    /// Score equals a neighbour's; the order between them is by id only.
    pub tied: bool,
}

/// Orders the solvers of one or more tables of the same metric from best to
/// worst. Equal scores are ordered by id and flagged.
pub fn rank(tables: &[ScoreTable]) -> Result<Vec<RankEntry>, HarnessError> {
    let first = tables.first().ok_or(HarnessError::EmptyInput)?;
    let mut scores: Vec<(SolverId, f64)> = Vec::new();
    for t in tables {
        if !t.same_metric(first) || t.direction != first.direction {
            return Err(HarnessError::MixedMetrics(first.metric_id.clone(), t.metric_id.clone()));
        }
        for (solver, v) in &t.per_solver {
            if scores.iter().any(|(s, _)| s == solver) {
                return Err(HarnessError::DuplicateSolver(solver.clone()));
            }
            scores.push((solver.clone(), *v));
        }
    }
    let dir = first.direction;
    scores.sort_by(|(sa, a), (sb, b)| {
        let by_score = if dir.better(*a, *b) {
            std::cmp::Ordering::Less
        } else if dir.better(*b, *a) {
            std::cmp::Ordering::Greater
        } else {
            std::cmp::Ordering::Equal
        };
        by_score.then_with(|| sa.cmp(sb))
    });
    let n = scores.len();
    Ok(scores
        .iter()
        .enumerate()
        .map(|(i, (solver, score))| {
            let tied = (i > 0 && scores[i - 1].1 == *score) || (i + 1 < n && scores[i + 1].1 == *score);
            RankEntry { position: i + 1, solver: solver.clone(), score: *score, tied }
        })
        .collect())
}
