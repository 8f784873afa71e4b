//! Seeded k-fold plans, optionally repeated with fresh shuffles.

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::baselines::FoldContext;
use crate::rng::SplitMix64;
use crate::scenario::{InstanceId, Scenario};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub seed: u64,
    pub k: usize,
    pub repeats: usize,
    /// `assignment[repeat][fold]` holds that fold's instance ids, sorted.
    pub assignment: Vec<Vec<Vec<InstanceId>>>,
}

/// Partitions `instances` into `k` balanced folds, `repeats` times.
///
/// Ids are sorted before shuffling so the plan depends only on the id set,
/// not on the order rows were ingested in. The first `n % k` folds get one
/// extra instance.
pub fn make_fold_plan(instances: &[InstanceId], k: usize, repeats: usize, seed: u64) -> Result<FoldPlan, HarnessError> {
    let mut ids = instances.to_vec();
    ids.sort();
    ids.dedup();
    let n = ids.len();
    if k < 2 || k > n {
        return Err(HarnessError::BadK { k, n_instances: n });
    }
    if repeats == 0 {
        return Err(HarnessError::BadRepeats);
    }
    let mut rng = SplitMix64::new(seed);
    let mut assignment = Vec::with_capacity(repeats);
    for _ in 0..repeats {
        let mut order = ids.clone();
        rng.shuffle(&mut order);
        let (base, extra) = (n / k, n % k);
        let mut folds = Vec::with_capacity(k);
        let mut start = 0;
        for f in 0..k {
            let len = base + usize::from(f < extra);
            let mut fold = order[start..start + len].to_vec();
            fold.sort();
            folds.push(fold);
            start += len;
        }
        assignment.push(folds);
    }
    Ok(FoldPlan { seed, k, repeats, assignment })
}

impl FoldPlan {
    /// Train/test split for every (repeat, fold) cell, in cell order.
    pub fn contexts(&self) -> Vec<(usize, usize, FoldContext)> {
        let mut out = Vec::with_capacity(self.repeats * self.k);
        for (r, folds) in self.assignment.iter().enumerate() {
            for (f, test) in folds.iter().enumerate() {
                let mut train: Vec<InstanceId> =
                    folds.iter().enumerate().filter(|(g, _)| *g != f).flat_map(|(_, x)| x.iter().cloned()).collect();
                train.sort();
                out.push((r, f, FoldContext { train, test: test.clone() }));
            }
        }
        out
    }

    /// Checks that every repeat partitions exactly the scenario's instances.
    pub fn check_covers(&self, scenario: &Scenario) -> Result<(), HarnessError> {
        let mut expected: Vec<&InstanceId> = scenario.instances().iter().map(|i| &i.id).collect();
        expected.sort();
        for folds in &self.assignment {
            let mut got: Vec<&InstanceId> = folds.iter().flatten().collect();
            got.sort();
            if got != expected {
                return Err(HarnessError::FoldPlanMismatch);
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ids(n: usize) -> Vec<InstanceId> {
        (0..n).map(|i| InstanceId(format!("inst{i:03}"))).collect()
    }

    #[test]
    fn leave_one_out() {
        let plan = make_fold_plan(&ids(10), 10, 1, 3).unwrap();
        assert!(plan.assignment[0].iter().all(|f| f.len() == 1));
    }

    #[test]
    fn balanced_sizes() {
        let plan = make_fold_plan(&ids(10), 3, 2, 3).unwrap();
        for folds in &plan.assignment {
            let sizes: Vec<usize> = folds.iter().map(Vec::len).collect();
            assert_eq!(sizes, [4, 3, 3]);
        }
        assert_ne!(plan.assignment[0], plan.assignment[1]);
    }

    #[test]
    fn deterministic_and_bad_k() {
        assert_eq!(make_fold_plan(&ids(20), 4, 3, 99), make_fold_plan(&ids(20), 4, 3, 99));
        assert_eq!(make_fold_plan(&ids(3), 4, 1, 0), Err(HarnessError::BadK { k: 4, n_instances: 3 }));
        assert_eq!(make_fold_plan(&ids(3), 1, 1, 0), Err(HarnessError::BadK { k: 1, n_instances: 3 }));
        assert_eq!(make_fold_plan(&ids(3), 2, 0, 0), Err(HarnessError::BadRepeats));
    }

    proptest! {
        #[test]
        fn partition_and_order_invariance(n in 2usize..60, k_off in 0usize..60, seed: u64, rot in 0usize..60) {
            let k = 2 + k_off % (n - 1);
            let base = ids(n);
            let plan = make_fold_plan(&base, k, 2, seed).unwrap();
            for folds in &plan.assignment {
                let mut all: Vec<_> = folds.iter().flatten().cloned().collect();
                all.sort();
                prop_assert_eq!(&all, &base);
                let max = folds.iter().map(Vec::len).max().unwrap();
                let min = folds.iter().map(Vec::len).min().unwrap();
                prop_assert!(max - min <= 1);
            }
            let mut permuted = base.clone();
            permuted.rotate_left(rot % n);
            permuted.reverse();
            prop_assert_eq!(make_fold_plan(&permuted, k, 2, seed).unwrap(), plan);
        }
    }
}
