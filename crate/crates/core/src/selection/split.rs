//! Stratified holdout splits and stratified k-fold partitions.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{PgmError, Result};

/// splitmix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for stream `index` under `master`. Fixed function, so derived seeds do
/// not depend on thread count or evaluation order.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    mix64(master ^ mix64(index))
}

pub(crate) fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// One train/test partition of a dataset.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitPlan {
    pub id: usize,
    #[serde(default)]
    pub seed: Option<u64>,
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

impl SplitPlan {
    /// Train and test must be disjoint and together cover `0..n_samples`.
    pub fn validate(&self, n_samples: usize) -> Result<()> {
        let mut seen = vec![false; n_samples];
        for &i in self.train.iter().chain(&self.test) {
            if i >= n_samples {
                return Err(PgmError::InvalidSplit(format!(
                    "split {}: index {i} out of range for {n_samples} rows",
                    self.id
                )));
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(PgmError::InvalidSplit(format!(
                    "split {}: index {i} appears twice",
                    self.id
                )));
            }
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(PgmError::InvalidSplit(format!(
                "split {}: row {missing} is in neither train nor test",
                self.id
            )));
        }
        if self.train.is_empty() || self.test.is_empty() {
            return Err(PgmError::InvalidSplit(format!(
                "split {}: empty train or test set",
                self.id
            )));
        }
        Ok(())
    }
}

fn group_by_class(labels: &[usize]) -> BTreeMap<usize, Vec<usize>> {
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &l) in labels.iter().enumerate() {
        groups.entry(l).or_default().push(i);
    }
    groups
}

const FRACTION_EPS: f64 = 1e-9;

/// Per-class test counts: the total is `ceil(N·f)`, distributed by largest
/// remainder, then clamped so each class keeps one sample on each side.
fn test_allocation(class_sizes: &[usize], test_fraction: f64) -> Vec<usize> {
    let total: usize = class_sizes.iter().sum();
    let target_total = (total as f64 * test_fraction - FRACTION_EPS).ceil().max(0.0) as usize;
    let targets: Vec<f64> = class_sizes
        .iter()
        .map(|&n| n as f64 * test_fraction)
        .collect();
    let mut alloc: Vec<usize> = targets
        .iter()
        .map(|t| (t + FRACTION_EPS).floor() as usize)
        .collect();
    let mut remainders: Vec<(usize, f64)> = targets
        .iter()
        .zip(&alloc)
        .enumerate()
        .map(|(c, (t, &a))| (c, t - a as f64))
        .collect();
    // stable: equal remainders go to the lower class index first
    remainders.sort_by(|a, b| b.1.total_cmp(&a.1));
    let mut missing = target_total.saturating_sub(alloc.iter().sum());
    for (c, r) in remainders {
        if missing == 0 {
            break;
        }
        if r > FRACTION_EPS {
            alloc[c] += 1;
            missing -= 1;
        }
    }
    alloc
        .iter()
        .zip(class_sizes)
        .map(|(&a, &n)| a.clamp(1, n - 1))
        .collect()
}

/// `repetitions` stratified train/test splits. Repetition `r` shuffles with
/// `derive_seed(seed, r)`.
pub fn stratified_holdout(
    labels: &[usize],
    test_fraction: f64,
    repetitions: usize,
    seed: u64,
) -> Result<Vec<SplitPlan>> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(PgmError::InvalidConfig(format!(
            "test fraction must lie in (0, 1), got {test_fraction}"
        )));
    }
    if repetitions == 0 {
        return Err(PgmError::InvalidConfig("need at least one repetition".into()));
    }
    let groups = group_by_class(labels);
    if groups.is_empty() {
        return Err(PgmError::InvalidConfig("no samples to split".into()));
    }
    for (&class, members) in &groups {
        if members.len() < 2 {
            return Err(PgmError::StratificationImpossible {
                class,
                count: members.len(),
                needed: 2,
            });
        }
    }
    let sizes: Vec<usize> = groups.values().map(Vec::len).collect();
    let alloc = test_allocation(&sizes, test_fraction);

    let plans = (0..repetitions)
        .map(|r| {
            let split_seed = derive_seed(seed, r as u64);
            let mut rng = rng_for(split_seed);
            let mut train = Vec::new();
            let mut test = Vec::new();
            for (members, &n_test) in groups.values().zip(&alloc) {
                let mut shuffled = members.clone();
                shuffled.shuffle(&mut rng);
                test.extend_from_slice(&shuffled[..n_test]);
                train.extend_from_slice(&shuffled[n_test..]);
            }
            train.sort_unstable();
            test.sort_unstable();
            SplitPlan {
                id: r,
                seed: Some(split_seed),
                train,
                test,
            }
        })
        .collect();
    Ok(plans)
}

/// `k` folds of positions into the label slice that was partitioned.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoldPlan {
    pub folds: Vec<Vec<usize>>,
}

impl FoldPlan {
    pub fn k(&self) -> usize {
        self.folds.len()
    }

    /// Positions outside fold `i`, ascending.
    pub fn training_positions(&self, i: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .folds
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .flat_map(|(_, f)| f.iter().copied())
            .collect();
        out.sort_unstable();
        out
    }
}

/// Stratified k-fold partition; per-class counts differ by at most one
/// across folds. Classes are dealt round-robin with a running offset so fold
/// sizes are balanced too.
pub fn stratified_kfold(labels: &[usize], k: usize, seed: u64) -> Result<FoldPlan> {
    if k < 2 {
        return Err(PgmError::InvalidConfig(format!("k must be at least 2, got {k}")));
    }
    let groups = group_by_class(labels);
    for (&class, members) in &groups {
        if members.len() < k {
            return Err(PgmError::ClassSmallerThanK {
                class,
                count: members.len(),
                k,
            });
        }
    }
    let mut rng = rng_for(seed);
    let mut folds = vec![Vec::new(); k];
    let mut offset = 0;
    for members in groups.values() {
        let mut shuffled = members.clone();
        shuffled.shuffle(&mut rng);
        for (i, idx) in shuffled.into_iter().enumerate() {
            folds[(offset + i) % k].push(idx);
        }
        offset = (offset + members.len()) % k;
    }
    folds.iter_mut().for_each(|f| f.sort_unstable());
    Ok(FoldPlan { folds })
}
