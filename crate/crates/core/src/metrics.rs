//! Evaluation metrics: confusion counts, accuracy and balanced accuracy,
//! one-vs-rest rates, rank-based AUC, win–loss matrices and metric differences.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{PgmError, Result};
use crate::pgm::ScoreVector;

/// Rows are true classes, columns predicted classes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn from_counts(counts: Vec<Vec<u64>>) -> Result<Self> {
        let n = counts.len();
        if counts.iter().any(|row| row.len() != n) {
            return Err(PgmError::InvalidConfig("confusion matrix must be square".into()));
        }
        Ok(Self { counts })
    }

    pub fn n_classes(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn get(&self, truth: usize, predicted: usize) -> u64 {
        self.counts[truth][predicted]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn support(&self, class: usize) -> u64 {
        self.counts[class].iter().sum()
    }

    pub fn predicted(&self, class: usize) -> u64 {
        self.counts.iter().map(|row| row[class]).sum()
    }

    /// One-vs-rest `(TP, FP, FN, TN)` for `class`.
    pub fn one_vs_rest(&self, class: usize) -> (u64, u64, u64, u64) {
        let tp = self.get(class, class);
        let fp = self.predicted(class) - tp;
        let fn_ = self.support(class) - tp;
        let tn = self.total() - tp - fp - fn_;
        (tp, fp, fn_, tn)
    }
}

pub fn confusion(truth: &[usize], predicted: &[usize], n_classes: usize) -> Result<ConfusionMatrix> {
    if truth.len() != predicted.len() {
        return Err(PgmError::DimMismatch {
            expected: truth.len(),
            found: predicted.len(),
        });
    }
    let mut counts = vec![vec![0u64; n_classes]; n_classes];
    for (&t, &p) in truth.iter().zip(predicted) {
        for label in [t, p] {
            if label >= n_classes {
                return Err(PgmError::LabelOutOfRange { label, n_classes });
            }
        }
        counts[t][p] += 1;
    }
    Ok(ConfusionMatrix { counts })
}

/// `trace / total`
pub fn accuracy(cm: &ConfusionMatrix) -> Result<f64> {
    let total = cm.total();
    if total == 0 {
        return Err(PgmError::EmptyEvaluation);
    }
    let correct: u64 = (0..cm.n_classes()).map(|c| cm.get(c, c)).sum();
    Ok(correct as f64 / total as f64)
}

/// Mean per-class recall over classes that have true samples.
pub fn macro_accuracy(cm: &ConfusionMatrix) -> Result<f64> {
    let recalls: Vec<f64> = (0..cm.n_classes())
        .filter(|&c| cm.support(c) > 0)
        .map(|c| cm.get(c, c) as f64 / cm.support(c) as f64)
        .collect();
    if recalls.is_empty() {
        return Err(PgmError::EmptyEvaluation);
    }
    Ok(recalls.iter().sum::<f64>() / recalls.len() as f64)
}

/// Precision, recall, specificity and F1 of one class against the rest.
/// A zero denominator yields 0 and a flag naming the metric.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BinaryRates {
    pub precision: f64,
    pub recall: f64,
    pub specificity: f64,
    pub f1: f64,
    pub degenerate: Vec<String>,
}

pub fn binary_rates(cm: &ConfusionMatrix, positive: usize) -> Result<BinaryRates> {
    if positive >= cm.n_classes() {
        return Err(PgmError::LabelOutOfRange {
            label: positive,
            n_classes: cm.n_classes(),
        });
    }
    let (tp, fp, fn_, tn) = cm.one_vs_rest(positive);
    let mut degenerate = Vec::new();
    let mut ratio = |name: &str, num: u64, den: u64| {
        if den == 0 {
            degenerate.push(name.to_string());
            0.0
        } else {
            num as f64 / den as f64
        }
    };
    let precision = ratio("precision", tp, tp + fp);
    let recall = ratio("recall", tp, tp + fn_);
    let specificity = ratio("specificity", tn, tn + fp);
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        degenerate.push("f1".to_string());
        0.0
    };
    Ok(BinaryRates {
        precision,
        recall,
        specificity,
        f1,
        degenerate,
    })
}

/// Rank-statistic AUC with mid-ranks for ties. `None` when either the
/// positive or the negative group is empty.
pub fn auc_ovr(scores: &[f64], membership: &[bool]) -> Result<Option<f64>> {
    if scores.len() != membership.len() {
        return Err(PgmError::DimMismatch {
            expected: scores.len(),
            found: membership.len(),
        });
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(PgmError::InvalidConfig("AUC needs finite scores".into()));
    }
    let n_pos = membership.iter().filter(|&&m| m).count();
    let n_neg = membership.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Ok(None);
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    // ranks are 1-based; a tie group spanning positions i..j gets (i+1+j)/2
    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let mid_rank = (i + 1 + j + 1) as f64 / 2.0;
        let positives = order[i..=j].iter().filter(|&&k| membership[k]).count();
        rank_sum += mid_rank * positives as f64;
        i = j + 1;
    }
    let u = rank_sum - (n_pos * (n_pos + 1)) as f64 / 2.0;
    Ok(Some(u / (n_pos as f64 * n_neg as f64)))
}

/// `entries[a][b]` is the fraction of classes on which model `a` has a strictly
/// higher AUC than model `b`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WinLossMatrix {
    pub entries: Vec<Vec<f64>>,
}

pub fn win_loss(per_class_auc_by_model: &[Vec<f64>]) -> Result<WinLossMatrix> {
    let Some(first) = per_class_auc_by_model.first() else {
        return Ok(WinLossMatrix { entries: vec![] });
    };
    let n_classes = first.len();
    if let Some(bad) = per_class_auc_by_model.iter().find(|v| v.len() != n_classes) {
        return Err(PgmError::ClassSetMismatch(format!(
            "{} vs {} classes",
            n_classes,
            bad.len()
        )));
    }
    let entries = per_class_auc_by_model
        .iter()
        .map(|a| {
            per_class_auc_by_model
                .iter()
                .map(|b| {
                    if n_classes == 0 {
                        return 0.0;
                    }
                    let wins = a.iter().zip(b).filter(|(x, y)| x > y).count();
                    wins as f64 / n_classes as f64
                })
                .collect()
        })
        .collect();
    Ok(WinLossMatrix { entries })
}

/// Element-wise `a − b` over identical metric sets.
pub fn metric_difference(
    a: &BTreeMap<String, f64>,
    b: &BTreeMap<String, f64>,
) -> Result<BTreeMap<String, f64>> {
    if !a.keys().eq(b.keys()) {
        let only_a: Vec<_> = a.keys().filter(|k| !b.contains_key(*k)).collect();
        let only_b: Vec<_> = b.keys().filter(|k| !a.contains_key(*k)).collect();
        return Err(PgmError::MetricSetMismatch(format!(
            "only in first: {only_a:?}; only in second: {only_b:?}"
        )));
    }
    Ok(a.iter().map(|(k, va)| (k.clone(), va - b[k])).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub class: String,
    pub support: u64,
    pub auc: Option<f64>,
    pub precision: f64,
    pub recall: f64,
    pub specificity: f64,
    pub f1: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PositiveClassMetrics {
    pub positive_class: String,
    pub precision: f64,
    pub recall: f64,
    pub specificity: f64,
    pub f1: f64,
}

/// Everything reported for one evaluation. Macro aggregates are unweighted means.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub n_samples: usize,
    pub accuracy: f64,
    pub macro_accuracy: f64,
    pub macro_auc: Option<f64>,
    pub per_class: Vec<ClassMetrics>,
    pub binary: Option<PositiveClassMetrics>,
    pub confusion: ConfusionMatrix,
    pub flags: Vec<String>,
}

/// One `(metric, class, value)` row of a long-format table.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricEntry {
    pub metric: String,
    pub class: Option<String>,
    pub value: f64,
}

impl MetricEntry {
    pub fn key(&self) -> String {
        match &self.class {
            Some(c) => format!("{}[{}]", self.metric, c),
            None => self.metric.clone(),
        }
    }
}

impl MetricReport {
    /// `positive` selects the class for the binary block; it is only
    /// emitted when there are exactly two classes.
    pub fn compute(
        truth: &[usize],
        scores: &[ScoreVector],
        class_names: &[String],
        positive: Option<usize>,
    ) -> Result<Self> {
        let n_classes = class_names.len();
        if truth.len() != scores.len() {
            return Err(PgmError::DimMismatch {
                expected: truth.len(),
                found: scores.len(),
            });
        }
        if truth.is_empty() {
            return Err(PgmError::EmptyEvaluation);
        }
        if let Some(bad) = scores.iter().find(|s| s.len() != n_classes) {
            return Err(PgmError::DimMismatch {
                expected: n_classes,
                found: bad.len(),
            });
        }
        let predicted: Vec<usize> = scores.iter().map(ScoreVector::argmax).collect();
        let cm = confusion(truth, &predicted, n_classes)?;
        let mut flags = Vec::new();

        let mut per_class = Vec::with_capacity(n_classes);
        for (c, name) in class_names.iter().enumerate() {
            let column: Vec<f64> = scores.iter().map(|s| s.values()[c]).collect();
            let membership: Vec<bool> = truth.iter().map(|&t| t == c).collect();
            let auc = auc_ovr(&column, &membership)?;
            if auc.is_none() {
                flags.push(format!("auc[{name}]: undefined (single-class membership)"));
            }
            let rates = binary_rates(&cm, c)?;
            flags.extend(
                rates
                    .degenerate
                    .iter()
                    .map(|m| format!("{m}[{name}]: zero denominator")),
            );
            per_class.push(ClassMetrics {
                class: name.clone(),
                support: cm.support(c),
                auc,
                precision: rates.precision,
                recall: rates.recall,
                specificity: rates.specificity,
                f1: rates.f1,
            });
        }
        let defined: Vec<f64> = per_class.iter().filter_map(|c| c.auc).collect();
        let macro_auc = if defined.is_empty() {
            None
        } else {
            Some(defined.iter().sum::<f64>() / defined.len() as f64)
        };

        let binary = match positive {
            Some(p) if n_classes == 2 => {
                if p >= n_classes {
                    return Err(PgmError::LabelOutOfRange {
                        label: p,
                        n_classes,
                    });
                }
                let c = &per_class[p];
                Some(PositiveClassMetrics {
                    positive_class: c.class.clone(),
                    precision: c.precision,
                    recall: c.recall,
                    specificity: c.specificity,
                    f1: c.f1,
                })
            }
            _ => None,
        };

        Ok(Self {
            n_samples: truth.len(),
            accuracy: accuracy(&cm)?,
            macro_accuracy: macro_accuracy(&cm)?,
            macro_auc,
            per_class,
            binary,
            confusion: cm,
            flags,
        })
    }

    /// Flat `(metric, class, value)` rows; undefined values are omitted.
    pub fn entries(&self) -> Vec<MetricEntry> {
        let scalar = |metric: &str, value: f64| MetricEntry {
            metric: metric.to_string(),
            class: None,
            value,
        };
        let mut out = vec![
            scalar("n_samples", self.n_samples as f64),
            scalar("accuracy", self.accuracy),
            scalar("macro_accuracy", self.macro_accuracy),
        ];
        if let Some(a) = self.macro_auc {
            out.push(scalar("macro_auc", a));
        }
        if let Some(b) = &self.binary {
            out.push(scalar("precision", b.precision));
            out.push(scalar("recall", b.recall));
            out.push(scalar("specificity", b.specificity));
            out.push(scalar("f1", b.f1));
        }
        for c in &self.per_class {
            let per = |metric: &str, value: f64| MetricEntry {
                metric: metric.to_string(),
                class: Some(c.class.clone()),
                value,
            };
            if let Some(a) = c.auc {
                out.push(per("auc", a));
            }
            out.push(per("precision", c.precision));
            out.push(per("recall", c.recall));
            out.push(per("specificity", c.specificity));
            out.push(per("f1", c.f1));
        }
        out
    }

    pub fn flatten(&self) -> BTreeMap<String, f64> {
        self.entries().into_iter().map(|e| (e.key(), e.value)).collect()
    }
}
