//! Side-by-side comparison of two long-format reports.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{PgmError, Result};
use crate::metrics::{metric_difference, win_loss};

use super::report::{into_string, LongRow};

/// Split-averaged values keyed by `(metric, class)`.
pub fn average_over_splits(rows: &[LongRow]) -> BTreeMap<(String, String), f64> {
    let mut acc: BTreeMap<(String, String), (f64, usize)> = BTreeMap::new();
    for r in rows {
        let e = acc.entry((r.metric.clone(), r.class.clone())).or_default();
        e.0 += r.value;
        e.1 += 1;
    }
    acc.into_iter()
        .map(|(k, (sum, n))| (k, sum / n as f64))
        .collect()
}

fn classes(values: &BTreeMap<(String, String), f64>) -> BTreeSet<String> {
    values
        .keys()
        .filter(|(_, c)| !c.is_empty())
        .map(|(_, c)| c.clone())
        .collect()
}

fn flat_key((metric, class): &(String, String)) -> String {
    if class.is_empty() {
        metric.clone()
    } else {
        format!("{metric}[{class}]")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DifferenceRow {
    pub metric: String,
    pub class: String,
    pub a: f64,
    pub b: f64,
    pub difference: f64,
}

/// For one per-class metric: the fraction of classes where A is strictly
/// higher than B, and the reverse.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WinLossRow {
    pub metric: String,
    pub n_classes: usize,
    pub a_over_b: f64,
    pub b_over_a: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Comparison {
    pub differences: Vec<DifferenceRow>,
    pub win_loss: Vec<WinLossRow>,
}

pub fn compare_reports(a: &[LongRow], b: &[LongRow]) -> Result<Comparison> {
    let va = average_over_splits(a);
    let vb = average_over_splits(b);
    let (ca, cb) = (classes(&va), classes(&vb));
    if ca != cb {
        return Err(PgmError::ClassSetMismatch(format!(
            "first report has classes {ca:?}, second has {cb:?}"
        )));
    }
    let flat = |v: &BTreeMap<(String, String), f64>| {
        v.iter()
            .map(|(k, x)| (flat_key(k), *x))
            .collect::<BTreeMap<_, _>>()
    };
    let diff = metric_difference(&flat(&va), &flat(&vb))?;

    let differences = va
        .iter()
        .map(|(k, &x)| DifferenceRow {
            metric: k.0.clone(),
            class: k.1.clone(),
            a: x,
            b: vb[k],
            difference: diff[&flat_key(k)],
        })
        .collect();

    let per_class_metrics: BTreeSet<&String> =
        va.keys().filter(|(_, c)| !c.is_empty()).map(|(m, _)| m).collect();
    let win_loss = per_class_metrics
        .into_iter()
        .map(|metric| {
            let column = |v: &BTreeMap<(String, String), f64>| {
                ca.iter()
                    .filter_map(|c| v.get(&(metric.clone(), c.clone())).copied())
                    .collect::<Vec<f64>>()
            };
            let m = win_loss(&[column(&va), column(&vb)])?;
            Ok(WinLossRow {
                metric: metric.clone(),
                n_classes: column(&va).len(),
                a_over_b: m.entries[0][1],
                b_over_a: m.entries[1][0],
            })
        })
        .collect::<Result<_>>()?;

    Ok(Comparison {
        differences,
        win_loss,
    })
}

impl Comparison {
    pub fn differences_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.differences {
            w.serialize(r)?;
        }
        if self.differences.is_empty() {
            w.write_record(["metric", "class", "a", "b", "difference"])?;
        }
        into_string(w)
    }

    pub fn win_loss_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.win_loss {
            w.serialize(r)?;
        }
        if self.win_loss.is_empty() {
            w.write_record(["metric", "n_classes", "a_over_b", "b_over_a"])?;
        }
        into_string(w)
    }
}
