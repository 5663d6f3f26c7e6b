use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::TrialRecord;
use crate::error::{Error, Result};
use crate::solvers::Algorithm;

/// A square matrix indexed by variant labels, in order of first appearance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricMatrix {
    pub variants: Vec<String>,
    pub values: Vec<Vec<f64>>,
    pub trials: usize,
}

impl MetricMatrix {
    pub fn get(&self, row: &str, col: &str) -> Option<f64> {
        let i = self.variants.iter().position(|v| v == row)?;
        let j = self.variants.iter().position(|v| v == col)?;
        Some(self.values[i][j])
    }

    /// For a wins matrix: percentage of trials where `row` and `col` tie,
    /// `100 - p_ij - p_ji`.
    pub fn ties(&self, row: &str, col: &str) -> Option<f64> {
        Some(100.0 - self.get(row, col)? - self.get(col, row)?)
    }

    /// Ties for every pair, aligned with `values`.
    pub fn ties_matrix(&self) -> Vec<Vec<f64>> {
        let n = self.variants.len();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { 100.0 } else { 100.0 - self.values[i][j] - self.values[j][i] })
                    .collect()
            })
            .collect()
    }
}

type TrialKey = (String, usize, usize);

/// Per-trial variation of every variant; every trial must cover the same
/// variants.
fn variation_table(records: &[TrialRecord]) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut variants: Vec<String> = Vec::new();
    for r in records {
        if !variants.contains(&r.variant) {
            variants.push(r.variant.clone());
        }
    }
    let mut trials: BTreeMap<TrialKey, Vec<Option<f64>>> = BTreeMap::new();
    for r in records {
        let row = trials
            .entry((r.dataset.clone(), r.trial, r.size))
            .or_insert_with(|| vec![None; variants.len()]);
        let v = variants.iter().position(|v| *v == r.variant).expect("collected above");
        if row[v].replace(r.variation).is_some() {
            return Err(Error::InvalidArgument(format!(
                "duplicate record for variant {} in trial {} (size {}) of {}",
                r.variant, r.trial, r.size, r.dataset
            )));
        }
    }
    let mut table = Vec::with_capacity(trials.len());
    for ((dataset, trial, size), row) in trials {
        let row: Option<Vec<f64>> = row.into_iter().collect();
        table.push(row.ok_or_else(|| {
            Error::InvalidArgument(format!(
                "trial {trial} (size {size}) of {dataset} does not cover every variant"
            ))
        })?);
    }
    if table.is_empty() {
        return Err(Error::InvalidArgument("no trial records".into()));
    }
    Ok((variants, table))
}

/// `p_ij`: percentage of trials in which variant `i` reached a strictly lower
/// variation than variant `j`.
pub fn wins_matrix(records: &[TrialRecord]) -> Result<MetricMatrix> {
    let (variants, table) = variation_table(records)?;
    let n = variants.len();
    let mut values = vec![vec![0.0; n]; n];
    for (i, row) in values.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            let wins = table.iter().filter(|t| t[i] < t[j]).count();
            *cell = 100.0 * wins as f64 / table.len() as f64;
        }
    }
    Ok(MetricMatrix {
        variants,
        values,
        trials: table.len(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PercentChange {
    pub matrix: MetricMatrix,
    /// One entry per excluded (trial, pair) with a zero reference variation.
    pub warnings: Vec<String>,
}

/// Mean over trials of `100 (V_j - V_i) / V_j`. Positive entries mean the
/// row variant beat the column variant. A trial with `V_j = 0` contributes
/// 0 when `V_i = 0` too and is excluded (with a warning) otherwise.
pub fn percent_change_matrix(records: &[TrialRecord]) -> Result<PercentChange> {
    let (variants, table) = variation_table(records)?;
    let n = variants.len();
    let mut values = vec![vec![0.0; n]; n];
    let mut warnings = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let mut sum = 0.0;
            let mut used = 0usize;
            for (t, row) in table.iter().enumerate() {
                let (vi, vj) = (row[i], row[j]);
                if vj == 0.0 {
                    if vi == 0.0 {
                        used += 1;
                    } else {
                        warnings.push(format!(
                            "trial #{t}: {} has zero variation; {} vs {} excluded",
                            variants[j], variants[i], variants[j]
                        ));
                    }
                    continue;
                }
                sum += 100.0 * (vj - vi) / vj;
                used += 1;
            }
            values[i][j] = if used == 0 { 0.0 } else { sum / used as f64 };
        }
    }
    Ok(PercentChange {
        matrix: MetricMatrix {
            variants,
            values,
            trials: table.len(),
        },
        warnings,
    })
}

/// Visited-example comparison for one sample size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RuntimeRow {
    pub size: usize,
    pub trials: usize,
    pub excluded: usize,
    /// Mean `e' N`, where `e'` is the first SSG epoch at least as good as the
    /// final MM solution.
    pub mean_ssg_visited: f64,
    /// Mean `e N` over the same trials, `e` being MM's epoch count.
    pub mean_mm_visited: f64,
    pub median_ssg_visited: f64,
    pub median_mm_visited: f64,
    /// Mean of `e N - e' N`.
    pub mean_delta: f64,
    pub mean_ssg_epochs: f64,
    pub mean_mm_epochs: f64,
    /// The same comparison using the solvers' own counters, which include
    /// every Fréchet evaluation.
    pub mean_ssg_counter: f64,
    pub mean_mm_counter: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RuntimeComparison {
    pub rows: Vec<RuntimeRow>,
    /// Fraction of trials where SSG never matched MM's final variation.
    pub excluded_rate: f64,
}

fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        0.0
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    }
}

fn median(v: &[f64]) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let mid = s.len() / 2;
    if s.len().is_multiple_of(2) {
        (s[mid - 1] + s[mid]) / 2.0
    } else {
        s[mid]
    }
}

/// Compares how many sample series SSG and MM process to reach MM's final
/// solution quality. Per trial, the longest SSG and MM records are used.
pub fn runtime_comparison(records: &[TrialRecord]) -> Result<RuntimeComparison> {
    let mut trials: BTreeMap<TrialKey, (Option<&TrialRecord>, Option<&TrialRecord>)> = BTreeMap::new();
    for r in records {
        let entry = trials.entry((r.dataset.clone(), r.trial, r.size)).or_default();
        let slot = match r.algorithm {
            Algorithm::Ssg => &mut entry.0,
            Algorithm::Mm => &mut entry.1,
            Algorithm::Sg => continue,
        };
        if slot.is_none_or(|cur| r.epochs_run > cur.epochs_run) {
            *slot = Some(r);
        }
    }

    #[derive(Default)]
    struct Acc {
        trials: usize,
        excluded: usize,
        ssg: Vec<f64>,
        mm: Vec<f64>,
        ssg_epochs: Vec<f64>,
        mm_epochs: Vec<f64>,
        ssg_counter: Vec<f64>,
        mm_counter: Vec<f64>,
    }
    let mut per_size: BTreeMap<usize, Acc> = BTreeMap::new();
    let (mut total, mut excluded) = (0usize, 0usize);
    for ((dataset, trial, size), pair) in trials {
        let (Some(ssg), Some(mm)) = pair else {
            return Err(Error::InvalidArgument(format!(
                "trial {trial} (size {size}) of {dataset} lacks an SSG or MM record"
            )));
        };
        let acc = per_size.entry(size).or_default();
        acc.trials += 1;
        total += 1;
        let reached = ssg.trace.iter().position(|p| p.variation <= mm.variation);
        let Some(idx) = reached else {
            acc.excluded += 1;
            excluded += 1;
            continue;
        };
        let e_prime = idx + 1;
        acc.ssg.push((e_prime * size) as f64);
        acc.mm.push((mm.epochs_run * size) as f64);
        acc.ssg_epochs.push(e_prime as f64);
        acc.mm_epochs.push(mm.epochs_run as f64);
        acc.ssg_counter.push(ssg.trace[idx].visited as f64);
        acc.mm_counter.push(mm.visited as f64);
    }
    if total == 0 {
        return Err(Error::InvalidArgument("no trial records".into()));
    }
    let rows = per_size
        .into_iter()
        .map(|(size, a)| {
            let deltas: Vec<f64> = a.mm.iter().zip(&a.ssg).map(|(m, s)| m - s).collect();
            RuntimeRow {
                size,
                trials: a.trials,
                excluded: a.excluded,
                mean_ssg_visited: mean(&a.ssg),
                mean_mm_visited: mean(&a.mm),
                median_ssg_visited: median(&a.ssg),
                median_mm_visited: median(&a.mm),
                mean_delta: mean(&deltas),
                mean_ssg_epochs: mean(&a.ssg_epochs),
                mean_mm_epochs: mean(&a.mm_epochs),
                mean_ssg_counter: mean(&a.ssg_counter),
                mean_mm_counter: mean(&a.mm_counter),
            }
        })
        .collect();
    Ok(RuntimeComparison {
        rows,
        excluded_rate: excluded as f64 / total as f64,
    })
}
