use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::metrics::{percent_change_matrix, runtime_comparison, wins_matrix, RuntimeComparison};
use super::TrialRecord;
use crate::error::{Error, Result};

const HEADER: [&str; 8] = [
    "dataset", "trial", "size", "variant", "epoch", "variation", "visited", "seed",
];

/// Everything written to `summary.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub variants: Vec<String>,
    pub trials: usize,
    pub wins: Vec<Vec<f64>>,
    pub ties: Vec<Vec<f64>>,
    pub pct_change: Vec<Vec<f64>>,
    pub runtime: RuntimeComparison,
    pub excluded_rate: f64,
    pub warnings: Vec<String>,
}

pub fn summarize(records: &[TrialRecord]) -> Result<Summary> {
    let wins = wins_matrix(records)?;
    let pct = percent_change_matrix(records)?;
    let runtime = runtime_comparison(records)?;
    Ok(Summary {
        variants: wins.variants.clone(),
        trials: wins.trials,
        ties: wins.ties_matrix(),
        wins: wins.values,
        pct_change: pct.matrix.values,
        excluded_rate: runtime.excluded_rate,
        runtime,
        warnings: pct.warnings,
    })
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    Error::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

fn write_rows<I>(path: &Path, rows: I) -> Result<()>
where
    I: IntoIterator<Item = [String; 8]>,
{
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    w.write_record(HEADER).map_err(|e| csv_error(path, e))?;
    for row in rows {
        w.write_record(&row).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn row(r: &TrialRecord, epoch: usize, variation: f64, visited: u64) -> [String; 8] {
    [
        r.dataset.clone(),
        r.trial.to_string(),
        r.size.to_string(),
        r.variant.clone(),
        epoch.to_string(),
        variation.to_string(),
        visited.to_string(),
        r.seed.to_string(),
    ]
}

/// Writes `records.csv` (final state of each variant), `traces.csv` (one row
/// per epoch) and `summary.json` into `dir`, creating it if needed.
pub fn write_outputs(dir: &Path, records: &[TrialRecord]) -> Result<Summary> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let summary = summarize(records)?;
    write_rows(
        &dir.join("records.csv"),
        records.iter().map(|r| row(r, r.epochs_run, r.variation, r.visited)),
    )?;
    write_rows(
        &dir.join("traces.csv"),
        records.iter().flat_map(|r| {
            r.trace
                .iter()
                .enumerate()
                .map(move |(e, p)| row(r, e + 1, p.variation, p.visited))
        }),
    )?;
    let path = dir.join("summary.json");
    let json = serde_json::to_string_pretty(&summary).map_err(|e| Error::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    fs::write(&path, json + "\n").map_err(|e| Error::io(&path, e))?;
    Ok(summary)
}
