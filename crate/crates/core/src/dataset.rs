//! Delimited time-series files, multivariate manifests, subsampling and
//! synthetic data.
//!
//! The univariate format has one series per line, optionally preceded by an
//! integer class label. A multivariate dataset is a manifest listing one
//! series file per line (relative paths resolve against the manifest's
//! directory); each series file has one time point per line and one column
//! per dimension.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::index;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{Sample, TimeSeries};
use crate::solvers::SeededRng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Delimiter {
    Tab,
    Comma,
    Whitespace,
    /// Tab if any line contains one, else comma if any line contains one,
    /// else runs of whitespace.
    Auto,
}

impl Delimiter {
    fn resolve(self, text: &str) -> Delimiter {
        match self {
            Delimiter::Auto if text.contains('\t') => Delimiter::Tab,
            Delimiter::Auto if text.contains(',') => Delimiter::Comma,
            Delimiter::Auto => Delimiter::Whitespace,
            other => other,
        }
    }

    fn split<'a>(self, line: &'a str) -> Box<dyn Iterator<Item = &'a str> + 'a> {
        match self {
            Delimiter::Tab => Box::new(line.split('\t').map(str::trim)),
            Delimiter::Comma => Box::new(line.split(',').map(str::trim)),
            Delimiter::Whitespace | Delimiter::Auto => Box::new(line.split_whitespace()),
        }
    }

    fn separator(self) -> &'static str {
        match self {
            Delimiter::Comma => ",",
            Delimiter::Whitespace => " ",
            Delimiter::Tab | Delimiter::Auto => "\t",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LabelColumn {
    First,
    None,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub name: String,
    pub sample: Sample,
    pub labels: Option<Vec<i64>>,
}

impl Dataset {
    pub fn new(name: impl Into<String>, sample: Sample, labels: Option<Vec<i64>>) -> Result<Self> {
        if let Some(l) = &labels {
            if l.len() != sample.len() {
                return Err(Error::InvalidArgument(format!(
                    "{} labels for {} series",
                    l.len(),
                    sample.len()
                )));
            }
        }
        Ok(Self {
            name: name.into(),
            sample,
            labels,
        })
    }

    pub fn len(&self) -> usize {
        self.sample.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sample.is_empty()
    }

    /// Concatenates two datasets, e.g. a train and a test split.
    pub fn merge(self, other: Dataset) -> Result<Dataset> {
        let labels = match (self.labels, other.labels) {
            (Some(mut a), Some(b)) => {
                a.extend(b);
                Some(a)
            }
            (None, None) => None,
            _ => {
                return Err(Error::InvalidArgument(
                    "cannot merge a labelled with an unlabelled dataset".into(),
                ))
            }
        };
        let mut series = self.sample.into_series();
        series.extend(other.sample.into_series());
        Dataset::new(self.name, Sample::new(series)?, labels)
    }

    /// Z-normalizes every series.
    pub fn z_normalized(&self) -> Dataset {
        let series = self.sample.iter().map(TimeSeries::z_normalized).collect();
        Dataset {
            name: self.name.clone(),
            sample: Sample::new(series).expect("shape unchanged"),
            labels: self.labels.clone(),
        }
    }
}

fn dataset_name(path: &Path) -> String {
    path.file_stem()
        .map_or_else(|| "dataset".into(), |s| s.to_string_lossy().into_owned())
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn parse_value(field: &str, path: &Path, line: usize, column: usize) -> Result<f64> {
    let err = |message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        column,
        message,
    };
    if field.is_empty() {
        return Err(err("empty field".into()));
    }
    let v: f64 = field
        .parse()
        .map_err(|_| err(format!("not a number: {field:?}")))?;
    if !v.is_finite() {
        return Err(err(format!("non-finite value {field:?}")));
    }
    Ok(v)
}

/// Loads a univariate dataset, one series per non-blank line. Rows may have
/// different lengths.
pub fn load_delimited(path: impl AsRef<Path>, delimiter: Delimiter, labels: LabelColumn) -> Result<Dataset> {
    let path = path.as_ref();
    let text = read(path)?;
    parse_delimited(&text, path, delimiter, labels)
}

pub fn parse_delimited(text: &str, path: &Path, delimiter: Delimiter, labels: LabelColumn) -> Result<Dataset> {
    let delimiter = delimiter.resolve(text);
    let mut series = Vec::new();
    let mut label_values = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut values = Vec::new();
        for (c, field) in delimiter.split(line.trim()).enumerate() {
            values.push(parse_value(field, path, lineno, c + 1)?);
        }
        if labels == LabelColumn::First {
            let label = values.remove(0);
            if label.fract() != 0.0 {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: lineno,
                    column: 1,
                    message: format!("class label {label} is not an integer"),
                });
            }
            label_values.push(label as i64);
        }
        if values.is_empty() {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: lineno,
                column: 1,
                message: "row has no values".into(),
            });
        }
        series.push(TimeSeries::univariate(values)?);
    }
    if series.is_empty() {
        return Err(Error::Format {
            path: path.to_path_buf(),
            message: "file contains no series".into(),
        });
    }
    Dataset::new(
        dataset_name(path),
        Sample::new(series)?,
        (labels == LabelColumn::First).then_some(label_values),
    )
}

/// Formats a univariate dataset in the delimited format. `f64` values are
/// written in their shortest round-trip form.
pub fn format_delimited(dataset: &Dataset, delimiter: Delimiter) -> Result<String> {
    if dataset.sample.dim() != 1 {
        return Err(Error::InvalidArgument(format!(
            "the delimited format is univariate; dataset has dimension {}",
            dataset.sample.dim()
        )));
    }
    let sep = delimiter.separator();
    let mut out = String::new();
    for (k, x) in dataset.sample.iter().enumerate() {
        if let Some(labels) = &dataset.labels {
            write!(out, "{}{sep}", labels[k]).unwrap();
        }
        write_row(&mut out, x.values(), sep);
    }
    Ok(out)
}

fn write_row(out: &mut String, values: &[f64], sep: &str) {
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            out.push_str(sep);
        }
        write!(out, "{v}").unwrap();
    }
    out.push('\n');
}

pub fn write_delimited(dataset: &Dataset, path: impl AsRef<Path>, delimiter: Delimiter) -> Result<()> {
    let path = path.as_ref();
    let text = format_delimited(dataset, delimiter)?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Reads one series with one time point per line and one column per dimension.
pub fn load_series_matrix(path: impl AsRef<Path>, delimiter: Delimiter) -> Result<TimeSeries> {
    let path = path.as_ref();
    let text = read(path)?;
    let delimiter = delimiter.resolve(&text);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row = delimiter
            .split(line.trim())
            .enumerate()
            .map(|(c, f)| parse_value(f, path, idx + 1, c + 1))
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: idx + 1,
                    column: row.len().min(first.len()) + 1,
                    message: format!("expected {} columns, found {}", first.len(), row.len()),
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Format {
            path: path.to_path_buf(),
            message: "file contains no time points".into(),
        });
    }
    TimeSeries::from_points(&rows)
}

pub fn format_series_matrix(series: &TimeSeries, delimiter: Delimiter) -> String {
    let mut out = String::new();
    for p in series.points() {
        write_row(&mut out, p, delimiter.separator());
    }
    out
}

pub fn write_series_matrix(series: &TimeSeries, path: impl AsRef<Path>, delimiter: Delimiter) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_series_matrix(series, delimiter)).map_err(|e| Error::io(path, e))
}

/// Loads a multivariate dataset from a manifest of series files.
pub fn load_manifest(path: impl AsRef<Path>, delimiter: Delimiter) -> Result<Dataset> {
    let path = path.as_ref();
    let text = read(path)?;
    let base = path.parent().unwrap_or(Path::new(""));
    let mut series = Vec::new();
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
        let entry = PathBuf::from(line);
        let entry = if entry.is_absolute() { entry } else { base.join(entry) };
        series.push(load_series_matrix(&entry, delimiter)?);
    }
    if series.is_empty() {
        return Err(Error::Format {
            path: path.to_path_buf(),
            message: "manifest lists no series".into(),
        });
    }
    Dataset::new(dataset_name(path), Sample::new(series)?, None)
}

/// Writes each series as `<stem>_<k>.tsv` next to the manifest, and the
/// manifest listing them.
pub fn write_manifest(dataset: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let base = path.parent().unwrap_or(Path::new(""));
    let stem = dataset_name(path);
    let mut manifest = String::new();
    for (k, x) in dataset.sample.iter().enumerate() {
        let file = format!("{stem}_{k}.tsv");
        write_series_matrix(x, base.join(&file), Delimiter::Tab)?;
        manifest.push_str(&file);
        manifest.push('\n');
    }
    fs::write(path, manifest).map_err(|e| Error::io(path, e))
}

/// Uniform subsample of `size` series without replacement, kept in their
/// original order.
pub fn subsample(dataset: &Dataset, size: usize, rng: &mut SeededRng) -> Result<Dataset> {
    let n = dataset.len();
    if size == 0 || size > n {
        return Err(Error::InvalidArgument(format!(
            "subsample size {size} must be between 1 and the dataset size {n}"
        )));
    }
    let mut picked = index::sample(rng, n, size).into_vec();
    picked.sort_unstable();
    let series = picked.iter().map(|&k| dataset.sample.get(k).clone()).collect();
    let labels = dataset
        .labels
        .as_ref()
        .map(|l| picked.iter().map(|&k| l[k]).collect());
    Dataset::new(dataset.name.clone(), Sample::new(series)?, labels)
}

/// Parameters of the synthetic sine generator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthParams {
    pub count: usize,
    pub length: usize,
    pub noise_sigma: f64,
    /// Phase offsets are uniform in `[-phase_jitter, phase_jitter]` radians.
    pub phase_jitter: f64,
    /// Warp strengths are uniform in `[-warp_jitter, warp_jitter]`; must be
    /// below 1 so that the time warp stays monotone.
    pub warp_jitter: f64,
    pub cycles: f64,
    /// Per-series cycle counts are uniform in `cycles ± cycle_jitter`.
    pub cycle_jitter: f64,
    /// Exponent `p` of the wave shape `sign(s) |s|^p`: 1 is a pure sine,
    /// values near 0 approach a square wave.
    pub sharpness: f64,
}

impl SynthParams {
    pub fn new(count: usize, length: usize, noise_sigma: f64) -> Self {
        Self {
            count,
            length,
            noise_sigma,
            phase_jitter: std::f64::consts::PI,
            warp_jitter: 0.6,
            cycles: 2.5,
            cycle_jitter: 1.0,
            sharpness: 0.1,
        }
    }
}

/// Noisy, sharpened, randomly shifted and time-warped sinusoids with the
/// default [`SynthParams`].
pub fn synth_sines(count: usize, length: usize, noise_sigma: f64, rng: &mut SeededRng) -> Result<Dataset> {
    synth_sines_with(&SynthParams::new(count, length, noise_sigma), rng)
}

/// Series `k` is `shape(sin(2π c_k w_k(u) + φ_k)) + σ ε` on `u ∈ [0, 1]`,
/// where `shape(s) = sign(s) |s|^p` sharpens the wave towards a square wave,
/// `w_k(u) = u + a_k u (1 - u)` is a monotone time warp, and the cycle count
/// `c_k`, phase `φ_k` and warp strength `a_k` are drawn per series.
///
/// The default near-square shape with random phase and frequency gives the
/// Fréchet function many poor local minima, as step-like real-world data
/// does.
pub fn synth_sines_with(params: &SynthParams, rng: &mut SeededRng) -> Result<Dataset> {
    let SynthParams {
        count,
        length,
        noise_sigma,
        phase_jitter,
        warp_jitter,
        cycles,
        cycle_jitter,
        sharpness,
    } = *params;
    if count == 0 || length == 0 {
        return Err(Error::InvalidArgument("count and length must be at least 1".into()));
    }
    let nonnegative = [noise_sigma, phase_jitter, cycle_jitter, sharpness]
        .iter()
        .all(|v| v.is_finite() && *v >= 0.0);
    if !(nonnegative && cycles.is_finite() && (0.0..1.0).contains(&warp_jitter)) {
        return Err(Error::InvalidArgument(format!(
            "need finite noise_sigma, phase_jitter, cycle_jitter and sharpness >= 0 and 0 <= warp_jitter < 1 \
             (got {noise_sigma}, {phase_jitter}, {cycle_jitter}, {sharpness}, {warp_jitter})"
        )));
    }
    let jitter = |rng: &mut SeededRng, width: f64| {
        if width > 0.0 {
            rng.random_range(-width..=width)
        } else {
            0.0
        }
    };
    let mut series = Vec::with_capacity(count);
    for _ in 0..count {
        let phase = jitter(rng, phase_jitter);
        let warp = jitter(rng, warp_jitter);
        let cycles = cycles + jitter(rng, cycle_jitter);
        let values = (0..length)
            .map(|i| {
                let u = if length > 1 { i as f64 / (length - 1) as f64 } else { 0.0 };
                let w = u + warp * u * (1.0 - u);
                let s = (std::f64::consts::TAU * cycles * w + phase).sin();
                let clean = if sharpness == 1.0 { s } else { s.signum() * s.abs().powf(sharpness) };
                if noise_sigma > 0.0 {
                    clean + noise_sigma * rng.sample::<f64, _>(StandardNormal)
                } else {
                    clean
                }
            })
            .collect();
        series.push(TimeSeries::univariate(values)?);
    }
    Dataset::new("synth_sines", Sample::new(series)?, None)
}
