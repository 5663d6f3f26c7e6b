//! Multi-trial solver comparisons.
//!
//! Protocol A runs SSG and MM once per trial from a shared random-member
//! initialization on the whole dataset. Protocol B does the same on random
//! subsamples of several sizes. The variants SSG-1, SSG-e, SSG-E, MM-1 and
//! MM-E (E = epoch budget) are read off those two runs; nothing is re-run.
//!
//! Every (trial, size) cell derives its own seed from the master seed, the
//! dataset name, the trial index and the size, so results do not depend on
//! how cells are scheduled.

mod metrics;
mod output;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::dataset::{subsample, Dataset};
use crate::error::{Error, Result};
use crate::exec::map_indexed;
use crate::series::TimeSeries;
use crate::solvers::{
    init_solution, mm_mean_from, seeded_rng, ssg_mean_from, Algorithm, InitStrategy, MeanResult,
    SolverOptions,
};

pub use metrics::{
    percent_change_matrix, runtime_comparison, wins_matrix, MetricMatrix, PercentChange,
    RuntimeComparison, RuntimeRow,
};
pub use output::{summarize, write_outputs, Summary};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub trials: usize,
    pub epochs: usize,
    pub seed: u64,
    pub eta0: f64,
    pub eta1: f64,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        Self {
            trials: 30,
            epochs: 50,
            seed: 0,
            eta0: 0.05,
            eta1: 0.005,
        }
    }
}

impl ProtocolConfig {
    fn validate(&self) -> Result<()> {
        if self.trials == 0 || self.epochs == 0 {
            return Err(Error::InvalidArgument(
                "trials and epochs must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Best-so-far variation and cumulative visited count after one epoch.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub variation: f64,
    pub visited: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub dataset: String,
    pub trial: usize,
    pub size: usize,
    pub seed: u64,
    pub algorithm: Algorithm,
    pub variant: String,
    pub trace: Vec<TracePoint>,
    pub variation: f64,
    pub visited: u64,
    pub epochs_run: usize,
}

impl TrialRecord {
    fn from_run(
        cell: &Cell<'_>,
        result: &MeanResult,
        variant: String,
        epochs: usize,
    ) -> TrialRecord {
        let trace: Vec<TracePoint> = result
            .trace
            .iter()
            .take(epochs)
            .map(|r| TracePoint {
                variation: r.variation,
                visited: r.visited,
            })
            .collect();
        let last = trace.last().copied().unwrap_or(TracePoint {
            variation: result.initial_variation,
            visited: 0,
        });
        TrialRecord {
            dataset: cell.dataset.to_string(),
            trial: cell.trial,
            size: cell.size,
            seed: cell.seed,
            algorithm: result.algorithm,
            variant,
            epochs_run: trace.len(),
            variation: last.variation,
            visited: last.visited,
            trace,
        }
    }
}

/// Seed for one (trial, size) cell.
pub fn derive_seed(master: u64, dataset: &str, trial: usize, size: usize) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    let mut h = mix(master);
    for b in dataset.bytes() {
        h = mix(h ^ b as u64);
    }
    h = mix(h ^ trial as u64);
    mix(h ^ size as u64)
}

struct Cell<'a> {
    dataset: &'a str,
    trial: usize,
    size: usize,
    seed: u64,
}

/// Both solver runs of one cell from a shared initial solution.
fn run_cell(cell: &Cell<'_>, data: &Dataset, cfg: &ProtocolConfig) -> Result<Vec<TrialRecord>> {
    let mut rng = seeded_rng(cell.seed);
    let data = if cell.size == data.len() {
        data.clone()
    } else {
        subsample(data, cell.size, &mut rng)?
    };
    let init: TimeSeries = init_solution(&InitStrategy::RandomMember, &data.sample, &mut rng)?;
    let opts = SolverOptions {
        max_epochs: cfg.epochs,
        eta0: cfg.eta0,
        eta1: cfg.eta1,
        seed: rng.next_u64(),
        ..SolverOptions::new(Algorithm::Ssg)
    };
    let ssg = ssg_mean_from(&data.sample, &init, &opts)?;
    let mm = mm_mean_from(
        &data.sample,
        &init,
        &SolverOptions {
            algorithm: Algorithm::Mm,
            ..opts
        },
    )?;
    Ok(derive_variants(cell, &ssg, &mm, cfg.epochs))
}

fn derive_variants(cell: &Cell<'_>, ssg: &MeanResult, mm: &MeanResult, epochs: usize) -> Vec<TrialRecord> {
    vec![
        TrialRecord::from_run(cell, ssg, "SSG-1".into(), 1),
        TrialRecord::from_run(cell, ssg, "SSG-e".into(), mm.epochs_run),
        TrialRecord::from_run(cell, ssg, format!("SSG-{epochs}"), epochs),
        TrialRecord::from_run(cell, mm, "MM-1".into(), 1),
        TrialRecord::from_run(cell, mm, format!("MM-{epochs}"), epochs),
    ]
}

/// Protocol A: `trials` repetitions on the whole dataset.
pub fn run_protocol_a(dataset: &Dataset, cfg: &ProtocolConfig) -> Result<Vec<TrialRecord>> {
    cfg.validate()?;
    let size = dataset.len();
    let cells = map_indexed(cfg.trials, |trial| {
        let cell = Cell {
            dataset: &dataset.name,
            trial,
            size,
            seed: derive_seed(cfg.seed, &dataset.name, trial, size),
        };
        run_cell(&cell, dataset, cfg)
    });
    Ok(cells.into_iter().collect::<Result<Vec<_>>>()?.concat())
}

/// Protocol B: for every trial and every sample size, a fresh subsample.
pub fn run_protocol_b(dataset: &Dataset, sizes: &[usize], cfg: &ProtocolConfig) -> Result<Vec<TrialRecord>> {
    cfg.validate()?;
    if sizes.is_empty() {
        return Err(Error::InvalidArgument("no sample sizes given".into()));
    }
    if let Some(&bad) = sizes.iter().find(|&&s| s == 0 || s > dataset.len()) {
        return Err(Error::InvalidArgument(format!(
            "sample size {bad} must be between 1 and the dataset size {}",
            dataset.len()
        )));
    }
    let cells = map_indexed(cfg.trials * sizes.len(), |idx| {
        let (trial, size) = (idx / sizes.len(), sizes[idx % sizes.len()]);
        let cell = Cell {
            dataset: &dataset.name,
            trial,
            size,
            seed: derive_seed(cfg.seed, &dataset.name, trial, size),
        };
        run_cell(&cell, dataset, cfg)
    });
    Ok(cells.into_iter().collect::<Result<Vec<_>>>()?.concat())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::Sample;

    fn copies(n: usize) -> Dataset {
        let x = TimeSeries::univariate(vec![0.0, 1.0, 0.5, -0.5]).unwrap();
        Dataset::new("copies", Sample::new(vec![x; n]).unwrap(), None).unwrap()
    }

    #[test]
    fn identical_series_give_zero_everywhere() {
        let cfg = ProtocolConfig {
            trials: 2,
            epochs: 3,
            ..ProtocolConfig::default()
        };
        let records = run_protocol_a(&copies(4), &cfg).unwrap();
        assert_eq!(records.len(), 10);
        assert!(records.iter().all(|r| r.trace[0].variation == 0.0));
    }

    #[test]
    fn one_trial_structure() {
        let cfg = ProtocolConfig {
            trials: 1,
            epochs: 4,
            ..ProtocolConfig::default()
        };
        let records = run_protocol_a(&copies(3), &cfg).unwrap();
        let labels: Vec<_> = records.iter().map(|r| r.variant.as_str()).collect();
        assert_eq!(labels, ["SSG-1", "SSG-e", "SSG-4", "MM-1", "MM-4"]);
        let mm = &records[4];
        assert_eq!(records[1].epochs_run, mm.epochs_run);
        for r in &records {
            assert!(r.epochs_run <= 4);
        }
    }

    #[test]
    fn size_one_converges_to_the_series() {
        let cfg = ProtocolConfig {
            trials: 2,
            epochs: 2,
            ..ProtocolConfig::default()
        };
        let ds = crate::dataset::synth_sines(6, 8, 0.1, &mut seeded_rng(0)).unwrap();
        let records = run_protocol_b(&ds, &[1], &cfg).unwrap();
        assert!(records.iter().all(|r| r.variation == 0.0 && r.size == 1));
        assert!(run_protocol_b(&ds, &[7], &cfg).is_err());
        assert!(run_protocol_b(&ds, &[], &cfg).is_err());
    }

    #[test]
    fn seeds_are_cell_specific() {
        let a = derive_seed(0, "x", 0, 10);
        assert_ne!(a, derive_seed(0, "x", 1, 10));
        assert_ne!(a, derive_seed(0, "x", 0, 11));
        assert_ne!(a, derive_seed(0, "y", 0, 10));
        assert_ne!(a, derive_seed(1, "x", 0, 10));
        assert_eq!(a, derive_seed(0, "x", 0, 10));
    }
}
