//! Mean algorithms: batch subgradient (SG), majorize-minimize (MM, also known
//! as DBA) and stochastic subgradient (SSG).

mod init;
mod mm;
mod schedule;
mod sg;
mod ssg;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{Sample, TimeSeries};

pub use init::{init_solution, medoid_index, InitStrategy};
pub use mm::{mm_mean, mm_mean_from, MM_RELATIVE_TOLERANCE};
pub use schedule::step_schedule;
pub use sg::{sg_mean, sg_mean_from};
pub use ssg::{ssg_mean, ssg_mean_from, ssg_online, OnlineSsg};

/// The random generator used everywhere a seed is accepted.
pub type SeededRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Sg,
    Mm,
    Ssg,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Sg => "SG",
            Algorithm::Mm => "MM",
            Algorithm::Ssg => "SSG",
        }
    }
}

/// Step size rule of the batch subgradient solver.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum SgStep {
    /// Per-coordinate step `((2/N) Σ V_k)^{-1}`; SG then coincides with MM.
    PerCoordinate,
    /// Scalar step from [`step_schedule`], counted in epochs and decaying
    /// over `horizon` epochs (default: `max_epochs`).
    Scalar { horizon: Option<usize> },
}

/// How SSG picks the next sample series.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sampling {
    /// A fresh seeded permutation of the sample every epoch.
    Permutation,
    /// Independent uniform draws; an epoch is still `N` draws.
    Uniform,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub algorithm: Algorithm,
    pub max_epochs: usize,
    pub init: InitStrategy,
    pub eta0: f64,
    pub eta1: f64,
    pub seed: u64,
    /// SSG evaluates the Fréchet function every this many epochs.
    pub track_best_every: usize,
    /// Stop after this many evaluated epochs without improvement of the best
    /// solution.
    pub no_improvement_patience: Option<usize>,
    pub sg_step: SgStep,
    pub sampling: Sampling,
    /// Keep every epoch's iterate in [`MeanResult::iterates`].
    pub record_iterates: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::Ssg,
            max_epochs: 50,
            init: InitStrategy::RandomMember,
            eta0: 0.05,
            eta1: 0.005,
            seed: 0,
            track_best_every: 1,
            no_improvement_patience: None,
            sg_step: SgStep::PerCoordinate,
            sampling: Sampling::Permutation,
            record_iterates: false,
        }
    }
}

impl SolverOptions {
    pub fn new(algorithm: Algorithm) -> Self {
        Self {
            algorithm,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.max_epochs == 0 {
            return bad("max_epochs must be at least 1".into());
        }
        if self.track_best_every == 0 {
            return bad("track_best_every must be at least 1".into());
        }
        if !(self.eta0.is_finite() && self.eta1.is_finite()) || self.eta0 < 0.0 || self.eta1 < 0.0 {
            return bad(format!(
                "step sizes must be finite and nonnegative (eta0 = {}, eta1 = {})",
                self.eta0, self.eta1
            ));
        }
        if self.eta1 > self.eta0 {
            return bad(format!(
                "eta1 = {} must not exceed eta0 = {}",
                self.eta1, self.eta0
            ));
        }
        if self.no_improvement_patience == Some(0) {
            return bad("no_improvement_patience must be at least 1".into());
        }
        if let SgStep::Scalar { horizon: Some(0) } = self.sg_step {
            return bad("SG step horizon must be at least 1".into());
        }
        Ok(())
    }
}

/// Why a solver stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    #[serde(rename = "T1-max-epochs")]
    MaxEpochs,
    #[serde(rename = "T2-no-improvement")]
    NoImprovement,
    #[serde(rename = "MM-fixed-point")]
    FixedPoint,
}

impl Termination {
    pub fn tag(self) -> &'static str {
        match self {
            Termination::MaxEpochs => "T1-max-epochs",
            Termination::NoImprovement => "T2-no-improvement",
            Termination::FixedPoint => "MM-fixed-point",
        }
    }
}

/// State after one epoch.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    /// Fréchet variation of the best solution found so far.
    pub variation: f64,
    /// Fréchet variation of the current iterate, when it was evaluated.
    pub raw_variation: Option<f64>,
    /// Sample series visited so far, cumulative.
    pub visited: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanResult {
    pub algorithm: Algorithm,
    pub best: TimeSeries,
    pub best_variation: f64,
    pub initial: TimeSeries,
    pub initial_variation: f64,
    /// The last iterate, which need not be the best one.
    pub last: TimeSeries,
    pub trace: Vec<EpochRecord>,
    /// Every series processed by an alignment or evaluation step, including
    /// the evaluation of the initial solution.
    pub visited_examples: u64,
    pub epochs_run: usize,
    pub terminated_by: Termination,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub iterates: Vec<TimeSeries>,
}

impl MeanResult {
    /// Best-so-far variation after `epoch` epochs (1-based). Epochs past the
    /// end of the run report the final value.
    pub fn variation_at(&self, epoch: usize) -> f64 {
        assert!(epoch >= 1, "epochs are 1-based");
        self.trace
            .get(epoch - 1)
            .or(self.trace.last())
            .map_or(self.initial_variation, |r| r.variation)
    }

    pub fn raw_trace(&self) -> Vec<Option<f64>> {
        self.trace.iter().map(|r| r.raw_variation).collect()
    }
}

/// Runs the algorithm named in `opts`.
pub fn solve(sample: &Sample, opts: &SolverOptions) -> Result<MeanResult> {
    match opts.algorithm {
        Algorithm::Sg => sg_mean(sample, opts),
        Algorithm::Mm => mm_mean(sample, opts),
        Algorithm::Ssg => ssg_mean(sample, opts),
    }
}

/// Best-so-far bookkeeping shared by the solvers.
struct Tracker {
    algorithm: Algorithm,
    initial: TimeSeries,
    initial_variation: f64,
    best: TimeSeries,
    best_variation: f64,
    trace: Vec<EpochRecord>,
    visited: u64,
    stale_epochs: usize,
    patience: Option<usize>,
    record_iterates: bool,
    iterates: Vec<TimeSeries>,
}

impl Tracker {
    fn new(algorithm: Algorithm, init: TimeSeries, variation: f64, visited: u64, opts: &SolverOptions) -> Self {
        Self {
            algorithm,
            initial: init.clone(),
            initial_variation: variation,
            best: init,
            best_variation: variation,
            trace: Vec::new(),
            visited,
            stale_epochs: 0,
            patience: opts.no_improvement_patience,
            record_iterates: opts.record_iterates,
            iterates: Vec::new(),
        }
    }

    fn visit(&mut self, count: usize) {
        self.visited += count as u64;
    }

    /// Records the end of an epoch. `raw` is the variation of `z` if it was
    /// evaluated. `accept_ties` lets an equally good iterate replace the best.
    /// Returns true when the no-improvement criterion fires.
    fn end_epoch(&mut self, epoch: usize, z: &TimeSeries, raw: Option<f64>, accept_ties: bool) -> bool {
        if self.record_iterates {
            self.iterates.push(z.clone());
        }
        let mut improved = false;
        if let Some(v) = raw {
            if v < self.best_variation || (accept_ties && v == self.best_variation) {
                improved = v < self.best_variation;
                self.best = z.clone();
                self.best_variation = v;
            }
        }
        self.trace.push(EpochRecord {
            epoch,
            variation: self.best_variation,
            raw_variation: raw,
            visited: self.visited,
        });
        if raw.is_none() {
            return false;
        }
        if improved {
            self.stale_epochs = 0;
        } else {
            self.stale_epochs += 1;
        }
        self.patience.is_some_and(|p| self.stale_epochs >= p)
    }

    fn finish(self, last: TimeSeries, terminated_by: Termination) -> MeanResult {
        MeanResult {
            algorithm: self.algorithm,
            best: self.best,
            best_variation: self.best_variation,
            initial: self.initial,
            initial_variation: self.initial_variation,
            last,
            epochs_run: self.trace.len(),
            trace: self.trace,
            visited_examples: self.visited,
            terminated_by,
            iterates: self.iterates,
        }
    }
}

/// Resolves the initial solution and checks it against the sample.
fn start(sample: &Sample, opts: &SolverOptions, rng: &mut SeededRng) -> Result<TimeSeries> {
    opts.validate()?;
    let z = init_solution(&opts.init, sample, rng)?;
    sample.check_dim(&z)?;
    Ok(z)
}
