use super::{seeded_rng, start, Algorithm, MeanResult, SolverOptions, Termination, Tracker};
use crate::error::Result;
use crate::frechet::{variation_unchecked, Aggregate};
use crate::series::{Sample, TimeSeries};

/// Relative tolerance of the fixed-point test: MM stops once
/// `|F_prev - F| <= MM_RELATIVE_TOLERANCE * max(1, F_prev)`.
pub const MM_RELATIVE_TOLERANCE: f64 = 1e-12;

/// Majorize-minimize mean (DBA).
///
/// Each epoch aligns every sample series to the current solution and replaces
/// the solution by the minimizer of the resulting component function. The
/// alignments computed to evaluate the new solution are reused as the next
/// epoch's majorization, so an epoch costs `N` DTW computations.
pub fn mm_mean(sample: &Sample, opts: &SolverOptions) -> Result<MeanResult> {
    let mut rng = seeded_rng(opts.seed);
    let z = start(sample, opts, &mut rng)?;
    run(sample, z, opts)
}

/// [`mm_mean`] from an explicit initial solution.
pub fn mm_mean_from(sample: &Sample, init: &TimeSeries, opts: &SolverOptions) -> Result<MeanResult> {
    opts.validate()?;
    sample.check_dim(init)?;
    run(sample, init.clone(), opts)
}

fn run(sample: &Sample, mut z: TimeSeries, opts: &SolverOptions) -> Result<MeanResult> {
    let n = sample.len();
    let eval = variation_unchecked(&z, sample);
    let mut tracker = Tracker::new(Algorithm::Mm, z.clone(), eval.value, n as u64, opts);
    let mut previous = eval.value;
    let mut config = eval.configuration;

    for epoch in 1..=opts.max_epochs {
        z = Aggregate::new(z.len(), sample, &config).minimizer();
        let eval = variation_unchecked(&z, sample);
        tracker.visit(n);
        let stale = tracker.end_epoch(epoch, &z, Some(eval.value), true);
        if (previous - eval.value).abs() <= MM_RELATIVE_TOLERANCE * previous.max(1.0) {
            return Ok(tracker.finish(z, Termination::FixedPoint));
        }
        if stale {
            return Ok(tracker.finish(z, Termination::NoImprovement));
        }
        previous = eval.value;
        config = eval.configuration;
    }
    Ok(tracker.finish(z, Termination::MaxEpochs))
}
