use super::{
    seeded_rng, start, step_schedule, Algorithm, MeanResult, SgStep, SolverOptions, Termination,
    Tracker,
};
use crate::error::Result;
use crate::frechet::{variation_unchecked, Aggregate};
use crate::series::{Sample, TimeSeries};

/// Batch subgradient mean.
///
/// One iteration is one epoch: align every series, step along the negative
/// gradient of the active component function, then evaluate the new solution
/// (whose alignments feed the next iteration).
pub fn sg_mean(sample: &Sample, opts: &SolverOptions) -> Result<MeanResult> {
    let mut rng = seeded_rng(opts.seed);
    let z = start(sample, opts, &mut rng)?;
    run(sample, z, opts)
}

/// [`sg_mean`] from an explicit initial solution.
pub fn sg_mean_from(sample: &Sample, init: &TimeSeries, opts: &SolverOptions) -> Result<MeanResult> {
    opts.validate()?;
    sample.check_dim(init)?;
    run(sample, init.clone(), opts)
}

fn run(sample: &Sample, mut z: TimeSeries, opts: &SolverOptions) -> Result<MeanResult> {
    let n = sample.len();
    let eval = variation_unchecked(&z, sample);
    let mut tracker = Tracker::new(Algorithm::Sg, z.clone(), eval.value, n as u64, opts);
    let mut config = eval.configuration;

    for epoch in 1..=opts.max_epochs {
        let agg = Aggregate::new(z.len(), sample, &config);
        z = match opts.sg_step {
            // z - ((2/N) ΣV)^{-1} (2/N)(ΣV z - ΣWx) cancels to (ΣV)^{-1} ΣWx;
            // evaluating the cancelled form keeps SG bit-identical to MM.
            SgStep::PerCoordinate => agg.minimizer(),
            SgStep::Scalar { horizon } => {
                let eta = step_schedule(
                    epoch,
                    horizon.unwrap_or(opts.max_epochs),
                    opts.eta0,
                    opts.eta1,
                );
                let g = agg.gradient(&z, n);
                let values = z.values().iter().zip(&g).map(|(v, g)| v - eta * g).collect();
                TimeSeries::from_raw_unchecked(z.len(), z.dim(), values)
            }
        };
        let eval = variation_unchecked(&z, sample);
        tracker.visit(n);
        if tracker.end_epoch(epoch, &z, Some(eval.value), false) {
            return Ok(tracker.finish(z, Termination::NoImprovement));
        }
        config = eval.configuration;
    }
    Ok(tracker.finish(z, Termination::MaxEpochs))
}
