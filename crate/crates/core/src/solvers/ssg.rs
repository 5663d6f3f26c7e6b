use rand::seq::SliceRandom;
use rand::Rng;

use super::{
    seeded_rng, start, step_schedule, Algorithm, MeanResult, Sampling, SeededRng, SolverOptions,
    Termination, Tracker,
};
use crate::dtw::dtw_unchecked;
use crate::error::{Error, Result};
use crate::frechet::{single_series_step, variation_value};
use crate::series::{Sample, TimeSeries};

/// Incremental stochastic subgradient state: one update per incoming series.
#[derive(Clone, Debug)]
pub struct OnlineSsg {
    z: TimeSeries,
    iterations: usize,
    horizon: usize,
    eta0: f64,
    eta1: f64,
}

impl OnlineSsg {
    /// `horizon` is the number of iterations over which the step decays from
    /// `eta0` to `eta1`.
    pub fn new(init: TimeSeries, eta0: f64, eta1: f64, horizon: usize) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::InvalidArgument("step horizon must be at least 1".into()));
        }
        Ok(Self {
            z: init,
            iterations: 0,
            horizon,
            eta0,
            eta1,
        })
    }

    /// Aligns `x` to the current solution and applies `z - η (V z - W x)`.
    pub fn update(&mut self, x: &TimeSeries) -> Result<()> {
        if x.dim() != self.z.dim() {
            return Err(Error::Dimension {
                expected: self.z.dim(),
                found: x.dim(),
            });
        }
        self.iterations += 1;
        let eta = step_schedule(self.iterations, self.horizon, self.eta0, self.eta1);
        let path = dtw_unchecked(&self.z, x).path;
        self.z = single_series_step(&self.z, x, &path, eta);
        Ok(())
    }

    pub fn solution(&self) -> &TimeSeries {
        &self.z
    }

    pub fn into_solution(self) -> TimeSeries {
        self.z
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }
}

/// Runs SSG over a stream, discarding each series after its update. Stops
/// after `max_iterations` updates or when the stream ends.
pub fn ssg_online<I>(
    init: TimeSeries,
    stream: I,
    eta0: f64,
    eta1: f64,
    horizon: usize,
    max_iterations: usize,
) -> Result<TimeSeries>
where
    I: IntoIterator<Item = TimeSeries>,
{
    let mut state = OnlineSsg::new(init, eta0, eta1, horizon)?;
    for x in stream.into_iter().take(max_iterations) {
        state.update(&x)?;
    }
    Ok(state.into_solution())
}

/// Stochastic subgradient mean over a fixed sample.
///
/// An epoch is `N` single-series updates. The step follows [`step_schedule`]
/// with the sample size as horizon. The best solution is re-evaluated every
/// `track_best_every` epochs and after the last one.
pub fn ssg_mean(sample: &Sample, opts: &SolverOptions) -> Result<MeanResult> {
    let mut rng = seeded_rng(opts.seed);
    let z = start(sample, opts, &mut rng)?;
    run(sample, z, opts, &mut rng)
}

/// [`ssg_mean`] from an explicit initial solution; `opts.seed` drives only the
/// visiting order.
pub fn ssg_mean_from(sample: &Sample, init: &TimeSeries, opts: &SolverOptions) -> Result<MeanResult> {
    opts.validate()?;
    sample.check_dim(init)?;
    let mut rng = seeded_rng(opts.seed);
    run(sample, init.clone(), opts, &mut rng)
}

fn run(sample: &Sample, z: TimeSeries, opts: &SolverOptions, rng: &mut SeededRng) -> Result<MeanResult> {
    let n = sample.len();
    let initial_variation = variation_value(&z, sample);
    let mut tracker = Tracker::new(Algorithm::Ssg, z.clone(), initial_variation, n as u64, opts);
    let mut state = OnlineSsg::new(z, opts.eta0, opts.eta1, n)?;
    let mut order: Vec<usize> = (0..n).collect();

    for epoch in 1..=opts.max_epochs {
        match opts.sampling {
            Sampling::Permutation => order.shuffle(rng),
            Sampling::Uniform => order.iter_mut().for_each(|k| *k = rng.random_range(0..n)),
        }
        for &k in &order {
            state.update(sample.get(k))?;
        }
        tracker.visit(n);

        let evaluate = epoch % opts.track_best_every == 0 || epoch == opts.max_epochs;
        let raw = evaluate.then(|| {
            tracker.visit(n);
            variation_value(state.solution(), sample)
        });
        if tracker.end_epoch(epoch, state.solution(), raw, false) {
            return Ok(tracker.finish(state.into_solution(), Termination::NoImprovement));
        }
    }
    Ok(tracker.finish(state.into_solution(), Termination::MaxEpochs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uni(v: &[f64]) -> TimeSeries {
        TimeSeries::univariate(v.to_vec()).unwrap()
    }

    #[test]
    fn zero_step_never_moves() {
        let s = Sample::new(vec![uni(&[0.0, 1.0]), uni(&[2.0, 0.0, 1.0])]).unwrap();
        let init = uni(&[5.0, 5.0]);
        let opts = SolverOptions {
            eta0: 0.0,
            eta1: 0.0,
            max_epochs: 4,
            ..SolverOptions::default()
        };
        let r = ssg_mean_from(&s, &init, &opts).unwrap();
        assert_eq!(r.last, init);
        assert_eq!(r.best_variation, r.initial_variation);
    }

    #[test]
    fn unit_step_lands_on_single_series() {
        let x = uni(&[1.0, 2.0, 3.0]);
        let s = Sample::new(vec![x.clone()]).unwrap();
        let opts = SolverOptions {
            eta0: 1.0,
            eta1: 1.0,
            max_epochs: 1,
            ..SolverOptions::default()
        };
        let r = ssg_mean_from(&s, &uni(&[1.5, 2.5, 3.5]), &opts).unwrap();
        assert_eq!(r.last, x);
        assert_eq!(r.best_variation, 0.0);
    }

    #[test]
    fn visited_counts_updates_and_evaluations() {
        let s = Sample::new(vec![uni(&[0.0, 1.0]); 4]).unwrap();
        let opts = SolverOptions {
            max_epochs: 6,
            track_best_every: 2,
            ..SolverOptions::default()
        };
        let r = ssg_mean_from(&s, &uni(&[1.0, 1.0]), &opts).unwrap();
        // initial 4, then 6 epochs x 4 updates, plus 3 evaluations x 4
        assert_eq!(r.visited_examples, 4 + 24 + 12);
        assert_eq!(r.raw_trace().iter().filter(|v| v.is_some()).count(), 3);
    }

    #[test]
    fn online_mode() {
        let x = uni(&[1.0, 1.0]);
        let stream = std::iter::repeat(x.clone());
        let z = ssg_online(uni(&[0.0, 0.0]), stream, 0.5, 0.5, 1, 60).unwrap();
        assert!(z.max_abs_diff(&x) < 1e-12);
        let mut state = OnlineSsg::new(uni(&[0.0]), 0.1, 0.1, 1).unwrap();
        assert!(state.update(&TimeSeries::from_points(&[[1.0, 2.0]]).unwrap()).is_err());
    }
}
