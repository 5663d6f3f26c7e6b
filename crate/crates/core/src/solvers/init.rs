use rand::seq::index;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::SeededRng;
use crate::dtw::dtw_squared_unchecked;
use crate::error::{Error, Result};
use crate::exec::map_indexed;
use crate::series::{Sample, TimeSeries};

/// How a solver picks its initial solution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitStrategy {
    /// A uniformly chosen sample member.
    RandomMember,
    /// Standard normal entries at the mean sample length.
    RandomSeries,
    /// The sample member minimizing the summed squared DTW distance to all
    /// others; ties go to the lowest index.
    Medoid,
    /// The medoid of a uniformly drawn subsample of the given size.
    SubsampleMedoid(usize),
    /// A caller-supplied series.
    Given(TimeSeries),
}

pub fn init_solution(strategy: &InitStrategy, sample: &Sample, rng: &mut SeededRng) -> Result<TimeSeries> {
    if sample.is_empty() {
        return Err(Error::InvalidArgument("cannot initialize from an empty sample".into()));
    }
    let n = sample.len();
    Ok(match strategy {
        InitStrategy::RandomMember => sample.get(rng.random_range(0..n)).clone(),
        InitStrategy::RandomSeries => {
            let (len, dim) = (sample.mean_len(), sample.dim());
            let values = (0..len * dim).map(|_| rng.sample(StandardNormal)).collect();
            TimeSeries::new(len, dim, values)?
        }
        InitStrategy::Medoid => {
            let all: Vec<usize> = (0..n).collect();
            sample.get(medoid_index(sample, &all)).clone()
        }
        InitStrategy::SubsampleMedoid(size) => {
            if *size == 0 || *size > n {
                return Err(Error::InvalidArgument(format!(
                    "subsample size {size} must be between 1 and the sample size {n}"
                )));
            }
            let mut picked = index::sample(rng, n, *size).into_vec();
            picked.sort_unstable();
            sample.get(medoid_index(sample, &picked)).clone()
        }
        InitStrategy::Given(z) => z.clone(),
    })
}

/// Index (into the sample) of the medoid among `members`.
pub fn medoid_index(sample: &Sample, members: &[usize]) -> usize {
    let m = members.len();
    // Upper triangle; dtw² is symmetric.
    let rows = map_indexed(m, |a| {
        ((a + 1)..m)
            .map(|b| dtw_squared_unchecked(sample.get(members[a]), sample.get(members[b])))
            .collect::<Vec<f64>>()
    });
    let mut sums = vec![0.0; m];
    for (a, row) in rows.iter().enumerate() {
        for (offset, d) in row.iter().enumerate() {
            sums[a] += d;
            sums[a + 1 + offset] += d;
        }
    }
    let mut best = 0;
    for (a, &s) in sums.iter().enumerate() {
        if s < sums[best] {
            best = a;
        }
    }
    members[best]
}
