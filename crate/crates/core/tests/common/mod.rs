#![allow(dead_code)]

use dtw_mean::solvers::SeededRng;
use dtw_mean::{Sample, TimeSeries, WarpingPath};
use rand::Rng;

pub fn uni(values: &[f64]) -> TimeSeries {
    TimeSeries::univariate(values.to_vec()).unwrap()
}

pub fn random_series(rng: &mut SeededRng, len: usize, dim: usize) -> TimeSeries {
    let values = (0..len * dim).map(|_| rng.random_range(-2.0..2.0)).collect();
    TimeSeries::new(len, dim, values).unwrap()
}

/// `count` series with lengths in `1..=max_len` and a shared dimension.
pub fn random_sample(rng: &mut SeededRng, count: usize, max_len: usize, dim: usize) -> Sample {
    let series = (0..count)
        .map(|_| {
            let len = rng.random_range(1..=max_len);
            random_series(rng, len, dim)
        })
        .collect();
    Sample::new(series).unwrap()
}

/// A uniformly stepped random warping path of order `(m, n)`.
pub fn random_path(rng: &mut SeededRng, m: usize, n: usize) -> WarpingPath {
    let (mut i, mut j) = (0, 0);
    let mut points = vec![(0, 0)];
    while (i, j) != (m - 1, n - 1) {
        match (i + 1 < m, j + 1 < n) {
            (true, true) => match rng.random_range(0..3) {
                0 => (i, j) = (i + 1, j + 1),
                1 => i += 1,
                _ => j += 1,
            },
            (true, false) => i += 1,
            _ => j += 1,
        }
        points.push((i, j));
    }
    WarpingPath::from_zero_based(m, n, points).unwrap()
}

/// Writes one acceptance result line to stderr, bypassing the test
/// harness's output capture so it shows up in every run.
pub fn report(criterion: u32, pass: bool, detail: &str) {
    use std::io::Write;
    let verdict = if pass { "PASS" } else { "FAIL" };
    let _ = writeln!(std::io::stderr().lock(), "acceptance {criterion:>2}: {verdict}  {detail}");
}
