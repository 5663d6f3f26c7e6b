//! The Fréchet function of a sample and its component functions.
//!
//! A configuration fixes one warping path per sample series; the resulting
//! component function is a convex quadratic in the candidate, and the Fréchet
//! function is the pointwise minimum over all configurations.

use ndarray::Array2;

use crate::dtw::{dtw_unchecked, path_cost_unchecked};
use crate::error::{Error, Result};
use crate::exec::map_indexed;
use crate::path::{Configuration, WarpingPath};
use crate::series::{Sample, TimeSeries};

/// Value of the Fréchet function at a candidate, with the optimal paths found
/// while computing it.
#[derive(Clone, Debug, PartialEq)]
pub struct Variation {
    pub value: f64,
    /// Squared DTW distance to each sample series.
    pub squared: Vec<f64>,
    pub configuration: Configuration,
}

/// `(1/N) Σ_k dtw²(z, x_k)`, plus the optimal configuration at `z`.
pub fn frechet_variation(z: &TimeSeries, sample: &Sample) -> Result<Variation> {
    sample.check_dim(z)?;
    Ok(variation_unchecked(z, sample))
}

pub(crate) fn variation_unchecked(z: &TimeSeries, sample: &Sample) -> Variation {
    let results = map_indexed(sample.len(), |k| dtw_unchecked(z, sample.get(k)));
    let mut total = 0.0;
    let mut squared = Vec::with_capacity(results.len());
    let mut paths = Vec::with_capacity(results.len());
    for r in results {
        total += r.squared;
        squared.push(r.squared);
        paths.push(r.path);
    }
    Variation {
        value: total / sample.len() as f64,
        squared,
        configuration: Configuration::new(paths),
    }
}

/// Fréchet variation without keeping paths.
pub(crate) fn variation_value(z: &TimeSeries, sample: &Sample) -> f64 {
    let sq = map_indexed(sample.len(), |k| {
        crate::dtw::dtw_squared_unchecked(z, sample.get(k))
    });
    sq.iter().sum::<f64>() / sample.len() as f64
}

/// The configuration of DTW-optimal paths between `z` and every sample series.
pub fn optimal_configuration(z: &TimeSeries, sample: &Sample) -> Result<Configuration> {
    Ok(frechet_variation(z, sample)?.configuration)
}

/// Checks that `config` has one path of order `(n, len(x_k))` per series.
pub fn check_configuration(n: usize, sample: &Sample, config: &Configuration) -> Result<()> {
    if config.len() != sample.len() {
        return Err(Error::Configuration(format!(
            "{} paths for {} sample series",
            config.len(),
            sample.len()
        )));
    }
    for (k, (p, x)) in config.paths.iter().zip(sample).enumerate() {
        if p.order() != (n, x.len()) {
            return Err(Error::Configuration(format!(
                "path {} has order {:?}, expected ({n}, {})",
                k + 1,
                p.order(),
                x.len()
            )));
        }
    }
    Ok(())
}

fn check_candidate(z: &TimeSeries, sample: &Sample, config: &Configuration) -> Result<()> {
    sample.check_dim(z)?;
    check_configuration(z.len(), sample, config)
}

/// `F_C(z) = (1/N) Σ_k C_{p_k}(z, x_k)`.
pub fn component_value(z: &TimeSeries, sample: &Sample, config: &Configuration) -> Result<f64> {
    check_candidate(z, sample, config)?;
    Ok(component_value_unchecked(z, sample, config))
}

pub(crate) fn component_value_unchecked(
    z: &TimeSeries,
    sample: &Sample,
    config: &Configuration,
) -> f64 {
    let total: f64 = config
        .paths
        .iter()
        .zip(sample)
        .map(|(p, x)| path_cost_unchecked(z, x, p))
        .sum();
    total / sample.len() as f64
}

/// Summed valences and summed warped series of a configuration, accumulated
/// in sample order.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Aggregate {
    pub len: usize,
    pub dim: usize,
    /// `Σ_k diag(V_k)`.
    pub valence: Vec<u64>,
    /// `Σ_k W_k x_k`, row-major `len x dim`.
    pub warped: Vec<f64>,
}

impl Aggregate {
    pub fn new(len: usize, sample: &Sample, config: &Configuration) -> Self {
        let dim = sample.dim();
        let mut valence = vec![0u64; len];
        let mut warped = vec![0.0; len * dim];
        for (p, x) in config.paths.iter().zip(sample) {
            for &(i, j) in p.points() {
                valence[i] += 1;
                let row = &mut warped[i * dim..(i + 1) * dim];
                for (acc, v) in row.iter_mut().zip(x.point(j)) {
                    *acc += v;
                }
            }
        }
        Self {
            len,
            dim,
            valence,
            warped,
        }
    }

    /// `(Σ V_k)^{-1} Σ W_k x_k`.
    pub fn minimizer(&self) -> TimeSeries {
        let values = self
            .warped
            .chunks_exact(self.dim)
            .zip(&self.valence)
            .flat_map(|(row, &s)| row.iter().map(move |v| v / s as f64))
            .collect();
        TimeSeries::from_raw_unchecked(self.len, self.dim, values)
    }

    /// `(2/N) (Σ V_k z - Σ W_k x_k)`, row-major.
    pub fn gradient(&self, z: &TimeSeries, sample_size: usize) -> Vec<f64> {
        let scale = 2.0 / sample_size as f64;
        z.values()
            .iter()
            .zip(&self.warped)
            .enumerate()
            .map(|(idx, (zv, b))| scale * (self.valence[idx / self.dim] as f64 * zv - b))
            .collect()
    }
}

/// Gradient of the component function: `(2/N) Σ_k (V_k z - W_k x_k)`, one
/// column per dimension.
pub fn component_gradient(
    z: &TimeSeries,
    sample: &Sample,
    config: &Configuration,
) -> Result<Array2<f64>> {
    check_candidate(z, sample, config)?;
    let agg = Aggregate::new(z.len(), sample, config);
    let g = agg.gradient(z, sample.len());
    Ok(Array2::from_shape_vec((z.len(), z.dim()), g).expect("shape matches"))
}

/// The unique minimizer `(Σ V_k)^{-1} (Σ W_k x_k)` of the component function.
/// Its length is the row count shared by the configuration's paths.
pub fn component_minimizer(sample: &Sample, config: &Configuration) -> Result<TimeSeries> {
    let n = config.candidate_len().ok_or_else(|| {
        Error::Configuration("paths disagree on the candidate length or are missing".into())
    })?;
    check_configuration(n, sample, config)?;
    Ok(Aggregate::new(n, sample, config).minimizer())
}

/// Single-series update `z - step (V z - W x)` along `path`.
pub(crate) fn single_series_step(z: &TimeSeries, x: &TimeSeries, path: &WarpingPath, step: f64) -> TimeSeries {
    let dim = z.dim();
    let mut valence = vec![0u32; z.len()];
    let mut warped = vec![0.0; z.len() * dim];
    for &(i, j) in path.points() {
        valence[i] += 1;
        for (acc, v) in warped[i * dim..(i + 1) * dim].iter_mut().zip(x.point(j)) {
            *acc += v;
        }
    }
    let values = z
        .values()
        .iter()
        .zip(&warped)
        .enumerate()
        .map(|(idx, (zv, b))| zv - step * (valence[idx / dim] as f64 * zv - b))
        .collect();
    TimeSeries::from_raw_unchecked(z.len(), dim, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uni(v: &[f64]) -> TimeSeries {
        TimeSeries::univariate(v.to_vec()).unwrap()
    }

    fn sample(series: &[&[f64]]) -> Sample {
        Sample::new(series.iter().map(|s| uni(s)).collect()).unwrap()
    }

    #[test]
    fn variation_examples() {
        let z = uni(&[0.3, -1.2, 0.8]);
        let copies = Sample::new(vec![z.clone(); 4]).unwrap();
        assert_eq!(frechet_variation(&z, &copies).unwrap().value, 0.0);

        let z = uni(&[0.0, 0.0]);
        assert_eq!(frechet_variation(&z, &sample(&[&[1.0, 1.0]])).unwrap().value, 2.0);
        let two = sample(&[&[1.0, 1.0], &[-1.0, -1.0]]);
        assert_eq!(frechet_variation(&z, &two).unwrap().value, 2.0);
    }

    #[test]
    fn optimal_configuration_examples() {
        let x = uni(&[0.5, 1.5, -0.5]);
        let c = optimal_configuration(&x, &Sample::new(vec![x.clone()]).unwrap()).unwrap();
        assert_eq!(c.paths, vec![WarpingPath::diagonal(3).unwrap()]);

        let z = uni(&[0.0, 0.0]);
        let s = sample(&[&[1.0, 1.0]]);
        let c = optimal_configuration(&z, &s).unwrap();
        assert_eq!(c.paths, vec![WarpingPath::diagonal(2).unwrap()]);
        assert_eq!(
            component_value(&z, &s, &c).unwrap(),
            frechet_variation(&z, &s).unwrap().value
        );
    }

    #[test]
    fn component_value_examples() {
        let z = uni(&[0.0, 0.0]);
        let s = sample(&[&[1.0, 1.0]]);
        let diag = Configuration::new(vec![WarpingPath::diagonal(2).unwrap()]);
        assert_eq!(component_value(&z, &s, &diag).unwrap(), 2.0);
        let other = Configuration::new(vec![
            WarpingPath::from_one_based(2, 2, &[(1, 1), (1, 2), (2, 2)]).unwrap(),
        ]);
        assert_eq!(component_value(&z, &s, &other).unwrap(), 3.0);
    }

    #[test]
    fn inconsistent_configuration_rejected() {
        let z = uni(&[0.0, 0.0]);
        let s = sample(&[&[1.0, 1.0, 1.0]]);
        let diag = Configuration::new(vec![WarpingPath::diagonal(2).unwrap()]);
        assert!(matches!(component_value(&z, &s, &diag), Err(Error::Configuration(_))));
        assert!(component_gradient(&z, &s, &diag).is_err());
        assert!(component_minimizer(&s, &diag).is_err());
        let empty = Configuration::new(vec![]);
        assert!(component_minimizer(&s, &empty).is_err());
    }

    #[test]
    fn gradient_examples() {
        let x = uni(&[0.2, 0.9]);
        let diag = Configuration::new(vec![WarpingPath::diagonal(2).unwrap()]);
        let s = Sample::new(vec![x.clone()]).unwrap();
        let g = component_gradient(&x, &s, &diag).unwrap();
        assert!(g.iter().all(|&v| v == 0.0));

        let z = uni(&[0.0, 0.0]);
        let s = sample(&[&[1.0, 1.0]]);
        let g = component_gradient(&z, &s, &diag).unwrap();
        assert_eq!(g.as_slice().unwrap(), &[-2.0, -2.0]);
    }

    #[test]
    fn minimizer_examples() {
        let s = sample(&[&[0.0, 0.0], &[2.0, 2.0]]);
        let diag = WarpingPath::diagonal(2).unwrap();
        let c = Configuration::new(vec![diag.clone(), diag]);
        assert_eq!(component_minimizer(&s, &c).unwrap().values(), &[1.0, 1.0]);

        let s = sample(&[&[1.0, 4.0, 2.0]]);
        let p = WarpingPath::from_one_based(2, 3, &[(1, 1), (1, 2), (2, 3)]).unwrap();
        let c = Configuration::new(vec![p]);
        let m = component_minimizer(&s, &c).unwrap();
        assert_eq!(m.values(), &[2.5, 2.0]);
        let g = component_gradient(&m, &s, &c).unwrap();
        assert!(g.iter().all(|v| v.abs() < 1e-10));
    }

    #[test]
    fn euclidean_mean_when_all_paths_diagonal() {
        let s = sample(&[&[1.0, 2.0, 3.0], &[3.0, 0.0, 1.0], &[2.0, 7.0, -1.0]]);
        let diag = WarpingPath::diagonal(3).unwrap();
        let c = Configuration::new(vec![diag; 3]);
        let m = component_minimizer(&s, &c).unwrap();
        assert_eq!(m.values(), &[2.0, 3.0, 1.0]);
    }

    #[test]
    fn single_step_with_unit_rate_lands_on_target() {
        let z = uni(&[4.0, -3.0]);
        let x = uni(&[1.0, 2.0]);
        let next = single_series_step(&z, &x, &WarpingPath::diagonal(2).unwrap(), 1.0);
        assert_eq!(next, x);
    }
}
