use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A time series of `len` time points, each a `dim`-dimensional real vector.
///
/// Values are stored row-major by time point, so `point(i)` is a contiguous
/// slice of length `dim`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    len: usize,
    dim: usize,
    values: Vec<f64>,
}

impl TimeSeries {
    /// Builds a series from row-major values.
    pub fn new(len: usize, dim: usize, values: Vec<f64>) -> Result<Self> {
        if len == 0 {
            return Err(Error::InvalidSeries("length must be at least 1".into()));
        }
        if dim == 0 {
            return Err(Error::InvalidSeries("dimension must be at least 1".into()));
        }
        if values.len() != len * dim {
            return Err(Error::InvalidSeries(format!(
                "expected {} values for length {len} and dimension {dim}, got {}",
                len * dim,
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidSeries(format!(
                "non-finite value {} at time point {}",
                values[pos],
                pos / dim + 1
            )));
        }
        Ok(Self { len, dim, values })
    }

    /// Builds a univariate series.
    pub fn univariate(values: Vec<f64>) -> Result<Self> {
        Self::new(values.len(), 1, values)
    }

    /// Builds a series from one slice per time point.
    pub fn from_points<P: AsRef<[f64]>>(points: &[P]) -> Result<Self> {
        let dim = points.first().map_or(0, |p| p.as_ref().len());
        let mut values = Vec::with_capacity(points.len() * dim);
        for (i, p) in points.iter().enumerate() {
            let p = p.as_ref();
            if p.len() != dim {
                return Err(Error::InvalidSeries(format!(
                    "time point {} has {} components, expected {dim}",
                    i + 1,
                    p.len()
                )));
            }
            values.extend_from_slice(p);
        }
        Self::new(points.len(), dim, values)
    }

    /// A series of `len` copies of zero.
    pub fn zeros(len: usize, dim: usize) -> Result<Self> {
        Self::new(len, dim, vec![0.0; len * dim])
    }

    pub fn len(&self) -> usize {
        self.len
    }

    /// Always false; a series has at least one time point.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.dim)
    }

    /// Row-major values.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Maximum absolute componentwise difference.
    pub fn max_abs_diff(&self, other: &TimeSeries) -> f64 {
        debug_assert_eq!(self.values.len(), other.values.len());
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Z-normalizes each dimension to zero mean and unit variance.
    /// Constant dimensions are only centered.
    pub fn z_normalized(&self) -> TimeSeries {
        let mut values = self.values.clone();
        let n = self.len as f64;
        for c in 0..self.dim {
            let mean = self.points().map(|p| p[c]).sum::<f64>() / n;
            let var = self.points().map(|p| (p[c] - mean).powi(2)).sum::<f64>() / n;
            let sd = var.sqrt();
            for i in 0..self.len {
                let v = &mut values[i * self.dim + c];
                *v -= mean;
                if sd > 0.0 {
                    *v /= sd;
                }
            }
        }
        TimeSeries {
            len: self.len,
            dim: self.dim,
            values,
        }
    }

    pub(crate) fn from_raw_unchecked(len: usize, dim: usize, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), len * dim);
        Self { len, dim, values }
    }
}

/// An ordered sample of time series sharing one dimension. Lengths may vary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    series: Vec<TimeSeries>,
}

impl Sample {
    pub fn new(series: Vec<TimeSeries>) -> Result<Self> {
        let Some(first) = series.first() else {
            return Err(Error::InvalidArgument("a sample needs at least one series".into()));
        };
        let dim = first.dim();
        if let Some(bad) = series.iter().find(|s| s.dim() != dim) {
            return Err(Error::Dimension {
                expected: dim,
                found: bad.dim(),
            });
        }
        Ok(Self { series })
    }

    pub fn len(&self) -> usize {
        self.series.len()
    }

    pub fn is_empty(&self) -> bool {
        self.series.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.series[0].dim()
    }

    pub fn get(&self, k: usize) -> &TimeSeries {
        &self.series[k]
    }

    pub fn series(&self) -> &[TimeSeries] {
        &self.series
    }

    pub fn iter(&self) -> std::slice::Iter<'_, TimeSeries> {
        self.series.iter()
    }

    pub fn into_series(self) -> Vec<TimeSeries> {
        self.series
    }

    /// Mean series length, rounded to the nearest integer.
    pub fn mean_len(&self) -> usize {
        let total: usize = self.series.iter().map(TimeSeries::len).sum();
        ((total as f64 / self.len() as f64).round() as usize).max(1)
    }

    pub(crate) fn check_dim(&self, z: &TimeSeries) -> Result<()> {
        if z.dim() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                found: z.dim(),
            });
        }
        Ok(())
    }
}

impl<'a> IntoIterator for &'a Sample {
    type Item = &'a TimeSeries;
    type IntoIter = std::slice::Iter<'a, TimeSeries>;

    fn into_iter(self) -> Self::IntoIter {
        self.series.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_and_non_finite() {
        assert!(TimeSeries::univariate(vec![]).is_err());
        assert!(TimeSeries::univariate(vec![1.0, f64::NAN]).is_err());
        assert!(TimeSeries::univariate(vec![f64::INFINITY]).is_err());
        assert!(TimeSeries::new(2, 0, vec![]).is_err());
        assert!(TimeSeries::new(2, 2, vec![1.0; 3]).is_err());
    }

    #[test]
    fn row_major_points() {
        let s = TimeSeries::from_points(&[[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]]).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.dim(), 2);
        assert_eq!(s.point(1), &[3.0, 4.0]);
    }

    #[test]
    fn sample_requires_shared_dimension() {
        let a = TimeSeries::univariate(vec![1.0]).unwrap();
        let b = TimeSeries::from_points(&[[1.0, 2.0]]).unwrap();
        assert!(matches!(
            Sample::new(vec![a.clone(), b]),
            Err(Error::Dimension { expected: 1, found: 2 })
        ));
        assert!(Sample::new(vec![]).is_err());
        let c = TimeSeries::univariate(vec![1.0, 2.0, 3.0]).unwrap();
        let s = Sample::new(vec![a, c]).unwrap();
        assert_eq!(s.mean_len(), 2);
    }

    #[test]
    fn z_normalization() {
        let s = TimeSeries::univariate(vec![1.0, 2.0, 3.0]).unwrap().z_normalized();
        let mean: f64 = s.values().iter().sum::<f64>() / 3.0;
        let var: f64 = s.values().iter().map(|v| v * v).sum::<f64>() / 3.0;
        assert!(mean.abs() < 1e-15);
        assert!((var - 1.0).abs() < 1e-12);
        let flat = TimeSeries::univariate(vec![4.0, 4.0]).unwrap().z_normalized();
        assert_eq!(flat.values(), &[0.0, 0.0]);
    }
}
