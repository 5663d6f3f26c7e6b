//! Necessary and sufficient optimality conditions for sample means, and an
//! exact global oracle for tiny instances.
//!
//! (C1) asks that the configuration be active at `z`, i.e. `F_C(z) = F(z)`;
//! (C2) that `z` equal the minimizer `(Σ V_k)^{-1} Σ W_k x_k` of `F_C`.
//! Both hold at every local minimizer. If they hold and the optimal
//! configuration at `z` is unique, `z` is a local minimizer.

use serde::{Deserialize, Serialize};

use crate::dtw::{enumerate_paths_with_limit, optimal_paths, path_count};
use crate::error::{Error, Result};
use crate::exec::map_indexed;
use crate::frechet::{
    check_configuration, component_value_unchecked, variation_unchecked, variation_value, Aggregate,
};
use crate::path::{Configuration, WarpingPath};
use crate::series::{Sample, TimeSeries};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Largest number of configurations [`global_mean_oracle`] enumerates.
pub const ORACLE_CONFIGURATION_LIMIT: u128 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Certificate {
    LocalMinCertified,
    NecessaryOnly,
    Fails,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimalityReport {
    pub variation: f64,
    pub component_value: f64,
    pub c1_holds: bool,
    /// `|F_C(z) - F(z)|`.
    pub c1_gap: f64,
    pub c2_holds: bool,
    /// Max-norm distance between `z` and the component minimizer.
    pub c2_residual: f64,
    pub certificate: Certificate,
    pub tolerance: f64,
    /// Number of optimal configurations at `z`, when they were enumerated.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optimal_configurations: Option<u128>,
}

fn validate_tol(tol: f64) -> Result<()> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance {tol} must be positive")));
    }
    Ok(())
}

/// Evaluates (C1) and (C2) at `z` using the DTW-optimal configuration.
pub fn check_necessary(z: &TimeSeries, sample: &Sample, tol: f64) -> Result<OptimalityReport> {
    validate_tol(tol)?;
    sample.check_dim(z)?;
    let eval = variation_unchecked(z, sample);
    Ok(report(z, sample, &eval.configuration, eval.value, tol))
}

/// Evaluates (C1) and (C2) at `z` for a given configuration.
pub fn check_necessary_with(
    z: &TimeSeries,
    sample: &Sample,
    config: &Configuration,
    tol: f64,
) -> Result<OptimalityReport> {
    validate_tol(tol)?;
    sample.check_dim(z)?;
    check_configuration(z.len(), sample, config)?;
    let variation = variation_value(z, sample);
    Ok(report(z, sample, config, variation, tol))
}

fn report(
    z: &TimeSeries,
    sample: &Sample,
    config: &Configuration,
    variation: f64,
    tol: f64,
) -> OptimalityReport {
    let component_value = component_value_unchecked(z, sample, config);
    let c1_gap = (component_value - variation).abs();
    let c1_holds = c1_gap <= tol * variation.max(1.0);
    let c2_residual = Aggregate::new(z.len(), sample, config)
        .minimizer()
        .max_abs_diff(z);
    let c2_holds = c2_residual <= tol;
    OptimalityReport {
        variation,
        component_value,
        c1_holds,
        c1_gap,
        c2_holds,
        c2_residual,
        certificate: if c1_holds && c2_holds {
            Certificate::NecessaryOnly
        } else {
            Certificate::Fails
        },
        tolerance: tol,
        optimal_configurations: None,
    }
}

/// Enumerates all optimal warping paths per sample series. A unique optimal
/// configuration satisfying (C1) and (C2) certifies a local minimum. With
/// several optimal configurations the result is `NecessaryOnly` if any of
/// them satisfies (C2), otherwise `Fails`.
pub fn certify_local_min(z: &TimeSeries, sample: &Sample, tol: f64) -> Result<OptimalityReport> {
    validate_tol(tol)?;
    sample.check_dim(z)?;
    let optimal: Vec<Vec<WarpingPath>> = sample
        .iter()
        .map(|x| Ok(optimal_paths(z, x, tol)?.into_iter().map(|(p, _)| p).collect()))
        .collect::<Result<_>>()?;
    let count = optimal
        .iter()
        .fold(1u128, |acc, paths| acc.saturating_mul(paths.len() as u128));
    if count > ORACLE_CONFIGURATION_LIMIT {
        return Err(Error::Guard(format!(
            "{} optimal configurations exceed the limit of {ORACLE_CONFIGURATION_LIMIT}",
            count_text(count)
        )));
    }
    let variation = variation_value(z, sample);
    let radices: Vec<usize> = optimal.iter().map(Vec::len).collect();

    let mut fallback = None;
    for index in 0..count as usize {
        let config = pick(&optimal, &radices, index);
        let mut r = report(z, sample, &config, variation, tol);
        r.optimal_configurations = Some(count);
        if r.c1_holds && r.c2_holds {
            if count == 1 {
                r.certificate = Certificate::LocalMinCertified;
            }
            return Ok(r);
        }
        fallback.get_or_insert(r);
    }
    let mut r = fallback.expect("at least one optimal configuration");
    r.certificate = Certificate::Fails;
    Ok(r)
}

/// Mixed-radix decoding of a configuration index, first series fastest.
fn pick(paths: &[Vec<WarpingPath>], radices: &[usize], mut index: usize) -> Configuration {
    let mut chosen = Vec::with_capacity(paths.len());
    for (options, &radix) in paths.iter().zip(radices) {
        chosen.push(options[index % radix].clone());
        index /= radix;
    }
    Configuration::new(chosen)
}

/// Counts saturate at `u128::MAX`; print those as a bound.
fn count_text(count: u128) -> String {
    if count == u128::MAX {
        format!("more than {:e}", u128::MAX as f64)
    } else {
        count.to_string()
    }
}

/// Exact global minimizer of the Fréchet function over series of length `n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub solution: TimeSeries,
    pub value: f64,
    pub configurations: u128,
}

/// Minimizes the Fréchet function over length-`n` series by enumerating every
/// configuration, taking its component minimizer, and evaluating the Fréchet
/// function there. Ties go to the lowest configuration index.
pub fn global_mean_oracle(sample: &Sample, n: usize) -> Result<OracleResult> {
    if n == 0 {
        return Err(Error::InvalidArgument("solution length must be at least 1".into()));
    }
    let count = sample
        .iter()
        .fold(1u128, |acc, x| acc.saturating_mul(path_count(n, x.len())));
    if count > ORACLE_CONFIGURATION_LIMIT {
        return Err(Error::Guard(format!(
            "{} configurations for solution length {n} exceed the limit of {ORACLE_CONFIGURATION_LIMIT}",
            count_text(count)
        )));
    }
    let paths: Vec<Vec<WarpingPath>> = sample
        .iter()
        .map(|x| enumerate_paths_with_limit(n, x.len(), usize::MAX))
        .collect::<Result<_>>()?;
    let radices: Vec<usize> = paths.iter().map(Vec::len).collect();

    const BLOCK: usize = 1024;
    let total = count as usize;
    let blocks = total.div_ceil(BLOCK);
    let best_per_block = map_indexed(blocks, |b| {
        let mut best: Option<(f64, usize, TimeSeries)> = None;
        for index in b * BLOCK..((b + 1) * BLOCK).min(total) {
            let config = pick(&paths, &radices, index);
            let z = Aggregate::new(n, sample, &config).minimizer();
            let value = variation_value(&z, sample);
            if best.as_ref().is_none_or(|(v, _, _)| value < *v) {
                best = Some((value, index, z));
            }
        }
        best.expect("blocks are non-empty")
    });
    let (value, _, solution) = best_per_block
        .into_iter()
        .reduce(|a, b| if b.0 < a.0 { b } else { a })
        .expect("at least one configuration");
    Ok(OracleResult {
        solution,
        value,
        configurations: count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uni(v: &[f64]) -> TimeSeries {
        TimeSeries::univariate(v.to_vec()).unwrap()
    }

    #[test]
    fn copies_satisfy_both_conditions() {
        let z = uni(&[0.5, -1.0, 2.0]);
        let s = Sample::new(vec![z.clone(); 3]).unwrap();
        let r = check_necessary(&z, &s, DEFAULT_TOLERANCE).unwrap();
        assert!(r.c1_holds && r.c2_holds);
        assert_eq!(r.c2_residual, 0.0);
        assert_eq!(r.certificate, Certificate::NecessaryOnly);
    }

    #[test]
    fn non_stationary_point_fails_c2() {
        let s = Sample::new(vec![uni(&[0.0, 1.0, 0.0]), uni(&[1.0, 2.0, 1.0])]).unwrap();
        let r = check_necessary(&uni(&[5.0, 5.0, 5.0]), &s, DEFAULT_TOLERANCE).unwrap();
        assert!(r.c1_holds);
        assert!(!r.c2_holds);
        assert_eq!(r.certificate, Certificate::Fails);
    }

    #[test]
    fn inactive_configuration_fails_c1() {
        let s = Sample::new(vec![uni(&[1.0, 1.0])]).unwrap();
        let z = uni(&[0.0, 0.0]);
        let config = Configuration::new(vec![
            WarpingPath::from_one_based(2, 2, &[(1, 1), (1, 2), (2, 2)]).unwrap(),
        ]);
        let r = check_necessary_with(&z, &s, &config, DEFAULT_TOLERANCE).unwrap();
        assert!(!r.c1_holds);
        assert_eq!(r.c1_gap, 1.0);
    }

    #[test]
    fn certify_examples() {
        let s = Sample::new(vec![uni(&[0.0]), uni(&[2.0])]).unwrap();
        let r = certify_local_min(&uni(&[1.0]), &s, DEFAULT_TOLERANCE).unwrap();
        assert_eq!(r.certificate, Certificate::LocalMinCertified);
        assert_eq!(r.optimal_configurations, Some(1));

        // Three zero-cost paths between (0,0) and itself.
        let z = uni(&[0.0, 0.0]);
        let s = Sample::new(vec![z.clone()]).unwrap();
        let r = certify_local_min(&z, &s, DEFAULT_TOLERANCE).unwrap();
        assert_eq!(r.certificate, Certificate::NecessaryOnly);
        assert_eq!(r.optimal_configurations, Some(3));

        let z = uni(&[0.0, 1.0]);
        let s = Sample::new(vec![z.clone(); 2]).unwrap();
        let r = certify_local_min(&z, &s, DEFAULT_TOLERANCE).unwrap();
        assert_eq!(r.certificate, Certificate::LocalMinCertified);
    }

    #[test]
    fn certify_rejects_large_instances() {
        let x = uni(&[0.0; 10]);
        let s = Sample::new(vec![x.clone()]).unwrap();
        assert!(matches!(certify_local_min(&x, &s, 1e-9), Err(Error::Guard(_))));
    }

    #[test]
    fn oracle_examples() {
        let x = uni(&[1.0, 3.0, 2.0]);
        let s = Sample::new(vec![x.clone(); 3]).unwrap();
        let r = global_mean_oracle(&s, 3).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.solution, x);

        let s = Sample::new(vec![uni(&[0.0, 0.0]), uni(&[2.0, 2.0])]).unwrap();
        let r = global_mean_oracle(&s, 2).unwrap();
        assert_eq!(r.value, 2.0);
        assert_eq!(r.solution.values(), &[1.0, 1.0]);
        assert_eq!(r.configurations, 9);
    }

    #[test]
    fn oracle_guard() {
        let s = Sample::new(vec![uni(&[0.0; 8]); 3]).unwrap();
        assert!(matches!(global_mean_oracle(&s, 8), Err(Error::Guard(_))));
    }
}
