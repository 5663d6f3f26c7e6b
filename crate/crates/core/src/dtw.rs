//! Exact DTW by dynamic programming, plus exhaustive enumeration oracles.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::path::WarpingPath;
use crate::series::TimeSeries;

/// Largest `m + n` for which [`enumerate_paths`] runs by default.
pub const DEFAULT_ENUMERATION_LIMIT: usize = 16;

/// Absolute tolerance used when a minimum alignment cost is exactly zero.
pub const ZERO_COST_TOLERANCE: f64 = 1e-12;

/// Distance and an optimal warping path.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DtwResult {
    pub distance: f64,
    /// `distance²`, exactly as accumulated along `path`.
    pub squared: f64,
    pub path: WarpingPath,
}

#[inline]
fn squared_euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum()
}

fn check_dims(x: &TimeSeries, y: &TimeSeries) -> Result<()> {
    if x.dim() != y.dim() {
        return Err(Error::Dimension {
            expected: x.dim(),
            found: y.dim(),
        });
    }
    Ok(())
}

/// Cost of aligning `x` and `y` along `path`: the sum of squared Euclidean
/// distances between aligned points.
pub fn alignment_cost(x: &TimeSeries, y: &TimeSeries, path: &WarpingPath) -> Result<f64> {
    check_dims(x, y)?;
    let (rows, cols) = path.order();
    if (rows, cols) != (x.len(), y.len()) {
        return Err(Error::Order {
            path_rows: rows,
            path_cols: cols,
            rows: x.len(),
            cols: y.len(),
        });
    }
    Ok(path_cost_unchecked(x, y, path))
}

pub(crate) fn path_cost_unchecked(x: &TimeSeries, y: &TimeSeries, path: &WarpingPath) -> f64 {
    let mut total = 0.0;
    for &(i, j) in path.points() {
        total += squared_euclidean(x.point(i), y.point(j));
    }
    total
}

/// Fills the accumulated cost table, row-major `x.len() x y.len()`.
fn accumulate(x: &TimeSeries, y: &TimeSeries) -> Vec<f64> {
    let (m, n) = (x.len(), y.len());
    let mut acc = vec![0.0; m * n];
    if x.dim() == 1 {
        fill_table(&mut acc, m, n, |i, j| {
            let d = x.values()[i] - y.values()[j];
            d * d
        });
    } else {
        fill_table(&mut acc, m, n, |i, j| squared_euclidean(x.point(i), y.point(j)));
    }
    acc
}

#[inline(always)]
fn fill_table(acc: &mut [f64], m: usize, n: usize, cost: impl Fn(usize, usize) -> f64) {
    acc[0] = cost(0, 0);
    for j in 1..n {
        acc[j] = cost(0, j) + acc[j - 1];
    }
    for i in 1..m {
        let (prev, cur) = acc[(i - 1) * n..(i + 1) * n].split_at_mut(n);
        cur[0] = cost(i, 0) + prev[0];
        for j in 1..n {
            let best = prev[j - 1].min(prev[j]).min(cur[j - 1]);
            cur[j] = cost(i, j) + best;
        }
    }
}

/// Walks back from the last cell. Among minimal predecessors the diagonal
/// wins, then the vertical `(i - 1, j)`, then the horizontal `(i, j - 1)`.
fn backtrace(acc: &[f64], m: usize, n: usize) -> WarpingPath {
    let mut points = Vec::with_capacity(m + n - 1);
    let (mut i, mut j) = (m - 1, n - 1);
    points.push((i, j));
    while (i, j) != (0, 0) {
        if i == 0 {
            j -= 1;
        } else if j == 0 {
            i -= 1;
        } else {
            let diag = acc[(i - 1) * n + j - 1];
            let vert = acc[(i - 1) * n + j];
            let horiz = acc[i * n + j - 1];
            if diag <= vert && diag <= horiz {
                i -= 1;
                j -= 1;
            } else if vert <= horiz {
                i -= 1;
            } else {
                j -= 1;
            }
        }
        points.push((i, j));
    }
    points.reverse();
    WarpingPath::from_zero_based_unchecked(m, n, points)
}

/// DTW distance between `x` and `y` with a deterministic optimal path.
pub fn dtw(x: &TimeSeries, y: &TimeSeries) -> Result<DtwResult> {
    check_dims(x, y)?;
    Ok(dtw_unchecked(x, y))
}

pub(crate) fn dtw_unchecked(x: &TimeSeries, y: &TimeSeries) -> DtwResult {
    let (m, n) = (x.len(), y.len());
    let acc = accumulate(x, y);
    let squared = acc[m * n - 1];
    DtwResult {
        distance: squared.sqrt(),
        squared,
        path: backtrace(&acc, m, n),
    }
}

/// Squared DTW distance without a path, in O(`y.len()`) memory. Bitwise equal
/// to `dtw(x, y)?.squared`.
pub fn dtw_squared(x: &TimeSeries, y: &TimeSeries) -> Result<f64> {
    check_dims(x, y)?;
    Ok(dtw_squared_unchecked(x, y))
}

pub(crate) fn dtw_squared_unchecked(x: &TimeSeries, y: &TimeSeries) -> f64 {
    let (m, n) = (x.len(), y.len());
    let mut prev = vec![0.0; n];
    let mut cur = vec![0.0; n];
    let cost = |i: usize, j: usize| squared_euclidean(x.point(i), y.point(j));
    prev[0] = cost(0, 0);
    for j in 1..n {
        prev[j] = cost(0, j) + prev[j - 1];
    }
    for i in 1..m {
        cur[0] = cost(i, 0) + prev[0];
        for j in 1..n {
            cur[j] = cost(i, j) + prev[j - 1].min(prev[j]).min(cur[j - 1]);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[n - 1]
}

/// Number of warping paths of order `(m, n)` (a Delannoy number), saturating
/// at `u128::MAX`.
pub fn path_count(m: usize, n: usize) -> u128 {
    if m == 0 || n == 0 {
        return 0;
    }
    let mut row = vec![1u128; n];
    for _ in 1..m {
        let mut diag = row[0];
        for j in 1..n {
            let up = row[j];
            row[j] = up.saturating_add(row[j - 1]).saturating_add(diag);
            diag = up;
        }
    }
    row[n - 1]
}

/// All warping paths of order `(m, n)`, guarded by `m + n <= 16`.
pub fn enumerate_paths(m: usize, n: usize) -> Result<Vec<WarpingPath>> {
    enumerate_paths_with_limit(m, n, DEFAULT_ENUMERATION_LIMIT)
}

pub fn enumerate_paths_with_limit(m: usize, n: usize, limit: usize) -> Result<Vec<WarpingPath>> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidArgument(format!(
            "path order ({m}, {n}) must be positive"
        )));
    }
    if m + n > limit {
        return Err(Error::Guard(format!(
            "enumerating paths of order ({m}, {n}) requires m + n <= {limit}"
        )));
    }
    let mut out = Vec::with_capacity(path_count(m, n) as usize);
    let mut stack = vec![(0usize, 0usize)];
    extend_paths(m, n, &mut stack, &mut out);
    Ok(out)
}

fn extend_paths(
    m: usize,
    n: usize,
    stack: &mut Vec<(usize, usize)>,
    out: &mut Vec<WarpingPath>,
) {
    let (i, j) = *stack.last().expect("stack starts non-empty");
    if (i, j) == (m - 1, n - 1) {
        out.push(WarpingPath::from_zero_based_unchecked(m, n, stack.clone()));
        return;
    }
    for (di, dj) in [(1, 1), (1, 0), (0, 1)] {
        let (ni, nj) = (i + di, j + dj);
        if ni < m && nj < n {
            stack.push((ni, nj));
            extend_paths(m, n, stack, out);
            stack.pop();
        }
    }
}

/// DTW by exhaustive path enumeration. The first path attaining the minimum
/// (in enumeration order) is returned.
pub fn dtw_brute_force(x: &TimeSeries, y: &TimeSeries) -> Result<DtwResult> {
    check_dims(x, y)?;
    let paths = enumerate_paths(x.len(), y.len())?;
    let mut best: Option<(f64, WarpingPath)> = None;
    for p in paths {
        let c = path_cost_unchecked(x, y, &p);
        if best.as_ref().is_none_or(|(b, _)| c < *b) {
            best = Some((c, p));
        }
    }
    let (squared, path) = best.expect("at least one path exists");
    Ok(DtwResult {
        distance: squared.sqrt(),
        squared,
        path,
    })
}

/// Upper bound on the number of paths [`optimal_paths`] returns.
pub const OPTIMAL_PATH_LIMIT: usize = 100_000;

/// Every path whose cost is within `tol * min` of the minimum (or within
/// [`ZERO_COST_TOLERANCE`] when the minimum is zero), with its cost.
///
/// Paths are found by depth-first search pruned with the exact optimal
/// completion cost of every cell, so only near-optimal paths are visited.
/// Fails with [`Error::Guard`] past [`OPTIMAL_PATH_LIMIT`] paths.
pub fn optimal_paths(x: &TimeSeries, y: &TimeSeries, tol: f64) -> Result<Vec<(WarpingPath, f64)>> {
    check_dims(x, y)?;
    let (m, n) = (x.len(), y.len());
    let cost = |i: usize, j: usize| squared_euclidean(x.point(i), y.point(j));
    // rest[i * n + j]: cheapest cost from (i, j) to (m - 1, n - 1), both included.
    let mut rest = vec![0.0f64; m * n];
    for i in (0..m).rev() {
        for j in (0..n).rev() {
            let next = match (i + 1 < m, j + 1 < n) {
                (true, true) => rest[(i + 1) * n + j + 1].min(rest[(i + 1) * n + j]).min(rest[i * n + j + 1]),
                (true, false) => rest[(i + 1) * n + j],
                (false, true) => rest[i * n + j + 1],
                (false, false) => 0.0,
            };
            rest[i * n + j] = cost(i, j) + next;
        }
    }
    let min = rest[0];
    let slack = if min == 0.0 { ZERO_COST_TOLERANCE } else { tol * min };
    // Extra room for rounding differences between the table and path sums.
    let bound = min + slack + 4.0 * f64::EPSILON * (min + slack) * (m + n) as f64;

    struct Search<'a, C> {
        m: usize,
        n: usize,
        rest: &'a [f64],
        cost: C,
        bound: f64,
        points: Vec<(usize, usize)>,
        found: Vec<WarpingPath>,
    }
    impl<C: Fn(usize, usize) -> f64> Search<'_, C> {
        fn visit(&mut self, i: usize, j: usize, prefix: f64) -> Result<()> {
            self.points.push((i, j));
            if (i, j) == (self.m - 1, self.n - 1) {
                if self.found.len() == OPTIMAL_PATH_LIMIT {
                    return Err(Error::Guard(format!(
                        "more than {OPTIMAL_PATH_LIMIT} near-optimal paths of order ({}, {})",
                        self.m, self.n
                    )));
                }
                self.found
                    .push(WarpingPath::from_zero_based_unchecked(self.m, self.n, self.points.clone()));
            }
            for (a, b) in [(i + 1, j + 1), (i + 1, j), (i, j + 1)] {
                if a < self.m && b < self.n && prefix + self.rest[a * self.n + b] <= self.bound {
                    let step = (self.cost)(a, b);
                    self.visit(a, b, prefix + step)?;
                }
            }
            self.points.pop();
            Ok(())
        }
    }
    let mut search = Search {
        m,
        n,
        rest: &rest,
        cost,
        bound,
        points: Vec::with_capacity(m + n - 1),
        found: Vec::new(),
    };
    search.visit(0, 0, cost(0, 0))?;

    let costed: Vec<_> = search
        .found
        .into_iter()
        .map(|p| {
            let c = path_cost_unchecked(x, y, &p);
            (p, c)
        })
        .collect();
    let min = costed.iter().map(|(_, c)| *c).fold(f64::INFINITY, f64::min);
    let slack = if min == 0.0 { ZERO_COST_TOLERANCE } else { tol * min };
    Ok(costed.into_iter().filter(|(_, c)| *c <= min + slack).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uni(v: &[f64]) -> TimeSeries {
        TimeSeries::univariate(v.to_vec()).unwrap()
    }

    fn path(m: usize, n: usize, pts: &[(usize, usize)]) -> WarpingPath {
        WarpingPath::from_one_based(m, n, pts).unwrap()
    }

    #[test]
    fn alignment_cost_examples() {
        let x = uni(&[0.0, 0.0]);
        let y = uni(&[1.0, 1.0]);
        let diag = WarpingPath::diagonal(2).unwrap();
        assert_eq!(alignment_cost(&x, &x, &diag).unwrap(), 0.0);
        assert_eq!(alignment_cost(&x, &y, &diag).unwrap(), 2.0);
        let p = path(2, 2, &[(1, 1), (1, 2), (2, 2)]);
        assert_eq!(alignment_cost(&x, &y, &p).unwrap(), 3.0);
    }

    #[test]
    fn alignment_cost_rejects_mismatch() {
        let x = uni(&[0.0, 0.0, 0.0]);
        let y = uni(&[1.0, 1.0]);
        let diag = WarpingPath::diagonal(2).unwrap();
        assert!(matches!(alignment_cost(&x, &y, &diag), Err(Error::Order { .. })));
        let z = TimeSeries::from_points(&[[0.0, 0.0], [1.0, 1.0]]).unwrap();
        assert!(matches!(alignment_cost(&z, &y, &diag), Err(Error::Dimension { .. })));
        assert!(dtw(&z, &y).is_err());
    }

    #[test]
    fn dtw_examples() {
        let x = uni(&[0.0, 0.0]);
        let y = uni(&[1.0, 1.0]);
        let r = dtw(&x, &y).unwrap();
        assert_eq!(r.distance, 2f64.sqrt());
        assert_eq!(r.path, WarpingPath::diagonal(2).unwrap());
        assert_eq!(dtw(&x, &x).unwrap().distance, 0.0);

        let r = dtw(&uni(&[1.0, 2.0, 3.0]), &uni(&[1.0, 2.0, 2.0, 3.0])).unwrap();
        assert_eq!(r.distance, 0.0);
        assert_eq!(r.path, path(3, 4, &[(1, 1), (2, 2), (2, 3), (3, 4)]));
    }

    #[test]
    fn brute_force_examples() {
        let x = uni(&[0.0, 0.0]);
        let y = uni(&[1.0, 1.0]);
        assert_eq!(dtw_brute_force(&x, &y).unwrap().distance, 2f64.sqrt());
        let z = uni(&[0.3, -1.0, 2.0]);
        assert_eq!(dtw_brute_force(&z, &z).unwrap().distance, 0.0);
        let r = dtw_brute_force(&uni(&[1.0, 2.0, 3.0]), &uni(&[1.0, 2.0, 2.0, 3.0])).unwrap();
        assert_eq!(r.distance, 0.0);
    }

    #[test]
    fn tie_break_prefers_diagonal_then_vertical() {
        // All paths cost zero; the diagonal must be chosen.
        let x = uni(&[0.0, 0.0]);
        assert_eq!(dtw(&x, &x).unwrap().path, WarpingPath::diagonal(2).unwrap());
        // Two length-3 zero paths into a length-2 target: vertical before horizontal.
        let r = dtw(&uni(&[5.0, 5.0, 5.0]), &uni(&[5.0, 5.0])).unwrap();
        assert_eq!(r.path, path(3, 2, &[(1, 1), (2, 1), (3, 2)]));
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_paths(1, 5).unwrap().len(), 1);
        assert_eq!(enumerate_paths(2, 2).unwrap().len(), 3);
        assert_eq!(enumerate_paths(3, 3).unwrap().len(), 13);
        for m in 1..=6 {
            for n in 1..=6 {
                let paths = enumerate_paths(m, n).unwrap();
                assert_eq!(paths.len() as u128, path_count(m, n));
                assert!(paths.iter().all(|p| crate::path::validate_path(m, n, &p.one_based())));
            }
        }
        assert!(matches!(enumerate_paths(9, 8), Err(Error::Guard(_))));
    }

    #[test]
    fn delannoy_recurrence() {
        for m in 2..10 {
            for n in 2..10 {
                assert_eq!(
                    path_count(m, n),
                    path_count(m - 1, n) + path_count(m, n - 1) + path_count(m - 1, n - 1)
                );
            }
        }
        assert_eq!(path_count(8, 8), 48_639);
        assert_eq!(path_count(3000, 3000), u128::MAX);
    }

    #[test]
    fn squared_only_matches_full() {
        let x = TimeSeries::from_points(&[[0.1, 1.0], [0.7, -0.2], [1.5, 0.3]]).unwrap();
        let y = TimeSeries::from_points(&[[0.0, 0.9], [1.4, 0.1]]).unwrap();
        let full = dtw(&x, &y).unwrap();
        assert_eq!(dtw_squared(&x, &y).unwrap().to_bits(), full.squared.to_bits());
        assert_eq!(
            alignment_cost(&x, &y, &full.path).unwrap().to_bits(),
            full.squared.to_bits()
        );
    }

    #[test]
    fn optimal_path_set() {
        let x = uni(&[0.0, 0.0]);
        assert_eq!(optimal_paths(&x, &x, 1e-9).unwrap().len(), 3);
        let z = uni(&[0.0, 1.0]);
        let opt = optimal_paths(&z, &z, 1e-9).unwrap();
        assert_eq!(opt.len(), 1);
        assert_eq!(opt[0].0, WarpingPath::diagonal(2).unwrap());
    }
}
