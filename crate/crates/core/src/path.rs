//! Warping paths and the matrices they induce.
//!
//! Paths are stored 0-based. The external representation (serialization,
//! [`WarpingPath::from_one_based`], [`validate_path`]) is 1-based.

use std::fmt;
use std::str::FromStr;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Checks the boundary and step conditions for 1-based `points` of order
/// `(rows, cols)`.
pub fn validate_path(rows: usize, cols: usize, points: &[(usize, usize)]) -> bool {
    check_points(rows, cols, points, 1).is_ok()
}

fn check_points(
    rows: usize,
    cols: usize,
    points: &[(usize, usize)],
    base: usize,
) -> std::result::Result<(), String> {
    if rows == 0 || cols == 0 {
        return Err(format!("order ({rows}, {cols}) must be positive"));
    }
    let (Some(&first), Some(&last)) = (points.first(), points.last()) else {
        return Err("path is empty".into());
    };
    if first != (base, base) {
        return Err(format!("path must start at ({base}, {base})"));
    }
    if last != (rows - 1 + base, cols - 1 + base) {
        return Err(format!(
            "path must end at ({}, {})",
            rows - 1 + base,
            cols - 1 + base
        ));
    }
    for (l, w) in points.windows(2).enumerate() {
        let (a, b) = (w[0], w[1]);
        let step = (b.0.wrapping_sub(a.0), b.1.wrapping_sub(a.1));
        if !matches!(step, (1, 0) | (0, 1) | (1, 1)) {
            return Err(format!(
                "illegal step from point {} to point {}",
                l + 1,
                l + 2
            ));
        }
    }
    Ok(())
}

/// A warping path of order `(rows, cols)`: a monotone sequence of index
/// pairs from the first to the last element of both series.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "PathRepr", into = "PathRepr")]
pub struct WarpingPath {
    rows: usize,
    cols: usize,
    points: Vec<(usize, usize)>,
}

impl WarpingPath {
    /// Validates 1-based points.
    pub fn from_one_based(rows: usize, cols: usize, points: &[(usize, usize)]) -> Result<Self> {
        check_points(rows, cols, points, 1).map_err(Error::InvalidPath)?;
        Ok(Self {
            rows,
            cols,
            points: points.iter().map(|&(i, j)| (i - 1, j - 1)).collect(),
        })
    }

    /// Validates 0-based points.
    pub fn from_zero_based(rows: usize, cols: usize, points: Vec<(usize, usize)>) -> Result<Self> {
        check_points(rows, cols, &points, 0).map_err(Error::InvalidPath)?;
        Ok(Self { rows, cols, points })
    }

    pub(crate) fn from_zero_based_unchecked(
        rows: usize,
        cols: usize,
        points: Vec<(usize, usize)>,
    ) -> Self {
        debug_assert!(check_points(rows, cols, &points, 0).is_ok());
        Self { rows, cols, points }
    }

    /// The diagonal path of order `(n, n)`.
    pub fn diagonal(n: usize) -> Result<Self> {
        Self::from_zero_based(n, n, (0..n).map(|i| (i, i)).collect())
    }

    pub fn order(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// 0-based points.
    pub fn points(&self) -> &[(usize, usize)] {
        &self.points
    }

    pub fn one_based(&self) -> Vec<(usize, usize)> {
        self.points.iter().map(|&(i, j)| (i + 1, j + 1)).collect()
    }

    /// The same alignment seen from the other series.
    pub fn transposed(&self) -> WarpingPath {
        WarpingPath {
            rows: self.cols,
            cols: self.rows,
            points: self.points.iter().map(|&(i, j)| (j, i)).collect(),
        }
    }

    pub fn summary(&self) -> AlignmentSummary {
        alignment_summary(self)
    }

    pub fn embeddings(&self) -> EmbeddingPair {
        embeddings(self)
    }
}

/// Serialized as `L;(i1,j1),(i2,j2),...` with 1-based indices.
impl fmt::Display for WarpingPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{};", self.points.len())?;
        for (l, &(i, j)) in self.points.iter().enumerate() {
            if l > 0 {
                f.write_str(",")?;
            }
            write!(f, "({},{})", i + 1, j + 1)?;
        }
        Ok(())
    }
}

impl FromStr for WarpingPath {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: &str| Error::InvalidPath(format!("cannot parse {s:?}: {msg}"));
        let (len, rest) = s.trim().split_once(';').ok_or_else(|| bad("missing ';'"))?;
        let len: usize = len.trim().parse().map_err(|_| bad("bad length"))?;
        let mut points = Vec::with_capacity(len);
        for chunk in rest.split(')') {
            let chunk = chunk.trim().trim_start_matches(',').trim();
            if chunk.is_empty() {
                continue;
            }
            let inner = chunk.strip_prefix('(').ok_or_else(|| bad("expected '('"))?;
            let (i, j) = inner.split_once(',').ok_or_else(|| bad("expected 'i,j'"))?;
            let i: usize = i.trim().parse().map_err(|_| bad("bad index"))?;
            let j: usize = j.trim().parse().map_err(|_| bad("bad index"))?;
            points.push((i, j));
        }
        if points.len() != len {
            return Err(bad("length prefix does not match point count"));
        }
        let &(rows, cols) = points.last().ok_or_else(|| bad("no points"))?;
        WarpingPath::from_one_based(rows, cols, &points)
    }
}

#[derive(Serialize, Deserialize)]
struct PathRepr {
    order: (usize, usize),
    points: Vec<(usize, usize)>,
}

impl From<WarpingPath> for PathRepr {
    fn from(p: WarpingPath) -> Self {
        PathRepr {
            order: p.order(),
            points: p.one_based(),
        }
    }
}

impl TryFrom<PathRepr> for WarpingPath {
    type Error = Error;

    fn try_from(r: PathRepr) -> Result<Self> {
        WarpingPath::from_one_based(r.order.0, r.order.1, &r.points)
    }
}

/// Sparse warping matrix plus the diagonal of the valence matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlignmentSummary {
    rows: usize,
    cols: usize,
    /// 0-based positions of the ones in the warping matrix.
    pub warping: Vec<(usize, usize)>,
    /// Row sums of the warping matrix.
    pub valence: Vec<u32>,
}

impl AlignmentSummary {
    pub fn order(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    /// Dense `rows x cols` warping matrix.
    pub fn dense_warping(&self) -> Array2<i64> {
        let mut w = Array2::zeros((self.rows, self.cols));
        for &(i, j) in &self.warping {
            w[[i, j]] = 1;
        }
        w
    }

    /// Dense diagonal valence matrix.
    pub fn dense_valence(&self) -> Array2<i64> {
        Array2::from_diag(&self.valence.iter().map(|&v| v as i64).collect::<ndarray::Array1<_>>())
    }
}

pub fn alignment_summary(path: &WarpingPath) -> AlignmentSummary {
    let mut valence = vec![0u32; path.rows];
    for &(i, _) in &path.points {
        valence[i] += 1;
    }
    AlignmentSummary {
        rows: path.rows,
        cols: path.cols,
        warping: path.points.clone(),
        valence,
    }
}

/// Time-warping embeddings: row `l` of `phi` is the unit vector selecting
/// `i_l`, row `l` of `psi` the one selecting `j_l`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbeddingPair {
    pub phi: Array2<i64>,
    pub psi: Array2<i64>,
}

pub fn embeddings(path: &WarpingPath) -> EmbeddingPair {
    let len = path.len();
    let mut phi = Array2::zeros((len, path.rows));
    let mut psi = Array2::zeros((len, path.cols));
    for (l, &(i, j)) in path.points.iter().enumerate() {
        phi[[l, i]] = 1;
        psi[[l, j]] = 1;
    }
    EmbeddingPair { phi, psi }
}

/// One warping path per sample series; path `k` aligns the candidate with
/// sample series `k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Configuration {
    pub paths: Vec<WarpingPath>,
}

impl Configuration {
    pub fn new(paths: Vec<WarpingPath>) -> Self {
        Self { paths }
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    /// Candidate length shared by all paths, if consistent.
    pub fn candidate_len(&self) -> Option<usize> {
        let n = self.paths.first()?.rows;
        self.paths.iter().all(|p| p.rows == n).then_some(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validate_examples() {
        assert!(validate_path(1, 1, &[(1, 1)]));
        assert!(validate_path(2, 2, &[(1, 1), (2, 2)]));
        assert!(!validate_path(3, 2, &[(1, 1), (2, 2)]));
        assert!(!validate_path(2, 2, &[(2, 2)]));
        assert!(!validate_path(3, 3, &[(1, 1), (3, 3)]));
        assert!(!validate_path(2, 2, &[(1, 1), (1, 1), (2, 2)]));
        assert!(!validate_path(2, 2, &[]));
        assert!(!validate_path(0, 2, &[(1, 1)]));
    }

    #[test]
    fn summary_examples() {
        let p = WarpingPath::from_one_based(2, 2, &[(1, 1), (2, 1), (2, 2)]).unwrap();
        let s = p.summary();
        assert_eq!(s.dense_warping(), ndarray::arr2(&[[1, 0], [1, 1]]));
        assert_eq!(s.valence, vec![1, 2]);

        let s = WarpingPath::diagonal(3).unwrap().summary();
        assert_eq!(s.dense_warping(), Array2::<i64>::eye(3));
        assert_eq!(s.valence, vec![1, 1, 1]);

        let p = WarpingPath::from_one_based(2, 2, &[(1, 1), (1, 2), (2, 2)]).unwrap();
        let s = p.summary();
        assert_eq!(s.dense_warping(), ndarray::arr2(&[[1, 1], [0, 1]]));
        assert_eq!(s.valence, vec![2, 1]);
    }

    #[test]
    fn invalid_path_rejected() {
        let err = WarpingPath::from_one_based(3, 2, &[(1, 1), (2, 2)]).unwrap_err();
        assert!(matches!(err, Error::InvalidPath(_)));
    }

    #[test]
    fn embedding_examples() {
        let e = WarpingPath::diagonal(2).unwrap().embeddings();
        assert_eq!(e.phi, Array2::<i64>::eye(2));
        assert_eq!(e.psi, Array2::<i64>::eye(2));

        let p = WarpingPath::from_one_based(2, 2, &[(1, 1), (2, 1), (2, 2)]).unwrap();
        let e = p.embeddings();
        assert_eq!(e.phi, ndarray::arr2(&[[1, 0], [0, 1], [0, 1]]));
        assert_eq!(e.psi, ndarray::arr2(&[[1, 0], [1, 0], [0, 1]]));
        assert_eq!(e.phi.t().dot(&e.psi), p.summary().dense_warping());
        assert_eq!(e.phi.t().dot(&e.phi), p.summary().dense_valence());
    }

    #[test]
    fn text_round_trip() {
        let p = WarpingPath::from_one_based(3, 2, &[(1, 1), (2, 1), (3, 2)]).unwrap();
        let text = p.to_string();
        assert_eq!(text, "3;(1,1),(2,1),(3,2)");
        assert_eq!(text.parse::<WarpingPath>().unwrap(), p);
        assert!("2;(1,1),(3,3)".parse::<WarpingPath>().is_err());
        assert!("3;(1,1),(2,2)".parse::<WarpingPath>().is_err());
    }

    #[test]
    fn json_is_one_based() {
        let p = WarpingPath::diagonal(2).unwrap();
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(json, r#"{"order":[2,2],"points":[[1,1],[2,2]]}"#);
        let back: WarpingPath = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);
        assert!(serde_json::from_str::<WarpingPath>(r#"{"order":[2,2],"points":[[1,1]]}"#).is_err());
    }
}
