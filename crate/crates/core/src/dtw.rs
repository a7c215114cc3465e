//! Banded dynamic time warping.
//!
//! All routines work on equal-length series and use the Euclidean norm of
//! the difference vector as the pointwise cost. A bandwidth `bw` restricts
//! the dynamic program to cells with `|s − t| ≤ bw`; `bw ≥ m − 1` gives the
//! exact unconstrained distance.
//!
//! Indices in this module are 0-based: a plain warping path runs from
//! `(0, 0)` to `(m − 1, m − 1)`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::series::{SeriesView, TimeSeries};

/// Marker for cells outside the band. Compares above every finite cost.
const UNREACHABLE: f64 = f64::INFINITY;

/// Which dissimilarity to use between two series.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DistanceKind {
    /// Plain banded DTW distance.
    Dtw,
    /// Subsequence DTW: minimum over truncated shifts up to the displacement window.
    DtwSubseq,
}

impl DistanceKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DistanceKind::Dtw => "dtw",
            DistanceKind::DtwSubseq => "dtwsubseq",
        }
    }
}

impl fmt::Display for DistanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DistanceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dtw" => Ok(DistanceKind::Dtw),
            "dtwsubseq" | "subseq" => Ok(DistanceKind::DtwSubseq),
            other => Err(Error::domain(format!("unknown distance kind {other:?}"))),
        }
    }
}

/// Bandwidth and displacement window.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DtwParams {
    /// Band radius `bw`.
    pub bandwidth: usize,
    /// Maximum displacement `dw` searched by the subsequence distance.
    pub window: usize,
}

impl DtwParams {
    pub fn new(bandwidth: usize, window: usize) -> Self {
        Self { bandwidth, window }
    }

    /// Checks `1 ≤ dw ≤ m − 1`.
    pub fn check_window(&self, len: usize) -> Result<()> {
        if self.window == 0 || self.window >= len {
            return Err(Error::domain(format!(
                "displacement window must lie in 1..={}, got {}",
                len - 1,
                self.window
            )));
        }
        Ok(())
    }
}

/// Monotone, continuous sequence of index pairs through the DP grid.
#[derive(Clone, Debug, PartialEq)]
pub struct WarpingPath {
    pub pairs: Vec<(usize, usize)>,
    pub cost: f64,
}

impl WarpingPath {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Accumulated-cost matrix of a banded DTW run.
#[derive(Clone, Debug)]
pub struct CostMatrix {
    data: Vec<f64>,
    size: usize,
    bandwidth: usize,
}

impl CostMatrix {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    /// Accumulated cost at `(s, t)`; infinite outside the band.
    #[inline]
    pub fn get(&self, s: usize, t: usize) -> f64 {
        self.data[s * self.size + t]
    }

    /// Cost of the optimal path, the bottom-right cell.
    pub fn total(&self) -> f64 {
        self.get(self.size - 1, self.size - 1)
    }
}

#[inline]
pub(crate) fn pointwise(a: &[f64], b: &[f64]) -> f64 {
    if a.len() == 1 {
        return (a[0] - b[0]).abs();
    }
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn check_pair(a: &TimeSeries, b: &TimeSeries) -> Result<()> {
    if a.shape() != b.shape() {
        return Err(Error::domain(format!(
            "series shapes differ: {:?} vs {:?}",
            a.shape(),
            b.shape()
        )));
    }
    Ok(())
}

#[inline]
fn band(s: usize, bw: usize, n: usize) -> (usize, usize) {
    (s.saturating_sub(bw), (s + bw).min(n - 1))
}

/// Banded DTW over two equal-length views, keeping two rows.
///
/// Returns `UNREACHABLE` as soon as a whole row is at or above `abandon_at`;
/// every path crosses every row and costs are non-negative, so the final
/// value would be at least that large.
pub(crate) fn banded_distance(a: SeriesView<'_>, b: SeriesView<'_>, bw: usize, abandon_at: f64) -> f64 {
    let n = a.len();
    debug_assert_eq!(n, b.len());
    let bw = bw.min(n - 1);
    let mut prev = vec![UNREACHABLE; n];
    let mut cur = vec![UNREACHABLE; n];

    let (_, hi) = band(0, bw, n);
    let a0 = a.row(0);
    let mut acc = 0.0;
    for (t, cell) in prev.iter_mut().enumerate().take(hi + 1) {
        acc += pointwise(a0, b.row(t));
        *cell = acc;
    }
    if prev[0] >= abandon_at {
        return UNREACHABLE;
    }

    for s in 1..n {
        let (lo, hi) = band(s, bw, n);
        let row_a = a.row(s);
        let mut left = UNREACHABLE;
        let mut row_min = UNREACHABLE;
        for t in lo..=hi {
            let up = prev[t];
            let diag = if t > 0 { prev[t - 1] } else { UNREACHABLE };
            let best = diag.min(up).min(left);
            let v = pointwise(row_a, b.row(t)) + best;
            cur[t] = v;
            left = v;
            row_min = row_min.min(v);
        }
        if lo > 0 {
            cur[lo - 1] = UNREACHABLE;
        }
        if hi + 1 < n {
            cur[hi + 1] = UNREACHABLE;
        }
        if row_min >= abandon_at {
            return UNREACHABLE;
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[n - 1]
}

fn full_matrix(a: SeriesView<'_>, b: SeriesView<'_>, bw: usize) -> CostMatrix {
    let n = a.len();
    let bw = bw.min(n - 1);
    let mut data = vec![UNREACHABLE; n * n];
    for s in 0..n {
        let (lo, hi) = band(s, bw, n);
        let row_a = a.row(s);
        for t in lo..=hi {
            let d = pointwise(row_a, b.row(t));
            let best = if s == 0 && t == 0 {
                0.0
            } else {
                let diag = if s > 0 && t > 0 { data[(s - 1) * n + t - 1] } else { UNREACHABLE };
                let up = if s > 0 { data[(s - 1) * n + t] } else { UNREACHABLE };
                let left = if t > 0 { data[s * n + t - 1] } else { UNREACHABLE };
                diag.min(up).min(left)
            };
            data[s * n + t] = d + best;
        }
    }
    CostMatrix {
        data,
        size: n,
        bandwidth: bw,
    }
}

/// Follows predecessors from the last cell back to the first, preferring
/// the diagonal, then `(s − 1, t)`, then `(s, t − 1)` on ties.
fn backtrack(m: &CostMatrix) -> Vec<(usize, usize)> {
    let n = m.size;
    let (mut s, mut t) = (n - 1, n - 1);
    let mut pairs = vec![(s, t)];
    while (s, t) != (0, 0) {
        let mut next = None;
        let mut best = UNREACHABLE;
        let candidates = [
            (s > 0 && t > 0).then(|| (s - 1, t - 1)),
            (s > 0).then(|| (s - 1, t)),
            (t > 0).then(|| (s, t - 1)),
        ];
        for (cs, ct) in candidates.into_iter().flatten() {
            let v = m.get(cs, ct);
            if next.is_none() || v < best {
                best = v;
                next = Some((cs, ct));
            }
        }
        (s, t) = next.expect("cell (0, 0) is reachable from every in-band cell");
        pairs.push((s, t));
    }
    pairs.reverse();
    pairs
}

/// Banded DTW distance.
pub fn dtw_distance(a: &TimeSeries, b: &TimeSeries, bw: usize) -> Result<f64> {
    check_pair(a, b)?;
    Ok(banded_distance(a.view(), b.view(), bw, UNREACHABLE))
}

/// Full accumulated-cost matrix for `(a, b)`.
pub fn cost_matrix(a: &TimeSeries, b: &TimeSeries, bw: usize) -> Result<CostMatrix> {
    check_pair(a, b)?;
    Ok(full_matrix(a.view(), b.view(), bw))
}

/// Optimal warping path and its cost.
pub fn dtw_path(a: &TimeSeries, b: &TimeSeries, bw: usize) -> Result<WarpingPath> {
    let m = cost_matrix(a, b, bw)?;
    Ok(WarpingPath {
        pairs: backtrack(&m),
        cost: m.total(),
    })
}

/// Warps `moving` onto the time axis of `reference`.
///
/// The aligned value at reference index `s` is the mean of every `moving`
/// point the optimal path matches to `s`.
pub fn align(reference: &TimeSeries, moving: &TimeSeries, bw: usize) -> Result<TimeSeries> {
    let path = dtw_path(reference, moving, bw)?;
    Ok(align_along(&path, moving, reference.len()))
}

pub(crate) fn align_along(path: &WarpingPath, moving: &TimeSeries, len: usize) -> TimeSeries {
    let dim = moving.dim();
    let mut sums = vec![0.0; len * dim];
    let mut counts = vec![0usize; len];
    for &(s, t) in &path.pairs {
        counts[s] += 1;
        for (acc, v) in sums[s * dim..(s + 1) * dim].iter_mut().zip(moving.row(t)) {
            *acc += v;
        }
    }
    for (s, &c) in counts.iter().enumerate() {
        for v in &mut sums[s * dim..(s + 1) * dim] {
            *v /= c as f64;
        }
    }
    TimeSeries::from_parts_unchecked(sums, len, dim)
}

/// Subsequence DTW distance.
///
/// For every displacement `k = 1..=dw` both series are truncated to length
/// `L = m − k + 1`, one dropping its first `k − 1` points and the other its
/// last `k − 1`. The banded distance of the pair is rescaled by `m / L`.
/// Both shift directions are tried and the smallest value is returned. At
/// `k = 1` the term is the plain distance, so this never exceeds it.
pub fn dtwsubseq_distance(a: &TimeSeries, b: &TimeSeries, dw: usize, bw: usize) -> Result<f64> {
    check_pair(a, b)?;
    DtwParams::new(bw, dw).check_window(a.len())?;
    Ok(subseq_unchecked(a.view(), b.view(), dw, bw))
}

pub(crate) fn subseq_unchecked(a: SeriesView<'_>, b: SeriesView<'_>, dw: usize, bw: usize) -> f64 {
    let m = a.len();
    let mut best = banded_distance(a, b, bw, UNREACHABLE);
    for k in 2..=dw {
        let len = m - k + 1;
        let weight = m as f64 / len as f64;
        let pairs = [
            (a.slice(k - 1, m), b.slice(0, len)),
            (a.slice(0, len), b.slice(k - 1, m)),
        ];
        for (x, y) in pairs {
            let d = banded_distance(x, y, bw, best / weight);
            if d.is_finite() {
                let weighted = weight * d;
                if weighted < best {
                    best = weighted;
                }
            }
        }
    }
    best
}

/// Distance of the configured kind.
pub fn distance(kind: DistanceKind, a: &TimeSeries, b: &TimeSeries, params: DtwParams) -> Result<f64> {
    match kind {
        DistanceKind::Dtw => dtw_distance(a, b, params.bandwidth),
        DistanceKind::DtwSubseq => dtwsubseq_distance(a, b, params.window, params.bandwidth),
    }
}

/// Same as [`distance`] with shapes and window already validated.
pub(crate) fn distance_unchecked(kind: DistanceKind, a: &TimeSeries, b: &TimeSeries, params: DtwParams) -> f64 {
    match kind {
        DistanceKind::Dtw => banded_distance(a.view(), b.view(), params.bandwidth, UNREACHABLE),
        DistanceKind::DtwSubseq => subseq_unchecked(a.view(), b.view(), params.window, params.bandwidth),
    }
}
