//! Per-activity pairwise distances and complete-linkage clustering.

use rayon::prelude::*;

use crate::dtw::{self, DistanceKind, DtwParams};
use crate::error::{Error, Result};
use crate::series::{Label, TimeSeries};
use crate::uci::fmt_f64;

/// Symmetric matrix of pairwise dissimilarities with a zero diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct PairwiseDistances {
    data: Vec<f64>,
    n: usize,
    pub kind: DistanceKind,
    pub params: DtwParams,
}

impl PairwiseDistances {
    /// Wraps an existing row-major `n × n` matrix, checking symmetry
    /// (to 1e-9), a zero diagonal and non-negative entries.
    pub fn from_matrix(data: Vec<f64>, n: usize, kind: DistanceKind, params: DtwParams) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::domain(format!("expected {} entries, got {}", n * n, data.len())));
        }
        for i in 0..n {
            if data[i * n + i] != 0.0 {
                return Err(Error::domain(format!("diagonal entry {i} is not zero")));
            }
            for j in 0..n {
                let v = data[i * n + j];
                if !(v >= 0.0 && v.is_finite()) {
                    return Err(Error::domain(format!("entry ({i}, {j}) = {v} is not a finite non-negative number")));
                }
                if (v - data[j * n + i]).abs() > 1e-9 {
                    return Err(Error::domain(format!("matrix is not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(Self { data, n, kind, params })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Largest entry; zero for an empty or all-zero matrix.
    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(0.0, f64::max)
    }

    /// Restriction to the given indices, in the given order.
    pub fn submatrix(&self, idx: &[usize]) -> Self {
        let k = idx.len();
        let mut data = Vec::with_capacity(k * k);
        for &i in idx {
            data.extend(idx.iter().map(|&j| self.get(i, j)));
        }
        Self { data, n: k, kind: self.kind, params: self.params }
    }

    /// Row-major, whitespace-separated text, one row per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| fmt_f64(self.get(i, j))).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }
}

/// Distances between every pair of `samples`, each unordered pair computed once.
pub fn pairwise_distances(samples: &[TimeSeries], params: DtwParams, kind: DistanceKind) -> Result<PairwiseDistances> {
    let n = samples.len();
    if n == 0 {
        return Err(Error::domain("need at least one sample"));
    }
    let shape = samples[0].shape();
    if let Some(i) = samples.iter().position(|s| s.shape() != shape) {
        return Err(Error::domain(format!(
            "sample {i} has shape {:?}, expected {shape:?}",
            samples[i].shape()
        )));
    }
    if kind == DistanceKind::DtwSubseq {
        params.check_window(shape.0)?;
    }
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let values: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, j)| dtw::distance_unchecked(kind, &samples[i], &samples[j], params))
        .collect();
    let mut data = vec![0.0; n * n];
    for (&(i, j), v) in pairs.iter().zip(values) {
        data[i * n + j] = v;
        data[j * n + i] = v;
    }
    Ok(PairwiseDistances { data, n, kind, params })
}

/// One agglomeration step: clusters identified by their smallest member.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub height: f64,
}

/// Flat clusters obtained by cutting a complete-linkage dendrogram.
#[derive(Clone, Debug, PartialEq)]
pub struct Partition {
    /// Clusters of matrix indices; members ascending, clusters ordered by first member.
    pub clusters: Vec<Vec<usize>>,
    /// `cut × max_distance`; no cluster diameter exceeds it.
    pub threshold: f64,
    pub max_distance: f64,
    /// Merges performed, in order. Heights are non-decreasing.
    pub merges: Vec<Merge>,
}

impl Partition {
    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    /// Cluster id of every index.
    pub fn assignments(&self) -> Vec<usize> {
        let n = self.clusters.iter().map(Vec::len).sum();
        let mut out = vec![0; n];
        for (c, members) in self.clusters.iter().enumerate() {
            for &i in members {
                out[i] = c;
            }
        }
        out
    }
}

/// Agglomerative clustering under complete linkage, stopped once the next
/// merge would exceed `cut ×` the largest pairwise distance.
///
/// Equal-height candidate merges are resolved by the lexicographically
/// smallest pair of cluster ids, a cluster's id being its smallest member.
pub fn complete_linkage_cluster(dists: &PairwiseDistances, cut: f64) -> Result<Partition> {
    if !(cut > 0.0 && cut <= 1.0) {
        return Err(Error::domain(format!("cut must lie in (0, 1], got {cut}")));
    }
    let n = dists.len();
    let max_distance = dists.max();
    let threshold = cut * max_distance;

    // Cluster at slot i is identified by its smallest member i.
    let mut linkage = dists.data.clone();
    let mut members: Vec<Option<Vec<usize>>> = (0..n).map(|i| Some(vec![i])).collect();
    let mut active: Vec<usize> = (0..n).collect();
    let mut merges = Vec::new();

    while active.len() > 1 {
        let mut best: Option<(f64, usize, usize)> = None;
        for (ai, &i) in active.iter().enumerate() {
            for &j in &active[ai + 1..] {
                let h = linkage[i * n + j];
                // active is ascending, so (i, j) visits pairs lexicographically
                // and strict < keeps the first minimum.
                if best.is_none_or(|(bh, _, _)| h < bh) {
                    best = Some((h, i, j));
                }
            }
        }
        let (height, i, j) = best.expect("at least two active clusters");
        if height > threshold {
            break;
        }
        for &k in &active {
            if k != i && k != j {
                let h = linkage[i * n + k].max(linkage[j * n + k]);
                linkage[i * n + k] = h;
                linkage[k * n + i] = h;
            }
        }
        let moved = members[j].take().expect("active cluster");
        let target = members[i].as_mut().expect("active cluster");
        target.extend(moved);
        target.sort_unstable();
        active.retain(|&k| k != j);
        merges.push(Merge { left: i, right: j, height });
    }

    let clusters = active
        .iter()
        .map(|&i| members[i].take().expect("active cluster"))
        .collect();
    Ok(Partition {
        clusters,
        threshold,
        max_distance,
        merges,
    })
}

/// Partition of one activity's training samples.
#[derive(Clone, Debug, PartialEq)]
pub struct ClusterSet {
    pub label: Label,
    /// Dataset indices of the activity's samples; partition indices refer to positions here.
    pub members: Vec<usize>,
    pub partition: Partition,
}

impl ClusterSet {
    /// Clusters as dataset indices.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        self.partition
            .clusters
            .iter()
            .map(|c| c.iter().map(|&i| self.members[i]).collect())
            .collect()
    }

    /// `index cluster` lines, dataset indices.
    pub fn to_text(&self) -> String {
        let assign = self.partition.assignments();
        self.members
            .iter()
            .zip(assign)
            .map(|(m, c)| format!("{m} {c}\n"))
            .collect()
    }
}
