//! Independent reference implementations used as test oracles. None of them
//! call into the library's algorithms; they trade speed for obviousness.

#![allow(dead_code)]

use dtwhar::TimeSeries;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_series(rng: &mut impl Rng, len: usize, dim: usize) -> TimeSeries {
    let values = (0..len * dim).map(|_| rng.random_range(-3.0..3.0)).collect();
    TimeSeries::new(values, len, dim).unwrap()
}

/// Euclidean distance between observation `s` of `a` and `t` of `b`.
pub fn euclid(a: &TimeSeries, s: usize, b: &TimeSeries, t: usize) -> f64 {
    (0..a.dim())
        .map(|d| {
            let x = a.values()[s * a.dim() + d] - b.values()[t * b.dim() + d];
            x * x
        })
        .sum::<f64>()
        .sqrt()
}

/// Restriction of `x` to indices `start..end`.
pub fn slice(x: &TimeSeries, start: usize, end: usize) -> TimeSeries {
    let d = x.dim();
    TimeSeries::new(x.values()[start * d..end * d].to_vec(), end - start, d).unwrap()
}

/// Minimum cost over every warping path inside the band, found by
/// depth-first enumeration of all monotone continuous paths.
pub fn brute_force_dtw(a: &TimeSeries, b: &TimeSeries, bw: usize) -> f64 {
    fn walk(a: &TimeSeries, b: &TimeSeries, bw: usize, s: usize, t: usize, acc: f64, best: &mut f64) {
        let acc = acc + euclid(a, s, b, t);
        let end = a.len() - 1;
        if (s, t) == (end, end) {
            *best = best.min(acc);
            return;
        }
        for (ds, dt) in [(1, 1), (1, 0), (0, 1)] {
            let (ns, nt) = (s + ds, t + dt);
            if ns <= end && nt <= end && ns.abs_diff(nt) <= bw {
                walk(a, b, bw, ns, nt, acc, best);
            }
        }
    }
    let mut best = f64::INFINITY;
    walk(a, b, bw, 0, 0, 0.0, &mut best);
    best
}

/// Textbook O(m²) dynamic program over the full grid with a band mask.
pub fn reference_dtw(a: &TimeSeries, b: &TimeSeries, bw: usize) -> f64 {
    let n = a.len();
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for s in 0..n {
        for t in 0..n {
            if s.abs_diff(t) > bw {
                continue;
            }
            let prev = if s == 0 && t == 0 {
                0.0
            } else {
                let mut p = f64::INFINITY;
                if s > 0 {
                    p = p.min(d[s - 1][t]);
                }
                if t > 0 {
                    p = p.min(d[s][t - 1]);
                }
                if s > 0 && t > 0 {
                    p = p.min(d[s - 1][t - 1]);
                }
                p
            };
            d[s][t] = euclid(a, s, b, t) + prev;
        }
    }
    d[n - 1][n - 1]
}

/// Subsequence distance from first principles: every displacement in both
/// directions, each truncated pair scored by `dtw` and reweighted.
pub fn reference_subseq(a: &TimeSeries, b: &TimeSeries, dw: usize, bw: usize, dtw: fn(&TimeSeries, &TimeSeries, usize) -> f64) -> f64 {
    let m = a.len();
    let mut best = f64::INFINITY;
    for k in 1..=dw {
        let len = m - k + 1;
        let w = m as f64 / len as f64;
        let forward = dtw(&slice(a, k - 1, m), &slice(b, 0, len), bw);
        let backward = dtw(&slice(a, 0, len), &slice(b, k - 1, m), bw);
        best = best.min(w * forward).min(w * backward);
    }
    best
}

/// Direct O(N²) discrete Fourier transform.
pub fn naive_dft(x: &[Complex64], inverse: bool) -> Vec<Complex64> {
    let n = x.len();
    let sign = if inverse { 1.0 } else { -1.0 };
    (0..n)
        .map(|k| {
            let sum: Complex64 = x
                .iter()
                .enumerate()
                .map(|(j, v)| {
                    // reduce k·j mod n first to keep the angle small
                    let angle = sign * 2.0 * std::f64::consts::PI * ((k * j) % n) as f64 / n as f64;
                    v * Complex64::from_polar(1.0, angle)
                })
                .sum();
            if inverse { sum / n as f64 } else { sum }
        })
        .collect()
}

/// Eigenvalues (descending) and unit eigenvectors of a symmetric matrix by
/// cyclic Jacobi rotations.
pub fn jacobi_eigen(matrix: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = matrix.len();
    let mut a = matrix.to_vec();
    let mut v: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect()).collect();
    for _sweep in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        if off < 1e-24 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let (vp, vq) = (row[p], row[q]);
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j][j].total_cmp(&a[i][i]));
    let values = order.iter().map(|&i| a[i][i]).collect();
    let vectors = order.iter().map(|&i| (0..n).map(|k| v[k][i]).collect()).collect();
    (values, vectors)
}

/// Complete-linkage agglomeration recomputed from scratch at every step:
/// the linkage between two clusters is the largest original distance
/// between their members. Ties go to the pair with the smallest
/// (min member, min member). Stops before the first merge above `threshold`.
pub fn brute_force_complete_linkage(d: &[Vec<f64>], threshold: f64) -> Vec<Vec<usize>> {
    let mut clusters: Vec<Vec<usize>> = (0..d.len()).map(|i| vec![i]).collect();
    loop {
        let mut best: Option<(f64, usize, usize)> = None;
        for x in 0..clusters.len() {
            for y in x + 1..clusters.len() {
                let h = clusters[x]
                    .iter()
                    .flat_map(|&i| clusters[y].iter().map(move |&j| (i, j)))
                    .map(|(i, j)| d[i][j])
                    .fold(0.0, f64::max);
                let key = (clusters[x][0].min(clusters[y][0]), clusters[x][0].max(clusters[y][0]));
                let better = match best {
                    None => true,
                    Some((bh, bx, by)) => {
                        let bkey = (clusters[bx][0].min(clusters[by][0]), clusters[bx][0].max(clusters[by][0]));
                        h < bh || (h == bh && key < bkey)
                    }
                };
                if better {
                    best = Some((h, x, y));
                }
            }
        }
        match best {
            Some((h, x, y)) if h <= threshold => {
                let moved = clusters.remove(y);
                clusters[x].extend(moved);
                clusters[x].sort_unstable();
            }
            _ => break,
        }
    }
    clusters.sort();
    clusters
}

/// Largest pairwise distance inside a cluster.
pub fn diameter(d: &[Vec<f64>], cluster: &[usize]) -> f64 {
    cluster
        .iter()
        .flat_map(|&i| cluster.iter().map(move |&j| d[i][j]))
        .fold(0.0, f64::max)
}

/// Symmetric random matrix with zero diagonal and values drawn from a small
/// set, so ties are common.
pub fn random_distance_matrix(rng: &mut impl Rng, n: usize, levels: u32) -> Vec<Vec<f64>> {
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = f64::from(rng.random_range(1..=levels));
            d[i][j] = v;
            d[j][i] = v;
        }
    }
    d
}

/// Member with the smallest summed distance to the others; lowest index on ties.
pub fn brute_force_medoid(cluster: &[TimeSeries], dist: impl Fn(&TimeSeries, &TimeSeries) -> f64) -> usize {
    let totals: Vec<f64> = cluster
        .iter()
        .map(|x| cluster.iter().map(|y| dist(x, y)).sum())
        .collect();
    let mut best = 0;
    for (i, &t) in totals.iter().enumerate() {
        if t < totals[best] {
            best = i;
        }
    }
    best
}
