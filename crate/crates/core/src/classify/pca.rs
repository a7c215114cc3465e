//! Principal component analysis via eigen-decomposition of the covariance.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Relative slack when comparing cumulative explained variance to the target.
const VARIANCE_SLACK: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct PcaModel {
    pub mean: Vec<f64>,
    /// Retained components, one row per component, each of length `features`.
    pub components: Vec<Vec<f64>>,
    /// Variance along each retained component, non-increasing.
    pub explained_variance: Vec<f64>,
    /// Sum of all eigenvalues of the covariance.
    pub total_variance: f64,
}

impl PcaModel {
    pub fn features(&self) -> usize {
        self.mean.len()
    }

    pub fn retained(&self) -> usize {
        self.components.len()
    }

    pub fn transform(&self, row: &[f64]) -> Vec<f64> {
        let centered: Vec<f64> = row.iter().zip(&self.mean).map(|(v, m)| v - m).collect();
        self.components
            .iter()
            .map(|c| c.iter().zip(&centered).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Maps projected coordinates back to feature space.
    pub fn inverse_transform(&self, projected: &[f64]) -> Vec<f64> {
        let mut out = self.mean.clone();
        for (c, z) in self.components.iter().zip(projected) {
            for (o, v) in out.iter_mut().zip(c) {
                *o += z * v;
            }
        }
        out
    }
}

/// Fits PCA on `rows` (n × f), keeping the fewest leading components whose
/// cumulative variance reaches `variance_retained` of the total.
///
/// Eigenvectors are sign-normalized so that their largest-magnitude entry is
/// positive.
pub fn fit_pca(rows: &[Vec<f64>], variance_retained: f64) -> Result<PcaModel> {
    let n = rows.len();
    if n < 2 {
        return Err(Error::domain(format!("PCA needs at least 2 rows, got {n}")));
    }
    if !(variance_retained > 0.0 && variance_retained <= 1.0) {
        return Err(Error::domain(format!(
            "variance_retained must lie in (0, 1], got {variance_retained}"
        )));
    }
    let f = rows[0].len();
    if f == 0 || rows.iter().any(|r| r.len() != f) {
        return Err(Error::domain("feature rows must be non-empty and equally long"));
    }
    let mut mean = vec![0.0; f];
    for r in rows {
        for (m, v) in mean.iter_mut().zip(r) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);

    let centered = DMatrix::from_fn(n, f, |i, j| rows[i][j] - mean[j]);
    let cov = (centered.transpose() * &centered) / (n as f64 - 1.0);
    let eig = SymmetricEigen::new(cov);

    let mut order: Vec<usize> = (0..f).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let values: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k].max(0.0)).collect();
    let total_variance: f64 = values.iter().sum();

    let mut retained = f;
    if total_variance > 0.0 {
        let target = variance_retained * total_variance * (1.0 - VARIANCE_SLACK);
        let mut acc = 0.0;
        for (k, v) in values.iter().enumerate() {
            acc += v;
            if acc >= target {
                retained = k + 1;
                break;
            }
        }
    } else {
        retained = 1;
    }

    let components = order[..retained]
        .iter()
        .map(|&k| {
            let mut c: Vec<f64> = eig.eigenvectors.column(k).iter().copied().collect();
            let pivot = c
                .iter()
                .enumerate()
                .fold((0, 0.0f64), |(bi, bv), (i, v)| if v.abs() > bv { (i, v.abs()) } else { (bi, bv) })
                .0;
            if c[pivot] < 0.0 {
                c.iter_mut().for_each(|v| *v = -*v);
            }
            c
        })
        .collect();
    Ok(PcaModel {
        mean,
        components,
        explained_variance: values[..retained].to_vec(),
        total_variance,
    })
}
