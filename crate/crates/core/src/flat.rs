//! Removal of "flat" samples: windows in which every dimension barely moves.

use crate::error::{Error, Result};
use crate::series::Dataset;

/// Outcome of [`remove_flat_curves`].
#[derive(Clone, Debug, PartialEq)]
pub struct FlatCurveReport {
    /// Per-dimension range threshold.
    pub thresholds: Vec<f64>,
    /// Indices (into the input dataset) of removed samples, ascending.
    pub removed: Vec<usize>,
}

/// Empirical quantile with linear interpolation between order statistics.
///
/// `values` must be non-empty and `q` in `[0, 1]`.
pub fn quantile(values: &[f64], q: f64) -> f64 {
    assert!(!values.is_empty(), "quantile of an empty slice");
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Drops every sample whose range is at or below the `q`-quantile of ranges
/// in all of its dimensions. Thresholds come from the input dataset only;
/// survivors keep their original order.
pub fn remove_flat_curves(data: &Dataset, q: f64) -> Result<(Dataset, FlatCurveReport)> {
    if data.is_empty() {
        return Err(Error::domain("cannot filter an empty dataset"));
    }
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::domain(format!("quantile must lie in (0, 1), got {q}")));
    }
    let ranges: Vec<Vec<f64>> = data.samples().iter().map(|s| s.series.ranges()).collect();
    let dim = ranges[0].len();
    let thresholds: Vec<f64> = (0..dim)
        .map(|d| {
            let column: Vec<f64> = ranges.iter().map(|r| r[d]).collect();
            quantile(&column, q)
        })
        .collect();

    let (mut kept, mut removed) = (Vec::new(), Vec::new());
    for (i, r) in ranges.iter().enumerate() {
        if r.iter().zip(&thresholds).all(|(range, thr)| range <= thr) {
            removed.push(i);
        } else {
            kept.push(i);
        }
    }
    Ok((data.subset(&kept), FlatCurveReport { thresholds, removed }))
}
