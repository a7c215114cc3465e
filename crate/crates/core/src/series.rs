//! Time series and dataset containers.
//!
//! A [`TimeSeries`] is an `m × p` row-major block of finite reals: `m` time
//! steps, each a point in `p` dimensions. All series inside a [`Dataset`]
//! share the same shape.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Activity identifier.
pub type Label = u32;

/// Display names for the six activities of the UCI HAR layout, indexed by label.
pub const UCI_ACTIVITY_NAMES: [&str; 6] = [
    "walking",
    "walking_upstairs",
    "walking_downstairs",
    "sitting",
    "standing",
    "lying",
];

/// Fixed-length, uniformly sampled, `p`-dimensional sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeSeries {
    values: Vec<f64>,
    len: usize,
    dim: usize,
}

impl TimeSeries {
    /// Builds a series from row-major values (`len` rows of `dim` numbers).
    pub fn new(values: Vec<f64>, len: usize, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::domain("series dimension must be positive"));
        }
        if len < 2 {
            return Err(Error::domain(format!(
                "series length must be at least 2, got {len}"
            )));
        }
        if values.len() != len * dim {
            return Err(Error::domain(format!(
                "expected {len}×{dim} = {} values, got {}",
                len * dim,
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::domain(format!(
                "non-finite value at row {}, column {}",
                pos / dim,
                pos % dim
            )));
        }
        Ok(Self { values, len, dim })
    }

    /// One-dimensional series.
    pub fn univariate(values: Vec<f64>) -> Result<Self> {
        let len = values.len();
        Self::new(values, len, 1)
    }

    /// Builds a series from per-time-step rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::domain("rows have differing dimensions"));
        }
        Self::new(rows.concat(), rows.len(), dim)
    }

    /// Builds a series from per-dimension channels of equal length.
    pub fn from_channels(channels: &[Vec<f64>]) -> Result<Self> {
        let dim = channels.len();
        let len = channels.first().map_or(0, Vec::len);
        if channels.iter().any(|c| c.len() != len) {
            return Err(Error::domain("channels have differing lengths"));
        }
        let mut values = Vec::with_capacity(len * dim);
        for t in 0..len {
            values.extend(channels.iter().map(|c| c[t]));
        }
        Self::new(values, len, dim)
    }

    /// Number of time steps `m`.
    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    /// Always false: series hold at least two points.
    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Point dimension `p`.
    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.len, self.dim)
    }

    /// Row-major values.
    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// The point at time step `t`.
    #[inline]
    pub fn row(&self, t: usize) -> &[f64] {
        &self.values[t * self.dim..(t + 1) * self.dim]
    }

    /// Values of one dimension across time.
    pub fn channel(&self, d: usize) -> Vec<f64> {
        (0..self.len).map(|t| self.values[t * self.dim + d]).collect()
    }

    /// `max − min` of each dimension over time.
    pub fn ranges(&self) -> Vec<f64> {
        (0..self.dim)
            .map(|d| {
                let (lo, hi) = (0..self.len)
                    .map(|t| self.values[t * self.dim + d])
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                        (lo.min(v), hi.max(v))
                    });
                hi - lo
            })
            .collect()
    }

    pub fn view(&self) -> SeriesView<'_> {
        SeriesView {
            values: &self.values,
            len: self.len,
            dim: self.dim,
        }
    }

    pub(crate) fn from_parts_unchecked(values: Vec<f64>, len: usize, dim: usize) -> Self {
        debug_assert_eq!(values.len(), len * dim);
        Self { values, len, dim }
    }
}

/// Borrowed contiguous window of a [`TimeSeries`].
#[derive(Clone, Copy, Debug)]
pub struct SeriesView<'a> {
    values: &'a [f64],
    len: usize,
    dim: usize,
}

impl<'a> SeriesView<'a> {
    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn row(&self, t: usize) -> &'a [f64] {
        &self.values[t * self.dim..(t + 1) * self.dim]
    }

    /// Time steps `start..end`.
    pub fn slice(&self, start: usize, end: usize) -> SeriesView<'a> {
        assert!(start <= end && end <= self.len, "slice out of bounds");
        SeriesView {
            values: &self.values[start * self.dim..end * self.dim],
            len: end - start,
            dim: self.dim,
        }
    }
}

/// A series tagged with its activity and, optionally, the subject that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledSeries {
    pub series: TimeSeries,
    pub label: Label,
    pub subject: Option<u32>,
}

impl LabeledSeries {
    pub fn new(series: TimeSeries, label: Label) -> Self {
        Self {
            series,
            label,
            subject: None,
        }
    }
}

/// Ordered collection of equally shaped labeled series.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    samples: Vec<LabeledSeries>,
    label_names: BTreeMap<Label, String>,
}

impl Dataset {
    /// Validates that every sample has the same shape and that every label
    /// is declared in `label_names`. An empty name map declares every label
    /// present, named by its number.
    pub fn new(samples: Vec<LabeledSeries>, label_names: BTreeMap<Label, String>) -> Result<Self> {
        if let Some(first) = samples.first() {
            let shape = first.series.shape();
            for (i, s) in samples.iter().enumerate() {
                if s.series.shape() != shape {
                    return Err(Error::domain(format!(
                        "sample {i} has shape {:?}, expected {shape:?}",
                        s.series.shape()
                    )));
                }
            }
        }
        let label_names = if label_names.is_empty() {
            samples
                .iter()
                .map(|s| (s.label, s.label.to_string()))
                .collect()
        } else {
            label_names
        };
        if let Some(s) = samples.iter().find(|s| !label_names.contains_key(&s.label)) {
            return Err(Error::domain(format!("undeclared label {}", s.label)));
        }
        Ok(Self {
            samples,
            label_names,
        })
    }

    /// Names labels after the UCI activities when every label is in `0..6`,
    /// by number otherwise.
    pub fn with_default_names(samples: Vec<LabeledSeries>) -> Result<Self> {
        let names = if samples.iter().all(|s| (s.label as usize) < UCI_ACTIVITY_NAMES.len()) {
            let mut used: Vec<Label> = samples.iter().map(|s| s.label).collect();
            used.sort_unstable();
            used.dedup();
            used.into_iter()
                .map(|l| (l, UCI_ACTIVITY_NAMES[l as usize].to_string()))
                .collect()
        } else {
            BTreeMap::new()
        };
        Self::new(samples, names)
    }

    pub fn samples(&self) -> &[LabeledSeries] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn label_names(&self) -> &BTreeMap<Label, String> {
        &self.label_names
    }

    /// `(m, p)` shared by all samples, `None` when empty.
    pub fn shape(&self) -> Option<(usize, usize)> {
        self.samples.first().map(|s| s.series.shape())
    }

    /// Distinct labels present among the samples, ascending.
    pub fn labels(&self) -> Vec<Label> {
        let mut labels: Vec<Label> = self.samples.iter().map(|s| s.label).collect();
        labels.sort_unstable();
        labels.dedup();
        labels
    }

    /// Sample indices grouped by label, each group in dataset order.
    pub fn indices_by_label(&self) -> BTreeMap<Label, Vec<usize>> {
        let mut groups: BTreeMap<Label, Vec<usize>> = BTreeMap::new();
        for (i, s) in self.samples.iter().enumerate() {
            groups.entry(s.label).or_default().push(i);
        }
        groups
    }

    /// New dataset holding the given samples in the given order.
    pub fn subset(&self, indices: &[usize]) -> Self {
        Self {
            samples: indices.iter().map(|&i| self.samples[i].clone()).collect(),
            label_names: self.label_names.clone(),
        }
    }

    /// Checks that every declared label has at least one sample.
    pub fn check_trainable(&self) -> Result<()> {
        if self.samples.is_empty() {
            return Err(Error::domain("training set is empty"));
        }
        let present = self.labels();
        for label in self.label_names.keys() {
            if present.binary_search(label).is_err() {
                return Err(Error::domain(format!(
                    "declared label {label} has no training samples"
                )));
            }
        }
        Ok(())
    }
}
