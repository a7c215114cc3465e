use rayon::prelude::*;

use crate::dtw::{self, DistanceKind, DtwParams};
use crate::error::{Error, Result};
use crate::series::TimeSeries;
use crate::template::Template;

/// Distances from `sample` to every template, in template order.
pub fn featurize(sample: &TimeSeries, templates: &[Template], params: DtwParams, kind: DistanceKind) -> Result<Vec<f64>> {
    check_shapes(std::slice::from_ref(sample), templates, params, kind)?;
    Ok(featurize_unchecked(sample, templates, params, kind))
}

fn featurize_unchecked(sample: &TimeSeries, templates: &[Template], params: DtwParams, kind: DistanceKind) -> Vec<f64> {
    templates
        .iter()
        .map(|t| dtw::distance_unchecked(kind, sample, &t.series, params))
        .collect()
}

fn check_shapes(samples: &[TimeSeries], templates: &[Template], params: DtwParams, kind: DistanceKind) -> Result<()> {
    let shape = templates
        .first()
        .ok_or_else(|| Error::domain("no templates"))?
        .series
        .shape();
    if let Some(t) = templates.iter().position(|t| t.series.shape() != shape) {
        return Err(Error::domain(format!("template {t} has a different shape")));
    }
    if let Some(i) = samples.iter().position(|s| s.shape() != shape) {
        return Err(Error::domain(format!(
            "sample {i} has shape {:?}, templates have {shape:?}",
            samples[i].shape()
        )));
    }
    if kind == DistanceKind::DtwSubseq {
        params.check_window(shape.0)?;
    }
    Ok(())
}

/// Feature rows for many samples, computed in parallel.
pub fn featurize_all(samples: &[TimeSeries], templates: &[Template], params: DtwParams, kind: DistanceKind) -> Result<Vec<Vec<f64>>> {
    check_shapes(samples, templates, params, kind)?;
    Ok(samples
        .par_iter()
        .map(|s| featurize_unchecked(s, templates, params, kind))
        .collect())
}

/// Per-feature standardization with training statistics.
#[derive(Clone, Debug, PartialEq)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    /// Population standard deviation; constant features get 1.
    pub std: Vec<f64>,
}

impl Standardizer {
    pub fn fit(rows: &[Vec<f64>]) -> Result<Self> {
        let first = rows.first().ok_or_else(|| Error::domain("no rows to standardize"))?;
        let f = first.len();
        let n = rows.len() as f64;
        let mut mean = vec![0.0; f];
        for r in rows {
            for (m, v) in mean.iter_mut().zip(r) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; f];
        for r in rows {
            for ((s, v), m) in var.iter_mut().zip(r).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        let std = var
            .into_iter()
            .map(|s| {
                let sd = (s / n).sqrt();
                if sd > 1e-12 { sd } else { 1.0 }
            })
            .collect();
        Ok(Self { mean, std })
    }

    pub fn transform(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(&self.mean)
            .zip(&self.std)
            .map(|((v, m), s)| (v - m) / s)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::template::Provenance;

    fn template(v: &[f64]) -> Template {
        Template {
            series: TimeSeries::univariate(v.to_vec()).unwrap(),
            label: 0,
            provenance: Provenance::Dpa { cluster_size: 1, medoid: 0 },
        }
    }

    #[test]
    fn own_template_entry_is_zero() {
        let ts: Vec<Template> = (0..5)
            .map(|k| template(&[k as f64, 1.0, -(k as f64), 2.0]))
            .collect();
        let sample = ts[3].series.clone();
        let f = featurize(&sample, &ts, DtwParams::new(2, 2), DistanceKind::DtwSubseq).unwrap();
        assert_eq!(f.len(), 5);
        assert_eq!(f[3], 0.0);
        assert!(f.iter().all(|&d| d >= 0.0));
    }

    #[test]
    fn one_template_one_feature() {
        let ts = vec![template(&[0.0, 1.0, 2.0])];
        let s = TimeSeries::univariate(vec![1.0, 1.0, 1.0]).unwrap();
        assert_eq!(featurize(&s, &ts, DtwParams::new(1, 1), DistanceKind::Dtw).unwrap().len(), 1);
    }

    #[test]
    fn shape_mismatch_rejected() {
        let ts = vec![template(&[0.0, 1.0, 2.0])];
        let s = TimeSeries::univariate(vec![1.0, 1.0]).unwrap();
        assert!(featurize(&s, &ts, DtwParams::new(1, 1), DistanceKind::Dtw).is_err());
    }

    #[test]
    fn standardizer_handles_constant_columns() {
        let rows = vec![vec![1.0, 5.0], vec![3.0, 5.0]];
        let s = Standardizer::fit(&rows).unwrap();
        assert_eq!(s.transform(&[1.0, 5.0]), vec![-1.0, 0.0]);
        assert_eq!(s.transform(&[3.0, 5.0]), vec![1.0, 0.0]);
    }
}
