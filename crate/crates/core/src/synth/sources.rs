//! Source templates for the synthetic generator.
//!
//! When no templates from real recordings are available, [`bundled_sources`]
//! supplies deterministic pseudo-activities. These are sinusoid mixtures
//! invented for this crate and do not come from any recorded data.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::series::{Label, TimeSeries, UCI_ACTIVITY_NAMES};
use crate::template::Template;

/// Candidate source templates for one activity, one per "subject".
#[derive(Clone, Debug, PartialEq)]
pub struct ActivitySources {
    pub label: Label,
    pub name: String,
    pub subjects: Vec<TimeSeries>,
}

struct Signature {
    /// Whole cycles per output window, so that tiling is seamless.
    cycles: f64,
    harmonics: [f64; 3],
    drift: f64,
    spike: f64,
}

const SIGNATURES: [Signature; 4] = [
    // walking
    Signature { cycles: 4.0, harmonics: [1.0, 0.5, 0.25], drift: 0.0, spike: 0.0 },
    // walking upstairs
    Signature { cycles: 3.0, harmonics: [1.0, 0.2, 0.6], drift: 0.0, spike: 0.0 },
    // walking downstairs
    Signature { cycles: 5.0, harmonics: [1.0, 0.7, 0.1], drift: 0.0, spike: 0.0 },
    // sitting: almost still, one slow drift cycle and a brief jolt
    Signature { cycles: 1.0, harmonics: [0.0, 0.0, 0.0], drift: 0.3, spike: 1.5 },
];

fn pseudo_activity(sig: &Signature, length: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let jitter = |rng: &mut ChaCha8Rng, x: f64| x * rng.random_range(0.7..1.3);
    let amps: Vec<f64> = sig.harmonics.iter().map(|&a| jitter(rng, a)).collect();
    let phases: Vec<f64> = (0..3).map(|_| rng.random_range(0.0..2.0 * PI)).collect();
    let drift_phase = rng.random_range(0.0..2.0 * PI);
    let spike_at = rng.random_range(0.0..length as f64);
    let m = length as f64;
    (0..length)
        .map(|t| {
            let x = t as f64 / m;
            let mut v = 0.0;
            for (h, (a, p)) in amps.iter().zip(&phases).enumerate() {
                v += a * (2.0 * PI * sig.cycles * (h + 1) as f64 * x + p).sin();
            }
            v += sig.drift * (2.0 * PI * x + drift_phase).sin();
            // circular distance keeps the bump continuous across the tile seam
            let d = (t as f64 - spike_at).abs();
            let d = d.min(m - d);
            v + sig.spike * (-0.5 * (d / 3.0).powi(2)).exp()
        })
        .collect()
}

/// Four pseudo-activities (labels 0..4: walking, walking upstairs, walking
/// downstairs, sitting) with `subjects` variants each. Variants differ in
/// harmonic amplitudes and phases; the output depends only on the arguments.
pub fn bundled_sources(subjects: usize, length: usize) -> Vec<ActivitySources> {
    SIGNATURES
        .iter()
        .enumerate()
        .map(|(a, sig)| {
            let series = (0..subjects)
                .map(|s| {
                    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0000 + a as u64);
                    rng.set_stream(s as u64);
                    TimeSeries::univariate(pseudo_activity(sig, length, &mut rng)).expect("finite, length >= 2")
                })
                .collect();
            ActivitySources {
                label: a as Label,
                name: UCI_ACTIVITY_NAMES[a].to_string(),
                subjects: series,
            }
        })
        .collect()
}

/// Groups templates by activity and keeps one channel of each, restricted to
/// `labels` when given.
pub fn sources_from_templates(
    templates: &[Template],
    channel: usize,
    labels: Option<&[Label]>,
    names: &BTreeMap<Label, String>,
) -> Result<Vec<ActivitySources>> {
    let mut grouped: BTreeMap<Label, Vec<TimeSeries>> = BTreeMap::new();
    for t in templates {
        if labels.is_some_and(|keep| !keep.contains(&t.label)) {
            continue;
        }
        if channel >= t.series.dim() {
            return Err(Error::domain(format!(
                "channel {channel} out of range for a {}-dimensional template",
                t.series.dim()
            )));
        }
        grouped
            .entry(t.label)
            .or_default()
            .push(TimeSeries::univariate(t.series.channel(channel))?);
    }
    if grouped.is_empty() {
        return Err(Error::domain("no templates match the requested activities"));
    }
    Ok(grouped
        .into_iter()
        .map(|(label, subjects)| ActivitySources {
            label,
            name: names
                .get(&label)
                .cloned()
                .or_else(|| UCI_ACTIVITY_NAMES.get(label as usize).map(|s| s.to_string()))
                .unwrap_or_else(|| label.to_string()),
            subjects,
        })
        .collect())
}
