//! Synthetic activity data: series sampled from a per-activity source
//! template with a burst of spectral noise and a random time offset.
//!
//! Each sample is produced by
//! 1. normalizing the source to zero mean and unit variance,
//! 2. tiling it to the FFT length,
//! 3. taking the forward FFT,
//! 4. adding a short normal noise vector at a random bin offset,
//! 5. inverse-transforming and keeping the real part,
//! 6. cutting a random contiguous window of the output length.

pub mod fft;
pub mod sources;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::series::{Dataset, Label, LabeledSeries, TimeSeries};

pub use fft::{fft, fft_in_place, fft_real};
pub use sources::{bundled_sources, sources_from_templates, ActivitySources};

/// How the noise parameter is read.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NoiseScale {
    Variance(f64),
    StdDev(f64),
}

impl NoiseScale {
    pub fn std_dev(self) -> f64 {
        match self {
            NoiseScale::Variance(v) => v.sqrt(),
            NoiseScale::StdDev(s) => s,
        }
    }
}

/// Which spectral components receive noise.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NoiseMode {
    /// One draw per bin, added to the real part.
    RealPart,
    /// Independent draws for the real and imaginary parts.
    Complex,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SynthConfig {
    pub train_per_activity: usize,
    pub test_per_activity: usize,
    pub fft_len: usize,
    pub noise_len: usize,
    pub noise: NoiseScale,
    pub noise_mode: NoiseMode,
    /// Output series length.
    pub length: usize,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            train_per_activity: 200,
            test_per_activity: 50,
            fft_len: 256,
            noise_len: 10,
            noise: NoiseScale::Variance(5.0),
            noise_mode: NoiseMode::RealPart,
            length: 128,
            seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.fft_len.is_power_of_two() || self.fft_len < 2 * self.length {
            return Err(Error::domain(format!(
                "FFT length {} must be a power of two and at least twice the output length {}",
                self.fft_len, self.length
            )));
        }
        if self.length < 2 {
            return Err(Error::domain("output length must be at least 2"));
        }
        if self.noise_len == 0 || self.noise_len > self.fft_len {
            return Err(Error::domain(format!(
                "noise length must lie in 1..={}, got {}",
                self.fft_len, self.noise_len
            )));
        }
        let sd = self.noise.std_dev();
        if !(sd >= 0.0 && sd.is_finite()) {
            return Err(Error::domain("noise deviation must be finite and non-negative"));
        }
        Ok(())
    }

    pub fn echo(&self) -> Vec<String> {
        let (noise_kind, noise_value) = match self.noise {
            NoiseScale::Variance(v) => ("variance", v),
            NoiseScale::StdDev(s) => ("std", s),
        };
        let mode = match self.noise_mode {
            NoiseMode::RealPart => "real",
            NoiseMode::Complex => "complex",
        };
        vec![
            format!("train_per_activity = {}", self.train_per_activity),
            format!("test_per_activity = {}", self.test_per_activity),
            format!("fft_len = {}", self.fft_len),
            format!("noise_len = {}", self.noise_len),
            format!("noise_{noise_kind} = {noise_value}"),
            format!("noise_mode = {mode}"),
            format!("length = {}", self.length),
            format!("seed = {}", self.seed),
        ]
    }
}

/// Random choices made for one sample.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleTrace {
    /// First spectral bin that received noise.
    pub noise_offset: usize,
    /// Start of the output window within the tiled signal.
    pub window_start: usize,
}

/// A sample plus every intermediate signal, for inspection.
#[derive(Clone, Debug)]
pub struct SampleDetail {
    pub series: TimeSeries,
    pub trace: SampleTrace,
    /// Normalized source tiled to the FFT length.
    pub tiled: Vec<f64>,
    pub clean_spectrum: Vec<Complex64>,
    pub noisy_spectrum: Vec<Complex64>,
    /// Real part of the inverse transform, before windowing.
    pub signal: Vec<f64>,
}

fn normalize(values: &[f64]) -> Result<Vec<f64>> {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    if var <= 0.0 {
        return Err(Error::domain("cannot normalize a constant source template"));
    }
    let sd = var.sqrt();
    Ok(values.iter().map(|v| (v - mean) / sd).collect())
}

/// Generates one sample, keeping the intermediate signals.
///
/// Draw order: the noise vector, then the noise offset, then the window start.
pub fn generate_sample_detailed(template: &TimeSeries, config: &SynthConfig, rng: &mut impl Rng) -> Result<SampleDetail> {
    config.validate()?;
    if template.dim() != 1 || template.len() != config.length {
        return Err(Error::domain(format!(
            "source template must be univariate of length {}, got {:?}",
            config.length,
            template.shape()
        )));
    }
    let base = normalize(template.values())?;
    let tiled: Vec<f64> = (0..config.fft_len).map(|i| base[i % base.len()]).collect();
    let clean_spectrum = fft_real(&tiled)?;

    let normal = Normal::new(0.0, config.noise.std_dev()).map_err(|e| Error::domain(e.to_string()))?;
    let noise: Vec<Complex64> = (0..config.noise_len)
        .map(|_| match config.noise_mode {
            NoiseMode::RealPart => Complex64::new(normal.sample(rng), 0.0),
            NoiseMode::Complex => {
                let re = normal.sample(rng);
                Complex64::new(re, normal.sample(rng))
            }
        })
        .collect();
    let noise_offset = rng.random_range(0..=config.fft_len - config.noise_len);
    let mut noisy_spectrum = clean_spectrum.clone();
    for (bin, n) in noisy_spectrum[noise_offset..].iter_mut().zip(&noise) {
        *bin += n;
    }

    let signal: Vec<f64> = fft(&noisy_spectrum, true)?.into_iter().map(|c| c.re).collect();
    let window_start = rng.random_range(0..=config.fft_len - config.length);
    let series = TimeSeries::univariate(signal[window_start..window_start + config.length].to_vec())?;
    Ok(SampleDetail {
        series,
        trace: SampleTrace { noise_offset, window_start },
        tiled,
        clean_spectrum,
        noisy_spectrum,
        signal,
    })
}

pub fn generate_sample(template: &TimeSeries, config: &SynthConfig, rng: &mut impl Rng) -> Result<(TimeSeries, SampleTrace)> {
    let d = generate_sample_detailed(template, config, rng)?;
    Ok((d.series, d.trace))
}

/// Manifest entry for one generated sample.
#[derive(Clone, Debug, PartialEq)]
pub struct ManifestEntry {
    pub split: &'static str,
    pub index: usize,
    pub label: Label,
    pub source: usize,
    pub trace: SampleTrace,
}

#[derive(Clone, Debug)]
pub struct SynthOutput {
    pub train: Dataset,
    pub test: Dataset,
    pub manifest: Vec<ManifestEntry>,
}

impl SynthOutput {
    /// Manifest with the config echo and any `extra` lines in the header.
    pub fn manifest_text(&self, config: &SynthConfig, extra: &[String]) -> String {
        let mut out = String::from("# dtwhar synth-manifest v1\n");
        for line in config.echo().iter().chain(extra) {
            out.push_str(&format!("# {line}\n"));
        }
        out.push_str("# split index label source noise_offset window_start\n");
        for e in &self.manifest {
            out.push_str(&format!(
                "{} {} {} {} {} {}\n",
                e.split, e.index, e.label, e.source, e.trace.noise_offset, e.trace.window_start
            ));
        }
        out
    }
}

/// RNG for one sample: stream 0 picks sources, stream `1 + i` drives sample `i`
/// (training samples first, then test samples).
fn sample_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Builds training and test sets; each activity's training samples come from
/// one randomly chosen source and its test samples from a different one.
pub fn generate_dataset(config: &SynthConfig, sources: &[ActivitySources]) -> Result<SynthOutput> {
    config.validate()?;
    if sources.is_empty() {
        return Err(Error::domain("no source activities"));
    }
    let mut picker = sample_rng(config.seed, 0);
    let mut picks = Vec::with_capacity(sources.len());
    for act in sources {
        let k = act.subjects.len();
        if k < 2 {
            return Err(Error::domain(format!(
                "activity {} needs at least 2 source templates, has {k}",
                act.label
            )));
        }
        let train = picker.random_range(0..k);
        let test = (train + picker.random_range(1..k)) % k;
        picks.push((train, test));
    }

    let mut stream = 1u64;
    let mut manifest = Vec::new();
    let mut build = |split: &'static str, per_activity: usize, which: fn(&(usize, usize)) -> usize| -> Result<Vec<LabeledSeries>> {
        let mut samples = Vec::new();
        for (act, pick) in sources.iter().zip(&picks) {
            let source = which(pick);
            for _ in 0..per_activity {
                let mut rng = sample_rng(config.seed, stream);
                stream += 1;
                let (series, trace) = generate_sample(&act.subjects[source], config, &mut rng)?;
                manifest.push(ManifestEntry {
                    split,
                    index: samples.len(),
                    label: act.label,
                    source,
                    trace,
                });
                samples.push(LabeledSeries::new(series, act.label));
            }
        }
        Ok(samples)
    };
    let train = build("train", config.train_per_activity, |p| p.0)?;
    let test = build("test", config.test_per_activity, |p| p.1)?;

    let names: std::collections::BTreeMap<Label, String> =
        sources.iter().map(|a| (a.label, a.name.clone())).collect();
    Ok(SynthOutput {
        train: Dataset::new(train, names.clone())?,
        test: Dataset::new(test, names)?,
        manifest,
    })
}
