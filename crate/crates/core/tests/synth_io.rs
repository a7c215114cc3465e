mod common;

use common::*;
use dtwhar::flat::quantile;
use dtwhar::synth::{
    bundled_sources, fft, generate_dataset, generate_sample_detailed, NoiseMode, NoiseScale, SynthConfig,
};
use dtwhar::{dtwsubseq_distance, load_uci_layout, remove_flat_curves, save_uci_layout, Dataset, LabeledSeries, TimeSeries};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_complex(r: &mut impl Rng, n: usize) -> Vec<Complex64> {
    (0..n).map(|_| Complex64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0))).collect()
}

#[test]
fn fft_matches_naive_dft() {
    let mut r = rng(30);
    for n in [1, 2, 4, 8, 16, 64, 256] {
        let x = random_complex(&mut r, n);
        for inverse in [false, true] {
            let fast = fft(&x, inverse).unwrap();
            for (a, b) in fast.iter().zip(naive_dft(&x, inverse)) {
                assert!((a - b).norm() < 1e-9, "n = {n}");
            }
        }
    }
}

#[test]
fn round_trip_and_parseval_up_to_1024() {
    let mut r = rng(31);
    for log_n in 0..=10 {
        let n = 1 << log_n;
        let x = random_complex(&mut r, n);
        let spectrum = fft(&x, false).unwrap();
        let back = fft(&spectrum, true).unwrap();
        assert!(x.iter().zip(&back).all(|(a, b)| (a - b).norm() < 1e-9));
        let energy: f64 = x.iter().map(|v| v.norm_sqr()).sum();
        let spectral: f64 = spectrum.iter().map(|v| v.norm_sqr()).sum::<f64>() / n as f64;
        assert!((energy - spectral).abs() <= 1e-6 * energy);
    }
}

fn source(r: &mut impl Rng) -> TimeSeries {
    TimeSeries::univariate((0..128).map(|_| r.random_range(-2.0..2.0)).collect()).unwrap()
}

#[test]
fn generated_samples_are_finite_and_sized() {
    let mut r = rng(32);
    let template = source(&mut r);
    for mode in [NoiseMode::RealPart, NoiseMode::Complex] {
        let config = SynthConfig { noise_mode: mode, ..Default::default() };
        for seed in 0..50 {
            let d = generate_sample_detailed(&template, &config, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            assert_eq!(d.series.shape(), (128, 1));
            assert!(d.series.values().iter().all(|v| v.is_finite()));
            assert!(d.trace.window_start <= 128 && d.trace.noise_offset <= 246);
            let changed = d.clean_spectrum.iter().zip(&d.noisy_spectrum).filter(|(a, b)| a != b).count();
            assert!(changed <= 10);
        }
    }
}

#[test]
fn clean_spectrum_is_the_transform_of_the_tiled_source() {
    let mut r = rng(33);
    let template = source(&mut r);
    let d = generate_sample_detailed(&template, &SynthConfig::default(), &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
    let tiled: Vec<Complex64> = d.tiled.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    for (a, b) in d.clean_spectrum.iter().zip(naive_dft(&tiled, false)) {
        assert!((a - b).norm() < 1e-9);
    }
    // a signal of period 128 has energy only in even bins
    for (k, v) in d.clean_spectrum.iter().enumerate().filter(|(k, _)| k % 2 == 1) {
        assert!(v.norm() < 1e-9, "bin {k}");
    }
    let back = naive_dft(&d.noisy_spectrum, true);
    for (a, b) in back.iter().zip(&d.signal) {
        assert!((a.re - b).abs() < 1e-9);
    }
}

#[test]
fn noise_free_samples_are_displaced_copies() {
    let mut r = rng(34);
    let template = source(&mut r);
    let config = SynthConfig { noise: NoiseScale::StdDev(0.0), ..Default::default() };
    let dw = 127;
    let mut checked = 0;
    for seed in 0..40 {
        let d = generate_sample_detailed(&template, &config, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let clean = TimeSeries::univariate(d.tiled[..128].to_vec()).unwrap();
        // a window starting at s is matched by displacement k = s + 1
        if d.trace.window_start < dw || d.trace.window_start == 128 {
            let dist = dtwsubseq_distance(&d.series, &clean, dw, 4).unwrap();
            assert!(dist < 1e-9, "seed {seed}, start {}: {dist}", d.trace.window_start);
            checked += 1;
        }
    }
    assert!(checked > 30);
}

#[test]
fn dataset_generation_is_reproducible() {
    let config = SynthConfig { train_per_activity: 5, test_per_activity: 3, seed: 77, ..Default::default() };
    let sources = bundled_sources(4, 128);
    let a = generate_dataset(&config, &sources).unwrap();
    let b = generate_dataset(&config, &sources).unwrap();
    assert_eq!(a.train, b.train);
    assert_eq!(a.test, b.test);
    assert_eq!(a.manifest_text(&config, &[]), b.manifest_text(&config, &[]));
    let c = generate_dataset(&SynthConfig { seed: 78, ..config }, &sources).unwrap();
    assert_ne!(a.train, c.train);
    assert_eq!(a.manifest.len(), 32);
}

fn dataset_strategy() -> impl Strategy<Value = Dataset> {
    (1usize..6, 2usize..10, 1usize..4).prop_flat_map(|(n, m, p)| {
        prop::collection::vec(
            (prop::collection::vec(prop::num::f64::NORMAL | prop::num::f64::ZERO, m * p), 0u32..6),
            n,
        )
        .prop_map(move |rows| {
            let samples = rows
                .into_iter()
                .map(|(v, l)| LabeledSeries::new(TimeSeries::new(v, m, p).unwrap(), l))
                .collect();
            Dataset::with_default_names(samples).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn uci_layout_round_trips_bit_exactly(data in dataset_strategy()) {
        let dir = tempfile::tempdir().unwrap();
        let files = save_uci_layout(&data, dir.path(), "set").unwrap();
        let back = load_uci_layout(&files.signals, &files.labels, None, 0).unwrap();
        prop_assert_eq!(back.len(), data.len());
        for (a, b) in back.samples().iter().zip(data.samples()) {
            prop_assert_eq!(a.label, b.label);
            prop_assert_eq!(a.series.shape(), b.series.shape());
            for (x, y) in a.series.values().iter().zip(b.series.values()) {
                prop_assert_eq!(x.to_bits(), y.to_bits());
            }
        }
    }

    #[test]
    fn flat_filter_removes_only_samples_below_every_threshold(data in dataset_strategy(), q in 0.01..0.99f64) {
        let (kept, report) = remove_flat_curves(&data, q).unwrap();
        prop_assert_eq!(kept.len() + report.removed.len(), data.len());
        let dim = data.shape().unwrap().1;
        for d in 0..dim {
            let column: Vec<f64> = data.samples().iter().map(|s| s.series.ranges()[d]).collect();
            prop_assert_eq!(report.thresholds[d], quantile(&column, q));
        }
        for (i, s) in data.samples().iter().enumerate() {
            let flat = s.series.ranges().iter().zip(&report.thresholds).all(|(r, t)| r <= t);
            prop_assert_eq!(flat, report.removed.contains(&i));
        }
        // at most the samples at or below the quantile in the first dimension
        let n = data.len();
        prop_assert!(report.removed.len() <= ((n - 1) as f64 * q).floor() as usize + 1 + count_ties(&data, &report.thresholds));
    }
}

/// Samples whose first-dimension range equals the threshold exactly; ties can
/// push the removed count past the order-statistic bound.
fn count_ties(data: &Dataset, thresholds: &[f64]) -> usize {
    data.samples().iter().filter(|s| s.series.ranges()[0] == thresholds[0]).count()
}
