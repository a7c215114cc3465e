//! Subcommand implementations.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use super::{BenchArgs, CliError, DataArgs, Layers, ModelArgs, SynthArgs};
use crate::classify::pipeline::header;
use crate::classify::{predict as classify, train_pipeline, PipelineConfig, PipelineModel};
use crate::dtw::{DistanceKind, DtwParams};
use crate::error::Error;
use crate::flat::{remove_flat_curves, FlatCurveReport};
use crate::series::{Dataset, TimeSeries};
use crate::synth::{bundled_sources, generate_dataset, sources_from_templates, NoiseMode, NoiseScale, SynthConfig};
use crate::template::{cluster_activities, templates_from_text, AveragingMethod};
use crate::uci::{load_uci_layout, save_uci_layout, UciFiles};

type CliResult<T = ()> = Result<T, CliError>;

/// Activities drawn from real templates when generating synthetic data.
const SYNTH_ACTIVITIES: [u32; 4] = [0, 1, 2, 3];

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn write(path: &Path, content: &str) -> CliResult {
    fs::write(path, content).map_err(|e| Error::io(path, e).into())
}

fn create_dir(dir: &Path) -> CliResult {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e).into())
}

fn check_quantile(q: Option<f64>) -> CliResult<Option<f64>> {
    match q {
        Some(q) if !(q > 0.0 && q < 1.0) => Err(usage(format!("--flat-quantile must lie in (0, 1), got {q}"))),
        _ => Ok(q),
    }
}

/// A loaded dataset and the settings that located it.
struct Loaded {
    data: Dataset,
    flat: Option<FlatCurveReport>,
    echo: Vec<String>,
}

/// Channel count of a `<stem>_c<k>.txt` layout, found by probing files.
fn detect_channels(dir: &Path, stem: &str) -> usize {
    (0..).take_while(|c| dir.join(format!("{stem}_c{c}.txt")).is_file()).count()
}

fn load_data(layers: &Layers, args: &DataArgs, default_stem: &str) -> CliResult<Loaded> {
    let label_base = layers.or(args.label_base, "label_base", 0u32)?;
    let quantile = check_quantile(layers.get(args.flat_quantile, "flat_quantile")?)?;
    let mut echo = Vec::new();

    let data = if !args.signals.is_empty() {
        let labels = args
            .labels
            .as_deref()
            .ok_or_else(|| usage("--labels is required with --signals"))?;
        let joined: Vec<String> = args.signals.iter().map(|p| p.display().to_string()).collect();
        echo.push(format!("signals = {}", joined.join(",")));
        echo.push(format!("labels = {}", labels.display()));
        if let Some(s) = &args.subjects {
            echo.push(format!("subjects = {}", s.display()));
        }
        load_uci_layout(&args.signals, labels, args.subjects.as_deref(), label_base)?
    } else {
        let dir: PathBuf = layers.required(args.data.clone(), "data", "(or --signals and --labels)")?;
        let stem = layers.or(args.stem.clone(), "stem", default_stem.to_string())?;
        let channels = detect_channels(&dir, &stem);
        if channels == 0 {
            return Err(Error::Domain(format!("no {stem}_c0.txt signal file in {}", dir.display())).into());
        }
        let files = UciFiles::in_dir(&dir, &stem, channels, false);
        let subjects = dir.join(format!("{stem}_subjects.txt"));
        let files = UciFiles {
            subjects: subjects.is_file().then_some(subjects),
            ..files
        };
        echo.push(format!("data = {}", dir.display()));
        echo.push(format!("stem = {stem}"));
        files.load(label_base)?
    };
    echo.push(format!("label_base = {label_base}"));
    log::info!("loaded {} samples, shape {:?}", data.len(), data.shape());

    let flat = match quantile {
        Some(q) => {
            echo.push(format!("flat_quantile = {q}"));
            let (_, report) = remove_flat_curves(&data, q)?;
            log::info!("flat-curve filter at q = {q}: {} samples flagged", report.removed.len());
            Some(report)
        }
        None => None,
    };
    Ok(Loaded { data, flat, echo })
}

impl Loaded {
    /// The dataset with flagged flat samples removed.
    fn filtered(&self) -> Dataset {
        match &self.flat {
            Some(report) => {
                let keep: Vec<usize> = (0..self.data.len()).filter(|i| report.removed.binary_search(i).is_err()).collect();
                self.data.subset(&keep)
            }
            None => self.data.clone(),
        }
    }
}

fn pipeline_config(layers: &Layers, args: &ModelArgs) -> CliResult<PipelineConfig> {
    let kind: DistanceKind = layers
        .or(args.distance.clone(), "distance", "dtw".to_string())?
        .parse()
        .map_err(|e: Error| usage(e.to_string()))?;
    let method: AveragingMethod = layers
        .or(args.averaging.clone(), "averaging", "dpa".to_string())?
        .parse()
        .map_err(|e: Error| usage(e.to_string()))?;
    let cut = layers.or(args.cut, "cut", 0.25)?;
    if !(cut > 0.0 && cut <= 1.0) {
        return Err(usage(format!("--cut must lie in (0, 1], got {cut}")));
    }
    let bw = layers.or(args.bw, "bw", 8)?;
    let dw = match kind {
        DistanceKind::DtwSubseq => {
            let dw = layers.required(args.dw, "dw", "for --distance dtwsubseq")?;
            if dw == 0 {
                return Err(usage("--dw must be at least 1"));
            }
            dw
        }
        // unused by plain DTW
        DistanceKind::Dtw => layers.or(args.dw, "dw", 0)?,
    };
    let mut config = PipelineConfig::new(kind, method, cut, DtwParams::new(bw, dw));
    config.pca_variance = layers.or(args.pca_variance, "pca_variance", config.pca_variance)?;
    if !(config.pca_variance > 0.0 && config.pca_variance <= 1.0) {
        return Err(usage("--pca-variance must lie in (0, 1]"));
    }
    config.svm.c = layers.or(args.svm_c, "svm_c", config.svm.c)?;
    config.svm.epochs = layers.or(args.svm_epochs, "svm_epochs", config.svm.epochs)?;
    config.svm.tolerance = layers.or(args.svm_tol, "svm_tol", config.svm.tolerance)?;
    if !(config.svm.c > 0.0) || config.svm.epochs == 0 {
        return Err(usage("--svm-c must be positive and --svm-epochs at least 1"));
    }
    config.dba.max_iters = layers.or(args.dba_max_iters, "dba_max_iters", config.dba.max_iters)?;
    config.dba.tol = layers.or(args.dba_tol, "dba_tol", config.dba.tol)?;
    config.seed = layers.or(args.seed, "seed", 0)?;
    config.svm.seed = config.seed;
    Ok(config)
}

/// Rejects a displacement window the data cannot support before any work starts.
fn check_params(config: &PipelineConfig, data: &Dataset) -> CliResult {
    if let (DistanceKind::DtwSubseq, Some((m, _))) = (config.kind, data.shape()) {
        config
            .params
            .check_window(m)
            .map_err(|e| usage(e.to_string()))?;
    }
    Ok(())
}

pub fn cluster(layers: &Layers, data: &DataArgs, model: &ModelArgs, out: Option<PathBuf>) -> CliResult {
    let out: PathBuf = layers.required(out, "out", "")?;
    let config = pipeline_config(layers, model)?;
    let loaded = load_data(layers, data, "train")?;
    let train = loaded.filtered();
    check_params(&config, &train)?;
    let echo: Vec<String> = [
        format!("distance = {}", config.kind),
        format!("cut = {}", config.cut),
        format!("bw = {}", config.params.bandwidth),
        format!("dw = {}", config.params.window),
    ]
    .into_iter()
    .chain(loaded.echo.iter().cloned())
    .collect();

    create_dir(&out)?;
    let clusters = cluster_activities(&train, config.params, config.kind, config.cut)?;
    for ac in &clusters {
        let label = ac.set.label;
        let mut dist = header("distances", &echo);
        dist.push_str(&format!("# activity {label}; rows and columns follow clusters_{label}.txt order\n"));
        dist.push_str(&ac.distances.to_text());
        write(&out.join(format!("distances_{label}.txt")), &dist)?;

        let mut assign = header("clusters", &echo);
        assign.push_str(&format!(
            "# activity {label}: {} clusters, threshold {}, max distance {}\n",
            ac.set.partition.len(),
            ac.set.partition.threshold,
            ac.set.partition.max_distance
        ));
        assign.push_str("# dataset_index cluster\n");
        assign.push_str(&ac.set.to_text());
        write(&out.join(format!("clusters_{label}.txt")), &assign)?;
    }
    log::info!("wrote {} activities to {}", clusters.len(), out.display());
    Ok(())
}

pub fn train(layers: &Layers, data: &DataArgs, model: &ModelArgs, out: Option<PathBuf>) -> CliResult {
    let out: PathBuf = layers.required(out, "out", "")?;
    let config = pipeline_config(layers, model)?;
    let loaded = load_data(layers, data, "train")?;
    let train = loaded.filtered();
    check_params(&config, &train)?;
    let start = Instant::now();
    let trained = train_pipeline(&train, config)?;
    trained.save(&out)?;
    log::info!(
        "trained {} templates in {:.1?}; bundle written to {}",
        trained.model.templates.len(),
        start.elapsed(),
        out.display()
    );
    Ok(())
}

pub fn predict(layers: &Layers, model: Option<PathBuf>, data: &DataArgs, out: Option<PathBuf>) -> CliResult {
    let model_dir: PathBuf = layers.required(model, "model", "")?;
    let out: PathBuf = layers.required(out, "out", "")?;
    let loaded = load_data(layers, data, "test")?;
    let model = PipelineModel::load(&model_dir)?;
    let prediction = classify(&model, &loaded.data)?;

    let mut preamble = model.config.echo();
    preamble.push(format!("model = {}", model_dir.display()));
    preamble.extend(loaded.echo.iter().cloned());
    let mut text = prediction.to_text(&preamble);
    if let Some(report) = &loaded.flat {
        let kept: Vec<usize> = (0..loaded.data.len()).filter(|i| report.removed.binary_search(i).is_err()).collect();
        let hits = kept
            .iter()
            .filter(|&&i| prediction.actual[i] == prediction.predicted[i])
            .count();
        text.push_str(&format!("flat_removed {}\n", report.removed.len()));
        if !kept.is_empty() {
            text.push_str(&format!("accuracy_without_flat {}\n", hits as f64 / kept.len() as f64));
        }
    }
    write(&out, &text)?;
    log::info!("accuracy {:.4} on {} samples", prediction.accuracy, prediction.actual.len());
    if let Some(m) = prediction.merged_static_accuracy {
        log::info!("merged-static accuracy {m:.4}");
    }
    Ok(())
}

fn synth_config(layers: &Layers, args: &SynthArgs) -> CliResult<SynthConfig> {
    let d = SynthConfig::default();
    let noise = match layers.get(args.noise_std, "noise_std")? {
        Some(s) => NoiseScale::StdDev(s),
        None => NoiseScale::Variance(layers.or(args.noise_variance, "noise_variance", 5.0)?),
    };
    let noise_mode = match layers.or(args.noise_mode.clone(), "noise_mode", "real".to_string())?.as_str() {
        "real" => NoiseMode::RealPart,
        "complex" => NoiseMode::Complex,
        other => return Err(usage(format!("--noise-mode must be real or complex, got {other:?}"))),
    };
    let config = SynthConfig {
        train_per_activity: layers.or(args.train_per_activity, "train_per_activity", d.train_per_activity)?,
        test_per_activity: layers.or(args.test_per_activity, "test_per_activity", d.test_per_activity)?,
        fft_len: layers.or(args.fft_len, "fft_len", d.fft_len)?,
        noise_len: layers.or(args.noise_len, "noise_len", d.noise_len)?,
        noise,
        noise_mode,
        length: layers.or(args.length, "length", d.length)?,
        seed: layers.or(args.seed, "seed", d.seed)?,
    };
    config.validate().map_err(|e| usage(e.to_string()))?;
    Ok(config)
}

pub fn synth(layers: &Layers, args: &SynthArgs) -> CliResult {
    let out: PathBuf = layers.required(args.out.clone(), "out", "")?;
    let config = synth_config(layers, args)?;
    let (sources, source_echo) = match layers.get(args.sources.clone(), "sources")? {
        Some(path) => {
            let path: PathBuf = path;
            let channel = layers.or(args.source_channel, "source_channel", 0usize)?;
            let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            let templates = templates_from_text(&path, &text)?;
            let sources = sources_from_templates(&templates, channel, Some(&SYNTH_ACTIVITIES), &BTreeMap::new())?;
            (sources, vec![format!("sources = {}", path.display()), format!("source_channel = {channel}")])
        }
        None => {
            let subjects = layers.or(args.subjects, "subjects", 4usize)?;
            (bundled_sources(subjects, config.length), vec![format!("sources = bundled"), format!("subjects = {subjects}")])
        }
    };
    let generated = generate_dataset(&config, &sources)?;
    create_dir(&out)?;
    save_uci_layout(&generated.train, &out, "train")?;
    save_uci_layout(&generated.test, &out, "test")?;
    write(&out.join("manifest.txt"), &generated.manifest_text(&config, &source_echo))?;
    log::info!(
        "wrote {} training and {} test samples to {}",
        generated.train.len(),
        generated.test.len(),
        out.display()
    );
    Ok(())
}

pub fn bench(layers: &Layers, args: &BenchArgs) -> CliResult {
    let model = ModelArgs {
        distance: Some("dtwsubseq".into()),
        bw: args.bw,
        dw: args.dw,
        seed: args.seed,
        ..Default::default()
    };
    let base = pipeline_config(layers, &model)?;
    let cuts = if args.cuts.is_empty() { vec![0.25, 0.5] } else { args.cuts.clone() };
    if let Some(c) = cuts.iter().find(|&&c| !(c > 0.0 && c <= 1.0)) {
        return Err(usage(format!("cuts must lie in (0, 1], got {c}")));
    }

    let mut echo = vec![
        format!("cuts = {}", cuts.iter().map(f64::to_string).collect::<Vec<_>>().join(",")),
        format!("bw = {}", base.params.bandwidth),
        format!("dw = {}", base.params.window),
        format!("seed = {}", base.seed),
    ];
    let (train, test) = match layers.get(args.data.clone(), "data")? {
        Some(dir) => {
            let dir: PathBuf = dir;
            let data_args = |stem: &str| DataArgs {
                data: Some(dir.clone()),
                stem: Some(stem.to_string()),
                label_base: args.label_base,
                flat_quantile: args.flat_quantile,
                ..Default::default()
            };
            let train = load_data(layers, &data_args("train"), "train")?;
            let test = load_data(layers, &data_args("test"), "test")?;
            echo.extend(train.echo.iter().cloned());
            (train.filtered(), test.data)
        }
        None => {
            let config = SynthConfig {
                train_per_activity: layers.or(args.train_per_activity, "train_per_activity", 200)?,
                test_per_activity: layers.or(args.test_per_activity, "test_per_activity", 50)?,
                seed: base.seed,
                ..Default::default()
            };
            echo.push("data = synthetic, bundled sources, 4 subjects".to_string());
            echo.extend(config.echo());
            let generated = generate_dataset(&config, &bundled_sources(4, config.length))?;
            (generated.train, generated.test)
        }
    };
    check_params(&base, &train)?;

    let mut table = header("bench", &echo);
    table.push_str("# cut distance averaging accuracy\n");
    for &cut in &cuts {
        for kind in [DistanceKind::Dtw, DistanceKind::DtwSubseq] {
            for method in [AveragingMethod::Dpa, AveragingMethod::Dba] {
                let config = PipelineConfig { kind, method, cut, ..base };
                let start = Instant::now();
                let trained = train_pipeline(&train, config)?;
                let p = classify(&trained.model, &test)?;
                log::info!("cut {cut} {kind} {method}: accuracy {:.4} ({:.1?})", p.accuracy, start.elapsed());
                let mut row = format!("{cut} {kind} {method} {:.4}", p.accuracy);
                if let Some(m) = p.merged_static_accuracy {
                    row.push_str(&format!(" merged_static={m:.4}"));
                }
                table.push_str(&row);
                table.push('\n');
            }
        }
    }
    match layers.get(args.out.clone(), "out")? {
        Some(path) => {
            let path: PathBuf = path;
            write(&path, &table)
        }
        None => {
            print!("{table}");
            Ok(())
        }
    }
}

fn plot_text(echo: &[String], series: &TimeSeries, dim: usize) -> String {
    let mut out = header("plot", echo);
    out.push_str(&format!("# dimension {dim}\n# index value\n"));
    for (t, v) in series.channel(dim).into_iter().enumerate() {
        out.push_str(&format!("{t} {v}\n"));
    }
    out
}

pub fn export(
    layers: &Layers,
    templates: Option<PathBuf>,
    data: &DataArgs,
    limit: Option<usize>,
    out: Option<PathBuf>,
) -> CliResult {
    let out: PathBuf = layers.required(out, "out", "")?;
    let limit = layers.get(limit, "limit")?.unwrap_or(usize::MAX);
    let (prefix, echo, items): (&str, Vec<String>, Vec<(u32, TimeSeries)>) = match templates {
        Some(path) => {
            let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            let t = templates_from_text(&path, &text)?;
            let echo = vec![format!("templates = {}", path.display())];
            ("template", echo, t.into_iter().map(|t| (t.label, t.series)).collect())
        }
        None => {
            let loaded = load_data(layers, data, "train")?;
            let items = loaded.data.samples().iter().map(|s| (s.label, s.series.clone())).collect();
            ("sample", loaded.echo, items)
        }
    };
    create_dir(&out)?;
    let mut written = 0;
    for (i, (label, series)) in items.iter().enumerate().take(limit) {
        for d in 0..series.dim() {
            let name = format!("{prefix}_{i}_label{label}_d{d}.txt");
            write(&out.join(name), &plot_text(&echo, series, d))?;
            written += 1;
        }
    }
    log::info!("wrote {written} plot files to {}", out.display());
    Ok(())
}
