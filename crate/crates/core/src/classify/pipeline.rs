//! End-to-end training and prediction.
//!
//! Training clusters each activity, builds one template per cluster,
//! featurizes the training set by distance to every template, standardizes
//! the features, reduces them with PCA and fits the one-vs-rest SVM.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use crate::classify::features::{featurize_all, Standardizer};
use crate::classify::pca::{fit_pca, PcaModel};
use crate::classify::svm::{fit_svm, SvmConfig, SvmModel};
use crate::dtw::{DistanceKind, DtwParams};
use crate::error::{Error, Result};
use crate::series::{Dataset, Label, TimeSeries};
use crate::template::{
    build_templates, cluster_activities, templates_from_text, templates_to_text, ActivityClusters, AveragingMethod,
    DbaConfig, Template, TemplateConfig,
};
use crate::uci::fmt_f64;

pub const MODEL_FORMAT_VERSION: u32 = 1;

/// Labels merged into one "static" class when reporting merged-static accuracy.
pub const STATIC_LABELS: [Label; 3] = [3, 4, 5];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PipelineConfig {
    pub kind: DistanceKind,
    pub method: AveragingMethod,
    pub cut: f64,
    pub params: DtwParams,
    pub pca_variance: f64,
    pub svm: SvmConfig,
    pub dba: DbaConfig,
    pub seed: u64,
}

impl PipelineConfig {
    pub fn new(kind: DistanceKind, method: AveragingMethod, cut: f64, params: DtwParams) -> Self {
        Self {
            kind,
            method,
            cut,
            params,
            pca_variance: 0.95,
            svm: SvmConfig::default(),
            dba: DbaConfig::default(),
            seed: 0,
        }
    }

    /// `key = value` pairs describing every setting.
    pub fn to_pairs(&self) -> Vec<(String, String)> {
        [
            ("distance", self.kind.to_string()),
            ("averaging", self.method.to_string()),
            ("cut", self.cut.to_string()),
            ("bw", self.params.bandwidth.to_string()),
            ("dw", self.params.window.to_string()),
            ("pca_variance", self.pca_variance.to_string()),
            ("svm_c", self.svm.c.to_string()),
            ("svm_epochs", self.svm.epochs.to_string()),
            ("svm_tol", self.svm.tolerance.to_string()),
            ("dba_max_iters", self.dba.max_iters.to_string()),
            ("dba_tol", self.dba.tol.to_string()),
            ("seed", self.seed.to_string()),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
    }

    /// Inverse of [`PipelineConfig::to_pairs`]; unknown keys are ignored.
    pub fn from_pairs(pairs: &BTreeMap<String, String>) -> Result<Self> {
        fn get<T: std::str::FromStr>(pairs: &BTreeMap<String, String>, key: &str) -> Result<T> {
            pairs
                .get(key)
                .ok_or_else(|| Error::domain(format!("missing config key {key}")))?
                .parse()
                .map_err(|_| Error::domain(format!("invalid value for config key {key}")))
        }
        let seed = get(pairs, "seed")?;
        Ok(Self {
            kind: pairs
                .get("distance")
                .ok_or_else(|| Error::domain("missing config key distance"))?
                .parse()?,
            method: pairs
                .get("averaging")
                .ok_or_else(|| Error::domain("missing config key averaging"))?
                .parse()?,
            cut: get(pairs, "cut")?,
            params: DtwParams::new(get(pairs, "bw")?, get(pairs, "dw")?),
            pca_variance: get(pairs, "pca_variance")?,
            svm: SvmConfig {
                c: get(pairs, "svm_c")?,
                epochs: get(pairs, "svm_epochs")?,
                tolerance: get(pairs, "svm_tol")?,
                seed,
            },
            dba: DbaConfig {
                max_iters: get(pairs, "dba_max_iters")?,
                tol: get(pairs, "dba_tol")?,
            },
            seed,
        })
    }

    pub fn echo(&self) -> Vec<String> {
        self.to_pairs().into_iter().map(|(k, v)| format!("{k} = {v}")).collect()
    }
}

/// Everything needed to classify new series.
#[derive(Clone, Debug, PartialEq)]
pub struct PipelineModel {
    pub config: PipelineConfig,
    pub templates: Vec<Template>,
    pub scaler: Standardizer,
    pub pca: PcaModel,
    pub svm: SvmModel,
}

/// A trained model together with the intermediate stage results.
#[derive(Clone, Debug)]
pub struct TrainedPipeline {
    pub model: PipelineModel,
    pub clusters: Vec<ActivityClusters>,
    pub svm_objective: f64,
}

/// Runs clustering, template construction, featurization, PCA and SVM fitting.
pub fn train_pipeline(train: &Dataset, config: PipelineConfig) -> Result<TrainedPipeline> {
    train.check_trainable()?;
    let (m, _) = train.shape().expect("non-empty dataset");
    if config.kind == DistanceKind::DtwSubseq {
        config.params.check_window(m)?;
    }
    let clusters = cluster_activities(train, config.params, config.kind, config.cut)?;
    let templates = build_templates(
        train,
        &clusters,
        TemplateConfig {
            method: config.method,
            params: config.params,
            dba: config.dba,
            seed: config.seed,
        },
    )?;
    log::info!("built {} templates", templates.len());

    let series: Vec<TimeSeries> = train.samples().iter().map(|s| s.series.clone()).collect();
    let raw = featurize_all(&series, &templates, config.params, config.kind)?;
    let scaler = Standardizer::fit(&raw)?;
    let scaled: Vec<Vec<f64>> = raw.iter().map(|r| scaler.transform(r)).collect();
    let pca = fit_pca(&scaled, config.pca_variance)?;
    log::info!("PCA keeps {} of {} components", pca.retained(), pca.features());
    let projected: Vec<Vec<f64>> = scaled.iter().map(|r| pca.transform(r)).collect();
    let labels: Vec<Label> = train.samples().iter().map(|s| s.label).collect();
    let fit = fit_svm(&projected, &labels, SvmConfig { seed: config.seed, ..config.svm })?;
    log::info!("SVM objective {}", fit.objective);

    Ok(TrainedPipeline {
        model: PipelineModel {
            config,
            templates,
            scaler,
            pca,
            svm: fit.model,
        },
        clusters,
        svm_objective: fit.objective,
    })
}

impl PipelineModel {
    fn project(&self, raw: &[f64]) -> Vec<f64> {
        self.pca.transform(&self.scaler.transform(raw))
    }

    fn check_shape(&self, shape: (usize, usize)) -> Result<()> {
        let expected = self.templates[0].series.shape();
        if shape != expected {
            return Err(Error::domain(format!(
                "series shape {shape:?} does not match model shape {expected:?}"
            )));
        }
        Ok(())
    }

    /// Predicted label of one series.
    pub fn predict_series(&self, series: &TimeSeries) -> Result<Label> {
        self.check_shape(series.shape())?;
        let raw = crate::classify::features::featurize(series, &self.templates, self.config.params, self.config.kind)?;
        Ok(self.svm.predict(&self.project(&raw)))
    }

    /// Predicted labels for many series, featurized in parallel.
    pub fn predict_many(&self, series: &[TimeSeries]) -> Result<Vec<Label>> {
        for s in series {
            self.check_shape(s.shape())?;
        }
        let raw = featurize_all(series, &self.templates, self.config.params, self.config.kind)?;
        Ok(raw.iter().map(|r| self.svm.predict(&self.project(r))).collect())
    }

    /// Writes `templates.txt`, `pca.txt`, `svm.txt` and `config.txt` under `dir`.
    pub fn save(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let echo = self.config.echo();
        write(&dir.join("templates.txt"), &templates_to_text(&self.templates, &echo))?;
        write(&dir.join("pca.txt"), &self.pca_text(&echo))?;
        write(&dir.join("svm.txt"), &self.svm_text(&echo))?;
        let mut config = header("config", &echo);
        for line in &echo {
            config.push_str(line);
            config.push('\n');
        }
        write(&dir.join("config.txt"), &config)
    }

    fn pca_text(&self, echo: &[String]) -> String {
        let mut out = header("pca", echo);
        let join = |v: &[f64]| v.iter().map(|&x| fmt_f64(x)).collect::<Vec<_>>().join(" ");
        out.push_str(&format!("features {}\n", self.pca.features()));
        out.push_str(&format!("components {}\n", self.pca.retained()));
        out.push_str(&format!("total_variance {}\n", fmt_f64(self.pca.total_variance)));
        out.push_str(&format!("scale_mean {}\n", join(&self.scaler.mean)));
        out.push_str(&format!("scale_std {}\n", join(&self.scaler.std)));
        out.push_str(&format!("mean {}\n", join(&self.pca.mean)));
        out.push_str(&format!("variance {}\n", join(&self.pca.explained_variance)));
        for c in &self.pca.components {
            out.push_str(&format!("component {}\n", join(c)));
        }
        out
    }

    fn svm_text(&self, echo: &[String]) -> String {
        let mut out = header("svm", echo);
        out.push_str(&format!("dim {}\n", self.svm.dim()));
        out.push_str(&format!("c {}\n", fmt_f64(self.svm.c)));
        for ((class, w), b) in self.svm.classes.iter().zip(&self.svm.weights).zip(&self.svm.biases) {
            let w: Vec<String> = w.iter().map(|&x| fmt_f64(x)).collect();
            out.push_str(&format!("class {class} {} {}\n", fmt_f64(*b), w.join(" ")));
        }
        out
    }

    /// Reads a bundle written by [`PipelineModel::save`].
    pub fn load(dir: &Path) -> Result<Self> {
        let config_path = dir.join("config.txt");
        let config = PipelineConfig::from_pairs(&read_key_values(&config_path, &read(&config_path)?)?)?;

        let templates_path = dir.join("templates.txt");
        let templates = templates_from_text(&templates_path, &read(&templates_path)?)?;
        if templates.is_empty() {
            return Err(Error::format(&templates_path, 1, "bundle contains no templates"));
        }

        let pca_path = dir.join("pca.txt");
        let (scaler, pca) = parse_pca(&pca_path, &read(&pca_path)?)?;
        let svm_path = dir.join("svm.txt");
        let svm = parse_svm(&svm_path, &read(&svm_path)?)?;
        if pca.features() != templates.len() || svm.dim() != pca.retained() {
            return Err(Error::Consistency(format!(
                "bundle {} has {} templates, PCA {}→{}, SVM dimension {}",
                dir.display(),
                templates.len(),
                pca.features(),
                pca.retained(),
                svm.dim()
            )));
        }
        Ok(Self { config, templates, scaler, pca, svm })
    }
}

impl TrainedPipeline {
    /// Saves the model bundle plus per-activity cluster assignments.
    pub fn save(&self, dir: &Path) -> Result<()> {
        self.model.save(dir)?;
        let echo = self.model.config.echo();
        let mut out = header("clusters", &echo);
        out.push_str("# dataset_index activity cluster\n");
        for ac in &self.clusters {
            let assign = ac.set.partition.assignments();
            for (m, c) in ac.set.members.iter().zip(assign) {
                out.push_str(&format!("{m} {} {c}\n", ac.set.label));
            }
        }
        write(&dir.join("clusters.txt"), &out)
    }
}

/// First lines of every artifact: format name and version, then the config echo.
pub fn header(kind: &str, echo: &[String]) -> String {
    let mut out = format!("# dtwhar {kind} v{MODEL_FORMAT_VERSION}\n");
    for line in echo {
        out.push_str("# ");
        out.push_str(line);
        out.push('\n');
    }
    out
}

fn write(path: &Path, content: &str) -> Result<()> {
    fs::write(path, content).map_err(|e| Error::io(path, e))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Parses `key = value` lines, skipping blanks and `#` comments.
pub fn read_key_values(path: &Path, text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::format(path, i + 1, "expected key = value"))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

/// Non-comment lines split into a leading keyword and the remaining tokens.
fn keyed_lines(text: &str) -> impl Iterator<Item = (usize, &str, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            return None;
        }
        let mut tokens = line.split_whitespace();
        let key = tokens.next()?;
        Some((i + 1, key, tokens.collect()))
    })
}

fn floats(path: &Path, line: usize, tokens: &[&str]) -> Result<Vec<f64>> {
    tokens
        .iter()
        .enumerate()
        .map(|(c, t)| {
            t.parse::<f64>().map_err(|_| Error::Parse {
                path: path.to_path_buf(),
                line,
                column: c + 2,
                token: t.to_string(),
            })
        })
        .collect()
}

fn parse_pca(path: &Path, text: &str) -> Result<(Standardizer, PcaModel)> {
    let mut fields: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    let mut components = Vec::new();
    for (line, key, tokens) in keyed_lines(text) {
        let values = floats(path, line, &tokens)?;
        if key == "component" {
            components.push(values);
        } else {
            fields.insert(key, values);
        }
    }
    let mut take = |key: &str| {
        fields
            .remove(key)
            .ok_or_else(|| Error::format(path, 0, format!("missing {key} line")))
    };
    let features = take("features")?.first().copied().unwrap_or(0.0) as usize;
    let retained = take("components")?.first().copied().unwrap_or(0.0) as usize;
    let total_variance = take("total_variance")?.first().copied().unwrap_or(0.0);
    let scaler = Standardizer {
        mean: take("scale_mean")?,
        std: take("scale_std")?,
    };
    let pca = PcaModel {
        mean: take("mean")?,
        components,
        explained_variance: take("variance")?,
        total_variance,
    };
    let consistent = scaler.mean.len() == features
        && scaler.std.len() == features
        && pca.mean.len() == features
        && pca.components.len() == retained
        && pca.explained_variance.len() == retained
        && pca.components.iter().all(|c| c.len() == features);
    if !consistent {
        return Err(Error::format(path, 0, "PCA file fields disagree on dimensions"));
    }
    Ok((scaler, pca))
}

fn parse_svm(path: &Path, text: &str) -> Result<SvmModel> {
    let (mut dim, mut c) = (None, None);
    let (mut classes, mut weights, mut biases) = (Vec::new(), Vec::new(), Vec::new());
    for (line, key, tokens) in keyed_lines(text) {
        match key {
            "dim" => dim = floats(path, line, &tokens)?.first().map(|&d| d as usize),
            "c" => c = floats(path, line, &tokens)?.first().copied(),
            "class" => {
                let (label, rest) = tokens
                    .split_first()
                    .ok_or_else(|| Error::format(path, line, "class line without a label"))?;
                let label: Label = label
                    .parse()
                    .map_err(|_| Error::format(path, line, format!("invalid class label {label:?}")))?;
                let values = floats(path, line, rest)?;
                let (b, w) = values
                    .split_first()
                    .ok_or_else(|| Error::format(path, line, "class line without a bias"))?;
                classes.push(label);
                biases.push(*b);
                weights.push(w.to_vec());
            }
            other => return Err(Error::format(path, line, format!("unknown key {other:?}"))),
        }
    }
    let dim = dim.ok_or_else(|| Error::format(path, 0, "missing dim line"))?;
    let c = c.ok_or_else(|| Error::format(path, 0, "missing c line"))?;
    if classes.len() < 2 || weights.iter().any(|w| w.len() != dim) {
        return Err(Error::format(path, 0, "SVM file needs ≥ 2 classes with weights of length dim"));
    }
    Ok(SvmModel { classes, weights, biases, c })
}

/// Counts of (actual, predicted) pairs; rows are actual classes.
#[derive(Clone, Debug, PartialEq)]
pub struct ConfusionMatrix {
    pub classes: Vec<Label>,
    pub counts: Vec<Vec<usize>>,
}

impl ConfusionMatrix {
    pub fn new(actual: &[Label], predicted: &[Label], extra_classes: &[Label]) -> Self {
        let mut classes: Vec<Label> = actual.iter().chain(predicted).chain(extra_classes).copied().collect();
        classes.sort_unstable();
        classes.dedup();
        let index: BTreeMap<Label, usize> = classes.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let mut counts = vec![vec![0; classes.len()]; classes.len()];
        for (a, p) in actual.iter().zip(predicted) {
            counts[index[a]][index[p]] += 1;
        }
        Self { classes, counts }
    }

    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> usize {
        (0..self.classes.len()).map(|i| self.counts[i][i]).sum()
    }

    pub fn accuracy(&self) -> f64 {
        self.trace() as f64 / self.total() as f64
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("# confusion matrix: rows = actual, columns = predicted\n");
        let head: Vec<String> = self.classes.iter().map(|c| c.to_string()).collect();
        out.push_str(&format!("confusion {}\n", head.join(" ")));
        for (c, row) in self.classes.iter().zip(&self.counts) {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            out.push_str(&format!("{c} {}\n", cells.join(" ")));
        }
        out
    }
}

/// Per-sample predictions and summary statistics.
#[derive(Clone, Debug, PartialEq)]
pub struct Prediction {
    pub actual: Vec<Label>,
    pub predicted: Vec<Label>,
    pub confusion: ConfusionMatrix,
    pub accuracy: f64,
    /// Accuracy with the static activities collapsed, for six-class UCI models.
    pub merged_static_accuracy: Option<f64>,
}

fn merge_static(l: Label) -> Label {
    if STATIC_LABELS.contains(&l) { STATIC_LABELS[0] } else { l }
}

impl Prediction {
    pub fn new(actual: Vec<Label>, predicted: Vec<Label>, model_classes: &[Label]) -> Self {
        let confusion = ConfusionMatrix::new(&actual, &predicted, model_classes);
        let accuracy = confusion.accuracy();
        let merged_static_accuracy = (model_classes == [0, 1, 2, 3, 4, 5]).then(|| {
            let hits = actual
                .iter()
                .zip(&predicted)
                .filter(|(&a, &p)| merge_static(a) == merge_static(p))
                .count();
            hits as f64 / actual.len() as f64
        });
        Self {
            actual,
            predicted,
            confusion,
            accuracy,
            merged_static_accuracy,
        }
    }

    pub fn to_text(&self, preamble: &[String]) -> String {
        let mut out = header("predictions", preamble);
        out.push_str("# index actual predicted\n");
        for (i, (a, p)) in self.actual.iter().zip(&self.predicted).enumerate() {
            out.push_str(&format!("{i} {a} {p}\n"));
        }
        out.push_str(&self.confusion.to_text());
        out.push_str(&format!("accuracy {}\n", self.accuracy));
        if let Some(m) = self.merged_static_accuracy {
            out.push_str(&format!("merged_static_accuracy {m}\n"));
        }
        out
    }
}

/// Classifies every sample of `test` and summarizes the result.
pub fn predict(model: &PipelineModel, test: &Dataset) -> Result<Prediction> {
    if test.is_empty() {
        return Err(Error::domain("test set is empty"));
    }
    let series: Vec<TimeSeries> = test.samples().iter().map(|s| s.series.clone()).collect();
    let predicted = model.predict_many(&series)?;
    let actual = test.samples().iter().map(|s| s.label).collect();
    Ok(Prediction::new(actual, predicted, &model.svm.classes))
}

/// Default bundle file names.
pub fn bundle_files(dir: &Path) -> [PathBuf; 4] {
    ["templates.txt", "pca.txt", "svm.txt", "config.txt"].map(|f| dir.join(f))
}
