//! Cluster averaging: DTW pointwise averaging (DPA) and DTW barycenter
//! averaging (DBA), plus the template-set text format.
//!
//! Both methods associate coordinates with plain DTW (not the subsequence
//! variant) so that averages keep the input length.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cluster::{complete_linkage_cluster, pairwise_distances, ClusterSet, PairwiseDistances};
use crate::dtw::{self, DistanceKind, DtwParams, WarpingPath};
use crate::error::{Error, Result};
use crate::series::{Dataset, Label, TimeSeries};
use crate::uci::{fmt_f64, parse_matrix};

pub const TEMPLATE_FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AveragingMethod {
    Dpa,
    Dba,
}

impl AveragingMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            AveragingMethod::Dpa => "dpa",
            AveragingMethod::Dba => "dba",
        }
    }
}

impl fmt::Display for AveragingMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AveragingMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dpa" => Ok(AveragingMethod::Dpa),
            "dba" => Ok(AveragingMethod::Dba),
            other => Err(Error::domain(format!("unknown averaging method {other:?}"))),
        }
    }
}

/// How a template was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Dpa { cluster_size: usize, medoid: usize },
    Dba { cluster_size: usize, init: usize, iterations: usize },
}

impl Provenance {
    pub fn method(&self) -> AveragingMethod {
        match self {
            Provenance::Dpa { .. } => AveragingMethod::Dpa,
            Provenance::Dba { .. } => AveragingMethod::Dba,
        }
    }

    pub fn cluster_size(&self) -> usize {
        match *self {
            Provenance::Dpa { cluster_size, .. } | Provenance::Dba { cluster_size, .. } => cluster_size,
        }
    }

    /// Replaces cluster-local indices with the given source indices.
    fn remap(self, source: &[usize]) -> Self {
        match self {
            Provenance::Dpa { cluster_size, medoid } => Provenance::Dpa {
                cluster_size,
                medoid: source[medoid],
            },
            Provenance::Dba { cluster_size, init, iterations } => Provenance::Dba {
                cluster_size,
                init: source[init],
                iterations,
            },
        }
    }
}

/// Averaged representative of one cluster.
#[derive(Clone, Debug, PartialEq)]
pub struct Template {
    pub series: TimeSeries,
    pub label: Label,
    pub provenance: Provenance,
}

impl Template {
    pub fn method(&self) -> AveragingMethod {
        self.provenance.method()
    }
}

/// Stopping rule for DBA.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DbaConfig {
    pub max_iters: usize,
    /// Stop once an iteration lowers the objective by at most this fraction.
    pub tol: f64,
}

impl Default for DbaConfig {
    fn default() -> Self {
        Self { max_iters: 10, tol: 1e-6 }
    }
}

/// Objective values visited by a DBA run.
#[derive(Clone, Debug, PartialEq)]
pub struct DbaTrace {
    /// Sum of squared DTW distances to the members, for the initial average
    /// and after every accepted update.
    pub objective: Vec<f64>,
    /// Index of the member used as the starting average.
    pub init: usize,
}

fn check_cluster(cluster: &[TimeSeries]) -> Result<()> {
    let first = cluster.first().ok_or_else(|| Error::domain("cluster is empty"))?;
    if cluster.iter().any(|s| s.shape() != first.shape()) {
        return Err(Error::domain("cluster members differ in shape"));
    }
    Ok(())
}

/// Member with the smallest summed distance to all members; lowest index on ties.
pub fn medoid(dists: &PairwiseDistances) -> usize {
    let n = dists.len();
    let mut best = (f64::INFINITY, 0);
    for i in 0..n {
        let total: f64 = (0..n).map(|j| dists.get(i, j)).sum();
        if total < best.0 {
            best = (total, i);
        }
    }
    best.1
}

fn pointwise_mean(series: &[TimeSeries]) -> TimeSeries {
    let (len, dim) = series[0].shape();
    let mut acc = vec![0.0; len * dim];
    for s in series {
        for (a, v) in acc.iter_mut().zip(s.values()) {
            *a += v;
        }
    }
    let k = series.len() as f64;
    acc.iter_mut().for_each(|a| *a /= k);
    TimeSeries::from_parts_unchecked(acc, len, dim)
}

fn dpa_with_distances(cluster: &[TimeSeries], dists: &PairwiseDistances, bw: usize, label: Label) -> Result<Template> {
    let center = medoid(dists);
    let reference = &cluster[center];
    let aligned = cluster
        .iter()
        .map(|x| dtw::align(reference, x, bw))
        .collect::<Result<Vec<_>>>()?;
    Ok(Template {
        series: pointwise_mean(&aligned),
        label,
        provenance: Provenance::Dpa {
            cluster_size: cluster.len(),
            medoid: center,
        },
    })
}

/// DTW pointwise averaging.
///
/// Picks the medoid under the `kind` distance, aligns every member to it with
/// plain DTW and returns the pointwise mean of the aligned members.
pub fn dpa_template(cluster: &[TimeSeries], params: DtwParams, kind: DistanceKind, label: Label) -> Result<Template> {
    check_cluster(cluster)?;
    let dists = pairwise_distances(cluster, params, kind)?;
    dpa_with_distances(cluster, &dists, params.bandwidth, label)
}

fn paths_to_members(average: &TimeSeries, cluster: &[TimeSeries], bw: usize) -> Result<(Vec<WarpingPath>, f64)> {
    let paths = cluster
        .iter()
        .map(|x| dtw::dtw_path(average, x, bw))
        .collect::<Result<Vec<_>>>()?;
    let objective = paths.iter().map(|p| p.cost * p.cost).sum();
    Ok((paths, objective))
}

/// Each average coordinate becomes the mean of the member points matched to it.
fn barycenter_update(cluster: &[TimeSeries], paths: &[WarpingPath], len: usize) -> TimeSeries {
    let dim = cluster[0].dim();
    let mut sums = vec![0.0; len * dim];
    let mut counts = vec![0usize; len];
    for (member, path) in cluster.iter().zip(paths) {
        for &(alpha, t) in &path.pairs {
            counts[alpha] += 1;
            for (acc, v) in sums[alpha * dim..(alpha + 1) * dim].iter_mut().zip(member.row(t)) {
                *acc += v;
            }
        }
    }
    for (alpha, &c) in counts.iter().enumerate() {
        for v in &mut sums[alpha * dim..(alpha + 1) * dim] {
            *v /= c as f64;
        }
    }
    TimeSeries::from_parts_unchecked(sums, len, dim)
}

/// DTW barycenter averaging from a random member.
///
/// The mean update is optimal for squared pointwise costs, while the
/// objective here sums squared DTW distances built from unsquared Euclidean
/// costs, so an update can occasionally raise it. Such an update is
/// discarded and the run stops, which keeps the objective non-increasing.
pub fn dba_template(
    cluster: &[TimeSeries],
    bw: usize,
    config: DbaConfig,
    rng: &mut impl Rng,
    label: Label,
) -> Result<(Template, DbaTrace)> {
    check_cluster(cluster)?;
    if config.max_iters == 0 {
        return Err(Error::domain("DBA needs at least one iteration"));
    }
    if !(config.tol >= 0.0) {
        return Err(Error::domain("DBA tolerance must be non-negative"));
    }
    let len = cluster[0].len();
    let init = rng.random_range(0..cluster.len());
    let mut average = cluster[init].clone();
    let (mut paths, mut objective) = paths_to_members(&average, cluster, bw)?;
    let mut trace = DbaTrace {
        objective: vec![objective],
        init,
    };
    let mut iterations = 0;
    while iterations < config.max_iters {
        let candidate = barycenter_update(cluster, &paths, len);
        let (next_paths, next_objective) = paths_to_members(&candidate, cluster, bw)?;
        if next_objective > objective {
            log::debug!("DBA update raised objective {objective} -> {next_objective}; stopping");
            break;
        }
        let decrease = objective - next_objective;
        let previous = objective;
        average = candidate;
        paths = next_paths;
        objective = next_objective;
        iterations += 1;
        trace.objective.push(objective);
        if decrease <= config.tol * previous {
            break;
        }
    }
    let template = Template {
        series: average,
        label,
        provenance: Provenance::Dba {
            cluster_size: cluster.len(),
            init,
            iterations,
        },
    };
    Ok((template, trace))
}

/// Distances and partition for one activity.
#[derive(Clone, Debug)]
pub struct ActivityClusters {
    pub set: ClusterSet,
    pub distances: PairwiseDistances,
}

/// Clusters the samples of every activity separately.
pub fn cluster_activities(data: &Dataset, params: DtwParams, kind: DistanceKind, cut: f64) -> Result<Vec<ActivityClusters>> {
    let mut out = Vec::new();
    for (label, members) in data.indices_by_label() {
        let series: Vec<TimeSeries> = members.iter().map(|&i| data.samples()[i].series.clone()).collect();
        let distances = pairwise_distances(&series, params, kind)?;
        let partition = complete_linkage_cluster(&distances, cut)?;
        log::info!(
            "activity {label}: {} samples, {} clusters (threshold {:.4})",
            members.len(),
            partition.len(),
            partition.threshold
        );
        out.push(ActivityClusters {
            set: ClusterSet { label, members, partition },
            distances,
        });
    }
    Ok(out)
}

/// RNG for the DBA run of one cluster: the base seed with a stream derived
/// from the activity and cluster index.
pub fn cluster_rng(seed: u64, label: Label, cluster: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((u64::from(label) << 32) | cluster as u64);
    rng
}

/// Template-building settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TemplateConfig {
    pub method: AveragingMethod,
    pub params: DtwParams,
    pub dba: DbaConfig,
    pub seed: u64,
}

/// One template per cluster, activity-major then cluster order.
/// Provenance indices refer to dataset positions.
pub fn build_templates(data: &Dataset, clusters: &[ActivityClusters], config: TemplateConfig) -> Result<Vec<Template>> {
    let jobs: Vec<(Label, usize, Vec<usize>, Vec<usize>)> = clusters
        .iter()
        .flat_map(|ac| {
            ac.set
                .partition
                .clusters
                .iter()
                .enumerate()
                .map(|(c, local)| {
                    let global: Vec<usize> = local.iter().map(|&i| ac.set.members[i]).collect();
                    (ac.set.label, c, local.clone(), global)
                })
                .collect::<Vec<_>>()
        })
        .collect();
    let by_label: BTreeMap<Label, &ActivityClusters> = clusters.iter().map(|ac| (ac.set.label, ac)).collect();

    jobs.par_iter()
        .map(|(label, c, local, global)| {
            let series: Vec<TimeSeries> = global.iter().map(|&i| data.samples()[i].series.clone()).collect();
            let template = match config.method {
                AveragingMethod::Dpa => {
                    let sub = by_label[label].distances.submatrix(local);
                    dpa_with_distances(&series, &sub, config.params.bandwidth, *label)?
                }
                AveragingMethod::Dba => {
                    let mut rng = cluster_rng(config.seed, *label, *c);
                    dba_template(&series, config.params.bandwidth, config.dba, &mut rng, *label)?.0
                }
            };
            Ok(Template {
                provenance: template.provenance.remap(global),
                ..template
            })
        })
        .collect()
}

fn header_line(t: &Template) -> String {
    let (m, p) = t.series.shape();
    let prov = match t.provenance {
        Provenance::Dpa { cluster_size, medoid } => format!("cluster_size={cluster_size} medoid={medoid}"),
        Provenance::Dba { cluster_size, init, iterations } => {
            format!("cluster_size={cluster_size} init={init} iterations={iterations}")
        }
    };
    format!(
        "template version={TEMPLATE_FORMAT_VERSION} m={m} p={p} label={} method={} {prov}",
        t.label,
        t.method()
    )
}

/// Serializes a template set. `preamble` lines are written first as `#` comments.
pub fn templates_to_text(templates: &[Template], preamble: &[String]) -> String {
    let mut out = format!("# dtwhar templates v{TEMPLATE_FORMAT_VERSION}\n");
    for line in preamble {
        out.push_str("# ");
        out.push_str(line);
        out.push('\n');
    }
    for t in templates {
        out.push_str(&header_line(t));
        out.push('\n');
        for s in 0..t.series.len() {
            let row: Vec<String> = t.series.row(s).iter().map(|&v| fmt_f64(v)).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out.push_str("---\n");
    }
    out
}

fn parse_header(path: &Path, lineno: usize, line: &str) -> Result<(usize, usize, Label, Provenance)> {
    let fields: BTreeMap<&str, &str> = line
        .split_whitespace()
        .skip(1)
        .filter_map(|kv| kv.split_once('='))
        .collect();
    let get = |key: &str| -> Result<usize> {
        fields
            .get(key)
            .ok_or_else(|| Error::format(path, lineno, format!("missing field {key}")))?
            .parse()
            .map_err(|_| Error::format(path, lineno, format!("field {key} is not an integer")))
    };
    let version = get("version")?;
    if version != TEMPLATE_FORMAT_VERSION as usize {
        return Err(Error::format(path, lineno, format!("unsupported template version {version}")));
    }
    let method: AveragingMethod = fields
        .get("method")
        .ok_or_else(|| Error::format(path, lineno, "missing field method"))?
        .parse()
        .map_err(|e: Error| Error::format(path, lineno, e.to_string()))?;
    let cluster_size = get("cluster_size")?;
    let provenance = match method {
        AveragingMethod::Dpa => Provenance::Dpa { cluster_size, medoid: get("medoid")? },
        AveragingMethod::Dba => Provenance::Dba {
            cluster_size,
            init: get("init")?,
            iterations: get("iterations")?,
        },
    };
    Ok((get("m")?, get("p")?, get("label")? as Label, provenance))
}

/// Parses the output of [`templates_to_text`].
pub fn templates_from_text(path: &Path, text: &str) -> Result<Vec<Template>> {
    let lines: Vec<&str> = text.lines().collect();
    let mut templates = Vec::new();
    let mut i = 0;
    while i < lines.len() {
        let line = lines[i].trim();
        if line.is_empty() || line.starts_with('#') || line == "---" {
            i += 1;
            continue;
        }
        if !line.starts_with("template ") {
            return Err(Error::format(path, i + 1, "expected a template header"));
        }
        let (m, p, label, provenance) = parse_header(path, i + 1, line)?;
        if i + 1 + m > lines.len() {
            return Err(Error::format(path, i + 1, format!("template declares {m} rows but the file ends early")));
        }
        let body = lines[i + 1..i + 1 + m].join("\n");
        let rows = parse_matrix(path, &body, Some(p)).map_err(|e| match e {
            Error::Format { line, msg, .. } => Error::format(path, i + 1 + line, msg),
            Error::Parse { line, column, token, .. } => Error::Parse {
                path: path.to_path_buf(),
                line: i + 1 + line,
                column,
                token,
            },
            other => other,
        })?;
        if rows.len() != m {
            return Err(Error::format(path, i + 1, format!("expected {m} rows, found {}", rows.len())));
        }
        let series = TimeSeries::from_rows(&rows).map_err(|e| Error::format(path, i + 1, e.to_string()))?;
        templates.push(Template { series, label, provenance });
        i += 1 + m;
    }
    Ok(templates)
}
