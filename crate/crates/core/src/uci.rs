//! Reading and writing datasets in the UCI HAR "Inertial Signals" layout.
//!
//! Each channel lives in its own whitespace-separated text file with one
//! window per row and one reading per column. A parallel label file holds
//! one integer per row. Optionally a subject file of the same shape as the
//! label file tags each row with its subject.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::series::{Dataset, Label, LabeledSeries, TimeSeries};

/// Formats a float with 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Parses a whitespace-separated numeric matrix. Blank lines are skipped.
/// When `columns` is given every row must have exactly that many entries,
/// otherwise every row must match the first one.
pub fn parse_matrix(path: &Path, text: &str, columns: Option<usize>) -> Result<Vec<Vec<f64>>> {
    let mut rows = Vec::new();
    let mut width = columns;
    for (lineno, line) in text.lines().enumerate() {
        let lineno = lineno + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for (col, token) in line.split_whitespace().enumerate() {
            let v: f64 = token
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| Error::Parse {
                    path: path.to_path_buf(),
                    line: lineno,
                    column: col + 1,
                    token: token.to_string(),
                })?;
            row.push(v);
        }
        match width {
            Some(w) if w != row.len() => {
                return Err(Error::format(
                    path,
                    lineno,
                    format!("expected {w} columns, found {}", row.len()),
                ));
            }
            None => width = Some(row.len()),
            _ => {}
        }
        rows.push(row);
    }
    Ok(rows)
}

fn parse_integers(path: &Path, text: &str) -> Result<Vec<u32>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let v = trimmed.parse::<u32>().map_err(|_| Error::Parse {
            path: path.to_path_buf(),
            line: lineno + 1,
            column: 1,
            token: trimmed.to_string(),
        })?;
        out.push(v);
    }
    Ok(out)
}

/// Loads a dataset whose channel `c` comes from `signal_paths[c]`.
///
/// `label_base` is subtracted from every label so that the 1-based label
/// files shipped with the UCI data map onto labels starting at 0.
pub fn load_uci_layout<P: AsRef<Path>>(
    signal_paths: &[P],
    label_path: &Path,
    subject_path: Option<&Path>,
    label_base: u32,
) -> Result<Dataset> {
    if signal_paths.is_empty() {
        return Err(Error::domain("at least one signal file is required"));
    }
    let mut channels = Vec::with_capacity(signal_paths.len());
    let mut columns = None;
    for path in signal_paths {
        let path = path.as_ref();
        let rows = parse_matrix(path, &read_text(path)?, columns)?;
        if let Some(first) = rows.first() {
            columns = Some(first.len());
        }
        channels.push((path.to_path_buf(), rows));
    }
    let n = channels[0].1.len();
    for (path, rows) in &channels {
        if rows.len() != n {
            return Err(Error::Consistency(format!(
                "{} has {} rows, {} has {n}",
                path.display(),
                rows.len(),
                channels[0].0.display()
            )));
        }
    }

    let raw_labels = parse_integers(label_path, &read_text(label_path)?)?;
    if raw_labels.len() != n {
        return Err(Error::Consistency(format!(
            "label file {} has {} rows, signal files have {n}",
            label_path.display(),
            raw_labels.len()
        )));
    }
    let mut labels: Vec<Label> = Vec::with_capacity(n);
    for (i, &l) in raw_labels.iter().enumerate() {
        let shifted = l.checked_sub(label_base).ok_or_else(|| {
            Error::format(label_path, i + 1, format!("label {l} below base {label_base}"))
        })?;
        labels.push(shifted);
    }

    let subjects = match subject_path {
        Some(path) => {
            let s = parse_integers(path, &read_text(path)?)?;
            if s.len() != n {
                return Err(Error::Consistency(format!(
                    "subject file {} has {} rows, signal files have {n}",
                    path.display(),
                    s.len()
                )));
            }
            Some(s)
        }
        None => None,
    };

    let m = columns.unwrap_or(0);
    let mut samples = Vec::with_capacity(n);
    for i in 0..n {
        let mut values = Vec::with_capacity(m * channels.len());
        for t in 0..m {
            values.extend(channels.iter().map(|(_, rows)| rows[i][t]));
        }
        let series = TimeSeries::new(values, m, channels.len()).map_err(|e| {
            Error::format(&channels[0].0, i + 1, e.to_string())
        })?;
        samples.push(LabeledSeries {
            series,
            label: labels[i],
            subject: subjects.as_ref().map(|s| s[i]),
        });
    }
    Dataset::with_default_names(samples)
}

/// File names used by [`save_uci_layout`].
#[derive(Clone, Debug)]
pub struct UciFiles {
    pub signals: Vec<PathBuf>,
    pub labels: PathBuf,
    pub subjects: Option<PathBuf>,
}

impl UciFiles {
    /// `<dir>/<stem>_c<k>.txt` per channel, `<dir>/<stem>_labels.txt`
    /// and, when requested, `<dir>/<stem>_subjects.txt`.
    pub fn in_dir(dir: &Path, stem: &str, channels: usize, subjects: bool) -> Self {
        Self {
            signals: (0..channels)
                .map(|c| dir.join(format!("{stem}_c{c}.txt")))
                .collect(),
            labels: dir.join(format!("{stem}_labels.txt")),
            subjects: subjects.then(|| dir.join(format!("{stem}_subjects.txt"))),
        }
    }

    pub fn load(&self, label_base: u32) -> Result<Dataset> {
        load_uci_layout(&self.signals, &self.labels, self.subjects.as_deref(), label_base)
    }
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(content.as_bytes()).map_err(|e| Error::io(path, e))
}

/// Writes `data` in the UCI layout under `dir`, creating it if needed.
pub fn save_uci_layout(data: &Dataset, dir: &Path, stem: &str) -> Result<UciFiles> {
    let (_, dim) = data
        .shape()
        .ok_or_else(|| Error::domain("cannot write an empty dataset"))?;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let has_subjects = data.samples().iter().all(|s| s.subject.is_some());
    let files = UciFiles::in_dir(dir, stem, dim, has_subjects);

    for (c, path) in files.signals.iter().enumerate() {
        let mut out = String::new();
        for s in data.samples() {
            let row: Vec<String> = s.series.channel(c).into_iter().map(fmt_f64).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        write_file(path, &out)?;
    }
    let labels: String = data
        .samples()
        .iter()
        .map(|s| format!("{}\n", s.label))
        .collect();
    write_file(&files.labels, &labels)?;
    if let Some(path) = &files.subjects {
        let subjects: String = data
            .samples()
            .iter()
            .map(|s| format!("{}\n", s.subject.unwrap_or_default()))
            .collect();
        write_file(path, &subjects)?;
    }
    Ok(files)
}
