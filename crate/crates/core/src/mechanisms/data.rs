//! Binary classification datasets: loading, preprocessing, splitting and a
//! synthetic separable generator.

use std::path::Path;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DataFormat {
    Csv,
    Libsvm,
}

impl DataFormat {
    /// Guesses from the file extension; anything but `.csv` is read as libsvm.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => DataFormat::Csv,
            _ => DataFormat::Libsvm,
        }
    }
}

/// Dense features (row-major) with labels in `{-1, +1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    dim: usize,
    features: Vec<f64>,
    labels: Vec<f64>,
}

impl Dataset {
    pub fn new(rows: Vec<Vec<f64>>, labels: Vec<f64>) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(Error::input(format!(
                "{} feature rows but {} labels",
                rows.len(),
                labels.len()
            )));
        }
        let dim = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::input("feature rows have inconsistent length"));
        }
        if labels.iter().any(|&y| y != 1.0 && y != -1.0) {
            return Err(Error::input("labels must be -1 or +1"));
        }
        if rows.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::input("non-finite feature value"));
        }
        Ok(Self {
            dim,
            features: rows.into_iter().flatten().collect(),
            labels,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.dim..(i + 1) * self.dim]
    }

    pub fn label(&self, i: usize) -> f64 {
        self.labels[i]
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.features.chunks(self.dim.max(1)).take(self.len())
    }

    /// Scales every row with norm above 1 back onto the unit sphere.
    pub fn project_rows(mut self) -> Self {
        if self.dim == 0 {
            return self;
        }
        for row in self.features.chunks_mut(self.dim) {
            let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1.0 {
                row.iter_mut().for_each(|x| *x /= norm);
            }
        }
        self
    }

    fn select(&self, idx: &[usize]) -> Self {
        Self {
            dim: self.dim,
            features: idx.iter().flat_map(|&i| self.row(i).iter().copied()).collect(),
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
        }
    }

    /// A uniformly random subset of `size` rows (all rows if `size >= len`),
    /// kept in original order.
    pub fn subsample(&self, size: usize, rng: &RngStream) -> Self {
        if size >= self.len() {
            return self.clone();
        }
        self.select(&self.subsample_indices(size, rng))
    }

    pub fn subsample_indices(&self, size: usize, rng: &RngStream) -> Vec<usize> {
        let mut idx = rand::seq::index::sample(&mut rng.rng(), self.len(), size.min(self.len())).into_vec();
        idx.sort_unstable();
        idx
    }

    /// Shuffles and splits into `(train, test)` with `test_size` test rows.
    pub fn split(&self, test_size: usize, rng: &RngStream) -> Result<(Self, Self)> {
        if test_size == 0 || test_size >= self.len() {
            return Err(Error::input(format!(
                "test size {test_size} must lie in [1, {})",
                self.len()
            )));
        }
        let perm = rand::seq::index::sample(&mut rng.rng(), self.len(), self.len()).into_vec();
        let (test, train) = perm.split_at(test_size);
        Ok((self.select(train), self.select(test)))
    }
}

/// Maps raw label values onto `{-1, +1}`: `{0, 1}` and `{-1, 1}` are
/// recognised directly, any other pair maps its smaller value to −1.
fn map_labels(raw: &[f64]) -> Result<Vec<f64>> {
    let mut distinct: Vec<f64> = Vec::new();
    for &y in raw {
        if !distinct.contains(&y) {
            distinct.push(y);
            if distinct.len() > 2 {
                return Err(Error::input(format!(
                    "expected binary labels, found at least {distinct:?}"
                )));
            }
        }
    }
    distinct.sort_by(f64::total_cmp);
    let negative = match distinct.as_slice() {
        [a, _] => *a,
        [a] if *a <= 0.0 => *a,
        _ => f64::NAN,
    };
    Ok(raw.iter().map(|&y| if y == negative { -1.0 } else { 1.0 }).collect())
}

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        line,
        msg: msg.into(),
    }
}

fn read_csv(path: &Path) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| parse_err(path, 1, e.to_string()))?;
    let headers = reader
        .headers()
        .map_err(|e| parse_err(path, 1, e.to_string()))?
        .clone();
    let label_col = headers
        .iter()
        .position(|h| h == "label")
        .ok_or_else(|| parse_err(path, 1, "no `label` column in header"))?;
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_err(path, line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() != headers.len() {
            return Err(parse_err(
                path,
                line,
                format!("expected {} fields, found {}", headers.len(), record.len()),
            ));
        }
        let mut row = Vec::with_capacity(headers.len() - 1);
        for (j, field) in record.iter().enumerate() {
            let v: f64 = field
                .parse()
                .map_err(|_| parse_err(path, line, format!("`{field}` is not a number")))?;
            if j == label_col {
                labels.push(v);
            } else {
                row.push(v);
            }
        }
        rows.push(row);
    }
    Ok((rows, labels))
}

fn read_libsvm(path: &Path) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    let text = std::fs::read_to_string(path)?;
    let mut sparse: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut labels = Vec::new();
    let mut dim = 0;
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut tokens = content.split_whitespace();
        let label = tokens.next().unwrap_or_default();
        labels.push(
            label
                .parse::<f64>()
                .map_err(|_| parse_err(path, line_no, format!("bad label `{label}`")))?,
        );
        let mut entries = Vec::new();
        for tok in tokens {
            let (idx, val) = tok
                .split_once(':')
                .ok_or_else(|| parse_err(path, line_no, format!("expected index:value, got `{tok}`")))?;
            let idx: usize = idx
                .parse()
                .ok()
                .filter(|&k| k >= 1)
                .ok_or_else(|| parse_err(path, line_no, format!("bad feature index `{idx}`")))?;
            let val: f64 = val
                .parse()
                .map_err(|_| parse_err(path, line_no, format!("bad feature value `{val}`")))?;
            dim = dim.max(idx);
            entries.push((idx - 1, val));
        }
        sparse.push(entries);
    }
    let rows = sparse
        .into_iter()
        .map(|entries| {
            let mut row = vec![0.0; dim];
            for (k, v) in entries {
                row[k] = v;
            }
            row
        })
        .collect();
    Ok((rows, labels))
}

/// Reads a dataset, maps labels to ±1 and projects rows into the unit ball.
pub fn load_dataset(path: &Path, format: DataFormat) -> Result<Dataset> {
    let (rows, raw_labels) = match format {
        DataFormat::Csv => read_csv(path)?,
        DataFormat::Libsvm => read_libsvm(path)?,
    };
    if rows.is_empty() {
        return Err(Error::input(format!("{} contains no examples", path.display())));
    }
    Ok(Dataset::new(rows, map_labels(&raw_labels)?)?.project_rows())
}

/// Linearly separable data in the unit ball: labels are the side of a random
/// hyperplane through the origin, and points within `margin` of it are
/// rejected.
pub fn synthetic_separable(n: usize, dim: usize, margin: f64, rng: &RngStream) -> Result<Dataset> {
    if dim == 0 || !(0.0..1.0).contains(&margin) {
        return Err(Error::input("synthetic data needs dim >= 1 and margin in [0, 1)"));
    }
    let mut r = rng.rng();
    let mut normal: Vec<f64> = (0..dim).map(|_| r.sample(StandardNormal)).collect();
    let len = normal.iter().map(|x| x * x).sum::<f64>().sqrt();
    normal.iter_mut().for_each(|x| *x /= len);
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    while rows.len() < n {
        let dir: Vec<f64> = (0..dim).map(|_| r.sample(StandardNormal)).collect();
        let norm = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
        let radius = r.random::<f64>().powf(1.0 / dim as f64);
        let x: Vec<f64> = dir.iter().map(|v| v / norm * radius).collect();
        let side: f64 = x.iter().zip(&normal).map(|(a, b)| a * b).sum();
        if side.abs() < margin {
            continue;
        }
        labels.push(if side >= 0.0 { 1.0 } else { -1.0 });
        rows.push(x);
    }
    Dataset::new(rows, labels)
}
