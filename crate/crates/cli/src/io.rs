//! Headerless numeric CSV for features, one integer per line for labels.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use spclust_core::data::reindex_dense;
use spclust_core::{DataMatrix, DistanceMatrix, LabelVector};

#[derive(Debug, thiserror::Error)]
pub enum DataError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: row {row}, column {column}: {message}")]
    Parse {
        path: PathBuf,
        row: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: row {row}: {message}")]
    Shape { path: PathBuf, row: usize, message: String },
    #[error("{path}: file contains no data")]
    Empty { path: PathBuf },
    #[error("{0} needs ground-truth labels (use --label-column, --truth or --gen)")]
    MissingTruth(&'static str),
    #[error("{0} truth labels for {1} samples")]
    TruthLength(usize, usize),
    #[error(transparent)]
    Core(#[from] spclust_core::Error),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> DataError + '_ {
    move |source| DataError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Reads a rectangular numeric CSV. When `label_column` is given that column
/// is split off, parsed as integers and re-indexed to `0..K`.
pub fn load_csv(
    path: &Path,
    label_column: Option<usize>,
    has_header: bool,
) -> Result<(DataMatrix, Option<LabelVector>), DataError> {
    let file = File::open(path).map_err(io_err(path))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);

    let mut width = None;
    let mut values = Vec::new();
    let mut raw_labels = Vec::new();
    let mut n_rows = 0;
    for record in reader.records() {
        let record = record.map_err(|e| {
            let row = e.position().map_or(0, |p| p.line() as usize);
            DataError::Parse {
                path: path.to_path_buf(),
                row,
                column: 0,
                message: e.to_string(),
            }
        })?;
        let row = record.position().map_or(n_rows + 1, |p| p.line() as usize);
        if record.len() == 1 && record.get(0) == Some("") {
            continue;
        }
        match width {
            None => width = Some(record.len()),
            Some(w) if w != record.len() => {
                return Err(DataError::Shape {
                    path: path.to_path_buf(),
                    row,
                    message: format!("expected {w} fields, found {}", record.len()),
                })
            }
            Some(_) => {}
        }
        if let Some(lc) = label_column {
            if lc >= record.len() {
                return Err(DataError::Shape {
                    path: path.to_path_buf(),
                    row,
                    message: format!("label column {lc} out of range for {} fields", record.len()),
                });
            }
        }
        for (column, cell) in record.iter().enumerate() {
            let parse_error = |message: String| DataError::Parse {
                path: path.to_path_buf(),
                row,
                column: column + 1,
                message,
            };
            if Some(column) == label_column {
                let label: i64 = cell
                    .parse()
                    .map_err(|_| parse_error(format!("`{cell}` is not an integer label")))?;
                raw_labels.push(label);
            } else {
                let v: f64 = cell
                    .parse()
                    .map_err(|_| parse_error(format!("`{cell}` is not a number")))?;
                if !v.is_finite() {
                    return Err(parse_error(format!("`{cell}` is not finite")));
                }
                values.push(v);
            }
        }
        n_rows += 1;
    }
    let width = width.ok_or_else(|| DataError::Empty {
        path: path.to_path_buf(),
    })?;
    let n_features = width - usize::from(label_column.is_some());
    if n_features == 0 {
        return Err(DataError::Shape {
            path: path.to_path_buf(),
            row: 1,
            message: "no feature columns".into(),
        });
    }
    let x = DataMatrix::new(values, n_rows, n_features)?;
    let labels = label_column.map(|_| reindex_dense(&raw_labels));
    Ok((x, labels))
}

/// Writes features as headerless CSV using the shortest round-trip decimal form.
pub fn save_csv(path: &Path, x: &DataMatrix) -> Result<(), DataError> {
    let rows: Vec<&[f64]> = x.rows().collect();
    write_rows(path, &rows)
}

pub fn save_distance(path: &Path, d: &DistanceMatrix) -> Result<(), DataError> {
    let rows: Vec<&[f64]> = (0..d.n()).map(|i| d.row(i)).collect();
    write_rows(path, &rows)
}

fn write_rows(path: &Path, rows: &[&[f64]]) -> Result<(), DataError> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut out = BufWriter::new(file);
    for row in rows {
        let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        writeln!(out, "{}", line.join(",")).map_err(io_err(path))?;
    }
    out.flush().map_err(io_err(path))
}

pub fn save_labels(path: &Path, labels: &[usize]) -> Result<(), DataError> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut out = BufWriter::new(file);
    for l in labels {
        writeln!(out, "{l}").map_err(io_err(path))?;
    }
    out.flush().map_err(io_err(path))
}

/// Reads one integer per line (blank lines ignored), re-indexed to `0..K`.
pub fn load_labels(path: &Path) -> Result<LabelVector, DataError> {
    let file = File::open(path).map_err(io_err(path))?;
    let mut raw = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        let cell = line.trim();
        if cell.is_empty() {
            continue;
        }
        let v: i64 = cell.parse().map_err(|_| DataError::Parse {
            path: path.to_path_buf(),
            row: idx + 1,
            column: 1,
            message: format!("`{cell}` is not an integer label"),
        })?;
        raw.push(v);
    }
    if raw.is_empty() {
        return Err(DataError::Empty {
            path: path.to_path_buf(),
        });
    }
    Ok(reindex_dense(&raw))
}
