use std::path::Path;

use crate::error::{Error, Result};
use crate::features::FeatureVector;
use crate::graph::{Family, GraphLabel};
use crate::scalar::Scalar;

/// One feature vector per graph, all sharing a column layout.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureMatrix<T> {
    pub columns: Vec<String>,
    pub labels: Vec<GraphLabel>,
    pub rows: Vec<Vec<T>>,
}

/// Column-standardized matrix plus the statistics used.
#[derive(Clone, Debug, PartialEq)]
pub struct Standardized<T> {
    pub matrix: FeatureMatrix<T>,
    pub means: Vec<T>,
    pub stds: Vec<T>,
    /// Columns with zero variance, mapped to all zeros.
    pub zero_variance: Vec<usize>,
}

impl<T: Scalar> FeatureMatrix<T> {
    pub fn new(columns: Vec<String>, labels: Vec<GraphLabel>, rows: Vec<Vec<T>>) -> Result<Self> {
        if labels.len() != rows.len() {
            return Err(Error::InvalidInput(format!(
                "{} labels for {} rows",
                labels.len(),
                rows.len()
            )));
        }
        if let Some(i) = rows.iter().position(|r| r.len() != columns.len()) {
            return Err(Error::InvalidInput(format!(
                "row {i} has {} values, expected {}",
                rows[i].len(),
                columns.len()
            )));
        }
        Ok(FeatureMatrix { columns, labels, rows })
    }

    pub fn from_vectors(items: Vec<(GraphLabel, FeatureVector<T>)>) -> Result<Self> {
        let columns = match items.first() {
            Some((_, v)) => v.names.clone(),
            None => return Err(Error::InvalidInput("no feature vectors".into())),
        };
        if items.iter().any(|(_, v)| v.names != columns) {
            return Err(Error::InvalidInput("feature vectors use different layouts".into()));
        }
        let (labels, rows) = items.into_iter().map(|(l, v)| (l, v.values)).unzip();
        Self::new(columns, labels, rows)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn dims(&self) -> usize {
        self.columns.len()
    }

    /// Column means.
    pub fn means(&self) -> Vec<T> {
        let n = T::from_usize_lossy(self.len());
        (0..self.dims())
            .map(|j| self.rows.iter().map(|r| r[j]).sum::<T>() / n)
            .collect()
    }

    /// CSV with a `name,family` prefix and one column per feature.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
        let mut header = vec!["name".to_string(), "family".to_string()];
        header.extend(self.columns.iter().cloned());
        w.write_record(&header).map_err(csv_error)?;
        for (label, row) in self.labels.iter().zip(&self.rows) {
            let mut rec = vec![label.name.clone(), label.family.as_str().to_string()];
            rec.extend(row.iter().map(|x| x.to_string()));
            w.write_record(&rec).map_err(csv_error)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let parse_err = |line: usize, message: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            message,
        };
        let mut r = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(true)
            .from_path(path)
            .map_err(csv_error)?;
        let header = r.headers().map_err(csv_error)?.clone();
        if header.len() < 3 || &header[0] != "name" || &header[1] != "family" {
            return Err(parse_err(1, "header must start with name,family and list features".into()));
        }
        let columns: Vec<String> = header.iter().skip(2).map(str::to_string).collect();
        let mut labels = Vec::new();
        let mut rows = Vec::new();
        for (i, rec) in r.records().enumerate() {
            let line = i + 2;
            let rec = rec.map_err(|e| parse_err(line, e.to_string()))?;
            if rec.len() != header.len() {
                return Err(parse_err(line, format!("expected {} fields, got {}", header.len(), rec.len())));
            }
            let family: Family = rec[1].parse().map_err(|e: Error| parse_err(line, e.to_string()))?;
            let row = rec
                .iter()
                .skip(2)
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .ok()
                        .filter(|x| x.is_finite())
                        .map(T::from_f64_lossy)
                        .ok_or_else(|| parse_err(line, format!("bad value {s:?}")))
                })
                .collect::<Result<Vec<T>>>()?;
            labels.push(GraphLabel::new(&rec[0], family));
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(Error::EmptyFile { path: path.to_path_buf() });
        }
        Self::new(columns, labels, rows)
    }
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::InvalidInput(format!("csv: {other:?}")),
    }
}

/// Zero mean, unit population variance per column.
pub fn standardize<T: Scalar>(m: &FeatureMatrix<T>) -> Result<Standardized<T>> {
    if m.len() < 2 {
        return Err(Error::InvalidInput(format!("standardizing needs at least 2 rows, got {}", m.len())));
    }
    let n = T::from_usize_lossy(m.len());
    let means = m.means();
    let stds: Vec<T> = (0..m.dims())
        .map(|j| {
            let var = m.rows.iter().map(|r| (r[j] - means[j]).powi(2)).sum::<T>() / n;
            var.sqrt()
        })
        .collect();
    // Rounding can leave a constant column with a tiny spread.
    let zero_variance: Vec<usize> = (0..m.dims())
        .filter(|&j| {
            let scale = means[j].abs().max(T::one());
            stds[j] <= scale * T::epsilon() * T::from_f64_lossy(16.0)
        })
        .collect();
    let rows = m
        .rows
        .iter()
        .map(|r| {
            (0..m.dims())
                .map(|j| {
                    if zero_variance.contains(&j) {
                        T::zero()
                    } else {
                        (r[j] - means[j]) / stds[j]
                    }
                })
                .collect()
        })
        .collect();
    Ok(Standardized {
        matrix: FeatureMatrix {
            columns: m.columns.clone(),
            labels: m.labels.clone(),
            rows,
        },
        means,
        stds,
        zero_variance,
    })
}
