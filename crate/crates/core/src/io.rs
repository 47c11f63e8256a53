//! File formats.
//!
//! Graphs are JSON `{"n", "W", "beta"?}` with `W` row-major; a learned graph
//! adds its per-node `rhos`, `sweeps`, `converged`, `lambda_min` and
//! `warnings`. Covariances are JSON `{"n", "C"}`. Data and signal matrices are
//! CSV with one row per node (`node_i` label first) and one column per
//! observation. Floats are written in shortest round-trip form, so a value
//! read back is bit-identical to the value written.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::graph::{BalancedLaplacian, GeneralizedLaplacian, PolarityVector};
use crate::learn::{LearnedGraph, SampleCovariance};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphFile {
    pub n: usize,
    #[serde(rename = "W")]
    pub w: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<Vec<i8>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rhos: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweeps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub converged: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warnings: Option<Vec<String>>,
}

fn row_major(m: &DMatrix<f64>) -> Vec<f64> {
    m.transpose().as_slice().to_vec()
}

impl GraphFile {
    pub fn from_laplacian(l: &GeneralizedLaplacian) -> Self {
        Self {
            n: l.n(),
            w: row_major(&l.to_adjacency()),
            beta: None,
            rhos: None,
            sweeps: None,
            converged: None,
            lambda_min: None,
            warnings: None,
        }
    }

    pub fn from_balanced(b: &BalancedLaplacian) -> Self {
        Self {
            beta: Some(b.polarity().as_slice().to_vec()),
            ..Self::from_laplacian(b.laplacian())
        }
    }

    pub fn from_learned(g: &LearnedGraph) -> Self {
        Self {
            rhos: Some(g.rhos.clone()),
            sweeps: Some(g.sweeps),
            converged: Some(g.converged),
            lambda_min: Some(g.lambda_min),
            warnings: Some(g.warnings.clone()),
            ..Self::from_balanced(&g.balanced)
        }
    }

    pub fn adjacency(&self) -> Result<DMatrix<f64>> {
        check_dim(self.n * self.n, self.w.len())?;
        Ok(DMatrix::from_row_slice(self.n, self.n, &self.w))
    }

    pub fn laplacian(&self) -> Result<GeneralizedLaplacian> {
        GeneralizedLaplacian::from_adjacency(&self.adjacency()?)
    }

    /// Fails when `beta` is missing or inconsistent with the edges.
    pub fn balanced(&self) -> Result<BalancedLaplacian> {
        let beta = self
            .beta
            .clone()
            .ok_or_else(|| Error::InvalidInput("graph file has no \"beta\"".into()))?;
        BalancedLaplacian::new(self.laplacian()?, PolarityVector::new(beta)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct CovarianceFile {
    n: usize,
    #[serde(rename = "C")]
    c: Vec<f64>,
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

pub fn write_graph(path: &Path, g: &GraphFile) -> Result<()> {
    write_json(path, g)
}

pub fn read_graph(path: &Path) -> Result<GraphFile> {
    let g: GraphFile = serde_json::from_reader(BufReader::new(File::open(path)?))?;
    check_dim(g.n * g.n, g.w.len())?;
    if let Some(beta) = &g.beta {
        check_dim(g.n, beta.len())?;
    }
    Ok(g)
}

pub fn write_covariance(path: &Path, c: &SampleCovariance) -> Result<()> {
    write_json(
        path,
        &CovarianceFile {
            n: c.n(),
            c: row_major(c.matrix()),
        },
    )
}

pub fn read_covariance(path: &Path) -> Result<SampleCovariance> {
    let f: CovarianceFile = serde_json::from_reader(BufReader::new(File::open(path)?))?;
    check_dim(f.n * f.n, f.c.len())?;
    SampleCovariance::new(DMatrix::from_row_slice(f.n, f.n, &f.c))
}

/// Writes `m` with header `node,<prefix>_0,...` and rows labelled `node_i`.
pub fn write_matrix_csv(path: &Path, m: &DMatrix<f64>, column_prefix: &str) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["node".to_string()];
    header.extend((0..m.ncols()).map(|k| format!("{column_prefix}_{k}")));
    w.write_record(&header)?;
    for (i, row) in m.row_iter().enumerate() {
        let mut rec = vec![format!("node_{i}")];
        rec.extend(row.iter().map(|v| v.to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a node-per-row CSV with a header line. A first column that does not
/// parse as a number is treated as a row label.
pub fn read_matrix_csv(path: &Path) -> Result<DMatrix<f64>> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let labelled = rec.get(0).is_some_and(|f| f.parse::<f64>().is_err());
        let row = rec
            .iter()
            .skip(usize::from(labelled))
            .map(|f| {
                f.parse::<f64>().map_err(|_| {
                    Error::InvalidInput(format!("row {line}: cannot parse '{f}' as a number"))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        if let Some(first) = rows.first() {
            check_dim(first.len(), row.len())?;
        }
        rows.push(row);
    }
    let n = rows.len();
    let k = rows.first().map_or(0, Vec::len);
    Ok(DMatrix::from_fn(n, k, |i, j| rows[i][j]))
}

/// Trailing moving average: column `t` of the output averages input columns
/// `t .. t + window`, giving `K - window + 1` columns.
pub fn moving_average(x: &DMatrix<f64>, window: usize) -> Result<DMatrix<f64>> {
    let k = x.ncols();
    if window == 0 || window > k {
        return Err(Error::InvalidInput(format!(
            "moving-average window {window} must lie in 1..={k}"
        )));
    }
    let scale = 1.0 / window as f64;
    Ok(DMatrix::from_fn(x.nrows(), k - window + 1, |i, t| {
        x.row(i).columns(t, window).sum() * scale
    }))
}

/// Rescales each row to zero mean and unit sample standard deviation.
pub fn normalize_rows(x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let k = x.ncols();
    if k < 2 {
        return Err(Error::InsufficientSamples { n: 1, k });
    }
    let mut out = x.clone();
    for (i, mut row) in out.row_iter_mut().enumerate() {
        let mean = row.sum() / k as f64;
        row.add_scalar_mut(-mean);
        let sd = (row.norm_squared() / (k - 1) as f64).sqrt();
        if sd == 0.0 {
            return Err(Error::ZeroVariance(i));
        }
        row /= sd;
    }
    Ok(out)
}

/// Stations-by-time CSV with optional smoothing and per-row normalization.
pub fn load_time_series(
    path: &Path,
    moving_average_window: Option<usize>,
    normalize: bool,
) -> Result<DMatrix<f64>> {
    let mut x = read_matrix_csv(path)?;
    if let Some(w) = moving_average_window {
        x = moving_average(&x, w)?;
    }
    if normalize {
        x = normalize_rows(&x)?;
    }
    Ok(x)
}

pub fn columns(m: &DMatrix<f64>) -> Vec<DVector<f64>> {
    m.column_iter().map(|c| c.into_owned()).collect()
}
