//! On-disk formats: subspace inputs, projection families, and operator
//! reports, all JSON with row-major nested arrays. Floats serialize in
//! shortest-round-trip form, so a write/read cycle is lossless.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use fusionframes::{FusionFrame, Matrix, Tolerances};
use serde::{Deserialize, Serialize};

/// A list of subspaces of one ambient space, each an explicit basis.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SubspaceFile {
    pub ambient_dim: usize,
    pub subspaces: Vec<SubspaceEntry>,
}

/// One subspace: basis columns, an optional weight (default 1), and an
/// optional nullspace basis for oblique analysis.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SubspaceEntry {
    /// N rows by k columns.
    pub basis: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<f64>,
    /// N rows by N-k columns when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nullspace: Option<Vec<Vec<f64>>>,
}

/// Explicit projection matrices with their weights.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProjectionFile {
    pub ambient_dim: usize,
    pub projections: Vec<ProjectionEntry>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProjectionEntry {
    /// N by N, row-major.
    pub matrix: Vec<Vec<f64>>,
    pub weight: f64,
}

/// Everything the analysis knows about one weighted family.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReportFile {
    pub operator: Vec<Vec<f64>>,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub is_frame: bool,
    pub is_tight: bool,
    pub tight_constant: Option<f64>,
    pub is_diagonal: bool,
    pub is_identity_multiple: bool,
    pub nnz: usize,
    /// Coordinate indices grouped by coupling component.
    pub block_pattern: Vec<Vec<usize>>,
    pub per_projection: Vec<ProjectionDiagnostics>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProjectionDiagnostics {
    pub idempotency_residual: f64,
    pub gram_nnz: usize,
    pub gram_diagonal: bool,
}

pub fn matrix_rows(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

pub fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<Matrix> {
    Ok(Matrix::from_rows(rows)?)
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("cannot parse {}", path.display()))
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

impl SubspaceFile {
    pub fn load(path: &Path) -> Result<Self> {
        let file: SubspaceFile = read_json(path)?;
        file.validate()?;
        Ok(file)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.ambient_dim;
        if n == 0 {
            bail!("ambient_dim must be positive");
        }
        if self.subspaces.is_empty() {
            bail!("the file lists no subspaces");
        }
        for (i, s) in self.subspaces.iter().enumerate() {
            if s.basis.len() != n {
                bail!("subspace {i}: basis has {} rows, ambient_dim is {n}", s.basis.len());
            }
            let k = s.basis.first().map_or(0, |r| r.len());
            if k == 0 || k > n {
                bail!("subspace {i}: basis must have between 1 and {n} columns");
            }
            if s.basis.iter().any(|r| r.len() != k) {
                bail!("subspace {i}: ragged basis rows");
            }
            if let Some(w) = s.weight {
                if !(w.is_finite() && w > 0.0) {
                    bail!("subspace {i}: weight must be positive and finite");
                }
            }
            if let Some(ns) = &s.nullspace {
                if ns.len() != n {
                    bail!("subspace {i}: nullspace has {} rows, ambient_dim is {n}", ns.len());
                }
                let c = ns.first().map_or(0, |r| r.len());
                if c != n - k {
                    bail!("subspace {i}: nullspace must have {} columns, found {c}", n - k);
                }
                if ns.iter().any(|r| r.len() != c) {
                    bail!("subspace {i}: ragged nullspace rows");
                }
            }
        }
        Ok(())
    }
}

impl ProjectionFile {
    pub fn load(path: &Path) -> Result<Self> {
        let file: ProjectionFile = read_json(path)?;
        let n = file.ambient_dim;
        if n == 0 {
            bail!("ambient_dim must be positive");
        }
        if file.projections.is_empty() {
            bail!("the file lists no projections");
        }
        for (i, p) in file.projections.iter().enumerate() {
            if p.matrix.len() != n || p.matrix.iter().any(|r| r.len() != n) {
                bail!("projection {i}: matrix must be {n} x {n}");
            }
        }
        Ok(file)
    }
}

impl ReportFile {
    /// Assembles the full report for a weighted family.
    pub fn build(frame: &FusionFrame, tol: &Tolerances) -> Result<Self> {
        let report = frame.structure_report(tol)?;
        // Labels are assigned in order of first appearance, so they can
        // be unfolded into index groups with one pass.
        let mut block_pattern: Vec<Vec<usize>> = Vec::new();
        for (i, &label) in report.block_pattern.iter().enumerate() {
            while block_pattern.len() <= label {
                block_pattern.push(Vec::new());
            }
            block_pattern[label].push(i);
        }
        let per_projection = frame
            .members()
            .iter()
            .map(|member| {
                let m = member.projection().matrix();
                let gram = member.projection().gram();
                ProjectionDiagnostics {
                    idempotency_residual: m.mul(m).max_abs_diff(m),
                    gram_nnz: gram.nnz(tol.eq),
                    gram_diagonal: gram.is_diagonal(tol.eq),
                }
            })
            .collect();
        Ok(ReportFile {
            operator: matrix_rows(&report.operator),
            lower_bound: report.lower,
            upper_bound: report.upper,
            is_frame: report.is_frame,
            is_tight: report.is_tight,
            tight_constant: report.tight_constant,
            is_diagonal: report.is_diagonal,
            is_identity_multiple: report.is_identity_multiple,
            nnz: report.nnz,
            block_pattern,
            per_projection,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        read_json(path)
    }

    /// Writes to `path`, or pretty-prints to stdout when no path is given.
    pub fn emit(&self, path: Option<&Path>) -> Result<()> {
        match path {
            Some(p) => write_json(self, p),
            None => {
                println!("{}", serde_json::to_string_pretty(self)?);
                Ok(())
            }
        }
    }
}

/// Reads a frame from CSV, one vector per row.
pub fn read_frame_csv(path: &Path) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    let mut vectors = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.with_context(|| format!("row {i}"))?;
        let mut v = Vec::with_capacity(record.len());
        for (j, field) in record.iter().enumerate() {
            let x: f64 = field
                .parse()
                .with_context(|| format!("row {i}, column {j}: not a number: {field:?}"))?;
            v.push(x);
        }
        vectors.push(v);
    }
    if vectors.is_empty() {
        bail!("the CSV lists no vectors");
    }
    let n = vectors[0].len();
    if n == 0 || vectors.iter().any(|v| v.len() != n) {
        bail!("vectors must all have the same positive length");
    }
    Ok(vectors)
}

pub fn write_frame_csv(vectors: &[Vec<f64>], path: &Path) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)
        .with_context(|| format!("cannot write {}", path.display()))?;
    for v in vectors {
        writer.write_record(v.iter().map(|x| x.to_string()))?;
    }
    writer.flush()?;
    Ok(())
}

/// Bookkeeping emitted alongside a rank-one Parseval construction:
/// the reordering, pivot axes, squared weights, dual vectors, and the
/// induced orthogonal family of scaled axis vectors.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ParsevalArtifacts {
    pub permutation: Vec<usize>,
    pub pivots: Vec<usize>,
    pub squared_weights: Vec<f64>,
    pub duals: Vec<Vec<f64>>,
    pub parseval_vectors: Vec<Vec<f64>>,
}

/// Bookkeeping emitted alongside a projection family built onto one
/// subspace: the subspace itself, the frame constant when the family is
/// tight, and the sorted operator spectrum it achieves.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FamilyArtifacts {
    pub subspace_basis: Vec<Vec<f64>>,
    pub constant: Option<f64>,
    pub achieved_spectrum: Vec<f64>,
}
