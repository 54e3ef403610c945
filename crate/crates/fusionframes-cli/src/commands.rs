//! Command implementations. Each returns the process exit code: 0 for
//! success/pass, 2 for an analytic failure; input and usage problems
//! surface as errors and exit 1.

use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use fusionframes::construct::{
    parseval_from_frame, prescribed_diagonal, residual_chain, tight_chain, tight_chain_general,
    tight_pair, TightFamily,
};
use fusionframes::projection::{block_sparse_projection, triangular_projection};
use fusionframes::{
    Error as LibError, FusionFrame, ObliqueProjection, Subspace, Tolerances, WeightedProjection,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::format::{
    matrix_from_rows, matrix_rows, read_frame_csv, write_frame_csv, write_json, FamilyArtifacts,
    ParsevalArtifacts, ProjectionEntry, ProjectionFile, ReportFile, SubspaceEntry, SubspaceFile,
};
use crate::{ConstructKind, GenKind, Strategy, Target};

pub fn cmd_analyze(
    input: &Path,
    strategy: Strategy,
    tol: &Tolerances,
    output: &Path,
) -> Result<i32> {
    let file = SubspaceFile::load(input)?;
    let mut members = Vec::with_capacity(file.subspaces.len());
    for (i, entry) in file.subspaces.iter().enumerate() {
        let w = Subspace::new(matrix_from_rows(&entry.basis)?, tol)
            .with_context(|| format!("subspace {i}: basis"))?;
        let projection = match strategy {
            Strategy::Orthogonal => ObliqueProjection::orthogonal(&w, tol),
            Strategy::BlockSparse => block_sparse_projection(&w, tol).map(|(_, p)| p),
            Strategy::Triangular => triangular_projection(&w, tol).map(|(_, p)| p),
            Strategy::Oblique => {
                let rows = entry.nullspace.as_ref().ok_or_else(|| {
                    anyhow!("strategy oblique needs a nullspace for every subspace (subspace {i} has none)")
                })?;
                let ns = Subspace::new(matrix_from_rows(rows)?, tol)
                    .with_context(|| format!("subspace {i}: nullspace"))?;
                ObliqueProjection::new(&w, &ns, tol)
            }
        }
        .with_context(|| format!("subspace {i}"))?;
        members.push(WeightedProjection::new(projection, entry.weight.unwrap_or(1.0))?);
    }
    let frame = FusionFrame::new(members)?;
    let report = ReportFile::build(&frame, tol)?;
    write_json(&report, output)?;
    if report.is_frame {
        Ok(0)
    } else {
        eprintln!("the family is not a frame (lower bound {:.3e})", report.lower_bound);
        Ok(2)
    }
}

pub fn cmd_construct(kind: &ConstructKind, tol: &Tolerances) -> Result<i32> {
    match kind {
        ConstructKind::Parseval { input, rule, output } => {
            let vectors = read_frame_csv(input)?;
            let c = parseval_from_frame(&vectors, (*rule).into(), tol)?;
            write_family(&c.frame, output, tol)?;
            let artifacts = ParsevalArtifacts {
                permutation: c.permutation,
                pivots: c.pivots,
                squared_weights: c.squared_weights,
                duals: c.duals,
                parseval_vectors: c.parseval_vectors,
            };
            write_json(&artifacts, &output.join("parseval.json"))?;
            Ok(0)
        }
        ConstructKind::Diagonal { ambient, kept, entries, adjustable, output } => {
            let (w, p) =
                prescribed_diagonal(*ambient, kept, entries, adjustable.as_deref(), tol)?;
            let entry = SubspaceEntry {
                basis: matrix_rows(w.basis()),
                weight: None,
                nullspace: p.nullspace().map(|ns| matrix_rows(ns.basis())),
            };
            let frame = FusionFrame::unweighted(vec![p])?;
            write_family(&frame, output, tol)?;
            let sub = SubspaceFile { ambient_dim: *ambient, subspaces: vec![entry] };
            write_json(&sub, &output.join("subspace.json"))?;
            Ok(0)
        }
        ConstructKind::TightPair { input, output } => {
            let w = load_single_subspace(input, tol)?;
            write_tight(&tight_pair(&w, tol)?, output, tol)
        }
        ConstructKind::TightChain { k, levels, input, output } => {
            let family = match (input, k, levels) {
                (Some(path), None, None) => tight_chain_general(&load_single_subspace(path, tol)?, tol)?,
                (None, Some(k), Some(levels)) => tight_chain(*k, *levels, tol)?,
                _ => bail!("tight-chain takes either --input FILE or both --k and --levels"),
            };
            write_tight(&family, output, tol)
        }
        ConstructKind::ResidualChain { k, levels, residue, output } => {
            write_tight(&residual_chain(*k, *levels, *residue, tol)?, output, tol)
        }
    }
}

pub fn cmd_verify(
    input: &Path,
    target: Target,
    constant: Option<f64>,
    tol: &Tolerances,
    output: Option<&Path>,
) -> Result<i32> {
    let file = ProjectionFile::load(input)?;
    let mut members = Vec::with_capacity(file.projections.len());
    for (i, entry) in file.projections.iter().enumerate() {
        let matrix = matrix_from_rows(&entry.matrix)?;
        let p = match ObliqueProjection::from_matrix(matrix, tol) {
            Ok(p) => p,
            Err(LibError::NotIdempotent { residual }) => {
                eprintln!("projection {i} is not idempotent (residual {residual:.3e})");
                return Ok(2);
            }
            Err(e) => return Err(anyhow!(e).context(format!("projection {i}"))),
        };
        members.push(WeightedProjection::new(p, entry.weight)?);
    }
    let frame = FusionFrame::new(members)?;
    let report = ReportFile::build(&frame, tol)?;

    let near = |c: f64, want: f64| (c - want).abs() <= tol.eq * want.abs().max(1.0);
    let (pass, what) = match target {
        Target::Frame => (report.is_frame, "frame"),
        Target::Tight => {
            let c_ok = match (constant, report.tight_constant) {
                (Some(want), Some(c)) => near(c, want),
                (Some(_), None) => false,
                (None, _) => true,
            };
            (report.is_frame && report.is_tight && c_ok, "tight")
        }
        Target::Diagonal => (report.is_diagonal, "diagonal"),
        Target::Identity => {
            let n = file.ambient_dim;
            let trace: f64 = (0..n).map(|i| report.operator[i][i]).sum();
            let want = constant.unwrap_or(1.0);
            (report.is_identity_multiple && near(trace / n as f64, want), "identity")
        }
    };
    report.emit(output)?;
    if pass {
        Ok(0)
    } else {
        eprintln!(
            "target {what} not met (bounds [{:.6}, {:.6}], diagonal {}, identity multiple {})",
            report.lower_bound, report.upper_bound, report.is_diagonal, report.is_identity_multiple
        );
        Ok(2)
    }
}

pub fn cmd_gen(kind: &GenKind, tol: &Tolerances) -> Result<i32> {
    match kind {
        GenKind::Frame { ambient, count, seed, output } => {
            if *ambient == 0 || *count == 0 {
                bail!("--ambient and --count must be positive");
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let vectors: Vec<Vec<f64>> =
                (0..*count).map(|_| random_vec(&mut rng, *ambient)).collect();
            write_frame_csv(&vectors, output)?;
            Ok(0)
        }
        GenKind::Subspace { ambient, dims, seed, with_nullspaces, output } => {
            let n = *ambient;
            if n == 0 || dims.is_empty() {
                bail!("--ambient must be positive and --dims non-empty");
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut subspaces = Vec::with_capacity(dims.len());
            for &k in dims {
                if k == 0 || k > n {
                    bail!("subspace dimension {k} out of range for ambient {n}");
                }
                if *with_nullspaces && k == n {
                    bail!("a full-space subspace leaves no room for a nullspace");
                }
                let (w, ns) = random_complementary_pair(&mut rng, n, k, *with_nullspaces, tol)?;
                subspaces.push(SubspaceEntry {
                    basis: matrix_rows(w.basis()),
                    weight: None,
                    nullspace: ns.map(|s| matrix_rows(s.basis())),
                });
            }
            write_json(&SubspaceFile { ambient_dim: n, subspaces }, output)?;
            Ok(0)
        }
    }
}

fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| 2.0 * rng.gen::<f64>() - 1.0).collect()
}

fn random_subspace(rng: &mut ChaCha8Rng, n: usize, k: usize, tol: &Tolerances) -> Result<Subspace> {
    for _ in 0..32 {
        let cols: Vec<Vec<f64>> = (0..k).map(|_| random_vec(rng, n)).collect();
        if let Ok(w) = Subspace::from_cols(&cols, tol) {
            return Ok(w);
        }
    }
    bail!("no full-rank draw in 32 attempts (n={n}, k={k})")
}

fn random_complementary_pair(
    rng: &mut ChaCha8Rng,
    n: usize,
    k: usize,
    with_nullspace: bool,
    tol: &Tolerances,
) -> Result<(Subspace, Option<Subspace>)> {
    let w = random_subspace(rng, n, k, tol)?;
    if !with_nullspace {
        return Ok((w, None));
    }
    for _ in 0..32 {
        let ns = random_subspace(rng, n, n - k, tol)?;
        if ObliqueProjection::new(&w, &ns, tol).is_ok() {
            return Ok((w, Some(ns)));
        }
    }
    bail!("no complementary nullspace draw in 32 attempts (n={n}, k={k})")
}

fn load_single_subspace(path: &Path, tol: &Tolerances) -> Result<Subspace> {
    let file = SubspaceFile::load(path)?;
    if file.subspaces.len() != 1 {
        bail!("expected exactly one subspace in {}, found {}", path.display(), file.subspaces.len());
    }
    Ok(Subspace::new(matrix_from_rows(&file.subspaces[0].basis)?, tol)?)
}

/// Writes projections.json and report.json for a family.
fn write_family(frame: &FusionFrame, dir: &Path, tol: &Tolerances) -> Result<ReportFile> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let projections = ProjectionFile {
        ambient_dim: frame.ambient(),
        projections: frame
            .members()
            .iter()
            .map(|m| ProjectionEntry {
                matrix: matrix_rows(m.projection().matrix()),
                weight: m.weight(),
            })
            .collect(),
    };
    write_json(&projections, &dir.join("projections.json"))?;
    let report = ReportFile::build(frame, tol)?;
    write_json(&report, &dir.join("report.json"))?;
    Ok(report)
}

fn write_tight(family: &TightFamily, dir: &Path, tol: &Tolerances) -> Result<i32> {
    let frame = family.to_fusion_frame()?;
    write_family(&frame, dir, tol)?;
    let artifacts = FamilyArtifacts {
        subspace_basis: matrix_rows(family.subspace().basis()),
        constant: family.constant(),
        achieved_spectrum: family.achieved_spectrum().to_vec(),
    };
    write_json(&artifacts, &dir.join("family.json"))?;
    Ok(0)
}
