//! End-to-end coverage for the command layer: every subcommand, every
//! exit code, the construct/verify round trips, and byte-for-byte
//! determinism of written outputs.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use fusionframes::Tolerances;
use fusionframes_cli::commands::{cmd_analyze, cmd_construct, cmd_gen, cmd_verify};
use fusionframes_cli::format::{read_frame_csv, ReportFile, SubspaceFile};
use fusionframes_cli::{ConstructKind, GenKind, RuleArg, Strategy, Target};
use tempfile::TempDir;

fn tol() -> Tolerances {
    Tolerances::new(1e-10, 1e-9, 1e-9).unwrap()
}

fn write(path: &Path, text: &str) {
    fs::write(path, text).unwrap();
}

/// Orthogonal floor plane plus the plane x+y+z=0 taken along e0; the
/// operator of this pair is known in closed form.
const OBLIQUE_PAIR: &str = r#"{
  "ambient_dim": 3,
  "subspaces": [
    { "basis": [[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]], "nullspace": [[0.0], [0.0], [1.0]] },
    { "basis": [[1.0, 0.0], [-1.0, 1.0], [0.0, -1.0]], "weight": 1.0,
      "nullspace": [[1.0], [0.0], [0.0]] }
  ]
}"#;

/// Plane spanned by (1,0,0) and (0,1,1)/sqrt(2); a pair of projections
/// onto it can sum to exactly twice the identity.
const TILTED_PLANE: &str = r#"{
  "ambient_dim": 3,
  "subspaces": [
    { "basis": [[1.0, 0.0], [0.0, 0.7071067811865476], [0.0, 0.7071067811865476]] }
  ]
}"#;

const NOT_IDEMPOTENT: &str = r#"{
  "ambient_dim": 2,
  "projections": [ { "matrix": [[1.0, 0.5], [0.0, 0.5]], "weight": 1.0 } ]
}"#;

#[test]
fn analyze_oblique_pair_matches_known_operator() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("pair.json");
    let output = dir.path().join("report.json");
    write(&input, OBLIQUE_PAIR);

    let code = cmd_analyze(&input, Strategy::Oblique, &tol(), &output).unwrap();
    assert_eq!(code, 0);

    let report = ReportFile::load(&output).unwrap();
    let expected = [[1.0, 0.0, 0.0], [0.0, 3.0, 1.0], [0.0, 1.0, 2.0]];
    for i in 0..3 {
        for j in 0..3 {
            assert!((report.operator[i][j] - expected[i][j]).abs() < 1e-9);
        }
    }
    assert!(report.is_frame);
    assert!(!report.is_tight);
    assert!(!report.is_diagonal);
    assert_eq!(report.nnz, 5);
    assert_eq!(report.block_pattern, vec![vec![0], vec![1, 2]]);
    assert_eq!(report.per_projection.len(), 2);
    assert!(report.per_projection[0].gram_diagonal);
    assert!(!report.per_projection[1].gram_diagonal);
}

#[test]
fn analyze_oblique_diagonal_variant_yields_diagonal_operator() {
    // Tilting the floor plane's projection along span{e1+e2} instead of
    // e2 cancels the off-diagonal coupling: the operator is diag(1,3,3).
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("pair.json");
    let output = dir.path().join("report.json");
    write(
        &input,
        r#"{
  "ambient_dim": 3,
  "subspaces": [
    { "basis": [[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]], "nullspace": [[0.0], [1.0], [1.0]] },
    { "basis": [[1.0, 0.0], [-1.0, 1.0], [0.0, -1.0]], "nullspace": [[1.0], [0.0], [0.0]] }
  ]
}"#,
    );

    let code = cmd_analyze(&input, Strategy::Oblique, &tol(), &output).unwrap();
    assert_eq!(code, 0);

    let report = ReportFile::load(&output).unwrap();
    let expected = [[1.0, 0.0, 0.0], [0.0, 3.0, 0.0], [0.0, 0.0, 3.0]];
    for i in 0..3 {
        for j in 0..3 {
            assert!((report.operator[i][j] - expected[i][j]).abs() < 1e-9);
        }
    }
    assert!(report.is_frame && report.is_diagonal);
    assert!(!report.is_identity_multiple);
    assert_eq!(report.nnz, 3);
    assert_eq!(report.block_pattern, vec![vec![0], vec![1], vec![2]]);
}

#[test]
fn verify_diagonal_variant_matrices_pass_diagonal_target() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("p.json");
    write(
        &input,
        r#"{
  "ambient_dim": 3,
  "projections": [
    { "matrix": [[1.0, 0.0, 0.0], [0.0, 1.0, -1.0], [0.0, 0.0, 0.0]], "weight": 1.0 },
    { "matrix": [[0.0, -1.0, -1.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]], "weight": 1.0 }
  ]
}"#,
    );
    assert_eq!(cmd_verify(&input, Target::Diagonal, None, &tol(), None).unwrap(), 0);
    assert_eq!(cmd_verify(&input, Target::Frame, None, &tol(), None).unwrap(), 0);
    // The operator is diag(1,3,3): diagonal yet not a multiple of I.
    assert_eq!(cmd_verify(&input, Target::Identity, None, &tol(), None).unwrap(), 2);
    assert_eq!(cmd_verify(&input, Target::Tight, None, &tol(), None).unwrap(), 2);
}

#[test]
fn analyze_orthogonal_strategy_ignores_stored_nullspaces() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("pair.json");
    let output = dir.path().join("report.json");
    write(&input, OBLIQUE_PAIR);

    let code = cmd_analyze(&input, Strategy::Orthogonal, &tol(), &output).unwrap();
    assert_eq!(code, 0);

    // diag(1,1,0) plus I - J/3 where J is the all-ones matrix.
    let report = ReportFile::load(&output).unwrap();
    let third = 1.0 / 3.0;
    let expected = [
        [2.0 - third, -third, -third],
        [-third, 2.0 - third, -third],
        [-third, -third, 1.0 - third],
    ];
    for i in 0..3 {
        for j in 0..3 {
            assert!((report.operator[i][j] - expected[i][j]).abs() < 1e-9);
        }
    }
    assert!(report.is_frame);
    assert_eq!(report.nnz, 9);
    assert_eq!(report.block_pattern, vec![vec![0, 1, 2]]);
}

#[test]
fn analyze_oblique_without_stored_nullspace_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("w.json");
    write(&input, TILTED_PLANE);

    let err = cmd_analyze(&input, Strategy::Oblique, &tol(), &dir.path().join("r.json"))
        .unwrap_err();
    assert!(err.to_string().contains("needs a nullspace"));
}

#[test]
fn analyze_single_plane_is_not_a_frame() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("w.json");
    let output = dir.path().join("report.json");
    write(&input, TILTED_PLANE);

    let code = cmd_analyze(&input, Strategy::Orthogonal, &tol(), &output).unwrap();
    assert_eq!(code, 2);
    let report = ReportFile::load(&output).unwrap();
    assert!(!report.is_frame);
    assert!(report.lower_bound.abs() < 1e-9);
}

#[test]
fn analyze_rejects_empty_subspace_list() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("w.json");
    write(&input, r#"{ "ambient_dim": 3, "subspaces": [] }"#);

    let err = cmd_analyze(&input, Strategy::Orthogonal, &tol(), &dir.path().join("r.json"))
        .unwrap_err();
    assert!(format!("{err:#}").contains("no subspaces"));
}

#[test]
fn analyze_default_weight_is_one() {
    let dir = TempDir::new().unwrap();
    let bare = dir.path().join("bare.json");
    let weighted = dir.path().join("weighted.json");
    write(
        &bare,
        r#"{ "ambient_dim": 2, "subspaces": [ { "basis": [[1.0], [0.0]] } ] }"#,
    );
    write(
        &weighted,
        r#"{ "ambient_dim": 2, "subspaces": [ { "basis": [[1.0], [0.0]], "weight": 2.0 } ] }"#,
    );

    let out_bare = dir.path().join("bare_report.json");
    let out_weighted = dir.path().join("weighted_report.json");
    cmd_analyze(&bare, Strategy::Orthogonal, &tol(), &out_bare).unwrap();
    cmd_analyze(&weighted, Strategy::Orthogonal, &tol(), &out_weighted).unwrap();

    let bare = ReportFile::load(&out_bare).unwrap();
    let weighted = ReportFile::load(&out_weighted).unwrap();
    assert!((bare.operator[0][0] - 1.0).abs() < 1e-12);
    assert!((weighted.operator[0][0] - 4.0).abs() < 1e-12);
}

#[test]
fn construct_tight_pair_then_verify_identity_and_tight() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("w.json");
    let out = dir.path().join("pair");
    write(&input, TILTED_PLANE);

    let kind = ConstructKind::TightPair { input, output: out.clone() };
    assert_eq!(cmd_construct(&kind, &tol()).unwrap(), 0);

    let report = ReportFile::load(&out.join("report.json")).unwrap();
    assert!(report.is_frame && report.is_tight && report.is_identity_multiple);
    assert!((report.tight_constant.unwrap() - 2.0).abs() < 1e-9);

    let projections = out.join("projections.json");
    assert_eq!(cmd_verify(&projections, Target::Identity, Some(2.0), &tol(), None).unwrap(), 0);
    assert_eq!(cmd_verify(&projections, Target::Tight, None, &tol(), None).unwrap(), 0);
    assert_eq!(cmd_verify(&projections, Target::Tight, Some(2.0), &tol(), None).unwrap(), 0);
    // A wrong prescribed multiple is an analytic failure, not an input error.
    assert_eq!(cmd_verify(&projections, Target::Identity, Some(3.0), &tol(), None).unwrap(), 2);
}

#[test]
fn construct_parseval_then_verify_identity() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("frame.csv");
    let out = dir.path().join("pv");
    write(&input, "1,0\n0,1\n0.7071067811865476,0.7071067811865476\n");

    let kind = ConstructKind::Parseval {
        input,
        rule: RuleArg::PerVector,
        output: out.clone(),
    };
    assert_eq!(cmd_construct(&kind, &tol()).unwrap(), 0);

    let report = ReportFile::load(&out.join("report.json")).unwrap();
    assert!(report.is_identity_multiple);
    assert!((report.tight_constant.unwrap() - 1.0).abs() < 1e-9);
    // Every member of the rank-one family has a one-point Gram support.
    for p in &report.per_projection {
        assert_eq!(p.gram_nnz, 1);
        assert!(p.gram_diagonal);
    }

    let artifacts: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("parseval.json")).unwrap()).unwrap();
    assert_eq!(artifacts["permutation"].as_array().unwrap().len(), 3);
    assert_eq!(artifacts["pivots"].as_array().unwrap().len(), 3);
    assert_eq!(artifacts["duals"].as_array().unwrap().len(), 3);

    let projections = out.join("projections.json");
    assert_eq!(cmd_verify(&projections, Target::Identity, None, &tol(), None).unwrap(), 0);
}

#[test]
fn construct_diagonal_then_verify_diagonal() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("diag");

    let kind = ConstructKind::Diagonal {
        ambient: 4,
        kept: vec![0, 1],
        entries: vec![3.0, 1.0],
        adjustable: None,
        output: out.clone(),
    };
    assert_eq!(cmd_construct(&kind, &tol()).unwrap(), 0);

    let report = ReportFile::load(&out.join("report.json")).unwrap();
    assert!(report.is_diagonal);
    assert!((report.operator[0][0] - 3.0).abs() < 1e-9);
    assert!((report.operator[1][1] - 1.0).abs() < 1e-9);

    let sub = SubspaceFile::load(&out.join("subspace.json")).unwrap();
    assert_eq!(sub.ambient_dim, 4);
    assert_eq!(sub.subspaces.len(), 1);
    assert!(sub.subspaces[0].nullspace.is_some());

    let projections = out.join("projections.json");
    assert_eq!(cmd_verify(&projections, Target::Diagonal, None, &tol(), None).unwrap(), 0);
    // One projection alone cannot bound the whole space from below.
    assert_eq!(cmd_verify(&projections, Target::Frame, None, &tol(), None).unwrap(), 2);
}

#[test]
fn construct_diagonal_rejects_entries_below_one() {
    let dir = TempDir::new().unwrap();
    let kind = ConstructKind::Diagonal {
        ambient: 4,
        kept: vec![0, 1],
        entries: vec![0.5, 1.0],
        adjustable: None,
        output: dir.path().join("bad"),
    };
    let err = cmd_construct(&kind, &tol()).unwrap_err();
    assert!(err.to_string().contains("below 1"));
}

#[test]
fn construct_residual_chain_spectrum_and_flat_case() {
    let dir = TempDir::new().unwrap();

    // k=2, levels=2, residue=1 on R^5: spectrum 2,3,3,3,4.
    let out = dir.path().join("rc");
    let kind = ConstructKind::ResidualChain { k: 2, levels: 2, residue: 1, output: out.clone() };
    assert_eq!(cmd_construct(&kind, &tol()).unwrap(), 0);

    let family: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("family.json")).unwrap()).unwrap();
    let spectrum: Vec<f64> = family["achieved_spectrum"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    let expected = [2.0, 3.0, 3.0, 3.0, 4.0];
    assert_eq!(spectrum.len(), expected.len());
    for (got, want) in spectrum.iter().zip(expected) {
        assert!((got - want).abs() < 1e-9);
    }
    assert!(family["constant"].is_null());
    assert_eq!(cmd_verify(&out.join("projections.json"), Target::Frame, None, &tol(), None).unwrap(), 0);

    // Residue k splits evenly: k=2, levels=1, residue=1 on R^3 is 2I.
    let flat = dir.path().join("flat");
    let kind = ConstructKind::ResidualChain { k: 2, levels: 1, residue: 1, output: flat.clone() };
    assert_eq!(cmd_construct(&kind, &tol()).unwrap(), 0);
    assert_eq!(
        cmd_verify(&flat.join("projections.json"), Target::Identity, Some(2.0), &tol(), None)
            .unwrap(),
        0
    );
}

#[test]
fn construct_tight_chain_coordinate_and_transported() {
    let dir = TempDir::new().unwrap();

    let out = dir.path().join("tc");
    let kind = ConstructKind::TightChain {
        k: Some(2),
        levels: Some(3),
        input: None,
        output: out.clone(),
    };
    assert_eq!(cmd_construct(&kind, &tol()).unwrap(), 0);
    assert_eq!(
        cmd_verify(&out.join("projections.json"), Target::Identity, Some(3.0), &tol(), None)
            .unwrap(),
        0
    );

    // Transported onto a stored plane of R^4.
    let input = dir.path().join("w4.json");
    write(
        &input,
        r#"{
  "ambient_dim": 4,
  "subspaces": [
    { "basis": [[1.0, 0.0], [0.0, 1.0], [1.0, 0.0], [0.0, -1.0]] }
  ]
}"#,
    );
    let general = dir.path().join("tcg");
    let kind = ConstructKind::TightChain {
        k: None,
        levels: None,
        input: Some(input),
        output: general.clone(),
    };
    assert_eq!(cmd_construct(&kind, &tol()).unwrap(), 0);
    assert_eq!(
        cmd_verify(&general.join("projections.json"), Target::Tight, Some(2.0), &tol(), None)
            .unwrap(),
        0
    );

    // Neither input nor the full coordinate description is usable.
    let kind = ConstructKind::TightChain {
        k: Some(2),
        levels: None,
        input: None,
        output: dir.path().join("nope"),
    };
    let err = cmd_construct(&kind, &tol()).unwrap_err();
    assert!(err.to_string().contains("--input FILE or both --k and --levels"));
}

#[test]
fn verify_flags_non_idempotent_matrix() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("p.json");
    write(&input, NOT_IDEMPOTENT);
    assert_eq!(cmd_verify(&input, Target::Frame, None, &tol(), None).unwrap(), 2);
}

#[test]
fn verify_writes_report_when_asked() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("pair");
    write(&dir.path().join("w.json"), TILTED_PLANE);
    let kind = ConstructKind::TightPair { input: dir.path().join("w.json"), output: out.clone() };
    cmd_construct(&kind, &tol()).unwrap();

    let report_path = dir.path().join("verified.json");
    let code = cmd_verify(
        &out.join("projections.json"),
        Target::Frame,
        None,
        &tol(),
        Some(&report_path),
    )
    .unwrap();
    assert_eq!(code, 0);
    let report = ReportFile::load(&report_path).unwrap();
    assert!(report.is_frame);
}

#[test]
fn construct_outputs_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        let kind = ConstructKind::ResidualChain {
            k: 3,
            levels: 2,
            residue: 2,
            output: out.clone(),
        };
        assert_eq!(cmd_construct(&kind, &tol()).unwrap(), 0);
    }
    for name in ["projections.json", "report.json", "family.json"] {
        assert_eq!(
            fs::read(a.join(name)).unwrap(),
            fs::read(b.join(name)).unwrap(),
            "{name} differs between identical runs"
        );
    }
}

#[test]
fn gen_frame_feeds_parseval() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("frame.csv");
    let kind = GenKind::Frame { ambient: 3, count: 5, seed: 11, output: csv.clone() };
    assert_eq!(cmd_gen(&kind, &tol()).unwrap(), 0);

    let vectors = read_frame_csv(&csv).unwrap();
    assert_eq!(vectors.len(), 5);
    assert!(vectors.iter().all(|v| v.len() == 3));

    let out = dir.path().join("pv");
    let kind = ConstructKind::Parseval {
        input: csv,
        rule: RuleArg::GroupSum,
        output: out.clone(),
    };
    assert_eq!(cmd_construct(&kind, &tol()).unwrap(), 0);
    assert_eq!(
        cmd_verify(&out.join("projections.json"), Target::Identity, None, &tol(), None).unwrap(),
        0
    );
}

#[test]
fn gen_subspace_feeds_oblique_analysis() {
    let dir = TempDir::new().unwrap();
    let sub = dir.path().join("sub.json");
    let kind = GenKind::Subspace {
        ambient: 4,
        dims: vec![2, 2, 1],
        seed: 3,
        with_nullspaces: true,
        output: sub.clone(),
    };
    assert_eq!(cmd_gen(&kind, &tol()).unwrap(), 0);

    let file = SubspaceFile::load(&sub).unwrap();
    assert_eq!(file.subspaces.len(), 3);
    assert!(file.subspaces.iter().all(|s| s.nullspace.is_some()));

    let report_path = dir.path().join("report.json");
    let code = cmd_analyze(&sub, Strategy::Oblique, &tol(), &report_path).unwrap();
    assert_eq!(code, 0);
    assert!(ReportFile::load(&report_path).unwrap().is_frame);
}

#[test]
fn gen_subspace_dims_must_fit() {
    let dir = TempDir::new().unwrap();
    let kind = GenKind::Subspace {
        ambient: 3,
        dims: vec![4],
        seed: 0,
        with_nullspaces: false,
        output: dir.path().join("sub.json"),
    };
    let err = cmd_gen(&kind, &tol()).unwrap_err();
    assert!(err.to_string().contains("out of range"));
}

// Process-level checks of the installed binary and its exit codes.

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fusionframes"))
}

fn fixture(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path
}

#[test]
fn bin_help_exits_zero() {
    let status = bin().arg("--help").output().unwrap();
    assert!(status.status.success());
}

#[test]
fn bin_unknown_flag_exits_one() {
    let out = bin().args(["analyze", "--nope"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bin_analyze_pair_exits_zero() {
    let dir = TempDir::new().unwrap();
    let input = fixture(&dir, "pair.json", OBLIQUE_PAIR);
    let report = dir.path().join("report.json");
    let out = bin()
        .args(["analyze", "--strategy", "oblique"])
        .arg("--input")
        .arg(&input)
        .arg("--output")
        .arg(&report)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(report.exists());
}

#[test]
fn bin_verify_non_idempotent_exits_two() {
    let dir = TempDir::new().unwrap();
    let input = fixture(&dir, "p.json", NOT_IDEMPOTENT);
    let out = bin()
        .args(["verify", "--target", "frame"])
        .arg("--input")
        .arg(&input)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not idempotent"));
}

#[test]
fn bin_construct_rejects_bad_diagonal_entry() {
    let dir = TempDir::new().unwrap();
    let out = bin()
        .args(["construct", "diagonal", "--ambient", "4", "--kept", "0,1", "--entries", "0.5,1"])
        .arg("--output")
        .arg(dir.path().join("bad"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("below 1"));
}

#[test]
fn bin_rejects_bad_tolerance_flag() {
    let dir = TempDir::new().unwrap();
    let input = fixture(&dir, "pair.json", OBLIQUE_PAIR);
    let out = bin()
        .args(["--tol-rank=-1", "analyze", "--strategy", "orthogonal"])
        .arg("--input")
        .arg(&input)
        .arg("--output")
        .arg(dir.path().join("r.json"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("finite and positive"));
}
