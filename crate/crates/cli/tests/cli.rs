use std::path::PathBuf;
use std::process::{Command, Output};

use qhc_cli::report::*;
use qhc_core::{Condition, IndexMap, SampleReport};
use serde::de::DeserializeOwned;

const LN2: f64 = std::f64::consts::LN_2;

fn fixture(name: &str) -> String {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "fixtures", name]
        .iter()
        .collect();
    path.to_string_lossy().into_owned()
}

fn qhc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qhc"))
        .args(args)
        .env_remove("QHC_SEED")
        .output()
        .expect("failed to launch qhc")
}

fn report<T: DeserializeOwned>(out: &Output) -> T {
    let text = String::from_utf8_lossy(&out.stdout);
    serde_json::from_str(&text).unwrap_or_else(|e| panic!("schema mismatch: {e}\n{text}"))
}

fn write_temp(dir: &tempfile::TempDir, name: &str, body: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn validate_maximally_mixed() {
    let out = qhc(&["validate", &fixture("maximally_mixed_4.json")]);
    assert_eq!(out.status.code(), Some(0));
    let r: ValidateReport = report(&out);
    assert!(r.valid);
    assert_eq!(r.dim, 4);
}

#[test]
fn validate_names_trace_violation() {
    let out = qhc(&["validate", &fixture("trace_1_5.json")]);
    assert_eq!(out.status.code(), Some(2));
    let r: ValidateReport = report(&out);
    assert!(!r.valid);
    assert!(r.verdict.contains("trace"));
    let v = r.violation.unwrap();
    assert_eq!(v.condition, Condition::Trace);
    assert!((v.magnitude - 0.5).abs() < 1e-15);
}

#[test]
fn validate_missing_file() {
    let out = qhc(&["validate", "/definitely/not/here.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
}

#[test]
fn malformed_json_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_temp(&dir, "bad.json", "{\"probs\": [0.5,\n  0.5,,]}");
    let out = qhc(&["validate", &path]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2"), "{err}");
    assert!(err.contains("column"), "{err}");
}

#[test]
fn validate_classifies_every_kind() {
    let dir = tempfile::tempdir().unwrap();
    let negative = write_temp(&dir, "neg.json", r#"{"probs":[1.5,-0.5]}"#);
    let out = qhc(&["validate", &negative]);
    assert_eq!(out.status.code(), Some(2));
    let r: ValidateReport = report(&out);
    assert_eq!(r.violation.unwrap().condition, Condition::Nonnegativity);

    let out = qhc(&["validate", &fixture("roulette_observable.json")]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report::<ValidateReport>(&out).kind, "observable");

    let out = qhc(&[
        "validate",
        "--matrix-as",
        "observable",
        &fixture("sigma_z.json"),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report::<ValidateReport>(&out).kind, "quantum-observable");

    // σz is Hermitian but has trace 0 and a negative eigenvalue
    let out = qhc(&["validate", &fixture("sigma_z.json")]);
    assert_eq!(out.status.code(), Some(2));

    let ragged = write_temp(
        &dir,
        "ragged.json",
        r#"{"dim":2,"entries":[[[1,0],[0,0]],[[0,0]]]}"#,
    );
    let out = qhc(&["validate", &ragged]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(
        report::<ValidateReport>(&out).violation.unwrap().condition,
        Condition::Shape
    );
}

#[test]
fn analyze_uniform_has_no_mutual_information() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_temp(&dir, "u.json", r#"{"probs":[0.25,0.25,0.25,0.25]}"#);
    let out = qhc(&["analyze", &path, "--map", "2x2"]);
    assert_eq!(out.status.code(), Some(0));
    let r: AnalyzeReport = report(&out);
    let part = &r.partitions[0];
    assert!(part.mutual_information.unwrap().abs() < 1e-15);
    assert!(part.subadditivity.unwrap().slack.abs() < 1e-15);
    assert!((r.entropy - 4f64.ln()).abs() < 1e-15);
}

#[test]
fn analyze_correlated_slack_is_ln2() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_temp(&dir, "c.json", r#"{"probs":[0.5,0,0,0.5]}"#);
    let out = qhc(&["analyze", &path, "--map", "2x2"]);
    let r: AnalyzeReport = report(&out);
    let slack = r.partitions[0].subadditivity.unwrap().slack;
    assert!((slack - LN2).abs() < 1e-12);
}

#[test]
fn analyze_all_partitions_of_twelve() {
    let dir = tempfile::tempdir().unwrap();
    let probs: Vec<f64> = (1..=12).map(|s| s as f64 / 78.0).collect();
    let path = write_temp(
        &dir,
        "s.json",
        &serde_json::json!({ "probs": probs }).to_string(),
    );
    let out = qhc(&["analyze", &path, "--all-partitions"]);
    assert_eq!(out.status.code(), Some(0));
    let r: AnalyzeReport = report(&out);
    let factors: Vec<Vec<usize>> = r
        .partitions
        .iter()
        .map(|p| p.map.factors().to_vec())
        .collect();
    assert_eq!(
        factors,
        vec![vec![2, 6], vec![3, 4], vec![4, 3], vec![6, 2]]
    );
    assert!(r.partitions.iter().all(|p| p.subadditivity.unwrap().holds));
    assert!(r.note.is_none());
}

#[test]
fn analyze_prime_dimension_has_no_partitions() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_temp(&dir, "p.json", r#"{"probs":[0.2,0.2,0.2,0.2,0.2]}"#);
    let out = qhc(&["analyze", &path, "--all-partitions"]);
    assert_eq!(out.status.code(), Some(0));
    let r: AnalyzeReport = report(&out);
    assert!(r.partitions.is_empty());
    assert_eq!(r.note.as_deref(), Some(NO_PARTITIONS));
}

#[test]
fn analyze_tripartite_reports_ssa() {
    let out = qhc(&[
        "analyze",
        &fixture("tripartite_state.json"),
        "--map-file",
        &fixture("tripartite_map.json"),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r: AnalyzeReport = report(&out);
    let part = &r.partitions[0];
    assert!(part.strong_subadditivity.unwrap().holds);
    assert!(part.subadditivity.is_none());
    assert_eq!(part.marginals.len(), 3);
}

#[test]
fn analyze_dimension_mismatch() {
    let out = qhc(&["analyze", &fixture("roulette_state.json"), "--map", "2x3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn hidden_roulette_identity() {
    let out = qhc(&[
        "hidden",
        &fixture("roulette_state.json"),
        &fixture("roulette_observable.json"),
        "--map-file",
        &fixture("roulette_map.json"),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r: HiddenReport = report(&out);
    assert!(r.product_form);
    assert_eq!(r.verdict, PRODUCT_FORM);
    assert!(r.difference.unwrap().abs() <= 1e-12);
    assert!((r.mean - r.correlation.unwrap()).abs() <= 1e-12);

    // lifts are gauge-scaled copies of F'₁ = (1,1,−1,−1) and F'₂ = (1,−1,1,−1)
    let lifts = r.lifts.unwrap();
    let expect = [[1.0, 1.0, -1.0, -1.0], [1.0, -1.0, 1.0, -1.0]];
    let c0 = lifts[0][0];
    let c1 = lifts[1][0];
    assert!((c0 * c1 - 1.0).abs() < 1e-12);
    for (lift, (want, c)) in lifts.iter().zip(expect.iter().zip([c0, c1])) {
        for (got, w) in lift.iter().zip(want) {
            assert!((got - c * w).abs() < 1e-12);
        }
    }
}

#[test]
fn hidden_rejects_rank_two() {
    let out = qhc(&[
        "hidden",
        &fixture("roulette_state.json"),
        &fixture("roulette_rank2_observable.json"),
        "--map",
        "2x2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r: HiddenReport = report(&out);
    assert!(!r.product_form);
    assert_eq!(r.verdict, NOT_PRODUCT_FORM);
    assert!(r.residual > 0.1);
    assert!(r.factors.is_none());
}

#[test]
fn hidden_constant_observable() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_temp(&dir, "c.json", r#"{"values":[2.5,2.5,2.5,2.5]}"#);
    let out = qhc(&[
        "hidden",
        &fixture("roulette_state.json"),
        &path,
        "--map",
        "2x2",
    ]);
    let r: HiddenReport = report(&out);
    assert!(r.product_form);
    assert!((r.correlation.unwrap() - 2.5).abs() < 1e-12);
}

#[test]
fn hidden_tripartite_fixture() {
    let out = qhc(&[
        "hidden",
        &fixture("tripartite_state.json"),
        &fixture("tripartite_observable.json"),
        "--map",
        "2x2x2",
    ]);
    let r: HiddenReport = report(&out);
    assert!(r.product_form);
    assert_eq!(r.lifts.unwrap().len(), 3);
    assert!(r.difference.unwrap().abs() <= 1e-12);
}

#[test]
fn hidden_requires_a_map_and_positive_tol() {
    let state = fixture("roulette_state.json");
    let obs = fixture("roulette_observable.json");
    assert_eq!(qhc(&["hidden", &state, &obs]).status.code(), Some(1));
    assert_eq!(
        qhc(&["hidden", &state, &obs, "--map", "2x2", "--tol", "0"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        qhc(&["hidden", &state, &obs, "--map", "2xq"]).status.code(),
        Some(1)
    );
}

#[test]
fn quantum_bell_like_reduced_entropies() {
    let out = qhc(&[
        "quantum",
        &fixture("bell_like.json"),
        &fixture("sigma_z.json"),
        &fixture("sigma_z.json"),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r: QuantumReport = report(&out);
    assert!(r.entropy.abs() < 1e-12);
    for s in &r.reduced_entropies {
        assert!((s - LN2).abs() < 1e-12);
    }
    let sa = r.subadditivity.unwrap();
    assert!((sa.slack - 2.0 * LN2).abs() < 1e-12);
    // σz⊗σz on (|00⟩+|11⟩)/√2
    assert!((r.trace_value - 1.0).abs() < 1e-12);
    assert!(r.difference.abs() <= 1e-12);
    assert_eq!(r.map, IndexMap::row_major(&[2, 2]).unwrap());
}

#[test]
fn quantum_identity_factors_give_one() {
    let out = qhc(&[
        "quantum",
        &fixture("maximally_mixed_4.json"),
        &fixture("identity_2.json"),
        &fixture("identity_2.json"),
    ]);
    let r: QuantumReport = report(&out);
    assert!((r.trace_value - 1.0).abs() < 1e-12);
    assert!((r.lifted_value - 1.0).abs() < 1e-12);
    assert!(r.commutator_norms.iter().all(|c| c.norm == 0.0));
}

#[test]
fn quantum_random_instance() {
    let dir = tempfile::tempdir().unwrap();
    let rho = qhc_core::sampler::random_density(6, 17).unwrap();
    let a = qhc_core::sampler::random_hermitian(2, 18);
    let b = qhc_core::sampler::random_hermitian(3, 19);
    let rho_path = write_temp(&dir, "rho.json", &qhc_core::json::to_string(&rho).unwrap());
    let a_path = write_temp(&dir, "a.json", &qhc_core::json::to_string(&a).unwrap());
    let b_path = write_temp(&dir, "b.json", &qhc_core::json::to_string(&b).unwrap());
    let out = qhc(&["quantum", &rho_path, &a_path, &b_path]);
    assert_eq!(out.status.code(), Some(0));
    let r: QuantumReport = report(&out);
    assert!(r.difference.abs() <= 1e-12);
    assert!(r.commutator_norms[0].norm <= 1e-12);
}

#[test]
fn quantum_dimension_mismatch() {
    let out = qhc(&[
        "quantum",
        &fixture("bell_like.json"),
        &fixture("sigma_z.json"),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn quantum_rejects_col_major_map() {
    let out = qhc(&[
        "quantum",
        &fixture("bell_like.json"),
        &fixture("sigma_z.json"),
        &fixture("sigma_z.json"),
        "--map",
        "2x2",
        "--convention",
        "col-major",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sample_point_mass_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_temp(&dir, "pm.json", r#"{"probs":[0,0,1,0]}"#);
    let out = qhc(&[
        "sample",
        &path,
        &fixture("roulette_observable.json"),
        "--samples",
        "1000",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r: SampleReport = report(&out);
    assert_eq!(r.empirical_mean, -1.0);
    assert_eq!(r.prng, "splitmix64");
}

#[test]
fn sample_roulette_converges() {
    let l = 1_000_000u64;
    let out = qhc(&[
        "sample",
        &fixture("roulette_state.json"),
        &fixture("roulette_observable.json"),
        "--samples",
        &l.to_string(),
        "--seed",
        "11",
    ]);
    let r: SampleReport = report(&out);
    assert_eq!(r.exact_mean, 0.0);
    assert!(r.empirical_mean.abs() <= 5.0 / (l as f64).sqrt());
    assert_eq!(r.seed, 11);
}

#[test]
fn sample_is_reproducible_and_honours_env_seed() {
    let args = [
        "sample",
        &fixture("roulette_state.json"),
        &fixture("roulette_observable.json"),
        "--samples",
        "5000",
        "--seed",
        "42",
    ];
    let a = qhc(&args);
    let b = qhc(&args);
    assert_eq!(a.stdout, b.stdout);

    let env = Command::new(env!("CARGO_BIN_EXE_qhc"))
        .args(&args[..5])
        .env("QHC_SEED", "42")
        .output()
        .unwrap();
    assert_eq!(env.stdout, a.stdout);
}

#[test]
fn sample_density_matrix_matches_classical_path() {
    let quantum = qhc(&[
        "sample",
        &fixture("maximally_mixed_4.json"),
        &fixture("roulette_observable.json"),
        "--samples",
        "2000",
        "--seed",
        "5",
    ]);
    let dir = tempfile::tempdir().unwrap();
    let uniform = write_temp(&dir, "u.json", r#"{"probs":[0.25,0.25,0.25,0.25]}"#);
    let classical = qhc(&[
        "sample",
        &uniform,
        &fixture("roulette_observable.json"),
        "--samples",
        "2000",
        "--seed",
        "5",
    ]);
    assert_eq!(quantum.status.code(), Some(0));
    assert_eq!(quantum.stdout, classical.stdout);
}

#[test]
fn sample_rejects_zero_samples() {
    let out = qhc(&[
        "sample",
        &fixture("roulette_state.json"),
        &fixture("roulette_observable.json"),
        "--samples",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let dest = dir.path().join("report.json");
    let out = qhc(&[
        "validate",
        &fixture("bell_like.json"),
        "--output",
        dest.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(dest).unwrap();
    let r: ValidateReport = serde_json::from_str(&text).unwrap();
    assert!(r.valid);
}

#[test]
fn fixture_maps_match_builtin_conventions() {
    let load = |name: &str| -> IndexMap {
        serde_json::from_str(&std::fs::read_to_string(fixture(name)).unwrap()).unwrap()
    };
    assert_eq!(
        load("roulette_map.json").table(),
        IndexMap::row_major(&[2, 2]).unwrap().table()
    );
    assert_eq!(
        load("col_major_3x2_map.json").table(),
        IndexMap::col_major(&[3, 2]).unwrap().table()
    );
    assert_eq!(
        load("tripartite_map.json").table(),
        IndexMap::row_major(&[2, 2, 2]).unwrap().table()
    );
}
