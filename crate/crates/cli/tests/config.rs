use std::path::Path;

use num_complex::Complex64;
use singular_nls::grid::{write_snapshot, BoundaryCondition};
use singular_nls::solver::Profile;
use singular_nls_cli::{run_experiment, CEffSource, CliError, ExperimentConfig, ForcingSpec};

fn sample() -> ExperimentConfig {
    let text = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/bump_1d.json")).unwrap();
    ExperimentConfig::from_json(&text).unwrap()
}

#[test]
fn profile_json_round_trip() {
    let profiles = [
        Profile::Zero,
        Profile::bump(vec![0.1, -0.2], 0.5, 2.0, Complex64::new(1.0, -0.5)),
        Profile::Gaussian { center: vec![0.0], rate: 3.0, amplitude: Complex64::new(0.0, 2.0) },
        Profile::Annulus { center: vec![0.0], mid: 1.0, half_width: 0.2, power: 3.0, amplitude: Complex64::new(1.0, 0.0) },
    ];
    for p in profiles {
        let text = serde_json::to_string(&p).unwrap();
        assert_eq!(serde_json::from_str::<Profile>(&text).unwrap(), p, "{text}");
    }
    let amp = serde_json::to_value(Profile::bump(vec![0.0], 1.0, 2.0, Complex64::new(1.5, -2.0))).unwrap();
    assert_eq!(amp["amplitude"], serde_json::json!([1.5, -2.0]));
}

#[test]
fn config_json_round_trip() {
    let cfg = sample();
    let back = ExperimentConfig::from_json(&cfg.canonical_json()).unwrap();
    assert_eq!(back, cfg);
    assert_eq!(cfg.problem.a, Complex64::new(0.0, 1.0));
    assert_eq!(cfg.analysis.c_eff, CEffSource::Fixed(1.0));
    assert_eq!(cfg.solver.eps_min, 1e-10);
}

#[test]
fn c_eff_accepts_number_or_calibrate() {
    let mut v: serde_json::Value = serde_json::from_str(&sample().canonical_json()).unwrap();
    v["analysis"]["c_eff"] = serde_json::json!("calibrate");
    let cfg: ExperimentConfig = serde_json::from_value(v.clone()).unwrap();
    assert_eq!(cfg.analysis.c_eff, CEffSource::Calibrate);
    v["analysis"]["c_eff"] = serde_json::json!("guess");
    assert!(serde_json::from_value::<ExperimentConfig>(v).is_err());
}

#[test]
fn unknown_keys_are_rejected() {
    let mut v: serde_json::Value = serde_json::from_str(&sample().canonical_json()).unwrap();
    v["analysis"]["rho2"] = serde_json::json!(1.0);
    assert!(serde_json::from_value::<ExperimentConfig>(v).is_err());
}

fn invalid(cfg: &ExperimentConfig) -> String {
    match cfg.validate(Path::new(".")) {
        Err(CliError::ConfigInvalid(msg)) => msg,
        other => panic!("expected ConfigInvalid, got {other:?}"),
    }
}

#[test]
fn validation_catches_bad_inputs() {
    let mut cfg = sample();
    cfg.analysis.rho0 = 0.8;
    assert!(invalid(&cfg).contains("rho0"));

    let mut cfg = sample();
    cfg.analysis.x0 = vec![vec![0.0, 0.0]];
    assert!(invalid(&cfg).contains("coordinates"));

    let mut cfg = sample();
    cfg.problem.a = Complex64::new(-1.0, 0.0);
    assert!(invalid(&cfg).contains("condition (ab)"));

    let mut cfg = sample();
    cfg.problem.forcing = ForcingSpec::File("no/such/file.snap".into());
    assert!(invalid(&cfg).contains("does not exist"));

    let mut cfg = sample();
    cfg.problem.bc = BoundaryCondition::None;
    assert!(invalid(&cfg).contains("bc"));
}

#[test]
fn file_forcing_matches_analytic_forcing() {
    let cfg = sample();
    let dir = tempfile::tempdir().unwrap();
    let f = cfg.forcing(Path::new(".")).unwrap();
    std::fs::write(dir.path().join("f.snap"), write_snapshot(&f)).unwrap();
    let mut from_file = cfg.clone();
    from_file.problem.forcing = ForcingSpec::File("f.snap".into());
    let text = serde_json::to_string(&from_file).unwrap();
    assert!(text.contains(r#""forcing":{"file":"f.snap"}"#), "{text}");

    let a = run_experiment(&cfg, Path::new(".")).unwrap();
    let b = run_experiment(&from_file, dir.path()).unwrap();
    assert_eq!(a.files, b.files);
    assert_ne!(a.manifest.input_sha256, b.manifest.input_sha256);
}

#[test]
fn wrong_grid_forcing_file_is_rejected() {
    let cfg = sample();
    let dir = tempfile::tempdir().unwrap();
    let mut coarse = cfg.clone();
    coarse.problem.h = 0.02;
    let f = coarse.forcing(Path::new(".")).unwrap();
    std::fs::write(dir.path().join("f.snap"), write_snapshot(&f)).unwrap();
    let mut from_file = cfg;
    from_file.problem.forcing = ForcingSpec::File("f.snap".into());
    assert!(matches!(from_file.forcing(dir.path()), Err(CliError::ConfigInvalid(_))));
}
