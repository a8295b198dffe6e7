use super::*;

#[test]
fn digest_is_stable_under_reserialization() {
    let c = ExperimentConfig::new(Scenario::Identity { n: 2, kmax: 3 }).with_seed(7);
    let text = serde_json::to_string(&c).unwrap();
    let back = ExperimentConfig::from_json(&text).unwrap();
    assert_eq!(c.digest().unwrap(), back.digest().unwrap());
    // Field order and the output path do not matter.
    let shuffled = r#"{"seed": 7, "kmax": 3, "output": "x.json", "n": 2, "scenario": "identity"}"#;
    assert_eq!(ExperimentConfig::from_json(shuffled).unwrap().digest().unwrap(), c.digest().unwrap());
    let other = c.clone().with_seed(8);
    assert_ne!(other.digest().unwrap(), c.digest().unwrap());
}

#[test]
fn config_validation() {
    assert!(ExperimentConfig::from_json(r#"{"scenario": "radius", "m": 5, "tolerance": -1}"#).is_err());
    assert!(ExperimentConfig::from_json(r#"{"scenario": "radius"}"#).is_err());
    assert!(ExperimentConfig::from_json(r#"{"scenario": "nope"}"#).is_err());
    assert!(ExperimentConfig::from_json("{not json").is_err());
    let c = ExperimentConfig::from_json(r#"{"scenario": "hfp-nonstrict"}"#).unwrap();
    assert_eq!(c.seed, DEFAULT_SEED);
    assert_eq!(c.tolerance(), 1e-5);
}

#[test]
fn identity_trivial_dimension() {
    let r = run_identity_regularization(1, 3).unwrap();
    assert!(r.passed, "{:?}", r.failures());
    for row in r.outputs.data["rows"].as_array().unwrap() {
        assert!((row["lower"].as_f64().unwrap() - 1.0).abs() < 1e-9);
        assert!((row["upper"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn identity_n2() {
    let r = run_identity_regularization(2, 3).unwrap();
    assert!(r.passed, "{:?}", r.failures());
    let rows = r.outputs.data["rows"].as_array().unwrap();
    assert!((rows[1]["root_lower"].as_f64().unwrap() - 2f64.sqrt()).abs() < 1e-6);
}

#[test]
fn radius_strictness_boundary() {
    let r5 = run_tensor_radius_strictness(5).unwrap();
    assert!(r5.passed, "{:?}", r5.failures());
    assert!(r5.outputs.flags["strict"]);
    assert!(r5.outputs.values["product_lower"] > 5.0 * 5f64.sqrt() - 1e-4);
    let r4 = run_tensor_radius_strictness(4).unwrap();
    assert!(r4.passed);
    assert!(!r4.outputs.flags["strict"]);
    assert!((r4.outputs.values["product_lower"] - 8.0).abs() < 1e-4);
    let r1 = run_tensor_radius_strictness(1).unwrap();
    assert!(!r1.outputs.flags["strict"]);
}

#[test]
fn hfp_nonstrict_values() {
    let r = run_hfp_nonstrict().unwrap();
    assert!(r.passed, "{:?}", r.failures());
    assert_eq!(r.outputs.values["epsilon"], 2.0);
    let g = r.outputs.bounds["gamma2"];
    assert!((g.lower - 2f64.sqrt()).abs() < 1e-5);
}

#[test]
fn hfp_complex_small() {
    let r = run_hfp_complex(6, 3).unwrap();
    assert!(r.outputs.checks["complex_ratio_within_tolerance"], "{:?}", r.outputs.values);
    assert!(r.outputs.checks["real_grothendieck_rail"]);
}

#[test]
fn rerun_reproduces_outputs() {
    let a = run_hfp_complex(3, 11).unwrap();
    let b = run_hfp_complex(3, 11).unwrap();
    assert_eq!(a.inputs_digest, b.inputs_digest);
    assert_eq!(a.outputs, b.outputs);
}

fn square() -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let k = vec![vec![1.0, 1.0], vec![1.0, -1.0], vec![-1.0, 1.0], vec![-1.0, -1.0]];
    let l = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, 0.0], vec![0.0, -1.0]];
    (k, l)
}

fn hexagon() -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let mut k = Vec::new();
    let mut l = Vec::new();
    let h = 3f64.sqrt() / 2.0;
    for j in 0..6 {
        let a = std::f64::consts::PI * j as f64 / 3.0;
        k.push(vec![a.cos(), a.sin()]);
        // Facet normals at the edge midpoints, at distance √3/2.
        let b = a + std::f64::consts::PI / 6.0;
        l.push(vec![b.cos() / h, b.sin() / h]);
    }
    (k, l)
}

#[test]
fn ellipse_square_half_scale_is_feasible() {
    let (k, l) = square();
    let r = run_ellipse_sandwich(&k, &l, &(DMatrix::identity(2, 2) * 0.5)).unwrap();
    assert!(r.passed);
    assert!(r.outputs.flags["feasible"]);
    let m = &r.outputs.data["ellipse_matrix"];
    assert!(m.is_array());
}

#[test]
fn ellipse_hexagon_itself_is_infeasible() {
    let (k, l) = hexagon();
    let r = run_ellipse_sandwich(&k, &l, &DMatrix::identity(2, 2)).unwrap();
    assert!(r.passed, "{:?}", r.outputs);
    assert!(!r.outputs.flags["feasible"]);
    // The best circle gives λ = 4/3; by symmetry the optimum is a circle.
    let lam = r.outputs.bounds["lambda"];
    assert!((lam.lower - 4.0 / 3.0).abs() < 1e-5 && (lam.upper - 4.0 / 3.0).abs() < 1e-5, "{lam:?}");
}

#[test]
fn ellipse_rejects_uncontained() {
    let (k, l) = square();
    let err = run_ellipse_sandwich(&k, &l, &(DMatrix::identity(2, 2) * 2.0)).unwrap_err();
    assert!(matches!(err, Error::NotContained(w) if (w - 2.0).abs() < 1e-12));
}

#[test]
fn atomic_write_replaces_file() {
    let dir = std::env::temp_dir().join(format!("tnl-atomic-{}", std::process::id()));
    let path = dir.join("out.json");
    write_atomic(&path, b"first").unwrap();
    write_atomic(&path, b"second").unwrap();
    assert_eq!(std::fs::read_to_string(&path).unwrap(), "second");
    let leftovers = std::fs::read_dir(&dir).unwrap().count();
    assert_eq!(leftovers, 1);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn cli_exit_codes() {
    assert_eq!(cli_main(["tnl", "experiment", "hfp-nonstrict"]), 0);
    assert_eq!(cli_main(["tnl", "bogus"]), 1);
    let dir = std::env::temp_dir().join(format!("tnl-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    std::fs::write(&bad, "{oops").unwrap();
    assert_eq!(cli_main(["tnl", "experiment", "--config", bad.to_str().unwrap()]), 1);
    // Square inside itself: conclusively no ellipse, which is a passing run.
    let (k, l) = square();
    let cfg = ExperimentConfig::new(Scenario::Ellipse { k_vertices: k, l_facets: l, t: vec![vec![1.0, 0.0], vec![0.0, 1.0]] });
    let path = dir.join("square.json");
    std::fs::write(&path, serde_json::to_string(&cfg).unwrap()).unwrap();
    assert_eq!(cli_main(["tnl", "experiment", "--config", path.to_str().unwrap()]), 0);
    // A tolerance below the net resolution makes the complex check fail.
    assert_eq!(cli_main(["tnl", "experiment", "--tolerance", "1e-15", "hfp-complex", "--trials", "2"]), 2);
    std::fs::remove_dir_all(dir).unwrap();
}
