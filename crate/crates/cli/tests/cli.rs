use std::process::{Command, Output};

fn etaforge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_etaforge"))
        .args(args)
        .env_remove("ETAFORGE_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("valid JSON on stdout")
}

#[test]
fn eval_at_i() {
    let o = etaforge(&["eval", "--tau", "0+1i"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("0.768225422326"), "{}", stdout(&o));
}

#[test]
fn eval_at_10i_is_leading_term() {
    let o = etaforge(&["eval", "--tau", "0+10i", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let re = v["value"]["re"].as_f64().unwrap();
    let lead = (-10.0 * std::f64::consts::PI / 12.0).exp();
    assert!((re - lead).abs() < 1e-15 * lead);
}

#[test]
fn eval_transformed_near_real_axis() {
    let o = etaforge(&["eval", "--tau", "0.5+0.001i", "--method", "transformed", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert!(v["value"]["re"].as_f64().unwrap().is_finite());
    assert!(v["value"]["im"].as_f64().unwrap().is_finite());
    assert!(v["tail_bound"].as_f64().unwrap() <= 1e-12);
}

#[test]
fn eval_auto_switches_below_threshold() {
    let low = json(&etaforge(&["eval", "--tau", "0.1+0.01i", "--format", "json"]));
    assert_eq!(low["method"], "transformed");
    let high = json(&etaforge(&["eval", "--tau", "0.1+0.5i", "--format", "json"]));
    assert_eq!(high["method"], "pentagonal");
}

#[test]
fn eval_methods_agree() {
    let vals: Vec<f64> = ["product", "pentagonal", "character", "transformed"]
        .iter()
        .map(|m| {
            let v = json(&etaforge(&["eval", "--tau", "-0.3+0.4i", "--method", m, "--format", "json"]));
            v["value"]["re"].as_f64().unwrap()
        })
        .collect();
    for v in &vals {
        assert!((v - vals[0]).abs() < 1e-12 * vals[0].abs(), "{vals:?}");
    }
}

#[test]
fn eval_rejects_lower_half_plane_and_garbage() {
    assert_eq!(etaforge(&["eval", "--tau", "0-1i"]).status.code(), Some(2));
    assert_eq!(etaforge(&["eval", "--tau", "0+0i"]).status.code(), Some(2));
    assert_eq!(etaforge(&["eval", "--tau", "one"]).status.code(), Some(2));
    assert_eq!(etaforge(&["eval", "--tau", "0+1i", "--tol", "0"]).status.code(), Some(2));
}

#[test]
fn dedekind_examples() {
    assert_eq!(stdout(&etaforge(&["dedekind", "5", "7"])).trim(), "-1/14");
    assert_eq!(stdout(&etaforge(&["dedekind", "0", "1"])).trim(), "0");
    let o = etaforge(&["dedekind", "1", "3", "--mode", "both"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "naive: 1/18\nfast: 1/18\nequal\n");
    assert_eq!(stdout(&etaforge(&["dedekind", "-5", "7"])).trim(), "1/14");
}

#[test]
fn dedekind_domain_errors() {
    assert_eq!(etaforge(&["dedekind", "1", "0"]).status.code(), Some(2));
    assert_eq!(etaforge(&["dedekind", "2", "4"]).status.code(), Some(2));
    // The bare definition does not need coprimality.
    assert_eq!(etaforge(&["dedekind", "2", "4", "--mode", "naive"]).status.code(), Some(0));
}

#[test]
fn dedekind_huge_modulus() {
    let o = etaforge(&["dedekind", "123456789012345678901", "1000000000000000000000000000057"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains('/'));
}

#[test]
fn decompose_examples() {
    assert_eq!(stdout(&etaforge(&["decompose", "0", "-1", "1", "0"])).trim(), "S");
    assert_eq!(stdout(&etaforge(&["decompose", "1", "5", "0", "1"])).trim(), "T^5");
    let o = etaforge(&["decompose", "2", "1", "1", "1", "--check"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "T^2 S T\ncheck OK\n");
}

#[test]
fn decompose_rejects_non_unimodular() {
    assert_eq!(etaforge(&["decompose", "1", "1", "1", "1"]).status.code(), Some(2));
    assert_eq!(etaforge(&["decompose", "2", "0", "0", "2"]).status.code(), Some(2));
}

#[test]
fn verify_pentagonal_passes() {
    let o = etaforge(&["verify", "pentagonal", "--order", "1000", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["campaign"], "pentagonal");
    assert_eq!(v["max_residual"], 0.0);
    assert_eq!(v["failures"].as_array().unwrap().len(), 0);
}

#[test]
fn verify_functional_eq_seeded() {
    let o = etaforge(&["verify", "functional-eq", "--trials", "1000", "--seed", "42", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert!(v["max_residual"].as_f64().unwrap() < 1e-10);
    assert_eq!(v["seed"], 42);
}

#[test]
fn verify_omega_passes() {
    let o = etaforge(&["verify", "omega", "--trials", "10000"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("PASS omega"));
}

#[test]
fn verify_json_is_byte_identical_per_seed() {
    let args = ["verify", "theta", "--trials", "50", "--seed", "7", "--format", "json"];
    let a = etaforge(&args);
    let b = etaforge(&args);
    let mut seq_args = args.to_vec();
    seq_args.push("--sequential");
    let c = etaforge(&seq_args);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    let other = etaforge(&["verify", "theta", "--trials", "50", "--seed", "8", "--format", "json"]);
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn verify_seed_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_etaforge"))
        .args(["verify", "poisson", "--trials", "5", "--format", "json"])
        .env("ETAFORGE_SEED", "99")
        .output()
        .unwrap();
    assert_eq!(json(&o)["seed"], 99);
    // An explicit flag wins.
    let o = Command::new(env!("CARGO_BIN_EXE_etaforge"))
        .args(["verify", "poisson", "--trials", "5", "--seed", "3", "--format", "json"])
        .env("ETAFORGE_SEED", "99")
        .output()
        .unwrap();
    assert_eq!(json(&o)["seed"], 3);
}

#[test]
fn verify_failure_exit_code_lists_inputs() {
    // A threshold below rounding error forces failures.
    let o = etaforge(&["verify", "poisson", "--trials", "5", "--tol", "1e-300"]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.starts_with("FAIL poisson"));
    assert!(text.contains("failed: u="), "{text}");
}

#[test]
fn verify_usage_errors() {
    assert_eq!(etaforge(&["verify", "nope"]).status.code(), Some(2));
    assert_eq!(etaforge(&["verify", "omega", "--trials", "0"]).status.code(), Some(2));
    assert_eq!(etaforge(&["verify", "theta", "--tol", "-1"]).status.code(), Some(2));
    assert_eq!(etaforge(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn verify_writes_report_file() {
    let path = std::env::temp_dir().join(format!("etaforge-report-{}.json", std::process::id()));
    let p = path.to_str().unwrap();
    let o = etaforge(&["verify", "jtp", "--order", "40", "--format", "json", "--out", p]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(v["campaign"], "jtp");
    assert_eq!(v["trials"], 4);
}

#[test]
fn verify_all_json_wraps_reports() {
    let o = etaforge(&[
        "verify", "all", "--order", "30", "--trials", "20", "--format", "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["passed"], true);
    let names: Vec<&str> = v["reports"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["campaign"].as_str().unwrap())
        .collect();
    assert_eq!(
        names,
        ["jtp", "pentagonal", "reciprocity", "functional-eq", "theta", "poisson", "omega"]
    );
}
