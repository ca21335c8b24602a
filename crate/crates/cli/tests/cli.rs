use std::process::{Command, Output};

use serde_json::Value;

fn vmdgap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vmdgap"))
        .args(args)
        .env_remove("VMDGAP_BUDGET_DIM")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn periodic_roots_of_four_sites() {
    let doc = json(&vmdgap(&["tilings", "--L", "4", "--family", "per"]));
    assert_eq!(doc["root_count"], 7);
    assert_eq!(doc["expected_root_count"], "7");
    assert_eq!(doc["roots"].as_array().unwrap().len(), 7);
}

#[test]
fn too_short_chain_is_a_usage_error() {
    let out = vmdgap(&["tilings", "--L", "3", "--family", "per"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
}

#[test]
fn unknown_family_is_a_usage_error() {
    let out = vmdgap(&["tilings", "--L", "6", "--family", "zigzag"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bulk_roots_match_their_count() {
    for len in [6, 9, 12] {
        let l = len.to_string();
        let out = vmdgap(&["tilings", "--L", &l, "--family", "obc-bulk", "--roots-only", "--format", "csv"]);
        assert!(out.status.success());
        let text = stdout(&out);
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("root,config,particles,class_size"));
        let rows = lines.count() as u128;
        assert_eq!(rows, vmdgap::tiling::count_bulk_roots(len));
    }
}

#[test]
fn edge_seed_closure_gives_the_edge_pair() {
    let doc = json(&vmdgap(&["spectrum", "--seed-config", "20100", "--kappa", "1", "--lambda", "0.5"]));
    assert_eq!(doc["mode"], "closure");
    let vals = doc["result"]["eigenvalues"].as_array().unwrap();
    let (minus, plus) = vmdgap::bounds::edge_eigenvalues(1.0, 0.25);
    assert!((vals[0].as_f64().unwrap() - minus).abs() < 1e-12);
    assert!((vals[1].as_f64().unwrap() - plus).abs() < 1e-12);
}

#[test]
fn complement_energy_respects_the_periodic_bound() {
    let doc = json(&vmdgap(&["spectrum", "--L", "8", "--N", "4", "--bc", "per", "--complement"]));
    let energy = doc["result"]["energy"].as_f64().unwrap();
    let gamma = vmdgap::bounds::gamma_bounds(1.0, 0.25).per;
    assert_eq!(doc["bound"]["value"].as_f64().unwrap(), gamma);
    assert!(energy >= gamma - 1e-10);
    assert_eq!(doc["satisfied"], true);
}

#[test]
fn output_is_identical_across_runs_and_thread_counts() {
    let args = ["spectrum", "--L", "10", "--N", "5", "--bc", "per", "--n-max", "3", "--count", "8"];
    let first = vmdgap(&args);
    assert!(first.status.success());
    let again = vmdgap(&args);
    let mut single = args.to_vec();
    single.extend(["--threads", "1"]);
    let single = vmdgap(&single);
    assert_eq!(first.stdout, again.stdout);
    // The run spec records the thread count, so compare the spectra only.
    assert_eq!(json(&first)["result"], json(&single)["result"]);
}

#[test]
fn emitted_spec_reruns_to_the_same_report() {
    let dir = std::env::temp_dir().join(format!("vmdgap-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let spec = dir.join("spec.json");
    let args = ["spectrum", "--L", "7", "--N", "3", "--kappa", "0.7", "--lambda", "0.3", "--count", "4"];
    let mut emit = args.to_vec();
    emit.extend(["--emit-spec", "--out", spec.to_str().unwrap()]);
    assert!(vmdgap(&emit).status.success());
    let direct = vmdgap(&args);
    let rerun = vmdgap(&["run", spec.to_str().unwrap()]);
    assert!(rerun.status.success());
    assert_eq!(direct.stdout, rerun.stdout);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn bad_spec_file_is_a_usage_error() {
    let dir = std::env::temp_dir().join(format!("vmdgap-cli-bad-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let spec = dir.join("spec.json");
    std::fs::write(&spec, r#"{"schema":9,"command":"bounds","kappas":[1],"abs_lambdas":[1]}"#).unwrap();
    assert_eq!(vmdgap(&["run", spec.to_str().unwrap()]).status.code(), Some(2));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn budget_overrun_exits_three() {
    let out = Command::new(env!("CARGO_BIN_EXE_vmdgap"))
        .args(["spectrum", "--L", "8", "--N", "4", "--bc", "per"])
        .env("VMDGAP_BUDGET_DIM", "10")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget"));
}

#[test]
fn scar_suite_passes() {
    let out = vmdgap(&["verify", "scars", "--quick"]);
    let doc = json(&out);
    assert_eq!(doc["passed"], true);
    assert_eq!(doc["criteria"][0]["id"], "AC-11");
    assert!(String::from_utf8_lossy(&out.stderr).contains("AC-11 PASS"));
}

#[test]
fn bounds_csv_has_fixed_columns() {
    let out = vmdgap(&["bounds", "--kappa", "0.5,2", "--lambda", "0.1", "--format", "csv"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("kappa,abs_lambda,name,value,hypothesis_ok"));
    let rows: Vec<&str> = lines.collect();
    assert!(rows.iter().any(|r| r.starts_with("0.5,0.1,gamma_per,")));
    assert!(rows.iter().any(|r| r.starts_with("2,0.1,gamma_obc,")));
}

#[test]
fn nonpositive_kappa_is_rejected() {
    assert_eq!(vmdgap(&["bounds", "--kappa", "0", "--lambda", "0.1"]).status.code(), Some(2));
}
