use std::process::Command;

use serde_json::Value;

use spherical_core::integrability::{enumerate_factorizations, lp_threshold, ExponentProfile};
use spherical_core::spherical::{catalog, catalog_source, rank_and_edge};

fn spherical(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_spherical"))
        .args(args)
        .env_remove("SPHERICAL_SEED")
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

fn report(args: &[&str]) -> Value {
    let (code, stdout, stderr) = spherical(args);
    assert_eq!(code, 0, "{stderr}");
    serde_json::from_str(&stdout).unwrap()
}

#[test]
fn wavefront_so8c_g2_is_false() {
    let r = report(&["wavefront", "--space", "so8c_g2"]);
    assert_eq!(r["command"], "wavefront");
    assert_eq!(r["results"]["wavefront"], false);
    assert_eq!(r["verdict_basis"][0], "exact");
}

#[test]
fn pair_sl2_has_no_proper_factorization() {
    let r = report(&["factorizations", "--space", "pair_sl2"]);
    assert_eq!(r["results"]["proper"], 0);
    let lib = enumerate_factorizations(&catalog("pair_sl2").unwrap());
    assert_eq!(r["results"]["records"], serde_json::to_value(&lib).unwrap());
}

#[test]
fn threshold_of_sl2() {
    let r = report(&["lp-threshold", "--space", "sl2_gk", "--lambda", "rho", "--d", "0"]);
    assert_eq!(r["results"]["p_star"], "2");
    let d = catalog("sl2_gk").unwrap();
    let lib = lp_threshold(&d, &ExponentProfile { lambda_v: d.datum.rho(), d_v: 0 }).unwrap();
    assert_eq!(r["results"], serde_json::to_value(&lib).unwrap());
}

#[test]
fn cone_report_matches_library() {
    let r = report(&["cone", "--space", "triple_sl2"]);
    let lib = rank_and_edge(&catalog("triple_sl2").unwrap()).unwrap();
    assert_eq!(r["results"], serde_json::to_value(&lib).unwrap());
    assert_eq!(r["results"]["real_rank"], 2);
}

#[test]
fn descriptor_files() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("sl2.toml");
    std::fs::write(&good, catalog_source("sl2_gk").unwrap()).unwrap();
    let r = report(&["describe", "--file", good.to_str().unwrap()]);
    assert_eq!(r["results"]["name"], "sl2_gk");
    assert_eq!(r["results"]["diagnostics"], Value::Array(vec![]));

    let missing = dir.path().join("missing.toml");
    let text: String = catalog_source("sl2_gk").unwrap().lines().filter(|l| !l.starts_with("sigma_u")).collect::<Vec<_>>().join("\n");
    std::fs::write(&missing, text).unwrap();
    let (code, _, err) = spherical(&["describe", "--file", missing.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("sigma_u"), "{err}");

    let bad = dir.path().join("bad.toml");
    let text = catalog_source("group_sl2").unwrap().replace("monoid_generators = [\"2, 2\"]", "monoid_generators = [\"2, 0\"]");
    std::fs::write(&bad, text).unwrap();
    let (code, _, err) = spherical(&["describe", "--file", bad.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("monoid generator 0"), "{err}");
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(spherical(&["frobnicate"]).0, 1);
    assert_eq!(spherical(&["describe", "--space", "no_such_space"]).0, 1);
    assert_eq!(spherical(&["lp-threshold", "--space", "so8c_g2", "--lambda", "rho"]).0, 2);
}

#[test]
fn seeded_scans_are_deterministic_and_write_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("scan.csv");
    let args = ["volume-scan", "--space", "sl2_gk", "--samples", "4000", "--ts", "0.5,1,1.5", "--seed", "9"];
    let a = report(&args);
    let mut with_out = args.to_vec();
    with_out.extend(["--out", csv.to_str().unwrap()]);
    let b = report(&with_out);
    assert_eq!(a["results"], b["results"]);
    assert_eq!(a["seed"], 9);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next().unwrap(), "t,estimate,stderr,analytic_reference");
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn seed_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_spherical"))
        .args(["limit-scan", "--space", "dS2"])
        .env("SPHERICAL_SEED", "77")
        .output()
        .unwrap();
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["seed"], 77);
    assert_eq!(r["results"]["limit_dim"], 1);
}

#[test]
fn property_i_with_spectral_file() {
    let dir = tempfile::tempdir().unwrap();
    let sp = dir.path().join("spectral.toml");
    std::fs::write(&sp, "nontrivial = [false, true, true]\nlambda = \"0, 1, 1\"\n").unwrap();
    let r = report(&["property-i", "--space", "triple_sl2", "--spectral", sp.to_str().unwrap()]);
    assert_eq!(r["results"]["steps"][0]["step"], "basic");
    assert_eq!(r["results"]["steps"][1]["space"], "group_sl2");
    assert_eq!(r["results"]["conclusion"]["verdict"], "holds");
}

#[test]
fn remaining_commands_run() {
    assert_eq!(report(&["catalog"])["results"].as_array().unwrap().len(), 6);
    assert_eq!(report(&["rho-u", "--space", "sl3_gk"])["results"], "(2, 1)");
    let lv = report(&["lambda-v", "--space", "sl2_gk", "--weights", "1; -1"]);
    assert_eq!(lv["results"]["interior_dual"], true);
    let sum = report(&["sum", "--dim", "2", "--lambda", "-1, -1", "--m", "0", "--r-max", "32"]);
    assert_eq!(sum["results"]["verdict"], "converges");
    let sn = report(&["seminorms", "--space", "sl2_gk", "--profile", "power:3", "--n", "0", "--m", "2"]);
    assert!(sn["results"]["p_n"].as_f64().unwrap() <= sn["results"]["comparison_constant"].as_f64().unwrap() * sn["results"]["q_m"].as_f64().unwrap());
}
