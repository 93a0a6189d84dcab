use std::process::{Command, Output};

use serde_json::Value;

fn kh(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kh")).args(args).output().expect("kh runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn reduced_trefoil_over_q() {
    let out = kh(&["homology", "@trefoil", "--reduced", "--coeffs", "q"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["total_rank"], 3);
    let points: Vec<(i64, i64)> =
        v["groups"].as_array().unwrap().iter().map(|g| (g["h"].as_i64().unwrap(), g["q"].as_i64().unwrap())).collect();
    assert_eq!(points, vec![(0, 1), (2, 5), (3, 7)]);
}

#[test]
fn integral_trefoil_reports_torsion_in_csv() {
    let out = kh(&["homology", "PD[X(1,4,2,5),X(3,6,4,1),X(5,2,6,3)]", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("h,q,free_rank,torsion\n"));
    assert!(text.contains("3,7,0,2\n"), "{text}");
}

#[test]
fn reads_files_in_both_formats() {
    let dir = std::env::temp_dir().join(format!("kh-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let pd = dir.join("hopf.pd");
    std::fs::write(&pd, "# Hopf link\nPD[X(4,2,3,1),X(2,4,1,3)]\n").unwrap();
    let js = dir.join("hopf.json");
    std::fs::write(&js, r#"{"crossings":[[4,2,3,1],[2,4,1,3]]}"#).unwrap();
    let a = kh(&["parse", pd.to_str().unwrap()]);
    let b = kh(&["parse", js.to_str().unwrap()]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["components"], 2);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn perturbed_spectral_sequence_is_deterministic() {
    let args = ["ss", "@figure-eight", "--weight", "1,0", "--perturb", "42"];
    let a = kh(&args);
    let b = kh(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["homology_rank"], 6);
    assert!(!v["pages"].as_array().unwrap().is_empty());
}

#[test]
fn thread_count_does_not_change_output() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_kh"))
            .args(["homology", "@figure-eight"])
            .env("KH_THREADS", threads)
            .output()
            .unwrap()
    };
    let one = run("1");
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, run("3").stdout);
    assert_eq!(run("zero").status.code(), Some(1));
}

#[test]
fn input_errors_exit_one() {
    let out = kh(&["homology", "PD[X(1,2,3,4)]"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("InconsistentArcs"));

    let out = kh(&["homology", "PD[X(1,1,2,2)", "--strict", "--trust-pseudo"]);
    assert_eq!(out.status.code(), Some(1));

    let out = kh(&["alexander", "@hopf"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("MultiComponent"));

    let out = kh(&["ss", "@trefoil", "--weight=-1,0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("OutOfDomain"));

    assert_eq!(kh(&["homology", "@nonexistent"]).status.code(), Some(1));
    assert_eq!(kh(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(kh(&["--help"]).status.code(), Some(0));
}

#[test]
fn verify_figure_eight() {
    let out = kh(&["verify", "@figure-eight"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["ok"], true);
    assert_eq!(v["checks"].as_array().unwrap().len(), 3);
}

#[test]
fn cube_dump_of_the_unlink_pseudo_diagram() {
    let out = kh(&["cube", "@unlink-pseudo"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["edges"][0]["kind"], "NonorientableBand");
    assert_eq!(v["edges"][0]["sigma"], 2);
}

#[test]
fn analyze_t45_with_the_instanton_table() {
    let out = kh(&["analyze", "@t45-mirror", "--instanton-mod4"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["rank_lower_bound"], 7);
    assert_eq!(v["mod4"], serde_json::json!([3, 1, 2, 3]));
    let placements = v["feasibility"]["placements"].as_array().unwrap();
    assert_eq!(placements.len(), 1);
    let d = &placements[0]["differentials"][0];
    assert_eq!((d["source_row"].as_i64(), d["target_row"].as_i64()), (Some(13), Some(16)));
}

#[test]
fn selftest_exit_codes() {
    let out = kh(&["selftest", "--only", "3,10"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out).as_array().unwrap().len(), 2);
    assert!(stderr(&out).contains("PASS [ 3]"));
    let out = kh(&["selftest", "--only", "11"]);
    assert_eq!(out.status.code(), Some(1));
}
