use std::path::PathBuf;
use std::process::{Command, Output};

use bcfb::mcsim::ExperimentConfig;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bcfb"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn tmp(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("bcfb-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const SIM: &str = r#"{"name":"z","kind":"marton","channel":{"type":"productz","q":0.7},
 "scheme":{"type":"uniform","sizes":[1,2,2]},
 "rates":{"r0":0,"r1p":0.15,"r2p":0.15},"n_list":[16],"trials":40,"eps":0.3}"#;

#[test]
fn fm_check_marton_passes() {
    let o = run(&["fm-check", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("PASS region_equal tol=1e-9"));
}

#[test]
fn fm_check_needs_seed() {
    assert_eq!(run(&["fm-check"]).status.code(), Some(2));
}

#[test]
fn dueck_table_rows() {
    let o = run(&["dueck"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    for row in ["fb_sum,2\n", "nofb_sum,1\n", "markov_chain,false\n", "gain,true\n"] {
        assert!(s.contains(row), "missing {row:?} in\n{s}");
    }
}

#[test]
fn blackwell_csv() {
    let o = run(&["blackwell"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    let mut lines = s.lines();
    assert!(lines.next().unwrap().starts_with("# config_sha256="));
    assert_eq!(lines.next(), Some("p,fb_lower,nofb_upper,fb_cutset"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 10);
    assert_eq!(rows[0][0], 0.0);
    assert!((rows[0][1] - 1.585).abs() < 1e-3);
    assert!(rows.iter().all(|r| r[1] <= r[3] + 1e-9));
}

#[test]
fn malformed_json_reports_position() {
    let p = tmp("bad.json", "{\n  \"targets\": [\"marton\",\n}");
    let o = run(&["fm-check", "--seed", "1", "--config", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("bad.json:3:1"), "{err}");
}

#[test]
fn wrong_field_type_is_a_config_error() {
    let p = tmp("type.json", r#"{"cases": "ten"}"#);
    let o = run(&["fm-check", "--seed", "1", "--config", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn simulate_header_and_determinism() {
    let p = tmp("sim.json", SIM);
    let a = run(&["simulate", "--config", p.to_str().unwrap(), "--seed", "4", "--workers", "1"]);
    let b = run(&["simulate", "--config", p.to_str().unwrap(), "--seed", "4"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
    let mut cfg: ExperimentConfig = serde_json::from_str(SIM).unwrap();
    cfg.seed = 4;
    let first = stdout(&a).lines().next().unwrap().to_string();
    assert_eq!(first, format!("# config_sha256={} seed=4", cfg.hash()));
}

#[test]
fn simulate_resource_cap_exit() {
    let big = SIM.replace("[16]", "[400]");
    let p = tmp("big.json", &big);
    let o = bin()
        .args(["simulate", "--config", p.to_str().unwrap(), "--seed", "1"])
        .env("BCFB_RESOURCE_CAP", "1000")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("resource cap"));
}

#[test]
fn region_writes_json_and_vertices() {
    let cfg = r#"{"region":"marton","channel":{"type":"productz","q":0.5},
      "aux":{"law_u":{"axes":[{"name":"U0","size":1},{"name":"U1","size":2},{"name":"U2","size":2}],
             "mass":[0.25,0.25,0.25,0.25]},"f":[0,1,2,3]}}"#;
    let p = tmp("region.json", cfg);
    let out = p.with_file_name("region_out.json");
    let o = run(&["region", "--config", p.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    // Two Z(1/2) channels with uniform inputs: each carries h(1/4) - 1/2.
    let h = |p: f64| -p * p.log2() - (1.0 - p) * (1.0 - p).log2();
    assert!((v["sum_rate"].as_f64().unwrap() - 2.0 * (h(0.25) - 0.5)).abs() < 1e-9);
    let csv = std::fs::read_to_string(out.with_extension("vertices.csv")).unwrap();
    assert!(csv.starts_with("# config_sha256="));
    assert!(csv.lines().nth(1) == Some("R0,R1,R2"));
}

#[test]
fn lemmas_custom_suite() {
    let suite = r#"{"cases":[{"name":"c","lemma":"covering",
        "law":{"axes":[{"name":"X","size":2},{"name":"Y","size":2}],"mass":[0.45,0.05,0.05,0.45]},
        "rates":[0.9],"threshold":0.531}],"n_list":[50],"trials":50,"eps":0.4,"seed":2}"#;
    let p = tmp("lem.json", suite);
    let o = run(&["lemmas", "--config", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.lines().next().unwrap().ends_with("seed=2"));
    assert!(s.contains("case,lemma,rate,threshold,n,trials,errors,error_rate"));
}

#[test]
fn unknown_subcommand_is_usage_error() {
    assert_eq!(run(&["nope"]).status.code(), Some(2));
}
