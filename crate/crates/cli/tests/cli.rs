use std::process::{Command, Output};

use serde_json::Value;

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gamma1-lab")).args(args).env_remove("GAMMA1_LAB_THREADS").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn verify_passes_and_filters() {
    let o = lab(&["verify"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = lab(&["verify", "--filter", "arith"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.lines().filter(|l| l.starts_with("PASS") || l.starts_with("FAIL")).all(|l| l.contains(" arith/")));
    assert_eq!(lab(&["verify", "--filter", "nosuch"]).status.code(), Some(64));
}

#[test]
fn injected_bessel_fault_fails_with_invariant_id() {
    let o = lab(&["verify", "--filter", "special", "--inject-fault", "bessel-x-switch"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("special/bessel-overlap"));
}

#[test]
fn density_report_json() {
    let o = lab(&["density", "--q", "101", "--k", "3", "--delta", "1", "--testfn", "fejer"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["report"]["certified"], Value::Bool(true));
    assert_eq!(v["provenance"]["config"]["q"], 101);
    assert_eq!(v["provenance"]["config"]["tail_eps"], 1e-6);
    assert!(v["provenance"]["build_id"].is_string());
    for key in ["d_total", "main_term", "p_term", "p2_term", "s1", "s2", "m_off", "eps_off", "eps_higher_power", "tail_bound_total"] {
        assert!(v["report"][key].is_number(), "{key}");
    }
}

#[test]
fn narrow_support_and_composite_level() {
    let o = lab(&["density", "--q", "101", "--delta", "0.1"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["report"]["d_total"], v["report"]["main_term"]);

    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("q4.json");
    let o = lab(&["density", "--q", "4", "--tail-eps", "1e-3", "--st-cap", "2000", "--out", out.to_str().unwrap()]);
    assert!(matches!(o.status.code(), Some(0) | Some(2)));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["report"]["flags"]["q_not_prime"], Value::Bool(true));
    if o.status.code() == Some(2) {
        assert_eq!(v["report"]["certified"], Value::Bool(false));
    }
}

#[test]
fn usage_errors() {
    assert_eq!(lab(&["density"]).status.code(), Some(64));
    assert_eq!(lab(&["density", "--q", "101", "--k", "4"]).status.code(), Some(64));
    assert_eq!(lab(&["density", "--q", "2"]).status.code(), Some(64));
    assert_eq!(lab(&["density", "--q", "101", "--tail-eps", "2"]).status.code(), Some(64));
    assert_eq!(lab(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(lab(&["--help"]).status.code(), Some(0));
}

#[test]
fn config_file_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"q": 211, "delta": 0.1, "tail_eps": 1e-4}"#).unwrap();
    let o = lab(&["density", "--config", cfg.to_str().unwrap(), "--q", "101"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["provenance"]["config"]["q"], 101);
    assert_eq!(v["provenance"]["config"]["delta"], 0.1);
    assert_eq!(v["provenance"]["config"]["tail_eps"], 1e-4);
    std::fs::write(&cfg, r#"{"q": 211, "bogus": 1}"#).unwrap();
    assert_eq!(lab(&["density", "--config", cfg.to_str().unwrap()]).status.code(), Some(64));
}

#[test]
fn threads_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_gamma1-lab"))
        .args(["density", "--q", "101", "--delta", "0.1"])
        .env("GAMMA1_LAB_THREADS", "2")
        .output()
        .unwrap();
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["provenance"]["config"]["threads"], 2);
    let o = Command::new(env!("CARGO_BIN_EXE_gamma1-lab"))
        .args(["density", "--q", "101", "--delta", "0.1"])
        .env("GAMMA1_LAB_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(64));
}

const SCAN_HEADER: &str = "q,k,delta,testfn,d_total,main_term,p_term,p2_term,s1,s2,m_off,eps_off,tail_bound_total,certified";

#[test]
fn scan_rows_and_rerun() {
    let args = ["scan", "--q-min", "101", "--q-max", "199", "--primes-only", "--tail-eps", "1e-5", "--deterministic", "--format", "csv"];
    let a = lab(&args);
    assert_eq!(a.status.code(), Some(0));
    let text = stdout(&a);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(SCAN_HEADER));
    let qs: Vec<u64> = lines.map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
    assert!(qs.len() >= 21);
    assert!(qs.windows(2).all(|w| w[0] < w[1]));
    for l in text.lines().skip(1) {
        let cols: Vec<&str> = l.split(',').collect();
        assert_eq!(cols.len(), 14);
        // 17 significant digits
        assert_eq!(cols[4].split('e').next().unwrap().trim_start_matches('-').len(), 18);
    }
    assert_eq!(lab(&args).stdout, a.stdout);
}

#[test]
fn empty_scan_is_header_only() {
    let o = lab(&["scan", "--q-min", "200", "--q-max", "199", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), format!("{SCAN_HEADER}\n"));
}

#[test]
fn diagnose_blocks_table() {
    let o = lab(&["diagnose-blocks", "--q", "101", "--p-grid", "16,64,128,256", "--s-grid", "1,2", "--t-grid", "2,4"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("P,S,T,case,block_value,bound_ratio"));
    let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    // P = 128 and 256 exceed q^delta = 101 and are rejected
    assert_eq!(rows.len(), 2 * 2 * 2);
    for r in &rows {
        assert!(["case1", "case2", "case3"].contains(&r[3].as_str()));
        assert!(r[4].parse::<f64>().unwrap().is_finite());
    }
    assert!(String::from_utf8_lossy(&o.stderr).contains("rejected P = 128"));
}

#[test]
fn mellin_probe_csv() {
    let o = lab(&["mellin-probe", "--x", "100", "--j", "1", "--alpha", "0", "--v-points", "200"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("v,abs_M1,regime,bound_ratio"));
    assert_eq!(text.lines().count(), 201);
    assert!(text.lines().skip(1).all(|l| l.contains(",saddle,") || l.contains(",decay,")));

    let o = lab(&["mellin-probe", "--v-points", "0"]);
    assert_eq!(stdout(&o), "v,abs_M1,regime,bound_ratio\n");

    let col = |o: &Output| -> Vec<f64> { stdout(o).lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect() };
    let base = lab(&["mellin-probe", "--v-points", "25"]);
    let fine = lab(&["mellin-probe", "--v-points", "25", "--nodes", "40"]);
    for (a, b) in col(&base).iter().zip(col(&fine)) {
        assert!((a - b).abs() <= 1e-8);
    }
}
