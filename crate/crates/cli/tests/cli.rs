use murmur_core::classnum::{sieve_class_numbers, ClassNumberTable};
use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

fn murmur(args: &[&str]) -> Output {
    murmur_env(args, &[])
}

fn murmur_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_murmur"));
    cmd.args(args);
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("valid JSON on stdout")
}

#[test]
fn sieve_cache_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let file = path(dir.path(), "cls.bin");
    let out = murmur(&["sieve", "--dmax", "20000", "--out", &file]);
    assert_eq!(out.status.code(), Some(0));
    let loaded = ClassNumberTable::load(Path::new(&file)).unwrap();
    assert_eq!(loaded, sieve_class_numbers(20000).unwrap());
    // header plus one u32 per discriminant class: |D| ≡ 0, 3 mod 4
    let len = std::fs::metadata(&file).unwrap().len();
    assert_eq!(len, 16 + 4 * 10000);
}

#[test]
fn corrupted_cache_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let file = path(dir.path(), "cls.bin");
    assert_eq!(murmur(&["sieve", "--dmax", "9000", "--out", &file]).status.code(), Some(0));
    let mut bytes = std::fs::read(&file).unwrap();
    bytes[0] ^= 0xff;
    std::fs::write(&file, &bytes).unwrap();
    let out = murmur(&["murmur", "--K", "100", "--H", "10", "--delta", "0", "--E", "0:2", "--cache", &file]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("magic"));
}

#[test]
fn undersized_cache_reports_required_bound() {
    let dir = tempfile::tempdir().unwrap();
    let file = path(dir.path(), "cls.bin");
    assert_eq!(murmur(&["sieve", "--dmax", "1000", "--out", &file]).status.code(), Some(0));
    let out = murmur(&["murmur", "--K", "600", "--H", "60", "--delta", "0", "--E", "0:2", "--cache", &file]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("need bound") && err.contains("have 1000"), "{err}");
}

#[test]
fn exit_codes_for_usage_and_io() {
    assert_eq!(murmur(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(murmur(&["murmur", "--K", "600"]).status.code(), Some(1));
    assert_eq!(murmur(&["murmur", "--K", "600", "--H", "60", "--delta", "2", "--E", "0:2"]).status.code(), Some(1));
    assert_eq!(murmur(&["nu", "--E", "2:1"]).status.code(), Some(1));
    assert_eq!(murmur(&["--help"]).status.code(), Some(0));
    let out = murmur(&["sieve", "--dmax", "100", "--out", "/nonexistent/dir/cls.bin"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/dir/cls.bin"));
    assert_eq!(murmur_env(&["window-selftest"], &[("MURMUR_THREADS", "zero")]).status.code(), Some(1));
}

#[test]
fn trace_table_with_oracle_check() {
    let out = murmur(&["trace", "--k", "24", "--nmax", "12", "--verify"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n\ttrace\tnormalized_sum"));
    assert_eq!(lines.next(), Some("1\t2\t2"));
    assert!(lines.next().unwrap().starts_with("2\t1080\t"));
    assert_eq!(text.lines().count(), 13);
    let out = murmur(&["trace", "--k", "10", "--nmax", "3"]);
    assert!(String::from_utf8(out.stdout).unwrap().contains("\n3\t0\t"));
}

#[test]
fn smoke_run_and_thread_invariance() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out: &str, summary: &str| {
        vec![
            "murmur".to_string(),
            "--K".into(),
            "600".into(),
            "--H".into(),
            "60".into(),
            "--delta".into(),
            "1".into(),
            "--E".into(),
            "1/4:4".into(),
            "--out".into(),
            path(dir.path(), out),
            "--summary".into(),
            path(dir.path(), summary),
        ]
    };
    let start = Instant::now();
    let one: Vec<String> = args("m1.csv", "s1.json");
    let one: Vec<&str> = one.iter().map(String::as_str).collect();
    let out = murmur_env(&one, &[("MURMUR_THREADS", "1")]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(start.elapsed() < Duration::from_secs(30));
    let eight: Vec<String> = args("m8.csv", "s8.json");
    let eight: Vec<&str> = eight.iter().map(String::as_str).collect();
    assert_eq!(murmur_env(&eight, &[("MURMUR_THREADS", "8")]).status.code(), Some(0));
    let read = |n: &str| std::fs::read(dir.path().join(n)).unwrap();
    assert_eq!(read("m1.csv"), read("m8.csv"));
    assert_eq!(read("s1.json"), read("s8.json"));

    let csv = String::from_utf8(read("m1.csv")).unwrap();
    assert!(csv.starts_with("p,p_over_N,numerator_term,denominator_term,cumulative_r\n"));
    let summary: Value = serde_json::from_slice(&read("s1.json")).unwrap();
    for key in ["N", "num_total", "den_total", "r_endpoints"] {
        assert!(summary.get(key).is_some(), "missing {key}");
    }
    assert!(summary["r_endpoints"]["v"].as_f64().unwrap() < 0.0);
    assert_eq!(summary["points"].as_u64().unwrap() as usize, csv.lines().count() - 1);
}

#[test]
fn nu_single_and_grid() {
    let out = murmur(&["nu", "--E", "1/4:4", "--qmax", "2000", "--tmax", "2000"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let diff = v["difference"].as_f64().unwrap();
    assert!(diff <= v["combined_bound"].as_f64().unwrap());
    assert_eq!(v["rational"]["endpoint_terms"].as_array().unwrap().len(), 2);
    let sharp = json(&murmur(&["nu", "--E", "1/2:2", "--weight", "quartic", "--qmax", "500", "--tmax", "500"]));
    assert_eq!(sharp["weight"], "quartic");

    let dir = tempfile::tempdir().unwrap();
    let file = path(dir.path(), "nu.csv");
    assert_eq!(murmur(&["nu", "--grid", "0:2:20", "--qmax", "300", "--out", &file]).status.code(), Some(0));
    let text = std::fs::read_to_string(&file).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,nu_cumulative_rational,nu_cumulative_fourier_if_available"));
    assert_eq!(lines.next(), Some("0,0,"));
    assert_eq!(text.lines().count(), 22);
}

#[test]
fn compare_identical_curves() {
    let dir = tempfile::tempdir().unwrap();
    let nu = path(dir.path(), "nu.csv");
    assert_eq!(murmur(&["nu", "--grid", "0:2:50", "--qmax", "200", "--out", &nu]).status.code(), Some(0));
    // the same curve in the murmuration layout
    let text = std::fs::read_to_string(&nu).unwrap();
    let mut m = String::from("p,p_over_N,numerator_term,denominator_term,cumulative_r\n");
    for line in text.lines().skip(2) {
        let cells: Vec<&str> = line.split(',').collect();
        m.push_str(&format!("0,{},0,0,{}\n", cells[0], cells[1]));
    }
    let mcsv = path(dir.path(), "m.csv");
    std::fs::write(&mcsv, m).unwrap();
    let out = murmur(&["compare", "--murmur", &mcsv, "--nu", &nu, "--delta", "0", "--points", "50"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["max_abs_deviation"].as_f64().unwrap(), 0.0);
    assert!((v["pearson"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    let flipped = json(&murmur(&["compare", "--murmur", &mcsv, "--nu", &nu, "--delta", "1"]));
    assert!(flipped["pearson"].as_f64().unwrap() < -0.99);

    let short = path(dir.path(), "short.csv");
    assert_eq!(murmur(&["nu", "--grid", "0:1:10", "--qmax", "50", "--out", &short]).status.code(), Some(0));
    let out = murmur(&["compare", "--murmur", &mcsv, "--nu", &short, "--delta", "0"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn propcircle_report() {
    let out = murmur(&["propcircle", "--a", "1", "--q", "1", "--x", "200"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["main_term"].as_f64().unwrap(), 200.0);
    assert!(v["residual"].as_f64().unwrap().abs() < 0.5);
    assert_eq!(v["t_max"].as_u64().unwrap(), 20000);
    assert_eq!(murmur(&["propcircle", "--a", "2", "--q", "4", "--x", "100"]).status.code(), Some(1));
}

#[test]
fn window_selftest_passes() {
    let out = murmur(&["window-selftest"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(!text.contains("FAIL"));
}
