use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use iemgof::cli::run;
use iemgof::io::parse_critical_table;
use iemgof::nulldist::critical_value;
use iemgof::numeric::special::normal_cdf;
use iemgof::Family;
use serde_json::Value;
use tempfile::TempDir;

struct Outcome {
    code: i32,
    stdout: String,
    stderr: String,
}

fn iemgof(args: &[&str]) -> Outcome {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("iemgof").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    Outcome { code, stdout: String::from_utf8(out).unwrap(), stderr: String::from_utf8(err).unwrap() }
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn json(o: &Outcome) -> Value {
    assert_eq!(o.code, 0, "stderr: {}", o.stderr);
    serde_json::from_str(o.stdout.trim()).unwrap()
}

#[test]
fn single_point_gad() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "x.txt", "# one point\n0.5\n");
    let v = json(&iemgof(&["test", &f, "--family", "gad", "--m", "1"]));
    assert!((v["statistic"].as_f64().unwrap() - 0.386294).abs() < 1e-6);
    assert_eq!(v["family"], "gad");
    assert_eq!(v["n"], 1);
    assert_eq!(v["method"], "asymptotic");
    let p = v["p_value"].as_f64().unwrap();
    assert!(p > 0.0 && p <= 1.0);
}

#[test]
fn watson_pair() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "x.txt", "0.0\n0.5\n");
    let v = json(&iemgof(&["test", &f, "--family", "gw", "--m", "1"]));
    assert!((v["statistic"].as_f64().unwrap() - 1.0 / 24.0).abs() < 1e-15);
}

#[test]
fn seventeen_significant_digits() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "x.txt", "0.25\n0.75\n");
    let o = iemgof(&["test", &f, "--family", "gad"]);
    let v = json(&o);
    let raw = o.stdout.split("\"statistic\":").nth(1).unwrap().split(',').next().unwrap();
    let mantissa = raw.split('e').next().unwrap().trim_start_matches('-');
    assert_eq!(mantissa.chars().filter(|c| c.is_ascii_digit()).count(), 17, "{raw}");
    let expected = -2.0 - 0.5 * (6.0 * 0.75f64.ln() + 2.0 * 0.25f64.ln());
    assert_eq!(raw.parse::<f64>().unwrap(), v["statistic"].as_f64().unwrap());
    assert!((v["statistic"].as_f64().unwrap() - expected).abs() < 1e-15);
}

#[test]
fn normal_null_is_pit_then_uniform() {
    let dir = TempDir::new().unwrap();
    let raw = [-1.3, -0.2, 0.05, 0.4, 1.1, 2.7, 0.9, -0.6];
    let (mu, sigma) = (0.3, 1.7);
    let raw_text: String = raw.iter().map(|v| format!("{v}\n")).collect();
    let pit_text: String = raw.iter().map(|v| format!("{:.17e}\n", normal_cdf((v - mu) / sigma))).collect();
    let f_raw = write(dir.path(), "raw.txt", &raw_text);
    let f_pit = write(dir.path(), "pit.txt", &pit_text);
    for family in ["gad", "gw", "gcvm-star"] {
        let a = json(&iemgof(&["test", &f_raw, "--family", family, "--m", "2", "--null", "normal(0.3,1.7)"]));
        let b = json(&iemgof(&["test", &f_pit, "--family", family, "--m", "2"]));
        let (sa, sb) = (a["statistic"].as_f64().unwrap(), b["statistic"].as_f64().unwrap());
        assert!((sa - sb).abs() <= 1e-14 * sb.abs(), "{family}: {sa} vs {sb}");
    }
}

#[test]
fn malformed_input_exits_2_with_line() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "x.txt", "0.2\n# fine\nabc\n");
    let o = iemgof(&["test", &f, "--family", "gad"]);
    assert_eq!(o.code, 2);
    assert!(o.stderr.contains("line 3"), "{}", o.stderr);
    assert!(o.stdout.is_empty());
    let empty = write(dir.path(), "e.txt", "# nothing\n");
    assert_eq!(iemgof(&["test", &empty, "--family", "gad"]).code, 2);
    assert_eq!(iemgof(&["test", "/nonexistent/file", "--family", "gad"]).code, 2);
}

#[test]
fn unknown_family_exits_2_with_usage() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "x.txt", "0.5\n");
    for args in [
        vec!["test", f.as_str(), "--family", "ks"],
        vec!["table", "--family", "ks"],
        vec!["null", "--family", "ks", "--eval", "cdf", "--at", "1"],
    ] {
        let o = iemgof(&args);
        assert_eq!(o.code, 2);
        assert!(o.stderr.contains("Usage:"), "{}", o.stderr);
        assert!(o.stderr.contains("gw-star"));
    }
    assert_eq!(iemgof(&["frobnicate"]).code, 2);
    assert_eq!(iemgof(&["test", &f, "--family", "gad", "--m", "0"]).code, 2);
}

#[test]
fn boundary_and_ties_exit_3() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "x.txt", "0.3\n\n1.0\n");
    let o = iemgof(&["test", &f, "--family", "gad"]);
    assert_eq!(o.code, 3);
    assert!(o.stderr.contains("line 3"), "{}", o.stderr);
    let v = json(&iemgof(&["test", &f, "--family", "gad", "--clamp-boundary"]));
    assert!(v["statistic"].as_f64().unwrap().is_finite());
    // The circular and cosine families accept closed data.
    json(&iemgof(&["test", &f, "--family", "gw"]));
    let outside = write(dir.path(), "o.txt", "0.3\n1.5\n");
    let o = iemgof(&["test", &outside, "--family", "gcvm"]);
    assert_eq!(o.code, 3);
    assert!(o.stderr.contains("line 2"), "{}", o.stderr);
    let a = write(dir.path(), "a.txt", "0.1\n0.4\n");
    let b = write(dir.path(), "b.txt", "0.2\n0.4\n");
    let o = iemgof(&["test", &a, "--family", "gad", "--two-sample", &b]);
    assert_eq!(o.code, 3);
    assert!(o.stderr.contains("line 2"), "{}", o.stderr);
}

#[test]
fn two_sample_report() {
    let dir = TempDir::new().unwrap();
    let a = write(dir.path(), "a.txt", "0.11\n0.25\n0.32\n0.48\n0.5\n");
    let b = write(dir.path(), "b.txt", "0.61\n0.72\n0.3\n0.93\n0.84\n0.77\n");
    let args = ["test", &a, "--family", "gad", "--m", "2", "--two-sample", &b, "--permutations", "999", "--seed", "5"];
    let o1 = iemgof(&args);
    let v = json(&o1);
    assert_eq!(v["method"], "permutation");
    assert_eq!(v["sizes"], serde_json::json!([5, 6]));
    let p = v["p_value"].as_f64().unwrap();
    assert!(p >= 1.0 / 1000.0 && p <= 1.0);
    assert!(v["asymptotic_p_value"].as_f64().is_some());
    assert_eq!(iemgof(&args).stdout, o1.stdout);
    let swapped = json(&iemgof(&["test", &b, "--family", "gad", "--m", "2", "--two-sample", &a]));
    assert!((swapped["statistic"].as_f64().unwrap() - v["statistic"].as_f64().unwrap()).abs() < 1e-12);
    assert_eq!(iemgof(&["test", &a, "--family", "gw", "--two-sample", &b]).code, 2);
}

#[test]
fn analytic_table_round_trips() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("crit.csv");
    let o = iemgof(&[
        "table", "--family", "gcvm-star", "--m-list", "1,2,3", "--alpha-list", "0.1,0.05,0.01", "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let rows = parse_critical_table(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(rows.len(), 9);
    for r in &rows {
        assert_eq!(r.family().unwrap(), Family::GcvmTrunc);
        let q = critical_value(Family::GcvmTrunc, r.m, r.alpha).unwrap();
        assert_eq!(q.to_bits(), r.critical_value.to_bits());
    }
    let manifest: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("crit.csv.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "table");
    assert!(manifest.get("wall_time_seconds").is_none());
}

#[test]
fn table_methods_agree() {
    let analytic = iemgof(&["table", "--family", "gad", "--m-list", "1", "--alpha-list", "0.05"]);
    let mc = iemgof(&[
        "table", "--family", "gad", "--m-list", "1", "--alpha-list", "0.05", "--method", "mc", "--n", "100",
        "--replicates", "20000", "--seed", "3",
    ]);
    let a = &parse_critical_table(&analytic.stdout).unwrap()[0];
    let m = &parse_critical_table(&mc.stdout).unwrap()[0];
    assert_eq!(m.method, "mc");
    assert!((a.critical_value - m.critical_value).abs() < 3.0 * m.tolerance, "{a:?} {m:?}");
}

#[test]
fn unresolvable_level_exits_4() {
    let o = iemgof(&["table", "--family", "gad", "--alpha-list", "1e-20"]);
    assert_eq!(o.code, 4, "{}", o.stderr);
    let o = iemgof(&["null", "--family", "gcvm", "--eval", "mgf", "--at", &format!("{}", std::f64::consts::PI.powi(2) / 2.0)]);
    assert_eq!(o.code, 4, "{}", o.stderr);
}

#[test]
fn null_evaluations() {
    let scalar = |args: &[&str]| -> f64 {
        let o = iemgof(args);
        assert_eq!(o.code, 0, "{}", o.stderr);
        o.stdout.trim().parse().unwrap()
    };
    for family in ["gad", "gw", "gw-star", "gcvm", "gcvm-star"] {
        assert_eq!(scalar(&["null", "--family", family, "--m", "2", "--eval", "mgf", "--at", "0"]), 1.0);
        let mut prev = 0.0;
        for i in 1..=30 {
            let x = format!("{}", 0.002 * 1.3f64.powi(i));
            let f = scalar(&["null", "--family", family, "--eval", "cdf", "--at", &x]);
            assert!((0.0..=1.0).contains(&f) && f >= prev - 1e-12, "{family} at {x}");
            prev = f;
        }
    }
    let pdf = scalar(&["null", "--family", "gw", "--m", "1", "--eval", "pdf", "--at", "1.0"]);
    assert!((pdf - 1.0561613652355130e-7).abs() < 1e-18);
    let q = scalar(&["null", "--family", "gw", "--eval", "quantile", "--at", "0.05"]);
    assert!((q - 0.18688002468733032794).abs() < 1e-9);
    let sf = scalar(&["null", "--family", "gw", "--eval", "sf", "--at", &format!("{q}")]);
    assert!((sf - 0.05).abs() < 1e-8);
    let neg = scalar(&["null", "--family", "gad", "--eval", "mgf", "--at", "-1"]);
    assert!((neg - (2.0 * std::f64::consts::PI / (std::f64::consts::PI * 7f64.sqrt() / 2.0).cosh()).sqrt()).abs() < 1e-13);
}

const NULL_ONLY: &str = r#"
[[study]]
name = "size"
family = "gcvm"
m = [1, 2]
n = 30
alpha = 0.1
replicates = 4000
critical_replicates = 4000
seed = 77
alternative = "normal"
vary = "mu"
grid = [0.0]
"#;

fn power_run(config: &str, out: &Path) -> Outcome {
    iemgof(&["power", "--config", config, "--out", out.to_str().unwrap()])
}

#[test]
fn null_only_power_is_alpha() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "null.toml", NULL_ONLY);
    let out = dir.path().join("out");
    let o = power_run(&cfg, &out);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let files: Vec<&str> = o.stdout.lines().collect();
    assert_eq!(files.len(), 2);
    for f in files {
        let text = fs::read_to_string(f).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("param,rate,se,replicates,family,m"));
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        let rate: f64 = row[1].parse().unwrap();
        let se: f64 = row[2].parse().unwrap();
        // The critical value is itself estimated from 4000 replicates.
        assert!((rate - 0.1).abs() < 3.0 * se * 2f64.sqrt(), "{f}: {rate}");
    }
    assert!(out.join("manifest.json").exists());
}

#[test]
fn power_output_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "null.toml", &NULL_ONLY.replace("grid = [0.0]", "grid = [0.0, 0.4]"));
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(power_run(&cfg, &a).code, 0);
    assert_eq!(power_run(&cfg, &b).code, 0);
    for name in ["size_gcvm_m1.csv", "size_gcvm_m2.csv", "manifest.json"] {
        let (x, y) = (fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap());
        if name == "manifest.json" {
            // Only the output directory differs.
            let s = String::from_utf8(y).unwrap().replace(b.to_str().unwrap(), a.to_str().unwrap());
            assert_eq!(String::from_utf8(x).unwrap(), s);
        } else {
            assert_eq!(x, y, "{name}");
        }
    }
}

#[test]
fn bad_configs_exit_5() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    for (name, text) in [
        ("syntax.toml", "[[study]\nname = 1"),
        ("key.toml", &NULL_ONLY.replace("vary = \"mu\"", "vary = \"mu\"\ncolour = 3")),
        ("family.toml", &NULL_ONLY.replace("\"gcvm\"", "\"ks\"")),
        ("alt.toml", &NULL_ONLY.replace("\"normal\"", "\"cauchy\"")),
        ("param.toml", &NULL_ONLY.replace("vary = \"mu\"", "vary = \"kappa\"")),
        ("empty.toml", ""),
    ] {
        let cfg = write(dir.path(), name, text);
        let o = power_run(&cfg, &out);
        assert_eq!(o.code, 5, "{name}: {}", o.stderr);
    }
    assert_eq!(power_run("no_such_config", &out).code, 5);
}

fn binary() -> PathBuf {
    PathBuf::from(env!("CARGO_BIN_EXE_iemgof"))
}

#[test]
fn thread_cap_does_not_change_output() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "null.toml", NULL_ONLY);
    let mut seen = Vec::new();
    for threads in ["1", "2", "8"] {
        let out = dir.path().join(format!("t{threads}"));
        let status = Command::new(binary())
            .args(["power", "--config", &cfg, "--out", out.to_str().unwrap()])
            .env("IEMGOF_THREADS", threads)
            .output()
            .unwrap();
        assert!(status.status.success());
        seen.push((fs::read(out.join("size_gcvm_m1.csv")).unwrap(), fs::read(out.join("size_gcvm_m2.csv")).unwrap()));
    }
    assert!(seen.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn binary_exit_codes() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "x.txt", "0.5\n");
    let o = Command::new(binary()).args(["test", &f, "--family", "nope"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage:"));
    let o = Command::new(binary()).args(["test", &f, "--family", "gad"]).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stderr.is_empty());
    let help = Command::new(binary()).arg("--help").output().unwrap();
    assert_eq!(help.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&help.stdout).contains("power"));
}
