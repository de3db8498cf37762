use std::process::{Command, Output};

fn crossing(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crossing"))
        .args(args)
        .env_remove("CROSSING_TRIALS")
        .env_remove("CROSSING_SEED")
        .env_remove("CROSSING_WORKERS")
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = crossing(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

/// Parses a CSV text into its header and records.
fn table(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header = rdr.headers().unwrap().iter().map(str::to_owned).collect();
    let rows = rdr
        .records()
        .map(|r| r.unwrap().iter().map(str::to_owned).collect())
        .collect();
    (header, rows)
}

fn column(rows: &[Vec<String>], i: usize) -> Vec<f64> {
    rows.iter().map(|r| r[i].parse().unwrap()).collect()
}

#[test]
fn eval_on_first_interval() {
    let (header, rows) = table(&stdout(&["eval", "--seq", "power:1", "--t", "1.5"]));
    assert_eq!(header[..3], ["t", "value", "branch"]);
    let v: f64 = rows[0][1].parse().unwrap();
    assert!((v - 2.599506137843429).abs() < 1e-12, "{v}");
    assert_eq!(rows[0][2], "theorem(1)");
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| crossing(args).status.code().unwrap();
    assert_eq!(code(&["eval", "--seq", "const:1", "--t", "0.5"]), 0);
    assert_eq!(code(&["eval", "--seq", "const:1", "--t", "2", "--no-fallback"]), 3);
    assert_eq!(code(&["eval", "--seq", "list:1,0.5", "--t", "1"]), 2);
    assert_eq!(code(&["eval", "--seq", "nonsense", "--t", "1"]), 2);
    assert_eq!(code(&["simulate", "--seq", "const:1", "--t", "1", "--trials", "0"]), 2);
    assert_eq!(code(&["eval", "--seq", "const:1"]), 2);
}

#[test]
fn uncovered_with_fallback_uses_the_oracle() {
    let (_, rows) = table(&stdout(&["eval", "--seq", "const:1", "--t", "2"]));
    assert_eq!(rows[0][2], "oracle_fallback");
}

#[test]
fn errors_go_to_stderr() {
    let out = crossing(&["eval", "--seq", "list:1,0.5", "--t", "1"]);
    assert!(out.stdout.is_empty());
    assert!(!out.stderr.is_empty());
}

#[test]
fn volume_and_oracle_examples() {
    let (_, rows) = table(&stdout(&["volume", "--seq", "list:1,2", "--m", "2", "--t", "1.5"]));
    assert_eq!(column(&rows, 2), [0.5]);

    let (_, rows) = table(&stdout(&["volume", "--m", "0", "--t", "0.3"]));
    assert_eq!(column(&rows, 2), [1.0]);

    let (_, rows) = table(&stdout(&["oracle", "--seq", "const:1", "--t", "1"]));
    let v = column(&rows, 1)[0];
    assert!((v - std::f64::consts::E).abs() <= 1e-12, "{v}");
}

#[test]
fn simulate_json_is_a_single_stats_object() {
    let text = stdout(&["simulate", "--seq", "const:1", "--t", "1", "--trials", "20000", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert!(v.is_object());
    assert_eq!(v["trials"], 20000);
    let mean = v["mean"].as_f64().unwrap();
    let se = v["stderr"].as_f64().unwrap();
    assert!((mean - std::f64::consts::E).abs() < 4.0 * se);
}

#[test]
fn simulate_csv_matches_its_json() {
    let args = ["simulate", "--seq", "power:1", "--t", "2.5", "--trials", "5000"];
    let out = crossing(&args);
    let (header, rows) = table(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(header, ["trials", "running_mean", "running_stderr"]);
    assert_eq!(rows.len(), 10);
    let last = rows.last().unwrap();

    let mut json_args = args.to_vec();
    json_args.push("--json");
    let v: serde_json::Value = serde_json::from_str(&stdout(&json_args)).unwrap();
    assert_eq!(last[0], "5000");
    assert_eq!(last[1].parse::<f64>().unwrap(), v["mean"].as_f64().unwrap());
    assert_eq!(last[2].parse::<f64>().unwrap(), v["stderr"].as_f64().unwrap());
}

#[test]
fn simulate_is_byte_identical_across_runs_and_workers() {
    let base = ["simulate", "--seq", "power:1", "--t", "2.5", "--trials", "50000", "--seed", "7"];
    let reference = crossing(&base);
    assert!(reference.status.success());
    for workers in ["1", "4", "8"] {
        let mut args = base.to_vec();
        args.extend(["--workers", workers]);
        let out = crossing(&args);
        assert_eq!(out.stdout, reference.stdout, "workers {workers}");
        assert_eq!(out.stderr, reference.stderr, "workers {workers}");
    }
}

#[test]
fn environment_overrides_defaults() {
    let flag = stdout(&["simulate", "--seq", "const:1", "--t", "1", "--trials", "1000", "--seed", "9", "--json"]);
    let env = Command::new(env!("CARGO_BIN_EXE_crossing"))
        .args(["simulate", "--seq", "const:1", "--t", "1", "--json"])
        .env("CROSSING_TRIALS", "1000")
        .env("CROSSING_SEED", "9")
        .output()
        .unwrap();
    assert_eq!(String::from_utf8(env.stdout).unwrap(), flag);
}

#[test]
fn compare_schema_and_exponential_column() {
    let text = stdout(&[
        "compare", "--seq", "const:1", "--t-min", "0", "--t-max", "1", "--steps", "11", "--trials", "2000",
    ]);
    let (header, rows) = table(&text);
    assert_eq!(header, ["t", "analytic", "branch", "oracle", "mc_mean", "mc_stderr", "abs_diff", "z"]);
    assert_eq!(rows.len(), 11);
    for r in &rows {
        let t: f64 = r[0].parse().unwrap();
        let f: f64 = r[1].parse().unwrap();
        let diff: f64 = r[6].parse().unwrap();
        assert!((f - t.exp()).abs() < 1e-12);
        assert!(diff < 1e-9);
    }
}

#[test]
fn compare_json_round_trips_csv() {
    let args = ["compare", "--seq", "power:1", "--t-max", "3", "--steps", "4", "--trials", "1000"];
    let (_, rows) = table(&stdout(&args));
    let mut json_args = args.to_vec();
    json_args.push("--json");
    let v: serde_json::Value = serde_json::from_str(&stdout(&json_args)).unwrap();
    let arr = v.as_array().unwrap();
    assert_eq!(arr.len(), rows.len());
    for (obj, row) in arr.iter().zip(&rows) {
        assert_eq!(obj["branch"].as_str().unwrap(), row[2]);
        for (i, key) in [(0, "t"), (1, "analytic"), (3, "oracle"), (4, "mc_mean"), (5, "mc_stderr"), (7, "z")] {
            assert_eq!(obj[key].as_f64().unwrap(), row[i].parse::<f64>().unwrap(), "{key}");
        }
    }
}

#[test]
fn curve_emits_two_sections() {
    let text = stdout(&["curve", "--seq", "power:2", "--t", "3", "--steps", "7", "--trials", "3000"]);
    let (curve, trace) = text.split_once("\n\n").expect("blank separator");
    let (h1, c) = table(&format!("{curve}\n"));
    let (h2, tr) = table(trace);
    assert_eq!(h1, ["t", "f", "branch"]);
    assert_eq!(h2, ["trials", "running_mean", "running_stderr"]);
    assert_eq!(c.len(), 7);
    assert_eq!(column(&c, 0).last(), Some(&3.0));
    assert_eq!(tr.len(), 6);
}

#[test]
fn curve_with_single_step_has_one_row() {
    let text = stdout(&["curve", "--seq", "qgeom:0.4", "--t", "0.5", "--steps", "1", "--trials", "1000"]);
    let (curve, _) = text.split_once("\n\n").unwrap();
    let (_, c) = table(&format!("{curve}\n"));
    assert_eq!(c.len(), 1);
    assert_eq!(column(&c, 0), [0.5]);
}

#[test]
fn curve_out_writes_trace_beside_curve() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig.csv");
    let p = path.to_str().unwrap();
    let out = crossing(&["curve", "--seq", "power:1", "--t", "3", "--steps", "5", "--trials", "2000", "--out", p]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let (_, c) = table(&std::fs::read_to_string(&path).unwrap());
    assert_eq!(c.len(), 5);
    let (h, tr) = table(&std::fs::read_to_string(dir.path().join("fig.trace.csv")).unwrap());
    assert_eq!(h[0], "trials");
    assert_eq!(tr.len(), 4);
}

#[test]
fn output_files_are_byte_identical_for_identical_configs() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let out = crossing(&[
            "compare", "--seq", "power:1", "--t-max", "2", "--steps", "5", "--trials", "3000",
            "--out", p.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    let bytes = std::fs::read(&a).unwrap();
    assert_eq!(bytes, std::fs::read(&b).unwrap());
    assert!(!bytes.contains(&b'\r'));
}

#[test]
fn printed_values_carry_seventeen_digits() {
    let (_, rows) = table(&stdout(&["eval", "--seq", "power:1", "--t", "4.5"]));
    let mantissa = rows[0][1].split('e').next().unwrap();
    assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17);
    let v: f64 = rows[0][1].parse().unwrap();
    assert!((v - 4.391472410925831).abs() < 1e-12);
}
