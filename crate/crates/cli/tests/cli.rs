//! End-to-end runs of the installed binary: flag parsing, exit codes,
//! report schemas, manifests, and the cache lifecycle. Every test gets
//! its own cache/output directory, so the corpus is order-independent.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::time::SystemTime;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn curve_census_env(args: &[&str], envs: &[(&str, &str)]) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_curve-census"));
    cmd.args(args)
        .env_remove("CURVE_CENSUS_CACHE_DIR")
        .env_remove("CURVE_CENSUS_WORKERS")
        .env("RUST_LOG", "info");
    for (key, value) in envs {
        cmd.env(key, value);
    }
    let output = cmd.output().expect("spawn curve-census");
    Run {
        code: output.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&output.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&output.stderr).into_owned(),
    }
}

fn curve_census(args: &[&str]) -> Run {
    curve_census_env(args, &[])
}

fn read_json(path: &Path) -> serde_json::Value {
    let text = std::fs::read_to_string(path)
        .unwrap_or_else(|e| panic!("read {}: {e}", path.display()));
    serde_json::from_str(&text).unwrap_or_else(|e| panic!("parse {}: {e}", path.display()))
}

fn assert_matches_schema(schema_file: &str, instance: &serde_json::Value) {
    let path =
        Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/schemas").join(schema_file);
    let schema = read_json(&path);
    if let Err(e) = jsonschema::validate(&schema, instance) {
        panic!("{schema_file}: {e}");
    }
}

/// File name -> mtime for every entry in a directory.
fn mtimes(dir: &Path) -> BTreeMap<String, SystemTime> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), e.metadata().unwrap().modified().unwrap())
        })
        .collect()
}

#[test]
fn order_prints_the_group_order() {
    let run = curve_census(&["order", "--p", "5", "--s", "1", "--t", "1"]);
    assert_eq!(run.code, 0, "stderr: {}", run.stderr);
    assert_eq!(run.stdout.trim(), "9");
}

#[test]
fn bad_curve_inputs_exit_two() {
    let run = curve_census(&["order", "--p", "5", "--s", "0", "--t", "0"]);
    assert_eq!(run.code, 2);
    assert!(run.stderr.contains("singular"), "stderr: {}", run.stderr);

    let run = curve_census(&["order", "--p", "4", "--s", "1", "--t", "1"]);
    assert_eq!(run.code, 2);
    assert!(run.stderr.contains("not prime"), "stderr: {}", run.stderr);
}

#[test]
fn classnum_prints_fraction_and_decimal() {
    let run = curve_census(&["classnum", "--D", "-11"]);
    assert_eq!(run.code, 0, "stderr: {}", run.stderr);
    assert_eq!(run.stdout.trim(), "1/2 (0.500000)");

    let run = curve_census(&["classnum", "--D", "-12"]);
    assert_eq!(run.stdout.trim(), "2/3 (0.666667)");

    // -10 = 2 mod 4 is not a discriminant.
    let run = curve_census(&["classnum", "--D", "-10"]);
    assert_eq!(run.code, 2);
    assert!(run.stderr.contains("discriminant"), "stderr: {}", run.stderr);
}

#[test]
fn constant_commands_report_their_truncation() {
    let run = curve_census(&["kconst", "--n", "9", "--prime-bound", "2000"]);
    assert_eq!(run.code, 0, "stderr: {}", run.stderr);
    assert!(run.stdout.starts_with("K(9) = "), "stdout: {}", run.stdout);
    assert!(run.stdout.contains("primes <= 2000"));

    let run = curve_census(&["cconst", "--m", "1", "--prime-bound", "2000"]);
    assert_eq!(run.code, 0, "stderr: {}", run.stderr);
    let value: f64 = run
        .stdout
        .strip_prefix("C(1) = ")
        .and_then(|rest| rest.split_whitespace().next())
        .unwrap()
        .parse()
        .unwrap();
    assert!((value - 1.0).abs() < 0.05, "C(1) far from 1: {value}");
}

#[test]
fn dcoeff_prints_exact_rationals() {
    let run = curve_census(&["dcoeff", "--ell", "2", "--r", "2", "--m", "3"]);
    assert_eq!(run.code, 0, "stderr: {}", run.stderr);
    assert_eq!(run.stdout.trim(), "-1/2 (-0.500000)");

    let run = curve_census(&["dcoeff", "--ell", "1", "--r", "1", "--m", "2"]);
    assert_eq!(run.stdout.trim(), "0 (0.000000)");
}

#[test]
fn scan_histogram_sums_to_family_size_and_validates() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let out = dir.path().join("report.json");
    let run = curve_census(&[
        "scan", "--A", "50", "--B", "50", "--N", "9",
        "--out", out.to_str().unwrap(),
        "--cache-dir", cache.to_str().unwrap(),
    ]);
    assert_eq!(run.code, 0, "stderr: {}", run.stderr);

    let json = read_json(&out);
    assert_matches_schema("scan_output.schema.json", &json);
    let report = &json["reports"][0];
    let family_size = report["family_size"].as_u64().unwrap();
    let total: u64 =
        report["histogram"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap()).sum();
    assert_eq!(total, family_size);
    assert_eq!(family_size, 101 * 101 - 5); // (0,0), (-3,±2), (-12,±16)

    let manifest = read_json(&dir.path().join("report.json.manifest.json"));
    assert_matches_schema("run_manifest.schema.json", &manifest);
    assert_eq!(manifest["command"], "scan");
    assert_eq!(manifest["parameters"]["A"], "50");
    assert_eq!(manifest["parameters"]["N"], "9");
    for listed in manifest["outputs"].as_array().unwrap() {
        assert!(Path::new(listed.as_str().unwrap()).exists(), "missing {listed}");
    }
}

#[test]
fn rescan_with_a_warm_cache_is_byte_identical_and_touches_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let scan = |out: &Path| {
        let run = curve_census(&[
            "scan", "--A", "40", "--B", "40", "--N", "21",
            "--out", out.to_str().unwrap(),
            "--cache-dir", cache.to_str().unwrap(),
        ]);
        assert_eq!(run.code, 0, "stderr: {}", run.stderr);
    };

    let first = dir.path().join("first.json");
    scan(&first);
    let stamps = mtimes(&cache);
    assert!(!stamps.is_empty(), "scan built no tables");

    std::thread::sleep(std::time::Duration::from_millis(10));
    let second = dir.path().join("second.json");
    scan(&second);

    assert_eq!(stamps, mtimes(&cache), "warm rescan rewrote cache files");
    assert_eq!(
        std::fs::read(&first).unwrap(),
        std::fs::read(&second).unwrap(),
        "reports differ between runs"
    );
}

#[test]
fn aggregate_scans_emit_poisson_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let out = dir.path().join("window.json");
    let run = curve_census(&[
        "scan", "--A", "40", "--B", "40", "--N", "100..110", "--aggregate", "--ell-max", "3",
        "--out", out.to_str().unwrap(),
        "--cache-dir", cache.to_str().unwrap(),
    ]);
    assert_eq!(run.code, 0, "stderr: {}", run.stderr);

    let json = read_json(&out);
    assert_matches_schema("scan_output.schema.json", &json);
    assert_eq!(json["reports"].as_array().unwrap().len(), 11);
    let rows = json["poisson_rows"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    for (ell, row) in rows.iter().enumerate() {
        assert_eq!(row["ell"].as_u64().unwrap(), ell as u64);
    }
    // The empirical masses over all ell = 0..3 nearly exhaust the window.
    let covered: f64 = rows.iter().map(|r| r["empirical"].as_f64().unwrap()).sum();
    assert!(covered > 0.95, "ell <= 3 covers only {covered}");
}

#[test]
fn csv_and_json_agree_on_every_number() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let json_out = dir.path().join("report.json");
    let csv_out = dir.path().join("report.csv");
    let scan_as = |format: &str, out: &Path| {
        let run = curve_census(&[
            "scan", "--A", "30", "--B", "30", "--N", "12", "--aggregate", "--ell-max", "2",
            "--cache-dir", cache.to_str().unwrap(),
            "--out", out.to_str().unwrap(),
            "--format", format,
        ]);
        assert_eq!(run.code, 0, "stderr: {}", run.stderr);
    };
    scan_as("json", &json_out);
    scan_as("csv", &csv_out);

    let json = read_json(&json_out);
    let report = &json["reports"][0];
    let csv = std::fs::read_to_string(&csv_out).unwrap();
    let mut sections = csv.split("\n\n");

    let hist_lines: Vec<&str> = sections.next().unwrap().lines().skip(1).collect();
    assert_eq!(hist_lines.len(), report["histogram"].as_array().unwrap().len());
    for (ell, line) in hist_lines.iter().enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields[0].parse::<u64>().unwrap(), report["n"].as_u64().unwrap());
        assert_eq!(fields[1].parse::<u64>().unwrap(), report["family_size"].as_u64().unwrap());
        assert_eq!(fields[2].parse::<f64>().unwrap(), report["lambda"].as_f64().unwrap());
        assert_eq!(
            fields[3].parse::<u64>().unwrap(),
            report["excluded_pairs"].as_u64().unwrap()
        );
        assert_eq!(
            fields[5].parse::<u64>().unwrap(),
            report["histogram"][ell].as_u64().unwrap()
        );
    }

    let poisson_lines: Vec<&str> = sections.next().unwrap().trim_end().lines().skip(1).collect();
    let rows = json["poisson_rows"].as_array().unwrap();
    assert_eq!(poisson_lines.len(), rows.len());
    for (row, line) in rows.iter().zip(poisson_lines) {
        let fields: Vec<&str> = line.split(',').collect();
        for (i, key) in
            ["empirical", "raw_reference", "poisson_reference", "ratio"].iter().enumerate()
        {
            assert_eq!(
                fields[i + 1].parse::<f64>().unwrap(),
                row[*key].as_f64().unwrap(),
                "{key} differs between CSV and JSON"
            );
        }
    }
}

#[test]
fn plot_data_files_ride_the_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let out = dir.path().join("run.json");
    let run = curve_census(&[
        "scan", "--A", "25", "--B", "25", "--N", "9", "--aggregate", "--plot-data",
        "--out", out.to_str().unwrap(),
        "--cache-dir", cache.to_str().unwrap(),
    ]);
    assert_eq!(run.code, 0, "stderr: {}", run.stderr);

    let expected = [
        "run_lambda.dat",
        "run_hist.dat",
        "run_poisson_empirical.dat",
        "run_poisson_reference.dat",
    ];
    let manifest = read_json(&dir.path().join("run.json.manifest.json"));
    let listed: Vec<String> = manifest["outputs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap().to_string())
        .collect();
    for name in expected {
        let path = dir.path().join(name);
        let series = std::fs::read_to_string(&path)
            .unwrap_or_else(|e| panic!("missing series {name}: {e}"));
        assert!(series.starts_with('#'), "{name} lacks a header comment");
        assert!(series.lines().count() >= 2, "{name} has no data");
        assert!(listed.iter().any(|l| l.ends_with(name)), "{name} not in manifest");
    }

    // Without --out there is nowhere to put the series files.
    let run = curve_census(&["scan", "--A", "5", "--B", "5", "--N", "9", "--plot-data"]);
    assert_eq!(run.code, 2);
    assert!(run.stderr.contains("--out"), "stderr: {}", run.stderr);
}

#[test]
fn corrupt_cache_entries_are_rebuilt() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let out = dir.path().join("a.json");
    let args = |out: &Path| {
        vec![
            "scan".to_string(), "--A".into(), "20".into(), "--B".into(), "20".into(),
            "--N".into(), "9".into(),
            "--out".into(), out.display().to_string(),
            "--cache-dir".into(), cache.display().to_string(),
        ]
    };
    let first: Vec<String> = args(&out);
    let run = curve_census(&first.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(run.code, 0, "stderr: {}", run.stderr);

    // Truncate one table mid-payload.
    let victim = std::fs::read_dir(&cache).unwrap().next().unwrap().unwrap().path();
    let bytes = std::fs::read(&victim).unwrap();
    std::fs::write(&victim, &bytes[..bytes.len() / 3]).unwrap();

    let out2 = dir.path().join("b.json");
    let second: Vec<String> = args(&out2);
    let run = curve_census(&second.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(run.code, 0, "stderr: {}", run.stderr);
    assert!(run.stderr.contains("rebuilding"), "no rebuild warning: {}", run.stderr);
    assert_eq!(std::fs::read(&out).unwrap(), std::fs::read(&out2).unwrap());
    assert_eq!(std::fs::read(&victim).unwrap(), bytes, "table not restored");
}

#[test]
fn moments_report_validates_and_assembles() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("moment.json");
    let run = curve_census(&[
        "moments", "--A", "30", "--B", "30", "--x", "300", "--gamma1", "2", "--plot-data",
        "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(run.code, 0, "stderr: {}", run.stderr);

    let json = read_json(&out);
    assert_matches_schema("moment_report.schema.json", &json);
    assert_eq!(json["ell"], 1);
    assert_eq!(json["terms"].as_array().unwrap().len(), 3);
    let empirical = json["empirical"].as_f64().unwrap();
    let predicted = json["predicted"].as_f64().unwrap();
    assert!(empirical > 0.0 && predicted > 0.0);
    // Desk-scale agreement is loose; the point here is plumbing, so only
    // guard against gross unit errors.
    assert!(empirical / predicted > 0.5 && empirical / predicted < 2.0);

    let series = std::fs::read_to_string(dir.path().join("moment_terms.dat")).unwrap();
    assert_eq!(series.lines().count(), 4);
}

#[test]
fn verify_suites_report_pass() {
    for args in [
        vec!["verify", "deuring", "--pmax", "30"],
        vec!["verify", "mass", "--pmax", "30"],
        vec!["verify", "combinatorics", "--max", "6"],
        vec!["verify", "weil", "--cases", "50"],
        vec!["verify", "constants", "--bound", "2000"],
        vec!["verify", "oracle-census", "--bound", "6"],
    ] {
        let run = curve_census(&args);
        assert_eq!(run.code, 0, "{args:?} stderr: {}", run.stderr);
        assert!(run.stdout.contains("PASS"), "{args:?} stdout: {}", run.stdout);
    }
}

#[test]
fn cache_lifecycle_warm_ls_gc() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let cache_flag = ["--cache-dir", cache.to_str().unwrap()];

    let run = curve_census(&[&["cache", "warm", "--pmax", "20"], &cache_flag[..]].concat());
    assert_eq!(run.code, 0, "stderr: {}", run.stderr);
    assert!(run.stdout.contains("warmed 6 order tables"), "stdout: {}", run.stdout);

    let run = curve_census(&[&["cache", "ls"], &cache_flag[..]].concat());
    assert_eq!(run.code, 0);
    assert_eq!(run.stdout.lines().count(), 7, "stdout: {}", run.stdout);
    assert!(run.stdout.contains("p = 19"));
    assert!(run.stdout.lines().last().unwrap().starts_with("6 tables, "));

    let run = curve_census(&[&["cache", "gc", "--max-bytes", "0"], &cache_flag[..]].concat());
    assert_eq!(run.code, 0);
    assert!(run.stdout.starts_with("removed 6 files"), "stdout: {}", run.stdout);

    let run = curve_census(&[&["cache", "ls"], &cache_flag[..]].concat());
    assert_eq!(run.stdout.trim(), "0 tables, 0 bytes");
}

#[test]
fn user_errors_exit_two() {
    // Reversed window.
    let run = curve_census(&["scan", "--A", "5", "--B", "5", "--N", "200..100"]);
    assert_eq!(run.code, 2, "stderr: {}", run.stderr);

    // Unusable worker count, flag and env variants.
    let run = curve_census(&["--workers", "0", "cache", "ls"]);
    assert_eq!(run.code, 2);
    let run = curve_census_env(&["cache", "ls"], &[("CURVE_CENSUS_WORKERS", "many")]);
    assert_eq!(run.code, 2);

    // Missing config file.
    let run = curve_census(&["--config", "/nonexistent/census.conf", "cache", "ls"]);
    assert_eq!(run.code, 2);
    assert!(run.stderr.contains("cannot read config"), "stderr: {}", run.stderr);

    // clap's own parse failures use the same code.
    let run = curve_census(&["scan", "--A", "5"]);
    assert_eq!(run.code, 2);
    let run = curve_census(&["no-such-command"]);
    assert_eq!(run.code, 2);
}

#[test]
fn stdout_scan_prints_bare_json() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let run = curve_census(&[
        "scan", "--A", "10", "--B", "10", "--N", "9",
        "--cache-dir", cache.to_str().unwrap(),
    ]);
    assert_eq!(run.code, 0, "stderr: {}", run.stderr);
    let json: serde_json::Value = serde_json::from_str(&run.stdout).expect("stdout is JSON");
    assert_matches_schema("scan_output.schema.json", &json);
    // No report file, no manifest.
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1, "only the cache dir");
}

#[test]
fn environment_variables_relocate_the_cache() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("env-cache");
    let run = curve_census_env(
        &["cache", "warm", "--pmax", "10"],
        &[("CURVE_CENSUS_CACHE_DIR", cache.to_str().unwrap())],
    );
    assert_eq!(run.code, 0, "stderr: {}", run.stderr);
    let names: Vec<String> = std::fs::read_dir(&cache)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    assert_eq!(names.len(), 2);
    assert!(names.contains(&"order_p5.eot".to_string()), "{names:?}");
    assert!(names.contains(&"order_p7.eot".to_string()), "{names:?}");
}
