use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn lowrank(args: &[&str]) -> Output {
    lowrank_env(args, &[])
}

fn lowrank_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_lowrank"));
    cmd.args(args).env_remove("LOWRANK_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn gen(dir: &Path, config: &str, name: &str) -> PathBuf {
    let cfg = write(dir, &format!("{name}.json"), config);
    let out_dir = dir.join(name);
    let out = lowrank(&[
        "gen",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    out_dir
}

fn assert_same_files(a: &Path, b: &Path) {
    let mut names: Vec<_> = fs::read_dir(a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    let mut other: Vec<_> = fs::read_dir(b).unwrap().map(|e| e.unwrap().file_name()).collect();
    other.sort();
    assert_eq!(names, other);
    for n in names {
        assert_eq!(
            fs::read(a.join(&n)).unwrap(),
            fs::read(b.join(&n)).unwrap(),
            "{n:?} differs"
        );
    }
}

/// CSV text with the trailing `wall_ms` column removed.
fn strip_wall_ms(csv: &str) -> String {
    csv.lines()
        .map(|l| l.rsplit_once(',').map_or(l, |(head, _)| head))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn gen_matches_golden_bundles() {
    let tmp = TempDir::new().unwrap();
    for (cfg, dir) in [("gen_mc.json", "mc_5x4_seed7"), ("gen_rpca.json", "rpca_4x4_seed3")] {
        let out_dir = tmp.path().join(dir);
        let out = lowrank(&[
            "gen",
            "--config",
            golden(cfg).to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        assert_same_files(&golden(dir), &out_dir);
    }
}

#[test]
fn gen_seed_flag_overrides_config() {
    let tmp = TempDir::new().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    let cfg = golden("gen_mc.json");
    lowrank(&[
        "gen",
        "--config",
        cfg.to_str().unwrap(),
        "--seed",
        "8",
        "--out",
        a.to_str().unwrap(),
    ]);
    lowrank(&[
        "gen",
        "--config",
        cfg.to_str().unwrap(),
        "--seed",
        "8",
        "--out",
        b.to_str().unwrap(),
    ]);
    assert_same_files(&a, &b);
    assert_ne!(
        fs::read(a.join("m_true.txt")).unwrap(),
        fs::read(golden("mc_5x4_seed7/m_true.txt")).unwrap()
    );
}

#[test]
fn gen_rejects_rank_above_dimension() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(
        tmp.path(),
        "bad.json",
        r#"{"problem": "mc", "n1": 4, "n2": 3, "rank": 4, "rho": 0.5}"#,
    );
    let out = lowrank(&[
        "gen",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        tmp.path().join("x").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("rank"), "{}", stderr(&out));
}

#[test]
fn config_with_unknown_key_is_rejected() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(
        tmp.path(),
        "bad.json",
        r#"{"problem": "mc", "n1": 4, "n2": 3, "rank": 1, "rho": 0.5, "sede": 1}"#,
    );
    let out = lowrank(&[
        "gen",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        tmp.path().join("x").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("sede"), "{}", stderr(&out));
}

const MC_40: &str = r#"{"problem": "mc", "n1": 40, "n2": 40, "rank": 2, "rho": 0.6, "seed": 5}"#;

#[test]
fn solve_exit_codes_follow_recovery() {
    let tmp = TempDir::new().unwrap();
    let inst = gen(tmp.path(), MC_40, "mc");
    let inst = inst.to_str().unwrap();

    let ok = lowrank(&["solve", inst, "--tau", "data_bound"]);
    assert_eq!(code(&ok), 0, "{}", stderr(&ok));
    let rec = stdout_json(&ok);
    assert!(rec["rel_err"].as_f64().unwrap() <= 1e-3);
    assert_eq!(rec["tau_multiplier"].as_f64().unwrap(), 1.0);

    let biased = lowrank(&["solve", inst, "--tau", "0.01x"]);
    assert_eq!(code(&biased), 2);
    assert!(stdout_json(&biased)["rel_err"].as_f64().unwrap() >= 0.1);

    let oracle = lowrank(&["solve", inst, "--tau", "oracle_bound"]);
    assert_eq!(code(&oracle), 0, "{}", stderr(&oracle));
}

#[test]
fn solve_rpca_at_data_bound() {
    let tmp = TempDir::new().unwrap();
    let inst = gen(
        tmp.path(),
        r#"{"problem": "rpca", "n1": 60, "n2": 60, "rank": 2, "rho": 0.05, "seed": 11}"#,
        "rpca",
    );
    let out = lowrank(&["solve", inst.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
}

#[test]
fn solve_missing_instance_reports_path() {
    let out = lowrank(&["solve", "/nonexistent/bundle"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("/nonexistent/bundle"), "{}", stderr(&out));
}

#[test]
fn bad_tau_policy_is_a_usage_error() {
    let out = lowrank(&["solve", "/nonexistent/bundle", "--tau", "fast"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn solve_without_ground_truth_omits_error() {
    let tmp = TempDir::new().unwrap();
    let inst = gen(tmp.path(), MC_40, "mc");
    fs::remove_file(inst.join("m_true.txt")).unwrap();
    let out = lowrank(&["solve", inst.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout_json(&out)["rel_err"].is_null());

    let cert = lowrank(&["certify", inst.to_str().unwrap()]);
    assert_eq!(code(&cert), 1);
    assert!(
        stderr(&cert).contains("certification requires ground truth"),
        "{}",
        stderr(&cert)
    );
}

#[test]
fn certify_mc_pass_and_condition_c_failure() {
    let tmp = TempDir::new().unwrap();
    let inst = gen(tmp.path(), MC_40, "mc");
    let inst = inst.to_str().unwrap();
    let pass = lowrank(&["certify", inst]);
    assert_eq!(code(&pass), 0, "{}", stderr(&pass));
    assert_eq!(stdout_json(&pass)["certificate"]["passed"], true);

    let solve = stdout_json(&lowrank(&["solve", inst, "--tau", "oracle_bound"]));
    let low = format!("{}", 0.01 * solve["tau"].as_f64().unwrap());
    let fail = lowrank(&["certify", inst, "--tau", &low]);
    assert_eq!(code(&fail), 2);
    let rep = &stdout_json(&fail)["certificate"];
    assert!(rep["cond_c_value"].as_f64().unwrap() > 1.0, "{rep}");
}

#[test]
fn certify_rpca_reports_theorem5() {
    let tmp = TempDir::new().unwrap();
    let inst = gen(
        tmp.path(),
        r#"{"problem": "rpca", "n1": 30, "n2": 30, "rank": 1, "rho": 0.05, "seed": 2}"#,
        "rpca",
    );
    let out = lowrank(&["certify", inst.to_str().unwrap()]);
    assert!(matches!(code(&out), 0 | 2), "{}", stderr(&out));
    let rep = stdout_json(&out);
    assert!(rep["theorem5"]["passed"].is_boolean());
    assert!(rep["lemmas"].is_object());
}

#[test]
fn tau_frontier_orders_bounds() {
    let tmp = TempDir::new().unwrap();
    let inst = gen(tmp.path(), MC_40, "mc");
    let out = lowrank(&["tau-frontier", inst.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let rep = stdout_json(&out);
    let tmin = rep["tau_min_empirical"].as_f64().unwrap();
    let oracle = rep["tau_oracle_bound"].as_f64().unwrap();
    let data = rep["tau_data_bound"].as_f64().unwrap();
    assert!(tmin <= oracle && oracle <= data, "{rep}");
}

const SWEEP: &str = r#"{
  "problem": "mc", "n1": 30, "n2": 30, "ranks": [1, 2], "rhos": [0.5],
  "tau_multipliers": [0.01, 1.0], "trials": 3, "base_seed": 100
}"#;

#[test]
fn sweep_is_deterministic_across_thread_counts() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "sweep.json", SWEEP);
    let mut csvs = Vec::new();
    let mut summaries = Vec::new();
    for (i, threads) in ["1", "4", "4"].iter().enumerate() {
        let out_csv = tmp.path().join(format!("run{i}.csv"));
        let out = lowrank_env(
            &[
                "sweep",
                "--config",
                cfg.to_str().unwrap(),
                "--out",
                out_csv.to_str().unwrap(),
            ],
            &[("LOWRANK_THREADS", threads)],
        );
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        assert!(!tmp.path().join(format!("run{i}.partial.csv")).exists());
        csvs.push(strip_wall_ms(&fs::read_to_string(&out_csv).unwrap()));
        let summary = fs::read_to_string(tmp.path().join(format!("run{i}.summary.json"))).unwrap();
        summaries.push(summary.replace(&format!("run{i}.csv"), "run.csv"));
    }
    assert_eq!(csvs[0], csvs[1]);
    assert_eq!(csvs[1], csvs[2]);
    assert_eq!(summaries[0], summaries[1]);
    let lines: Vec<&str> = csvs[0].lines().collect();
    assert_eq!(lines[0], "seed,n1,n2,r,rho,tau_multiplier,tau,rel_err,success,iters");
    assert_eq!(lines.len(), 1 + 2 * 2 * 3);
    assert!(lines[1].starts_with("100,"));
    assert!(lines[4].starts_with("1000100,"));
}

#[test]
fn single_trial_sweep_matches_solve() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(
        tmp.path(),
        "one.json",
        r#"{"problem": "mc", "n1": 40, "n2": 40, "ranks": [2], "rhos": [0.6], "tau_multipliers": [1.0], "base_seed": 5}"#,
    );
    let out_csv = tmp.path().join("one.csv");
    let out = lowrank(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_csv.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let csv = fs::read_to_string(&out_csv).unwrap();
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();

    let inst = gen(tmp.path(), MC_40, "mc");
    let rec = stdout_json(&lowrank(&["solve", inst.to_str().unwrap()]));
    assert_eq!(row[0], rec["seed"].to_string());
    assert_eq!(row[6].parse::<f64>().unwrap(), rec["tau"].as_f64().unwrap());
    assert_eq!(row[7].parse::<f64>().unwrap(), rec["rel_err"].as_f64().unwrap());
    assert_eq!(row[8], rec["success"].to_string());
    assert_eq!(row[9], rec["iters"].to_string());
}

#[test]
fn sweep_config_errors_precede_work() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(
        tmp.path(),
        "bad.json",
        r#"{"problem": "mc", "n1": 10, "n2": 10, "ranks": [1], "rhos": [0.5], "tau_multipliers": [-1.0]}"#,
    );
    let out_csv = tmp.path().join("bad.csv");
    let out = lowrank(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_csv.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 1);
    assert!(!out_csv.exists());
    assert!(!tmp.path().join("bad.partial.csv").exists());
}
