use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

struct Run {
    _dir: tempfile::TempDir,
    root: PathBuf,
}

impl Run {
    fn new() -> Run {
        let dir = tempfile::tempdir().unwrap();
        let root = dir.path().to_path_buf();
        Run { _dir: dir, root }
    }

    fn config(&self, name: &str, cfg: Value) -> PathBuf {
        let path = self.root.join(name);
        fs::write(&path, serde_json::to_string(&cfg).unwrap()).unwrap();
        path
    }

    fn out(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }
}

fn kppwaves(args: &[&str], config: &Path, out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kppwaves"))
        .args(args)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn read_json(path: PathBuf) -> Value {
    serde_json::from_str(&fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn analyze_reports_critical_speed_and_p2_kind() {
    let run = Run::new();
    let cfg = run.config("c.json", json!({"model": {"m": 2, "p": 2, "q": 1}, "speeds": [1]}));
    let out = run.out("o");
    let o = kppwaves(&["analyze"], &cfg, &out);
    assert!(o.status.success(), "{}", stderr(&o));
    let report = read_json(out.join("analyze.json"));
    assert_eq!(report["critical_speed"], 2.0);
    assert_eq!(report["regime"], "CaseI");
    let p2 = report["speeds"][0]["fixed_points"].as_array().unwrap().iter().find(|f| f["label"] == "P2").unwrap().clone();
    assert_eq!(p2["kind"], "StableFocus");
    let printed: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(printed, report);

    let fisher = run.config("f.json", json!({"model": {"m": 1, "p": 2, "q": 1}}));
    let o = kppwaves(&["analyze"], &fisher, &run.out("f"));
    assert!(o.status.success());
    assert_eq!(read_json(run.out("f").join("analyze.json"))["regime"], "CaseII");
}

#[test]
fn unsupported_triple_names_the_failed_hypothesis() {
    let run = Run::new();
    let cfg = run.config("c.json", json!({"model": {"m": 1, "p": 1, "q": 2}, "speeds": [1]}));
    let o = kppwaves(&["analyze"], &cfg, &run.out("o"));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("p>q"), "{}", stderr(&o));
}

#[test]
fn invalid_fields_are_reported_by_path() {
    let run = Run::new();
    let cfg = run.config("c.json", json!({"model": {"m": 2, "p": 2, "q": 1}, "pde": {"cfl": 2.0}}));
    let o = kppwaves(&["shoot"], &cfg, &run.out("o"));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("pde.cfl"), "{}", stderr(&o));
    let typo = run.config("t.json", json!({"model": {"m": 2, "p": 2, "q": 1}, "speed": [1]}));
    assert_eq!(kppwaves(&["shoot"], &typo, &run.out("t")).status.code(), Some(2));
}

#[test]
fn shoot_writes_profiles_and_classifications() {
    let run = Run::new();
    let cfg = run.config("c.json", json!({"model": {"m": 2, "p": 2, "q": 1}, "speeds": [-1, -3, 1]}));
    let out = run.out("o");
    let o = kppwaves(&["shoot"], &cfg, &out);
    assert!(o.status.success(), "{}", stderr(&o));
    let entries = read_json(out.join("classification.json"));
    let classes: Vec<&str> = entries.as_array().unwrap().iter().map(|e| e["classification"].as_str().unwrap()).collect();
    assert_eq!(classes, ["Oscillatory", "Monotone", "None"]);
    assert!(out.join("profile_c-1.000000.csv").exists());
    assert!(out.join("profile_c-3.000000.csv").exists());
    assert!(!out.join("profile_c+1.000000.csv").exists());
    assert!(entries[2]["profile_file"].is_null());
    assert!(entries[0]["overshoot_amplitudes"].as_array().unwrap().len() >= 2);
    let profile = fs::read_to_string(out.join("profile_c-3.000000.csv")).unwrap();
    assert!(profile.starts_with("xi,f,df\n"));
    assert!(fs::read_to_string(out.join("trajectory_c-3.000000.csv")).unwrap().starts_with("tau,x,y\n"));
}

#[test]
fn shoot_without_speeds_is_a_no_op() {
    let run = Run::new();
    let cfg = run.config("c.json", json!({"model": {"m": 2, "p": 2, "q": 1}}));
    let out = run.out("o");
    let o = kppwaves(&["shoot"], &cfg, &out);
    assert!(o.status.success());
    assert!(stderr(&o).contains("no speeds"), "{}", stderr(&o));
    assert!(!out.join("classification.json").exists());
}

#[test]
fn pde_needs_the_profiles_from_shoot() {
    let run = Run::new();
    let cfg = run.config("c.json", json!({"model": {"m": 2, "p": 2, "q": 1}, "speeds": [-3]}));
    let o = kppwaves(&["pde"], &cfg, &run.out("o"));
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("MissingArtifact") && err.contains("wave_c-3.000000.json"), "{err}");
}

#[test]
fn pde_advects_monotone_and_skips_missing_waves() {
    let run = Run::new();
    let cfg = run.config(
        "c.json",
        json!({"model": {"m": 1, "p": 2, "q": 1}, "speeds": [-3, 1], "pde": {"n": 1000, "t_end": 5, "snapshot_times": [0, 2.5, 5]}}),
    );
    let out = run.out("o");
    assert!(kppwaves(&["shoot"], &cfg, &out).status.success());
    let o = kppwaves(&["pde"], &cfg, &out);
    assert!(o.status.success(), "{}", stderr(&o));
    let summary = read_json(out.join("pde_summary.json"));
    assert!(summary[0]["max_error"].as_f64().unwrap() < 0.02);
    assert!((summary[0]["measured_speed"].as_f64().unwrap() + 3.0).abs() < 0.06);
    assert!(summary[1]["skipped"].is_string());
    let snapshots = fs::read_to_string(out.join("snapshots_c-3.000000.csv")).unwrap();
    assert!(snapshots.starts_with("t,x,u\n"));
    assert_eq!(snapshots.lines().count(), 1 + 3 * 1000);
    let front = fs::read_to_string(out.join("front_c-3.000000.csv")).unwrap();
    assert!(front.starts_with("t,x_front\n") && front.lines().count() <= 2002);
}

#[test]
fn pde_at_time_zero_has_no_speed() {
    let run = Run::new();
    let cfg = run.config("c.json", json!({"model": {"m": 2, "p": 2, "q": 1}, "speeds": [-3], "pde": {"n": 400, "t_end": 0}}));
    let out = run.out("o");
    assert!(kppwaves(&["shoot"], &cfg, &out).status.success());
    let o = kppwaves(&["pde"], &cfg, &out);
    assert!(o.status.success(), "{}", stderr(&o));
    let summary = read_json(out.join("pde_summary.json"));
    assert_eq!(summary[0]["max_error"], 0.0);
    assert!(summary[0]["measured_speed"].is_null());
}

#[test]
fn cramped_pde_domain_suggests_a_larger_one() {
    let run = Run::new();
    let cfg = run.config(
        "c.json",
        json!({"model": {"m": 1, "p": 2, "q": 1}, "speeds": [-3], "pde": {"n": 400, "x_min": -10, "x_max": 10}}),
    );
    let out = run.out("o");
    assert!(kppwaves(&["shoot"], &cfg, &out).status.success());
    let o = kppwaves(&["pde"], &cfg, &out);
    assert_eq!(o.status.code(), Some(3));
    let summary = read_json(out.join("pde_summary.json"));
    let suggested = summary[0]["suggested_domain"].as_array().unwrap();
    assert!(suggested[0].as_f64().unwrap() < -10.0 && suggested[1].as_f64().unwrap() > 10.0);
}

#[test]
fn sweep_brackets_the_critical_speed() {
    let run = Run::new();
    let cfg = run.config("c.json", json!({"model": {"m": 2, "p": 2, "q": 1}, "sweep": {"from": -3, "to": -0.5, "step": 0.25}}));
    let out = run.out("o");
    let o = kppwaves(&["sweep", "--jobs", "2"], &cfg, &out);
    assert!(o.status.success(), "{}", stderr(&o));
    let summary = read_json(out.join("sweep_summary.json"));
    assert_eq!(summary["bracket_contains_transition"], true);
    assert_eq!(summary["rows"], 11);
    assert_eq!(summary["disagreements"], 0);
    let table = fs::read_to_string(out.join("sweep.csv")).unwrap();
    assert!(table.starts_with("c,canonical_c,predicted_class,observed_class,x0,n_oscillations,agreement_flag,low_confidence,error\n"));
    let cs: Vec<f64> = table.lines().skip(1).map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
    assert!(cs.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn single_point_sweep_at_critical_speed_is_low_confidence() {
    let run = Run::new();
    let cfg = run.config("c.json", json!({"model": {"m": 2, "p": 2, "q": 1}, "speeds": [-2]}));
    let out = run.out("o");
    let o = kppwaves(&["sweep", "--format", "json"], &cfg, &out);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = read_json(out.join("sweep.json"));
    assert_eq!(rows[0]["observed_class"], "Monotone");
    assert_eq!(rows[0]["low_confidence"], true);
}

#[test]
fn positive_speeds_carry_no_wave() {
    let run = Run::new();
    let cfg = run.config("c.json", json!({"model": {"m": 2, "p": 2, "q": 1}, "sweep": {"from": 0.5, "to": 2, "step": 0.5}}));
    let out = run.out("o");
    assert!(kppwaves(&["sweep", "--format", "json"], &cfg, &out).status.success());
    let rows = read_json(out.join("sweep.json"));
    assert!(rows.as_array().unwrap().iter().all(|r| r["observed_class"] == "None" && r["agreement_flag"] == true));
}

#[test]
fn general_model_speeds_are_rescaled() {
    let run = Run::new();
    let cfg = run.config("c.json", json!({"model": {"m": 1, "p": 2, "q": 1, "kappa": 4}, "speeds": [-6]}));
    let out = run.out("o");
    assert!(kppwaves(&["shoot"], &cfg, &out).status.success());
    let entries = read_json(out.join("classification.json"));
    assert!((entries[0]["canonical_c"].as_f64().unwrap() + 3.0).abs() < 1e-12);
    assert_eq!(entries[0]["classification"], "Monotone");
    let o = kppwaves(&["analyze"], &cfg, &out);
    assert!(o.status.success());
    assert_eq!(read_json(out.join("analyze.json"))["critical_speed_configured"], 4.0);
}

fn listing(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap() != "effective_config.json")
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

#[test]
fn reruns_are_byte_identical_and_the_echoed_config_reproduces_them() {
    let run = Run::new();
    let cfg = run.config(
        "c.json",
        json!({"model": {"m": 2, "p": 2, "q": 1}, "speeds": [-1, -2.5], "pde": {"n": 300, "t_end": 1, "snapshot_times": [0.5]}}),
    );
    let (a, b, c) = (run.out("a"), run.out("b"), run.out("c"));
    for out in [&a, &b] {
        for cmd in ["shoot", "pde", "sweep"] {
            let o = kppwaves(&[cmd], &cfg, out);
            assert!(o.status.success(), "{cmd}: {}", stderr(&o));
        }
    }
    assert_eq!(listing(&a), listing(&b));

    let echoed = a.join("effective_config.json");
    let mut resolved = read_json(echoed.clone());
    assert_eq!(resolved["pde"]["cfl"], 0.4);
    resolved["output_dir"] = json!(c.to_string_lossy());
    let replay = run.config("replay.json", resolved);
    for cmd in ["shoot", "pde", "sweep"] {
        let o = Command::new(env!("CARGO_BIN_EXE_kppwaves")).args([cmd, "--config"]).arg(&replay).output().unwrap();
        assert!(o.status.success(), "{cmd}: {}", stderr(&o));
    }
    assert_eq!(listing(&a), listing(&c));
}
