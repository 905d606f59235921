use std::path::Path;
use std::process::{Command, Output};

fn cavlab(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cavlab"))
        .args(args)
        .current_dir(dir)
        .env_remove("CAVLAB_OUT")
        .output()
        .unwrap()
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

#[test]
fn vlambda_table() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "c.json", r#"{"experiment": "vlambda", "lambda": 2.0, "k_max": 60, "output": "v.csv"}"#);
    let o = cavlab(&["run", "c.json"], d.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(d.path().join("v.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "lambda,k,a_k,b_k,gap,bound,pass");
    assert_eq!(lines.len(), 62);
    let b60: f64 = lines[61].split(',').nth(3).unwrap().parse().unwrap();
    let a2 = cavlab::vlambda::fixed_point_a(2.0, 1e-14).unwrap();
    assert!((b60 - a2).abs() < 1e-10);
    let side: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d.path().join("v.json")).unwrap()).unwrap();
    assert_eq!(side["config"]["experiment"], "vlambda");
    assert!(side["wall_time_s"].as_f64().unwrap() >= 0.0);
    assert!(side["version"].is_string());
}

#[test]
fn solve_matches_brute_force() {
    let d = tempfile::tempdir().unwrap();
    write(
        d.path(),
        "s.json",
        r#"{"experiment": "solve", "problem": "MWM", "n": 4,
            "edges": [[0, 1, 1.0], [1, 2, 3.0], [2, 3, 1.0], [0, 3, 1.5]], "output": "s.csv"}"#,
    );
    let o = cavlab(&["run", "s.json"], d.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(d.path().join("s.csv")).unwrap();
    assert_eq!(csv, "problem,n,lambda,value,brute_force,chosen_edges\nMWM,4,,4.5,4.5,0-3 1-2\n");
}

#[test]
fn missing_key_exits_one() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "bad.json", r#"{"experiment": "vlambda", "k_max": 60}"#);
    for cmd in ["run", "validate"] {
        let o = cavlab(&[cmd, "bad.json"], d.path());
        assert_eq!(o.status.code(), Some(1));
        assert!(String::from_utf8_lossy(&o.stderr).contains("`lambda`"));
    }
    write(d.path(), "typo.json", r#"{"experiment": "vlambda", "lambda": 2, "k_max": 6, "kmax": 1}"#);
    let o = cavlab(&["validate", "typo.json"], d.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("kmax"));
}

#[test]
fn identical_configs_give_identical_bytes() {
    let d = tempfile::tempdir().unwrap();
    let cfg = r#"{"experiment": "clt", "problem": "DMM", "n_list": [40, 80], "lambda": 2.0,
                  "reps": 60, "master_seed": 9, "output": "OUT"}"#;
    write(d.path(), "a.json", &cfg.replace("OUT", "a/r.csv"));
    write(d.path(), "b.json", &cfg.replace("OUT", "b/r.csv").replace("\"master_seed\": 9", "\"master_seed\": 9, \"workers\": 1"));
    assert!(cavlab(&["run", "a.json"], d.path()).status.success());
    assert!(cavlab(&["run", "b.json"], d.path()).status.success());
    for f in ["r.csv", "r.ks.csv"] {
        let a = std::fs::read(d.path().join("a").join(f)).unwrap();
        let b = std::fs::read(d.path().join("b").join(f)).unwrap();
        assert_eq!(a, b, "{f}");
    }
    let c = cavlab(&["run", "a.json", "--seed", "10"], d.path());
    assert!(c.status.success());
    let a = std::fs::read(d.path().join("a/r.csv")).unwrap();
    let b = std::fs::read(d.path().join("b/r.csv")).unwrap();
    assert_ne!(a, b);
}

#[test]
fn out_dir_from_environment() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "c.json", r#"{"experiment": "identity", "n": 5, "lambda": 2.0, "reps": 20}"#);
    let o = Command::new(env!("CARGO_BIN_EXE_cavlab"))
        .args(["run", "c.json"])
        .current_dir(d.path())
        .env("CAVLAB_OUT", d.path().join("env_out"))
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(d.path().join("env_out/identity.csv")).unwrap();
    assert!(csv.starts_with("n,lambda,reps,passed,"));
}

#[test]
fn every_experiment_validates() {
    let d = tempfile::tempdir().unwrap();
    let configs = [
        r#"{"experiment": "bracket", "problem": "EC", "n": 12, "lambda": 2, "k": 2, "reps": 10}"#,
        r#"{"experiment": "delta_k", "problem": "MWM", "ks": [3, 5], "lambda": 2, "reps": 200}"#,
        r#"{"experiment": "vlambda6", "lambda_list": [1, 4], "m": 256, "k_max": 100}"#,
        r#"{"experiment": "varprofile", "problem": "MWM", "n_list": [50, 100], "lambda": 2, "reps": 20}"#,
        r#"{"experiment": "truncation", "n": 20, "reps": 5}"#,
        r#"{"experiment": "treeprob", "n": 100, "lambda": 2, "k": 2, "reps": 100}"#,
        r#"{"experiment": "coupling", "n_list": [100], "lambda": 2, "k": 1, "reps": 1000, "statistic": "root_degree"}"#,
    ];
    for (i, c) in configs.iter().enumerate() {
        let name = format!("c{i}.json");
        write(d.path(), &name, c);
        let o = cavlab(&["validate", &name], d.path());
        assert!(o.status.success(), "{c}: {}", String::from_utf8_lossy(&o.stderr));
        let o = cavlab(&["run", &name], d.path());
        assert!(o.status.success(), "{c}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn golden_bracket_and_truncation() {
    let d = tempfile::tempdir().unwrap();
    write(
        d.path(),
        "g.json",
        r#"{"experiment": "bracket", "problem": "DMM", "n": 30, "lambda": 2, "k": 2, "reps": 40,
            "master_seed": 3, "output": "g.csv"}"#,
    );
    assert!(cavlab(&["run", "g.json"], d.path()).status.success());
    let csv = std::fs::read_to_string(d.path().join("g.csv")).unwrap();
    assert!(csv.lines().count() > 1);
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",true")));
}
