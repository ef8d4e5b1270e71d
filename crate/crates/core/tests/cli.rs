use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_holderlie"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const SMALL: &str = r#"{
  "plan": {"kind": {"quasirandom": {"count": 16, "seed": 5}}},
  "corpus": {"count": 3, "seed": 8},
  "bch_pairs": 4,
  "rescaling_probes": 20,
  "isometry_grid": 500
}"#;

#[test]
fn full_run_passes_and_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "cfg.json", SMALL);
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for out in [&a, &b] {
        let o = run(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let (ra, rb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ra, rb);
    let v: serde_json::Value = serde_json::from_slice(&ra).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["total_failed"], 0);
    assert_eq!(v["suites"].as_object().unwrap().len(), 9);
    assert_eq!(v["constants"]["product"][0]["c"], 2.0);
    assert!(v.get("timings_seconds").is_none());
    let rec = &v["suites"]["product"]["records"][0];
    for key in ["check_id", "anchor", "lhs", "rhs", "margin", "pass"] {
        assert!(rec.get(key).is_some(), "missing {key}");
    }
    let ids: Vec<&str> = v["suites"]["chain"]["records"].as_array().unwrap().iter().map(|r| r["check_id"].as_str().unwrap()).collect();
    let mut sorted = ids.clone();
    sorted.sort();
    assert_eq!(ids, sorted);
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "cfg.json", SMALL);
    let o = run(&["run", "--config", &cfg, "--suite", "chain", "--seed", "3", "--kmax", "3", "--tol", "1e-6", "--timings"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["suites"].as_object().unwrap().keys().collect::<Vec<_>>(), vec!["chain"]);
    assert_eq!(v["config"]["corpus"]["seed"], 3);
    assert_eq!(v["config"]["k_max"], 3);
    assert_eq!(v["config"]["tolerances"]["inequality"], 1e-6);
    assert!(v["timings_seconds"]["chain"].is_number());
}

#[test]
fn empty_suite_list_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "cfg.toml", "suites = []\n");
    let o = run(&["run", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["total_checks"], 0);
}

#[test]
fn failing_check_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "cfg.toml",
        "suites = [\"norms\"]\nisometry_grid = 200\n[corpus]\ncount = 2\n[tolerances]\nisometry = -1.0\n",
    );
    let o = run(&["run", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("FAIL norms/isometry"));
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["run", "--suite", "nonsense"]).status.code(), Some(2));
    let bad = write(dir.path(), "bad.json", "{\"domain\": {\"ball\": {\"center\": [0.0], \"radius\": 0.9}}}");
    let o = run(&["run", "--config", &bad]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("diameter"));
    assert_eq!(run(&["run", "--config", "/nonexistent/cfg.json"]).status.code(), Some(2));
}

#[test]
fn constants_formats() {
    let json = run(&["constants", "--kmax", "3"]);
    assert_eq!(json.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(v["product"].as_array().unwrap().len(), 4);
    assert_eq!(v["interpolation"][0]["constants"][0], 1.0);
    let csv1 = run(&["constants", "--format", "csv"]).stdout;
    let csv2 = run(&["constants", "--format", "csv"]).stdout;
    assert_eq!(csv1, csv2);
    assert!(String::from_utf8(csv1).unwrap().contains("product,0,,c,2e0"));
}

#[test]
fn generated_corpus_with_words_runs() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("corpus.json");
    let o = run(&["corpus", "--count", "4", "--in-dim", "2", "--out-dim", "9", "--degree", "2", "--seed", "1", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    // shrink the generated functions into the BCH domain and add a word over them
    let mut corpus: serde_json::Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    for f in corpus["functions"].as_array_mut().unwrap() {
        for part in f["parts"].as_array_mut().unwrap() {
            for c in part.as_array_mut().unwrap() {
                *c = serde_json::json!(c.as_f64().unwrap() * 0.004);
            }
        }
    }
    corpus["words"] = serde_json::json!([{
        "id": "w0", "algebra": "abelian3",
        "letters": [{"sign": 1, "function": "f0000"}, {"sign": -1, "function": "f0001"}]
    }]);
    std::fs::write(&path, corpus.to_string()).unwrap();
    let cfg = write(
        dir.path(),
        "cfg.json",
        &format!(
            "{{\"suites\": [\"group\", \"chain\"], \"algebras\": [\"so3\"], \"plan\": {{\"kind\": {{\"grid\": {{\"points_per_axis\": 5}}}}}}, \"corpus\": {{\"file\": {:?}}}}}",
            path.to_str().unwrap()
        ),
    );
    let o = run(&["run", "--config", &cfg]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let recs = v["suites"]["group"]["records"].as_array().unwrap();
    let word = recs.iter().find(|r| r["check_id"] == "group/word/w0").unwrap();
    assert_eq!(word["pass"], true, "{word}");
    assert_eq!(o.status.code(), Some(0));
    assert!(v["suites"]["chain"]["failed"] == 0);
}
