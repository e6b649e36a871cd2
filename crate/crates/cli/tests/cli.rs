use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn synthgraph(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_synthgraph")).args(args).output().unwrap()
}

fn ok(args: &[&str]) {
    let out = synthgraph(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn stylized_single_and_suite() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rr.tsv");
    ok(&["gen-stylized", "--family", "rr", "--n", "50", "--d", "4", "--seed", "9", "--out", p(&out)]);
    let meta = json(&dir.path().join("rr.tsv.meta.json"));
    assert_eq!(meta["family"], "RandomRegular");
    assert_eq!(meta["node_count"], 50);
    assert_eq!(fs::read_to_string(&out).unwrap().lines().count(), 100);
    let manifest = json(&dir.path().join("rr.tsv.manifest.json"));
    assert_eq!(manifest["subcommand"], "gen-stylized");
    assert_eq!(manifest["seeds"]["seed"], 9);
    assert_eq!(manifest["outputs"].as_array().unwrap().len(), 2);

    let suite = dir.path().join("suite");
    ok(&["gen-stylized", "--table3", "--n", "200", "--out-dir", p(&suite)]);
    let tsvs = fs::read_dir(&suite).unwrap().filter(|e| e.as_ref().unwrap().path().extension().unwrap() == "tsv");
    assert_eq!(tsvs.count(), 12);
    assert_eq!(json(&suite.join("gen-stylized.manifest.json"))["outputs"].as_array().unwrap().len(), 24);

    let missing = synthgraph(&["gen-stylized", "--family", "er", "--n", "10", "--out", p(&out)]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn population_to_plot_chain() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&["gen-population", "--households", "120", "--seed", "4", "--out-dir", p(d)]);
    let visits = d.join("visits.tsv");
    let contacts = d.join("contacts.tsv");
    ok(&["induce-contacts", "--visits", p(&visits), "--out", p(&contacts)]);
    let g4 = d.join("g4.tsv");
    ok(&["sample-contacts", "--contacts", p(&contacts), "--probs", "1,0.01,0.01,0.01,0.1", "--seed", "2", "--out", p(&g4)]);
    assert_eq!(json(&d.join("g4.tsv.meta.json"))["family"], "AgentSynthetic");

    let t2 = d.join("table2");
    ok(&["sample-contacts", "--contacts", p(&contacts), "--table2", "--seed", "2", "--out-dir", p(&t2)]);
    let summary = json(&t2.join("table2_summary.json"));
    let rows = summary.as_array().unwrap();
    assert_eq!(rows.len(), 10);
    assert_eq!(rows[9]["name"], "G4");
    assert_eq!(rows[9]["probabilities"], serde_json::json!([1.0, 0.01, 0.01, 0.01, 0.1]));
    // G4 sampled standalone with the same seed matches the suite's G4
    assert_eq!(fs::read(&g4).unwrap(), fs::read(t2.join("G4.tsv")).unwrap());

    let mut args = vec!["features".to_string(), "--layout".into(), "paper34".into()];
    for name in ["Full", "Home", "G1", "G2", "G3", "G4"] {
        args.push("--graph".into());
        args.push(p(&t2.join(format!("{name}.tsv"))).into());
    }
    let features = d.join("features.csv");
    args.extend(["--out".into(), p(&features).into()]);
    ok(&args.iter().map(String::as_str).collect::<Vec<_>>());
    let csv = fs::read_to_string(&features).unwrap();
    assert_eq!(csv.lines().count(), 7);
    assert_eq!(csv.lines().next().unwrap().split(',').count(), 36);
    assert!(d.join("features.provenance.json").exists());

    ok(&["analyze", "--features", p(&features), "--k", "2", "--out-dir", p(d)]);
    let analysis = json(&d.join("analysis.json"));
    assert_eq!(analysis["assignments"].as_array().unwrap().len(), 6);
    assert!(analysis["ari"].is_number());
    ok(&["plot", "--scatter", p(&d.join("scatter.csv")), "--out", p(&d.join("scatter.svg"))]);
    let svg = fs::read_to_string(d.join("scatter.svg")).unwrap();
    assert_eq!(svg.matches(r#"class="marker""#).count(), 6);
}

#[test]
fn raw_edge_list_features() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("tiny.txt");
    fs::write(&g, "# toy\n10\t20\n20\t30\n30\t10\n").unwrap();
    let out = dir.path().join("f.csv");
    ok(&["features", "--graph", p(&g), "--out", p(&out)]);
    let csv = fs::read_to_string(&out).unwrap();
    let row = csv.lines().nth(1).unwrap();
    assert!(row.starts_with("tiny,RealWorld,"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("scatter.csv");
    fs::write(&bad, "name,family,cluster,pc1,pc2\na,RealWorld,0,1,oops\n").unwrap();
    let out = synthgraph(&["plot", "--scatter", p(&bad), "--out", p(&dir.path().join("x.svg"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    // An unreachable IPF tolerance is a numerical failure.
    let cfg = dir.path().join("pop.json");
    ok(&["gen-population", "--households", "10", "--dump-config", p(&cfg), "--out-dir", p(dir.path())]);
    let mut v = json(&cfg);
    v["ipf"] = serde_json::json!({"tol": 0.0, "max_iter": 2});
    fs::write(&cfg, v.to_string()).unwrap();
    let out = synthgraph(&["gen-population", "--config", p(&cfg), "--out-dir", p(&dir.path().join("p2"))]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    let manifest = json(&dir.path().join("p2/gen-population.manifest.json"));
    assert_eq!(manifest["status"], "failed");
}

#[test]
fn pipeline_family_filter_and_missing_real_graph() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("pipeline.json");
    fs::write(
        &cfg,
        r#"{"stylized_n": 300, "real_graphs": [{"name": "absent", "path": "nope.txt", "directed": true}]}"#,
    )
    .unwrap();
    let out_dir = dir.path().join("run");
    let out = synthgraph(&["run-pipeline", "--config", p(&cfg), "--families", "stylized,real", "--out-dir", p(&out_dir)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not found"));
    assert_eq!(fs::read_to_string(out_dir.join("features.csv")).unwrap().lines().count(), 13);
    assert!(out_dir.join("scatter.svg").exists());

    let again = synthgraph(&["run-pipeline", "--config", p(&cfg), "--families", "stylized,real", "--out-dir", p(&out_dir)]);
    let log = String::from_utf8_lossy(&again.stderr);
    assert!(!log.contains("running"), "{log}");
}
