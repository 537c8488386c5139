use archrec_web::{compare, recover, smells};
use serde_json::Value;

const DEPS: &str = "\
depends app.Main app.Config
depends app.Main net.Client
depends net.Client net.Socket
depends net.Socket io.Buffer
";

fn parse(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn pkg_recovery_groups_by_package() {
    let out = parse(&recover("pkg", DEPS, "", "").unwrap());
    assert_eq!(out["clusterCount"], 3);
    assert_eq!(out["entityCount"], 5);
    assert!(out["rsf"].as_str().unwrap().contains("contain net net.Socket\n"));
    assert!(out.get("concerns").is_none());
}

#[test]
fn acdc_recovery_covers_every_node() {
    let out = parse(&recover("acdc", DEPS, "", "").unwrap());
    assert_eq!(out["entityCount"], 5);
}

#[test]
fn arc_recovery_returns_concerns() {
    let corpus = r#"{"documents": {
        "app.Main": {"start": 3, "main": 2}, "app.Config": {"config": 3, "start": 1},
        "net.Client": {"socket": 2, "host": 2}, "net.Socket": {"socket": 3, "byte": 1},
        "io.Buffer": {"byte": 3, "flush": 2}}}"#;
    let opts = r#"{"arc": {"topics": 3, "iterations": 50, "clusters": 2}}"#;
    let first = recover("arc", DEPS, corpus, opts).unwrap();
    assert_eq!(first, recover("arc", DEPS, corpus, opts).unwrap());
    let out = parse(&first);
    assert_eq!(out["clusterCount"], 2);
    assert_eq!(out["concerns"]["topics"].as_object().unwrap().len(), 3);
}

#[test]
fn bad_input_is_reported_not_panicked() {
    assert!(recover("kmeans", DEPS, "", "").unwrap_err().contains("kmeans"));
    assert!(recover("pkg", "depends onlyone\n", "", "").unwrap_err().contains("line 1"));
    assert!(recover("pkg", DEPS, "", "{not json").is_err());
    assert!(compare("a2a", "contain x a\ncontain y a\n", "contain x a\n", 0.5).is_err());
    assert!(compare("edit", "contain x a\n", "contain x a\n", 0.5).is_err());
    assert!(compare("cvg", "contain x a\n", "contain x a\n", 0.0).is_err());
}

#[test]
fn compare_matches_hand_counts() {
    let a = "contain x a\ncontain x b\ncontain y c\n";
    let b = "contain p a\ncontain p b\ncontain p c\n";
    // move c, drop the emptied cluster; 2 + 3 + 3 and 1 + 3 + 3 operations
    // build each from nothing
    let v = parse(&compare("a2a", a, b, 0.5).unwrap());
    let expected = (1.0 - 2.0 / 15.0) * 100.0;
    assert!((v["value"].as_f64().unwrap() - expected).abs() < 1e-9);

    let v = parse(&compare("mojofm", a, a, 0.5).unwrap());
    assert_eq!(v["value"], 100.0);

    let v = parse(&compare("cvg", a, b, 0.5).unwrap());
    assert_eq!(v["forward"]["value"], 50.0);
    assert_eq!(v["backward"]["value"], 100.0);
}

#[test]
fn smells_apply_threshold_overrides() {
    let arch = "contain c1 a\ncontain c2 b\ncontain c3 c\n";
    let concerns = r#"{"topics": {"0": ["net"], "1": ["disk"]},
        "clusters": {"c1": [[0, 0.5], [1, 0.5]], "c2": [[0, 0.6], [1, 0.4]], "c3": [[0, 0.7], [1, 0.3]]}}"#;
    let v = parse(&smells(arch, concerns, "").unwrap());
    assert_eq!(v["findings"].as_array().unwrap().len(), 2);
    assert_eq!(v["thresholds"]["scatter"], 3);
    let v = parse(&smells(arch, concerns, r#"{"scatter": 4}"#).unwrap());
    assert!(v["findings"].as_array().unwrap().is_empty());
    assert!(smells(arch, concerns, r#"{"overload": 0}"#).is_err());
}
