mod common;

use std::fs;

use common::{node, scenario_json, service, shipped, write_scenario};
use sami_cli::{cmd_compare, cmd_run, cmd_validate, compare_reports, validate, Format};
use sami_core::infra::Policy;
use sami_core::workload::load_scenario;
use sami_core::{SecurityClass, Tier};

#[test]
fn run_writes_both_files() {
    let dir = tempfile::tempdir().unwrap();
    let code = cmd_run(&shipped("hot_cloud_service"), None, Policy::Sami, dir.path(), Format::Both);
    assert_eq!(code, 0);
    let csv = fs::read_to_string(dir.path().join("metrics.csv")).unwrap();
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("metrics.json")).unwrap()).unwrap();
    assert!(csv.starts_with("kind,policy,seed,service_id,tier,"));
    assert_eq!(csv.lines().count(), 1 + 3 + 1);
    assert_eq!(json["policy"], "sami");
    assert_eq!(json["seed"], 7);
    assert_eq!(json["services"].as_array().unwrap().len(), 3);
}

#[test]
fn single_format_writes_one_file() {
    let dir = tempfile::tempdir().unwrap();
    let code = cmd_run(&shipped("dealer_hours"), Some(1), Policy::Pinned(Tier::Mno), dir.path(), Format::Json);
    assert_eq!(code, 0);
    assert!(dir.path().join("metrics.json").exists());
    assert!(!dir.path().join("metrics.csv").exists());
}

#[test]
fn missing_scenario_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.json");
    assert_eq!(cmd_run(&missing, None, Policy::Sami, dir.path(), Format::Both), 2);
    assert_eq!(cmd_compare(&missing, None, dir.path()), 2);
    assert_eq!(cmd_validate(&missing), 2);
}

#[test]
fn unplaceable_service_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let mut s = service("pay");
    s.security_class = SecurityClass::Critical;
    let path = write_scenario(
        dir.path(),
        "cloud_only",
        &scenario_json(5000.0, &[node("C1", Tier::Cloud)], &[s], &[("pay", 1.0)]),
    );
    assert_eq!(cmd_run(&path, None, Policy::Sami, dir.path(), Format::Both), 3);
    assert_eq!(cmd_compare(&path, None, dir.path()), 3);
    assert!(!dir.path().join("metrics.csv").exists());
}

#[test]
fn unwritable_output_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    assert_eq!(cmd_run(&shipped("hot_cloud_service"), None, Policy::Sami, &blocker, Format::Csv), 1);
}

#[test]
fn validate_lists_every_violation() {
    let dir = tempfile::tempdir().unwrap();
    let mut a = service("a");
    a.version = "one".into();
    a.capability_tags = ["Compute".to_owned()].into();
    let mut b = service("b");
    b.sla_latency_ms = 0.0;
    let path = write_scenario(
        dir.path(),
        "bad",
        &scenario_json(1000.0, &[node("M1", Tier::Mno)], &[a, b], &[("a", 1.0)]),
    );
    let problems = validate(&path).unwrap();
    assert_eq!(problems.len(), 3, "{problems:?}");
    assert!(problems[0].starts_with("services[0] (a).version"));
    assert!(problems[1].starts_with("services[0] (a).capability_tags"));
    assert!(problems[2].starts_with("services[1] (b).sla_latency_ms"));
    assert_eq!(cmd_validate(&path), 2);
}

#[test]
fn validate_accepts_shipped_scenarios() {
    for name in ["latency_mix", "hot_cloud_service", "dealer_hours"] {
        assert_eq!(validate(&shipped(name)).unwrap(), Vec::<String>::new(), "{name}");
        assert_eq!(cmd_validate(&shipped(name)), 0);
    }
}

#[test]
fn validate_reports_schema_problems() {
    let dir = tempfile::tempdir().unwrap();
    let text = scenario_json(1000.0, &[node("M1", Tier::Mno)], &[service("s")], &[("ghost", 1.0)]);
    let path = write_scenario(dir.path(), "ghost", &text);
    let problems = validate(&path).unwrap();
    assert_eq!(problems.len(), 1);
    assert!(problems[0].contains("ghost"));
}

#[test]
fn compare_rows_follow_policy_order() {
    let sc = load_scenario(&shipped("latency_mix")).unwrap();
    let reports = compare_reports(&sc, 5).unwrap();
    let names: Vec<_> = reports.iter().map(|r| r.policy.as_str()).collect();
    assert_eq!(names, ["sami", "cloud-only", "mno-only", "dealer-only"]);
    let sami = reports[0].run.tally.mean_latency_ms.unwrap();
    let cloud = reports[1].run.tally.mean_latency_ms.unwrap();
    assert!(sami <= cloud);
}

#[test]
fn compare_is_reproducible() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    assert_eq!(cmd_compare(&shipped("hot_cloud_service"), Some(21), a.path()), 0);
    assert_eq!(cmd_compare(&shipped("hot_cloud_service"), Some(21), b.path()), 0);
    let read = |d: &tempfile::TempDir| fs::read(d.path().join("compare.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
    // Header plus four policies of (3 services + run).
    assert_eq!(String::from_utf8(read(&a)).unwrap().lines().count(), 1 + 4 * 4);
}
