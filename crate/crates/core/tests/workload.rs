mod common;

use common::{node, scenario, scenario_json, service, shipped};
use sami_core::workload::{generate_workload, load_scenario, Scenario, ScenarioError};
use sami_core::Tier;

#[test]
fn poisson_counts_concentrate() {
    let rate = 5.0;
    let horizon_ms = 200_000.0;
    let sc = scenario(horizon_ms, &[node("M1", Tier::Mno)], &[service("s")], &[("s", rate)]);
    let expected = rate * horizon_ms / 1000.0;
    let mut total = 0.0;
    for seed in 0..100u64 {
        let n = generate_workload(&sc, seed).len() as f64;
        assert!((n - expected).abs() <= 4.0 * expected.sqrt(), "seed {seed}: {n} vs {expected}");
        total += n;
    }
    // The mean over 100 seeds sits within 4 standard errors.
    assert!((total / 100.0 - expected).abs() <= 4.0 * (expected / 100.0).sqrt());
}

#[test]
fn per_stream_times_strictly_increase() {
    let sc = load_scenario(&shipped("latency_mix")).unwrap();
    let arrivals = generate_workload(&sc, 99);
    let mut last = std::collections::BTreeMap::new();
    for a in &arrivals {
        if let Some(prev) = last.insert(a.stream, a.t_ms) {
            assert!(a.t_ms > prev);
        }
        assert!(a.t_ms < sc.horizon_ms);
    }
}

#[test]
fn shipped_scenarios_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(shipped("tags").with_extension("txt"), dir.path().join("tags.txt")).unwrap();
    for name in ["latency_mix", "hot_cloud_service", "dealer_hours"] {
        let original = load_scenario(&shipped(name)).unwrap();
        let copy = dir.path().join(format!("{name}.json"));
        original.to_file(&copy).unwrap();
        let again = load_scenario(&copy).unwrap();
        assert_eq!(original, again, "{name}");
        assert!(again.vocabulary.is_some());
    }
}

#[test]
fn validation_errors() {
    let base = scenario_json(1000.0, &[node("M1", Tier::Mno)], &[service("s")], &[("s", 1.0)]);
    let negative = base.replace("\"s\":1.0", "\"s\":-1.0");
    assert_ne!(negative, base);
    let err = Scenario::from_json(&negative, None).unwrap_err();
    assert_eq!(err.field_errors()[0].path, "consumers[0].rates.s");

    let unknown = base.replacen("{", "{\"surprise\":true,", 1);
    let err = Scenario::from_json(&unknown, None).unwrap_err();
    assert!(err.to_string().contains("surprise"));

    let missing_vocab = base.replacen("{", "{\"tag_vocabulary\":\"nope.txt\",", 1);
    let err = Scenario::from_json(&missing_vocab, None).unwrap_err();
    assert_eq!(err.field_errors()[0].path, "tag_vocabulary");

    assert!(matches!(
        load_scenario(std::path::Path::new("/definitely/missing.json")),
        Err(ScenarioError::Io { .. })
    ));
}

#[test]
fn dealer_without_hours_is_rejected() {
    let mut d = node("D1", Tier::Dealer);
    d.open_hours = None;
    let text = scenario_json(1000.0, &[d], &[service("s")], &[("s", 1.0)]);
    let err = Scenario::from_json(&text, None).unwrap_err();
    assert_eq!(err.field_errors()[0].path, "nodes[0].open_hours");
}
