//! Golden `compare.csv` files for the shipped scenarios. Set
//! `UPDATE_GOLDEN=1` to rewrite them after an intended behaviour change.

mod common;

use std::path::PathBuf;

use common::shipped;

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(format!("tests/golden/{name}.compare.csv"))
}

#[test]
fn compare_output_matches_golden_files() {
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    for name in ["latency_mix", "hot_cloud_service", "dealer_hours"] {
        let dir = tempfile::tempdir().unwrap();
        let written = sami_cli::compare(&shipped(name), None, dir.path()).unwrap();
        let got = std::fs::read_to_string(written).unwrap();
        if update {
            std::fs::write(golden(name), &got).unwrap();
            continue;
        }
        let want = std::fs::read_to_string(golden(name)).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(got == want, "{name}: compare.csv differs from its golden file");
    }
}
