//! Shared inputs for the benchmarks in `benches/`.

use std::path::PathBuf;

use nobelnet::io::{ingest, Ingested};
use nobelnet::RunConfig;

pub fn fixture_config() -> RunConfig {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/fixture/run.toml");
    RunConfig::load(&path).expect("fixture config loads")
}

pub fn fixture() -> (RunConfig, Ingested) {
    let cfg = fixture_config();
    let data = ingest(&cfg).expect("fixture ingests");
    (cfg, data)
}
