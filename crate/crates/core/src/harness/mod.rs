//! Simulation harness: BSC key pairs, QBER sweeps, metrics and CSV.

mod config;
mod keys;
mod metrics;
mod sweep;

use std::path::PathBuf;

use thiserror::Error;

pub use config::{default_qbers, Mode, SweepConfig};
pub use keys::{generate_key_pair, KeyPair};
pub use metrics::{
    format_sig, read_metrics, round_sig, write_metrics, write_metrics_file, MetricsRow, CSV_HEADER,
};
pub use sweep::{
    build_jobs, execute, frame_seed, load_code, resolve_codes, rows, run_point, run_sweep,
    run_sweep_with, CodeSet, PointResult,
};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error(transparent)]
    Fixture(#[from] crate::code::fixtures::FixtureError),
    #[error(transparent)]
    Protocol(#[from] crate::protocol::ProtocolError),
    #[error(transparent)]
    Quant(#[from] crate::quant::QuantError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Pool(#[from] rayon::ThreadPoolBuildError),
}
