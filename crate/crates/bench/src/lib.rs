//! Experiment harness for `restless-ucb`: builtin instances, replicated
//! regret experiments with CSV output, a timing benchmark, and a property
//! verification suite with a JSON report.

pub mod config;
pub mod experiment;
pub mod instances;
pub mod timing;
pub mod verify;

pub use config::{ExperimentConfig, PolicySpec};
pub use experiment::{run_experiment, ExperimentResult, MuStar};
pub use instances::{builtin_instance, resolve_instance, timing_instance};
pub use timing::{timing_benchmark, TimingRow};
pub use verify::{verify_lemmas, CheckResult, CheckStatus, VerificationReport, VerifyConfig};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("unknown instance `{0}` (builtin: paper-1, paper-2, or a file path)")]
    UnknownInstance(String),
    #[error("unknown policy `{0}`")]
    UnknownPolicy(String),
    #[error("unknown oracle `{0}` (exact or myopic)")]
    UnknownOracle(String),
    #[error("invalid config: {0}")]
    Config(String),
    #[error("replication {rep} failed: {source}")]
    Replication {
        rep: u64,
        #[source]
        source: restless_ucb::PolicyError,
    },
    #[error(transparent)]
    Chain(#[from] restless_ucb::ChainError),
    #[error(transparent)]
    Mdp(#[from] restless_ucb::MdpError),
    #[error(transparent)]
    Coupling(#[from] restless_ucb::CouplingError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Decimal rendering with ten significant digits.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x.is_finite() {
            "0".into()
        } else {
            x.to_string()
        };
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (9 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}
