use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use restless_ucb::policies::TransitionEvidence;
use restless_ucb::OracleKind;

use crate::BenchError;

/// Grid of the nine-point Thompson prior, per coordinate.
pub const TS9_GRID: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];
/// Grid of the four-point Thompson prior, per coordinate.
pub const TS4_GRID: [f64; 4] = [0.2, 0.4, 0.6, 0.8];

/// Which online policy to run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum PolicySpec {
    RestlessUcb,
    /// Thompson sampling over the 9x9 two-state grid.
    Ts9,
    /// Thompson sampling over the 4x4 two-state grid.
    Ts4,
    /// Thompson sampling over `ts_grid` from the config.
    TsCustom,
    /// Always pull one arm (0-based).
    Fixed(usize),
    /// Exact solution of the true instance.
    Oracle,
    /// Greedy on the true instance.
    Myopic,
}

impl fmt::Display for PolicySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolicySpec::RestlessUcb => f.write_str("restless-ucb"),
            PolicySpec::Ts9 => f.write_str("ts-9"),
            PolicySpec::Ts4 => f.write_str("ts-4"),
            PolicySpec::TsCustom => f.write_str("ts"),
            PolicySpec::Fixed(i) => write!(f, "fixed-{i}"),
            PolicySpec::Oracle => f.write_str("oracle"),
            PolicySpec::Myopic => f.write_str("myopic"),
        }
    }
}

impl FromStr for PolicySpec {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, BenchError> {
        Ok(match s {
            "restless-ucb" => PolicySpec::RestlessUcb,
            "ts-9" => PolicySpec::Ts9,
            "ts-4" => PolicySpec::Ts4,
            "ts" => PolicySpec::TsCustom,
            "oracle" => PolicySpec::Oracle,
            "myopic" => PolicySpec::Myopic,
            _ => match s.strip_prefix("fixed-").map(str::parse) {
                Some(Ok(i)) => PolicySpec::Fixed(i),
                _ => return Err(BenchError::UnknownPolicy(s.to_string())),
            },
        })
    }
}

impl TryFrom<String> for PolicySpec {
    type Error = BenchError;
    fn try_from(s: String) -> Result<Self, BenchError> {
        s.parse()
    }
}

impl From<PolicySpec> for String {
    fn from(p: PolicySpec) -> String {
        p.to_string()
    }
}

pub fn parse_oracle(s: &str) -> Result<OracleKind, BenchError> {
    match s {
        "exact" => Ok(OracleKind::Exact),
        "myopic" => Ok(OracleKind::Myopic),
        _ => Err(BenchError::UnknownOracle(s.to_string())),
    }
}

/// One experiment: a policy on an instance, replicated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Builtin name or path to an instance file.
    pub instance: String,
    pub policy: PolicySpec,
    pub horizon: u64,
    pub reps: u64,
    pub seed: u64,
    pub oracle: OracleKind,
    pub tau_max: Option<usize>,
    pub out: Option<PathBuf>,
    /// `m(T) = ceil(T^m_exponent)`.
    pub m_exponent: f64,
    /// Fixed `m`, overriding `m_exponent`.
    pub m_fixed: Option<u64>,
    pub ts_grid: Vec<f64>,
    /// Estimate rewards in Thompson sampling instead of plugging in the truth.
    pub ts_estimate_rewards: bool,
    pub ts_first_episode: u64,
    pub ts_evidence: TransitionEvidence,
    pub checkpoints_per_decade: u32,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            instance: "paper-1".into(),
            policy: PolicySpec::RestlessUcb,
            horizon: 100_000,
            reps: 10,
            seed: 0,
            oracle: OracleKind::Exact,
            tau_max: None,
            out: None,
            m_exponent: 2.0 / 3.0,
            m_fixed: None,
            ts_grid: TS9_GRID.to_vec(),
            ts_estimate_rewards: false,
            ts_first_episode: 100,
            ts_evidence: TransitionEvidence::AllReturns,
            checkpoints_per_decade: 20,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, BenchError> {
        toml::from_str(text).map_err(|e| BenchError::Config(e.to_string()))
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self, BenchError> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        if self.horizon < 1 {
            return Err(BenchError::Config("horizon must be at least 1".into()));
        }
        if self.reps < 1 {
            return Err(BenchError::Config("reps must be at least 1".into()));
        }
        if self.checkpoints_per_decade < 1 {
            return Err(BenchError::Config(
                "checkpoints_per_decade must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn policy_names_round_trip() {
        for p in [
            PolicySpec::RestlessUcb,
            PolicySpec::Ts9,
            PolicySpec::Ts4,
            PolicySpec::TsCustom,
            PolicySpec::Fixed(3),
            PolicySpec::Oracle,
            PolicySpec::Myopic,
        ] {
            assert_eq!(p.to_string().parse::<PolicySpec>().unwrap(), p);
        }
        assert!("fixed-x".parse::<PolicySpec>().is_err());
        assert!("ucrl".parse::<PolicySpec>().is_err());
    }

    #[test]
    fn config_toml_round_trip() {
        let cfg = ExperimentConfig {
            policy: PolicySpec::Ts4,
            tau_max: Some(32),
            out: Some("runs/a".into()),
            ..Default::default()
        };
        let text = cfg.to_toml_string();
        assert_eq!(ExperimentConfig::from_toml_str(&text).unwrap(), cfg);
        let partial =
            ExperimentConfig::from_toml_str("policy = \"fixed-1\"\nhorizon = 50").unwrap();
        assert_eq!(partial.policy, PolicySpec::Fixed(1));
        assert_eq!(partial.reps, 10);
        assert!(ExperimentConfig::from_toml_str("horizn = 5").is_err());
    }
}
