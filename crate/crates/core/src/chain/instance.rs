use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{BirthDeathChain, ChainError};

/// One arm: a birth-death chain and its per-state expected rewards.
#[derive(Debug, Clone, PartialEq)]
pub struct Arm {
    pub chain: BirthDeathChain,
    pub rewards: Vec<f64>,
}

impl Arm {
    pub fn new(chain: BirthDeathChain, rewards: Vec<f64>) -> Result<Self, ChainError> {
        if rewards.len() != chain.num_states() {
            return Err(ChainError::InvalidInstance(format!(
                "{} rewards for a {}-state chain",
                rewards.len(),
                chain.num_states()
            )));
        }
        if let Some(r) = rewards.iter().find(|r| !(0.0..=1.0).contains(*r)) {
            return Err(ChainError::InvalidInstance(format!(
                "reward {r} outside [0, 1]"
            )));
        }
        Ok(Arm { chain, rewards })
    }

    pub fn num_states(&self) -> usize {
        self.chain.num_states()
    }
}

/// N arms sharing a common state count, plus their initial states.
#[derive(Debug, Clone, PartialEq)]
pub struct RestlessInstance {
    arms: Vec<Arm>,
    initial_states: Vec<usize>,
}

impl RestlessInstance {
    pub fn new(arms: Vec<Arm>, initial_states: Vec<usize>) -> Result<Self, ChainError> {
        if arms.is_empty() {
            return Err(ChainError::InvalidInstance("no arms".into()));
        }
        let m = arms[0].num_states();
        if let Some(i) = arms.iter().position(|a| a.num_states() != m) {
            return Err(ChainError::InvalidInstance(format!(
                "arm {i} has {} states, expected {m}",
                arms[i].num_states()
            )));
        }
        if initial_states.len() != arms.len() {
            return Err(ChainError::InvalidInstance(format!(
                "{} initial states for {} arms",
                initial_states.len(),
                arms.len()
            )));
        }
        if let Some(s) = initial_states.iter().find(|&&s| s >= m) {
            return Err(ChainError::InvalidInstance(format!(
                "initial state {s} out of range for {m} states"
            )));
        }
        Ok(RestlessInstance {
            arms,
            initial_states,
        })
    }

    pub fn num_arms(&self) -> usize {
        self.arms.len()
    }

    pub fn num_states(&self) -> usize {
        self.arms[0].num_states()
    }

    pub fn arms(&self) -> &[Arm] {
        &self.arms
    }

    pub fn arm(&self, i: usize) -> &Arm {
        &self.arms[i]
    }

    pub fn initial_states(&self) -> &[usize] {
        &self.initial_states
    }

    /// Largest SLEM over the arms.
    pub fn lambda_max(&self) -> Result<f64, ChainError> {
        self.arms
            .iter()
            .try_fold(0.0_f64, |acc, a| Ok(acc.max(a.chain.slem()?)))
    }

    /// Same instance with one arm's rewards replaced.
    pub fn with_rewards(&self, arm: usize, rewards: Vec<f64>) -> Result<Self, ChainError> {
        let mut arms = self.arms.clone();
        arms[arm] = Arm::new(arms[arm].chain.clone(), rewards)?;
        Self::new(arms, self.initial_states.clone())
    }

    pub fn from_toml_str(text: &str) -> Result<Self, ChainError> {
        let file: InstanceFile =
            toml::from_str(text).map_err(|e| ChainError::Parse(e.to_string()))?;
        file.try_into()
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(&InstanceFile::from(self)).expect("instance file serializes")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ChainError> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| ChainError::Parse(format!("{}: {e}", path.as_ref().display())))?;
        Self::from_toml_str(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> std::io::Result<()> {
        std::fs::write(path, self.to_toml_string())
    }
}

/// On-disk instance definition (TOML).
///
/// ```toml
/// num_states = 2
/// initial_states = [1, 1]
///
/// [[arms]]
/// up = [0.3]        # P(k, k+1)
/// down = [0.2]      # P(k+1, k)
/// rewards = [1.0, 0.0]
/// ```
///
/// State indices are 0-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub num_states: usize,
    pub initial_states: Vec<usize>,
    pub arms: Vec<ArmFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmFile {
    pub up: Vec<f64>,
    pub down: Vec<f64>,
    pub rewards: Vec<f64>,
}

impl TryFrom<InstanceFile> for RestlessInstance {
    type Error = ChainError;
    fn try_from(file: InstanceFile) -> Result<Self, ChainError> {
        if file.num_states == 0 {
            return Err(ChainError::Empty);
        }
        let arms = file
            .arms
            .into_iter()
            .enumerate()
            .map(|(i, a)| {
                if a.up.len() + 1 != file.num_states || a.down.len() + 1 != file.num_states {
                    return Err(ChainError::InvalidInstance(format!(
                        "arm {i}: up/down must have num_states - 1 = {} entries",
                        file.num_states - 1
                    )));
                }
                Arm::new(BirthDeathChain::new(a.up, a.down)?, a.rewards)
            })
            .collect::<Result<Vec<_>, _>>()?;
        RestlessInstance::new(arms, file.initial_states)
    }
}

impl From<&RestlessInstance> for InstanceFile {
    fn from(inst: &RestlessInstance) -> Self {
        InstanceFile {
            num_states: inst.num_states(),
            initial_states: inst.initial_states.clone(),
            arms: inst
                .arms
                .iter()
                .map(|a| ArmFile {
                    up: a.chain.up().to_vec(),
                    down: a.chain.down().to_vec(),
                    rewards: a.rewards.clone(),
                })
                .collect(),
        }
    }
}

/// Outcome of checking one assumption on one arm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum AssumptionCheck {
    Pass,
    /// First violating entry: the pair of states involved and the value.
    Fail {
        from: usize,
        to: usize,
        value: f64,
    },
}

impl AssumptionCheck {
    pub fn passed(&self) -> bool {
        matches!(self, AssumptionCheck::Pass)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmReport {
    /// Rewards nonincreasing in the state index.
    pub monotone_rewards: AssumptionCheck,
    /// Tridiagonal transitions.
    pub birth_death: AssumptionCheck,
    /// `P(k, k+1) + P(k+1, k) <= 1`.
    pub positive_correlation: AssumptionCheck,
    /// Every existing neighbor (and stay) probability is at least `c1`.
    pub min_neighbor_prob: AssumptionCheck,
}

impl ArmReport {
    pub fn passed(&self) -> bool {
        self.checks().iter().all(|c| c.passed())
    }

    pub fn checks(&self) -> [&AssumptionCheck; 4] {
        [
            &self.monotone_rewards,
            &self.birth_death,
            &self.positive_correlation,
            &self.min_neighbor_prob,
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub c1: f64,
    pub arms: Vec<ArmReport>,
    pub note: String,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.arms.iter().all(ArmReport::passed)
    }
}

/// Checks the four structural assumptions on every arm. Violations are
/// reported, never raised.
pub fn validate_assumptions(instance: &RestlessInstance, c1: f64) -> ValidationReport {
    let arms = instance
        .arms()
        .iter()
        .map(|arm| validate_arm(arm, c1))
        .collect();
    ValidationReport {
        c1,
        arms,
        note: "minimum-probability check covers P(k,k) and the existing neighbors only; \
               boundary states have a single neighbor"
            .into(),
    }
}

fn validate_arm(arm: &Arm, c1: f64) -> ArmReport {
    let m = arm.num_states();
    let chain = &arm.chain;

    let monotone_rewards = (0..m.saturating_sub(1))
        .find(|&k| arm.rewards[k] < arm.rewards[k + 1])
        .map_or(AssumptionCheck::Pass, |k| AssumptionCheck::Fail {
            from: k,
            to: k + 1,
            value: arm.rewards[k + 1] - arm.rewards[k],
        });

    // The representation cannot hold entries with |j - k| > 1.
    let birth_death = AssumptionCheck::Pass;

    let positive_correlation = (0..m.saturating_sub(1))
        .map(|k| (k, chain.up()[k] + chain.down()[k]))
        .find(|&(_, s)| s > 1.0 + super::PROB_TOLERANCE)
        .map_or(AssumptionCheck::Pass, |(k, s)| AssumptionCheck::Fail {
            from: k,
            to: k + 1,
            value: s,
        });

    let mut min_neighbor_prob = AssumptionCheck::Pass;
    'rows: for j in 0..m {
        for k in j.saturating_sub(1)..(j + 2).min(m) {
            let p = chain.prob(j, k);
            if p < c1 {
                min_neighbor_prob = AssumptionCheck::Fail {
                    from: j,
                    to: k,
                    value: p,
                };
                break 'rows;
            }
        }
    }

    ArmReport {
        monotone_rewards,
        birth_death,
        positive_correlation,
        min_neighbor_prob,
    }
}

/// Smallest stationary probability over all arms and states.
pub fn d_min(instance: &RestlessInstance) -> Result<f64, ChainError> {
    instance.arms().iter().try_fold(f64::INFINITY, |acc, arm| {
        let d = arm.chain.stationary_distribution()?;
        Ok(d.iter().copied().fold(acc, f64::min))
    })
}
