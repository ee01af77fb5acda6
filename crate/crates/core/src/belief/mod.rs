//! The offline problem as a belief-state MDP.
//!
//! With known parameters, the player's sufficient statistic is, for each
//! arm, the last observed state `s` and the number of steps `tau >= 1`
//! since that observation. Pulling arm `a` reveals a state `k` drawn from
//! `e_s · P_a^tau`; afterwards arm `a` is at `(k, 1)` and every other arm's
//! `tau` grows by one. Each belief therefore has at most `M` successors per
//! action.
//!
//! `tau` is unbounded in the exact model. Here it saturates at `tau_max`,
//! past which the chain has mixed and beliefs are indistinguishable for
//! practical purposes ([`default_tau_max`]).

mod gain;
mod mdp;
mod myopic;
mod rvi;
mod table;

pub use gain::{policy_gain, GainEstimate};
pub use mdp::{build_truncated_mdp, MdpConfig, TruncatedBeliefMdp, DEFAULT_STATE_BUDGET};
pub use myopic::{MyopicOracle, MyopicPolicy};
pub use rvi::{relative_value_iteration, relative_value_iteration_traced, RviConfig};
pub use table::{PolicyTable, TablePolicy, POLICY_TABLE_VERSION};

use std::fmt;

use thiserror::Error;

use crate::chain::{ChainError, PowerCache, RestlessInstance, DEFAULT_POWER_CAP};
use crate::env::{Action, Observation};

#[derive(Debug, Error)]
pub enum MdpError {
    #[error("belief-state budget of {budget} exceeded after enumerating {reached} states")]
    StateBudgetExceeded { reached: usize, budget: usize },
    #[error(
        "relative value iteration did not converge in {iterations} iterations (span {span:e})"
    )]
    NonConvergence { iterations: usize, span: f64 },
    #[error("tau_max must be at least 2, got {0}")]
    TauMax(usize),
    #[error("epsilon must be positive, got {0}")]
    Epsilon(f64),
    #[error("policy table: {0}")]
    Format(String),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Per-arm component of a belief: last observed state and steps since.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArmBelief {
    pub state: usize,
    pub tau: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BeliefState(Vec<ArmBelief>);

impl BeliefState {
    pub fn new(arms: Vec<ArmBelief>) -> Self {
        debug_assert!(arms.iter().all(|a| a.tau >= 1));
        BeliefState(arms)
    }

    /// Every arm at its initial state with `tau = 1`.
    pub fn initial(instance: &RestlessInstance) -> Self {
        BeliefState(
            instance
                .initial_states()
                .iter()
                .map(|&state| ArmBelief { state, tau: 1 })
                .collect(),
        )
    }

    pub fn arms(&self) -> &[ArmBelief] {
        &self.0
    }

    pub fn arm(&self, i: usize) -> ArmBelief {
        self.0[i]
    }

    /// Belief after pulling `arm` and seeing `observed`.
    pub fn successor(&self, arm: usize, observed: usize, tau_max: usize) -> BeliefState {
        BeliefState(
            self.0
                .iter()
                .enumerate()
                .map(|(i, b)| {
                    if i == arm {
                        ArmBelief {
                            state: observed,
                            tau: 1,
                        }
                    } else {
                        ArmBelief {
                            state: b.state,
                            tau: (b.tau + 1).min(tau_max),
                        }
                    }
                })
                .collect(),
        )
    }

    pub(crate) fn parse(key: &str) -> Option<BeliefState> {
        key.split(',')
            .map(|pair| {
                let (s, t) = pair.split_once(':')?;
                Some(ArmBelief {
                    state: s.parse().ok()?,
                    tau: t.parse().ok()?,
                })
            })
            .collect::<Option<Vec<_>>>()
            .map(BeliefState)
    }
}

/// `state:tau` pairs joined by commas, e.g. `0:1,1:5`.
impl fmt::Display for BeliefState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, b) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}:{}", b.state, b.tau)?;
        }
        Ok(())
    }
}

/// Smallest `tau` with `lambda^tau <= 1e-6`, clamped to `[16, 512]`.
pub fn default_tau_max(lambda_max: f64) -> usize {
    const LO: usize = 16;
    const HI: usize = 512;
    if lambda_max.is_nan() || lambda_max <= 0.0 {
        return LO;
    }
    if lambda_max >= 1.0 {
        return HI;
    }
    let tau = (1e-6_f64.ln() / lambda_max.ln()).ceil();
    (tau as usize).clamp(LO, HI)
}

/// Everything needed to turn an instance into a solved [`PolicyTable`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveSettings {
    /// `None` picks [`default_tau_max`] from the instance's largest SLEM.
    pub tau_max: Option<usize>,
    pub state_budget: usize,
    pub rvi: RviConfig,
}

impl Default for SolveSettings {
    fn default() -> Self {
        SolveSettings {
            tau_max: None,
            state_budget: DEFAULT_STATE_BUDGET,
            rvi: RviConfig::default(),
        }
    }
}

impl SolveSettings {
    pub fn tau_max_for(&self, instance: &RestlessInstance) -> usize {
        self.tau_max
            .unwrap_or_else(|| default_tau_max(instance.lambda_max().unwrap_or(1.0)))
    }

    /// Truncated belief MDP + relative value iteration.
    pub fn solve(&self, instance: &RestlessInstance) -> Result<PolicyTable, MdpError> {
        let config = MdpConfig {
            tau_max: self.tau_max_for(instance),
            state_budget: self.state_budget,
        };
        let mdp = build_truncated_mdp(instance, &config)?;
        relative_value_iteration(&mdp, &self.rvi)
    }
}

/// Belief dynamics of a known instance, with cached matrix powers.
#[derive(Debug, Clone)]
pub struct BeliefModel {
    rewards: Vec<Vec<f64>>,
    powers: Vec<PowerCache>,
    tau_max: usize,
}

impl BeliefModel {
    pub fn new(instance: &RestlessInstance, tau_max: usize) -> Self {
        BeliefModel {
            rewards: instance.arms().iter().map(|a| a.rewards.clone()).collect(),
            powers: instance
                .arms()
                .iter()
                .map(|a| PowerCache::with_cap(a.chain.clone(), tau_max.max(DEFAULT_POWER_CAP)))
                .collect(),
            tau_max,
        }
    }

    pub fn tau_max(&self) -> usize {
        self.tau_max
    }

    pub fn num_arms(&self) -> usize {
        self.rewards.len()
    }

    pub fn rewards(&self, arm: usize) -> &[f64] {
        &self.rewards[arm]
    }

    /// Distribution of the state seen when pulling `arm` at `z`.
    pub fn observation_distribution(&mut self, z: &BeliefState, arm: usize) -> &[f64] {
        let b = z.arm(arm);
        self.powers[arm].row(b.state, b.tau)
    }

    /// `(e_s P^tau) · r` for the pulled arm.
    pub fn expected_reward(&mut self, z: &BeliefState, arm: usize) -> f64 {
        let b = z.arm(arm);
        self.powers[arm].expectation(b.state, b.tau, &self.rewards[arm])
    }

    /// Successor beliefs with positive probability, in increasing order of
    /// the observed state.
    pub fn belief_transition(&mut self, z: &BeliefState, arm: usize) -> Vec<(f64, BeliefState)> {
        let tau_max = self.tau_max;
        self.observation_distribution(z, arm)
            .to_vec()
            .into_iter()
            .enumerate()
            .filter(|(_, p)| *p > 0.0)
            .map(|(k, p)| (p, z.successor(arm, k, tau_max)))
            .collect()
    }
}

/// Online belief bookkeeping from actual observations.
///
/// Elapsed steps are tracked exactly: an arm that has not been observed yet
/// starts at its initial state with `tau = 0` (its state is known right
/// now). [`BeliefTracker::belief`] maps this onto the MDP convention
/// (`tau >= 1`, saturated at `tau_max`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BeliefTracker {
    states: Vec<usize>,
    taus: Vec<u64>,
}

impl BeliefTracker {
    pub fn new(initial_states: &[usize]) -> Self {
        BeliefTracker {
            states: initial_states.to_vec(),
            taus: vec![0; initial_states.len()],
        }
    }

    pub fn observe(&mut self, obs: &Observation) {
        self.taus.iter_mut().for_each(|t| *t += 1);
        if let (Action::Pull(i), Some(s)) = (obs.action, obs.observed_state) {
            self.states[i] = s;
            self.taus[i] = 1;
        }
    }

    /// Records that `arm` was pulled and `state` seen.
    pub fn record(&mut self, arm: usize, state: usize) {
        self.taus.iter_mut().for_each(|t| *t += 1);
        self.states[arm] = state;
        self.taus[arm] = 1;
    }

    pub(crate) fn set_elapsed(&mut self, taus: Vec<u64>) {
        assert_eq!(taus.len(), self.taus.len());
        self.taus = taus;
    }

    pub fn last_state(&self, arm: usize) -> usize {
        self.states[arm]
    }

    /// Exact steps since the last observation of `arm`.
    pub fn elapsed(&self, arm: usize) -> u64 {
        self.taus[arm]
    }

    pub fn belief(&self, tau_max: usize) -> BeliefState {
        BeliefState(
            self.states
                .iter()
                .zip(&self.taus)
                .map(|(&state, &tau)| ArmBelief {
                    state,
                    tau: (tau.max(1) as usize).min(tau_max),
                })
                .collect(),
        )
    }
}
