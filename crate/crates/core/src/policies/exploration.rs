use crate::chain::BirthDeathChain;
use crate::env::{Action, Observation};
use crate::policy::PolicyError;

/// Counts gathered while pulling one arm on consecutive steps.
///
/// A visit to state `j` is *completed* when the next step pulls the same
/// arm again, revealing the transition out of `j`. Only completed visits
/// enter the transition estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalStats {
    num_states: usize,
    // [arm][from][to - from + 1] for to in {from-1, from, from+1}
    transitions: Vec<Vec<[u64; 3]>>,
    reward_sum: Vec<Vec<f64>>,
    reward_count: Vec<Vec<u64>>,
}

impl EmpiricalStats {
    pub fn new(num_arms: usize, num_states: usize) -> Self {
        EmpiricalStats {
            num_states,
            transitions: vec![vec![[0; 3]; num_states]; num_arms],
            reward_sum: vec![vec![0.0; num_states]; num_arms],
            reward_count: vec![vec![0; num_states]; num_arms],
        }
    }

    pub fn num_arms(&self) -> usize {
        self.transitions.len()
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn record_reward(&mut self, arm: usize, state: usize, reward: f64) {
        self.reward_sum[arm][state] += reward;
        self.reward_count[arm][state] += 1;
    }

    /// Records a one-step transition of `arm`. Panics unless `|from - to| <= 1`.
    pub fn record_transition(&mut self, arm: usize, from: usize, to: usize) {
        let slot = to + 1 - from;
        assert!(slot < 3, "birth-death transition {from} -> {to}");
        self.transitions[arm][from][slot] += 1;
    }

    pub fn completed_visits(&self, arm: usize, state: usize) -> u64 {
        self.transitions[arm][state].iter().sum()
    }

    pub fn transition_count(&self, arm: usize, from: usize, to: usize) -> u64 {
        if to + 1 < from || to > from + 1 {
            return 0;
        }
        self.transitions[arm][from][to + 1 - from]
    }

    pub fn reward_count(&self, arm: usize, state: usize) -> u64 {
        self.reward_count[arm][state]
    }

    pub fn reward_sum(&self, arm: usize, state: usize) -> f64 {
        self.reward_sum[arm][state]
    }
}

/// Empirical transition chains and reward means.
///
/// `P̂(j, k)` is the transition count divided by the completed visits to
/// `j`; `r̂(i, k)` is the reward sum divided by the reward count.
pub fn empirical_estimates(
    stats: &EmpiricalStats,
) -> Result<(Vec<BirthDeathChain>, Vec<Vec<f64>>), PolicyError> {
    let m = stats.num_states();
    let mut chains = Vec::with_capacity(stats.num_arms());
    let mut rewards = Vec::with_capacity(stats.num_arms());
    for arm in 0..stats.num_arms() {
        for state in 0..m {
            if stats.completed_visits(arm, state) == 0 || stats.reward_count(arm, state) == 0 {
                return Err(PolicyError::InsufficientData { arm, state });
            }
        }
        let ratio = |from: usize, to: usize| {
            stats.transition_count(arm, from, to) as f64 / stats.completed_visits(arm, from) as f64
        };
        let up = (0..m - 1).map(|k| ratio(k, k + 1)).collect();
        let down = (0..m - 1).map(|k| ratio(k + 1, k)).collect();
        chains.push(BirthDeathChain::new(up, down)?);
        rewards.push(
            (0..m)
                .map(|k| stats.reward_sum(arm, k) / stats.reward_count(arm, k) as f64)
                .collect(),
        );
    }
    Ok((chains, rewards))
}

/// Round-robin exploration: pull arm 0 until each of its states has
/// `m_target` completed visits, then arm 1, and so on.
#[derive(Debug, Clone)]
pub struct ExplorationSchedule {
    m_target: u64,
    current: usize,
    pending: Option<usize>,
    stats: EmpiricalStats,
    steps: u64,
}

/// Where the schedule stands after an observation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseStatus {
    Exploring { arm: usize },
    Finished { steps: u64 },
}

impl ExplorationSchedule {
    pub fn new(num_arms: usize, num_states: usize, m_target: u64) -> Self {
        assert!(m_target >= 1, "m_target must be positive");
        ExplorationSchedule {
            m_target,
            current: 0,
            pending: None,
            stats: EmpiricalStats::new(num_arms, num_states),
            steps: 0,
        }
    }

    pub fn m_target(&self) -> u64 {
        self.m_target
    }

    pub fn stats(&self) -> &EmpiricalStats {
        &self.stats
    }

    pub fn status(&self) -> PhaseStatus {
        if self.current >= self.stats.num_arms() {
            PhaseStatus::Finished { steps: self.steps }
        } else {
            PhaseStatus::Exploring { arm: self.current }
        }
    }

    pub fn is_finished(&self) -> bool {
        matches!(self.status(), PhaseStatus::Finished { .. })
    }

    /// Arm to pull next, `None` once the phase is over.
    pub fn next_action(&self) -> Option<Action> {
        match self.status() {
            PhaseStatus::Exploring { arm } => Some(Action::Pull(arm)),
            PhaseStatus::Finished { .. } => None,
        }
    }

    /// Feeds the outcome of the step that followed [`Self::next_action`].
    pub fn record(&mut self, obs: &Observation) -> PhaseStatus {
        if self.is_finished() {
            return self.status();
        }
        self.steps += 1;
        let arm = self.current;
        match (obs.action, obs.observed_state) {
            (Action::Pull(i), Some(state)) if i == arm => {
                self.stats.record_reward(arm, state, obs.reward);
                if self.stats.num_states() == 1 {
                    // The only transition is certain; the visit completes now.
                    self.stats.record_transition(arm, 0, 0);
                } else {
                    if let Some(prev) = self.pending {
                        self.stats.record_transition(arm, prev, state);
                    }
                    self.pending = Some(state);
                }
            }
            // Anything else breaks the run of consecutive pulls.
            _ => self.pending = None,
        }
        let m = self.stats.num_states();
        if (0..m).all(|k| self.stats.completed_visits(arm, k) >= self.m_target) {
            self.current += 1;
            self.pending = None;
        }
        self.status()
    }
}
