use std::collections::{HashMap, VecDeque};

use super::{BeliefModel, BeliefState, MdpError};
use crate::chain::RestlessInstance;

pub const DEFAULT_STATE_BUDGET: usize = 5_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MdpConfig {
    pub tau_max: usize,
    pub state_budget: usize,
}

impl MdpConfig {
    pub fn new(tau_max: usize) -> Self {
        MdpConfig {
            tau_max,
            state_budget: DEFAULT_STATE_BUDGET,
        }
    }
}

/// Reachable beliefs of an instance with saturated `tau`, closed under all
/// actions. Actions are the real arms `0..N` (the idle arm is dominated
/// offline and left out). State 0 is the initial belief.
#[derive(Debug, Clone)]
pub struct TruncatedBeliefMdp {
    num_arms: usize,
    tau_max: usize,
    states: Vec<BeliefState>,
    index: HashMap<BeliefState, usize>,
    rewards: Vec<f64>,
    offsets: Vec<usize>,
    successors: Vec<(usize, f64)>,
}

impl TruncatedBeliefMdp {
    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_arms(&self) -> usize {
        self.num_arms
    }

    pub fn tau_max(&self) -> usize {
        self.tau_max
    }

    pub fn states(&self) -> &[BeliefState] {
        &self.states
    }

    pub fn index_of(&self, z: &BeliefState) -> Option<usize> {
        self.index.get(z).copied()
    }

    pub fn reward(&self, state: usize, arm: usize) -> f64 {
        self.rewards[state * self.num_arms + arm]
    }

    /// `(successor index, probability)` pairs.
    pub fn transitions(&self, state: usize, arm: usize) -> &[(usize, f64)] {
        let slot = state * self.num_arms + arm;
        &self.successors[self.offsets[slot]..self.offsets[slot + 1]]
    }

    pub(crate) fn index_map(&self) -> &HashMap<BeliefState, usize> {
        &self.index
    }
}

/// Breadth-first enumeration from the initial belief.
pub fn build_truncated_mdp(
    instance: &RestlessInstance,
    config: &MdpConfig,
) -> Result<TruncatedBeliefMdp, MdpError> {
    if config.tau_max < 2 {
        return Err(MdpError::TauMax(config.tau_max));
    }
    let n = instance.num_arms();
    let mut model = BeliefModel::new(instance, config.tau_max);
    let start = BeliefState::initial(instance);

    let mut states = vec![start.clone()];
    let mut index = HashMap::from([(start, 0usize)]);
    let mut queue = VecDeque::from([0usize]);
    let mut rewards = Vec::new();
    let mut offsets = vec![0];
    let mut successors = Vec::new();

    // BFS order equals index order, so rows are appended in index order.
    while let Some(id) = queue.pop_front() {
        let z = states[id].clone();
        for arm in 0..n {
            rewards.push(model.expected_reward(&z, arm));
            for (p, next) in model.belief_transition(&z, arm) {
                let next_id = match index.get(&next) {
                    Some(&j) => j,
                    None => {
                        let j = states.len();
                        if j >= config.state_budget {
                            return Err(MdpError::StateBudgetExceeded {
                                reached: j,
                                budget: config.state_budget,
                            });
                        }
                        index.insert(next.clone(), j);
                        states.push(next);
                        queue.push_back(j);
                        j
                    }
                };
                successors.push((next_id, p));
            }
            offsets.push(successors.len());
        }
    }

    Ok(TruncatedBeliefMdp {
        num_arms: n,
        tau_max: config.tau_max,
        states,
        index,
        rewards,
        offsets,
        successors,
    })
}

#[cfg(test)]
mod tests {
    use super::super::tests::instance_one;
    use super::super::ArmBelief;
    use super::*;
    use crate::chain::{Arm, BirthDeathChain};

    #[test]
    fn instance_one_is_closed_and_sparse() {
        let inst = instance_one();
        let mdp = build_truncated_mdp(&inst, &MdpConfig::new(30)).unwrap();
        assert!(mdp.num_states() <= 2 * 2 * (2 * 30));
        for s in 0..mdp.num_states() {
            for a in 0..2 {
                let tr = mdp.transitions(s, a);
                assert!(tr.len() <= inst.num_states());
                let total: f64 = tr.iter().map(|(_, p)| p).sum();
                assert!((total - 1.0).abs() < 1e-10);
                assert!(tr.iter().all(|&(j, _)| j < mdp.num_states()));
            }
        }
    }

    #[test]
    fn single_arm_has_two_beliefs() {
        let inst = RestlessInstance::new(
            vec![Arm::new(
                BirthDeathChain::two_state(0.7, 0.8).unwrap(),
                vec![1.0, 0.0],
            )
            .unwrap()],
            vec![0],
        )
        .unwrap();
        for tau_max in [2, 7, 40] {
            let mdp = build_truncated_mdp(&inst, &MdpConfig::new(tau_max)).unwrap();
            let mut got: Vec<_> = mdp.states().iter().map(|z| z.arm(0)).collect();
            got.sort();
            assert_eq!(
                got,
                vec![
                    ArmBelief { state: 0, tau: 1 },
                    ArmBelief { state: 1, tau: 1 }
                ]
            );
        }
    }

    #[test]
    fn budget_and_tau_errors() {
        let inst = instance_one();
        let cfg = MdpConfig {
            tau_max: 30,
            state_budget: 10,
        };
        assert!(matches!(
            build_truncated_mdp(&inst, &cfg),
            Err(MdpError::StateBudgetExceeded {
                reached: 10,
                budget: 10
            })
        ));
        assert!(matches!(
            build_truncated_mdp(&inst, &MdpConfig::new(1)),
            Err(MdpError::TauMax(1))
        ));
    }
}
