use super::{BeliefState, BeliefTracker};
use crate::chain::{PowerCache, RestlessInstance, DEFAULT_POWER_CAP};
use crate::env::{Action, Observation};
use crate::policy::{GameSpec, Policy, PolicyError};

/// Greedy rule: pull the arm with the largest expected immediate reward
/// at the current belief, lowest index on ties.
///
/// Expected rewards `(e_s P^tau) · r` are tabulated for every
/// `tau <= DEFAULT_POWER_CAP`; larger `tau` uses the stationary mean.
#[derive(Debug, Clone)]
pub struct MyopicOracle {
    num_states: usize,
    cap: usize,
    // [arm][state * (cap + 2) + tau], last slot per state = stationary mean
    table: Vec<Vec<f64>>,
}

impl MyopicOracle {
    pub fn new(instance: &RestlessInstance) -> Self {
        let cap = DEFAULT_POWER_CAP;
        let m = instance.num_states();
        let table = instance
            .arms()
            .iter()
            .map(|arm| {
                let mut cache = PowerCache::with_cap(arm.chain.clone(), cap);
                let mut row = Vec::with_capacity(m * (cap + 2));
                for s in 0..m {
                    for tau in 0..=cap + 1 {
                        row.push(cache.expectation(s, tau, &arm.rewards));
                    }
                }
                row
            })
            .collect();
        MyopicOracle {
            num_states: m,
            cap,
            table,
        }
    }

    #[inline]
    fn value(&self, arm: usize, state: usize, tau: u64) -> f64 {
        let tau = (tau as usize).min(self.cap + 1);
        self.table[arm][state * (self.cap + 2) + tau]
    }

    pub fn expected_reward(&self, z: &BeliefState, arm: usize) -> f64 {
        let b = z.arm(arm);
        self.value(arm, b.state, b.tau as u64)
    }

    pub fn choose(&self, z: &BeliefState) -> usize {
        argmax((0..z.arms().len()).map(|a| self.expected_reward(z, a)))
    }

    /// Uses the exact elapsed time of each arm.
    pub fn choose_tracked(&self, tracker: &BeliefTracker) -> usize {
        argmax(
            (0..self.table.len()).map(|a| self.value(a, tracker.last_state(a), tracker.elapsed(a))),
        )
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }
}

fn argmax(values: impl Iterator<Item = f64>) -> usize {
    let mut best = f64::NEG_INFINITY;
    let mut best_arm = 0;
    for (a, v) in values.enumerate() {
        if v > best {
            best = v;
            best_arm = a;
        }
    }
    best_arm
}

/// [`MyopicOracle`] played online from tracked beliefs.
#[derive(Debug, Clone)]
pub struct MyopicPolicy {
    oracle: MyopicOracle,
    tracker: Option<BeliefTracker>,
}

impl MyopicPolicy {
    pub fn new(instance: &RestlessInstance) -> Self {
        MyopicPolicy {
            oracle: MyopicOracle::new(instance),
            tracker: None,
        }
    }

    pub fn from_oracle(oracle: MyopicOracle, tracker: BeliefTracker) -> Self {
        MyopicPolicy {
            oracle,
            tracker: Some(tracker),
        }
    }

    pub fn oracle(&self) -> &MyopicOracle {
        &self.oracle
    }
}

impl Policy for MyopicPolicy {
    fn name(&self) -> String {
        "myopic".into()
    }

    fn reset(&mut self, game: &GameSpec, _seed: u64) -> Result<(), PolicyError> {
        self.tracker = Some(BeliefTracker::new(&game.initial_states));
        Ok(())
    }

    fn choose(&self, _t: u64) -> Action {
        Action::Pull(
            self.tracker
                .as_ref()
                .map_or(0, |tr| self.oracle.choose_tracked(tr)),
        )
    }

    fn observe(&mut self, obs: &Observation) -> Result<(), PolicyError> {
        self.tracker
            .as_mut()
            .ok_or(PolicyError::NotReset)?
            .observe(obs);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::instance_one;
    use super::super::ArmBelief;
    use super::*;
    use crate::chain::{Arm, BirthDeathChain};

    fn z(pairs: &[(usize, usize)]) -> BeliefState {
        BeliefState::new(
            pairs
                .iter()
                .map(|&(state, tau)| ArmBelief { state, tau })
                .collect(),
        )
    }

    #[test]
    fn picks_larger_expected_reward() {
        let oracle = MyopicOracle::new(&instance_one());
        let start = z(&[(1, 1), (1, 1)]);
        assert!((oracle.expected_reward(&start, 0) - 0.2).abs() < 1e-15);
        assert!((oracle.expected_reward(&start, 1) - 0.32).abs() < 1e-15);
        assert_eq!(oracle.choose(&start), 1);
    }

    #[test]
    fn ties_go_to_lowest_index() {
        let arm = Arm::new(
            BirthDeathChain::two_state(0.7, 0.8).unwrap(),
            vec![1.0, 0.0],
        )
        .unwrap();
        let inst =
            RestlessInstance::new(vec![arm.clone(), arm.clone(), arm], vec![0, 0, 0]).unwrap();
        let oracle = MyopicOracle::new(&inst);
        assert_eq!(oracle.choose(&z(&[(0, 3), (0, 3), (0, 3)])), 0);
        let single = RestlessInstance::new(
            vec![Arm::new(
                BirthDeathChain::two_state(0.7, 0.8).unwrap(),
                vec![1.0, 0.0],
            )
            .unwrap()],
            vec![1],
        )
        .unwrap();
        let oracle = MyopicOracle::new(&single);
        assert_eq!(oracle.choose(&z(&[(1, 1)])), 0);
        assert_eq!(oracle.choose(&z(&[(0, 9)])), 0);
    }
}
