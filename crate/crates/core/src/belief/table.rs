use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use super::{BeliefState, BeliefTracker, MdpError, MyopicOracle};
use crate::chain::RestlessInstance;
use crate::env::{Action, Observation};
use crate::policy::{GameSpec, Policy, PolicyError};

pub const POLICY_TABLE_VERSION: u32 = 1;
const MAGIC: &str = "restless-policy-table";

/// Solved belief MDP: an action per enumerated belief, the average-reward
/// gain and the bias vector (zero at the initial belief).
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyTable {
    states: Vec<BeliefState>,
    index: HashMap<BeliefState, usize>,
    actions: Vec<usize>,
    gain: f64,
    bias: Vec<f64>,
    epsilon: f64,
    tau_max: usize,
}

impl PolicyTable {
    pub(crate) fn from_parts(
        states: Vec<BeliefState>,
        index: HashMap<BeliefState, usize>,
        actions: Vec<usize>,
        gain: f64,
        bias: Vec<f64>,
        epsilon: f64,
        tau_max: usize,
    ) -> Self {
        PolicyTable {
            states,
            index,
            actions,
            gain,
            bias,
            epsilon,
            tau_max,
        }
    }

    pub fn gain(&self) -> f64 {
        self.gain
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn tau_max(&self) -> usize {
        self.tau_max
    }

    pub fn states(&self) -> &[BeliefState] {
        &self.states
    }

    /// 0-based arm per state, aligned with [`PolicyTable::states`].
    pub fn actions(&self) -> &[usize] {
        &self.actions
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub fn index_of(&self, z: &BeliefState) -> Option<usize> {
        self.index.get(z).copied()
    }

    /// Arm to pull at `z`, if `z` was enumerated.
    pub fn action_for(&self, z: &BeliefState) -> Option<usize> {
        self.index.get(z).map(|&i| self.actions[i])
    }

    /// Versioned text format: a header with gain, epsilon and tau_max, then
    /// one `belief action bias` line per state. Actions are written
    /// 1-based.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let num_arms = self.states.first().map_or(0, |z| z.arms().len());
        writeln!(out, "{MAGIC} v{POLICY_TABLE_VERSION}").unwrap();
        writeln!(out, "num_arms {num_arms}").unwrap();
        writeln!(out, "tau_max {}", self.tau_max).unwrap();
        writeln!(out, "gain {}", self.gain).unwrap();
        writeln!(out, "epsilon {}", self.epsilon).unwrap();
        writeln!(out, "states {}", self.states.len()).unwrap();
        for ((z, a), b) in self.states.iter().zip(&self.actions).zip(&self.bias) {
            writeln!(out, "{z} {} {b}", a + 1).unwrap();
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, MdpError> {
        let bad = |msg: &str| MdpError::Format(msg.to_string());
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| bad("empty file"))?;
        let version = header
            .strip_prefix(MAGIC)
            .and_then(|rest| rest.trim().strip_prefix('v'))
            .ok_or_else(|| bad("missing header"))?;
        if version != POLICY_TABLE_VERSION.to_string() {
            return Err(bad(&format!("unsupported version {version}")));
        }
        let mut field = |name: &str| -> Result<String, MdpError> {
            let line = lines
                .next()
                .ok_or_else(|| bad(&format!("missing {name}")))?;
            line.strip_prefix(name)
                .map(|v| v.trim().to_string())
                .ok_or_else(|| bad(&format!("expected {name}, got {line:?}")))
        };
        let num_arms: usize = field("num_arms")?.parse().map_err(|_| bad("num_arms"))?;
        let tau_max: usize = field("tau_max")?.parse().map_err(|_| bad("tau_max"))?;
        let gain: f64 = field("gain")?.parse().map_err(|_| bad("gain"))?;
        let epsilon: f64 = field("epsilon")?.parse().map_err(|_| bad("epsilon"))?;
        let count: usize = field("states")?.parse().map_err(|_| bad("states"))?;

        let mut states = Vec::with_capacity(count);
        let mut actions = Vec::with_capacity(count);
        let mut bias = Vec::with_capacity(count);
        for line in lines.filter(|l| !l.trim().is_empty()) {
            let mut parts = line.split_whitespace();
            let (Some(key), Some(a), Some(b), None) =
                (parts.next(), parts.next(), parts.next(), parts.next())
            else {
                return Err(bad(&format!("malformed line {line:?}")));
            };
            let z = BeliefState::parse(key).ok_or_else(|| bad(&format!("bad belief {key:?}")))?;
            if z.arms().len() != num_arms {
                return Err(bad(&format!("belief {key:?} has wrong arity")));
            }
            let a: usize = a.parse().map_err(|_| bad("action"))?;
            if a == 0 || a > num_arms {
                return Err(bad(&format!("action {a} out of range")));
            }
            states.push(z);
            actions.push(a - 1);
            bias.push(b.parse().map_err(|_| bad("bias"))?);
        }
        if states.len() != count {
            return Err(bad(&format!(
                "expected {count} states, found {}",
                states.len()
            )));
        }
        let index = states
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, z)| (z, i))
            .collect();
        Ok(PolicyTable {
            states,
            index,
            actions,
            gain,
            bias,
            epsilon,
            tau_max,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), MdpError> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, MdpError> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }
}

/// Plays a solved table at the tracked belief. Beliefs missing from the
/// table (possible when the solved model gives a state zero probability
/// that the real game produces) fall back to the myopic choice under the
/// same model.
#[derive(Debug, Clone)]
pub struct TablePolicy {
    table: PolicyTable,
    fallback: MyopicOracle,
    tracker: Option<BeliefTracker>,
    misses: u64,
}

impl TablePolicy {
    pub fn new(table: PolicyTable, model: &RestlessInstance) -> Self {
        TablePolicy {
            fallback: MyopicOracle::new(model),
            table,
            tracker: None,
            misses: 0,
        }
    }

    /// Starts from an existing belief instead of the initial states.
    pub fn with_tracker(mut self, tracker: BeliefTracker) -> Self {
        self.tracker = Some(tracker);
        self
    }

    pub fn table(&self) -> &PolicyTable {
        &self.table
    }

    pub fn tracker(&self) -> Option<&BeliefTracker> {
        self.tracker.as_ref()
    }

    /// Number of steps whose belief was not in the table.
    pub fn misses(&self) -> u64 {
        self.misses
    }

    pub fn action_at(&self, tracker: &BeliefTracker) -> usize {
        let z = tracker.belief(self.table.tau_max());
        self.table
            .action_for(&z)
            .unwrap_or_else(|| self.fallback.choose_tracked(tracker))
    }
}

impl Policy for TablePolicy {
    fn name(&self) -> String {
        "oracle-table".into()
    }

    fn reset(&mut self, game: &GameSpec, _seed: u64) -> Result<(), PolicyError> {
        self.tracker = Some(BeliefTracker::new(&game.initial_states));
        self.misses = 0;
        Ok(())
    }

    fn choose(&self, _t: u64) -> Action {
        match &self.tracker {
            Some(tr) => Action::Pull(self.action_at(tr)),
            None => Action::Pull(0),
        }
    }

    fn observe(&mut self, obs: &Observation) -> Result<(), PolicyError> {
        let tracker = self.tracker.as_mut().ok_or(PolicyError::NotReset)?;
        let z = tracker.belief(self.table.tau_max());
        if self.table.index_of(&z).is_none() {
            self.misses += 1;
        }
        tracker.observe(obs);
        Ok(())
    }
}
