//! Online policies behind the common [`Policy`] interface.

mod exploration;
mod optimistic;
mod restless_ucb;
mod thompson;

pub use exploration::{empirical_estimates, EmpiricalStats, ExplorationSchedule, PhaseStatus};
pub use optimistic::{build_optimistic_instance, ConfidenceRadius, ExplorationTarget};
pub use restless_ucb::{CommitInfo, RestlessUcb, RestlessUcbConfig};
pub use thompson::{
    DiscretePosterior, RewardKnowledge, ThompsonConfig, ThompsonSampling, TransitionEvidence,
};

use serde::{Deserialize, Serialize};

use crate::belief::{BeliefTracker, MyopicOracle, SolveSettings, TablePolicy};
use crate::chain::RestlessInstance;
use crate::env::{Action, Observation};
use crate::policy::{GameSpec, Policy, PolicyError};

/// Offline solver used once parameters are fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleKind {
    /// Truncated belief MDP solved by relative value iteration.
    #[default]
    Exact,
    /// Greedy on expected immediate reward.
    Myopic,
}

/// A solved offline policy, ready to act on tracked beliefs.
#[derive(Debug, Clone)]
pub enum SolvedOracle {
    Table(Box<TablePolicy>),
    Myopic(MyopicOracle),
}

impl SolvedOracle {
    pub fn solve(
        instance: &RestlessInstance,
        kind: OracleKind,
        settings: &SolveSettings,
    ) -> Result<Self, PolicyError> {
        Ok(match kind {
            OracleKind::Exact => {
                let table = settings.solve(instance)?;
                SolvedOracle::Table(Box::new(TablePolicy::new(table, instance)))
            }
            OracleKind::Myopic => SolvedOracle::Myopic(MyopicOracle::new(instance)),
        })
    }

    pub fn act(&self, tracker: &BeliefTracker) -> usize {
        match self {
            SolvedOracle::Table(p) => p.action_at(tracker),
            SolvedOracle::Myopic(o) => o.choose_tracked(tracker),
        }
    }

    /// Gain of the solved table, when there is one.
    pub fn gain(&self) -> Option<f64> {
        match self {
            SolvedOracle::Table(p) => Some(p.table().gain()),
            SolvedOracle::Myopic(_) => None,
        }
    }
}

/// Always plays the same action (`Action::Idle` included).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FixedArm(pub Action);

impl Policy for FixedArm {
    fn name(&self) -> String {
        format!("fixed-{}", self.0.index())
    }

    fn reset(&mut self, game: &GameSpec, _seed: u64) -> Result<(), PolicyError> {
        if let Action::Pull(i) = self.0 {
            if i >= game.num_arms {
                return Err(PolicyError::Env(crate::env::EnvError::ActionOutOfRange {
                    action: self.0.index(),
                    num_arms: game.num_arms,
                }));
            }
        }
        Ok(())
    }

    fn choose(&self, _t: u64) -> Action {
        self.0
    }

    fn observe(&mut self, _obs: &Observation) -> Result<(), PolicyError> {
        Ok(())
    }
}

/// Tracks the belief and plays the exact solution of the true instance:
/// the reference trajectory of the regret definition.
pub fn oracle_replay(
    instance: &RestlessInstance,
    settings: &SolveSettings,
) -> Result<TablePolicy, PolicyError> {
    let table = settings.solve(instance)?;
    Ok(TablePolicy::new(table, instance))
}
