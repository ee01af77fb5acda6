use super::{
    build_optimistic_instance, empirical_estimates, ConfidenceRadius, ExplorationSchedule,
    ExplorationTarget, OracleKind, SolvedOracle,
};
use crate::belief::{BeliefTracker, SolveSettings};
use crate::chain::RestlessInstance;
use crate::env::{Action, Observation};
use crate::policy::{GameSpec, Policy, PolicyError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RestlessUcbConfig {
    pub target: ExplorationTarget,
    pub oracle: OracleKind,
    pub solve: SolveSettings,
    /// Base of the logarithm in the confidence radius.
    pub log_base: f64,
}

impl Default for RestlessUcbConfig {
    fn default() -> Self {
        RestlessUcbConfig {
            target: ExplorationTarget::default(),
            oracle: OracleKind::Exact,
            solve: SolveSettings::default(),
            log_base: std::f64::consts::E,
        }
    }
}

/// What happened at the end of exploration.
#[derive(Debug, Clone)]
pub struct CommitInfo {
    /// Steps spent exploring.
    pub exploration_steps: u64,
    pub radius: ConfidenceRadius,
    pub optimistic: RestlessInstance,
    /// Gain of the optimistic instance under the exact oracle.
    pub optimistic_gain: Option<f64>,
}

/// Explore-then-commit with an optimistic offline instance.
///
/// Exploration pulls each arm in turn until all of its states have `m(T)`
/// completed visits. The empirical chains are then shifted toward the good
/// states by the confidence radius, rewards are inflated by it, and the
/// resulting instance is handed to the offline oracle. The oracle's policy
/// is followed from the belief built from the actual observation history
/// for the rest of the game.
#[derive(Debug, Clone)]
pub struct RestlessUcb {
    config: RestlessUcbConfig,
    state: Option<Running>,
}

#[derive(Debug, Clone)]
struct Running {
    initial_states: Vec<usize>,
    horizon: u64,
    schedule: ExplorationSchedule,
    tracker: BeliefTracker,
    commit: Option<(CommitInfo, SolvedOracle)>,
}

impl RestlessUcb {
    pub fn new(config: RestlessUcbConfig) -> Self {
        RestlessUcb {
            config,
            state: None,
        }
    }

    pub fn config(&self) -> &RestlessUcbConfig {
        &self.config
    }

    pub fn commit_info(&self) -> Option<&CommitInfo> {
        self.state.as_ref()?.commit.as_ref().map(|(info, _)| info)
    }

    pub fn schedule(&self) -> Option<&ExplorationSchedule> {
        self.state.as_ref().map(|s| &s.schedule)
    }

    pub fn is_exploring(&self) -> bool {
        self.state.as_ref().is_some_and(|s| s.commit.is_none())
    }
}

impl Running {
    fn commit(&mut self, config: &RestlessUcbConfig) -> Result<(), PolicyError> {
        let (chains, rewards) = empirical_estimates(self.schedule.stats())?;
        let radius = ConfidenceRadius::with_log_base(
            self.horizon,
            self.schedule.m_target(),
            config.log_base,
        );
        let optimistic =
            build_optimistic_instance(&chains, &rewards, radius.rad, &self.initial_states)?;
        let oracle = SolvedOracle::solve(&optimistic, config.oracle, &config.solve)?;
        let info = CommitInfo {
            exploration_steps: match self.schedule.status() {
                super::PhaseStatus::Finished { steps } => steps,
                super::PhaseStatus::Exploring { .. } => unreachable!("commit before finish"),
            },
            radius,
            optimistic_gain: oracle.gain(),
            optimistic,
        };
        self.commit = Some((info, oracle));
        Ok(())
    }
}

impl Policy for RestlessUcb {
    fn name(&self) -> String {
        match self.config.oracle {
            OracleKind::Exact => "restless-ucb".into(),
            OracleKind::Myopic => "restless-ucb-myopic".into(),
        }
    }

    fn reset(&mut self, game: &GameSpec, _seed: u64) -> Result<(), PolicyError> {
        let m = self.config.target.m(game.horizon);
        self.state = Some(Running {
            initial_states: game.initial_states.clone(),
            horizon: game.horizon,
            schedule: ExplorationSchedule::new(game.num_arms, game.num_states, m),
            tracker: BeliefTracker::new(&game.initial_states),
            commit: None,
        });
        Ok(())
    }

    fn choose(&self, _t: u64) -> Action {
        let Some(st) = &self.state else {
            return Action::Idle;
        };
        match &st.commit {
            Some((_, oracle)) => Action::Pull(oracle.act(&st.tracker)),
            None => st.schedule.next_action().unwrap_or(Action::Idle),
        }
    }

    fn observe(&mut self, obs: &Observation) -> Result<(), PolicyError> {
        let st = self.state.as_mut().ok_or(PolicyError::NotReset)?;
        st.tracker.observe(obs);
        if st.commit.is_none() {
            st.schedule.record(obs);
            if st.schedule.is_finished() {
                st.commit(&self.config)?;
            }
        }
        Ok(())
    }
}
