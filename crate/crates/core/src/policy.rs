//! The interface shared by every online policy, and the game loop.

use crate::env::{Action, Env, EnvError, Observation};
use thiserror::Error;

/// What a policy learns about the game at reset.
#[derive(Debug, Clone, PartialEq)]
pub struct GameSpec {
    pub num_arms: usize,
    pub num_states: usize,
    pub horizon: u64,
    pub initial_states: Vec<usize>,
}

#[derive(Debug, Error)]
pub enum PolicyError {
    #[error("policy was not reset before use")]
    NotReset,
    #[error("insufficient data at arm {arm}, state {state}")]
    InsufficientData { arm: usize, state: usize },
    #[error("empty prior grid for arm {arm}")]
    EmptyGrid { arm: usize },
    #[error("prior grid needs {expected}-state chains, got {got}")]
    GridShape { expected: usize, got: usize },
    #[error("oracle failed: {0}")]
    Oracle(#[from] crate::belief::MdpError),
    #[error(transparent)]
    Chain(#[from] crate::chain::ChainError),
    #[error(transparent)]
    Env(#[from] EnvError),
}

/// An online arm-selection rule.
///
/// `choose` must not change the policy's state; `observe` is the only
/// mutator besides `reset`.
pub trait Policy: Send {
    fn name(&self) -> String;
    fn reset(&mut self, game: &GameSpec, seed: u64) -> Result<(), PolicyError>;
    fn choose(&self, t: u64) -> Action;
    fn observe(&mut self, obs: &Observation) -> Result<(), PolicyError>;
}

impl GameSpec {
    pub fn for_instance(instance: &crate::chain::RestlessInstance, horizon: u64) -> Self {
        GameSpec {
            num_arms: instance.num_arms(),
            num_states: instance.num_states(),
            horizon,
            initial_states: instance.initial_states().to_vec(),
        }
    }
}

/// Plays `horizon` steps, calling `on_step` after each observation with the
/// step index (0-based).
pub fn play<P: Policy + ?Sized>(
    env: &mut Env,
    policy: &mut P,
    horizon: u64,
    mut on_step: impl FnMut(u64, &Observation),
) -> Result<(), PolicyError> {
    for t in 0..horizon {
        let action = policy.choose(t);
        let obs = env.step(action)?;
        policy.observe(&obs)?;
        on_step(t, &obs);
    }
    Ok(())
}
