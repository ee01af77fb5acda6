//! Coupled simulations that compare a real trajectory with a virtual one.
//!
//! [`correspond`] turns a state drawn from one distribution into a state
//! drawn from another while preserving their prefix-sum order. The two
//! simulators built on it run the real game and track a virtual belief
//! that evolves exactly as it would under a different model or start.

mod bias_gap;
mod correspond;
mod dominance;

pub use bias_gap::{estimate_bias_gap, simulate_bias_gap, BiasGapEstimate, BiasGapSample};
pub use correspond::{correspond, correspond_probabilities};
pub use dominance::{simulate_dominance, CoupledStep, CoupledTrace};

use thiserror::Error;

use crate::chain::ChainError;
use crate::env::EnvError;

#[derive(Debug, Error)]
pub enum CouplingError {
    #[error("state {k} has zero mass under the observed distribution")]
    ZeroMass { k: usize },
    #[error("state {k} out of range for {len} states")]
    StateOutOfRange { k: usize, len: usize },
    #[error("dominance precondition fails at step {t} for arm {arm}")]
    NotDominated { t: u64, arm: usize },
    #[error("instances differ in shape")]
    Shape,
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Env(#[from] EnvError),
}
