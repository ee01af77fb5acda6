//! Online learning for restless bandits with birth-death arms.
//!
//! Each arm is a Markov chain on `M` states that moves at most one state
//! per step whether or not it is pulled; only the pulled arm's state is
//! seen. The crate provides the environment, offline belief-MDP oracles,
//! the explore-then-commit [`RestlessUcb`] policy with its baselines, and
//! coupled simulations that compare real and virtual trajectories.
//!
//! ```
//! use restless_ucb::{Env, GameSpec, Policy, RestlessUcb, RestlessUcbConfig};
//! use restless_ucb::{Arm, BirthDeathChain, RestlessInstance, ExplorationTarget};
//!
//! let arms = vec![
//!     Arm::new(BirthDeathChain::two_state(0.7, 0.8)?, vec![1.0, 0.0])?,
//!     Arm::new(BirthDeathChain::two_state(0.5, 0.6)?, vec![0.8, 0.2])?,
//! ];
//! let instance = RestlessInstance::new(arms, vec![1, 1])?;
//! let horizon = 2_000;
//! let mut policy = RestlessUcb::new(RestlessUcbConfig {
//!     target: ExplorationTarget::Fixed(50),
//!     ..Default::default()
//! });
//! policy.reset(&GameSpec::for_instance(&instance, horizon), 7)?;
//! let mut env = Env::reset(&instance, 7)?;
//! let mut total = 0.0;
//! restless_ucb::play(&mut env, &mut policy, horizon, |_, obs| total += obs.reward)?;
//! assert!(policy.commit_info().is_some());
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod belief;
pub mod chain;
pub mod coupling;
pub mod env;
pub mod policies;
pub mod policy;

pub use belief::{
    BeliefModel, BeliefState, BeliefTracker, MdpError, MyopicOracle, MyopicPolicy, PolicyTable,
    SolveSettings, TablePolicy,
};
pub use chain::{
    prefix_dominates, validate_assumptions, Arm, BirthDeathChain, ChainError, ProbVector,
    RestlessInstance,
};
pub use coupling::{correspond, simulate_bias_gap, simulate_dominance, CouplingError};
pub use env::{Action, Env, EnvError, Observation};
pub use policies::{
    ExplorationTarget, FixedArm, OracleKind, RestlessUcb, RestlessUcbConfig, ThompsonConfig,
    ThompsonSampling,
};
pub use policy::{play, GameSpec, Policy, PolicyError};
