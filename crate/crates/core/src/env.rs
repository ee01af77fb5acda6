//! The online game.
//!
//! Every arm's chain moves once per step whether or not it is pulled; the
//! player sees only the state and reward of the arm it pulls. The reward
//! and the observed state both refer to the state at pull time, before the
//! step's transition.
//!
//! Randomness is split by role. Each chain draws its transitions from its
//! own ChaCha stream and rewards come from a further stream that is
//! advanced once per step regardless of the action, so a policy's choices
//! never perturb the sample path of any chain.

use std::io::Write;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::chain::{validate_assumptions, RestlessInstance};

#[derive(Debug, Error)]
pub enum EnvError {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("action {action} out of range for {num_arms} arms")]
    ActionOutOfRange { action: usize, num_arms: usize },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// Arm choice. `Idle` is the default arm 0 (no reward, no observation).
/// `Pull(i)` uses the 0-based index of a real arm; externally it is
/// numbered `i + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Action {
    Idle,
    Pull(usize),
}

impl Action {
    /// External index in `{0, ..., N}`.
    pub fn index(self) -> usize {
        match self {
            Action::Idle => 0,
            Action::Pull(i) => i + 1,
        }
    }

    pub fn from_index(index: usize) -> Self {
        if index == 0 {
            Action::Idle
        } else {
            Action::Pull(index - 1)
        }
    }

    pub fn arm(self) -> Option<usize> {
        match self {
            Action::Idle => None,
            Action::Pull(i) => Some(i),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    pub action: Action,
    /// Present iff a real arm was pulled.
    pub observed_state: Option<usize>,
    pub reward: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RewardModel {
    /// Reward is 1 with probability `r(i, k)`, else 0.
    #[default]
    Bernoulli,
    /// Reward equals `r(i, k)`; for debugging.
    Deterministic,
}

pub struct Env {
    instance: RestlessInstance,
    hidden: Vec<usize>,
    t: u64,
    chain_rngs: Vec<ChaCha8Rng>,
    reward_rng: ChaCha8Rng,
    reward_model: RewardModel,
    last_draw: f64,
}

/// Stream layout of one root seed: stream 0 carries rewards, stream `i + 1`
/// carries chain `i`. Policies should derive their own seeds elsewhere.
fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

impl Env {
    /// Starts a game at the instance's initial states. The instance must pass
    /// the structural checks with every neighbor probability strictly
    /// positive.
    pub fn reset(instance: &RestlessInstance, seed: u64) -> Result<Self, EnvError> {
        Self::with_reward_model(instance, seed, RewardModel::Bernoulli)
    }

    pub fn with_reward_model(
        instance: &RestlessInstance,
        seed: u64,
        reward_model: RewardModel,
    ) -> Result<Self, EnvError> {
        let report = validate_assumptions(instance, f64::MIN_POSITIVE);
        if !report.passed() {
            let (arm, arm_report) = report
                .arms
                .iter()
                .enumerate()
                .find(|(_, a)| !a.passed())
                .expect("a failing arm");
            return Err(EnvError::InvalidInstance(format!(
                "arm {arm} fails structural checks: {arm_report:?}"
            )));
        }
        let n = instance.num_arms();
        Ok(Env {
            hidden: instance.initial_states().to_vec(),
            t: 0,
            chain_rngs: (0..n as u64).map(|i| stream(seed, i + 1)).collect(),
            reward_rng: stream(seed, 0),
            instance: instance.clone(),
            reward_model,
            last_draw: 0.0,
        })
    }

    pub fn instance(&self) -> &RestlessInstance {
        &self.instance
    }

    pub fn hidden_states(&self) -> &[usize] {
        &self.hidden
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    /// Uniform draw that produced the latest Bernoulli reward. Coupled
    /// simulations reuse it so real and virtual rewards share randomness.
    pub fn last_reward_draw(&self) -> f64 {
        self.last_draw
    }

    pub fn step(&mut self, action: Action) -> Result<Observation, EnvError> {
        let n = self.instance.num_arms();
        if let Action::Pull(i) = action {
            if i >= n {
                return Err(EnvError::ActionOutOfRange {
                    action: action.index(),
                    num_arms: n,
                });
            }
        }
        let u: f64 = self.reward_rng.random();
        self.last_draw = u;
        let obs = match action {
            Action::Idle => Observation {
                action,
                observed_state: None,
                reward: 0.0,
            },
            Action::Pull(i) => {
                let s = self.hidden[i];
                let mean = self.instance.arm(i).rewards[s];
                let reward = match self.reward_model {
                    RewardModel::Bernoulli => f64::from(u8::from(u < mean)),
                    RewardModel::Deterministic => mean,
                };
                Observation {
                    action,
                    observed_state: Some(s),
                    reward,
                }
            }
        };
        for (i, rng) in self.chain_rngs.iter_mut().enumerate() {
            let u: f64 = rng.random();
            self.hidden[i] = self.instance.arm(i).chain.next_state(self.hidden[i], u);
        }
        self.t += 1;
        Ok(obs)
    }
}

/// CSV trajectory log: `t,action,observed_state,reward`, with `-1` for
/// "no observation".
pub struct TrajectoryLog<W: Write> {
    out: W,
}

impl<W: Write> TrajectoryLog<W> {
    pub fn new(mut out: W) -> std::io::Result<Self> {
        writeln!(out, "t,action,observed_state,reward")?;
        Ok(TrajectoryLog { out })
    }

    pub fn record(&mut self, t: u64, obs: &Observation) -> std::io::Result<()> {
        let state = obs.observed_state.map_or(-1, |s| s as i64);
        writeln!(
            self.out,
            "{t},{},{state},{}",
            obs.action.index(),
            obs.reward
        )
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}
