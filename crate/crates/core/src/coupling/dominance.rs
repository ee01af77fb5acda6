use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{correspond, CouplingError};
use crate::belief::{BeliefTracker, TablePolicy};
use crate::chain::{prefix_dominates, PowerCache, RestlessInstance};
use crate::env::{Action, Env};

/// One coupled pull.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoupledStep {
    pub arm: usize,
    pub real_state: usize,
    pub virtual_state: usize,
    pub real_reward: f64,
    pub virtual_reward: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CoupledTrace {
    pub steps: Vec<CoupledStep>,
    /// Pulls where the virtual state is better (lower) than the real one.
    pub violations: u64,
    pub real_reward: f64,
    pub virtual_reward: f64,
}

impl CoupledTrace {
    fn push(&mut self, step: CoupledStep) {
        if step.virtual_state < step.real_state {
            self.violations += 1;
        }
        self.real_reward += step.real_reward;
        self.virtual_reward += step.virtual_reward;
        self.steps.push(step);
    }
}

fn powers(instance: &RestlessInstance) -> Vec<PowerCache> {
    instance
        .arms()
        .iter()
        .map(|a| PowerCache::new(a.chain.clone()))
        .collect()
}

/// Plays `policy` (solved for `model`) in the real game on `real`, steering
/// it with a virtual belief that follows the law of `model`.
///
/// At each pull of arm `i`, with `tau` steps since its last pull,
/// `v' = e_{s'} P'^tau` and `v = e_s P^tau` are taken from the real and
/// virtual last states; the real observation is mapped to a virtual one by
/// [`correspond`]. Real and virtual Bernoulli rewards share one uniform
/// draw. Fails if `v' ≳ v` does not hold at some pull.
pub fn simulate_dominance(
    model: &RestlessInstance,
    real: &RestlessInstance,
    policy: &TablePolicy,
    horizon: u64,
    seed: u64,
) -> Result<CoupledTrace, CouplingError> {
    if model.num_arms() != real.num_arms()
        || model.num_states() != real.num_states()
        || model.initial_states() != real.initial_states()
    {
        return Err(CouplingError::Shape);
    }
    let mut env = Env::reset(real, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(real.num_arms() as u64 + 1);
    let mut model_powers = powers(model);
    let mut real_powers = powers(real);
    let mut virt = BeliefTracker::new(model.initial_states());
    let mut real_belief = BeliefTracker::new(real.initial_states());
    let mut trace = CoupledTrace {
        steps: Vec::with_capacity(horizon as usize),
        ..Default::default()
    };
    for t in 0..horizon {
        let arm = policy.action_at(&virt);
        let tau = virt.elapsed(arm) as usize;
        let v = model_powers[arm].row(virt.last_state(arm), tau).to_vec();
        let v_prime = real_powers[arm].row(real_belief.last_state(arm), tau);
        if !prefix_dominates(v_prime, &v)? {
            return Err(CouplingError::NotDominated { t, arm });
        }
        let obs = env.step(Action::Pull(arm))?;
        let real_state = obs.observed_state.expect("pulled arm is observed");
        let virtual_state = correspond(&v, v_prime, real_state, &mut rng)?;
        let u = env.last_reward_draw();
        let virtual_reward = f64::from(u8::from(u < model.arm(arm).rewards[virtual_state]));
        virt.record(arm, virtual_state);
        real_belief.record(arm, real_state);
        trace.push(CoupledStep {
            arm,
            real_state,
            virtual_state,
            real_reward: obs.reward,
            virtual_reward,
        });
    }
    Ok(trace)
}
