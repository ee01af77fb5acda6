use crate::chain::RestlessInstance;
use crate::env::Env;
use crate::policy::{play, GameSpec, Policy, PolicyError};

/// Monte Carlo estimate of a long-run average reward.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainEstimate {
    pub mean: f64,
    pub std_error: f64,
}

const BATCHES: u64 = 32;

/// Average reward per step of `policy` on the true instance over `reps`
/// independent games of `horizon` steps (seeds `seed + rep`).
///
/// With two or more replications the standard error is taken across them;
/// a single replication uses batch means over 32 consecutive blocks.
pub fn policy_gain(
    instance: &RestlessInstance,
    policy: &mut dyn Policy,
    horizon: u64,
    reps: u64,
    seed: u64,
) -> Result<GainEstimate, PolicyError> {
    assert!(
        horizon >= 1 && reps >= 1,
        "horizon and reps must be positive"
    );
    let game = GameSpec::for_instance(instance, horizon);
    let mut rep_means = Vec::with_capacity(reps as usize);
    let mut batch_means = Vec::new();
    let batch_len = (horizon / BATCHES).max(1);
    for rep in 0..reps {
        let s = seed.wrapping_add(rep);
        let mut env = Env::reset(instance, s)?;
        policy.reset(&game, s ^ 0x9E37_79B9_7F4A_7C15)?;
        let mut total = 0.0;
        let mut batch = 0.0;
        play(&mut env, policy, horizon, |t, obs| {
            total += obs.reward;
            batch += obs.reward;
            if (t + 1) % batch_len == 0 {
                batch_means.push(batch / batch_len as f64);
                batch = 0.0;
            }
        })?;
        rep_means.push(total / horizon as f64);
    }
    let mean = rep_means.iter().sum::<f64>() / reps as f64;
    let samples = if reps >= 2 { &rep_means } else { &batch_means };
    let n = samples.len() as f64;
    let std_error = if samples.len() >= 2 {
        let mu = samples.iter().sum::<f64>() / n;
        let var = samples.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    } else {
        0.0
    };
    Ok(GainEstimate { mean, std_error })
}
