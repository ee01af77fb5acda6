use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{correspond, CouplingError};
use crate::belief::{BeliefState, BeliefTracker, TablePolicy};
use crate::chain::{prefix_dominates, PowerCache, RestlessInstance};

/// One coupled run started from `z` with the focal arm seen in `j` (real)
/// and `k` (virtual).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiasGapSample {
    /// Real minus virtual cumulative expected reward.
    pub difference: f64,
    /// Step at which both beliefs became equal, if they did.
    pub coalesced_at: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiasGapEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub reps: u64,
    /// Runs that ended before the beliefs met.
    pub uncoalesced: u64,
}

fn tracker_from(z: &BeliefState) -> BeliefTracker {
    let mut t = BeliefTracker::new(&z.arms().iter().map(|b| b.state).collect::<Vec<_>>());
    t.set_elapsed(z.arms().iter().map(|b| b.tau as u64).collect());
    t
}

fn sample<R: Rng + ?Sized>(p: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, x) in p.iter().enumerate() {
        acc += x;
        if u < acc {
            return i;
        }
    }
    p.len() - 1
}

/// Runs the policy from two beliefs that differ only in the focal arm.
///
/// The focal arm is the policy's action at `z`. The real belief starts from
/// `z` with that arm observed in state `j`, the virtual one with it observed
/// in `k`. Actions follow the virtual belief. Pulls of other arms
/// share one sampled state; pulls of the focal arm sample the real state
/// and map it to the virtual one with [`correspond`]. Both beliefs evolve
/// under `instance`, which should be the instance `policy` was solved for.
/// The run stops at `horizon` or once the two beliefs coincide.
pub fn simulate_bias_gap(
    instance: &RestlessInstance,
    policy: &TablePolicy,
    z: &BeliefState,
    j: usize,
    k: usize,
    horizon: u64,
    seed: u64,
) -> Result<BiasGapSample, CouplingError> {
    let m = instance.num_states();
    for s in [j, k] {
        if s >= m {
            return Err(CouplingError::StateOutOfRange { k: s, len: m });
        }
    }
    if z.arms().len() != instance.num_arms() {
        return Err(CouplingError::Shape);
    }
    let tau_max = policy.table().tau_max();
    let focal = policy
        .table()
        .action_for(z)
        .unwrap_or_else(|| policy.action_at(&tracker_from(z)));
    let mut real = tracker_from(&z.successor(focal, j, tau_max));
    let mut virt = tracker_from(&z.successor(focal, k, tau_max));
    let mut powers: Vec<PowerCache> = instance
        .arms()
        .iter()
        .map(|a| PowerCache::new(a.chain.clone()))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut difference = 0.0;
    for t in 0..horizon {
        if real == virt {
            return Ok(BiasGapSample {
                difference,
                coalesced_at: Some(t),
            });
        }
        let arm = policy.action_at(&virt);
        let tau = virt.elapsed(arm) as usize;
        if arm != focal {
            let v = powers[arm].row(virt.last_state(arm), tau);
            let s = sample(v, &mut rng);
            real.record(arm, s);
            virt.record(arm, s);
            continue;
        }
        let v_prime = powers[arm].row(real.last_state(arm), tau).to_vec();
        let v = powers[arm].row(virt.last_state(arm), tau);
        let ordered = if k <= j {
            prefix_dominates(v, &v_prime)?
        } else {
            prefix_dominates(&v_prime, v)?
        };
        if !ordered {
            return Err(CouplingError::NotDominated { t, arm });
        }
        let s_real = sample(&v_prime, &mut rng);
        let s_virt = correspond(v, &v_prime, s_real, &mut rng)?;
        let r = &instance.arm(arm).rewards;
        difference += r[s_real] - r[s_virt];
        real.record(arm, s_real);
        virt.record(arm, s_virt);
    }
    Ok(BiasGapSample {
        difference,
        coalesced_at: None,
    })
}

/// Mean of `reps` independent [`simulate_bias_gap`] runs.
#[allow(clippy::too_many_arguments)]
pub fn estimate_bias_gap(
    instance: &RestlessInstance,
    policy: &TablePolicy,
    z: &BeliefState,
    j: usize,
    k: usize,
    horizon: u64,
    reps: u64,
    seed: u64,
) -> Result<BiasGapEstimate, CouplingError> {
    assert!(reps >= 2, "need at least two runs for a standard error");
    let mut xs = Vec::with_capacity(reps as usize);
    let mut uncoalesced = 0;
    for r in 0..reps {
        let s = simulate_bias_gap(instance, policy, z, j, k, horizon, seed.wrapping_add(r))?;
        if s.coalesced_at.is_none() {
            uncoalesced += 1;
        }
        xs.push(s.difference);
    }
    let n = reps as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(BiasGapEstimate {
        mean,
        std_error: (var / n).sqrt(),
        reps,
        uncoalesced,
    })
}
