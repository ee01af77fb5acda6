use std::path::Path;

use restless_ucb::{Arm, BirthDeathChain, ChainError, RestlessInstance};

use crate::BenchError;

/// Names accepted by [`builtin_instance`].
pub const BUILTIN_NAMES: [&str; 2] = ["paper-1", "paper-2"];

fn two_state_arm(stay_good: f64, stay_bad: f64, reward_good: f64) -> Result<Arm, ChainError> {
    Arm::new(
        BirthDeathChain::two_state(stay_good, stay_bad)?,
        vec![reward_good, 0.0],
    )
}

/// The two constructed two-arm, two-state instances. Every chain starts in
/// the bad state (state 1) and the bad state pays nothing.
pub fn builtin_instance(name: &str) -> Result<RestlessInstance, BenchError> {
    let arms = match name {
        "paper-1" => vec![two_state_arm(0.7, 0.8, 1.0)?, two_state_arm(0.5, 0.6, 0.8)?],
        "paper-2" => vec![two_state_arm(0.7, 0.9, 0.8)?, two_state_arm(0.7, 0.5, 0.4)?],
        _ => return Err(BenchError::UnknownInstance(name.to_string())),
    };
    Ok(RestlessInstance::new(arms, vec![1, 1])?)
}

/// Builtin name, or else a path to an instance TOML file.
pub fn resolve_instance(reference: &str) -> Result<RestlessInstance, BenchError> {
    if BUILTIN_NAMES.contains(&reference) {
        return builtin_instance(reference);
    }
    let path = Path::new(reference);
    if path.exists() {
        return Ok(RestlessInstance::load(path)?);
    }
    Err(BenchError::UnknownInstance(reference.to_string()))
}

/// Two-state instance with `n` arms for the timing benchmark: the arms of
/// `paper-1` followed by copies of a third, slower-mixing arm with smaller
/// rewards.
pub fn timing_instance(n: usize) -> Result<RestlessInstance, BenchError> {
    assert!(n >= 1, "need at least one arm");
    let extra = [0.9, 0.7, 0.6];
    let mut arms = builtin_instance("paper-1")?.arms().to_vec();
    arms.truncate(n);
    for i in arms.len()..n {
        arms.push(two_state_arm(0.6, 0.7, extra[(i - 2) % extra.len()])?);
    }
    Ok(RestlessInstance::new(arms, vec![1; n])?)
}
