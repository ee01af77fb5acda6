use crate::chain::{Arm, BirthDeathChain, ChainError, RestlessInstance};

/// How many completed visits per state the exploration phase collects.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExplorationTarget {
    /// `m(T) = ceil(T^exponent)`.
    Power(f64),
    Fixed(u64),
}

impl Default for ExplorationTarget {
    fn default() -> Self {
        ExplorationTarget::Power(2.0 / 3.0)
    }
}

impl ExplorationTarget {
    pub fn m(&self, horizon: u64) -> u64 {
        match *self {
            ExplorationTarget::Power(e) => ((horizon as f64).powf(e).ceil() as u64).max(1),
            ExplorationTarget::Fixed(m) => m.max(1),
        }
    }
}

/// Hoeffding radius `rad = sqrt(log T / (2 m))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfidenceRadius {
    pub m: u64,
    pub rad: f64,
}

impl ConfidenceRadius {
    /// Natural logarithm.
    pub fn new(horizon: u64, m: u64) -> Self {
        Self::with_log_base(horizon, m, std::f64::consts::E)
    }

    pub fn with_log_base(horizon: u64, m: u64, base: f64) -> Self {
        let log_t = (horizon as f64).ln() / base.ln();
        ConfidenceRadius {
            m,
            rad: (log_t / (2.0 * m as f64)).sqrt(),
        }
    }
}

/// Optimistic instance: every transition row moves `rad` of mass from its
/// up move to its down move (stay unchanged in interior rows, raised in
/// row 0, lowered in the top row), each shift clamped to keep entries in
/// `[0, 1]`; rewards become `min(r̂ + rad, 1)`.
///
/// Each row of the result prefix-dominates the matching row of the input.
pub fn build_optimistic_instance(
    chains: &[BirthDeathChain],
    rewards: &[Vec<f64>],
    rad: f64,
    initial_states: &[usize],
) -> Result<RestlessInstance, ChainError> {
    let arms = chains
        .iter()
        .zip(rewards)
        .map(|(chain, r)| {
            let shifted = chain.shifted_toward_low(rad);
            let r = r.iter().map(|x| (x + rad).min(1.0)).collect();
            Arm::new(shifted, r)
        })
        .collect::<Result<Vec<_>, _>>()?;
    RestlessInstance::new(arms, initial_states.to_vec())
}
