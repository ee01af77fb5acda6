use super::{MdpError, PolicyTable, TruncatedBeliefMdp};

/// Relative value iteration settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RviConfig {
    /// Stop once the span of the Bellman residual drops below this.
    pub epsilon: f64,
    pub max_iterations: usize,
}

impl Default for RviConfig {
    fn default() -> Self {
        RviConfig {
            epsilon: 1e-9,
            max_iterations: 1_000_000,
        }
    }
}

// Near-equal action values resolve to the lower arm index.
const TIE_TOLERANCE: f64 = 1e-12;

/// Average-reward solve of a truncated belief MDP.
///
/// Iterates `W = T V` with `T V(z) = max_a [r(z, a) + Σ p V(z')]`, then
/// re-centres at the initial belief. The Bellman residual `W - V` brackets
/// the optimal gain: `min(W - V) <= g* <= max(W - V)`; the returned gain
/// is the midpoint of the final bracket, so it is within `epsilon / 2` of
/// the truncated MDP's optimum.
pub fn relative_value_iteration(
    mdp: &TruncatedBeliefMdp,
    config: &RviConfig,
) -> Result<PolicyTable, MdpError> {
    relative_value_iteration_traced(mdp, config).map(|(table, _)| table)
}

/// Same as [`relative_value_iteration`], also returning the residual span
/// of every iteration.
pub fn relative_value_iteration_traced(
    mdp: &TruncatedBeliefMdp,
    config: &RviConfig,
) -> Result<(PolicyTable, Vec<f64>), MdpError> {
    if config.epsilon.is_nan() || config.epsilon <= 0.0 {
        return Err(MdpError::Epsilon(config.epsilon));
    }
    let ns = mdp.num_states();
    let na = mdp.num_arms();
    let mut v = vec![0.0; ns];
    let mut w = vec![0.0; ns];
    let mut actions = vec![0usize; ns];
    let mut spans = Vec::new();

    for _ in 0..config.max_iterations {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for z in 0..ns {
            let mut best = f64::NEG_INFINITY;
            let mut best_arm = 0;
            let mut max_q = f64::NEG_INFINITY;
            for a in 0..na {
                let q = mdp.reward(z, a)
                    + mdp
                        .transitions(z, a)
                        .iter()
                        .map(|&(j, p)| p * v[j])
                        .sum::<f64>();
                if q > best + TIE_TOLERANCE {
                    best = q;
                    best_arm = a;
                }
                max_q = max_q.max(q);
            }
            w[z] = max_q;
            actions[z] = best_arm;
            let diff = max_q - v[z];
            lo = lo.min(diff);
            hi = hi.max(diff);
        }
        let span = hi - lo;
        spans.push(span);
        let reference = w[0];
        if span < config.epsilon {
            let bias = w.iter().map(|x| x - reference).collect();
            let gain = 0.5 * (lo + hi);
            let table = PolicyTable::from_parts(
                mdp.states().to_vec(),
                mdp.index_map().clone(),
                actions,
                gain,
                bias,
                config.epsilon,
                mdp.tau_max(),
            );
            return Ok((table, spans));
        }
        for (dst, src) in v.iter_mut().zip(&w) {
            *dst = src - reference;
        }
    }
    Err(MdpError::NonConvergence {
        iterations: config.max_iterations,
        span: spans.last().copied().unwrap_or(f64::INFINITY),
    })
}
