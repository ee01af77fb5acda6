use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{OracleKind, SolvedOracle};
use crate::belief::{BeliefTracker, SolveSettings};
use crate::chain::{Arm, BirthDeathChain, PowerCache, RestlessInstance};
use crate::env::{Action, Observation};
use crate::policy::{GameSpec, Policy, PolicyError};

/// Exact posterior over a finite set of candidate chains for one arm.
#[derive(Debug, Clone)]
pub struct DiscretePosterior {
    candidates: Vec<BirthDeathChain>,
    log_weights: Vec<f64>,
    powers: Vec<PowerCache>,
}

/// Largest gap kept exactly in multi-step likelihoods; longer gaps use the
/// stationary row.
const LIKELIHOOD_POWER_CAP: usize = 512;

impl DiscretePosterior {
    /// Uniform prior over `candidates`.
    pub fn uniform(candidates: Vec<BirthDeathChain>) -> Self {
        let n = candidates.len();
        DiscretePosterior {
            candidates,
            log_weights: vec![0.0; n],
            powers: Vec::new(),
        }
    }

    pub fn candidates(&self) -> &[BirthDeathChain] {
        &self.candidates
    }

    /// Multiplies in the likelihood of one transition `from -> to`.
    pub fn update(&mut self, from: usize, to: usize) {
        for (w, c) in self.log_weights.iter_mut().zip(&self.candidates) {
            *w += c.prob(from, to).ln();
        }
    }

    /// Multiplies in the likelihood of seeing `to` exactly `tau` steps
    /// after `from`.
    pub fn update_after(&mut self, from: usize, to: usize, tau: usize) {
        if tau == 1 {
            return self.update(from, to);
        }
        if self.powers.is_empty() {
            self.powers = self
                .candidates
                .iter()
                .map(|c| PowerCache::with_cap(c.clone(), LIKELIHOOD_POWER_CAP))
                .collect();
        }
        for (w, cache) in self.log_weights.iter_mut().zip(&mut self.powers) {
            *w += cache.row(from, tau)[to].ln();
        }
    }

    /// Normalized posterior masses. A posterior that has ruled out every
    /// candidate falls back to uniform.
    pub fn probabilities(&self) -> Vec<f64> {
        let max = self
            .log_weights
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        if !max.is_finite() {
            let n = self.candidates.len() as f64;
            return vec![1.0 / n; self.candidates.len()];
        }
        let w: Vec<f64> = self.log_weights.iter().map(|l| (l - max).exp()).collect();
        let total: f64 = w.iter().sum();
        w.into_iter().map(|x| x / total).collect()
    }

    /// Index of a candidate drawn from the posterior.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let p = self.probabilities();
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (i, pi) in p.iter().enumerate() {
            acc += pi;
            if u < acc {
                return i;
            }
        }
        p.len() - 1
    }
}

/// How the sampled instances get their rewards.
#[derive(Debug, Clone, PartialEq)]
pub enum RewardKnowledge {
    /// `rewards[arm][state]` known in advance.
    Known(Vec<Vec<f64>>),
    /// Posterior mean under a uniform prior on each Bernoulli mean.
    Estimated,
}

/// Which observations feed the transition posteriors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransitionEvidence {
    /// Every return to an arm, through the `tau`-step likelihood. This is
    /// the exact posterior given the observation history.
    #[default]
    AllReturns,
    /// Only pulls of the same arm on consecutive steps. An arm whose
    /// sampled policy never repeats it can then stay unlearned for good.
    Consecutive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThompsonConfig {
    /// Candidate chains per arm.
    pub candidates: Vec<Vec<BirthDeathChain>>,
    pub rewards: RewardKnowledge,
    /// Length of the first episode; each next one is twice as long.
    pub first_episode: u64,
    pub evidence: TransitionEvidence,
    pub oracle: OracleKind,
    pub solve: SolveSettings,
}

impl ThompsonConfig {
    /// Two-state candidates `(P(0,0), P(1,1))` over `values x values`,
    /// the same grid for every arm.
    pub fn product_grid(
        values: &[f64],
        num_arms: usize,
        rewards: RewardKnowledge,
    ) -> Result<Self, PolicyError> {
        let mut grid = Vec::with_capacity(values.len() * values.len());
        for &a in values {
            for &b in values {
                grid.push(BirthDeathChain::two_state(a, b)?);
            }
        }
        Ok(ThompsonConfig {
            candidates: vec![grid; num_arms],
            rewards,
            first_episode: 100,
            evidence: TransitionEvidence::default(),
            oracle: OracleKind::Exact,
            solve: SolveSettings::default(),
        })
    }
}

/// Posterior sampling with doubling episodes.
///
/// At the start of each episode one chain per arm is drawn from the
/// posterior, the resulting instance is solved offline, and its policy is
/// followed until the episode ends. See [`TransitionEvidence`] for what
/// the posteriors learn from.
#[derive(Debug, Clone)]
pub struct ThompsonSampling {
    config: ThompsonConfig,
    cache: HashMap<Vec<usize>, SolvedOracle>,
    state: Option<Running>,
}

#[derive(Debug, Clone)]
struct Running {
    rng: ChaCha8Rng,
    initial_states: Vec<usize>,
    posteriors: Vec<DiscretePosterior>,
    reward_sum: Vec<Vec<f64>>,
    reward_count: Vec<Vec<u64>>,
    tracker: BeliefTracker,
    last_pull: Option<(usize, usize)>,
    steps: u64,
    episode_end: u64,
    episode_len: u64,
    current: Vec<usize>,
    episodes: u64,
}

impl ThompsonSampling {
    pub fn new(config: ThompsonConfig) -> Self {
        ThompsonSampling {
            config,
            cache: HashMap::new(),
            state: None,
        }
    }

    pub fn posteriors(&self) -> Option<&[DiscretePosterior]> {
        self.state.as_ref().map(|s| s.posteriors.as_slice())
    }

    /// Candidate indices of the instance played in the current episode.
    pub fn current_sample(&self) -> Option<&[usize]> {
        self.state.as_ref().map(|s| s.current.as_slice())
    }

    pub fn episodes(&self) -> u64 {
        self.state.as_ref().map_or(0, |s| s.episodes)
    }

    fn rewards_for(&self, st: &Running) -> Vec<Vec<f64>> {
        match &self.config.rewards {
            RewardKnowledge::Known(r) => r.clone(),
            RewardKnowledge::Estimated => st
                .reward_sum
                .iter()
                .zip(&st.reward_count)
                .map(|(s, c)| {
                    s.iter()
                        .zip(c)
                        .map(|(x, &n)| (x + 1.0) / (n as f64 + 2.0))
                        .collect()
                })
                .collect(),
        }
    }

    fn start_episode(&mut self) -> Result<(), PolicyError> {
        let mut st = self.state.take().ok_or(PolicyError::NotReset)?;
        let pick: Vec<usize> = st
            .posteriors
            .iter()
            .map(|p| p.sample(&mut st.rng))
            .collect();
        // With estimated rewards the instance changes even for a repeated pick.
        let cacheable = matches!(self.config.rewards, RewardKnowledge::Known(_));
        if !cacheable || !self.cache.contains_key(&pick) {
            let rewards = self.rewards_for(&st);
            let arms = pick
                .iter()
                .zip(&self.config.candidates)
                .zip(rewards)
                .map(|((&c, grid), r)| Arm::new(grid[c].clone(), r))
                .collect::<Result<Vec<_>, _>>();
            let solved = arms
                .and_then(|arms| RestlessInstance::new(arms, st.initial_states.clone()))
                .map_err(PolicyError::from)
                .and_then(|inst| {
                    SolvedOracle::solve(&inst, self.config.oracle, &self.config.solve)
                });
            match solved {
                Ok(o) => {
                    if !cacheable {
                        self.cache.clear();
                    }
                    self.cache.insert(pick.clone(), o);
                }
                Err(e) => {
                    self.state = Some(st);
                    return Err(e);
                }
            }
        }
        st.current = pick;
        st.episodes += 1;
        self.state = Some(st);
        Ok(())
    }
}

impl Policy for ThompsonSampling {
    fn name(&self) -> String {
        let cells = self.config.candidates.first().map_or(0, Vec::len);
        format!("thompson-{cells}")
    }

    fn reset(&mut self, game: &GameSpec, seed: u64) -> Result<(), PolicyError> {
        if self.config.candidates.len() != game.num_arms {
            return Err(PolicyError::GridShape {
                expected: game.num_arms,
                got: self.config.candidates.len(),
            });
        }
        for (arm, grid) in self.config.candidates.iter().enumerate() {
            if grid.is_empty() {
                return Err(PolicyError::EmptyGrid { arm });
            }
            if let Some(c) = grid.iter().find(|c| c.num_states() != game.num_states) {
                return Err(PolicyError::GridShape {
                    expected: game.num_states,
                    got: c.num_states(),
                });
            }
        }
        if let RewardKnowledge::Known(r) = &self.config.rewards {
            if r.len() != game.num_arms {
                return Err(PolicyError::GridShape {
                    expected: game.num_arms,
                    got: r.len(),
                });
            }
        } else {
            self.cache.clear();
        }
        let first = self.config.first_episode.max(1);
        self.state = Some(Running {
            rng: ChaCha8Rng::seed_from_u64(seed),
            initial_states: game.initial_states.clone(),
            posteriors: self
                .config
                .candidates
                .iter()
                .cloned()
                .map(DiscretePosterior::uniform)
                .collect(),
            reward_sum: vec![vec![0.0; game.num_states]; game.num_arms],
            reward_count: vec![vec![0; game.num_states]; game.num_arms],
            tracker: BeliefTracker::new(&game.initial_states),
            last_pull: None,
            steps: 0,
            episode_end: first,
            episode_len: first,
            current: Vec::new(),
            episodes: 0,
        });
        self.start_episode()
    }

    fn choose(&self, _t: u64) -> Action {
        let Some(st) = &self.state else {
            return Action::Idle;
        };
        match self.cache.get(&st.current) {
            Some(o) => Action::Pull(o.act(&st.tracker)),
            None => Action::Idle,
        }
    }

    fn observe(&mut self, obs: &Observation) -> Result<(), PolicyError> {
        let st = self.state.as_mut().ok_or(PolicyError::NotReset)?;
        let pulled = match (obs.action, obs.observed_state) {
            (Action::Pull(i), Some(s)) => Some((i, s)),
            _ => None,
        };
        match self.config.evidence {
            TransitionEvidence::Consecutive => {
                if let (Some((i, s)), Some((prev_arm, prev_state))) = (pulled, st.last_pull) {
                    if i == prev_arm {
                        st.posteriors[i].update(prev_state, s);
                    }
                }
            }
            TransitionEvidence::AllReturns => {
                if let Some((i, s)) = pulled {
                    let tau = st.tracker.elapsed(i);
                    if tau >= 1 {
                        let tau = usize::try_from(tau).unwrap_or(usize::MAX);
                        st.posteriors[i].update_after(st.tracker.last_state(i), s, tau);
                    }
                }
            }
        }
        st.tracker.observe(obs);
        if let Some((i, s)) = pulled {
            st.reward_sum[i][s] += obs.reward;
            st.reward_count[i][s] += 1;
        }
        st.last_pull = pulled;
        st.steps += 1;
        if st.steps >= st.episode_end {
            st.episode_len = st.episode_len.saturating_mul(2);
            st.episode_end = st.episode_end.saturating_add(st.episode_len);
            self.start_episode()?;
        }
        Ok(())
    }
}
