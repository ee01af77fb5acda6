//! Numeric checks of the dominance and coupling properties the regret
//! analysis relies on, collected into one JSON report.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use restless_ucb::belief::BeliefState;
use restless_ucb::coupling::{correspond, correspond_probabilities, estimate_bias_gap};
use restless_ucb::policies::{
    build_optimistic_instance, empirical_estimates, oracle_replay, ConfidenceRadius,
    EmpiricalStats, ExplorationSchedule,
};
use restless_ucb::{
    prefix_dominates, simulate_dominance, validate_assumptions, Arm, BirthDeathChain, Env,
    RestlessInstance, SolveSettings,
};

use crate::{instances, BenchError};

/// Tolerance on every inequality checked here.
pub const CHECK_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    /// Instance for the instance-specific checks.
    pub instance: String,
    pub seed: u64,
    pub c1: f64,
    pub tau_max: Option<usize>,
    pub random_instances: usize,
    pub max_states: usize,
    pub max_arms: usize,
    pub vectors_per_arm: usize,
    pub max_power: usize,
    pub correspond_triples: usize,
    pub correspond_draws: u64,
    pub dominance_trials: u64,
    pub event_horizon: u64,
    pub event_runs: u64,
    pub coupling_delta: f64,
    pub coupling_steps: u64,
    pub coupling_seeds: u64,
    pub bias_triples: usize,
    pub bias_horizon: u64,
    pub bias_reps: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            instance: "paper-1".into(),
            seed: 0,
            c1: 0.05,
            tau_max: None,
            random_instances: 1000,
            max_states: 6,
            max_arms: 3,
            vectors_per_arm: 4,
            max_power: 50,
            correspond_triples: 50,
            correspond_draws: 1_000_000,
            dominance_trials: 1_000_000,
            event_horizon: 1_000_000,
            event_runs: 200,
            coupling_delta: 0.02,
            coupling_steps: 100_000,
            coupling_seeds: 20,
            bias_triples: 100,
            bias_horizon: 10_000,
            bias_reps: 100,
        }
    }
}

impl VerifyConfig {
    /// A configuration small enough for unit tests and smoke runs.
    pub fn quick() -> Self {
        VerifyConfig {
            random_instances: 100,
            correspond_triples: 10,
            correspond_draws: 100_000,
            dominance_trials: 100_000,
            event_horizon: 100_000,
            event_runs: 20,
            coupling_steps: 10_000,
            coupling_seeds: 4,
            bias_triples: 10,
            bias_horizon: 2_000,
            bias_reps: 50,
            ..Self::default()
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self, BenchError> {
        toml::from_str(text).map_err(|e| BenchError::Config(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub status: CheckStatus,
    pub trials: u64,
    pub violations: u64,
    /// Largest observed value of the checked statistic minus its bound;
    /// negative means every trial had room to spare.
    pub worst_excess: f64,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &str, trials: u64, violations: u64, worst_excess: f64, detail: String) -> Self {
        CheckResult {
            name: name.into(),
            status: if violations == 0 {
                CheckStatus::Pass
            } else {
                CheckStatus::Fail
            },
            trials,
            violations,
            worst_excess,
            detail,
        }
    }

    fn skipped(name: &str, why: &str) -> Self {
        CheckResult {
            name: name.into(),
            status: CheckStatus::Skipped,
            trials: 0,
            violations: 0,
            worst_excess: 0.0,
            detail: why.into(),
        }
    }

    pub fn passed(&self) -> bool {
        self.status != CheckStatus::Fail
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub instance: String,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

impl VerificationReport {
    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, BenchError> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Running count of trials, violations and the worst excess.
#[derive(Debug, Clone, Copy)]
struct Tally {
    trials: u64,
    violations: u64,
    worst: f64,
}

impl Tally {
    fn new() -> Self {
        Tally {
            trials: 0,
            violations: 0,
            worst: f64::NEG_INFINITY,
        }
    }

    /// Records one trial whose statistic exceeds its bound by `excess`.
    fn record(&mut self, excess: f64) {
        self.trials += 1;
        if excess > CHECK_SLACK {
            self.violations += 1;
        }
        if excess > self.worst {
            self.worst = excess;
        }
    }

    fn finish(self, name: &str, detail: impl Into<String>) -> CheckResult {
        CheckResult::new(
            name,
            self.trials,
            self.violations,
            self.worst,
            detail.into(),
        )
    }
}

/// Largest amount by which a prefix sum of `w` exceeds that of `v`
/// (positive iff `v ≳ w` fails beyond rounding).
pub fn dominance_excess(v: &[f64], w: &[f64]) -> f64 {
    let (mut sv, mut sw, mut worst) = (0.0, 0.0, f64::NEG_INFINITY);
    for (a, b) in v.iter().zip(w) {
        sv += a;
        sw += b;
        worst = f64::max(worst, sw - sv);
    }
    worst
}

fn max_abs_diff(v: &[f64], w: &[f64]) -> f64 {
    v.iter()
        .zip(w)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

fn vec_times(v: &[f64], chain: &BirthDeathChain) -> Vec<f64> {
    let mut out = vec![0.0; v.len()];
    chain.step_into(v, &mut out);
    out
}

/// Random birth-death chain on `m` states whose transitions satisfy the
/// positive-correlation and minimum-probability conditions with `c1`.
pub fn random_chain<R: Rng + ?Sized>(rng: &mut R, m: usize, c1: f64) -> BirthDeathChain {
    loop {
        let mut up = Vec::with_capacity(m - 1);
        let mut down = Vec::with_capacity(m - 1);
        for _ in 0..m - 1 {
            up.push(rng.random_range(c1..1.0 - 2.0 * c1));
            down.push(rng.random_range(c1..1.0 - 2.0 * c1));
        }
        let Ok(chain) = BirthDeathChain::new(up, down) else {
            continue;
        };
        let arm = Arm::new(chain.clone(), vec![0.0; m]).expect("zero rewards");
        let inst = RestlessInstance::new(vec![arm], vec![0]).expect("one arm");
        if validate_assumptions(&inst, c1).passed() {
            return chain;
        }
    }
}

/// Random probability vector, sometimes with zero entries.
pub fn random_prob_vector<R: Rng + ?Sized>(rng: &mut R, m: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..m)
        .map(|_| {
            if rng.random_bool(0.15) {
                0.0
            } else {
                -(1.0 - rng.random::<f64>()).ln()
            }
        })
        .collect();
    if v.iter().all(|&x| x == 0.0) {
        v[rng.random_range(0..m)] = 1.0;
    }
    let total: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= total);
    v
}

/// `w` obtained from `v` by moving mass toward higher states, so `v ≳ w`.
pub fn random_worse<R: Rng + ?Sized>(rng: &mut R, v: &[f64]) -> Vec<f64> {
    let mut w = v.to_vec();
    for k in 0..w.len() - 1 {
        let moved = rng.random::<f64>() * w[k];
        w[k] -= moved;
        w[k + 1] += moved;
    }
    w
}

/// Prefix-dominance properties of random chains and their optimistic
/// shifts.
pub fn property_checks(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> Vec<CheckResult> {
    let mut a1 = Tally::new();
    let mut a2 = Tally::new();
    let mut a3 = Tally::new();
    let mut a4 = Tally::new();
    let mut a5 = Tally::new();
    let mut a8 = Tally::new();
    let mut mixing = Tally::new();
    for _ in 0..cfg.random_instances {
        let m = rng.random_range(2..=cfg.max_states.max(2));
        let n = rng.random_range(1..=cfg.max_arms.max(1));
        for _ in 0..n {
            let p = random_chain(rng, m, cfg.c1);
            let delta = rng.random_range(1e-4..=cfg.c1 / 3.0);
            let q = p.shifted_toward_low(delta);
            for k in 0..m {
                a1.record(dominance_excess(&q.row(k), &p.row(k)));
            }
            for k in 0..m - 1 {
                a2.record(dominance_excess(&p.row(k), &p.row(k + 1)));
            }
            let lambda = p.slem().unwrap_or(1.0).max(q.slem().unwrap_or(1.0));
            for _ in 0..cfg.vectors_per_arm {
                let v = random_prob_vector(rng, m);
                let w = random_worse(rng, &v);
                a3.record(dominance_excess(&vec_times(&v, &q), &vec_times(&v, &p)));
                a4.record(dominance_excess(&vec_times(&v, &p), &vec_times(&w, &p)));
                // v Q^tau vs w P^tau, and v P^tau vs v Q^tau
                let (mut vq, mut wp, mut vp) = (v.clone(), w.clone(), v.clone());
                for tau in 1..=cfg.max_power {
                    vq = vec_times(&vq, &q);
                    wp = vec_times(&wp, &p);
                    vp = vec_times(&vp, &p);
                    a5.record(dominance_excess(&vq, &wp));
                    let gap = max_abs_diff(&vp, &vq);
                    a8.record(gap - 2.0 * tau as f64 * delta);
                    let limit = 2.0 * m as f64 * delta / (1.0 - lambda)
                        + 4.0 * m as f64 * lambda.powi(tau as i32);
                    mixing.record(gap - limit.min(2.0 * tau as f64 * delta));
                }
            }
        }
    }
    vec![
        a1.finish(
            "shifted-rows",
            "optimistic rows dominate the original rows",
        ),
        a2.finish("row-order", "row k dominates row k+1"),
        a3.finish("shifted-step", "vP' dominates vP"),
        a4.finish("monotone-step", "v ≳ w implies vP ≳ wP"),
        a5.finish("power-dominance", "v ≳ w implies vP'^tau ≳ wP^tau"),
        a8.finish(
            "perturbed-power",
            "|vP^tau - vP'^tau|_inf <= 2 tau delta",
        ),
        mixing.finish(
            "perturbed-power-mixing",
            "|vP^tau - vP'^tau|_inf <= min(2 tau delta, 2 M delta/(1-lambda) + 4 M lambda^tau)",
        ),
    ]
}

/// Marginal law and order preservation of the correspond coupling.
pub fn correspond_checks(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> Vec<CheckResult> {
    let mut marginal = Tally::new();
    let mut conditional = Tally::new();
    for t in 0..cfg.correspond_triples {
        let m = rng.random_range(2..=cfg.max_states.max(2));
        let v_prime = random_prob_vector(rng, m);
        // half the pairs dominated, half arbitrary
        let v = if t % 2 == 0 {
            random_worse(rng, &v_prime)
        } else {
            random_prob_vector(rng, m)
        };
        let mut counts = vec![0u64; m];
        for _ in 0..cfg.correspond_draws {
            let k = sample(&v_prime, rng);
            counts[correspond(&v, &v_prime, k, rng).expect("k has mass")] += 1;
        }
        let tv = tv_distance(&counts, &v);
        marginal.record(tv - 0.01);
        let k = loop {
            let k = rng.random_range(0..m);
            if v_prime[k] > 0.0 {
                break k;
            }
        };
        let exact = correspond_probabilities(&v, &v_prime, k).expect("k has mass");
        let mut counts = vec![0u64; m];
        for _ in 0..cfg.correspond_draws {
            counts[correspond(&v, &v_prime, k, rng).expect("k has mass")] += 1;
        }
        conditional.record(tv_distance(&counts, &exact) - 0.01);
    }
    let mut order = Tally::new();
    let mut dominated_pairs = 0;
    while order.trials < cfg.dominance_trials {
        let m = rng.random_range(2..=cfg.max_states.max(2));
        let v_prime = random_prob_vector(rng, m);
        let v = random_worse(rng, &v_prime);
        if !prefix_dominates(&v_prime, &v).expect("same length") {
            continue;
        }
        dominated_pairs += 1;
        for _ in 0..100 {
            let k = sample(&v_prime, rng);
            let j = correspond(&v, &v_prime, k, rng).expect("k has mass");
            order.record(if j < k { 1.0 } else { -1.0 });
        }
    }
    vec![
        marginal.finish(
            "correspond-marginal",
            format!(
                "TV(law of output, v) <= 0.01 with k ~ v', {} draws per pair",
                cfg.correspond_draws
            ),
        ),
        conditional.finish(
            "correspond-conditional",
            "empirical law given k matches the exact coupling within TV 0.01",
        ),
        order.finish(
            "correspond-dominance",
            format!("output >= k whenever v' ≳ v, over {dominated_pairs} pairs"),
        ),
    ]
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
    // rounding: last state with mass
    p.iter().rposition(|&x| x > 0.0).unwrap_or(p.len() - 1)
}

fn tv_distance(counts: &[u64], p: &[f64]) -> f64 {
    let n: u64 = counts.iter().sum();
    0.5 * counts
        .iter()
        .zip(p)
        .map(|(&c, &q)| (c as f64 / n as f64 - q).abs())
        .sum::<f64>()
}

/// Statistics of one exploration phase.
#[derive(Debug, Clone)]
pub struct ExplorationRun {
    pub steps: u64,
    pub stats: EmpiricalStats,
}

/// Runs only the exploration phase to completion on a fresh environment.
pub fn exploration_run(
    instance: &RestlessInstance,
    m_target: u64,
    seed: u64,
) -> Result<ExplorationRun, BenchError> {
    let mut env = Env::reset(instance, seed).map_err(|e| BenchError::Replication {
        rep: 0,
        source: e.into(),
    })?;
    let mut schedule =
        ExplorationSchedule::new(instance.num_arms(), instance.num_states(), m_target);
    while let Some(action) = schedule.next_action() {
        let obs = env.step(action).expect("valid action");
        schedule.record(&obs);
    }
    Ok(ExplorationRun {
        steps: env.t(),
        stats: schedule.stats().clone(),
    })
}

/// Largest deviation of the estimates from the truth.
pub fn estimate_error(
    instance: &RestlessInstance,
    stats: &EmpiricalStats,
) -> Result<f64, BenchError> {
    let (chains, rewards) =
        empirical_estimates(stats).map_err(|source| BenchError::Replication { rep: 0, source })?;
    let m = instance.num_states();
    let mut worst: f64 = 0.0;
    for (i, arm) in instance.arms().iter().enumerate() {
        for (j, (r_hat, r)) in rewards[i].iter().zip(&arm.rewards).enumerate() {
            for k in j.saturating_sub(1)..(j + 2).min(m) {
                worst = worst.max((chains[i].prob(j, k) - arm.chain.prob(j, k)).abs());
            }
            worst = worst.max((r_hat - r).abs());
        }
    }
    Ok(worst)
}

/// Confidence-event frequency, optimistic-row dominance and gain ordering over
/// repeated exploration phases.
pub fn event_checks(
    cfg: &VerifyConfig,
    instance: &RestlessInstance,
) -> Result<Vec<CheckResult>, BenchError> {
    let horizon = cfg.event_horizon;
    let m = (horizon as f64).powf(2.0 / 3.0).ceil() as u64;
    let radius = ConfidenceRadius::new(horizon, m);
    let settings = SolveSettings {
        tau_max: cfg.tau_max,
        ..SolveSettings::default()
    };
    let truth = settings.solve(instance)?;
    let mut failures = 0u64;
    let mut rows_hat = Tally::new();
    let mut rows_true = Tally::new();
    let mut gains = Tally::new();
    for run in 0..cfg.event_runs {
        let ex = exploration_run(instance, m, cfg.seed.wrapping_add(run))?;
        let err = estimate_error(instance, &ex.stats)?;
        let holds = err <= radius.rad;
        if !holds {
            failures += 1;
        }
        let (chains, rewards) = empirical_estimates(&ex.stats).expect("complete exploration");
        let optimistic =
            build_optimistic_instance(&chains, &rewards, radius.rad, instance.initial_states())?;
        for (i, arm) in optimistic.arms().iter().enumerate() {
            for k in 0..instance.num_states() {
                rows_hat.record(dominance_excess(&arm.chain.row(k), &chains[i].row(k)));
                if holds {
                    rows_true.record(dominance_excess(
                        &arm.chain.row(k),
                        &instance.arm(i).chain.row(k),
                    ));
                }
            }
        }
        if holds {
            let table = settings.solve(&optimistic)?;
            gains.record(truth.gain() - 2.0 * truth.epsilon() - table.gain());
        }
    }
    let n = cfg.event_runs as f64;
    let rate = failures as f64 / n;
    let bound = 8.0 * (instance.num_arms() * instance.num_states()) as f64 / horizon as f64;
    let se = (rate * (1.0 - rate) / n).sqrt();
    Ok(vec![
        CheckResult::new(
            "confidence-event-frequency",
            cfg.event_runs,
            u64::from(rate > bound + 3.0 * se),
            rate - (bound + 3.0 * se),
            format!(
                "{failures} of {} runs left the rad = {:.6} band (m = {m}); \
                 rate must be <= 8NM/T + 3 SE = {:.6}",
                cfg.event_runs,
                radius.rad,
                bound + 3.0 * se
            ),
        ),
        rows_hat.finish("optimistic-rows-vs-estimate", "P' rows dominate P-hat rows"),
        rows_true.finish(
            "optimistic-rows-vs-truth",
            "inside the confidence band, P' rows dominate true rows",
        ),
        gains.finish("gain-ordering", "inside the confidence band, gain(R') >= gain(R) - 2 epsilon"),
    ])
}

/// The shifted instance used by the coupling checks: every row moved
/// toward state 0 by `delta`, rewards raised by `delta`.
pub fn shifted_instance(
    instance: &RestlessInstance,
    delta: f64,
) -> Result<RestlessInstance, BenchError> {
    let chains: Vec<_> = instance.arms().iter().map(|a| a.chain.clone()).collect();
    let rewards: Vec<_> = instance.arms().iter().map(|a| a.rewards.clone()).collect();
    Ok(build_optimistic_instance(
        &chains,
        &rewards,
        delta,
        instance.initial_states(),
    )?)
}

/// Real-vs-virtual coupling on the shifted instance.
pub fn coupling_checks(
    cfg: &VerifyConfig,
    instance: &RestlessInstance,
) -> Result<Vec<CheckResult>, BenchError> {
    let settings = SolveSettings {
        tau_max: cfg.tau_max,
        ..SolveSettings::default()
    };
    let shifted = shifted_instance(instance, cfg.coupling_delta)?;
    let policy = oracle_replay(instance, &settings)
        .map_err(|source| BenchError::Replication { rep: 0, source })?;
    let mut states = Tally::new();
    let mut rewards = Tally::new();
    let mut precondition = 0u64;
    for s in 0..cfg.coupling_seeds {
        match simulate_dominance(
            instance,
            &shifted,
            &policy,
            cfg.coupling_steps,
            cfg.seed.wrapping_add(s),
        ) {
            Ok(trace) => {
                for step in &trace.steps {
                    states.record(step.real_state as f64 - step.virtual_state as f64);
                }
                rewards.record(trace.virtual_reward - trace.real_reward);
            }
            Err(restless_ucb::CouplingError::NotDominated { .. }) => {
                precondition += 1;
                rewards.record(f64::INFINITY);
            }
            Err(e) => return Err(e.into()),
        }
    }
    let g = settings.solve(instance)?;
    let g_shift = settings.solve(&shifted)?;
    let mut gain = Tally::new();
    gain.record(g.gain() - 2.0 * g.epsilon() - g_shift.gain());
    Ok(vec![
        states.finish(
            "coupling-state-order",
            format!(
                "virtual state >= real state at every pull, {} seeds x {} steps",
                cfg.coupling_seeds, cfg.coupling_steps
            ),
        ),
        rewards.finish(
            "coupling-reward-order",
            format!("real cumulative reward >= virtual on every run; {precondition} precondition failures"),
        ),
        gain.finish(
            "oracle-dominance",
            format!(
                "gain(R') = {:.9} >= gain(R) - 2 epsilon = {:.9}",
                g_shift.gain(),
                g.gain() - 2.0 * g.epsilon()
            ),
        ),
    ])
}

/// Bias-gap estimates on the optimistic instance built with the radius of
/// `event_horizon`.
pub fn bias_gap_check(
    cfg: &VerifyConfig,
    instance: &RestlessInstance,
    rng: &mut ChaCha8Rng,
) -> Result<CheckResult, BenchError> {
    let m_states = instance.num_states();
    if m_states < 2 {
        return Ok(CheckResult::skipped("bias-gap", "needs two or more states"));
    }
    let horizon = cfg.event_horizon;
    let m = (horizon as f64).powf(2.0 / 3.0).ceil() as u64;
    let rad = ConfidenceRadius::new(horizon, m).rad;
    let shifted = shifted_instance(instance, rad)?;
    let settings = SolveSettings {
        tau_max: cfg.tau_max,
        ..SolveSettings::default()
    };
    let policy = oracle_replay(&shifted, &settings)
        .map_err(|source| BenchError::Replication { rep: 0, source })?;
    let lambda = shifted.lambda_max()?;
    let bound = 2.0 * m_states as f64 / (1.0 - lambda);
    let states: Vec<BeliefState> = policy.table().states().to_vec();
    let mut tally = Tally::new();
    let mut largest: f64 = 0.0;
    for t in 0..cfg.bias_triples {
        let z = &states[rng.random_range(0..states.len())];
        let k = rng.random_range(0..m_states - 1);
        let j = rng.random_range(k + 1..m_states);
        let est = estimate_bias_gap(
            &shifted,
            &policy,
            z,
            j,
            k,
            cfg.bias_horizon,
            cfg.bias_reps,
            cfg.seed.wrapping_add(1_000_003 * t as u64),
        )?;
        largest = largest.max(est.mean.abs());
        tally.record(est.mean.abs() - (bound + 3.0 * est.std_error));
    }
    Ok(tally.finish(
        "bias-gap",
        format!(
            "|mean gap| <= 2M/(1 - lambda_max) + 3 SE with bound {bound:.4}; largest |mean| {largest:.4}"
        ),
    ))
}

fn assumption_checks(instance: &RestlessInstance, c1: f64) -> Vec<CheckResult> {
    let report = validate_assumptions(instance, c1);
    let names = [
        "assumption-monotone-rewards",
        "assumption-birth-death",
        "assumption-positive-correlation",
        "assumption-min-probability",
    ];
    names
        .iter()
        .enumerate()
        .map(|(a, name)| {
            let failing: Vec<String> = report
                .arms
                .iter()
                .enumerate()
                .filter(|(_, r)| !r.checks()[a].passed())
                .map(|(i, r)| format!("arm {i}: {:?}", r.checks()[a]))
                .collect();
            CheckResult::new(
                name,
                report.arms.len() as u64,
                failing.len() as u64,
                0.0,
                if failing.is_empty() {
                    format!("all arms pass with c1 = {c1}")
                } else {
                    failing.join("; ")
                },
            )
        })
        .collect()
}

/// Runs the whole suite. Failures are report content, not errors.
pub fn verify_lemmas(cfg: &VerifyConfig) -> Result<VerificationReport, BenchError> {
    let instance = instances::resolve_instance(&cfg.instance)?;
    verify_instance(cfg, &instance)
}

pub fn verify_instance(
    cfg: &VerifyConfig,
    instance: &RestlessInstance,
) -> Result<VerificationReport, BenchError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut checks = assumption_checks(instance, cfg.c1);
    let valid = checks.iter().all(CheckResult::passed);
    checks.extend(property_checks(cfg, &mut rng));
    checks.extend(correspond_checks(cfg, &mut rng));
    if valid {
        checks.extend(event_checks(cfg, instance)?);
        checks.extend(coupling_checks(cfg, instance)?);
        checks.push(bias_gap_check(cfg, instance, &mut rng)?);
    } else {
        let why = "instance fails the assumption checks";
        for name in [
            "confidence-event-frequency",
            "optimistic-rows-vs-estimate",
            "optimistic-rows-vs-truth",
            "gain-ordering",
            "coupling-state-order",
            "coupling-reward-order",
            "oracle-dominance",
            "bias-gap",
        ] {
            checks.push(CheckResult::skipped(name, why));
        }
    }
    Ok(VerificationReport {
        instance: cfg.instance.clone(),
        seed: cfg.seed,
        passed: checks.iter().all(CheckResult::passed),
        checks,
    })
}
