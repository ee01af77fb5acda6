use std::fs;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use restless_ucb::belief::{policy_gain, MdpError};
use restless_ucb::policies::{oracle_replay, RewardKnowledge};
use restless_ucb::{
    Action, Env, ExplorationTarget, FixedArm, GameSpec, MyopicPolicy, Policy, RestlessInstance,
    RestlessUcb, RestlessUcbConfig, SolveSettings, TablePolicy, ThompsonConfig, ThompsonSampling,
};

use crate::config::{ExperimentConfig, PolicySpec, TS4_GRID, TS9_GRID};
use crate::{format_sig, instances, BenchError};

/// Offset between a replication seed and its policy seed.
pub const POLICY_SEED_MIX: u64 = 0x9E37_79B9_7F4A_7C15;

/// Steps of the Monte Carlo fallback for the optimal gain.
const FALLBACK_STEPS: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MuStarMethod {
    /// Gain of the truncated belief MDP.
    Rvi,
    /// Rollout of the myopic policy, when the MDP is too large.
    MonteCarlo,
}

/// The reference gain regret is measured against, with its uncertainty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MuStar {
    pub value: f64,
    pub method: MuStarMethod,
    pub epsilon: Option<f64>,
    pub tau_max: Option<usize>,
    /// `20 M lambda_max^tau_max`, the allowance for cutting `tau` off.
    pub truncation_bound: Option<f64>,
    pub std_error: Option<f64>,
    pub note: String,
}

pub fn solve_settings(cfg: &ExperimentConfig) -> SolveSettings {
    SolveSettings {
        tau_max: cfg.tau_max,
        ..SolveSettings::default()
    }
}

pub fn compute_mu_star(
    instance: &RestlessInstance,
    settings: &SolveSettings,
) -> Result<MuStar, BenchError> {
    match settings.solve(instance) {
        Ok(table) => {
            let lambda = instance.lambda_max()?;
            let tau_max = table.tau_max();
            Ok(MuStar {
                value: table.gain(),
                method: MuStarMethod::Rvi,
                epsilon: Some(table.epsilon()),
                tau_max: Some(tau_max),
                truncation_bound: Some(
                    20.0 * instance.num_states() as f64 * lambda.powi(tau_max as i32),
                ),
                std_error: None,
                note: "optimal gain taken as the gain of the truncated belief MDP".into(),
            })
        }
        Err(MdpError::StateBudgetExceeded { reached, budget }) => {
            let mut policy = MyopicPolicy::new(instance);
            let est = policy_gain(instance, &mut policy, FALLBACK_STEPS, 1, POLICY_SEED_MIX)
                .map_err(|source| BenchError::Replication { rep: 0, source })?;
            Ok(MuStar {
                value: est.mean,
                method: MuStarMethod::MonteCarlo,
                epsilon: None,
                tau_max: None,
                truncation_bound: None,
                std_error: Some(est.std_error),
                note: format!(
                    "belief MDP exceeded {budget} states ({reached} reached); \
                     myopic rollout used, a lower bound on the optimal gain"
                ),
            })
        }
        Err(e) => Err(e.into()),
    }
}

/// A ready-to-clone policy; solving happens once, outside the replications.
#[derive(Debug, Clone)]
pub enum PolicyPrototype {
    RestlessUcb(Box<RestlessUcb>),
    Thompson(Box<ThompsonSampling>),
    Fixed(FixedArm),
    Table(Box<TablePolicy>),
    Myopic(Box<MyopicPolicy>),
}

impl PolicyPrototype {
    pub fn build(cfg: &ExperimentConfig, instance: &RestlessInstance) -> Result<Self, BenchError> {
        let settings = solve_settings(cfg);
        let thompson = |grid: &[f64]| -> Result<Self, BenchError> {
            if instance.num_states() != 2 {
                return Err(BenchError::Config(format!(
                    "grid priors need two-state arms, instance has {}",
                    instance.num_states()
                )));
            }
            let rewards = if cfg.ts_estimate_rewards {
                RewardKnowledge::Estimated
            } else {
                RewardKnowledge::Known(instance.arms().iter().map(|a| a.rewards.clone()).collect())
            };
            let mut ts = ThompsonConfig::product_grid(grid, instance.num_arms(), rewards)
                .map_err(|source| BenchError::Replication { rep: 0, source })?;
            ts.first_episode = cfg.ts_first_episode;
            ts.evidence = cfg.ts_evidence;
            ts.oracle = cfg.oracle;
            ts.solve = settings;
            Ok(PolicyPrototype::Thompson(Box::new(ThompsonSampling::new(
                ts,
            ))))
        };
        Ok(match cfg.policy {
            PolicySpec::RestlessUcb => {
                PolicyPrototype::RestlessUcb(Box::new(RestlessUcb::new(RestlessUcbConfig {
                    target: match cfg.m_fixed {
                        Some(m) => ExplorationTarget::Fixed(m),
                        None => ExplorationTarget::Power(cfg.m_exponent),
                    },
                    oracle: cfg.oracle,
                    solve: settings,
                    ..RestlessUcbConfig::default()
                })))
            }
            PolicySpec::Ts9 => thompson(&TS9_GRID)?,
            PolicySpec::Ts4 => thompson(&TS4_GRID)?,
            PolicySpec::TsCustom => thompson(&cfg.ts_grid)?,
            PolicySpec::Fixed(i) => {
                if i >= instance.num_arms() {
                    return Err(BenchError::Config(format!(
                        "fixed arm {i} out of range for {} arms",
                        instance.num_arms()
                    )));
                }
                PolicyPrototype::Fixed(FixedArm(Action::Pull(i)))
            }
            PolicySpec::Oracle => PolicyPrototype::Table(Box::new(
                oracle_replay(instance, &settings)
                    .map_err(|source| BenchError::Replication { rep: 0, source })?,
            )),
            PolicySpec::Myopic => PolicyPrototype::Myopic(Box::new(MyopicPolicy::new(instance))),
        })
    }

    pub fn fresh(&self) -> Box<dyn Policy> {
        match self {
            PolicyPrototype::RestlessUcb(p) => p.clone(),
            PolicyPrototype::Thompson(p) => p.clone(),
            PolicyPrototype::Fixed(p) => Box::new(*p),
            PolicyPrototype::Table(p) => p.clone(),
            PolicyPrototype::Myopic(p) => p.clone(),
        }
    }
}

/// `0` plus a geometric grid of `per_decade` points per factor of ten, up to
/// and including `horizon`.
pub fn checkpoint_grid(horizon: u64, per_decade: u32) -> Vec<u64> {
    let mut out = vec![0];
    let mut i = 0u32;
    loop {
        let t = 10f64.powf(f64::from(i) / f64::from(per_decade)).round() as u64;
        if t >= horizon {
            break;
        }
        if out.last() != Some(&t) {
            out.push(t);
        }
        i += 1;
    }
    out.push(horizon);
    out
}

/// Cumulative reward of one replication at each checkpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct RepTrace {
    pub rep: u64,
    pub seed: u64,
    pub cum_reward: Vec<f64>,
    pub wall_seconds: f64,
}

pub fn run_replication(
    instance: &RestlessInstance,
    policy: &mut dyn Policy,
    checkpoints: &[u64],
    rep: u64,
    seed: u64,
) -> Result<RepTrace, BenchError> {
    let horizon = *checkpoints.last().expect("nonempty grid");
    let start = Instant::now();
    let wrap = |source| BenchError::Replication { rep, source };
    let mut env = Env::reset(instance, seed).map_err(|e| wrap(e.into()))?;
    policy
        .reset(
            &GameSpec::for_instance(instance, horizon),
            seed ^ POLICY_SEED_MIX,
        )
        .map_err(wrap)?;
    let mut cum = Vec::with_capacity(checkpoints.len());
    let mut next = 0;
    let mut total = 0.0;
    for t in 0..=horizon {
        while next < checkpoints.len() && checkpoints[next] == t {
            cum.push(total);
            next += 1;
        }
        if t == horizon {
            break;
        }
        let obs = env.step(policy.choose(t)).map_err(|e| wrap(e.into()))?;
        policy.observe(&obs).map_err(wrap)?;
        total += obs.reward;
    }
    Ok(RepTrace {
        rep,
        seed,
        cum_reward: cum,
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub t: u64,
    pub mean_cum_reward: f64,
    pub mean_regret: f64,
    pub std_regret: f64,
    pub n_reps: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub instance: String,
    pub policy: String,
    pub oracle: String,
    pub horizon: u64,
    pub reps: u64,
    pub seed: u64,
    pub mu_star: MuStar,
    pub final_mean_regret: f64,
    pub final_std_regret: f64,
    pub mean_wall_seconds: f64,
    pub wall_seconds: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub mu_star: MuStar,
    pub checkpoints: Vec<u64>,
    pub reps: Vec<RepTrace>,
}

fn mean_std(xs: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = xs.clone().count() as f64;
    let mean = xs.clone().sum::<f64>() / n;
    if n < 2.0 {
        return (mean, 0.0);
    }
    let var = xs.map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

impl ExperimentResult {
    pub fn regret(&self, rep: usize, checkpoint: usize) -> f64 {
        self.checkpoints[checkpoint] as f64 * self.mu_star.value
            - self.reps[rep].cum_reward[checkpoint]
    }

    pub fn aggregate(&self) -> Vec<AggregateRow> {
        (0..self.checkpoints.len())
            .map(|c| {
                let (mean_cum_reward, _) = mean_std(self.reps.iter().map(|r| r.cum_reward[c]));
                let (mean_regret, std_regret) =
                    mean_std((0..self.reps.len()).map(|r| self.regret(r, c)));
                AggregateRow {
                    t: self.checkpoints[c],
                    mean_cum_reward,
                    mean_regret,
                    std_regret,
                    n_reps: self.reps.len() as u64,
                }
            })
            .collect()
    }

    /// Final-checkpoint regret: mean and its standard error.
    pub fn final_regret(&self) -> (f64, f64) {
        let last = self.checkpoints.len() - 1;
        let (mean, std) = mean_std((0..self.reps.len()).map(|r| self.regret(r, last)));
        (mean, std / (self.reps.len() as f64).sqrt())
    }

    pub fn summary(&self) -> Summary {
        let agg = self.aggregate();
        let last = agg.last().expect("nonempty grid");
        let wall: Vec<f64> = self.reps.iter().map(|r| r.wall_seconds).collect();
        Summary {
            instance: self.config.instance.clone(),
            policy: self.config.policy.to_string(),
            oracle: match self.config.oracle {
                restless_ucb::OracleKind::Exact => "exact".into(),
                restless_ucb::OracleKind::Myopic => "myopic".into(),
            },
            horizon: self.config.horizon,
            reps: self.config.reps,
            seed: self.config.seed,
            mu_star: self.mu_star.clone(),
            final_mean_regret: last.mean_regret,
            final_std_regret: last.std_regret,
            mean_wall_seconds: wall.iter().sum::<f64>() / wall.len() as f64,
            wall_seconds: wall,
        }
    }

    pub fn replications_csv(&self) -> Result<String, BenchError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["t", "rep", "cum_reward", "cum_regret"])?;
        for (r, trace) in self.reps.iter().enumerate() {
            for (c, &t) in self.checkpoints.iter().enumerate() {
                w.write_record([
                    t.to_string(),
                    trace.rep.to_string(),
                    format_sig(trace.cum_reward[c]),
                    format_sig(self.regret(r, c)),
                ])?;
            }
        }
        Ok(String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("ascii"))
    }

    pub fn aggregate_csv(&self) -> Result<String, BenchError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "t",
            "mean_cum_reward",
            "mean_regret",
            "std_regret",
            "n_reps",
        ])?;
        for row in self.aggregate() {
            w.write_record([
                row.t.to_string(),
                format_sig(row.mean_cum_reward),
                format_sig(row.mean_regret),
                format_sig(row.std_regret),
                row.n_reps.to_string(),
            ])?;
        }
        Ok(String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("ascii"))
    }

    /// Writes `replications.csv`, `aggregate.csv` and `summary.json`.
    pub fn write_outputs(&self, dir: &Path) -> Result<(), BenchError> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("replications.csv"), self.replications_csv()?)?;
        fs::write(dir.join("aggregate.csv"), self.aggregate_csv()?)?;
        let json = serde_json::to_string_pretty(&self.summary())?;
        fs::write(dir.join("summary.json"), json + "\n")?;
        Ok(())
    }
}

/// Runs every replication (in parallel) of `cfg` and, when `cfg.out` is
/// set, writes the result files there.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult, BenchError> {
    cfg.validate()?;
    let instance = instances::resolve_instance(&cfg.instance)?;
    run_experiment_on(cfg, &instance)
}

pub fn run_experiment_on(
    cfg: &ExperimentConfig,
    instance: &RestlessInstance,
) -> Result<ExperimentResult, BenchError> {
    cfg.validate()?;
    let mu_star = compute_mu_star(instance, &solve_settings(cfg))?;
    let proto = PolicyPrototype::build(cfg, instance)?;
    let checkpoints = checkpoint_grid(cfg.horizon, cfg.checkpoints_per_decade);
    let reps = (0..cfg.reps)
        .into_par_iter()
        .map(|rep| {
            let mut policy = proto.fresh();
            run_replication(
                instance,
                policy.as_mut(),
                &checkpoints,
                rep,
                cfg.seed.wrapping_add(rep),
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    let result = ExperimentResult {
        config: cfg.clone(),
        mu_star,
        checkpoints,
        reps,
    };
    if let Some(dir) = &cfg.out {
        result.write_outputs(dir)?;
    }
    Ok(result)
}
