use serde::{Deserialize, Serialize};

use restless_ucb::OracleKind;

use crate::config::{ExperimentConfig, PolicySpec};
use crate::experiment::{run_replication, PolicyPrototype};
use crate::{format_sig, instances, BenchError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingRow {
    pub arms: usize,
    pub horizon: u64,
    pub reps: u64,
    pub mean_seconds: f64,
    pub std_seconds: f64,
}

/// Wall-clock time of full runs on the two-state timing instances, one
/// replication after another on the calling thread.
pub fn timing_benchmark(
    arm_counts: &[usize],
    policy: &PolicySpec,
    oracle: OracleKind,
    horizon: u64,
    reps: u64,
    seed: u64,
) -> Result<Vec<TimingRow>, BenchError> {
    let mut rows = Vec::with_capacity(arm_counts.len());
    for &n in arm_counts {
        let instance = instances::timing_instance(n)?;
        let cfg = ExperimentConfig {
            policy: policy.clone(),
            oracle,
            horizon,
            reps,
            seed,
            ..Default::default()
        };
        let proto = PolicyPrototype::build(&cfg, &instance)?;
        let grid = [0, horizon];
        let mut secs = Vec::with_capacity(reps as usize);
        for rep in 0..reps {
            let mut p = proto.fresh();
            let trace = run_replication(&instance, p.as_mut(), &grid, rep, seed.wrapping_add(rep))?;
            secs.push(trace.wall_seconds);
        }
        let mean = secs.iter().sum::<f64>() / secs.len() as f64;
        let std = if secs.len() > 1 {
            (secs.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (secs.len() - 1) as f64).sqrt()
        } else {
            0.0
        };
        rows.push(TimingRow {
            arms: n,
            horizon,
            reps,
            mean_seconds: mean,
            std_seconds: std,
        });
    }
    Ok(rows)
}

pub fn timing_csv(rows: &[TimingRow]) -> Result<String, BenchError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["arms", "horizon", "reps", "mean_seconds", "std_seconds"])?;
    for r in rows {
        w.write_record([
            r.arms.to_string(),
            r.horizon.to_string(),
            r.reps.to_string(),
            format_sig(r.mean_seconds),
            format_sig(r.std_seconds),
        ])?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("ascii"))
}
