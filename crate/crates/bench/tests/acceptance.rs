//! End-to-end acceptance criteria. Each test prints one `PASS`/`FAIL` line
//! and then asserts.
//!
//! The timing test takes an exclusive lock so no other test in this binary
//! competes for the CPU while it measures.

use std::io::Write;
use std::sync::{OnceLock, RwLock, RwLockReadGuard};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use restless_bench::config::PolicySpec;
use restless_bench::experiment::ExperimentResult;
use restless_bench::verify::{
    bias_gap_check, correspond_checks, coupling_checks, event_checks, property_checks,
};
use restless_bench::{
    builtin_instance, run_experiment, timing_benchmark, CheckResult, ExperimentConfig,
    VerifyConfig,
};
use restless_ucb::belief::policy_gain;
use restless_ucb::policies::oracle_replay;
use restless_ucb::{
    Arm, BirthDeathChain, MyopicPolicy, OracleKind, RestlessInstance, SolveSettings,
};

static CPU: RwLock<()> = RwLock::new(());

fn shared() -> RwLockReadGuard<'static, ()> {
    CPU.read().unwrap_or_else(|e| e.into_inner())
}

fn report(id: u32, title: &str, ok: bool, detail: &str) {
    let tag = if ok { "PASS" } else { "FAIL" };
    // Written to the raw handle so the line shows without --nocapture.
    let line = format!("{tag} [{id}] {title}: {detail}\n");
    let _ = std::io::stderr().lock().write_all(line.as_bytes());
}

fn all_pass(checks: &[CheckResult]) -> (bool, String) {
    let ok = checks.iter().all(CheckResult::passed);
    let detail = checks
        .iter()
        .map(|c| format!("{} {}/{} worst {:.2e}", c.name, c.violations, c.trials, c.worst_excess))
        .collect::<Vec<_>>()
        .join("; ");
    (ok, detail)
}

fn instance_one() -> RestlessInstance {
    builtin_instance("paper-1").unwrap()
}

#[test]
fn c1_dominance_properties() {
    let _cpu = shared();
    let cfg = VerifyConfig::default();
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let checks = property_checks(&cfg, &mut rng);
    let secs = start.elapsed().as_secs_f64();
    let (ok, detail) = all_pass(&checks);
    let ok = ok && secs < 60.0 && checks.len() == 7;
    report(
        1,
        "dominance and perturbation suite",
        ok,
        &format!("{} instances, {secs:.1}s; {detail}", cfg.random_instances),
    );
    assert!(ok);
}

#[test]
fn c2_correspond_coupling() {
    let _cpu = shared();
    let cfg = VerifyConfig::default();
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let checks = correspond_checks(&cfg, &mut rng);
    let secs = start.elapsed().as_secs_f64();
    let (ok, detail) = all_pass(&checks);
    let ok = ok && secs < 60.0;
    report(2, "correspond coupling", ok, &format!("{secs:.1}s; {detail}"));
    assert!(ok);
}

#[test]
fn c3_real_virtual_coupling() {
    let _cpu = shared();
    let cfg = VerifyConfig {
        seed: 303,
        ..VerifyConfig::default()
    };
    let start = Instant::now();
    let checks = coupling_checks(&cfg, &instance_one()).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let (ok, detail) = all_pass(&checks);
    let ok = ok && secs < 300.0 && checks.len() == 3;
    report(
        3,
        "real/virtual coupling on the shifted instance",
        ok,
        &format!("delta {}, {secs:.1}s; {detail}", cfg.coupling_delta),
    );
    assert!(ok);
}

#[test]
fn c4_confidence_event_frequency() {
    let _cpu = shared();
    let cfg = VerifyConfig {
        seed: 404,
        ..VerifyConfig::default()
    };
    assert_eq!(cfg.event_horizon, 1_000_000);
    assert_eq!(cfg.event_runs, 200);
    let start = Instant::now();
    let checks = event_checks(&cfg, &instance_one()).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let freq = checks
        .iter()
        .find(|c| c.name == "confidence-event-frequency")
        .unwrap();
    let ok = freq.passed() && secs < 600.0;
    report(
        4,
        "confidence event frequency",
        ok,
        &format!("{secs:.1}s; {}", freq.detail),
    );
    assert!(ok);
}

const HORIZONS: [u64; 4] = [62_500, 125_000, 250_000, 500_000];
const REPS: u64 = 200;

struct Curves {
    ucb: Vec<ExperimentResult>,
    ts4: Vec<ExperimentResult>,
    ts9: Vec<ExperimentResult>,
    fixed: Vec<ExperimentResult>,
    seconds: f64,
}

fn experiment(policy: PolicySpec, horizon: u64, seed: u64) -> ExperimentResult {
    run_experiment(&ExperimentConfig {
        instance: "paper-1".into(),
        policy,
        horizon,
        reps: REPS,
        seed,
        ..ExperimentConfig::default()
    })
    .unwrap()
}

fn curves() -> &'static Curves {
    static CURVES: OnceLock<Curves> = OnceLock::new();
    CURVES.get_or_init(|| {
        let start = Instant::now();
        let run = |p: PolicySpec, seed: u64| {
            HORIZONS
                .iter()
                .map(|&t| experiment(p.clone(), t, seed))
                .collect::<Vec<_>>()
        };
        let ucb = run(PolicySpec::RestlessUcb, 5_000);
        let ts4 = run(PolicySpec::Ts4, 6_000);
        let ts9 = run(PolicySpec::Ts9, 7_000);
        let fixed = (0..2)
            .map(|i| experiment(PolicySpec::Fixed(i), 500_000, 8_000))
            .collect();
        Curves {
            ucb,
            ts4,
            ts9,
            fixed,
            seconds: start.elapsed().as_secs_f64(),
        }
    })
}

/// Least-squares slope of `ln regret` against `ln T`.
fn loglog_slope(results: &[ExperimentResult]) -> f64 {
    let pts: Vec<(f64, f64)> = results
        .iter()
        .map(|r| ((r.config.horizon as f64).ln(), r.final_regret().0.ln()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

fn final_mean(r: &ExperimentResult) -> f64 {
    r.final_regret().0
}

/// Per-step regret over the second half of the run: mean and standard error
/// across replications.
fn late_rate(r: &ExperimentResult) -> (f64, f64) {
    let last = r.checkpoints.len() - 1;
    let half = r
        .checkpoints
        .iter()
        .position(|&t| 2 * t >= r.config.horizon)
        .unwrap();
    let span = (r.checkpoints[last] - r.checkpoints[half]) as f64;
    let rates: Vec<f64> = (0..r.reps.len())
        .map(|i| (r.regret(i, last) - r.regret(i, half)) / span)
        .collect();
    let n = rates.len() as f64;
    let mean = rates.iter().sum::<f64>() / n;
    let var = rates.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[test]
fn c5_regret_sublinearity() {
    let _cpu = shared();
    let c = curves();
    let slope = loglog_slope(&c.ucb);
    let (ucb, ucb_se) = c.ucb[3].final_regret();
    let best_fixed = c.fixed.iter().map(final_mean).fold(f64::INFINITY, f64::min);
    let ts4 = final_mean(&c.ts4[3]);
    let means: Vec<String> = c.ucb.iter().map(|r| format!("{:.0}", final_mean(r))).collect();
    let ok = (0.4..=0.85).contains(&slope) && ucb < best_fixed && ucb < ts4 && c.seconds < 3600.0;
    report(
        5,
        "regret sublinearity",
        ok,
        &format!(
            "regret [{}] at T = {HORIZONS:?}, fitted exponent {slope:.3}; \
             at T = 5e5 restless-ucb {ucb:.0} (se {ucb_se:.0}) vs best fixed {best_fixed:.0} \
             vs ts-4 {ts4:.0}; {:.0}s for all curves",
            means.join(", "),
            c.seconds
        ),
    );
    assert!(ok);
}

#[test]
fn c6_thompson_baselines() {
    let _cpu = shared();
    let c = curves();
    let ts9_ratio = final_mean(&c.ts9[3]) / final_mean(&c.ts9[0]);
    let ts9_slope = loglog_slope(&c.ts9);
    // Sublinear: average regret per step at T is at most half of that at T/8.
    let ts9_ok = ts9_ratio <= 4.0;
    let rate_early = final_mean(&c.ts4[0]) / HORIZONS[0] as f64;
    let (rate_late, rate_se) = late_rate(&c.ts4[3]);
    let ts4_ok = rate_late - 3.0 * rate_se > 0.0 && rate_late >= 0.5 * rate_early;
    let ok = ts9_ok && ts4_ok;
    report(
        6,
        "thompson baselines",
        ok,
        &format!(
            "ts-9 regret {:.0} -> {:.0} (ratio {ts9_ratio:.2} over 8x, exponent {ts9_slope:.3}); \
             ts-4 regret/t {rate_early:.5} at 6.25e4, late-half rate {rate_late:.5} (se {rate_se:.5})",
            final_mean(&c.ts9[0]),
            final_mean(&c.ts9[3]),
        ),
    );
    assert!(ok);
}

#[test]
fn c7_timing_scaling() {
    let _cpu = CPU.write().unwrap_or_else(|e| e.into_inner());
    let rows = timing_benchmark(
        &[2, 3, 4, 5],
        &PolicySpec::RestlessUcb,
        OracleKind::Myopic,
        500_000,
        50,
        707,
    )
    .unwrap();
    let ratio = rows[3].mean_seconds / rows[0].mean_seconds;
    let ok = ratio <= 3.0;
    let table: Vec<String> = rows
        .iter()
        .map(|r| format!("N={} {:.4}s", r.arms, r.mean_seconds))
        .collect();
    report(
        7,
        "timing scaling",
        ok,
        &format!("{}; ratio N=5/N=2 {ratio:.2}", table.join(", ")),
    );
    assert!(ok);
}

#[test]
fn c8_oracle_sanity() {
    let _cpu = shared();
    let settings = SolveSettings::default();
    let single = RestlessInstance::new(
        [0.3, 0.9, 0.55]
            .iter()
            .map(|&r| Arm::new(BirthDeathChain::trivial(), vec![r]).unwrap())
            .collect(),
        vec![0, 0, 0],
    )
    .unwrap();
    let single_gain = settings.solve(&single).unwrap().gain();
    let single_ok = single_gain == 0.9;

    let inst = instance_one();
    let mut table = oracle_replay(&inst, &settings).unwrap();
    let gain = table.table().gain();
    let rollout = policy_gain(&inst, &mut table, 10_000_000, 1, 808).unwrap();
    let rollout_ok = (rollout.mean - gain).abs() <= 3.0 * rollout.std_error;

    let mut myopic = MyopicPolicy::new(&inst);
    let greedy = policy_gain(&inst, &mut myopic, 10_000_000, 1, 809).unwrap();
    let myopic_ok = greedy.mean <= gain + 3.0 * greedy.std_error;

    let ok = single_ok && rollout_ok && myopic_ok;
    report(
        8,
        "oracle sanity",
        ok,
        &format!(
            "single-state gain {single_gain}; RVI gain {gain:.6} vs rollout {:.6} (se {:.6}); \
             myopic rollout {:.6} (se {:.6})",
            rollout.mean, rollout.std_error, greedy.mean, greedy.std_error
        ),
    );
    assert!(ok);
}

#[test]
fn c9_bias_gap_bound() {
    let _cpu = shared();
    let cfg = VerifyConfig {
        seed: 909,
        ..VerifyConfig::default()
    };
    assert_eq!(cfg.bias_triples, 100);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let check = bias_gap_check(&cfg, &instance_one(), &mut rng).unwrap();
    let ok = check.passed() && check.trials == 100;
    report(9, "bias gap bound", ok, &check.detail);
    assert!(ok);
}

#[test]
fn curve_ratio_test() {
    let _cpu = shared();
    let c = curves();
    let at = |i: usize| final_mean(&c.ucb[i]) / HORIZONS[i] as f64;
    // regret(T)/T <= 0.5 regret(T/8)/(T/8)
    assert!(at(3) <= 0.5 * at(0), "{} vs {}", at(3), at(0));
}
