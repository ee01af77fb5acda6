use restless_ucb::belief::{
    build_truncated_mdp, default_tau_max, policy_gain, relative_value_iteration,
    relative_value_iteration_traced, ArmBelief, MdpConfig, PolicyTable, RviConfig,
};
use restless_ucb::policies::build_optimistic_instance;
use restless_ucb::{
    Action, Arm, BeliefModel, BeliefState, BirthDeathChain, FixedArm, MdpError, MyopicOracle,
    RestlessInstance, SolveSettings, TablePolicy,
};

fn arm(a: f64, b: f64, r: f64) -> Arm {
    Arm::new(BirthDeathChain::two_state(a, b).unwrap(), vec![r, 0.0]).unwrap()
}

fn instance_one() -> RestlessInstance {
    RestlessInstance::new(vec![arm(0.7, 0.8, 1.0), arm(0.5, 0.6, 0.8)], vec![1, 1]).unwrap()
}

fn instance_two() -> RestlessInstance {
    RestlessInstance::new(vec![arm(0.7, 0.9, 0.8), arm(0.7, 0.5, 0.4)], vec![1, 1]).unwrap()
}

fn z(pairs: &[(usize, usize)]) -> BeliefState {
    BeliefState::new(pairs.iter().map(|&(state, tau)| ArmBelief { state, tau }).collect())
}

fn solve(inst: &RestlessInstance, tau_max: usize) -> PolicyTable {
    SolveSettings {
        tau_max: Some(tau_max),
        ..SolveSettings::default()
    }
    .solve(inst)
    .unwrap()
}

#[test]
fn expected_reward_examples() {
    let inst = instance_one();
    let mut model = BeliefModel::new(&inst, 30);
    let start = z(&[(1, 1), (1, 1)]);
    assert!((model.expected_reward(&start, 0) - 0.2).abs() < 1e-12);
    assert!((model.expected_reward(&start, 1) - 0.32).abs() < 1e-12);
    assert!((model.expected_reward(&z(&[(0, 1), (1, 1)]), 0) - 0.7).abs() < 1e-12);
}

#[test]
fn belief_transition_examples() {
    let inst = instance_one();
    let mut model = BeliefModel::new(&inst, 30);
    let next = model.belief_transition(&z(&[(1, 1), (1, 1)]), 0);
    assert_eq!(next.len(), 2);
    assert!((next[0].0 - 0.2).abs() < 1e-12);
    assert_eq!(next[0].1, z(&[(0, 1), (1, 2)]));
    assert!((next[1].0 - 0.8).abs() < 1e-12);
    assert_eq!(next[1].1, z(&[(1, 1), (1, 2)]));

    let saturated = z(&[(0, 30), (1, 1)]);
    let next = model.belief_transition(&saturated, 0);
    let row = inst.arm(0).chain.row_power(0, 30);
    for ((p, _), q) in next.iter().zip(row.as_slice()) {
        assert!((p - q).abs() < 1e-12);
    }
    assert!((next.iter().map(|x| x.0).sum::<f64>() - 1.0).abs() < 1e-10);
    // the other arm saturates
    assert_eq!(model.belief_transition(&saturated, 1)[0].1.arm(0).tau, 30);
}

#[test]
fn truncated_mdp_is_closed_and_sparse() {
    let inst = instance_one();
    let mdp = build_truncated_mdp(&inst, &MdpConfig::new(30)).unwrap();
    assert!(mdp.num_states() <= 2 * 2 * 2 * 30);
    for s in 0..mdp.num_states() {
        for a in 0..mdp.num_arms() {
            let t = mdp.transitions(s, a);
            assert!(t.len() <= inst.num_states());
            assert!(t.iter().all(|&(next, _)| next < mdp.num_states()));
            assert!((t.iter().map(|x| x.1).sum::<f64>() - 1.0).abs() < 1e-10);
        }
    }
}

#[test]
fn single_arm_mdp_has_two_states() {
    let inst = RestlessInstance::new(vec![arm(0.7, 0.8, 1.0)], vec![1]).unwrap();
    let mdp = build_truncated_mdp(&inst, &MdpConfig::new(40)).unwrap();
    let mut states: Vec<_> = mdp.states().to_vec();
    states.sort_by_key(|s| s.arm(0).state);
    assert_eq!(states, vec![z(&[(0, 1)]), z(&[(1, 1)])]);
}

#[test]
fn truncation_level_barely_moves_the_gain() {
    let inst = instance_one();
    let lambda: f64 = inst.lambda_max().unwrap();
    let g2 = solve(&inst, 2).gain();
    let g64 = solve(&inst, 64).gain();
    assert!((g2 - g64).abs() <= 10.0 * lambda.powi(2));
    for inst in [instance_one(), instance_two()] {
        let lambda: f64 = inst.lambda_max().unwrap();
        let tau = default_tau_max(lambda);
        let m = inst.num_states() as f64;
        let a = solve(&inst, tau).gain();
        let b = solve(&inst, 2 * tau).gain();
        assert!((a - b).abs() <= 20.0 * m * lambda.powi(tau as i32), "{a} vs {b}");
    }
}

#[test]
fn default_tau_max_is_clamped() {
    assert_eq!(default_tau_max(0.5), 20);
    assert_eq!(default_tau_max(0.01), 16);
    assert_eq!(default_tau_max(0.9999), 512);
}

#[test]
fn state_budget_is_enforced() {
    let cfg = MdpConfig {
        state_budget: 10,
        ..MdpConfig::new(30)
    };
    assert!(matches!(
        build_truncated_mdp(&instance_one(), &cfg),
        Err(MdpError::StateBudgetExceeded { .. })
    ));
    assert!(matches!(
        build_truncated_mdp(&instance_one(), &MdpConfig::new(1)),
        Err(MdpError::TauMax(1))
    ));
}

#[test]
fn single_state_arms_pick_the_best_reward() {
    let inst = RestlessInstance::new(
        vec![
            Arm::new(BirthDeathChain::trivial(), vec![0.3]).unwrap(),
            Arm::new(BirthDeathChain::trivial(), vec![0.7]).unwrap(),
        ],
        vec![0, 0],
    )
    .unwrap();
    let table = SolveSettings::default().solve(&inst).unwrap();
    assert_eq!(table.gain(), 0.7);
    assert!(table.actions().iter().all(|&a| a == 1));
}

#[test]
fn rvi_gain_matches_rollout() {
    let inst = instance_one();
    let table = solve(&inst, 64);
    let mut policy = TablePolicy::new(table.clone(), &inst);
    let est = policy_gain(&inst, &mut policy, 10_000_000, 1, 3).unwrap();
    assert!(
        (est.mean - table.gain()).abs() <= 3.0 * est.std_error,
        "{} vs {} (se {})",
        est.mean,
        table.gain(),
        est.std_error
    );
}

#[test]
fn rvi_span_never_increases() {
    for inst in [instance_one(), instance_two()] {
        let mdp = build_truncated_mdp(&inst, &MdpConfig::new(24)).unwrap();
        let (_, spans) = relative_value_iteration_traced(&mdp, &RviConfig::default()).unwrap();
        assert!(spans.len() > 2);
        for w in spans.windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "{} then {}", w[0], w[1]);
        }
    }
}

#[test]
fn rvi_rejects_bad_epsilon_and_caps_iterations() {
    let mdp = build_truncated_mdp(&instance_one(), &MdpConfig::new(20)).unwrap();
    let bad = RviConfig {
        epsilon: 0.0,
        ..RviConfig::default()
    };
    assert!(matches!(relative_value_iteration(&mdp, &bad), Err(MdpError::Epsilon(_))));
    let short = RviConfig {
        epsilon: 1e-15,
        max_iterations: 3,
    };
    assert!(matches!(
        relative_value_iteration(&mdp, &short),
        Err(MdpError::NonConvergence { .. })
    ));
}

#[test]
fn arm_relabeling_leaves_the_gain_unchanged() {
    let a = instance_one();
    let swapped = RestlessInstance::new(vec![a.arm(1).clone(), a.arm(0).clone()], vec![1, 1]).unwrap();
    assert!((solve(&a, 30).gain() - solve(&swapped, 30).gain()).abs() < 1e-9);
    let twins = RestlessInstance::new(vec![arm(0.7, 0.8, 1.0), arm(0.7, 0.8, 1.0)], vec![0, 1]).unwrap();
    let twins_swapped =
        RestlessInstance::new(vec![arm(0.7, 0.8, 1.0), arm(0.7, 0.8, 1.0)], vec![1, 0]).unwrap();
    assert!((solve(&twins, 30).gain() - solve(&twins_swapped, 30).gain()).abs() < 1e-9);
}

#[test]
fn raising_a_reward_never_lowers_the_gain() {
    for inst in [instance_one(), instance_two()] {
        let base = solve(&inst, 30).gain();
        for i in 0..inst.num_arms() {
            for bump in [0.01, 0.1] {
                let mut r = inst.arm(i).rewards.clone();
                r[1] = (r[1] + bump).min(r[0]);
                let up = solve(&inst.with_rewards(i, r).unwrap(), 30).gain();
                assert!(up >= base - 2e-9, "{up} < {base}");
            }
        }
    }
}

#[test]
fn optimistic_shift_of_the_truth_does_not_lower_the_gain() {
    for inst in [instance_one(), instance_two()] {
        let base = solve(&inst, 30);
        let chains: Vec<_> = inst.arms().iter().map(|a| a.chain.clone()).collect();
        let rewards: Vec<_> = inst.arms().iter().map(|a| a.rewards.clone()).collect();
        for delta in [0.001, 0.01, 0.1 / 3.0] {
            let shifted =
                build_optimistic_instance(&chains, &rewards, delta, inst.initial_states()).unwrap();
            let g = solve(&shifted, 30).gain();
            assert!(g >= base.gain() - 2.0 * base.epsilon());
        }
    }
}

#[test]
fn myopic_examples() {
    let inst = instance_one();
    let oracle = MyopicOracle::new(&inst);
    assert_eq!(oracle.choose(&z(&[(1, 1), (1, 1)])), 1);
    let twins = RestlessInstance::new(vec![arm(0.7, 0.8, 1.0), arm(0.7, 0.8, 1.0)], vec![1, 1]).unwrap();
    assert_eq!(MyopicOracle::new(&twins).choose(&z(&[(0, 3), (0, 3)])), 0);
    let single = RestlessInstance::new(vec![arm(0.7, 0.8, 1.0)], vec![1]).unwrap();
    let single_oracle = MyopicOracle::new(&single);
    for s in 0..2 {
        for tau in 1..5 {
            assert_eq!(single_oracle.choose(&z(&[(s, tau)])), 0);
        }
    }
}

#[test]
fn policy_gain_of_fixed_arms() {
    let inst = instance_one();
    let est = policy_gain(&inst, &mut FixedArm(Action::Pull(0)), 200_000, 10, 5).unwrap();
    assert!((est.mean - 0.4).abs() <= 3.0 * est.std_error);
    let idle = policy_gain(&inst, &mut FixedArm(Action::Idle), 10_000, 2, 5).unwrap();
    assert_eq!(idle.mean, 0.0);
}

#[test]
fn policy_table_file_round_trip() {
    let table = solve(&instance_one(), 20);
    let text = table.to_text();
    assert!(text.starts_with("restless-policy-table v1"));
    let back = PolicyTable::from_text(&text).unwrap();
    assert_eq!(back.actions(), table.actions());
    assert_eq!(back.states(), table.states());
    assert_eq!(back.gain(), table.gain());
    assert!(PolicyTable::from_text("restless-policy-table v9\n").is_err());
}
