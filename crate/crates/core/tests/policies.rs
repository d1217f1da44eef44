mod common;

use ddwp::instgen::{epoch_start, WindowKind, HORIZON, NUM_EPOCHS};
use ddwp::policies::{
    build_scenario, greedy_decide, icd_decide, rh_decide, solve_scenarios, Consensus, IcdConfig, IdSet, Policy,
    SCENARIO_ID_BASE,
};
use ddwp::rng::rng_from;
use ddwp::Error;
use proptest::prelude::*;

use common::dynamic::{quick_budget, random_state, small_config};

fn cheap(icd: IcdConfig) -> IcdConfig {
    icd.with_budget(3, 6, quick_budget(20))
}

#[test]
fn scenario_windows_follow_the_classification() {
    let config = small_config(60, WindowKind::Regular, 4);
    let (state, _) = random_state(&config, 3, 2);
    assert!(state.requests.len() >= 3);
    let ids = state.ids();
    let d = IdSet::from([ids[0]]);
    let p = IdSet::from([ids[1]]);
    let inst = build_scenario(&state, &d, &p, &config, 1, &mut rng_from(1)).unwrap();
    let now = epoch_start(2);
    let next = epoch_start(3);
    let a = inst.request(ids[0]).unwrap();
    assert_eq!((a.dispatch_early, a.dispatch_late), (now, now));
    let b = inst.request(ids[1]).unwrap();
    assert_eq!((b.dispatch_early, b.dispatch_late), (next, HORIZON));
    let c = inst.request(ids[2]).unwrap();
    assert_eq!((c.dispatch_early, c.dispatch_late), (c.release, HORIZON));
    let sampled: Vec<_> = inst.requests().iter().filter(|r| r.id.0 >= SCENARIO_ID_BASE).collect();
    assert!(!sampled.is_empty());
    assert!(sampled.iter().all(|r| r.release == next && r.dispatch_early == next));

    let plain = build_scenario(&state, &IdSet::new(), &IdSet::new(), &config, 0, &mut rng_from(1)).unwrap();
    assert_eq!(plain.len(), state.requests.len());
    assert!(matches!(
        build_scenario(&state, &d, &d, &config, 1, &mut rng_from(1)),
        Err(Error::OverlappingDecisions(_))
    ));
}

#[test]
fn final_epoch_scenarios_sample_nothing() {
    let config = small_config(40, WindowKind::Deadline, 8);
    let (state, must) = random_state(&config, 5, NUM_EPOCHS);
    let inst = build_scenario(&state, &IdSet::new(), &IdSet::new(), &config, 1, &mut rng_from(2)).unwrap();
    assert_eq!(inst.len(), state.requests.len());
    assert_eq!(must.len(), state.requests.len());
    let decision = icd_decide(&state, &must, &config, &cheap(IcdConfig::double_threshold()), 1).unwrap();
    assert_eq!(decision.action.dispatch, state.ids());
    assert!(decision.trace.is_empty());
}

#[test]
fn forced_windows_decide_scenario_dispatch_sets() {
    let config = small_config(60, WindowKind::Regular, 4);
    let (state, must) = random_state(&config, 8, 3);
    let all: IdSet = state.ids().into_iter().collect();
    let must: IdSet = must.into_iter().collect();
    let rest: IdSet = all.difference(&must).copied().collect();
    assert!(!rest.is_empty());
    let budget = quick_budget(20);
    let forced = build_scenario(&state, &all, &IdSet::new(), &config, 1, &mut rng_from(3)).unwrap();
    let held = build_scenario(&state, &must, &rest, &config, 1, &mut rng_from(3)).unwrap();
    let sols = solve_scenarios(&state, &[forced, held], &budget, &[1, 2]);
    assert_eq!(sols.len(), 2);
    assert_eq!(sols[0].dispatched, all);
    assert_eq!(sols[1].dispatched, must);
}

#[test]
fn all_forced_state_dispatches_everything_without_sampling() {
    let config = small_config(60, WindowKind::Deadline, 2);
    let (state, _) = random_state(&config, 9, 2);
    let must = state.ids();
    let decision = icd_decide(&state, &must, &config, &cheap(IcdConfig::double_threshold()), 4).unwrap();
    assert_eq!(decision.action.dispatch, must);
    assert!(decision.trace.is_empty());
}

#[test]
fn greedy_dispatches_everything() {
    let config = small_config(60, WindowKind::Regular, 8);
    let (state, _) = random_state(&config, 1, 4);
    assert_eq!(greedy_decide(&state).dispatch, state.ids());
}

#[test]
fn invalid_thresholds_are_rejected() {
    let config = small_config(40, WindowKind::Regular, 8);
    let (state, must) = random_state(&config, 1, 1);
    let mut icd = cheap(IcdConfig::double_threshold());
    icd.postpone_threshold = 0.7;
    assert!(matches!(icd_decide(&state, &must, &config, &icd, 1), Err(Error::ThresholdOrder { .. })));
}

#[test]
fn policy_names() {
    let names: Vec<_> = [
        Policy::Greedy,
        Policy::Rollout { budget: quick_budget(1) },
        Policy::Icd(IcdConfig::double_threshold()),
        Policy::Icd(IcdConfig::dispatch_threshold()),
        Policy::Icd(IcdConfig::postpone_threshold()),
        Policy::Icd(IcdConfig::hamming()),
    ]
    .iter()
    .map(|p| p.name())
    .collect();
    assert_eq!(names, ["greedy", "rh", "icd-double", "dshh", "icd-postpone", "icd-hamming"]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn icd_decisions_respect_the_invariants(seed in any::<u64>(), epoch in 1usize..=NUM_EPOCHS, variant in 0usize..4) {
        let config = small_config(60, WindowKind::Regular, 4);
        let (state, must) = random_state(&config, seed, epoch);
        let icd = cheap(match variant {
            0 => IcdConfig::double_threshold(),
            1 => IcdConfig::dispatch_threshold(),
            2 => IcdConfig::postpone_threshold(),
            _ => IcdConfig::hamming(),
        });
        let decision = icd_decide(&state, &must, &config, &icd, seed).unwrap();
        let known: IdSet = state.ids().into_iter().collect();
        let chosen: IdSet = decision.action.dispatch.iter().copied().collect();
        prop_assert!(must.iter().all(|id| chosen.contains(id)));
        prop_assert!(chosen.is_subset(&known));
        prop_assert!(decision.trace.len() <= icd.iterations);
        let mut undecided = state.requests.len() - must.len();
        for it in &decision.trace {
            prop_assert!(!it.overlap);
            prop_assert!(it.undecided <= undecided);
            prop_assert!(it.solved <= icd.scenarios);
            undecided = it.undecided;
        }
        if icd.consensus == Consensus::DispatchThreshold {
            prop_assert!(decision.trace.iter().all(|it| it.postpone == 0));
        }
    }

    #[test]
    fn rollout_matches_single_scenario_hamming(seed in any::<u64>(), epoch in 1usize..NUM_EPOCHS) {
        let config = small_config(60, WindowKind::Regular, 2);
        let (state, must) = random_state(&config, seed, epoch);
        let budget = quick_budget(30);
        let rh = rh_decide(&state, &must, &config, &budget, seed).unwrap();
        let hamming = IcdConfig::hamming().with_budget(1, 1, budget);
        let icd = icd_decide(&state, &must, &config, &hamming, seed).unwrap();
        prop_assert_eq!(rh, icd.action);
    }
}
