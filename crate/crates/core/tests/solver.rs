mod common;

use std::sync::Arc;

use ddwp::model::{FleetSpec, Matrix, PenaltyWeights, Request, RequestId, Route, Solution, StaticInstance, VehicleType};
use ddwp::rng::rng_from;
use ddwp::solver::{crossover, local_search, penalized_cost, solve, solve_detailed, SolverParams, StopCriterion};
use ddwp::Error;
use proptest::prelude::*;

use common::{brute_force_optimum, random_instance};

fn line(n: usize, gap: i64) -> Arc<Matrix> {
    Arc::new(Matrix::from_fn(n + 1, |i, j| (i as i64 - j as i64).abs() * gap))
}

#[test]
fn single_request_is_one_round_trip() {
    let m = line(1, 30);
    let req = Request::new(RequestId(5), 1, 1, 0, 0, 480, 0, 480);
    let inst = StaticInstance::new("one", 0, vec![req], m.clone(), m, 480, 0, FleetSpec::unlimited(10)).unwrap();
    let sol = solve(&inst, &SolverParams::scenario_profile(), StopCriterion::iterations(20), 1).unwrap();
    assert!(sol.feasible);
    assert_eq!(sol.cost, 60);
    assert_eq!(sol.routes.len(), 1);
    assert_eq!(sol.routes[0].visits, vec![RequestId(5)]);
}

#[test]
fn empty_instance_is_rejected() {
    let m = line(0, 1);
    let inst = StaticInstance::new("none", 0, vec![], m.clone(), m, 480, 0, FleetSpec::unlimited(10)).unwrap();
    let err = solve(&inst, &SolverParams::scenario_profile(), StopCriterion::iterations(1), 1);
    assert!(matches!(err, Err(Error::EmptyInstance)));
}

#[test]
fn disjoint_dispatch_windows_never_share_a_route() {
    let m = line(2, 10);
    let a = Request::new(RequestId(1), 1, 1, 0, 0, 480, 0, 480).with_dispatch_window(60, 60);
    let b = Request::new(RequestId(2), 2, 1, 0, 0, 480, 0, 480).with_dispatch_window(120, 480);
    let inst = StaticInstance::new("dw", 0, vec![a, b], m.clone(), m, 480, 0, FleetSpec::unlimited(10)).unwrap();
    let sol = solve(&inst, &SolverParams::scenario_profile(), StopCriterion::iterations(50), 3).unwrap();
    assert!(sol.feasible);
    assert_eq!(sol.routes.len(), 2);
    let mut departures: Vec<_> = sol.routes.iter().map(|r| r.departure).collect();
    departures.sort();
    assert_eq!(departures, vec![60, 120]);
}

#[test]
fn matches_brute_force_on_small_instances() {
    let mut matched = 0;
    for seed in 0..20 {
        let mut rng = rng_from(seed);
        let inst = random_instance(&mut rng, 6, 15);
        let opt = brute_force_optimum(&inst).unwrap();
        let sol = solve(&inst, &SolverParams::scenario_profile(), StopCriterion::iterations(300), seed).unwrap();
        sol.check_coverage(&inst).unwrap();
        assert!(sol.feasible);
        assert!(sol.cost >= opt, "solver beat the exhaustive optimum");
        matched += (sol.cost == opt) as usize;
    }
    assert!(matched >= 19, "matched {matched} of 20");
}

#[test]
fn iteration_bounded_runs_are_deterministic() {
    let mut rng = rng_from(8);
    let inst = random_instance(&mut rng, 40, 30);
    let params = SolverParams::default_profile();
    let a = solve_detailed(&inst, &params, StopCriterion::iterations(100), 77).unwrap();
    let b = solve_detailed(&inst, &params, StopCriterion::iterations(100), 77).unwrap();
    assert_eq!(a.solution, b.solution);
    assert_eq!(a.history, b.history);
    assert_eq!(a.iterations, 100);
}

#[test]
fn best_cost_history_is_non_increasing() {
    let mut rng = rng_from(9);
    let inst = random_instance(&mut rng, 50, 25);
    let out = solve_detailed(&inst, &SolverParams::scenario_profile(), StopCriterion::iterations(300), 4).unwrap();
    out.solution.check_coverage(&inst).unwrap();
    assert!(out.history.windows(2).all(|w| w[0].1 >= w[1].1 && w[0].0 <= w[1].0));
}

#[test]
fn limited_primaries_are_preferred_over_paid_vehicles() {
    let m = line(4, 10);
    let reqs = (1..=4).map(|i| Request::new(RequestId(i), i as usize, 5, 0, 0, 480, 0, 480)).collect();
    let fleet = FleetSpec {
        classes: vec![
            VehicleType {
                count: Some(1),
                capacity: 10,
                fixed_cost: 0,
                available_from: 0,
            },
            VehicleType {
                count: None,
                capacity: 10,
                fixed_cost: 7200,
                available_from: 0,
            },
        ],
    };
    let inst = StaticInstance::new("fleet", 0, reqs, m.clone(), m, 480, 0, fleet).unwrap();
    let sol = solve(&inst, &SolverParams::default_profile(), StopCriterion::iterations(200), 2).unwrap();
    assert!(sol.feasible);
    assert_eq!(sol.routes.len(), 2);
    assert_eq!(sol.routes.iter().filter(|r| r.vehicle_type == 1).count(), 1);
    assert_eq!(sol.cost, 7200 + 40 + 80);
}

fn singleton_solution(inst: &StaticInstance) -> Solution {
    let routes = inst
        .requests()
        .iter()
        .map(|r| Route {
            vehicle_type: 0,
            visits: vec![r.id],
            departure: 0,
        })
        .collect();
    Solution::from_routes(inst, routes).unwrap()
}

fn chunked_solution(inst: &StaticInstance, ids: &[RequestId], size: usize) -> Solution {
    let routes = ids
        .chunks(size)
        .map(|c| Route {
            vehicle_type: 0,
            visits: c.to_vec(),
            departure: 0,
        })
        .collect();
    Solution::from_routes(inst, routes).unwrap()
}

#[test]
fn local_search_keeps_optimal_pair_route() {
    let m = line(2, 10);
    let reqs = (1..=2).map(|i| Request::new(RequestId(i), i as usize, 1, 0, 0, 480, 0, 480)).collect();
    let inst = StaticInstance::new("pair", 0, reqs, m.clone(), m, 480, 0, FleetSpec::unlimited(10)).unwrap();
    let sol = chunked_solution(&inst, &[RequestId(1), RequestId(2)], 2);
    let out = local_search(&inst, &sol, PenaltyWeights::default(), &SolverParams::scenario_profile(), 0).unwrap();
    assert_eq!(out.cost, 40);
    assert_eq!(out.routes, sol.routes);
}

#[test]
fn local_search_fixes_crossed_route() {
    // visiting the far request first doubles back along the line
    let m = line(3, 10);
    let reqs = (1..=3).map(|i| Request::new(RequestId(i), i as usize, 1, 0, 0, 480, 0, 480)).collect();
    let inst = StaticInstance::new("cross", 0, reqs, m.clone(), m, 480, 0, FleetSpec::unlimited(10)).unwrap();
    let sol = chunked_solution(&inst, &[RequestId(3), RequestId(1), RequestId(2)], 3);
    assert_eq!(sol.cost, 30 + 20 + 10 + 20);
    let out = local_search(&inst, &sol, PenaltyWeights::default(), &SolverParams::scenario_profile(), 0).unwrap();
    assert_eq!(out.cost, 60);
}

#[test]
fn crossover_of_identical_parents_reproduces_parent() {
    let mut rng = rng_from(21);
    let inst = random_instance(&mut rng, 20, 30);
    let parent = solve(&inst, &SolverParams::scenario_profile(), StopCriterion::iterations(50), 1).unwrap();
    let child = crossover(&inst, &parent, &parent, 5).unwrap();
    let mut a: Vec<_> = parent.routes.iter().map(|r| r.visits.clone()).collect();
    let mut b: Vec<_> = child.routes.iter().map(|r| r.visits.clone()).collect();
    a.sort();
    b.sort();
    assert_eq!(a, b);
}

#[test]
fn crossover_rejects_mismatched_parents() {
    let mut rng = rng_from(22);
    let inst = random_instance(&mut rng, 6, 30);
    let full = singleton_solution(&inst);
    let mut partial = full.clone();
    partial.routes.pop();
    assert!(matches!(crossover(&inst, &full, &partial, 1), Err(Error::MismatchedParents)));
}

#[test]
fn crossover_of_disjoint_single_routes_covers_all() {
    let mut rng = rng_from(23);
    let inst = random_instance(&mut rng, 8, 100);
    let ids: Vec<RequestId> = inst.requests().iter().map(|r| r.id).collect();
    let a = chunked_solution(&inst, &ids, 8);
    let mut rev = ids.clone();
    rev.reverse();
    let b = chunked_solution(&inst, &rev, 8);
    let child = crossover(&inst, &a, &b, 9).unwrap();
    child.check_coverage(&inst).unwrap();
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn crossover_offspring_covers_every_request(seed in any::<u64>()) {
        let mut rng = rng_from(seed);
        let inst = random_instance(&mut rng, 50, 40);
        let mut ids: Vec<RequestId> = inst.requests().iter().map(|r| r.id).collect();
        rand::seq::SliceRandom::shuffle(ids.as_mut_slice(), &mut rng);
        let a = chunked_solution(&inst, &ids, 5);
        rand::seq::SliceRandom::shuffle(ids.as_mut_slice(), &mut rng);
        let b = chunked_solution(&inst, &ids, 7);
        let child = crossover(&inst, &a, &b, seed).unwrap();
        child.check_coverage(&inst).unwrap();
    }

    #[test]
    fn local_search_never_increases_penalized_cost(seed in any::<u64>(), size in 1usize..10, cap in 5i64..40) {
        let mut rng = rng_from(seed);
        let inst = random_instance(&mut rng, 30, cap);
        let mut ids: Vec<RequestId> = inst.requests().iter().map(|r| r.id).collect();
        rand::seq::SliceRandom::shuffle(ids.as_mut_slice(), &mut rng);
        let sol = chunked_solution(&inst, &ids, size);
        let w = PenaltyWeights { capacity: 1 + (seed % 30) as i64, time_warp: 1 + (seed % 7) as i64 };
        for params in [SolverParams::scenario_profile(), SolverParams::default_profile()] {
            let out = local_search(&inst, &sol, w, &params, seed).unwrap();
            out.check_coverage(&inst).unwrap();
            prop_assert!(penalized_cost(&inst, &out, w).unwrap() <= penalized_cost(&inst, &sol, w).unwrap());
        }
    }

    #[test]
    fn solve_covers_and_feasible_means_zero_violation(seed in any::<u64>()) {
        let mut rng = rng_from(seed);
        let inst = random_instance(&mut rng, 25, 20);
        let sol = solve(&inst, &SolverParams::scenario_profile(), StopCriterion::iterations(40), seed).unwrap();
        sol.check_coverage(&inst).unwrap();
        prop_assert_eq!(sol.feasible, sol.penalized_cost == sol.cost);
    }
}
