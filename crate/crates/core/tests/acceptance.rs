//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails. Pass criterion numbers as arguments to
//! run a subset, e.g. `cargo test --test acceptance -- 1 2 6`.

mod common;

use std::sync::Arc;
use std::time::{Duration, Instant};

use ddwp::bench::{
    fleet_comparison, prepare_episode, run_episode, sweep, BenchConfig, InvariantReport, PreparedEpisode,
    SweepDimension,
};
use ddwp::env::{solve_hindsight, EpochConfig, SolveBudget};
use ddwp::instgen::{
    build_class_matrix, ArrivalProcess, EpisodeSpec, InstanceClassSpec, TopologyStore, TopologyTag, WindowKind,
    WindowVariant, NUM_EPOCHS,
};
use ddwp::model::{evaluate_route, evaluate_route_forward, RequestId, Route};
use ddwp::policies::{icd_decide, rh_decide, IcdConfig, Policy};
use ddwp::rng::rng_from;
use ddwp::solver::{solve, SolverParams, StopCriterion};
use rand::Rng;

use common::dynamic::random_state;
use common::{brute_force_optimum, random_instance, random_windows_instance};

const SEED: u64 = 20_240_601;
const DESK_TOTAL: u32 = 150;

struct Verdict {
    pass: bool,
    detail: String,
}

impl Verdict {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Verdict {
            pass,
            detail: detail.into(),
        }
    }
}

fn report(n: usize, v: &Verdict) {
    println!("criterion {n}: {} - {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
}

fn secs(d: Duration) -> String {
    format!("{:.1} s", d.as_secs_f64())
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn segment_oracle() -> Verdict {
    let started = Instant::now();
    let mut rng = rng_from(SEED);
    let inst = random_windows_instance(&mut rng, 40);
    let mut mismatches = 0;
    for _ in 0..10_000 {
        let len = rng.gen_range(0..=25);
        let route = Route {
            vehicle_type: rng.gen_range(0..2),
            visits: (0..len).map(|_| RequestId(rng.gen_range(1..=40))).collect(),
            departure: 0,
        };
        mismatches += (evaluate_route(&route, &inst).unwrap() != evaluate_route_forward(&route, &inst).unwrap()) as usize;
    }
    let elapsed = started.elapsed();
    Verdict::new(
        mismatches == 0 && elapsed < Duration::from_secs(10),
        format!("{mismatches} mismatches on 10000 routes in {}", secs(elapsed)),
    )
}

fn exhaustive_optimality() -> Verdict {
    let started = Instant::now();
    let mut rng = rng_from(SEED + 2);
    let budget = StopCriterion::millis(1000).with_iterations(2000);
    let mut matched = 0;
    let mut below = 0;
    for k in 0..100u64 {
        let n = rng.gen_range(1..=7);
        let cap = rng.gen_range(10..=30);
        let inst = random_instance(&mut rng, n, cap);
        let opt = brute_force_optimum(&inst).expect("singleton routes are feasible");
        let sol = solve(&inst, &SolverParams::scenario_profile(), budget, k).unwrap();
        matched += (sol.feasible && sol.cost == opt) as usize;
        below += (sol.feasible && sol.cost < opt) as usize;
    }
    let elapsed = started.elapsed();
    Verdict::new(
        matched >= 95 && below == 0 && elapsed < Duration::from_secs(300),
        format!("optimum matched on {matched}/100 instances ({below} below the optimum) in {}", secs(elapsed)),
    )
}

fn random_states(count: usize, seed: u64) -> Vec<(Arc<EpochConfig>, ddwp::env::EpochState, Vec<RequestId>)> {
    let store = TopologyStore::synthetic(seed);
    let mut rng = rng_from(seed);
    (0..count)
        .map(|k| {
            let tag = TopologyTag::ALL[rng.gen_range(0..3)];
            let source = tag.sources()[rng.gen_range(0..2)];
            let class = InstanceClassSpec {
                topology: tag,
                arrivals: if rng.gen_bool(0.5) { ArrivalProcess::Homogeneous } else { ArrivalProcess::Unimodal },
                window: WindowVariant::ALL[rng.gen_range(0..6)],
                expected_total: 100,
            };
            let config = Arc::new(EpochConfig::new(
                store.get(source).unwrap(),
                class,
                SolveBudget::new(SolverParams::scenario_profile(), StopCriterion::iterations(50)),
            ));
            let epoch = rng.gen_range(1..NUM_EPOCHS);
            let (state, must) = random_state(&config, seed ^ k as u64, epoch);
            (config, state, must)
        })
        .collect()
}

fn degenerate_thresholds() -> Verdict {
    let budget = SolveBudget::new(SolverParams::scenario_profile(), StopCriterion::iterations(30));
    let mut icd = IcdConfig::double_threshold().with_budget(3, 10, budget);
    icd.dispatch_threshold = 0.5;
    icd.postpone_threshold = 0.5;
    let mut failures = 0;
    let mut nontrivial = 0;
    for (k, (config, state, must)) in random_states(100, SEED + 6).into_iter().enumerate() {
        let decision = icd_decide(&state, &must, &config, &icd, k as u64).unwrap();
        let undecided = state.requests.len() - must.len();
        nontrivial += (undecided > 0) as usize;
        let ok = if undecided == 0 {
            decision.trace.is_empty()
        } else {
            decision.trace.len() == 1 && decision.trace[0].undecided == 0
        };
        failures += (!ok) as usize;
    }
    Verdict::new(
        failures == 0,
        format!("{failures} of 100 states not fully classified after one iteration ({nontrivial} with undecided requests)"),
    )
}

fn rollout_equivalence() -> Verdict {
    let budget = SolveBudget::new(SolverParams::scenario_profile(), StopCriterion::iterations(100));
    let hamming = IcdConfig::hamming().with_budget(1, 1, budget.clone());
    let mut differ = 0;
    for (k, (config, state, must)) in random_states(100, SEED + 7).into_iter().enumerate() {
        let rh = rh_decide(&state, &must, &config, &budget, k as u64).unwrap();
        let icd = icd_decide(&state, &must, &config, &hamming, k as u64).unwrap();
        differ += (rh != icd.action) as usize;
    }
    Verdict::new(differ == 0, format!("{differ} of 100 states with differing actions"))
}

struct MatrixRun {
    episodes: Vec<PreparedEpisode>,
    /// `(episode index, policy name, cost)`
    costs: Vec<(usize, String, i64)>,
    invariants: InvariantReport,
    ordering_elapsed: Duration,
}

fn policy(bench: &BenchConfig, name: &str) -> Policy {
    if name == "greedy" {
        return Policy::Greedy;
    }
    bench.policies.iter().find(|p| p.name() == name).unwrap().clone()
}

/// Desk matrix: R and RC, homogeneous arrivals, TW2 and TW4, 20
/// replications. The ordering policies run on every episode; the remaining
/// policies on the first 50 episodes by replication.
fn desk_matrix(store: &TopologyStore, bench: &BenchConfig) -> MatrixRun {
    let started = Instant::now();
    let mut classes = vec![];
    for topology in [TopologyTag::R, TopologyTag::RC] {
        for hours in [2, 4] {
            classes.push(InstanceClassSpec {
                topology,
                arrivals: ArrivalProcess::Homogeneous,
                window: WindowVariant::new(WindowKind::Regular, hours),
                expected_total: DESK_TOTAL,
            });
        }
    }
    let mut specs = build_class_matrix(&classes, 20, SEED);
    specs.sort_by_key(|s| s.replication);
    let episodes: Vec<PreparedEpisode> = specs
        .iter()
        .map(|s| prepare_episode(store, s, &bench.routing, &bench.hindsight, false).unwrap())
        .collect();
    let mut costs = vec![];
    let mut invariants = InvariantReport::default();
    let mut ordering_elapsed = started.elapsed();
    for (names, limit) in [(["rh", "icd-postpone", "icd-double"], episodes.len()), (["greedy", "dshh", "icd-hamming"], 50)] {
        let phase = Instant::now();
        for (i, ep) in episodes.iter().enumerate().take(limit) {
            for name in names {
                let run = run_episode(Arc::clone(&ep.config), &ep.episode, &policy(bench, name)).unwrap();
                invariants.merge(&run.invariants);
                costs.push((i, name.to_string(), run.total_cost));
            }
        }
        if names[0] == "rh" {
            ordering_elapsed += phase.elapsed();
        }
    }
    MatrixRun {
        episodes,
        costs,
        invariants,
        ordering_elapsed,
    }
}

fn hindsight_bound(run: &MatrixRun, bench: &BenchConfig) -> Verdict {
    let pairs: Vec<_> = run.costs.iter().filter(|(i, _, _)| *i < 50).collect();
    let violations: Vec<_> = pairs.iter().filter(|(i, _, c)| *c < run.episodes[*i].hindsight).collect();
    let doubled = SolveBudget::new(bench.hindsight.params.clone(), bench.hindsight.stop.scaled(2.0));
    let mut not_shrinking = 0;
    let mut retried = std::collections::BTreeMap::new();
    for (i, _, _) in &violations {
        let ep = &run.episodes[*i];
        let better = *retried
            .entry(*i)
            .or_insert_with(|| solve_hindsight(&ep.config, &ep.episode, &doubled).unwrap());
        not_shrinking += (better >= ep.hindsight) as usize;
    }
    let share = 1.0 - violations.len() as f64 / pairs.len() as f64;
    Verdict::new(
        share >= 0.98 && not_shrinking == 0,
        format!(
            "{:.1}% of {} (episode, policy) pairs at or above hindsight; {} violations, {} not shrinking with doubled budget",
            100.0 * share,
            pairs.len(),
            violations.len(),
            not_shrinking
        ),
    )
}

fn mean_gap(run: &MatrixRun, policy: &str) -> f64 {
    let gaps: Vec<f64> = run
        .costs
        .iter()
        .filter(|(_, p, _)| p == policy)
        .map(|(i, _, c)| ddwp::env::gap_percent(*c, run.episodes[*i].hindsight))
        .collect();
    mean(&gaps)
}

fn ordering(run: &MatrixRun) -> Verdict {
    let (double, rh, postpone) = (mean_gap(run, "icd-double"), mean_gap(run, "rh"), mean_gap(run, "icd-postpone"));
    let others: Vec<String> = ["greedy", "dshh", "icd-hamming"]
        .iter()
        .map(|p| format!("{p} {:.2}%", mean_gap(run, p)))
        .collect();
    Verdict::new(
        double < rh && double < postpone && run.ordering_elapsed < Duration::from_secs(7200),
        format!(
            "mean gap icd-double {double:.2}% vs rh {rh:.2}% and icd-postpone {postpone:.2}% over {} episodes in {} (first 50: {})",
            run.episodes.len(),
            secs(run.ordering_elapsed),
            others.join(", ")
        ),
    )
}

fn uni_tw_episodes(count: usize, seed: u64) -> Vec<EpisodeSpec> {
    let classes: Vec<InstanceClassSpec> = TopologyTag::ALL
        .iter()
        .flat_map(|&topology| {
            [2, 4].map(|hours| InstanceClassSpec {
                topology,
                arrivals: ArrivalProcess::Unimodal,
                window: WindowVariant::new(WindowKind::Regular, hours),
                expected_total: DESK_TOTAL,
            })
        })
        .collect();
    let mut specs = build_class_matrix(&classes, 4, seed);
    specs.sort_by_key(|s| s.replication);
    specs.truncate(count);
    specs
}

fn sweep_trends(store: &TopologyStore, bench: &BenchConfig) -> Verdict {
    let budgets = [0.25, 0.5, 0.75, 1.0, 2.0, 4.0];
    let points = sweep(&uni_tw_episodes(4, SEED + 8), store, bench, SweepDimension::ScenarioBudget, &budgets).unwrap();
    let at = |pts: &[ddwp::bench::SweepPoint], policy: &str, value: f64| {
        pts.iter().find(|p| p.policy == policy && p.value == value).unwrap().mean_gap
    };
    let mut budget_ok = true;
    let mut lines = vec![];
    for name in ["rh", "dshh", "icd-postpone", "icd-hamming", "icd-double"] {
        let (lo, hi) = (at(&points, name, 0.25), at(&points, name, 4.0));
        budget_ok &= hi <= lo;
        lines.push(format!("{name} {lo:.2}%->{hi:.2}%"));
    }
    let iterations = sweep(&uni_tw_episodes(6, SEED + 9), store, bench, SweepDimension::Iterations, &[1.0, 3.0]).unwrap();
    let mut iter_ok = true;
    for name in ["dshh", "icd-postpone", "icd-double"] {
        let (one, three) = (at(&iterations, name, 1.0), at(&iterations, name, 3.0));
        iter_ok &= three <= one;
        lines.push(format!("{name} it1 {one:.2}% it3 {three:.2}%"));
    }
    Verdict::new(
        budget_ok && iter_ok,
        format!("budget 0.25x->4x: {}", lines.join(", ")),
    )
}

fn limited_fleet(store: &TopologyStore, bench: &BenchConfig, invariants: &mut InvariantReport) -> Verdict {
    let mut fleet_bench = bench.clone();
    fleet_bench.policies = vec![policy(bench, "icd-double")];
    let episodes = uni_tw_episodes(10, SEED + 10);
    let points = fleet_comparison(&episodes, store, &fleet_bench).unwrap();
    let greedy: Vec<_> = points.iter().filter(|p| p.policy == "greedy").collect();
    let with_secondaries = greedy.iter().filter(|p| p.secondaries > 0).count();
    let mut fleet = InvariantReport::default();
    for p in &points {
        fleet.merge(&p.invariants);
    }
    invariants.merge(&fleet);
    let icd: Vec<_> = points.iter().filter(|p| p.policy == "icd-double").collect();
    let unlimited = mean(&icd.iter().map(|p| p.unlimited_gap).collect::<Vec<_>>());
    let limited = mean(&icd.iter().map(|p| p.limited_gap).collect::<Vec<_>>());
    Verdict::new(
        with_secondaries == 0 && fleet.fleet_accounting == 0 && greedy.len() == episodes.len(),
        format!(
            "greedy replay used secondaries on {with_secondaries}/{} episodes; {} accounting errors over {} steps; icd-double gap unlimited {unlimited:.2}% limited {limited:.2}%",
            greedy.len(),
            fleet.fleet_accounting,
            fleet.steps
        ),
    )
}

fn main() {
    let selected: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let wants = |n: usize| selected.is_empty() || selected.contains(&n);
    let store = TopologyStore::synthetic(SEED);
    let bench = BenchConfig::desk();
    let mut verdicts: Vec<(usize, Verdict)> = vec![];
    let mut record = |n: usize, v: Verdict| {
        report(n, &v);
        verdicts.push((n, v));
    };

    if wants(1) {
        record(1, segment_oracle());
    }
    if wants(2) {
        record(2, exhaustive_optimality());
    }
    if wants(6) {
        record(6, degenerate_thresholds());
    }
    if wants(7) {
        record(7, rollout_equivalence());
    }
    let mut invariants = InvariantReport::default();
    if wants(3) || wants(4) || wants(5) {
        let run = desk_matrix(&store, &bench);
        invariants.merge(&run.invariants);
        if wants(3) {
            record(3, hindsight_bound(&run, &bench));
        }
        if wants(4) {
            record(4, ordering(&run));
        }
    }
    if wants(8) {
        record(8, sweep_trends(&store, &bench));
    }
    if wants(9) || wants(5) {
        let v = limited_fleet(&store, &bench, &mut invariants);
        if wants(9) {
            record(9, v);
        }
    }
    if wants(5) {
        record(
            5,
            Verdict::new(
                invariants.violations() == 0 && invariants.steps > 0,
                format!(
                    "{} steps checked: must-dispatch {}, overlap {}, undecided growth {}, conservation {}, fleet accounting {}",
                    invariants.steps,
                    invariants.must_dispatch,
                    invariants.overlap,
                    invariants.undecided_growth,
                    invariants.conservation,
                    invariants.fleet_accounting
                ),
            ),
        );
    }

    verdicts.sort_by_key(|(n, _)| *n);
    println!("\nacceptance summary");
    for (n, v) in &verdicts {
        report(*n, v);
    }
    let failed = verdicts.iter().filter(|(_, v)| !v.pass).count();
    println!("{} passed, {failed} failed", verdicts.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
