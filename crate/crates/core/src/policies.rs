//! Dispatch policies: iterative conditional dispatch (ICD) with threshold
//! or Hamming consensus, rollout on a single scenario, and greedy.
//!
//! ICD repeatedly samples scenarios (the known requests plus sampled
//! requests of the next epochs), solves them as static problems, and
//! classifies requests as dispatch or postpone based on how the scenario
//! solutions treat them. Classified requests are then fixed in later
//! scenarios through their dispatch windows.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::env::{Action, EpochConfig, EpochState, FleetMode, SolveBudget};
use crate::instgen::sample_epoch_requests;
use crate::model::{FleetSpec, RequestId, Solution, StaticInstance, VehicleType};
use crate::rng::{child_rng, derive_seed, stream, Rng};
use crate::solver::{SolverParams, StopCriterion};
use crate::{Error, Result};

/// Sampled scenario requests get ids from this offset upward, clear of
/// realized request ids.
pub const SCENARIO_ID_BASE: u32 = 1 << 30;

pub type IdSet = BTreeSet<RequestId>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Consensus {
    /// Dispatch at `φ ≥ ε_D`, postpone at `φ < ε_P`.
    DoubleThreshold,
    /// Dispatch threshold only.
    DispatchThreshold,
    /// Postpone threshold only; everything not postponed is dispatched.
    PostponeThreshold,
    /// Adopt the scenario dispatch set with minimum average Hamming
    /// distance; postpone what no scenario dispatches.
    Hamming,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IcdConfig {
    pub consensus: Consensus,
    pub iterations: usize,
    pub scenarios: usize,
    pub lookahead: usize,
    pub dispatch_threshold: f64,
    pub postpone_threshold: f64,
    pub scenario_budget: SolveBudget,
}

impl IcdConfig {
    fn base(consensus: Consensus, dispatch_threshold: f64, postpone_threshold: f64) -> Self {
        IcdConfig {
            consensus,
            iterations: 3,
            scenarios: 30,
            lookahead: 1,
            dispatch_threshold,
            postpone_threshold,
            scenario_budget: SolveBudget::new(SolverParams::scenario_profile(), StopCriterion::millis(1000)),
        }
    }

    pub fn double_threshold() -> Self {
        Self::base(Consensus::DoubleThreshold, 0.5, 0.2)
    }

    pub fn dispatch_threshold() -> Self {
        Self::base(Consensus::DispatchThreshold, 0.5, 0.0)
    }

    pub fn postpone_threshold() -> Self {
        Self::base(Consensus::PostponeThreshold, 1.0, 0.3)
    }

    pub fn hamming() -> Self {
        Self::base(Consensus::Hamming, 0.5, 0.2)
    }

    pub fn with_budget(mut self, iterations: usize, scenarios: usize, budget: SolveBudget) -> Self {
        self.iterations = iterations;
        self.scenarios = scenarios;
        self.scenario_budget = budget;
        self
    }

    fn thresholds(&self) -> (Option<f64>, Option<f64>) {
        match self.consensus {
            Consensus::DoubleThreshold => (Some(self.dispatch_threshold), Some(self.postpone_threshold)),
            Consensus::DispatchThreshold => (Some(self.dispatch_threshold), None),
            Consensus::PostponeThreshold => (None, Some(self.postpone_threshold)),
            Consensus::Hamming => (None, None),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 || self.scenarios == 0 {
            return Err(Error::Config("iterations and scenarios must be positive".into()));
        }
        for eps in [self.dispatch_threshold, self.postpone_threshold] {
            if !(0.0..=1.0).contains(&eps) {
                return Err(Error::Config(format!("threshold {eps} outside [0, 1]")));
            }
        }
        if self.dispatch_threshold < self.postpone_threshold {
            return Err(Error::ThresholdOrder {
                dispatch: self.dispatch_threshold,
                postpone: self.postpone_threshold,
            });
        }
        self.scenario_budget.params.validate()?;
        self.scenario_budget.stop.validate()
    }
}

/// Known requests plus sampled arrivals of up to `lookahead` future
/// epochs. Requests in `dispatch` must leave now, requests in `postpone`
/// no earlier than the next epoch.
pub fn build_scenario(
    state: &EpochState,
    dispatch: &IdSet,
    postpone: &IdSet,
    config: &EpochConfig,
    lookahead: usize,
    rng: &mut Rng,
) -> Result<StaticInstance> {
    if let Some(&id) = dispatch.intersection(postpone).next() {
        return Err(Error::OverlappingDecisions(id));
    }
    let t = state.epoch;
    let now = state.time;
    let horizon = config.horizon();
    let last = (t + lookahead).min(config.num_epochs());

    let mut requests = Vec::with_capacity(state.requests.len());
    for r in &state.requests {
        let req = if dispatch.contains(&r.id) {
            r.clone().with_dispatch_window(now, now)
        } else if postpone.contains(&r.id) {
            if t == config.num_epochs() {
                return Err(Error::InvalidAction(format!("request {} postponed past the final epoch", r.id)));
            }
            r.clone().with_dispatch_window(config.epoch_time(t + 1), horizon)
        } else {
            r.clone().with_dispatch_window(r.release, horizon)
        };
        requests.push(req);
    }
    let mut next_id = SCENARIO_ID_BASE;
    for future in (t + 1)..=last {
        let sampled = sample_epoch_requests(&config.topology, &config.class, future, next_id, rng);
        next_id += sampled.len() as u32;
        requests.extend(sampled);
    }
    config
        .topology
        .derive(format!("scenario-{t}"), requests, now, scenario_fleet(state, config, last))
}

fn scenario_fleet(state: &EpochState, config: &EpochConfig, last: usize) -> FleetSpec {
    let cap = config.capacity();
    match &config.fleet {
        FleetMode::Unlimited => FleetSpec::unlimited(cap),
        FleetMode::Limited {
            primaries,
            secondary_fixed_cost,
        } => {
            let mut classes = vec![VehicleType {
                count: Some(state.primaries.unwrap_or(0)),
                capacity: cap,
                fixed_cost: 0,
                available_from: state.time,
            }];
            for future in (state.epoch + 1)..=last {
                classes.push(VehicleType {
                    count: Some(primaries[future - 1]),
                    capacity: cap,
                    fixed_cost: 0,
                    available_from: config.epoch_time(future),
                });
            }
            classes.push(VehicleType {
                count: None,
                capacity: cap,
                fixed_cost: *secondary_fixed_cost,
                available_from: state.time,
            });
            FleetSpec { classes }
        }
    }
}

/// A solved scenario and the known requests it dispatches now.
#[derive(Debug, Clone)]
pub struct ScenarioSolution {
    pub scenario: usize,
    pub solution: Solution,
    pub dispatched: IdSet,
}

/// Known requests whose route departs at `state.time`.
pub fn dispatched_now(state: &EpochState, solution: &Solution) -> IdSet {
    let known: IdSet = state.requests.iter().map(|r| r.id).collect();
    solution
        .routes
        .iter()
        .filter(|r| r.departure == state.time)
        .flat_map(|r| r.visits.iter().copied())
        .filter(|id| known.contains(id))
        .collect()
}

/// Solves each scenario independently. Scenarios whose solve fails or
/// ends infeasible are dropped.
pub fn solve_scenarios(
    state: &EpochState,
    scenarios: &[StaticInstance],
    budget: &SolveBudget,
    seeds: &[u64],
) -> Vec<ScenarioSolution> {
    scenarios
        .par_iter()
        .zip(seeds.par_iter())
        .enumerate()
        .filter_map(|(k, (inst, &seed))| match budget.solve(inst, seed) {
            Ok(sol) if sol.feasible => Some(ScenarioSolution {
                scenario: k,
                dispatched: dispatched_now(state, &sol),
                solution: sol,
            }),
            Ok(_) => {
                log::warn!("scenario {k} at epoch {} ended infeasible; dropped", state.epoch);
                None
            }
            Err(e) => {
                log::warn!("scenario {k} at epoch {} failed: {e}; dropped", state.epoch);
                None
            }
        })
        .collect()
}

/// Fraction of scenario solutions that dispatch `id` now.
pub fn dispatch_score(id: RequestId, solutions: &[ScenarioSolution]) -> Result<f64> {
    if solutions.is_empty() {
        return Err(Error::NoScenarioSolutions);
    }
    let hits = solutions.iter().filter(|s| s.dispatched.contains(&id)).count();
    Ok(hits as f64 / solutions.len() as f64)
}

/// Threshold consensus over the `undecided` requests. A missing threshold
/// disables that side.
pub fn threshold_update(
    undecided: &[RequestId],
    solutions: &[ScenarioSolution],
    dispatch: &mut IdSet,
    postpone: &mut IdSet,
    dispatch_threshold: Option<f64>,
    postpone_threshold: Option<f64>,
) -> Result<()> {
    if let (Some(d), Some(p)) = (dispatch_threshold, postpone_threshold) {
        if d < p {
            return Err(Error::ThresholdOrder {
                dispatch: d,
                postpone: p,
            });
        }
    }
    for &id in undecided {
        let score = dispatch_score(id, solutions)?;
        if dispatch_threshold.is_some_and(|eps| score >= eps) {
            dispatch.insert(id);
        } else if postpone_threshold.is_some_and(|eps| score < eps) {
            postpone.insert(id);
        }
    }
    Ok(())
}

/// Index of the solution with minimum average symmetric difference to all
/// others; ties go to the lowest index.
pub fn hamming_center(solutions: &[ScenarioSolution]) -> Result<usize> {
    if solutions.is_empty() {
        return Err(Error::NoScenarioSolutions);
    }
    let total = |a: &IdSet| -> usize {
        solutions
            .iter()
            .map(|b| a.symmetric_difference(&b.dispatched).count())
            .sum()
    };
    let mut best = (usize::MAX, 0);
    for (k, s) in solutions.iter().enumerate() {
        let d = total(&s.dispatched);
        if d < best.0 {
            best = (d, k);
        }
    }
    Ok(best.1)
}

/// Hamming consensus: dispatch the central solution's dispatch set,
/// postpone undecided requests that no solution dispatches.
pub fn hamming_update(
    undecided: &[RequestId],
    solutions: &[ScenarioSolution],
    dispatch: &mut IdSet,
    postpone: &mut IdSet,
) -> Result<()> {
    let center = hamming_center(solutions)?;
    dispatch.extend(solutions[center].dispatched.iter().copied());
    for &id in undecided {
        if !dispatch.contains(&id) && solutions.iter().all(|s| !s.dispatched.contains(&id)) {
            postpone.insert(id);
        }
    }
    Ok(())
}

/// State of the classification after one ICD iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    pub iteration: usize,
    pub solved: usize,
    pub dispatch: usize,
    pub postpone: usize,
    pub undecided: usize,
    /// Dispatch sets and postpone sets overlapped.
    pub overlap: bool,
    /// Decile histogram of dispatch scores over the undecided requests.
    pub score_histogram: [usize; 10],
}

#[derive(Debug, Clone)]
pub struct Decision {
    pub action: Action,
    pub trace: Vec<IterationTrace>,
}

fn scenario_seeds(seed: u64, t: usize, iteration: usize, k: usize) -> (u64, u64) {
    let key = |part| derive_seed(seed, &[stream::POLICY, t as u64, iteration as u64, k as u64, part]);
    (key(0), key(1))
}

fn sample_and_solve(
    state: &EpochState,
    config: &EpochConfig,
    dispatch: &IdSet,
    postpone: &IdSet,
    icd: &IcdConfig,
    iteration: usize,
    seed: u64,
) -> Result<Vec<ScenarioSolution>> {
    let mut instances = Vec::with_capacity(icd.scenarios);
    let mut solve_seeds = Vec::with_capacity(icd.scenarios);
    for k in 0..icd.scenarios {
        let (sample_seed, solve_seed) = scenario_seeds(seed, state.epoch, iteration, k);
        let mut rng = child_rng(sample_seed, &[]);
        instances.push(build_scenario(state, dispatch, postpone, config, icd.lookahead, &mut rng)?);
        solve_seeds.push(solve_seed);
    }
    Ok(solve_scenarios(state, &instances, &icd.scenario_budget, &solve_seeds))
}

/// Iterative conditional dispatch. Starts with the must-dispatch requests
/// in the dispatch set and runs sample–solve–classify rounds until every
/// request is classified or the iteration limit is hit.
pub fn icd_decide(
    state: &EpochState,
    must: &[RequestId],
    config: &EpochConfig,
    icd: &IcdConfig,
    seed: u64,
) -> Result<Decision> {
    icd.validate()?;
    let mut dispatch: IdSet = must.iter().copied().collect();
    let mut postpone = IdSet::new();
    let mut trace = Vec::new();
    let (eps_d, eps_p) = icd.thresholds();

    for iteration in 0..icd.iterations {
        let undecided: Vec<RequestId> = state
            .requests
            .iter()
            .map(|r| r.id)
            .filter(|id| !dispatch.contains(id) && !postpone.contains(id))
            .collect();
        if undecided.is_empty() {
            break;
        }
        let solutions = sample_and_solve(state, config, &dispatch, &postpone, icd, iteration, seed)?;
        let mut histogram = [0usize; 10];
        if !solutions.is_empty() {
            for &id in &undecided {
                let score = dispatch_score(id, &solutions)?;
                histogram[((score * 10.0) as usize).min(9)] += 1;
            }
            match icd.consensus {
                Consensus::Hamming => hamming_update(&undecided, &solutions, &mut dispatch, &mut postpone)?,
                _ => threshold_update(&undecided, &solutions, &mut dispatch, &mut postpone, eps_d, eps_p)?,
            }
        }
        let classified = dispatch.len() + postpone.len();
        let overlap = dispatch.intersection(&postpone).next().is_some();
        let entry = IterationTrace {
            iteration,
            solved: solutions.len(),
            dispatch: dispatch.len(),
            postpone: postpone.len(),
            undecided: state.requests.len().saturating_sub(classified),
            overlap,
            score_histogram: histogram,
        };
        log::debug!(
            "epoch {} iteration {}: solved {} dispatch {} postpone {} undecided {} scores {:?}",
            state.epoch,
            iteration,
            entry.solved,
            entry.dispatch,
            entry.postpone,
            entry.undecided,
            entry.score_histogram
        );
        trace.push(entry);
        if overlap {
            let id = *dispatch.intersection(&postpone).next().unwrap();
            return Err(Error::OverlappingDecisions(id));
        }
    }

    let mut chosen: IdSet = match icd.consensus {
        Consensus::PostponeThreshold => state
            .requests
            .iter()
            .map(|r| r.id)
            .filter(|id| !postpone.contains(id))
            .collect(),
        _ => dispatch,
    };
    chosen.extend(must.iter().copied());
    Ok(Decision {
        action: Action::all_primaries(state, chosen.into_iter().collect()),
        trace,
    })
}

/// Rollout on a single sampled scenario: dispatch what its solution
/// dispatches now, plus the must-dispatch requests.
pub fn rh_decide(
    state: &EpochState,
    must: &[RequestId],
    config: &EpochConfig,
    budget: &SolveBudget,
    seed: u64,
) -> Result<Action> {
    let forced: IdSet = must.iter().copied().collect();
    let mut chosen = forced.clone();
    if forced.len() < state.requests.len() {
        let (sample_seed, solve_seed) = scenario_seeds(seed, state.epoch, 0, 0);
        let mut rng = child_rng(sample_seed, &[]);
        let inst = build_scenario(state, &forced, &IdSet::new(), config, 1, &mut rng)?;
        if let Some(sol) = solve_scenarios(state, &[inst], budget, &[solve_seed]).pop() {
            chosen.extend(sol.dispatched);
        }
    }
    Ok(Action::all_primaries(state, chosen.into_iter().collect()))
}

/// Dispatch every known request.
pub fn greedy_decide(state: &EpochState) -> Action {
    Action::all_primaries(state, state.ids())
}

/// A dispatch policy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Policy {
    Greedy,
    Rollout { budget: SolveBudget },
    Icd(IcdConfig),
}

impl Policy {
    pub fn name(&self) -> &'static str {
        match self {
            Policy::Greedy => "greedy",
            Policy::Rollout { .. } => "rh",
            Policy::Icd(c) => match c.consensus {
                Consensus::DoubleThreshold => "icd-double",
                Consensus::DispatchThreshold => "dshh",
                Consensus::PostponeThreshold => "icd-postpone",
                Consensus::Hamming => "icd-hamming",
            },
        }
    }

    pub fn decide(&self, state: &EpochState, must: &[RequestId], config: &EpochConfig, seed: u64) -> Result<Decision> {
        match self {
            Policy::Greedy => Ok(Decision {
                action: greedy_decide(state),
                trace: vec![],
            }),
            Policy::Rollout { budget } => Ok(Decision {
                action: rh_decide(state, must, config, budget, seed)?,
                trace: vec![],
            }),
            Policy::Icd(icd) => icd_decide(state, must, config, icd, seed),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sol(k: usize, ids: &[u32]) -> ScenarioSolution {
        ScenarioSolution {
            scenario: k,
            solution: Solution {
                routes: vec![],
                cost: 0,
                penalized_cost: 0,
                feasible: true,
            },
            dispatched: ids.iter().map(|&i| RequestId(i)).collect(),
        }
    }

    #[test]
    fn threshold_classification() {
        // scores: a = 0.9, b = 0.1, c = 0.4
        let sols: Vec<_> = (0..10)
            .map(|k| {
                let mut ids = vec![];
                if k < 9 {
                    ids.push(1);
                }
                if k < 1 {
                    ids.push(2);
                }
                if k < 4 {
                    ids.push(3);
                }
                sol(k, &ids)
            })
            .collect();
        let ids = [RequestId(1), RequestId(2), RequestId(3)];
        let (mut d, mut p) = (IdSet::new(), IdSet::new());
        threshold_update(&ids, &sols, &mut d, &mut p, Some(0.5), Some(0.2)).unwrap();
        assert_eq!(d, IdSet::from([RequestId(1)]));
        assert_eq!(p, IdSet::from([RequestId(2)]));

        let (mut d, mut p) = (IdSet::new(), IdSet::new());
        threshold_update(&ids, &sols, &mut d, &mut p, Some(0.5), None).unwrap();
        assert!(p.is_empty());

        let err = threshold_update(&ids, &sols, &mut d, &mut p, Some(0.2), Some(0.5));
        assert!(matches!(err, Err(Error::ThresholdOrder { .. })));
    }

    #[test]
    fn dispatch_scores() {
        let sols: Vec<_> = (0..30).map(|k| sol(k, if k < 15 { &[1] } else { &[] })).collect();
        assert_eq!(dispatch_score(RequestId(1), &sols).unwrap(), 0.5);
        assert!(matches!(dispatch_score(RequestId(1), &[]), Err(Error::NoScenarioSolutions)));
    }

    #[test]
    fn hamming_picks_central_solution() {
        let sols = vec![sol(0, &[1]), sol(1, &[1]), sol(2, &[2, 3])];
        assert_eq!(hamming_center(&sols).unwrap(), 0);
        let ids = [RequestId(1), RequestId(2), RequestId(3)];
        let (mut d, mut p) = (IdSet::new(), IdSet::new());
        hamming_update(&ids, &sols, &mut d, &mut p).unwrap();
        assert_eq!(d, IdSet::from([RequestId(1)]));
        assert!(p.is_empty());

        let same = vec![sol(0, &[1, 2]), sol(1, &[1, 2])];
        let (mut d, mut p) = (IdSet::new(), IdSet::new());
        hamming_update(&ids, &same, &mut d, &mut p).unwrap();
        assert_eq!(p, IdSet::from([RequestId(3)]));
        assert_eq!(hamming_center(&[sol(0, &[1]), sol(1, &[2])]).unwrap(), 0);
    }
}
