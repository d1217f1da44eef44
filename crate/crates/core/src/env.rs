//! Episode engine for the dynamic dispatch waves problem.
//!
//! An episode runs over a fixed sequence of epochs. At each epoch new
//! requests are revealed, the policy picks a subset of the known
//! undispatched requests, and that subset is routed with every route
//! leaving the depot at the epoch start. Requests that would become
//! unservable if postponed must be dispatched.

use std::collections::HashSet;
use std::io::Write;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::instgen::{epoch_start, sample_epoch_requests, InstanceClassSpec, NUM_EPOCHS};
use crate::model::{Cost, FleetSpec, Request, RequestId, Route, Solution, StaticInstance, Time, VehicleType};
use crate::rng::{child_rng, derive_seed, stream};
use crate::solver::{solve, SolverParams, StopCriterion};
use crate::{Error, Result};

/// Fixed cost of hiring a secondary vehicle: two hours of travel time.
pub const SECONDARY_FIXED_COST: Cost = 7200;

/// Solver profile plus stopping rule for one static solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveBudget {
    pub params: SolverParams,
    pub stop: StopCriterion,
}

impl SolveBudget {
    pub fn new(params: SolverParams, stop: StopCriterion) -> Self {
        SolveBudget { params, stop }
    }

    pub fn solve(&self, instance: &StaticInstance, seed: u64) -> Result<Solution> {
        solve(instance, &self.params, self.stop, seed)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum FleetMode {
    Unlimited,
    /// `primaries[t - 1]` zero-cost vehicles become available at epoch `t`;
    /// any further vehicle costs `secondary_fixed_cost`.
    Limited {
        primaries: Vec<usize>,
        secondary_fixed_cost: Cost,
    },
}

/// Static description of an episode family.
#[derive(Debug, Clone)]
pub struct EpochConfig {
    pub topology: Arc<StaticInstance>,
    pub class: InstanceClassSpec,
    /// `T_1 .. T_final`.
    pub epochs: Vec<Time>,
    pub fleet: FleetMode,
    /// Budget for routing the dispatched requests of one epoch.
    pub routing: SolveBudget,
}

impl EpochConfig {
    /// Eight one-hour epochs on `topology` with an unlimited fleet.
    pub fn new(topology: Arc<StaticInstance>, class: InstanceClassSpec, routing: SolveBudget) -> Self {
        EpochConfig {
            topology,
            class,
            epochs: (1..=NUM_EPOCHS).map(epoch_start).collect(),
            fleet: FleetMode::Unlimited,
            routing,
        }
    }

    pub fn with_fleet(mut self, fleet: FleetMode) -> Self {
        self.fleet = fleet;
        self
    }

    pub fn horizon(&self) -> Time {
        self.topology.horizon()
    }

    pub fn num_epochs(&self) -> usize {
        self.epochs.len()
    }

    /// Start time of epoch `t` (1-based).
    pub fn epoch_time(&self, t: usize) -> Time {
        self.epochs[t - 1]
    }

    pub fn is_final(&self, t: usize) -> bool {
        t == self.epochs.len()
    }

    pub fn capacity(&self) -> i64 {
        self.topology.fleet().classes[0].capacity
    }

    pub fn validate(&self) -> Result<()> {
        if self.epochs.is_empty() || self.epochs.len() > NUM_EPOCHS {
            return Err(Error::Config(format!("between 1 and {NUM_EPOCHS} epochs required")));
        }
        if self.epochs.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("epoch start times must be strictly increasing".into()));
        }
        if self.epochs.iter().enumerate().any(|(i, &t)| t != epoch_start(i + 1)) {
            return Err(Error::Config("epochs must start on the hourly grid".into()));
        }
        if *self.epochs.last().unwrap() >= self.horizon() {
            return Err(Error::Config("final epoch must start before the horizon".into()));
        }
        if let FleetMode::Limited { primaries, .. } = &self.fleet {
            if primaries.len() != self.epochs.len() {
                return Err(Error::Config("one primary count per epoch required".into()));
            }
        }
        self.routing.params.validate()?;
        self.routing.stop.validate()
    }

    /// Requests of `requests` that cannot wait for the next epoch. At the
    /// final epoch every request must go.
    pub fn must_dispatch(&self, t: usize, requests: &[Request]) -> Vec<RequestId> {
        if self.is_final(t) {
            return requests.iter().map(|r| r.id).collect();
        }
        let next = self.epoch_time(t + 1);
        let depot = self.topology.depot();
        let horizon = self.horizon();
        requests
            .iter()
            .filter(|r| {
                let out = self.topology.duration(depot, r.location);
                let back = self.topology.duration(r.location, depot);
                next + out > r.tw_late || (next + out).max(r.tw_early) + r.service + back > horizon
            })
            .map(|r| r.id)
            .collect()
    }

    /// Fleet for routing at epoch `t` with `primaries` zero-cost vehicles.
    pub fn epoch_fleet(&self, t: usize, primaries: usize) -> FleetSpec {
        let cap = self.capacity();
        match &self.fleet {
            FleetMode::Unlimited => FleetSpec::unlimited(cap),
            FleetMode::Limited {
                secondary_fixed_cost, ..
            } => FleetSpec {
                classes: vec![
                    VehicleType {
                        count: Some(primaries),
                        capacity: cap,
                        fixed_cost: 0,
                        available_from: self.epoch_time(t),
                    },
                    VehicleType {
                        count: None,
                        capacity: cap,
                        fixed_cost: *secondary_fixed_cost,
                        available_from: self.epoch_time(t),
                    },
                ],
            },
        }
    }

    /// Number of primary vehicles that become available at epoch `t`.
    pub fn planned_primaries(&self, t: usize) -> Option<usize> {
        match &self.fleet {
            FleetMode::Unlimited => None,
            FleetMode::Limited { primaries, .. } => primaries.get(t - 1).copied(),
        }
    }
}

/// Realized arrivals of one episode; `arrivals[t - 1]` is revealed at
/// epoch `t`. Request ids are unique across the episode.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Episode {
    pub seed: u64,
    pub arrivals: Vec<Vec<Request>>,
}

impl Episode {
    pub fn requests(&self) -> impl Iterator<Item = &Request> {
        self.arrivals.iter().flatten()
    }

    pub fn num_requests(&self) -> usize {
        self.arrivals.iter().map(Vec::len).sum()
    }
}

/// Samples every epoch's arrivals. Each epoch draws from its own child
/// stream so policies cannot perturb the realization.
pub fn realize_episode(config: &EpochConfig, seed: u64) -> Episode {
    let mut next_id = 1;
    let arrivals = (1..=config.num_epochs())
        .map(|t| {
            let mut rng = child_rng(seed, &[stream::ARRIVALS, t as u64]);
            let reqs = sample_epoch_requests(&config.topology, &config.class, t, next_id, &mut rng);
            next_id += reqs.len() as u32;
            reqs
        })
        .collect();
    Episode { seed, arrivals }
}

/// Static problem over all realized requests with dispatch windows
/// `[release, H]`; its optimum lower-bounds every policy's episode cost.
pub fn hindsight_instance(config: &EpochConfig, episode: &Episode) -> Result<StaticInstance> {
    if episode.arrivals.len() != config.num_epochs() {
        return Err(Error::IncompleteEpisode {
            realized: episode.arrivals.len(),
            expected: config.num_epochs(),
        });
    }
    let horizon = config.horizon();
    let requests = episode
        .requests()
        .map(|r| r.clone().with_dispatch_window(r.release, horizon))
        .collect();
    config.topology.derive(
        format!("hindsight-{}", episode.seed),
        requests,
        config.epoch_time(1),
        FleetSpec::unlimited(config.capacity()),
    )
}

/// Solves the hindsight problem; zero for an episode without requests.
pub fn solve_hindsight(config: &EpochConfig, episode: &Episode, budget: &SolveBudget) -> Result<Cost> {
    let inst = hindsight_instance(config, episode)?;
    if inst.is_empty() {
        return Ok(0);
    }
    let sol = budget.solve(&inst, derive_seed(episode.seed, &[stream::HINDSIGHT]))?;
    if !sol.feasible {
        return Err(Error::InvalidInstance("hindsight solve found no feasible solution".into()));
    }
    Ok(sol.cost)
}

/// What the policy observes at an epoch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochState {
    /// 1-based epoch index.
    pub epoch: usize,
    pub time: Time,
    /// Known, undispatched requests.
    pub requests: Vec<Request>,
    /// Primary vehicles on hand (limited fleet only).
    pub primaries: Option<usize>,
}

impl EpochState {
    pub fn ids(&self) -> Vec<RequestId> {
        self.requests.iter().map(|r| r.id).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Action {
    pub dispatch: Vec<RequestId>,
    /// Primary vehicles offered to the router (limited fleet only).
    pub primaries: Option<usize>,
}

impl Action {
    pub fn new(dispatch: Vec<RequestId>) -> Self {
        Action {
            dispatch,
            primaries: None,
        }
    }

    /// Dispatches `dispatch` and offers every primary vehicle on hand.
    pub fn all_primaries(state: &EpochState, dispatch: Vec<RequestId>) -> Self {
        Action {
            dispatch,
            primaries: state.primaries,
        }
    }
}

/// One line of the episode log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub time: Time,
    pub arrivals: usize,
    pub must_dispatch: usize,
    pub dispatched: usize,
    pub cost: Cost,
    pub routes: Vec<Vec<u32>>,
    pub primaries_available: Option<usize>,
    pub primaries_used: usize,
    pub secondaries_used: usize,
    /// The router's solution was infeasible and one route per request was
    /// used instead.
    pub fallback: bool,
    pub decide_ms: u64,
    pub route_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeSummary {
    pub total_cost: Cost,
    pub hindsight_cost: Option<Cost>,
    pub gap_percent: Option<f64>,
}

/// Percentage gap `100 (cost - reference) / reference`.
pub fn gap_percent(cost: Cost, reference: Cost) -> f64 {
    if reference == 0 {
        return if cost == 0 { 0.0 } else { f64::INFINITY };
    }
    100.0 * (cost - reference) as f64 / reference as f64
}

/// Writes the per-epoch records and a summary as JSON lines.
pub fn write_episode_log(out: &mut impl Write, records: &[EpochRecord], summary: &EpisodeSummary) -> Result<()> {
    for rec in records {
        serde_json::to_writer(&mut *out, rec)?;
        out.write_all(b"\n")?;
    }
    serde_json::to_writer(&mut *out, summary)?;
    out.write_all(b"\n")?;
    Ok(())
}

/// Result of one transition.
#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub cost: Cost,
    pub solution: Solution,
    pub record: EpochRecord,
}

/// A running episode.
pub struct Environment {
    config: Arc<EpochConfig>,
    episode: Episode,
    state: EpochState,
    must: Vec<RequestId>,
    records: Vec<EpochRecord>,
    total_cost: Cost,
    dispatched: HashSet<RequestId>,
    done: bool,
}

impl Environment {
    /// Starts an episode on a pre-realized request stream.
    pub fn new(config: Arc<EpochConfig>, episode: Episode) -> Result<Self> {
        config.validate()?;
        if episode.arrivals.len() != config.num_epochs() {
            return Err(Error::IncompleteEpisode {
                realized: episode.arrivals.len(),
                expected: config.num_epochs(),
            });
        }
        let state = EpochState {
            epoch: 1,
            time: config.epoch_time(1),
            requests: episode.arrivals[0].clone(),
            primaries: config.planned_primaries(1),
        };
        let must = config.must_dispatch(1, &state.requests);
        Ok(Environment {
            config,
            episode,
            state,
            must,
            records: Vec::new(),
            total_cost: 0,
            dispatched: HashSet::new(),
            done: false,
        })
    }

    /// Realizes the episode for `seed` and returns the first state.
    pub fn reset(config: Arc<EpochConfig>, seed: u64) -> Result<Self> {
        let episode = realize_episode(&config, seed);
        Self::new(config, episode)
    }

    pub fn config(&self) -> &Arc<EpochConfig> {
        &self.config
    }

    pub fn episode(&self) -> &Episode {
        &self.episode
    }

    pub fn state(&self) -> &EpochState {
        &self.state
    }

    pub fn must_dispatch(&self) -> &[RequestId] {
        &self.must
    }

    pub fn is_done(&self) -> bool {
        self.done
    }

    pub fn total_cost(&self) -> Cost {
        self.total_cost
    }

    pub fn records(&self) -> &[EpochRecord] {
        &self.records
    }

    pub fn num_dispatched(&self) -> usize {
        self.dispatched.len()
    }

    fn validate_action(&self, action: &Action) -> Result<()> {
        let known: HashSet<RequestId> = self.state.requests.iter().map(|r| r.id).collect();
        let mut chosen = HashSet::with_capacity(action.dispatch.len());
        for &id in &action.dispatch {
            if !known.contains(&id) {
                return Err(Error::InvalidAction(format!("request {id} is not pending")));
            }
            if !chosen.insert(id) {
                return Err(Error::InvalidAction(format!("request {id} listed twice")));
            }
        }
        if let Some(&id) = self.must.iter().find(|id| !chosen.contains(id)) {
            return Err(Error::InvalidAction(format!("must-dispatch request {id} postponed")));
        }
        match (self.state.primaries, action.primaries) {
            (Some(have), Some(k)) if k > have => Err(Error::InvalidAction(format!(
                "{k} primary vehicles requested, {have} available"
            ))),
            (Some(_), None) => Err(Error::InvalidAction("primary vehicle count missing".into())),
            _ => Ok(()),
        }
    }

    /// Routes `action.dispatch` from the current epoch start and moves to
    /// the next epoch. `decide_ms` is recorded in the log.
    pub fn step(&mut self, action: &Action, decide_ms: u64) -> Result<StepOutcome> {
        if self.done {
            return Err(Error::InvalidAction("episode already finished".into()));
        }
        self.validate_action(action)?;
        let t = self.state.epoch;
        let now = self.state.time;
        let offered = action.primaries.unwrap_or(0);

        let chosen: HashSet<RequestId> = action.dispatch.iter().copied().collect();
        let (dispatch, keep): (Vec<Request>, Vec<Request>) =
            self.state.requests.drain(..).partition(|r| chosen.contains(&r.id));

        let started = std::time::Instant::now();
        let (solution, fallback) = self.route(t, now, offered, &dispatch)?;
        let route_ms = started.elapsed().as_millis() as u64;

        let primaries_used = match self.config.fleet {
            FleetMode::Unlimited => 0,
            FleetMode::Limited { .. } => solution.routes.iter().filter(|r| r.vehicle_type == 0).count(),
        };
        let secondaries_used = match self.config.fleet {
            FleetMode::Unlimited => 0,
            FleetMode::Limited { .. } => solution.routes.len() - primaries_used,
        };
        for r in &dispatch {
            self.dispatched.insert(r.id);
        }
        self.total_cost += solution.cost;

        let record = EpochRecord {
            epoch: t,
            time: now,
            arrivals: self.episode.arrivals[t - 1].len(),
            must_dispatch: self.must.len(),
            dispatched: dispatch.len(),
            cost: solution.cost,
            routes: solution
                .routes
                .iter()
                .map(|r| r.visits.iter().map(|id| id.0).collect())
                .collect(),
            primaries_available: self.state.primaries,
            primaries_used,
            secondaries_used,
            fallback,
            decide_ms,
            route_ms,
        };
        self.records.push(record.clone());

        if self.config.is_final(t) {
            debug_assert!(keep.is_empty());
            self.done = true;
            self.state.requests = keep;
        } else {
            let mut next = keep;
            next.extend(self.episode.arrivals[t].iter().cloned());
            let primaries = self
                .state
                .primaries
                .map(|have| have - primaries_used + self.config.planned_primaries(t + 1).unwrap_or(0));
            self.state = EpochState {
                epoch: t + 1,
                time: self.config.epoch_time(t + 1),
                requests: next,
                primaries,
            };
            self.must = self.config.must_dispatch(t + 1, &self.state.requests);
        }
        Ok(StepOutcome {
            cost: solution.cost,
            solution,
            record,
        })
    }

    fn route(&self, t: usize, now: Time, primaries: usize, dispatch: &[Request]) -> Result<(Solution, bool)> {
        if dispatch.is_empty() {
            return Ok((
                Solution {
                    routes: vec![],
                    cost: 0,
                    penalized_cost: 0,
                    feasible: true,
                },
                false,
            ));
        }
        let requests = dispatch.iter().map(|r| r.clone().with_dispatch_window(now, now)).collect();
        let fleet = self.config.epoch_fleet(t, primaries);
        let inst = self
            .config
            .topology
            .derive(format!("epoch-{t}"), requests, now, fleet)?;
        let seed = derive_seed(self.episode.seed, &[stream::ROUTING, t as u64]);
        let sol = self.config.routing.solve(&inst, seed)?;
        let (sol, fallback) = if sol.feasible {
            (sol, false)
        } else {
            (singleton_routes(&inst, primaries)?, true)
        };
        if !sol.feasible || sol.routes.iter().any(|r| r.departure != now) {
            return Err(Error::InvalidInstance(format!(
                "epoch {t}: dispatched requests cannot all be served from {now}"
            )));
        }
        Ok((sol, fallback))
    }

    pub fn summary(&self, hindsight: Option<Cost>) -> EpisodeSummary {
        EpisodeSummary {
            total_cost: self.total_cost,
            hindsight_cost: hindsight,
            gap_percent: hindsight.map(|h| gap_percent(self.total_cost, h)),
        }
    }

    pub fn write_log(&self, out: &mut impl Write, hindsight: Option<Cost>) -> Result<()> {
        write_episode_log(out, &self.records, &self.summary(hindsight))
    }
}

/// One route per request, primaries first.
fn singleton_routes(inst: &StaticInstance, primaries: usize) -> Result<Solution> {
    let limited = inst.fleet().classes.len() > 1;
    let routes = inst
        .requests()
        .iter()
        .enumerate()
        .map(|(i, r)| Route {
            vehicle_type: usize::from(limited && i >= primaries),
            visits: vec![r.id],
            departure: 0,
        })
        .collect();
    Solution::from_routes(inst, routes)
}

/// Per-epoch route counts of the greedy policy (dispatch everything on
/// arrival) under an unlimited fleet.
pub fn plan_primaries(config: &EpochConfig, episode: &Episode) -> Result<Vec<usize>> {
    let unlimited = Arc::new(config.clone().with_fleet(FleetMode::Unlimited));
    let mut env = Environment::new(unlimited, episode.clone())?;
    let mut plan = Vec::with_capacity(config.num_epochs());
    while !env.is_done() {
        let action = Action::new(env.state().ids());
        plan.push(env.step(&action, 0)?.solution.routes.len());
    }
    Ok(plan)
}

/// Limited-fleet mode with the greedy plan as primaries.
pub fn limited_fleet(config: &EpochConfig, episode: &Episode) -> Result<FleetMode> {
    Ok(FleetMode::Limited {
        primaries: plan_primaries(config, episode)?,
        secondary_fixed_cost: SECONDARY_FIXED_COST,
    })
}
