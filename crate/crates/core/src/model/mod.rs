//! Domain types: requests, static instances, routes and solutions.
//!
//! All times, costs and loads are integers. Travel durations and travel
//! costs live in separate matrices even though the benchmark instances use
//! the same matrix for both.

mod format;
mod segment;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use format::{read_instance, read_routes, write_instance, write_routes};
pub use segment::SegmentStats;

pub type Time = i64;
pub type Cost = i64;
pub type Load = i64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RequestId(pub u32);

impl fmt::Display for RequestId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A delivery request.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Request {
    pub id: RequestId,
    /// Row/column of this request's location in the travel matrices.
    pub location: usize,
    pub demand: Load,
    pub service: Time,
    pub tw_early: Time,
    pub tw_late: Time,
    pub release: Time,
    pub dispatch_early: Time,
    pub dispatch_late: Time,
}

impl Request {
    /// A request with the default dispatch window `[release, horizon]`.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        id: RequestId,
        location: usize,
        demand: Load,
        service: Time,
        tw_early: Time,
        tw_late: Time,
        release: Time,
        horizon: Time,
    ) -> Self {
        Request {
            id,
            location,
            demand,
            service,
            tw_early,
            tw_late,
            release,
            dispatch_early: release,
            dispatch_late: horizon,
        }
    }

    pub fn with_dispatch_window(mut self, early: Time, late: Time) -> Self {
        self.dispatch_early = early;
        self.dispatch_late = late;
        self
    }

    pub fn segment(&self) -> SegmentStats {
        SegmentStats::singleton(
            self.service,
            self.tw_early,
            self.tw_late,
            self.demand,
            self.dispatch_early,
            self.dispatch_late,
        )
    }

    fn validate(&self, horizon: Time, dim: usize) -> Result<()> {
        let fail = |msg: &str| Err(Error::InvalidInstance(format!("request {}: {msg}", self.id)));
        if self.location >= dim {
            return fail("location outside travel matrix");
        }
        if !(0 <= self.tw_early && self.tw_early < self.tw_late && self.tw_late <= horizon) {
            return fail("time window must satisfy 0 <= early < late <= horizon");
        }
        if self.demand < 0 || self.service < 0 {
            return fail("negative demand or service time");
        }
        if self.dispatch_early > self.dispatch_late {
            return fail("empty dispatch window");
        }
        Ok(())
    }
}

/// Dense square matrix of integer travel times or costs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Matrix {
    dim: usize,
    data: Vec<i64>,
}

impl Matrix {
    pub fn new(dim: usize, data: Vec<i64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::InvalidInstance(format!(
                "matrix of dimension {dim} needs {} entries, got {}",
                dim * dim,
                data.len()
            )));
        }
        Ok(Matrix { dim, data })
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> i64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Matrix { dim, data }
    }

    #[inline]
    pub fn get(&self, from: usize, to: usize) -> i64 {
        self.data[from * self.dim + to]
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max(&self) -> i64 {
        self.data.iter().copied().max().unwrap_or(0)
    }
}

/// One class of vehicles in the fleet.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VehicleType {
    /// `None` means as many vehicles as needed.
    pub count: Option<usize>,
    pub capacity: Load,
    pub fixed_cost: Cost,
    pub available_from: Time,
}

impl VehicleType {
    pub fn unbounded(capacity: Load) -> Self {
        VehicleType {
            count: None,
            capacity,
            fixed_cost: 0,
            available_from: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FleetSpec {
    pub classes: Vec<VehicleType>,
}

impl FleetSpec {
    pub fn unlimited(capacity: Load) -> Self {
        FleetSpec {
            classes: vec![VehicleType::unbounded(capacity)],
        }
    }

    fn validate(&self) -> Result<()> {
        if self.classes.is_empty() {
            return Err(Error::InvalidInstance("fleet has no vehicle classes".into()));
        }
        for class in &self.classes {
            if class.capacity <= 0 || class.fixed_cost < 0 {
                return Err(Error::InvalidInstance(
                    "vehicle capacity must be positive and fixed cost nonnegative".into(),
                ));
            }
        }
        Ok(())
    }
}

/// A static routing problem with time windows and dispatch windows.
#[derive(Debug, Clone)]
pub struct StaticInstance {
    pub name: String,
    depot: usize,
    requests: Vec<Request>,
    durations: Arc<Matrix>,
    costs: Arc<Matrix>,
    horizon: Time,
    earliest_departure: Time,
    fleet: FleetSpec,
    coords: Option<Arc<Vec<(f64, f64)>>>,
    index: HashMap<RequestId, usize>,
}

impl StaticInstance {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        depot: usize,
        requests: Vec<Request>,
        durations: Arc<Matrix>,
        costs: Arc<Matrix>,
        horizon: Time,
        earliest_departure: Time,
        fleet: FleetSpec,
    ) -> Result<Self> {
        let dim = durations.dim();
        if costs.dim() != dim {
            return Err(Error::InvalidInstance("cost and duration matrices differ in size".into()));
        }
        if depot >= dim {
            return Err(Error::InvalidInstance("depot outside travel matrix".into()));
        }
        if durations.data.iter().chain(costs.data.iter()).any(|&v| v < 0) {
            return Err(Error::InvalidInstance("negative travel time or cost".into()));
        }
        if horizon <= 0 {
            return Err(Error::InvalidInstance("horizon must be positive".into()));
        }
        Self::assemble(
            name.into(),
            depot,
            requests,
            durations,
            costs,
            horizon,
            earliest_departure,
            fleet,
            None,
        )
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        name: String,
        depot: usize,
        requests: Vec<Request>,
        durations: Arc<Matrix>,
        costs: Arc<Matrix>,
        horizon: Time,
        earliest_departure: Time,
        fleet: FleetSpec,
        coords: Option<Arc<Vec<(f64, f64)>>>,
    ) -> Result<Self> {
        fleet.validate()?;
        let dim = durations.dim();
        let mut index = HashMap::with_capacity(requests.len());
        for (pos, req) in requests.iter().enumerate() {
            req.validate(horizon, dim)?;
            if index.insert(req.id, pos).is_some() {
                return Err(Error::InvalidInstance(format!("duplicate request id {}", req.id)));
            }
        }

        Ok(StaticInstance {
            name,
            depot,
            requests,
            durations,
            costs,
            horizon,
            earliest_departure,
            fleet,
            coords,
            index,
        })
    }

    pub fn with_coords(mut self, coords: Arc<Vec<(f64, f64)>>) -> Self {
        self.coords = Some(coords);
        self
    }

    /// Same travel data and horizon but a different request set, earliest
    /// departure and fleet.
    pub fn derive(
        &self,
        name: impl Into<String>,
        requests: Vec<Request>,
        earliest_departure: Time,
        fleet: FleetSpec,
    ) -> Result<Self> {
        Self::assemble(
            name.into(),
            self.depot,
            requests,
            Arc::clone(&self.durations),
            Arc::clone(&self.costs),
            self.horizon,
            earliest_departure,
            fleet,
            self.coords.clone(),
        )
    }

    pub fn depot(&self) -> usize {
        self.depot
    }

    pub fn requests(&self) -> &[Request] {
        &self.requests
    }

    pub fn request(&self, id: RequestId) -> Result<&Request> {
        self.index
            .get(&id)
            .map(|&pos| &self.requests[pos])
            .ok_or(Error::UnknownRequest(id))
    }

    pub fn contains(&self, id: RequestId) -> bool {
        self.index.contains_key(&id)
    }

    pub fn durations(&self) -> &Arc<Matrix> {
        &self.durations
    }

    pub fn costs(&self) -> &Arc<Matrix> {
        &self.costs
    }

    pub fn coords(&self) -> Option<&Arc<Vec<(f64, f64)>>> {
        self.coords.as_ref()
    }

    #[inline]
    pub fn duration(&self, from: usize, to: usize) -> Time {
        self.durations.get(from, to)
    }

    #[inline]
    pub fn cost(&self, from: usize, to: usize) -> Cost {
        self.costs.get(from, to)
    }

    pub fn horizon(&self) -> Time {
        self.horizon
    }

    pub fn earliest_departure(&self) -> Time {
        self.earliest_departure
    }

    pub fn fleet(&self) -> &FleetSpec {
        &self.fleet
    }

    pub fn len(&self) -> usize {
        self.requests.len()
    }

    pub fn is_empty(&self) -> bool {
        self.requests.is_empty()
    }

    /// Segment statistics of a single request, or of the depot when `id`
    /// is `None`.
    pub fn segment(&self, id: Option<RequestId>) -> Result<SegmentStats> {
        match id {
            None => Ok(SegmentStats::depot(self.horizon)),
            Some(id) => Ok(self.request(id)?.segment()),
        }
    }

    fn vehicle(&self, class: usize) -> Result<&VehicleType> {
        self.fleet
            .classes
            .get(class)
            .ok_or_else(|| Error::InvalidInstance(format!("unknown vehicle class {class}")))
    }
}

/// A route: the depot is implicit at both ends.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Route {
    pub vehicle_type: usize,
    pub visits: Vec<RequestId>,
    pub departure: Time,
}

/// Evaluation of a single route.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RouteEval {
    /// Travel cost plus the vehicle's fixed cost.
    pub cost: Cost,
    pub distance: Cost,
    pub load: Load,
    pub excess_load: Load,
    pub time_warp: Time,
    pub departure: Time,
}

/// Penalty weights for capacity excess and time warp.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PenaltyWeights {
    pub capacity: i64,
    pub time_warp: i64,
}

impl Default for PenaltyWeights {
    fn default() -> Self {
        PenaltyWeights {
            capacity: 20,
            time_warp: 6,
        }
    }
}

impl PenaltyWeights {
    #[inline]
    pub fn penalized(&self, cost: Cost, excess_load: Load, time_warp: Time) -> Cost {
        cost + self.capacity * excess_load + self.time_warp * time_warp
    }
}

/// Evaluates a route by folding segment statistics.
pub fn evaluate_route(route: &Route, instance: &StaticInstance) -> Result<RouteEval> {
    if route.visits.is_empty() {
        return Ok(RouteEval::default());
    }
    let vehicle = instance.vehicle(route.vehicle_type)?;
    let depot = instance.depot();
    let start = SegmentStats::depot_start(
        instance.horizon(),
        instance.earliest_departure().max(vehicle.available_from),
    );

    let mut stats = start;
    let mut prev = depot;
    for &id in &route.visits {
        let req = instance.request(id)?;
        stats = stats.concat(
            &req.segment(),
            instance.duration(prev, req.location),
            instance.cost(prev, req.location),
        );
        prev = req.location;
    }
    stats = stats.concat(
        &SegmentStats::depot(instance.horizon()),
        instance.duration(prev, depot),
        instance.cost(prev, depot),
    );

    Ok(RouteEval {
        cost: stats.cost + vehicle.fixed_cost,
        distance: stats.cost,
        load: stats.load,
        excess_load: (stats.load - vehicle.capacity).max(0),
        time_warp: stats.route_time_warp(),
        departure: stats.release,
    })
}

/// Reference evaluation by forward simulation of the route's timeline.
///
/// The vehicle leaves at its earliest allowed dispatch moment (the latest
/// of the instance's earliest departure, the vehicle's availability and the
/// visits' dispatch-window starts). Waiting is free; arriving after a window
/// closes warps the clock back to the closing time. An empty dispatch
/// window adds the gap between its bounds as forward warp.
pub fn evaluate_route_forward(route: &Route, instance: &StaticInstance) -> Result<RouteEval> {
    if route.visits.is_empty() {
        return Ok(RouteEval::default());
    }
    let vehicle = instance.vehicle(route.vehicle_type)?;
    let horizon = instance.horizon();
    let depot = instance.depot();

    let mut requests = Vec::with_capacity(route.visits.len());
    for &id in &route.visits {
        requests.push(instance.request(id)?);
    }

    let mut dispatch_early = instance.earliest_departure().max(vehicle.available_from);
    let mut dispatch_late = horizon;
    for req in &requests {
        dispatch_early = dispatch_early.max(req.dispatch_early);
        dispatch_late = dispatch_late.min(req.dispatch_late);
    }

    let departure = dispatch_early;
    let mut warp = (dispatch_early - dispatch_late).max(0);
    let mut clock = departure;
    if clock > horizon {
        warp += clock - horizon;
        clock = horizon;
    }

    let mut distance = 0;
    let mut load = 0;
    let mut prev = depot;
    let mut prev_service = 0;
    for req in &requests {
        let arrival = clock + prev_service + instance.duration(prev, req.location);
        let mut start = arrival.max(req.tw_early);
        if start > req.tw_late {
            warp += start - req.tw_late;
            start = req.tw_late;
        }
        distance += instance.cost(prev, req.location);
        load += req.demand;
        clock = start;
        prev = req.location;
        prev_service = req.service;
    }
    let back = clock + prev_service + instance.duration(prev, depot);
    if back > horizon {
        warp += back - horizon;
    }
    distance += instance.cost(prev, depot);

    Ok(RouteEval {
        cost: distance + vehicle.fixed_cost,
        distance,
        load,
        excess_load: (load - vehicle.capacity).max(0),
        time_warp: warp,
        departure,
    })
}

/// A complete solution of a static instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Solution {
    pub routes: Vec<Route>,
    /// Fixed vehicle costs plus travel costs.
    pub cost: Cost,
    /// `cost` plus capacity and time-warp penalties at default weights.
    pub penalized_cost: Cost,
    pub feasible: bool,
}

impl Solution {
    /// Evaluates `routes` on `instance`, dropping empty routes and setting
    /// each route's departure time.
    pub fn from_routes(instance: &StaticInstance, routes: Vec<Route>) -> Result<Self> {
        let weights = PenaltyWeights::default();
        let mut kept = Vec::with_capacity(routes.len());
        let (mut cost, mut excess, mut warp) = (0, 0, 0);
        for mut route in routes.into_iter().filter(|r| !r.visits.is_empty()) {
            let eval = evaluate_route(&route, instance)?;
            route.departure = eval.departure;
            cost += eval.cost;
            excess += eval.excess_load;
            warp += eval.time_warp;
            kept.push(route);
        }
        Ok(Solution {
            routes: kept,
            cost,
            penalized_cost: weights.penalized(cost, excess, warp),
            feasible: excess == 0 && warp == 0,
        })
    }

    pub fn num_routes(&self) -> usize {
        self.routes.len()
    }

    /// Fails unless every request of `instance` is visited exactly once.
    pub fn check_coverage(&self, instance: &StaticInstance) -> Result<()> {
        let mut seen = HashMap::with_capacity(instance.len());
        for route in &self.routes {
            for &id in &route.visits {
                instance.request(id)?;
                if seen.insert(id, ()).is_some() {
                    return Err(Error::InvalidInstance(format!("request {id} visited twice")));
                }
            }
        }
        if seen.len() != instance.len() {
            return Err(Error::InvalidInstance(format!(
                "{} of {} requests visited",
                seen.len(),
                instance.len()
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn line_instance() -> StaticInstance {
        // depot at 0, request 1 at distance 30
        let m = Arc::new(Matrix::from_fn(2, |i, j| if i == j { 0 } else { 30 }));
        let req = Request::new(RequestId(1), 1, 0, 5, 10, 20, 0, 480);
        StaticInstance::new("line", 0, vec![req], m.clone(), m, 480, 0, FleetSpec::unlimited(10))
            .unwrap()
    }

    #[test]
    fn forward_matches_hand_simulation() {
        let inst = line_instance();
        let route = Route {
            vehicle_type: 0,
            visits: vec![RequestId(1)],
            departure: 0,
        };
        let fwd = evaluate_route_forward(&route, &inst).unwrap();
        assert_eq!(fwd.time_warp, 10);
        assert_eq!(fwd.cost, 60);
        assert_eq!(fwd, evaluate_route(&route, &inst).unwrap());
    }

    #[test]
    fn empty_route_is_free() {
        let inst = line_instance();
        let route = Route {
            vehicle_type: 0,
            visits: vec![],
            departure: 0,
        };
        let eval = evaluate_route_forward(&route, &inst).unwrap();
        assert_eq!((eval.cost, eval.time_warp), (0, 0));
    }

    #[test]
    fn unknown_request_is_an_error() {
        let inst = line_instance();
        assert!(matches!(inst.segment(Some(RequestId(9))), Err(Error::UnknownRequest(_))));
        assert_eq!(inst.segment(None).unwrap(), SegmentStats::depot(480));
    }

    #[test]
    fn invalid_requests_rejected() {
        let m = Arc::new(Matrix::from_fn(2, |_, _| 0));
        let bad = Request::new(RequestId(1), 1, 0, 0, 20, 20, 0, 480);
        assert!(StaticInstance::new("x", 0, vec![bad], m.clone(), m, 480, 0, FleetSpec::unlimited(1)).is_err());
    }

    #[test]
    fn solution_coverage_and_penalties() {
        let inst = line_instance();
        let sol = Solution::from_routes(
            &inst,
            vec![Route {
                vehicle_type: 0,
                visits: vec![RequestId(1)],
                departure: 0,
            }],
        )
        .unwrap();
        assert!(!sol.feasible);
        assert_eq!(sol.cost, 60);
        assert_eq!(sol.penalized_cost, 60 + 6 * 10);
        sol.check_coverage(&inst).unwrap();
    }
}
