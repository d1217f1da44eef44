use rand::seq::SliceRandom;

use crate::model::{Cost, Load, PenaltyWeights, Route, Solution, StaticInstance, Time};
use crate::{Error, Result};

use super::problem::ProblemData;
use crate::rng::Rng;

/// A solution in slot form: `routes[s]` is the client sequence driven by
/// route slot `s` (possibly empty).
#[derive(Debug, Clone)]
pub(crate) struct Individual {
    pub routes: Vec<Vec<usize>>,
    pub cost: Cost,
    pub excess: Load,
    pub warp: Time,
    pred: Vec<usize>,
    succ: Vec<usize>,
}

impl Individual {
    pub fn new(data: &ProblemData, routes: Vec<Vec<usize>>) -> Self {
        debug_assert_eq!(routes.len(), data.num_slots());
        let mut pred = vec![0; data.n + 1];
        let mut succ = vec![0; data.n + 1];
        let (mut cost, mut excess, mut warp) = (0, 0, 0);
        for (slot, route) in routes.iter().enumerate() {
            if route.is_empty() {
                continue;
            }
            let ty = data.slot_type[slot];
            let stats = data.route_stats(ty, route);
            let v = &data.vehicles[ty];
            cost += stats.cost + v.fixed_cost;
            excess += (stats.load - v.capacity).max(0);
            warp += stats.route_time_warp();
            for (k, &c) in route.iter().enumerate() {
                pred[c] = if k == 0 { 0 } else { route[k - 1] };
                succ[c] = route.get(k + 1).copied().unwrap_or(0);
            }
        }
        Individual {
            routes,
            cost,
            excess,
            warp,
            pred,
            succ,
        }
    }

    #[inline]
    pub fn penalized(&self, w: &PenaltyWeights) -> Cost {
        w.penalized(self.cost, self.excess, self.warp)
    }

    pub fn feasible(&self) -> bool {
        self.excess == 0 && self.warp == 0
    }

    /// Broken-pairs distance in `[0, 1]`.
    pub fn broken_pairs(&self, other: &Individual) -> f64 {
        let n = self.pred.len() - 1;
        let mut broken = 0usize;
        for j in 1..=n {
            if self.succ[j] != other.succ[j] && self.succ[j] != other.pred[j] {
                broken += 1;
            }
            if self.pred[j] == 0 && other.pred[j] != 0 && other.succ[j] != 0 {
                broken += 1;
            }
        }
        broken as f64 / n as f64
    }

    pub fn from_solution(data: &ProblemData, solution: &Solution) -> Result<Self> {
        let mut routes = vec![Vec::new(); data.num_slots()];
        let mut seen = vec![false; data.n + 1];
        let mut free: Vec<Vec<usize>> = vec![Vec::new(); data.vehicles.len()];
        for (slot, &ty) in data.slot_type.iter().enumerate().rev() {
            free[ty].push(slot);
        }
        for route in solution.routes.iter().filter(|r| !r.visits.is_empty()) {
            let slot = take_slot(&mut free, route.vehicle_type)
                .ok_or_else(|| Error::InvalidInstance("more routes than vehicles".into()))?;
            for &id in &route.visits {
                let c = data.client(id)?;
                if std::mem::replace(&mut seen[c], true) {
                    return Err(Error::InvalidInstance(format!("request {id} visited twice")));
                }
                routes[slot].push(c);
            }
        }
        if seen[1..].iter().any(|s| !s) {
            return Err(Error::InvalidInstance("solution does not cover every request".into()));
        }
        Ok(Individual::new(data, routes))
    }

    pub fn to_solution(&self, data: &ProblemData, instance: &StaticInstance) -> Result<Solution> {
        let routes = self
            .routes
            .iter()
            .enumerate()
            .filter(|(_, r)| !r.is_empty())
            .map(|(slot, r)| Route {
                vehicle_type: data.slot_type[slot],
                visits: r.iter().map(|&c| data.ids[c - 1]).collect(),
                departure: 0,
            })
            .collect();
        Solution::from_routes(instance, routes)
    }
}

/// Pops a free slot of type `ty`, falling back to any type with free slots.
pub(crate) fn take_slot(free: &mut [Vec<usize>], ty: usize) -> Option<usize> {
    if let Some(s) = free.get_mut(ty).and_then(|f| f.pop()) {
        return Some(s);
    }
    free.iter_mut().find_map(|f| f.pop())
}

/// Inserts each client of `missing`, in order, at its cheapest position
/// (penalized at `w`) over all nonempty routes and one empty route per
/// vehicle type.
pub(crate) fn insert_clients(
    data: &ProblemData,
    routes: &mut [Vec<usize>],
    missing: &[usize],
    w: &PenaltyWeights,
) {
    let mut caches: Vec<Option<Cache>> = routes
        .iter()
        .enumerate()
        .map(|(slot, r)| (!r.is_empty()).then(|| Cache::new(data, data.slot_type[slot], r, w)))
        .collect();

    for &c in missing {
        let mut best: Option<(Cost, usize, usize)> = None;
        let mut consider = |delta: Cost, slot: usize, pos: usize| {
            if best.is_none_or(|(d, _, _)| delta < d) {
                best = Some((delta, slot, pos));
            }
        };

        let mut empty_seen = vec![false; data.vehicles.len()];
        for (slot, cache) in caches.iter().enumerate() {
            let ty = data.slot_type[slot];
            match cache {
                Some(cache) => {
                    for pos in 0..cache.visits.len() - 1 {
                        let left = data.join(&cache.prefix[pos], cache.visits[pos], &data.stats[c], c);
                        let full = data.join(&left, c, &cache.suffix[pos + 1], cache.visits[pos + 1]);
                        consider(data.route_cost(ty, &full, false, w) - cache.cost, slot, pos);
                    }
                }
                None if !empty_seen[ty] => {
                    empty_seen[ty] = true;
                    let full = data.route_stats(ty, &[c]);
                    consider(data.route_cost(ty, &full, false, w), slot, 0);
                }
                None => {}
            }
        }

        let (_, slot, pos) = best.expect("at least one route slot exists");
        routes[slot].insert(pos, c);
        caches[slot] = Some(Cache::new(data, data.slot_type[slot], &routes[slot], w));
    }
}

/// Randomized cheapest insertion of all clients.
pub(crate) fn random_individual(data: &ProblemData, w: &PenaltyWeights, rng: &mut Rng) -> Individual {
    let mut order: Vec<usize> = (1..=data.n).collect();
    order.shuffle(rng);
    let mut routes = vec![Vec::new(); data.num_slots()];
    insert_clients(data, &mut routes, &order, w);
    Individual::new(data, routes)
}

/// Prefix and suffix statistics of one route, depots included.
pub(crate) struct Cache {
    /// `[0, c_1, ..., c_k, 0]`
    pub visits: Vec<usize>,
    pub prefix: Vec<crate::model::SegmentStats>,
    pub suffix: Vec<crate::model::SegmentStats>,
    pub cost: Cost,
    /// Capacity and time-warp penalty part of `cost`.
    pub penalty: Cost,
}

impl Cache {
    pub fn new(data: &ProblemData, ty: usize, clients: &[usize], w: &PenaltyWeights) -> Self {
        let mut visits = Vec::with_capacity(clients.len() + 2);
        visits.push(0);
        visits.extend_from_slice(clients);
        visits.push(0);
        let len = visits.len();

        let mut prefix = Vec::with_capacity(len);
        prefix.push(data.vehicles[ty].start);
        for i in 1..len {
            let s = data.join(&prefix[i - 1], visits[i - 1], &data.stats[visits[i]], visits[i]);
            prefix.push(s);
        }

        let mut suffix = vec![data.stats[0]; len];
        for i in (0..len - 1).rev() {
            let head = if i == 0 { data.vehicles[ty].start } else { data.stats[visits[i]] };
            suffix[i] = data.join(&head, visits[i], &suffix[i + 1], visits[i + 1]);
        }

        let cost = data.route_cost(ty, &prefix[len - 1], clients.is_empty(), w);
        let penalty = if clients.is_empty() {
            0
        } else {
            cost - prefix[len - 1].cost - data.vehicles[ty].fixed_cost
        };
        Cache {
            visits,
            prefix,
            suffix,
            cost,
            penalty,
        }
    }
}
