use std::collections::HashMap;

use crate::model::{Cost, Load, PenaltyWeights, RequestId, SegmentStats, StaticInstance, Time};
use crate::{Error, Result};

use super::params::NeighbourhoodParams;

pub(crate) struct VehicleData {
    pub capacity: Load,
    pub fixed_cost: Cost,
    pub start: SegmentStats,
}

/// Compact solver view of a static instance. Node 0 is the depot, clients
/// are `1..=n` in instance request order.
pub(crate) struct ProblemData {
    pub n: usize,
    dim: usize,
    dist: Vec<Cost>,
    dur: Vec<Time>,
    pub ids: Vec<RequestId>,
    pub stats: Vec<SegmentStats>,
    pub demand: Vec<Load>,
    pub vehicles: Vec<VehicleData>,
    /// Vehicle type of every route slot.
    pub slot_type: Vec<usize>,
    pub neighbours: Vec<Vec<usize>>,
    index: HashMap<RequestId, usize>,
}

impl ProblemData {
    pub fn new(instance: &StaticInstance, nb: &NeighbourhoodParams) -> Result<Self> {
        if instance.is_empty() {
            return Err(Error::EmptyInstance);
        }
        let n = instance.len();
        let dim = n + 1;
        let horizon = instance.horizon();
        let mut locs = Vec::with_capacity(dim);
        locs.push(instance.depot());
        let mut stats = vec![SegmentStats::depot(horizon)];
        let mut demand = vec![0];
        let mut ids = Vec::with_capacity(n);
        let mut index = HashMap::with_capacity(n);
        for (i, req) in instance.requests().iter().enumerate() {
            locs.push(req.location);
            stats.push(req.segment());
            demand.push(req.demand);
            ids.push(req.id);
            index.insert(req.id, i + 1);
        }

        let mut dist = Vec::with_capacity(dim * dim);
        let mut dur = Vec::with_capacity(dim * dim);
        for &a in &locs {
            for &b in &locs {
                dist.push(instance.cost(a, b));
                dur.push(instance.duration(a, b));
            }
        }

        let mut vehicles = Vec::new();
        let mut slot_type = Vec::new();
        for (k, class) in instance.fleet().classes.iter().enumerate() {
            let release = instance.earliest_departure().max(class.available_from);
            vehicles.push(VehicleData {
                capacity: class.capacity,
                fixed_cost: class.fixed_cost,
                start: SegmentStats::depot_start(horizon, release),
            });
            let count = class.count.unwrap_or(n).min(n);
            slot_type.extend(std::iter::repeat_n(k, count));
        }
        if slot_type.is_empty() {
            return Err(Error::InvalidInstance("fleet has no vehicles".into()));
        }

        let mut data = ProblemData {
            n,
            dim,
            dist,
            dur,
            ids,
            stats,
            demand,
            vehicles,
            slot_type,
            neighbours: Vec::new(),
            index,
        };
        data.neighbours = data.compute_neighbours(nb);
        Ok(data)
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> Cost {
        self.dist[i * self.dim + j]
    }

    #[inline]
    pub fn dur(&self, i: usize, j: usize) -> Time {
        self.dur[i * self.dim + j]
    }

    /// `a ⊕ b` where `a` ends at node `last` and `b` starts at node `first`.
    #[inline]
    pub fn join(&self, a: &SegmentStats, last: usize, b: &SegmentStats, first: usize) -> SegmentStats {
        a.concat(b, self.dur(last, first), self.dist(last, first))
    }

    pub fn client(&self, id: RequestId) -> Result<usize> {
        self.index.get(&id).copied().ok_or(Error::UnknownRequest(id))
    }

    pub fn num_slots(&self) -> usize {
        self.slot_type.len()
    }

    /// Penalized cost of a complete route of type `ty` with statistics
    /// `stats`, or 0 when the route is empty.
    #[inline]
    pub fn route_cost(&self, ty: usize, stats: &SegmentStats, empty: bool, w: &PenaltyWeights) -> Cost {
        if empty {
            return 0;
        }
        let v = &self.vehicles[ty];
        v.fixed_cost
            + w.penalized(stats.cost, (stats.load - v.capacity).max(0), stats.route_time_warp())
    }

    /// Full statistics of a route of type `ty` visiting `clients`.
    pub fn route_stats(&self, ty: usize, clients: &[usize]) -> SegmentStats {
        let mut acc = self.vehicles[ty].start;
        let mut last = 0;
        for &c in clients {
            acc = self.join(&acc, last, &self.stats[c], c);
            last = c;
        }
        self.join(&acc, last, &self.stats[0], 0)
    }

    fn compute_neighbours(&self, nb: &NeighbourhoodParams) -> Vec<Vec<usize>> {
        let n = self.n;
        let prox = |i: usize, j: usize| -> f64 {
            let (si, sj) = (&self.stats[i], &self.stats[j]);
            let travel = self.dur(i, j);
            let wait = (sj.earliest - si.duration - travel - si.latest).max(0);
            let warp = (si.earliest + si.duration + travel - sj.latest).max(0);
            self.dist(i, j) as f64 + nb.weight_wait_time * wait as f64 + nb.weight_time_warp * warp as f64
        };

        let mut table = vec![vec![0.0; n + 1]; n + 1];
        for i in 1..=n {
            for j in 1..=n {
                if i != j {
                    table[i][j] = prox(i, j);
                }
            }
        }
        if nb.symmetric_proximity {
            for i in 1..=n {
                for j in (i + 1)..=n {
                    let m = table[i][j].min(table[j][i]);
                    table[i][j] = m;
                    table[j][i] = m;
                }
            }
        }

        let k = nb.num_neighbours.min(n.saturating_sub(1));
        let mut out = vec![Vec::new(); n + 1];
        for i in 1..=n {
            let mut cand: Vec<usize> = (1..=n).filter(|&j| j != i).collect();
            cand.sort_by(|&a, &b| table[i][a].total_cmp(&table[i][b]).then(a.cmp(&b)));
            cand.truncate(k);
            out[i] = cand;
        }
        if nb.symmetric_neighbours {
            for i in 1..=n {
                for j in out[i].clone() {
                    if !out[j].contains(&i) {
                        out[j].push(i);
                    }
                }
            }
        }
        out
    }
}
