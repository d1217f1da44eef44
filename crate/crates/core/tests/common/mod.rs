#![allow(dead_code)]

use std::sync::Arc;

use ddwp::model::{
    evaluate_route, Cost, FleetSpec, Matrix, Request, RequestId, Route, StaticInstance, Time, VehicleType,
};
use rand::Rng;

pub const HORIZON: Time = 1000;

/// Instance with random windows, dispatch windows and a two-class fleet.
pub fn random_windows_instance(rng: &mut impl Rng, n: usize) -> StaticInstance {
    let horizon = 480;
    let dim = n + 1;
    let m = Arc::new(Matrix::from_fn(dim, |i, j| if i == j { 0 } else { ((i * 7 + j * 13) % 40 + 5) as i64 }));
    let requests = (1..=n)
        .map(|i| {
            let early = rng.gen_range(0..horizon - 1);
            let late = rng.gen_range(early + 1..=horizon);
            let r_minus = rng.gen_range(0..=horizon);
            let r_plus = rng.gen_range(r_minus..=horizon);
            Request::new(RequestId(i as u32), i, rng.gen_range(0..20), rng.gen_range(0..30), early, late, 0, horizon)
                .with_dispatch_window(r_minus, r_plus)
        })
        .collect();
    let fleet = FleetSpec {
        classes: vec![
            VehicleType::unbounded(50),
            VehicleType {
                count: Some(2),
                capacity: 30,
                fixed_cost: 100,
                available_from: rng.gen_range(0..200),
            },
        ],
    };
    StaticInstance::new("w", 0, requests, m.clone(), m, horizon, rng.gen_range(0..100), fleet).unwrap()
}

/// Random instance over `n` requests on a 100 x 100 grid. Every request is
/// served without time warp by a dedicated route, so a feasible solution
/// always exists. About a third of the requests get a tightened dispatch
/// window.
pub fn random_instance(rng: &mut impl Rng, n: usize, capacity: i64) -> StaticInstance {
    let coords: Vec<(f64, f64)> = (0..=n)
        .map(|i| if i == 0 { (50.0, 50.0) } else { (rng.gen_range(0..=100) as f64, rng.gen_range(0..=100) as f64) })
        .collect();
    let m = Arc::new(Matrix::from_fn(n + 1, |i, j| {
        let (a, b) = (coords[i], coords[j]);
        ((a.0 - b.0).hypot(a.1 - b.1)).round() as i64
    }));

    let mut requests = Vec::with_capacity(n);
    let mut id = 1u32;
    while requests.len() < n {
        let loc = requests.len() + 1;
        let out = m.get(0, loc);
        let service = rng.gen_range(0..=20);
        let early = rng.gen_range(0..=600);
        let late = (early + rng.gen_range(30..=400)).min(HORIZON);
        let demand = rng.gen_range(1..=capacity.min(10));
        let mut req = Request::new(RequestId(id), loc, demand, service, early, late, 0, HORIZON);
        match rng.gen_range(0..6) {
            0 => {
                let t = rng.gen_range(0..=300);
                req = req.with_dispatch_window(t, t);
            }
            1 => req = req.with_dispatch_window(rng.gen_range(0..=300), HORIZON),
            _ => {}
        }
        let depart = req.dispatch_early;
        let arrive = (depart + out).max(early);
        if depart + out <= late && arrive + service + out <= HORIZON {
            requests.push(req);
            id += 1;
        }
    }
    StaticInstance::new("random", 0, requests, m.clone(), m, HORIZON, 0, FleetSpec::unlimited(capacity))
        .unwrap()
        .with_coords(Arc::new(coords))
}

/// Optimal cost over all partitions into routes and all visit orders,
/// considering feasible routes only. Intended for at most 7 requests.
pub fn brute_force_optimum(instance: &StaticInstance) -> Option<Cost> {
    let ids: Vec<RequestId> = instance.requests().iter().map(|r| r.id).collect();
    let n = ids.len();
    assert!(n <= 8, "brute force is exponential");
    let full = (1usize << n) - 1;

    let mut route_best = vec![None::<Cost>; full + 1];
    for mask in 1..=full {
        let members: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        let mut perm = members.clone();
        let mut best = None;
        permute(&mut perm, 0, &mut |order| {
            let route = Route {
                vehicle_type: 0,
                visits: order.iter().map(|&i| ids[i]).collect(),
                departure: 0,
            };
            let eval = evaluate_route(&route, instance).unwrap();
            if eval.excess_load == 0 && eval.time_warp == 0 && best.is_none_or(|b| eval.cost < b) {
                best = Some(eval.cost);
            }
        });
        route_best[mask] = best;
    }

    let mut part = vec![None::<Cost>; full + 1];
    part[0] = Some(0);
    for mask in 1..=full {
        let low = mask & mask.wrapping_neg();
        let rest = mask ^ low;
        let mut sub = rest;
        let mut best = None;
        loop {
            let route = sub | low;
            if let (Some(r), Some(p)) = (route_best[route], part[mask ^ route]) {
                if best.is_none_or(|b| r + p < b) {
                    best = Some(r + p);
                }
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
        part[mask] = best;
    }
    part[full]
}

fn permute(xs: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == xs.len() {
        f(xs);
        return;
    }
    for i in k..xs.len() {
        xs.swap(k, i);
        permute(xs, k + 1, f);
        xs.swap(k, i);
    }
}

pub mod dynamic {
    use std::sync::Arc;

    use ddwp::env::{Action, Environment, EpochConfig, EpochState, SolveBudget};
    use ddwp::model::RequestId;
    use ddwp::rng::rng_from;
    use rand::Rng;
    use ddwp::instgen::{ArrivalProcess, InstanceClassSpec, SourceInstance, TopologyStore, TopologyTag, WindowKind, WindowVariant};
    use ddwp::solver::{SolverParams, StopCriterion};
    use std::sync::OnceLock;

    pub fn store() -> &'static TopologyStore {
        static STORE: OnceLock<TopologyStore> = OnceLock::new();
        STORE.get_or_init(|| TopologyStore::synthetic(17))
    }

    pub fn class(arrivals: ArrivalProcess, kind: WindowKind, hours: u32, total: u32) -> InstanceClassSpec {
        InstanceClassSpec {
            topology: TopologyTag::R,
            arrivals,
            window: WindowVariant::new(kind, hours),
            expected_total: total,
        }
    }

    pub fn quick_budget(iterations: u64) -> SolveBudget {
        SolveBudget::new(SolverParams::scenario_profile(), StopCriterion::iterations(iterations))
    }

    /// Small episodes: about `total` requests over the horizon.
    pub fn small_config(total: u32, kind: WindowKind, hours: u32) -> Arc<EpochConfig> {
        let topo = store().get(SourceInstance::R1_10_1).unwrap();
        Arc::new(EpochConfig::new(
            topo,
            class(ArrivalProcess::Homogeneous, kind, hours, total),
            quick_budget(60),
        ))
    }

    /// Runs a random valid prefix of an episode and returns the state at
    /// `epoch` together with its must-dispatch set.
    pub fn random_state(config: &Arc<EpochConfig>, seed: u64, epoch: usize) -> (EpochState, Vec<RequestId>) {
        let mut env = Environment::reset(Arc::clone(config), seed).unwrap();
        let mut rng = rng_from(seed ^ 0xABCD);
        while env.state().epoch < epoch {
            let must: std::collections::HashSet<_> = env.must_dispatch().iter().copied().collect();
            let action = env.state().ids().into_iter().filter(|id| must.contains(id) || rng.gen_bool(0.2)).collect();
            env.step(&Action::new(action), 0).unwrap();
        }
        (env.state().clone(), env.must_dispatch().to_vec())
    }
}
