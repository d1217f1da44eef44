use rand::seq::SliceRandom;

use crate::model::{Cost, PenaltyWeights, SegmentStats};
use crate::rng::Rng;

use super::individual::{Cache, Individual};
use super::params::OperatorParams;
use super::problem::ProblemData;

/// Granular local search over node and route operators. Every applied move
/// strictly lowers the penalized cost, so the search terminates.
pub(crate) struct LocalSearch<'a> {
    data: &'a ProblemData,
    ops: &'a OperatorParams,
    w: PenaltyWeights,
    routes: Vec<Vec<usize>>,
    cache: Vec<Cache>,
    /// Client -> (slot, position), positions start at 1.
    loc: Vec<(usize, usize)>,
    last_modified: Vec<u64>,
    counter: u64,
    /// First empty slot of each vehicle type.
    empty: Vec<Option<usize>>,
}

impl<'a> LocalSearch<'a> {
    pub fn new(data: &'a ProblemData, ops: &'a OperatorParams) -> Self {
        LocalSearch {
            data,
            ops,
            w: PenaltyWeights::default(),
            routes: Vec::new(),
            cache: Vec::new(),
            loc: vec![(0, 0); data.n + 1],
            last_modified: Vec::new(),
            counter: 0,
            empty: vec![None; data.vehicles.len()],
        }
    }

    pub fn run(&mut self, ind: &Individual, w: PenaltyWeights, rng: &mut Rng) -> Individual {
        let data = self.data;
        self.w = w;
        self.routes = ind.routes.clone();
        self.cache = self
            .routes
            .iter()
            .enumerate()
            .map(|(s, r)| Cache::new(data, data.slot_type[s], r, &w))
            .collect();
        for (s, r) in self.routes.iter().enumerate() {
            for (k, &c) in r.iter().enumerate() {
                self.loc[c] = (s, k + 1);
            }
        }
        self.refresh_empty();
        self.counter = 1;
        self.last_modified = vec![1; data.num_slots()];
        let mut tested_node = vec![0u64; data.n + 1];
        let mut tested_route = vec![0u64; data.num_slots()];

        let mut order: Vec<usize> = (1..=data.n).collect();
        order.shuffle(rng);
        let route_ops = self.ops.swap_star || self.ops.relocate_star || data.vehicles.len() > 1;

        loop {
            let mut improved = false;
            for &u in &order {
                let tested = tested_node[u];
                tested_node[u] = self.counter;
                for &v in &data.neighbours[u] {
                    let ru = self.loc[u].0;
                    let (rv, pv) = self.loc[v];
                    if self.last_modified[ru] <= tested && self.last_modified[rv] <= tested {
                        continue;
                    }
                    if self.node_ops(u, rv, pv) {
                        improved = true;
                        continue;
                    }
                    let (rv, pv) = self.loc[v];
                    if pv == 1 && self.node_ops(u, rv, 0) {
                        improved = true;
                    }
                }
                if self.last_modified[self.loc[u].0] > tested {
                    for ty in 0..data.vehicles.len() {
                        if let Some(e) = self.first_empty(ty) {
                            if self.node_ops(u, e, 0) {
                                improved = true;
                                break;
                            }
                        }
                    }
                }
            }

            if route_ops {
                for r1 in 0..self.routes.len() {
                    if self.routes[r1].is_empty() {
                        continue;
                    }
                    let tested = tested_route[r1];
                    tested_route[r1] = self.counter;
                    if self.last_modified[r1] > tested && self.switch_type(r1) {
                        improved = true;
                        continue;
                    }
                    for r2 in (r1 + 1)..self.routes.len() {
                        if self.routes[r1].is_empty() || self.routes[r2].is_empty() {
                            continue;
                        }
                        if self.last_modified[r1] <= tested && self.last_modified[r2] <= tested {
                            continue;
                        }
                        if self.ops.swap_star && self.swap_star(r1, r2) {
                            improved = true;
                        }
                        if self.ops.relocate_star && self.relocate_star(r1, r2) {
                            improved = true;
                        }
                    }
                }
            }

            if !improved {
                break;
            }
        }
        Individual::new(data, std::mem::take(&mut self.routes))
    }

    fn first_empty(&self, ty: usize) -> Option<usize> {
        self.empty[ty]
    }

    fn refresh_empty(&mut self) {
        self.empty.iter_mut().for_each(|e| *e = None);
        for (s, r) in self.routes.iter().enumerate() {
            let ty = self.data.slot_type[s];
            if r.is_empty() && self.empty[ty].is_none() {
                self.empty[ty] = Some(s);
            }
        }
    }

    #[inline]
    fn fixed(&self, slot: usize) -> Cost {
        self.data.vehicles[self.data.slot_type[slot]].fixed_cost
    }

    fn node_ops(&mut self, u: usize, rv: usize, pv: usize) -> bool {
        let ops = self.ops;
        for &(n, m) in &ops.exchanges {
            if self.exchange(u, rv, pv, n, m, false) {
                return true;
            }
        }
        if ops.move_two_clients_reversed && self.exchange(u, rv, pv, 2, 0, true) {
            return true;
        }
        ops.two_opt && self.two_opt(u, rv, pv)
    }

    #[inline]
    fn cost(&self, slot: usize, stats: &SegmentStats, empty: bool) -> Cost {
        self.data.route_cost(self.data.slot_type[slot], stats, empty, &self.w)
    }

    /// Statistics of positions `from..=to` of route `r`, optionally reversed.
    fn segment(&self, r: usize, from: usize, to: usize, reverse: bool) -> SegmentStats {
        let data = self.data;
        let visits = &self.cache[r].visits;
        let mut acc;
        if reverse {
            acc = data.stats[visits[to]];
            for p in (from..to).rev() {
                acc = data.join(&acc, visits[p + 1], &data.stats[visits[p]], visits[p]);
            }
        } else {
            acc = data.stats[visits[from]];
            for p in (from + 1)..=to {
                acc = data.join(&acc, visits[p - 1], &data.stats[visits[p]], visits[p]);
            }
        }
        acc
    }

    fn commit(&mut self, changes: Vec<(usize, Vec<usize>)>) {
        self.counter += 1;
        for (r, clients) in changes {
            for (k, &c) in clients.iter().enumerate() {
                self.loc[c] = (r, k + 1);
            }
            self.cache[r] = Cache::new(self.data, self.data.slot_type[r], &clients, &self.w);
            self.routes[r] = clients;
            self.last_modified[r] = self.counter;
        }
        self.refresh_empty();
    }

    /// Moves `n` consecutive clients starting at `u` after position `pv` of
    /// route `rv` (`m == 0`), or swaps them with the `m` clients starting
    /// at position `pv` (`m > 0`).
    fn exchange(&mut self, u: usize, rv: usize, pv: usize, n: usize, m: usize, reverse: bool) -> bool {
        let data = self.data;
        let (ru, pu) = self.loc[u];
        let lu = self.routes[ru].len();
        let lv = self.routes[rv].len();
        if pu + n - 1 > lu {
            return false;
        }
        if m > 0 {
            if pv == 0 || pv + m - 1 > lv {
                return false;
            }
            if n == m && u >= self.routes[rv][pv - 1] {
                return false;
            }
        }

        if self.exchange_bound(ru, pu, rv, pv, n, m, reverse) >= 0 {
            return false;
        }
        if ru == rv {
            return self.exchange_intra(ru, pu, pv, n, m, reverse);
        }

        let (cu, cv) = (&self.cache[ru], &self.cache[rv]);
        let (fu, tu) = (pu, pu + n - 1);
        let seg_u = self.segment(ru, fu, tu, reverse);
        let (seg_u_first, seg_u_last) = if reverse {
            (cu.visits[tu], cu.visits[fu])
        } else {
            (cu.visits[fu], cu.visits[tu])
        };

        let (new_u, new_v, empty_u) = if m == 0 {
            let nu = data.join(&cu.prefix[pu - 1], cu.visits[pu - 1], &cu.suffix[pu + n], cu.visits[pu + n]);
            let left = data.join(&cv.prefix[pv], cv.visits[pv], &seg_u, seg_u_first);
            let nv = data.join(&left, seg_u_last, &cv.suffix[pv + 1], cv.visits[pv + 1]);
            (nu, nv, lu == n)
        } else {
            let (fv, tv) = (pv, pv + m - 1);
            let seg_v = self.segment(rv, fv, tv, false);
            let left = data.join(&cu.prefix[pu - 1], cu.visits[pu - 1], &seg_v, cv.visits[fv]);
            let nu = data.join(&left, cv.visits[tv], &cu.suffix[pu + n], cu.visits[pu + n]);
            let left = data.join(&cv.prefix[pv - 1], cv.visits[pv - 1], &seg_u, seg_u_first);
            let nv = data.join(&left, seg_u_last, &cv.suffix[pv + m], cv.visits[pv + m]);
            (nu, nv, false)
        };

        let delta = self.cost(ru, &new_u, empty_u) + self.cost(rv, &new_v, false) - cu.cost - cv.cost;
        if delta >= 0 {
            return false;
        }

        let (a, b) = (&self.routes[ru], &self.routes[rv]);
        let mut seg: Vec<usize> = a[pu - 1..pu - 1 + n].to_vec();
        if reverse {
            seg.reverse();
        }
        let (route_u, route_v) = if m == 0 {
            let mut nu = a[..pu - 1].to_vec();
            nu.extend_from_slice(&a[pu - 1 + n..]);
            let mut nv = b[..pv].to_vec();
            nv.extend_from_slice(&seg);
            nv.extend_from_slice(&b[pv..]);
            (nu, nv)
        } else {
            let mut nu = a[..pu - 1].to_vec();
            nu.extend_from_slice(&b[pv - 1..pv - 1 + m]);
            nu.extend_from_slice(&a[pu - 1 + n..]);
            let mut nv = b[..pv - 1].to_vec();
            nv.extend_from_slice(&seg);
            nv.extend_from_slice(&b[pv - 1 + m..]);
            (nu, nv)
        };
        self.commit(vec![(ru, route_u), (rv, route_v)]);
        true
    }

    /// Lower bound on an exchange's delta: distance change minus the
    /// penalties that could disappear. Assumes inserting visits never
    /// reduces a route's penalty.
    #[allow(clippy::too_many_arguments)]
    fn exchange_bound(&self, ru: usize, pu: usize, rv: usize, pv: usize, n: usize, m: usize, reverse: bool) -> Cost {
        let d = |a: usize, b: usize| self.data.dist(a, b);
        let (vu, vv) = (&self.cache[ru].visits, &self.cache[rv].visits);
        let (u_prev, u_first, u_last, u_next) = (vu[pu - 1], vu[pu], vu[pu + n - 1], vu[pu + n]);
        if m == 0 {
            let (a, b) = if reverse { (u_last, u_first) } else { (u_first, u_last) };
            let mut lb = d(u_prev, u_next) - d(u_prev, u_first) - d(u_last, u_next) + d(vv[pv], a)
                + d(b, vv[pv + 1])
                - d(vv[pv], vv[pv + 1]);
            if reverse {
                for p in pu..pu + n - 1 {
                    lb += d(vu[p + 1], vu[p]) - d(vu[p], vu[p + 1]);
                }
            }
            if ru != rv {
                if vu.len() - 2 == n {
                    lb -= self.fixed(ru);
                }
                if vv.len() == 2 {
                    lb += self.fixed(rv);
                }
            }
            return lb - self.cache[ru].penalty;
        }
        if ru == rv && (pu + n >= pv && pv + m >= pu) {
            return Cost::MIN;
        }
        let (v_prev, v_first, v_last, v_next) = (vv[pv - 1], vv[pv], vv[pv + m - 1], vv[pv + m]);
        let lb = d(u_prev, v_first) + d(v_last, u_next) - d(u_prev, u_first) - d(u_last, u_next) + d(v_prev, u_first)
            + d(u_last, v_next)
            - d(v_prev, v_first)
            - d(v_last, v_next);
        let pen = if ru == rv {
            self.cache[ru].penalty
        } else {
            self.cache[ru].penalty + self.cache[rv].penalty
        };
        lb - pen
    }

    fn exchange_intra(&mut self, r: usize, pu: usize, pv: usize, n: usize, m: usize, reverse: bool) -> bool {
        let route = &self.routes[r];
        let mut seg_u: Vec<usize> = route[pu - 1..pu - 1 + n].to_vec();
        if reverse {
            seg_u.reverse();
        }
        let new = if m == 0 {
            if pv + 1 >= pu && pv < pu + n {
                return false;
            }
            let mut rest: Vec<usize> = route[..pu - 1].to_vec();
            rest.extend_from_slice(&route[pu - 1 + n..]);
            let at = if pv < pu { pv } else { pv - n };
            rest.splice(at..at, seg_u);
            rest
        } else {
            let (first, fl, second, sl) = if pu < pv { (pu, n, pv, m) } else { (pv, m, pu, n) };
            if first + fl > second {
                return false;
            }
            let seg_first: Vec<usize> = route[first - 1..first - 1 + fl].to_vec();
            let seg_second: Vec<usize> = route[second - 1..second - 1 + sl].to_vec();
            let (seg_first, seg_second) = if pu < pv { (seg_u, seg_second) } else { (seg_first, seg_u) };
            let mut new = route[..first - 1].to_vec();
            new.extend_from_slice(&seg_second);
            new.extend_from_slice(&route[first - 1 + fl..second - 1]);
            new.extend_from_slice(&seg_first);
            new.extend_from_slice(&route[second - 1 + sl..]);
            new
        };
        self.try_replace(r, new)
    }

    fn try_replace(&mut self, r: usize, new: Vec<usize>) -> bool {
        let stats = self.data.route_stats(self.data.slot_type[r], &new);
        if self.cost(r, &stats, new.is_empty()) < self.cache[r].cost {
            self.commit(vec![(r, new)]);
            true
        } else {
            false
        }
    }

    fn two_opt(&mut self, u: usize, rv: usize, pv: usize) -> bool {
        let data = self.data;
        let (ru, pu) = self.loc[u];
        if ru == rv {
            if pv <= pu + 1 {
                return false;
            }
            let c = &self.cache[ru];
            let v = &c.visits;
            let d = |a: usize, b: usize| data.dist(a, b);
            let lb = d(v[pu], v[pv]) + d(v[pu + 1], v[pv + 1]) - d(v[pu], v[pu + 1]) - d(v[pv], v[pv + 1]);
            if lb - c.penalty >= 0 {
                return false;
            }
            let rev = self.segment(ru, pu + 1, pv, true);
            let left = data.join(&c.prefix[pu], c.visits[pu], &rev, c.visits[pv]);
            let full = data.join(&left, c.visits[pu + 1], &c.suffix[pv + 1], c.visits[pv + 1]);
            if self.cost(ru, &full, false) >= c.cost {
                return false;
            }
            let mut new = self.routes[ru].clone();
            new[pu..pv].reverse();
            self.commit(vec![(ru, new)]);
            return true;
        }

        let (lu, lv) = (self.routes[ru].len(), self.routes[rv].len());
        if pu == lu && pv == lv {
            return false;
        }
        let (cu, cv) = (&self.cache[ru], &self.cache[rv]);
        let d = |a: usize, b: usize| data.dist(a, b);
        let (vu, vv) = (&cu.visits, &cv.visits);
        let mut lb = d(vu[pu], vv[pv + 1]) + d(vv[pv], vu[pu + 1]) - d(vu[pu], vu[pu + 1]) - d(vv[pv], vv[pv + 1])
            - cu.penalty
            - cv.penalty;
        if lv == 0 {
            lb += self.fixed(rv);
        } else if pv == 0 && pu == lu {
            lb -= self.fixed(rv);
        }
        if lb >= 0 {
            return false;
        }
        let nu = data.join(&cu.prefix[pu], cu.visits[pu], &cv.suffix[pv + 1], cv.visits[pv + 1]);
        let nv = data.join(&cv.prefix[pv], cv.visits[pv], &cu.suffix[pu + 1], cu.visits[pu + 1]);
        let delta = self.cost(ru, &nu, false) + self.cost(rv, &nv, pv == 0 && pu == lu) - cu.cost - cv.cost;
        if delta >= 0 {
            return false;
        }
        let (a, b) = (&self.routes[ru], &self.routes[rv]);
        let mut new_u = a[..pu].to_vec();
        new_u.extend_from_slice(&b[pv..]);
        let mut new_v = b[..pv].to_vec();
        new_v.extend_from_slice(&a[pu..]);
        self.commit(vec![(ru, new_u), (rv, new_v)]);
        true
    }

    /// Moves a nonempty route to an empty slot of another vehicle type when
    /// that is cheaper.
    fn switch_type(&mut self, r: usize) -> bool {
        let data = self.data;
        let ty = data.slot_type[r];
        let mut best: Option<(Cost, usize)> = None;
        for k in (0..data.vehicles.len()).filter(|&k| k != ty) {
            if let Some(e) = self.first_empty(k) {
                let stats = data.route_stats(k, &self.routes[r]);
                let c = data.route_cost(k, &stats, false, &self.w);
                if c < best.map_or(self.cache[r].cost, |b| b.0) {
                    best = Some((c, e));
                }
            }
        }
        match best {
            Some((_, e)) => {
                let clients = std::mem::take(&mut self.routes[r]);
                self.commit(vec![(r, Vec::new()), (e, clients)]);
                true
            }
            None => false,
        }
    }

    /// Best exchange of one client of `r1` with one client of `r2`, each
    /// reinserted at its best position in the other route. Candidates are
    /// ranked on distance and load, then the best is evaluated exactly.
    fn swap_star(&mut self, r1: usize, r2: usize) -> bool {
        let data = self.data;
        let w = self.w;
        let (c1, c2) = (&self.cache[r1], &self.cache[r2]);
        let (v1, v2) = (&c1.visits, &c2.visits);
        let (l1, l2) = (v1.len() - 2, v2.len() - 2);

        let removal = |v: &[usize], p: usize| -> Cost {
            data.dist(v[p - 1], v[p]) + data.dist(v[p], v[p + 1]) - data.dist(v[p - 1], v[p + 1])
        };
        let insertion = |v: &[usize], after: usize, c: usize| -> Cost {
            data.dist(v[after], c) + data.dist(c, v[after + 1]) - data.dist(v[after], v[after + 1])
        };
        let top3 = |v: &[usize], c: usize| -> [(Cost, usize); 3] {
            let mut best = [(Cost::MAX, usize::MAX); 3];
            for after in 0..v.len() - 1 {
                let d = insertion(v, after, c);
                if d < best[2].0 {
                    best[2] = (d, after);
                    best.sort_by_key(|x| x.0);
                }
            }
            best
        };
        let best_insert = |v: &[usize], cands: &[(Cost, usize); 3], removed: usize, c: usize| -> (Cost, usize) {
            let in_place = data.dist(v[removed - 1], c) + data.dist(c, v[removed + 1])
                - data.dist(v[removed - 1], v[removed + 1]);
            let mut best = (in_place, removed - 1);
            for &(d, after) in cands {
                if after != usize::MAX && after != removed - 1 && after != removed {
                    if d < best.0 {
                        best = (d, after);
                    }
                    break;
                }
            }
            best
        };

        let (ty1, ty2) = (data.slot_type[r1], data.slot_type[r2]);
        let (cap1, cap2) = (data.vehicles[ty1].capacity, data.vehicles[ty2].capacity);
        let (load1, load2) = (c1.prefix[l1 + 1].load, c2.prefix[l2 + 1].load);
        let excess = |load: i64, cap: i64| (load - cap).max(0);
        let base_excess = excess(load1, cap1) + excess(load2, cap2);

        let ins_u: Vec<_> = (1..=l1).map(|i| top3(v2, v1[i])).collect();
        let ins_v: Vec<_> = (1..=l2).map(|j| top3(v1, v2[j])).collect();
        let rem1: Vec<Cost> = (1..=l1).map(|i| removal(v1, i)).collect();
        let rem2: Vec<Cost> = (1..=l2).map(|j| removal(v2, j)).collect();

        let mut best: Option<(Cost, usize, usize, usize, usize)> = None;
        for i in 1..=l1 {
            let u = v1[i];
            for j in 1..=l2 {
                let v = v2[j];
                let dq = data.demand[v] - data.demand[u];
                let mut delta =
                    w.capacity * (excess(load1 + dq, cap1) + excess(load2 - dq, cap2) - base_excess);
                delta -= rem1[i - 1] + rem2[j - 1];
                let (du, au) = best_insert(v2, &ins_u[i - 1], j, u);
                let (dv, av) = best_insert(v1, &ins_v[j - 1], i, v);
                delta += du + dv;
                if best.is_none_or(|b| delta < b.0) {
                    best = Some((delta, i, j, au, av));
                }
            }
        }

        let Some((approx, i, j, au, av)) = best else {
            return false;
        };
        if approx >= 0 {
            return false;
        }
        let (u, v) = (v1[i], v2[j]);
        let new1 = replace_one(&self.routes[r1], i, av, v);
        let new2 = replace_one(&self.routes[r2], j, au, u);
        let s1 = data.route_stats(ty1, &new1);
        let s2 = data.route_stats(ty2, &new2);
        let delta = self.cost(r1, &s1, false) + self.cost(r2, &s2, false) - c1.cost - c2.cost;
        if delta >= 0 {
            return false;
        }
        self.commit(vec![(r1, new1), (r2, new2)]);
        true
    }

    /// Best relocation of a single client between `r1` and `r2`, in either
    /// direction, evaluated exactly.
    fn relocate_star(&mut self, r1: usize, r2: usize) -> bool {
        let data = self.data;
        let mut best: Option<(Cost, usize, usize, usize, usize)> = None;
        for (from, to) in [(r1, r2), (r2, r1)] {
            let (cf, ct) = (&self.cache[from], &self.cache[to]);
            let lf = cf.visits.len() - 2;
            for p in 1..=lf {
                let c = cf.visits[p];
                let nf = data.join(&cf.prefix[p - 1], cf.visits[p - 1], &cf.suffix[p + 1], cf.visits[p + 1]);
                let removal = self.cost(from, &nf, lf == 1) - cf.cost;
                for after in 0..ct.visits.len() - 1 {
                    let left = data.join(&ct.prefix[after], ct.visits[after], &data.stats[c], c);
                    let nt = data.join(&left, c, &ct.suffix[after + 1], ct.visits[after + 1]);
                    let delta = removal + self.cost(to, &nt, false) - ct.cost;
                    if best.is_none_or(|b| delta < b.0) {
                        best = Some((delta, from, p, to, after));
                    }
                }
            }
        }
        let Some((delta, from, p, to, after)) = best else {
            return false;
        };
        if delta >= 0 {
            return false;
        }
        let mut nf = self.routes[from].clone();
        let c = nf.remove(p - 1);
        let mut nt = self.routes[to].clone();
        nt.insert(after, c);
        self.commit(vec![(from, nf), (to, nt)]);
        true
    }
}

/// Removes the client at position `remove` and inserts `node` after
/// position `after` (both in the original route's positions).
fn replace_one(route: &[usize], remove: usize, after: usize, node: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(route.len());
    if after == 0 {
        out.push(node);
    }
    for p in 1..=route.len() {
        if p != remove {
            out.push(route[p - 1]);
        }
        if p == after {
            out.push(node);
        }
    }
    out
}
