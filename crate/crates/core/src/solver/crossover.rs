use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::model::PenaltyWeights;
use crate::rng::Rng;

use super::individual::{insert_clients, take_slot, Individual};
use super::problem::ProblemData;

/// Selective route exchange. Picks `k` consecutive routes of `a` and the
/// `k` routes of `b` overlapping them most, builds two offspring (one
/// keeping `b`'s selected routes whole, one keeping `a`'s other routes
/// whole), reinserts uncovered clients greedily and returns the cheaper.
pub(crate) fn srex(
    data: &ProblemData,
    a: &Individual,
    b: &Individual,
    w: &PenaltyWeights,
    rng: &mut Rng,
) -> Individual {
    let routes_a: Vec<(usize, &Vec<usize>)> = nonempty(a);
    let routes_b: Vec<(usize, &Vec<usize>)> = nonempty(b);
    let (na, nb) = (routes_a.len(), routes_b.len());
    let k = rng.gen_range(1..=na.min(nb));
    let start = rng.gen_range(0..na);

    let mut in_sel_a = vec![false; data.n + 1];
    let mut sel_a = vec![false; na];
    for i in 0..k {
        let idx = (start + i) % na;
        sel_a[idx] = true;
        for &c in routes_a[idx].1 {
            in_sel_a[c] = true;
        }
    }

    let mut overlap: Vec<(usize, usize)> = routes_b
        .iter()
        .enumerate()
        .map(|(j, (_, r))| (r.iter().filter(|&&c| in_sel_a[c]).count(), j))
        .collect();
    overlap.sort_by(|x, y| y.0.cmp(&x.0).then(x.1.cmp(&y.1)));
    let chosen_b: Vec<usize> = overlap[..k].iter().map(|&(_, j)| j).collect();

    let mut in_sel_b = vec![false; data.n + 1];
    for &j in &chosen_b {
        for &c in routes_b[j].1 {
            in_sel_b[c] = true;
        }
    }
    let mut in_kept_a = vec![false; data.n + 1];
    for (i, (_, r)) in routes_a.iter().enumerate() {
        if !sel_a[i] {
            for &c in r.iter() {
                in_kept_a[c] = true;
            }
        }
    }

    let kept_a = || {
        routes_a
            .iter()
            .enumerate()
            .filter(|(i, _)| !sel_a[*i])
            .map(|(_, &(slot, r))| (data.slot_type[slot], r.clone()))
    };
    let picked_b = || chosen_b.iter().map(|&j| (data.slot_type[routes_b[j].0], routes_b[j].1.clone()));

    let first: Vec<(usize, Vec<usize>)> = kept_a()
        .map(|(ty, r)| (ty, r.into_iter().filter(|&c| !in_sel_b[c]).collect()))
        .chain(picked_b())
        .collect();
    let second: Vec<(usize, Vec<usize>)> = kept_a()
        .chain(picked_b().map(|(ty, r)| (ty, r.into_iter().filter(|&c| !in_kept_a[c]).collect())))
        .collect();

    let x = assemble(data, first, w, rng);
    let y = assemble(data, second, w, rng);
    if y.penalized(w) < x.penalized(w) {
        y
    } else {
        x
    }
}

fn nonempty(ind: &Individual) -> Vec<(usize, &Vec<usize>)> {
    ind.routes.iter().enumerate().filter(|(_, r)| !r.is_empty()).collect()
}

fn assemble(
    data: &ProblemData,
    typed_routes: Vec<(usize, Vec<usize>)>,
    w: &PenaltyWeights,
    rng: &mut Rng,
) -> Individual {
    let mut free: Vec<Vec<usize>> = vec![Vec::new(); data.vehicles.len()];
    for (slot, &ty) in data.slot_type.iter().enumerate().rev() {
        free[ty].push(slot);
    }
    let mut routes = vec![Vec::new(); data.num_slots()];
    let mut present = vec![false; data.n + 1];
    for (ty, r) in typed_routes.into_iter().filter(|(_, r)| !r.is_empty()) {
        if let Some(slot) = take_slot(&mut free, ty) {
            for &c in &r {
                present[c] = true;
            }
            routes[slot] = r;
        }
    }
    let mut missing: Vec<usize> = (1..=data.n).filter(|&c| !present[c]).collect();
    missing.shuffle(rng);
    insert_clients(data, &mut routes, &missing, w);
    Individual::new(data, routes)
}
