use rand::Rng as _;

use crate::model::PenaltyWeights;
use crate::rng::Rng;

use super::individual::Individual;
use super::params::PopulationParams;

/// Members plus their pairwise broken-pairs distances.
#[derive(Default)]
struct SubPopulation {
    members: Vec<Individual>,
    dist: Vec<Vec<f64>>,
    fitness: Vec<f64>,
}

impl SubPopulation {
    fn add(&mut self, ind: Individual) {
        let row: Vec<f64> = self.members.iter().map(|m| ind.broken_pairs(m)).collect();
        for (r, &d) in self.dist.iter_mut().zip(&row) {
            r.push(d);
        }
        let mut row = row;
        row.push(0.0);
        self.dist.push(row);
        self.members.push(ind);
        self.fitness.push(0.0);
    }

    fn remove(&mut self, i: usize) {
        self.members.remove(i);
        self.dist.remove(i);
        for r in &mut self.dist {
            r.remove(i);
        }
        self.fitness.remove(i);
    }

    fn avg_closest(&self, i: usize, num_close: usize) -> f64 {
        let mut d: Vec<f64> = (0..self.members.len()).filter(|&j| j != i).map(|j| self.dist[i][j]).collect();
        if d.is_empty() {
            return 0.0;
        }
        d.sort_by(f64::total_cmp);
        let k = num_close.min(d.len()).max(1);
        d[..k].iter().sum::<f64>() / k as f64
    }

    /// Biased fitness: cost rank plus weighted diversity rank, both scaled
    /// to `[0, 1]`; lower is better.
    fn update_fitness(&mut self, params: &PopulationParams, w: &PenaltyWeights) {
        let n = self.members.len();
        if n == 0 {
            return;
        }
        if n == 1 {
            self.fitness[0] = 0.0;
            return;
        }
        let mut by_cost: Vec<usize> = (0..n).collect();
        by_cost.sort_by_key(|&i| (self.members[i].penalized(w), i));
        let diversity: Vec<f64> = (0..n).map(|i| self.avg_closest(i, params.num_close)).collect();
        let mut by_div: Vec<usize> = (0..n).collect();
        by_div.sort_by(|&a, &b| diversity[b].total_cmp(&diversity[a]).then(a.cmp(&b)));
        let mut div_rank = vec![0usize; n];
        for (rank, &i) in by_div.iter().enumerate() {
            div_rank[i] = rank;
        }
        let elite_weight = 1.0 - (params.num_elite as f64 / n as f64).min(1.0);
        let scale = (n - 1) as f64;
        for (rank, &i) in by_cost.iter().enumerate() {
            self.fitness[i] = rank as f64 / scale + elite_weight * div_rank[i] as f64 / scale;
        }
    }

    /// Shrinks to `min_size`, removing duplicates first, then the worst
    /// fitness.
    fn purge(&mut self, params: &PopulationParams, w: &PenaltyWeights) {
        while self.members.len() > params.min_size {
            let dup = (0..self.members.len())
                .find(|&i| (0..i).any(|j| self.dist[i][j] == 0.0 && self.members[i].cost == self.members[j].cost));
            if let Some(i) = dup {
                self.remove(i);
                continue;
            }
            self.update_fitness(params, w);
            let worst = (0..self.members.len())
                .max_by(|&a, &b| self.fitness[a].total_cmp(&self.fitness[b]).then(a.cmp(&b)))
                .expect("nonempty");
            self.remove(worst);
        }
    }
}

pub(crate) struct Population {
    params: PopulationParams,
    feasible: SubPopulation,
    infeasible: SubPopulation,
}

impl Population {
    pub fn new(params: PopulationParams) -> Self {
        Population {
            params,
            feasible: SubPopulation::default(),
            infeasible: SubPopulation::default(),
        }
    }

    pub fn len(&self) -> usize {
        self.feasible.members.len() + self.infeasible.members.len()
    }

    pub fn clear(&mut self) {
        self.feasible = SubPopulation::default();
        self.infeasible = SubPopulation::default();
    }

    pub fn add(&mut self, ind: Individual, w: &PenaltyWeights) {
        let max = self.params.min_size + self.params.generation_size;
        let sub = if ind.feasible() {
            &mut self.feasible
        } else {
            &mut self.infeasible
        };
        sub.add(ind);
        if sub.members.len() > max {
            sub.purge(&self.params, w);
        }
    }

    fn tournament(&self, rng: &mut Rng) -> &Individual {
        let n = self.len();
        let pick = |i: usize| -> (&Individual, f64) {
            let f = self.feasible.members.len();
            if i < f {
                (&self.feasible.members[i], self.feasible.fitness[i])
            } else {
                (&self.infeasible.members[i - f], self.infeasible.fitness[i - f])
            }
        };
        let a = pick(rng.gen_range(0..n));
        let b = pick(rng.gen_range(0..n));
        if b.1 < a.1 {
            b.0
        } else {
            a.0
        }
    }

    /// Two parents by binary tournament; the second is redrawn (up to ten
    /// times) while its distance to the first lies outside the diversity
    /// bounds.
    pub fn select(&mut self, w: &PenaltyWeights, rng: &mut Rng) -> (Individual, Individual) {
        self.feasible.update_fitness(&self.params, w);
        self.infeasible.update_fitness(&self.params, w);
        let first = self.tournament(rng).clone();
        let mut second = self.tournament(rng);
        for _ in 0..10 {
            let d = first.broken_pairs(second);
            if (self.params.lb_diversity..=self.params.ub_diversity).contains(&d) {
                break;
            }
            second = self.tournament(rng);
        }
        let second = second.clone();
        (first, second)
    }
}
