//! Hybrid genetic search for static routing problems with time windows and
//! dispatch windows.
//!
//! Each iteration selects two parents, recombines them with a selective
//! route exchange, educates the offspring with a granular local search and
//! inserts it into a population split into feasible and infeasible parts.
//! Capacity excess and time warp are penalized with adaptive weights.

mod crossover;
mod individual;
mod local_search;
mod params;
mod penalty;
mod population;
mod problem;

use std::time::{Duration, Instant};

use rand::Rng as _;

use crate::model::{Cost, PenaltyWeights, Solution, StaticInstance};
use crate::rng::{rng_from, Rng};
use crate::{Error, Result};

use individual::{random_individual, Individual};
use local_search::LocalSearch;
use population::Population;
use problem::ProblemData;

pub use params::{
    NeighbourhoodParams, OperatorParams, PenaltyParams, PopulationParams, SolverParams, StopCriterion,
};
pub use penalty::{update_weight, PenaltyManager};

/// Result of a solver run with search diagnostics.
#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub solution: Solution,
    pub iterations: u64,
    pub elapsed: Duration,
    /// `(iteration, best penalized cost at default weights)` whenever the
    /// best solution improved; non-increasing in the cost component.
    pub history: Vec<(u64, Cost)>,
}

/// Solves `instance` and returns the best feasible solution found, or the
/// best penalized solution when none is feasible.
pub fn solve(instance: &StaticInstance, params: &SolverParams, stop: StopCriterion, seed: u64) -> Result<Solution> {
    Ok(solve_detailed(instance, params, stop, seed)?.solution)
}

pub fn solve_detailed(
    instance: &StaticInstance,
    params: &SolverParams,
    stop: StopCriterion,
    seed: u64,
) -> Result<SolveOutcome> {
    params.validate()?;
    stop.validate()?;
    let data = ProblemData::new(instance, &params.neighbourhood)?;
    let mut search = Search {
        data: &data,
        params,
        rng: rng_from(seed),
        penalties: PenaltyManager::new(params.penalty.clone()),
        ls: LocalSearch::new(&data, &params.operators),
        population: Population::new(params.population.clone()),
        best: None,
        best_feasible: None,
        history: Vec::new(),
        iteration: 0,
        last_improvement: 0,
    };
    let start = Instant::now();
    let out_of_time = |start: &Instant| stop.time_limit.is_some_and(|t| start.elapsed() >= t);

    search.initialize(|| out_of_time(&start));
    while stop.max_iterations.is_none_or(|m| search.iteration < m) && !out_of_time(&start) {
        search.iteration += 1;
        let w = search.penalties.weights();
        let (a, b) = search.population.select(&w, &mut search.rng);
        let child = crossover::srex(&data, &a, &b, &w, &mut search.rng);
        search.educate(child);
        if search.iteration - search.last_improvement > params.restart_after {
            search.population.clear();
            search.initialize(|| out_of_time(&start));
            search.last_improvement = search.iteration;
        }
    }

    let best = search.best_feasible.or(search.best).expect("initialization produces a solution");
    Ok(SolveOutcome {
        solution: best.to_solution(&data, instance)?,
        iterations: search.iteration,
        elapsed: start.elapsed(),
        history: search.history,
    })
}

struct Search<'a> {
    data: &'a ProblemData,
    params: &'a SolverParams,
    rng: Rng,
    penalties: PenaltyManager,
    ls: LocalSearch<'a>,
    population: Population,
    best: Option<Individual>,
    best_feasible: Option<Individual>,
    history: Vec<(u64, Cost)>,
    iteration: u64,
    last_improvement: u64,
}

impl Search<'_> {
    fn initialize(&mut self, out_of_time: impl Fn() -> bool) {
        let count = self.params.population.min_size + self.params.population.generation_size;
        for i in 0..count {
            if i > 0 && out_of_time() {
                break;
            }
            let ind = random_individual(self.data, &self.penalties.weights(), &mut self.rng);
            self.educate(ind);
        }
    }

    fn educate(&mut self, ind: Individual) {
        let w = self.penalties.weights();
        let ind = self.ls.run(&ind, w, &mut self.rng);
        self.penalties.register(ind.excess == 0, ind.warp == 0);
        self.track(&ind);
        let repair = !ind.feasible() && self.rng.gen_bool(self.params.repair_probability);
        if repair {
            let repaired = self.ls.run(&ind, self.penalties.booster_weights(), &mut self.rng);
            if repaired.feasible() {
                self.track(&repaired);
                self.population.add(repaired, &w);
            }
        }
        self.population.add(ind, &w);
    }

    fn track(&mut self, ind: &Individual) {
        let reference = PenaltyWeights::default();
        let pen = ind.penalized(&reference);
        if self.best.as_ref().is_none_or(|b| pen < b.penalized(&reference)) {
            self.best = Some(ind.clone());
            self.history.push((self.iteration, pen));
            self.last_improvement = self.iteration;
        }
        if ind.feasible() && self.best_feasible.as_ref().is_none_or(|b| ind.cost < b.cost) {
            self.best_feasible = Some(ind.clone());
            self.last_improvement = self.iteration;
        }
    }
}

fn problem_for(instance: &StaticInstance, params: &SolverParams) -> Result<ProblemData> {
    params.validate()?;
    ProblemData::new(instance, &params.neighbourhood)
}

/// Recombines two complete solutions of `instance` with the selective
/// route exchange; uncovered requests are reinserted greedily.
pub fn crossover(instance: &StaticInstance, a: &Solution, b: &Solution, seed: u64) -> Result<Solution> {
    a.check_coverage(instance).map_err(|_| Error::MismatchedParents)?;
    b.check_coverage(instance).map_err(|_| Error::MismatchedParents)?;
    let data = problem_for(instance, &SolverParams::default())?;
    let ia = Individual::from_solution(&data, a).map_err(|_| Error::MismatchedParents)?;
    let ib = Individual::from_solution(&data, b).map_err(|_| Error::MismatchedParents)?;
    let child = crossover::srex(&data, &ia, &ib, &PenaltyWeights::default(), &mut rng_from(seed));
    child.to_solution(&data, instance)
}

/// Runs the local search on a complete solution; the result's penalized
/// cost at `weights` never exceeds the input's.
pub fn local_search(
    instance: &StaticInstance,
    candidate: &Solution,
    weights: PenaltyWeights,
    params: &SolverParams,
    seed: u64,
) -> Result<Solution> {
    candidate.check_coverage(instance)?;
    let data = problem_for(instance, params)?;
    let ind = Individual::from_solution(&data, candidate)?;
    let mut ls = LocalSearch::new(&data, &params.operators);
    let out = ls.run(&ind, weights, &mut rng_from(seed));
    out.to_solution(&data, instance)
}

/// Penalized cost of `solution` at `weights`.
pub fn penalized_cost(instance: &StaticInstance, solution: &Solution, weights: PenaltyWeights) -> Result<Cost> {
    let mut total = 0;
    for route in &solution.routes {
        let eval = crate::model::evaluate_route(route, instance)?;
        total += weights.penalized(eval.cost, eval.excess_load, eval.time_warp);
    }
    Ok(total)
}
