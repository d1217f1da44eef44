use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PopulationParams {
    pub min_size: usize,
    pub generation_size: usize,
    pub num_elite: usize,
    pub num_close: usize,
    pub lb_diversity: f64,
    pub ub_diversity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PenaltyParams {
    pub init_capacity: i64,
    pub init_time_warp: i64,
    pub repair_booster: i64,
    pub registrations_between_updates: usize,
    pub increase: f64,
    pub decrease: f64,
    pub target_feasible: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeighbourhoodParams {
    pub num_neighbours: usize,
    pub weight_wait_time: f64,
    pub weight_time_warp: f64,
    pub symmetric_proximity: bool,
    pub symmetric_neighbours: bool,
}

/// Local search operator toggles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorParams {
    /// Enabled `(N, M)`-exchange operators.
    pub exchanges: Vec<(usize, usize)>,
    pub move_two_clients_reversed: bool,
    pub two_opt: bool,
    pub relocate_star: bool,
    pub swap_star: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverParams {
    pub repair_probability: f64,
    pub restart_after: u64,
    pub population: PopulationParams,
    pub penalty: PenaltyParams,
    pub neighbourhood: NeighbourhoodParams,
    pub operators: OperatorParams,
}

impl Default for SolverParams {
    fn default() -> Self {
        SolverParams {
            repair_probability: 0.8,
            restart_after: 20_000,
            population: PopulationParams {
                min_size: 25,
                generation_size: 40,
                num_elite: 4,
                num_close: 5,
                lb_diversity: 0.1,
                ub_diversity: 0.5,
            },
            penalty: PenaltyParams {
                init_capacity: 20,
                init_time_warp: 6,
                repair_booster: 12,
                registrations_between_updates: 50,
                increase: 1.34,
                decrease: 0.32,
                target_feasible: 0.43,
            },
            neighbourhood: NeighbourhoodParams {
                num_neighbours: 40,
                weight_wait_time: 0.2,
                weight_time_warp: 1.0,
                symmetric_proximity: true,
                symmetric_neighbours: false,
            },
            operators: OperatorParams {
                exchanges: vec![(1, 0), (2, 0), (3, 0), (1, 1), (2, 1), (2, 2), (3, 2), (3, 3)],
                move_two_clients_reversed: true,
                two_opt: true,
                relocate_star: true,
                swap_star: true,
            },
        }
    }
}

impl SolverParams {
    /// Profile for routing a chosen action or a hindsight instance.
    pub fn default_profile() -> Self {
        Self::default()
    }

    /// Profile for short scenario solves: small population, frequent
    /// penalty updates and a reduced operator set.
    pub fn scenario_profile() -> Self {
        let mut p = Self::default();
        p.population.min_size = 5;
        p.population.generation_size = 3;
        p.population.num_elite = 2;
        p.population.num_close = 2;
        p.penalty.registrations_between_updates = 10;
        p.penalty.increase = 1.30;
        p.penalty.decrease = 0.50;
        p.operators = OperatorParams {
            exchanges: vec![(1, 0)],
            move_two_clients_reversed: false,
            two_opt: true,
            relocate_star: false,
            swap_star: true,
        };
        p
    }

    pub fn validate(&self) -> Result<()> {
        let pop = &self.population;
        let pen = &self.penalty;
        let fail = |m: &str| Err(Error::Config(m.to_string()));
        if pop.min_size < 1 || pop.generation_size < 1 {
            return fail("population sizes must be at least 1");
        }
        if !(0.0 <= pop.lb_diversity && pop.lb_diversity <= pop.ub_diversity && pop.ub_diversity <= 1.0) {
            return fail("diversity bounds must satisfy 0 <= lb <= ub <= 1");
        }
        if !(0.0 < pen.target_feasible && pen.target_feasible < 1.0) {
            return fail("target feasible fraction must lie in (0, 1)");
        }
        if !(pen.increase > 1.0 && pen.decrease < 1.0 && pen.decrease > 0.0) {
            return fail("penalty factors must satisfy increase > 1 > decrease > 0");
        }
        if pen.init_capacity < 1 || pen.init_time_warp < 1 || pen.repair_booster < 1 {
            return fail("penalty weights and booster must be at least 1");
        }
        if pen.registrations_between_updates < 1 {
            return fail("registrations between updates must be at least 1");
        }
        if !(0.0..=1.0).contains(&self.repair_probability) {
            return fail("repair probability must lie in [0, 1]");
        }
        for &(n, m) in &self.operators.exchanges {
            if !(1..=3).contains(&n) || m > n {
                return fail("exchange operators need 1 <= N <= 3 and M <= N");
            }
        }
        Ok(())
    }
}

/// When to stop a solver run. At least one bound must be set; a run bounded
/// only by iterations is fully deterministic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StopCriterion {
    pub time_limit: Option<Duration>,
    pub max_iterations: Option<u64>,
}

impl StopCriterion {
    pub fn time(limit: Duration) -> Self {
        StopCriterion {
            time_limit: Some(limit),
            max_iterations: None,
        }
    }

    pub fn millis(ms: u64) -> Self {
        Self::time(Duration::from_millis(ms))
    }

    pub fn iterations(n: u64) -> Self {
        StopCriterion {
            time_limit: None,
            max_iterations: Some(n),
        }
    }

    pub fn with_iterations(mut self, n: u64) -> Self {
        self.max_iterations = Some(n);
        self
    }

    /// Both bounds multiplied by `factor`; iteration bounds stay at least 1.
    pub fn scaled(&self, factor: f64) -> Self {
        StopCriterion {
            time_limit: self.time_limit.map(|t| t.mul_f64(factor)),
            max_iterations: self.max_iterations.map(|n| ((n as f64 * factor).round() as u64).max(1)),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match (self.time_limit, self.max_iterations) {
            (None, None) => Err(Error::Config("stop criterion needs a time or iteration bound".into())),
            (Some(t), _) if t.is_zero() => Err(Error::Config("time limit must be positive".into())),
            _ => Ok(()),
        }
    }
}
