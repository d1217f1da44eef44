use crate::model::PenaltyWeights;

use super::params::PenaltyParams;

const MIN_WEIGHT: i64 = 1;
const MAX_WEIGHT: i64 = 100_000;

/// Adapts capacity and time-warp weights towards a target fraction of
/// feasible local search outcomes.
#[derive(Debug, Clone)]
pub struct PenaltyManager {
    params: PenaltyParams,
    weights: PenaltyWeights,
    load_feasible: Vec<bool>,
    time_feasible: Vec<bool>,
}

impl PenaltyManager {
    pub fn new(params: PenaltyParams) -> Self {
        let weights = PenaltyWeights {
            capacity: params.init_capacity,
            time_warp: params.init_time_warp,
        };
        PenaltyManager {
            params,
            weights,
            load_feasible: Vec::new(),
            time_feasible: Vec::new(),
        }
    }

    pub fn weights(&self) -> PenaltyWeights {
        self.weights
    }

    pub fn booster_weights(&self) -> PenaltyWeights {
        PenaltyWeights {
            capacity: self.weights.capacity * self.params.repair_booster,
            time_warp: self.weights.time_warp * self.params.repair_booster,
        }
    }

    /// Records one solution's feasibility; updates the weights once enough
    /// registrations have accumulated.
    pub fn register(&mut self, load_feasible: bool, time_feasible: bool) {
        self.load_feasible.push(load_feasible);
        self.time_feasible.push(time_feasible);
        if self.load_feasible.len() >= self.params.registrations_between_updates {
            self.weights.capacity = update_weight(&self.params, self.weights.capacity, fraction(&self.load_feasible));
            self.weights.time_warp = update_weight(&self.params, self.weights.time_warp, fraction(&self.time_feasible));
            self.load_feasible.clear();
            self.time_feasible.clear();
        }
    }
}

fn fraction(xs: &[bool]) -> f64 {
    xs.iter().filter(|&&x| x).count() as f64 / xs.len() as f64
}

/// One weight update: multiply by the increase factor when the feasible
/// fraction is below target, by the decrease factor when above.
pub fn update_weight(params: &PenaltyParams, weight: i64, feasible_fraction: f64) -> i64 {
    if feasible_fraction < params.target_feasible {
        let next = ((weight as f64) * params.increase).round() as i64;
        let next = if next == weight { weight + 1 } else { next };
        next.clamp(MIN_WEIGHT, MAX_WEIGHT)
    } else if feasible_fraction > params.target_feasible {
        (((weight as f64) * params.decrease).round() as i64).clamp(MIN_WEIGHT, MAX_WEIGHT)
    } else {
        weight
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::SolverParams;

    fn scenario() -> PenaltyParams {
        SolverParams::scenario_profile().penalty
    }

    #[test]
    fn increase_when_mostly_infeasible() {
        assert_eq!(update_weight(&scenario(), 20, 0.1), 26);
    }

    #[test]
    fn decrease_when_mostly_feasible() {
        assert_eq!(update_weight(&scenario(), 26, 0.9), 13);
    }

    #[test]
    fn weight_never_below_one() {
        assert_eq!(update_weight(&scenario(), 1, 1.0), 1);
        assert_eq!(update_weight(&scenario(), 1, 0.0), 2);
    }

    #[test]
    fn manager_updates_after_registrations() {
        let mut pm = PenaltyManager::new(scenario());
        for _ in 0..9 {
            pm.register(false, true);
        }
        assert_eq!(pm.weights(), PenaltyWeights { capacity: 20, time_warp: 6 });
        pm.register(false, true);
        assert_eq!(pm.weights(), PenaltyWeights { capacity: 26, time_warp: 3 });
        assert_eq!(pm.booster_weights(), PenaltyWeights { capacity: 26 * 12, time_warp: 36 });
    }
}
