use serde::{Deserialize, Serialize};

use super::{Cost, Load, Time};

/// Concatenation statistics of a visit sequence.
///
/// `earliest..=latest` is the set of start times at the first visit that
/// minimize both duration and time warp. `release` and `dispatch_late` are
/// the tightest dispatch bounds over all members: the sequence cannot leave
/// the depot before `release` and should leave no later than `dispatch_late`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentStats {
    pub duration: Time,
    pub time_warp: Time,
    pub earliest: Time,
    pub latest: Time,
    pub cost: Cost,
    pub load: Load,
    pub release: Time,
    pub dispatch_late: Time,
}

impl SegmentStats {
    pub fn singleton(
        service: Time,
        tw_early: Time,
        tw_late: Time,
        demand: Load,
        dispatch_early: Time,
        dispatch_late: Time,
    ) -> Self {
        SegmentStats {
            duration: service,
            time_warp: 0,
            earliest: tw_early,
            latest: tw_late,
            cost: 0,
            load: demand,
            release: dispatch_early,
            dispatch_late,
        }
    }

    /// Depot visit: no service, no demand, window and dispatch window span
    /// `[0, horizon]`.
    pub fn depot(horizon: Time) -> Self {
        Self::singleton(0, 0, horizon, 0, 0, horizon)
    }

    /// Start-of-route depot for a vehicle that may not leave before
    /// `earliest_dispatch`.
    pub fn depot_start(horizon: Time, earliest_dispatch: Time) -> Self {
        Self::singleton(0, 0, horizon, 0, earliest_dispatch, horizon)
    }

    /// Concatenates `self ⊕ other`, where `travel` and `cost` describe the
    /// arc from the last visit of `self` to the first visit of `other`.
    #[inline]
    pub fn concat(&self, other: &SegmentStats, travel: Time, cost: Cost) -> SegmentStats {
        let delta = self.duration - self.time_warp + travel;
        let delta_wait = (other.earliest - delta - self.latest).max(0);
        let delta_warp = (self.earliest + delta - other.latest).max(0);

        SegmentStats {
            duration: self.duration + other.duration + travel + delta_wait,
            time_warp: self.time_warp + other.time_warp + delta_warp,
            earliest: (other.earliest - delta).max(self.earliest) - delta_wait,
            latest: (other.latest - delta).min(self.latest) + delta_warp,
            cost: self.cost + other.cost + cost,
            load: self.load + other.load,
            release: self.release.max(other.release),
            dispatch_late: self.dispatch_late.min(other.dispatch_late),
        }
    }

    /// Total time warp of a complete depot-to-depot route, including the
    /// warp caused by leaving after `latest` to respect the release bound
    /// and the forward warp when the dispatch window is empty.
    #[inline]
    pub fn route_time_warp(&self) -> Time {
        self.time_warp
            + (self.release - self.latest).max(0)
            + (self.release - self.dispatch_late).max(0)
    }
}
