//! Experiment harness: runs policies on matrices of dynamic instances,
//! computes gaps to the hindsight bound, aggregates them with paired
//! significance tests and produces sweep and fleet-comparison series.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::env::{
    gap_percent, limited_fleet, realize_episode, solve_hindsight, Environment, EpochConfig, EpochRecord, Episode,
    FleetMode, SolveBudget,
};
use crate::instgen::{EpisodeSpec, InstanceClassSpec, SourceInstance, TopologyStore};
use crate::model::Cost;
use crate::policies::{IcdConfig, IterationTrace, Policy};
use crate::rng::{derive_seed, stream};
use crate::solver::{SolverParams, StopCriterion};
use crate::{Error, Result};

/// Significance level of the paired tests.
pub const ALPHA: f64 = 0.05;

/// Counts of invariant violations observed while running an episode.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub steps: usize,
    /// Actions that omitted a must-dispatch request.
    pub must_dispatch: usize,
    /// ICD iterations whose dispatch and postpone sets overlapped.
    pub overlap: usize,
    /// ICD iterations where the undecided set grew.
    pub undecided_growth: usize,
    /// Episode ended with requests not dispatched exactly once.
    pub conservation: usize,
    /// Steps where the primary carry-over did not match the accounting rule.
    pub fleet_accounting: usize,
}

impl InvariantReport {
    pub fn violations(&self) -> usize {
        self.must_dispatch + self.overlap + self.undecided_growth + self.conservation + self.fleet_accounting
    }

    pub fn merge(&mut self, other: &InvariantReport) {
        self.steps += other.steps;
        self.must_dispatch += other.must_dispatch;
        self.overlap += other.overlap;
        self.undecided_growth += other.undecided_growth;
        self.conservation += other.conservation;
        self.fleet_accounting += other.fleet_accounting;
    }

    fn check_trace(&mut self, initial_undecided: usize, trace: &[IterationTrace]) {
        let mut previous = initial_undecided;
        for it in trace {
            self.overlap += it.overlap as usize;
            self.undecided_growth += (it.undecided > previous) as usize;
            previous = it.undecided;
        }
    }
}

/// Outcome of one policy on one realized episode.
#[derive(Debug, Clone)]
pub struct EpisodeRun {
    pub policy: String,
    pub total_cost: Cost,
    pub records: Vec<EpochRecord>,
    pub traces: Vec<Vec<IterationTrace>>,
    pub invariants: InvariantReport,
}

impl EpisodeRun {
    pub fn secondaries_used(&self) -> usize {
        self.records.iter().map(|r| r.secondaries_used).sum()
    }
}

/// Runs `policy` through a full episode, checking the episode invariants
/// on every step.
pub fn run_episode(config: Arc<EpochConfig>, episode: &Episode, policy: &Policy) -> Result<EpisodeRun> {
    let seed = derive_seed(episode.seed, &[stream::POLICY]);
    let mut env = Environment::new(Arc::clone(&config), episode.clone())?;
    let mut report = InvariantReport::default();
    let mut traces = Vec::new();
    while !env.is_done() {
        let state = env.state().clone();
        let must = env.must_dispatch().to_vec();
        let started = Instant::now();
        let decision = policy.decide(&state, &must, &config, seed)?;
        let decide_ms = started.elapsed().as_millis() as u64;

        let chosen: BTreeSet<_> = decision.action.dispatch.iter().copied().collect();
        if must.iter().any(|id| !chosen.contains(id)) {
            report.must_dispatch += 1;
        }
        report.check_trace(state.requests.len().saturating_sub(must.len()), &decision.trace);
        traces.push(decision.trace);

        let outcome = env.step(&decision.action, decide_ms)?;
        report.steps += 1;
        if let (Some(have), Some(next)) = (state.primaries, env.state().primaries) {
            if !env.is_done() {
                let planned = config.planned_primaries(state.epoch + 1).unwrap_or(0);
                if next != have - outcome.record.primaries_used + planned {
                    report.fleet_accounting += 1;
                }
            }
        }
    }
    if env.num_dispatched() != episode.num_requests() || !env.state().requests.is_empty() {
        report.conservation += 1;
    }
    Ok(EpisodeRun {
        policy: policy.name().to_string(),
        total_cost: env.total_cost(),
        records: env.records().to_vec(),
        traces,
        invariants: report,
    })
}

/// Budgets and policies for a benchmark run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub policies: Vec<Policy>,
    pub routing: SolveBudget,
    pub hindsight: SolveBudget,
    /// Run with greedy-planned primaries instead of an unlimited fleet.
    pub limited_fleet: bool,
}

/// The five compared policies with a common scenario budget: ICD variants
/// with `iterations` × `scenarios` scenario solves, rollout with all of it
/// on one scenario.
pub fn standard_policies(iterations: usize, scenarios: usize, scenario: SolveBudget) -> Vec<Policy> {
    let total = (iterations * scenarios) as f64;
    let rollout = SolveBudget::new(scenario.params.clone(), scenario.stop.scaled(total));
    vec![
        Policy::Rollout { budget: rollout },
        Policy::Icd(IcdConfig::dispatch_threshold().with_budget(iterations, scenarios, scenario.clone())),
        Policy::Icd(IcdConfig::postpone_threshold().with_budget(iterations, scenarios, scenario.clone())),
        Policy::Icd(IcdConfig::hamming().with_budget(iterations, scenarios, scenario.clone())),
        Policy::Icd(IcdConfig::double_threshold().with_budget(iterations, scenarios, scenario)),
    ]
}

impl BenchConfig {
    /// Wall-clock budgets: 30 scenarios × 3 iterations × 1 s, 30 s routing,
    /// 600 s hindsight.
    pub fn paper() -> Self {
        let scenario = SolveBudget::new(SolverParams::scenario_profile(), StopCriterion::millis(1000));
        BenchConfig {
            policies: standard_policies(3, 30, scenario),
            routing: SolveBudget::new(SolverParams::default_profile(), StopCriterion::millis(30_000)),
            hindsight: SolveBudget::new(SolverParams::default_profile(), StopCriterion::millis(600_000)),
            limited_fleet: false,
        }
    }

    /// Iteration-bounded budgets for single-core runs; deterministic.
    pub fn desk() -> Self {
        let scenario = SolveBudget::new(SolverParams::scenario_profile(), StopCriterion::iterations(60));
        BenchConfig {
            policies: standard_policies(3, 10, scenario),
            routing: SolveBudget::new(SolverParams::scenario_profile(), StopCriterion::iterations(500)),
            hindsight: SolveBudget::new(SolverParams::scenario_profile(), StopCriterion::iterations(5000)),
            limited_fleet: false,
        }
    }
}

/// Result of one (episode, policy) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub class: InstanceClassSpec,
    pub source: SourceInstance,
    pub replication: u32,
    pub episode_seed: u64,
    pub policy: String,
    pub cost: Cost,
    pub hindsight: Cost,
    pub gap: f64,
    pub requests: usize,
    pub secondaries: usize,
    pub epoch_ms: Vec<u64>,
    pub invariants: InvariantReport,
    /// Set when the run failed; cost and gap are then meaningless.
    pub failure: Option<String>,
}

impl RunRecord {
    pub fn ok(&self) -> bool {
        self.failure.is_none()
    }
}

fn episode_config(store: &TopologyStore, spec: &EpisodeSpec, routing: &SolveBudget) -> Result<EpochConfig> {
    let topology = store.get(spec.source)?;
    let config = EpochConfig::new(topology, spec.class, routing.clone());
    config.validate()?;
    Ok(config)
}

/// Realized episode, its configuration under the requested fleet mode and
/// the hindsight cost (always under an unlimited fleet).
pub struct PreparedEpisode {
    pub spec: EpisodeSpec,
    pub config: Arc<EpochConfig>,
    pub episode: Episode,
    pub hindsight: Cost,
}

pub fn prepare_episode(
    store: &TopologyStore,
    spec: &EpisodeSpec,
    routing: &SolveBudget,
    hindsight: &SolveBudget,
    limited: bool,
) -> Result<PreparedEpisode> {
    let mut config = episode_config(store, spec, routing)?;
    let episode = realize_episode(&config, spec.seed);
    let bound = solve_hindsight(&config, &episode, hindsight)?;
    if limited {
        config = config.clone().with_fleet(limited_fleet(&config, &episode)?);
    }
    Ok(PreparedEpisode {
        spec: *spec,
        config: Arc::new(config),
        episode,
        hindsight: bound,
    })
}

fn record(prepared: &PreparedEpisode, policy: &Policy, run: Result<EpisodeRun>) -> RunRecord {
    let spec = &prepared.spec;
    let mut rec = RunRecord {
        class: spec.class,
        source: spec.source,
        replication: spec.replication,
        episode_seed: spec.seed,
        policy: policy.name().to_string(),
        cost: 0,
        hindsight: prepared.hindsight,
        gap: f64::NAN,
        requests: prepared.episode.num_requests(),
        secondaries: 0,
        epoch_ms: vec![],
        invariants: InvariantReport::default(),
        failure: None,
    };
    match run {
        Ok(run) => {
            rec.cost = run.total_cost;
            rec.gap = gap_percent(run.total_cost, prepared.hindsight);
            log::info!("{} {} rep {}: {} gap {:.2}%", spec.class.label(), spec.source, spec.replication, policy.name(), rec.gap);
            rec.secondaries = run.secondaries_used();
            rec.epoch_ms = run.records.iter().map(|r| r.decide_ms + r.route_ms).collect();
            rec.invariants = run.invariants;
        }
        Err(e) => {
            log::error!("{} on episode {}: {e}", policy.name(), spec.seed);
            rec.failure = Some(e.to_string());
        }
    }
    rec
}

fn failed_episode(spec: &EpisodeSpec, policies: &[Policy], error: &Error) -> Vec<RunRecord> {
    log::error!("episode {} could not be prepared: {error}", spec.seed);
    policies
        .iter()
        .map(|p| RunRecord {
            class: spec.class,
            source: spec.source,
            replication: spec.replication,
            episode_seed: spec.seed,
            policy: p.name().to_string(),
            cost: 0,
            hindsight: 0,
            gap: f64::NAN,
            requests: 0,
            secondaries: 0,
            epoch_ms: vec![],
            invariants: InvariantReport::default(),
            failure: Some(error.to_string()),
        })
        .collect()
}

/// Runs every policy on every episode. The hindsight problem is solved
/// once per episode and shared by all policies; failures are recorded and
/// the run continues.
pub fn run_matrix(episodes: &[EpisodeSpec], store: &TopologyStore, bench: &BenchConfig) -> Result<Vec<RunRecord>> {
    if episodes.is_empty() || bench.policies.is_empty() {
        return Err(Error::Config("benchmark needs at least one episode and one policy".into()));
    }
    let rows: Vec<Vec<RunRecord>> = episodes
        .par_iter()
        .map(|spec| {
            match prepare_episode(store, spec, &bench.routing, &bench.hindsight, bench.limited_fleet) {
                Ok(prepared) => bench
                    .policies
                    .iter()
                    .map(|p| record(&prepared, p, run_episode(Arc::clone(&prepared.config), &prepared.episode, p)))
                    .collect(),
                Err(e) => failed_episode(spec, &bench.policies, &e),
            }
        })
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

/// Paired two-sided t-test on `a[i] - b[i]`. Returns `(p, degenerate)`;
/// zero variance yields `p = 1` flagged degenerate.
pub fn paired_t_test(a: &[f64], b: &[f64]) -> (f64, bool) {
    assert_eq!(a.len(), b.len(), "paired samples differ in length");
    let n = a.len();
    if n < 2 {
        return (1.0, true);
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let mean = diffs.iter().sum::<f64>() / n as f64;
    let var = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    if var <= f64::EPSILON * mean.abs().max(1.0) {
        return (1.0, true);
    }
    let t = mean / (var / n as f64).sqrt();
    let dist = StudentsT::new(0.0, 1.0, (n - 1) as f64).expect("valid degrees of freedom");
    ((2.0 * dist.sf(t.abs())).min(1.0), false)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub label: String,
    pub episodes: usize,
    /// Mean gap per policy, in `Table::policies` order.
    pub means: Vec<Option<f64>>,
    pub best: Option<usize>,
    /// Bonferroni-adjusted p-value of best vs each other policy.
    pub p_values: Vec<Option<f64>>,
    /// The best policy beats every other policy significantly.
    pub significant: bool,
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub policies: Vec<String>,
    pub rows: Vec<TableRow>,
}

fn row(label: String, policies: &[String], records: &[&RunRecord]) -> TableRow {
    // episode seed -> policy -> gap, over episodes where every policy succeeded
    let mut by_episode: BTreeMap<u64, BTreeMap<&str, f64>> = BTreeMap::new();
    for r in records.iter().filter(|r| r.ok()) {
        by_episode.entry(r.episode_seed).or_default().insert(&r.policy, r.gap);
    }
    by_episode.retain(|_, m| policies.iter().all(|p| m.contains_key(p.as_str())));
    let series: Vec<Vec<f64>> = policies
        .iter()
        .map(|p| by_episode.values().map(|m| m[p.as_str()]).collect())
        .collect();
    let n = by_episode.len();
    let means: Vec<Option<f64>> = series
        .iter()
        .map(|s| (n > 0).then(|| s.iter().sum::<f64>() / n as f64))
        .collect();
    let best = means
        .iter()
        .enumerate()
        .filter_map(|(i, m)| m.map(|m| (i, m)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(i, _)| i);

    let mut p_values = vec![None; policies.len()];
    let mut significant = false;
    let mut degenerate = false;
    if let (Some(b), true) = (best, n >= 2 && policies.len() >= 2) {
        let factor = (policies.len() - 1) as f64;
        significant = true;
        for (i, s) in series.iter().enumerate() {
            if i == b {
                continue;
            }
            let (p, flat) = paired_t_test(&series[b], s);
            degenerate |= flat;
            let adjusted = (p * factor).min(1.0);
            p_values[i] = Some(adjusted);
            significant &= adjusted < ALPHA;
        }
    }
    TableRow {
        label,
        episodes: n,
        means,
        best,
        p_values,
        significant,
        degenerate,
    }
}

/// Class × policy mean-gap table with a final overall row. Policies are
/// ordered by first appearance in `records`; results do not depend on the
/// record order otherwise.
pub fn aggregate_table(records: &[RunRecord]) -> Table {
    let mut policies: Vec<String> = Vec::new();
    for r in records {
        if !policies.contains(&r.policy) {
            policies.push(r.policy.clone());
        }
    }
    let mut classes: BTreeMap<InstanceClassSpec, Vec<&RunRecord>> = BTreeMap::new();
    for r in records {
        classes.entry(r.class).or_default().push(r);
    }
    let mut rows: Vec<TableRow> = classes
        .iter()
        .map(|(class, recs)| row(class.label(), &policies, recs))
        .collect();
    let all: Vec<&RunRecord> = records.iter().collect();
    rows.push(row("overall".into(), &policies, &all));
    Table { policies, rows }
}

impl Table {
    pub fn mean(&self, label: &str, policy: &str) -> Option<f64> {
        let row = self.rows.iter().find(|r| r.label == label)?;
        let col = self.policies.iter().position(|p| p == policy)?;
        row.means[col]
    }

    /// Markdown table: best mean in bold, `*` when significant.
    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "| class | n | {} |", self.policies.join(" | "));
        let _ = writeln!(out, "|---|---|{}", "---|".repeat(self.policies.len()));
        for row in &self.rows {
            let cells: Vec<String> = row
                .means
                .iter()
                .enumerate()
                .map(|(i, m)| match m {
                    None => "-".into(),
                    Some(v) if Some(i) == row.best => {
                        format!("**{v:.2}**{}", if row.significant { "*" } else { "" })
                    }
                    Some(v) => format!("{v:.2}"),
                })
                .collect();
            let _ = writeln!(out, "| {} | {} | {} |", row.label, row.episodes, cells.join(" | "));
        }
        let _ = writeln!(
            out,
            "\nMean gap (%) to the hindsight solution. Bold: lowest mean. `*`: lower than every other \
             policy in paired two-sided t-tests, Bonferroni-adjusted, at level {ALPHA}."
        );
        out
    }

    /// Adjusted p-values as CSV: `class,best,policy,p_value`.
    pub fn p_values_csv(&self) -> String {
        let mut out = String::from("# ddwp-pvalues v1\nclass,best,policy,p_value\n");
        for row in &self.rows {
            let Some(best) = row.best else { continue };
            for (i, p) in row.p_values.iter().enumerate() {
                if let Some(p) = p {
                    let _ = writeln!(out, "{},{},{},{p:.6}", row.label, self.policies[best], self.policies[i]);
                }
            }
        }
        out
    }
}

/// Records as CSV, one line per record.
pub fn records_csv(records: &[RunRecord]) -> String {
    let mut out = String::from(
        "# ddwp-records v1\nclass,source,replication,episode_seed,policy,cost,hindsight,gap,requests,secondaries,total_ms,violations,failure\n",
    );
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{:.6},{},{},{},{},{}",
            r.class.label(),
            r.source,
            r.replication,
            r.episode_seed,
            r.policy,
            r.cost,
            r.hindsight,
            r.gap,
            r.requests,
            r.secondaries,
            r.epoch_ms.iter().sum::<u64>(),
            r.invariants.violations(),
            r.failure.as_deref().unwrap_or("").replace(',', ";"),
        );
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepDimension {
    /// Scenario solve budget, as a multiple of the base budget.
    ScenarioBudget,
    /// Number of ICD iterations.
    Iterations,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub value: f64,
    pub policy: String,
    pub mean_gap: f64,
    pub episodes: usize,
}

fn adjust(policy: &Policy, dimension: SweepDimension, value: f64) -> Option<Policy> {
    match (policy, dimension) {
        (Policy::Greedy, _) => None,
        (Policy::Rollout { .. }, SweepDimension::Iterations) => None,
        (Policy::Rollout { budget }, SweepDimension::ScenarioBudget) => Some(Policy::Rollout {
            budget: SolveBudget::new(budget.params.clone(), budget.stop.scaled(value)),
        }),
        (Policy::Icd(c), SweepDimension::ScenarioBudget) => {
            let mut c = c.clone();
            c.scenario_budget.stop = c.scenario_budget.stop.scaled(value);
            Some(Policy::Icd(c))
        }
        (Policy::Icd(c), SweepDimension::Iterations) => {
            let mut c = c.clone();
            c.iterations = value.round().max(1.0) as usize;
            Some(Policy::Icd(c))
        }
    }
}

/// Mean gap per sweep value and policy. Episodes and hindsight bounds are
/// shared across values. Policies unaffected by the dimension are skipped.
pub fn sweep(
    episodes: &[EpisodeSpec],
    store: &TopologyStore,
    base: &BenchConfig,
    dimension: SweepDimension,
    values: &[f64],
) -> Result<Vec<SweepPoint>> {
    if values.is_empty() {
        return Err(Error::Config("sweep needs at least one value".into()));
    }
    let prepared: Vec<PreparedEpisode> = episodes
        .par_iter()
        .map(|spec| prepare_episode(store, spec, &base.routing, &base.hindsight, base.limited_fleet))
        .collect::<Result<_>>()?;
    let mut points = Vec::new();
    for &value in values {
        for policy in base.policies.iter().filter_map(|p| adjust(p, dimension, value)) {
            let gaps: Vec<f64> = prepared
                .par_iter()
                .map(|p| {
                    let run = run_episode(Arc::clone(&p.config), &p.episode, &policy)?;
                    if run.invariants.violations() > 0 {
                        return Err(Error::InvalidAction(format!(
                            "{} violated episode invariants on {}",
                            policy.name(),
                            p.spec.seed
                        )));
                    }
                    Ok(gap_percent(run.total_cost, p.hindsight))
                })
                .collect::<Result<_>>()?;
            points.push(SweepPoint {
                value,
                policy: policy.name().to_string(),
                mean_gap: gaps.iter().sum::<f64>() / gaps.len() as f64,
                episodes: gaps.len(),
            });
        }
    }
    Ok(points)
}

pub fn sweep_csv(dimension: SweepDimension, points: &[SweepPoint]) -> String {
    let dim = match dimension {
        SweepDimension::ScenarioBudget => "scenario_budget",
        SweepDimension::Iterations => "iterations",
    };
    let mut out = String::from("# ddwp-sweep v1\ndimension,value,policy,mean_gap,episodes\n");
    for p in points {
        let _ = writeln!(out, "{dim},{},{},{:.6},{}", p.value, p.policy, p.mean_gap, p.episodes);
    }
    out
}

/// One policy on one episode under both fleet modes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FleetPoint {
    pub episode_seed: u64,
    pub policy: String,
    pub hindsight: Cost,
    pub unlimited_gap: f64,
    pub limited_gap: f64,
    pub secondaries: usize,
    pub invariants: InvariantReport,
}

/// Runs each policy with an unlimited fleet and with greedy-planned
/// primaries on the same realizations. Gaps are relative to the
/// unlimited-fleet hindsight bound. Greedy is always included.
pub fn fleet_comparison(episodes: &[EpisodeSpec], store: &TopologyStore, bench: &BenchConfig) -> Result<Vec<FleetPoint>> {
    let mut policies = vec![Policy::Greedy];
    policies.extend(bench.policies.iter().filter(|p| **p != Policy::Greedy).cloned());
    let rows: Vec<Vec<FleetPoint>> = episodes
        .par_iter()
        .map(|spec| {
            let prepared = prepare_episode(store, spec, &bench.routing, &bench.hindsight, true)?;
            let unlimited = Arc::new(prepared.config.as_ref().clone().with_fleet(FleetMode::Unlimited));
            policies
                .iter()
                .map(|policy| {
                    let free = run_episode(Arc::clone(&unlimited), &prepared.episode, policy)?;
                    let limited = run_episode(Arc::clone(&prepared.config), &prepared.episode, policy)?;
                    let mut invariants = free.invariants.clone();
                    invariants.merge(&limited.invariants);
                    Ok(FleetPoint {
                        episode_seed: spec.seed,
                        policy: policy.name().to_string(),
                        hindsight: prepared.hindsight,
                        unlimited_gap: gap_percent(free.total_cost, prepared.hindsight),
                        limited_gap: gap_percent(limited.total_cost, prepared.hindsight),
                        secondaries: limited.secondaries_used(),
                        invariants,
                    })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().flatten().collect())
}

pub fn fleet_csv(points: &[FleetPoint]) -> String {
    let mut out = String::from("# ddwp-fleet v1\nepisode_seed,policy,hindsight,unlimited_gap,limited_gap,secondaries\n");
    for p in points {
        let _ = writeln!(
            out,
            "{},{},{},{:.6},{:.6},{}",
            p.episode_seed, p.policy, p.hindsight, p.unlimited_gap, p.limited_gap, p.secondaries
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_series_are_not_significant() {
        let a = [1.0, 2.0, 3.0];
        assert_eq!(paired_t_test(&a, &a), (1.0, true));
        assert_eq!(paired_t_test(&[1.0], &[2.0]), (1.0, true));
    }
}
