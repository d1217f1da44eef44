//! Benchmark instance generation: topologies, arrival processes, time
//! window variants and the class matrix.
//!
//! A topology is a pool of customer locations (with demands and service
//! times) plus a depot and a normalized travel-time matrix. Dynamic
//! requests sample location, demand and service time independently from
//! the pool.

mod solomon;

use std::collections::HashMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::model::{FleetSpec, Matrix, Request, RequestId, StaticInstance, Time};
use crate::rng::{child_rng, derive_seed, stream, Rng};
use crate::{Error, Result};

pub use solomon::{parse_solomon, synthetic_solomon, write_solomon, Dispersion, SolomonData, SolomonNode};

pub const NUM_EPOCHS: usize = 8;
pub const EPOCH_DURATION: Time = 3600;
pub const HORIZON: Time = NUM_EPOCHS as Time * EPOCH_DURATION;
pub const POOL_SIZE: usize = 1000;

/// Start time of epoch `t` (1-based).
pub fn epoch_start(t: usize) -> Time {
    (t as Time - 1) * EPOCH_DURATION
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TopologyTag {
    R,
    C,
    RC,
}

impl TopologyTag {
    pub const ALL: [TopologyTag; 3] = [TopologyTag::R, TopologyTag::C, TopologyTag::RC];

    pub fn sources(self) -> [SourceInstance; 2] {
        use SourceInstance::*;
        match self {
            TopologyTag::R => [R1_10_1, R2_10_1],
            TopologyTag::C => [C1_10_1, C2_10_1],
            TopologyTag::RC => [RC1_10_1, RC2_10_1],
        }
    }
}

/// The six 1 000-customer source instances.
#[allow(non_camel_case_types)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SourceInstance {
    R1_10_1,
    R2_10_1,
    C1_10_1,
    C2_10_1,
    RC1_10_1,
    RC2_10_1,
}

impl SourceInstance {
    pub const ALL: [SourceInstance; 6] = [
        SourceInstance::R1_10_1,
        SourceInstance::R2_10_1,
        SourceInstance::C1_10_1,
        SourceInstance::C2_10_1,
        SourceInstance::RC1_10_1,
        SourceInstance::RC2_10_1,
    ];

    pub fn name(self) -> &'static str {
        use SourceInstance::*;
        match self {
            R1_10_1 => "R1_10_1",
            R2_10_1 => "R2_10_1",
            C1_10_1 => "C1_10_1",
            C2_10_1 => "C2_10_1",
            RC1_10_1 => "RC1_10_1",
            RC2_10_1 => "RC2_10_1",
        }
    }

    pub fn dispersion(self) -> Dispersion {
        use SourceInstance::*;
        match self {
            R1_10_1 | R2_10_1 => Dispersion::Random,
            C1_10_1 | C2_10_1 => Dispersion::Clustered,
            RC1_10_1 | RC2_10_1 => Dispersion::Mixed,
        }
    }

    /// Vehicle capacity of the source instance.
    pub fn capacity(self) -> i64 {
        use SourceInstance::*;
        match self {
            R1_10_1 | C1_10_1 | RC1_10_1 => 200,
            C2_10_1 => 700,
            R2_10_1 | RC2_10_1 => 1000,
        }
    }
}

impl fmt::Display for SourceInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SourceInstance {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        SourceInstance::ALL
            .into_iter()
            .find(|x| x.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown source instance `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ArrivalProcess {
    Homogeneous,
    Unimodal,
}

impl ArrivalProcess {
    /// Expected arrivals per epoch at 600 expected requests in total.
    pub fn base_expected(self) -> [u32; NUM_EPOCHS] {
        match self {
            ArrivalProcess::Homogeneous => [75; NUM_EPOCHS],
            ArrivalProcess::Unimodal => [20, 50, 80, 150, 150, 80, 50, 20],
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            ArrivalProcess::Homogeneous => "HOM",
            ArrivalProcess::Unimodal => "UNI",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum WindowKind {
    Deadline,
    Regular,
}

/// Time window variant, e.g. `DL2` or `TW8`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WindowVariant {
    pub kind: WindowKind,
    pub max_hours: u32,
}

impl WindowVariant {
    pub const ALL: [WindowVariant; 6] = [
        WindowVariant::new(WindowKind::Deadline, 2),
        WindowVariant::new(WindowKind::Deadline, 4),
        WindowVariant::new(WindowKind::Deadline, 8),
        WindowVariant::new(WindowKind::Regular, 2),
        WindowVariant::new(WindowKind::Regular, 4),
        WindowVariant::new(WindowKind::Regular, 8),
    ];

    pub const fn new(kind: WindowKind, max_hours: u32) -> Self {
        WindowVariant { kind, max_hours }
    }
}

impl fmt::Display for WindowVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.kind {
            WindowKind::Deadline => "DL",
            WindowKind::Regular => "TW",
        };
        write!(f, "{tag}{}", self.max_hours)
    }
}

impl FromStr for WindowVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let upper = s.to_ascii_uppercase();
        let (kind, rest) = if let Some(r) = upper.strip_prefix("DL") {
            (WindowKind::Deadline, r)
        } else if let Some(r) = upper.strip_prefix("TW") {
            (WindowKind::Regular, r)
        } else {
            return Err(Error::Config(format!("unknown window variant `{s}`")));
        };
        let max_hours: u32 = rest
            .parse()
            .map_err(|_| Error::Config(format!("unknown window variant `{s}`")))?;
        if max_hours == 0 || max_hours as usize > NUM_EPOCHS {
            return Err(Error::Config(format!("window width must be 1..=8 hours, got {max_hours}")));
        }
        Ok(WindowVariant { kind, max_hours })
    }
}

/// One benchmark instance class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct InstanceClassSpec {
    pub topology: TopologyTag,
    pub arrivals: ArrivalProcess,
    pub window: WindowVariant,
    /// Expected total requests per episode; 600 is the reference profile.
    pub expected_total: u32,
}

impl InstanceClassSpec {
    /// `E[N_t]` per epoch: the reference profile scaled by
    /// `expected_total / 600` and floored.
    pub fn expected_counts(&self) -> [u32; NUM_EPOCHS] {
        self.arrivals
            .base_expected()
            .map(|e| (e as u64 * self.expected_total as u64 / 600) as u32)
    }

    pub fn label(&self) -> String {
        let topo = match self.topology {
            TopologyTag::R => "R",
            TopologyTag::C => "C",
            TopologyTag::RC => "RC",
        };
        format!("{topo}/{}/{}", self.arrivals.tag(), self.window)
    }
}

/// Parses labels such as `RC/UNI/TW4` (see [`InstanceClassSpec::label`]).
pub fn parse_class(label: &str, expected_total: u32) -> Result<InstanceClassSpec> {
    let bad = || Error::Config(format!("class label `{label}` is not TOPOLOGY/ARRIVALS/WINDOW"));
    let parts: Vec<&str> = label.split('/').collect();
    let [topo, arrivals, window] = parts.as_slice() else {
        return Err(bad());
    };
    let topology = match topo.to_ascii_uppercase().as_str() {
        "R" => TopologyTag::R,
        "C" => TopologyTag::C,
        "RC" => TopologyTag::RC,
        _ => return Err(bad()),
    };
    let arrivals = match arrivals.to_ascii_uppercase().as_str() {
        "HOM" => ArrivalProcess::Homogeneous,
        "UNI" => ArrivalProcess::Unimodal,
        _ => return Err(bad()),
    };
    Ok(InstanceClassSpec {
        topology,
        arrivals,
        window: window.parse()?,
        expected_total,
    })
}

/// Support `[⌊0.9E⌋, ⌊1.1E⌋]` of the per-epoch arrival count.
pub fn count_support(expected: u32) -> (usize, usize) {
    ((expected as usize * 9) / 10, (expected as usize * 11) / 10)
}

pub fn sample_count(expected: u32, rng: &mut Rng) -> usize {
    let (lo, hi) = count_support(expected);
    rng.gen_range(lo..=hi)
}

/// How travel distances are scaled into time units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Normalization {
    /// The largest pairwise travel time equals one epoch.
    MaxPairwise,
    /// The largest depot round trip equals one epoch.
    DepotRoundTrip,
}

/// Builds a topology pool from Solomon data: Euclidean distances scaled so
/// the normalization target equals `epoch` time units, then rounded.
/// Service times are scaled by the same factor.
pub fn topology_from_solomon(
    data: &SolomonData,
    normalization: Normalization,
    horizon: Time,
    epoch: Time,
) -> Result<StaticInstance> {
    let nodes = &data.nodes;
    let dim = nodes.len();
    let euclid = |i: usize, j: usize| (nodes[i].x - nodes[j].x).hypot(nodes[i].y - nodes[j].y);
    let reference = match normalization {
        Normalization::MaxPairwise => {
            let mut m: f64 = 0.0;
            for i in 0..dim {
                for j in (i + 1)..dim {
                    m = m.max(euclid(i, j));
                }
            }
            m
        }
        Normalization::DepotRoundTrip => (1..dim).map(|i| 2.0 * euclid(0, i)).fold(0.0, f64::max),
    };
    if reference <= 0.0 {
        return Err(Error::InvalidInstance("all locations coincide".into()));
    }
    let scale = epoch as f64 / reference;
    let matrix = Arc::new(Matrix::from_fn(dim, |i, j| (euclid(i, j) * scale).round() as i64));

    let requests = (1..dim)
        .map(|i| {
            let service = (nodes[i].service as f64 * scale).round() as Time;
            Request::new(RequestId(i as u32), i, nodes[i].demand, service, 0, horizon, 0, horizon)
        })
        .collect();
    let coords = nodes.iter().map(|n| (n.x * scale, n.y * scale)).collect();
    Ok(StaticInstance::new(
        data.name.clone(),
        0,
        requests,
        Arc::clone(&matrix),
        matrix,
        horizon,
        0,
        FleetSpec::unlimited(data.capacity),
    )?
    .with_coords(Arc::new(coords)))
}

/// Loads a Solomon-format topology file.
pub fn load_topology(path: &Path, normalization: Normalization) -> Result<StaticInstance> {
    let text = std::fs::read_to_string(path)?;
    topology_from_solomon(&parse_solomon(&text)?, normalization, HORIZON, EPOCH_DURATION)
}

/// Synthetic stand-in for a source instance, generated in Solomon format and
/// read back through the same parser.
pub fn synthetic_topology(source: SourceInstance, seed: u64, normalization: Normalization) -> Result<StaticInstance> {
    let mut rng = child_rng(seed, &[stream::TOPOLOGY, source as u64]);
    let data = synthetic_solomon(source.name(), source.dispersion(), POOL_SIZE, source.capacity(), &mut rng);
    let parsed = parse_solomon(&write_solomon(&data))?;
    topology_from_solomon(&parsed, normalization, HORIZON, EPOCH_DURATION)
}

/// Lazily loads topologies from a directory of `<NAME>.txt` files, falling
/// back to synthetic topologies for missing files.
pub struct TopologyStore {
    dir: Option<PathBuf>,
    seed: u64,
    normalization: Normalization,
    cache: Mutex<HashMap<SourceInstance, Arc<StaticInstance>>>,
}

impl TopologyStore {
    pub fn new(dir: Option<PathBuf>, seed: u64, normalization: Normalization) -> Self {
        TopologyStore {
            dir,
            seed,
            normalization,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn synthetic(seed: u64) -> Self {
        Self::new(None, seed, Normalization::MaxPairwise)
    }

    pub fn get(&self, source: SourceInstance) -> Result<Arc<StaticInstance>> {
        if let Some(t) = self.cache.lock().expect("topology cache poisoned").get(&source) {
            return Ok(Arc::clone(t));
        }
        let file = self.dir.as_ref().map(|d| d.join(format!("{}.txt", source.name())));
        let topo = match file {
            Some(f) if f.exists() => load_topology(&f, self.normalization)?,
            _ => synthetic_topology(source, self.seed, self.normalization)?,
        };
        let topo = Arc::new(topo);
        self.cache
            .lock()
            .expect("topology cache poisoned")
            .insert(source, Arc::clone(&topo));
        Ok(topo)
    }
}

const WINDOW_ATTEMPTS: usize = 100;

/// Samples one request released at `release`. Location, demand and service
/// time are independent uniform picks from the pool. Requests that cannot
/// be served when dispatched at their release are redrawn, so every
/// request is feasible on its own.
pub fn sample_request(
    topology: &StaticInstance,
    window: WindowVariant,
    release: Time,
    id: RequestId,
    rng: &mut Rng,
) -> Request {
    let horizon = topology.horizon();
    let pool = topology.requests();
    let depot = topology.depot();
    loop {
        let location = pool[rng.gen_range(0..pool.len())].location;
        let demand = pool[rng.gen_range(0..pool.len())].demand;
        let service = pool[rng.gen_range(0..pool.len())].service;
        let width = rng.gen_range(1..=window.max_hours) as Time * EPOCH_DURATION;
        let out = topology.duration(depot, location);
        let back = topology.duration(location, depot);
        let serves = |e: Time, l: Time| {
            e < l && release + out <= l && (release + out).max(e) + service + back <= horizon
        };

        let found = match window.kind {
            WindowKind::Deadline => {
                let (e, l) = (release, (release + width).min(horizon));
                serves(e, l).then_some((e, l))
            }
            WindowKind::Regular => (0..WINDOW_ATTEMPTS).find_map(|_| {
                let e = rng.gen_range(release..=horizon);
                let l = (e + width).min(horizon);
                serves(e, l).then_some((e, l))
            }),
        };
        if let Some((e, l)) = found {
            return Request::new(id, location, demand, service, e, l, release, horizon);
        }
    }
}

/// Samples the arrivals of epoch `t` (1-based) with ids starting at
/// `first_id`.
pub fn sample_epoch_requests(
    topology: &StaticInstance,
    spec: &InstanceClassSpec,
    t: usize,
    first_id: u32,
    rng: &mut Rng,
) -> Vec<Request> {
    assert!((1..=NUM_EPOCHS).contains(&t), "epoch {t} outside 1..=8");
    let count = sample_count(spec.expected_counts()[t - 1], rng);
    let release = epoch_start(t);
    (0..count)
        .map(|k| sample_request(topology, spec.window, release, RequestId(first_id + k as u32), rng))
        .collect()
}

/// All 36 classes: three topologies, two arrival processes, six window
/// variants.
pub fn full_factorial(expected_total: u32) -> Vec<InstanceClassSpec> {
    let mut out = Vec::with_capacity(36);
    for topology in TopologyTag::ALL {
        for arrivals in [ArrivalProcess::Homogeneous, ArrivalProcess::Unimodal] {
            for window in WindowVariant::ALL {
                out.push(InstanceClassSpec {
                    topology,
                    arrivals,
                    window,
                    expected_total,
                });
            }
        }
    }
    out
}

/// One dynamic instance: a class, its source topology and an episode seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpisodeSpec {
    pub class: InstanceClassSpec,
    pub source: SourceInstance,
    pub replication: u32,
    pub seed: u64,
}

/// `replications` episodes per class, alternating between the class's two
/// source instances. Seeds depend only on `base_seed`, the class and the
/// replication index.
pub fn build_class_matrix(classes: &[InstanceClassSpec], replications: u32, base_seed: u64) -> Vec<EpisodeSpec> {
    let mut out = Vec::with_capacity(classes.len() * replications as usize);
    for class in classes {
        let key = class_key(class);
        for rep in 0..replications {
            out.push(EpisodeSpec {
                class: *class,
                source: class.topology.sources()[rep as usize % 2],
                replication: rep,
                seed: derive_seed(base_seed, &[stream::EPISODE, key, rep as u64]),
            });
        }
    }
    out
}

fn class_key(class: &InstanceClassSpec) -> u64 {
    let topo = class.topology as u64;
    let arr = class.arrivals as u64;
    let kind = class.window.kind as u64;
    ((((topo * 2 + arr) * 2 + kind) * 16 + class.window.max_hours as u64) << 32) | class.expected_total as u64
}
