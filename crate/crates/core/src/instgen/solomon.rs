use std::fmt::Write as _;

use rand::Rng as _;
use rand_distr::{Distribution, Normal};

use crate::rng::Rng;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolomonNode {
    pub x: f64,
    pub y: f64,
    pub demand: i64,
    pub ready: i64,
    pub due: i64,
    pub service: i64,
}

/// Contents of a Solomon-format file. `nodes[0]` is the depot.
#[derive(Debug, Clone, PartialEq)]
pub struct SolomonData {
    pub name: String,
    pub vehicles: usize,
    pub capacity: i64,
    pub nodes: Vec<SolomonNode>,
}

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

pub fn parse_solomon(text: &str) -> Result<SolomonData> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
    let (_, name) = lines.next().ok_or_else(|| err(1, "empty file"))?;
    let name = name.to_string();

    let mut vehicles = None;
    let mut nodes = Vec::new();
    let mut section = "";
    for (no, line) in lines {
        let upper = line.to_ascii_uppercase();
        if upper.starts_with("VEHICLE") {
            section = "vehicle";
            continue;
        }
        if upper.starts_with("CUSTOMER") {
            section = "customer";
            continue;
        }
        if upper.starts_with("NUMBER") || upper.starts_with("CUST") {
            continue;
        }
        let nums: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|_| err(no, format!("expected a number, got `{t}`"))))
            .collect::<Result<_>>()?;
        match section {
            "vehicle" => {
                if nums.len() != 2 {
                    return Err(err(no, "vehicle line needs NUMBER and CAPACITY"));
                }
                vehicles = Some((nums[0] as usize, nums[1] as i64));
            }
            "customer" => {
                if nums.len() != 7 {
                    return Err(err(no, "customer line needs 7 columns"));
                }
                if nums[0] as usize != nodes.len() {
                    return Err(err(no, "customers must be numbered consecutively from 0"));
                }
                nodes.push(SolomonNode {
                    x: nums[1],
                    y: nums[2],
                    demand: nums[3] as i64,
                    ready: nums[4] as i64,
                    due: nums[5] as i64,
                    service: nums[6] as i64,
                });
            }
            _ => return Err(err(no, "data outside a VEHICLE or CUSTOMER section")),
        }
    }
    let (vehicles, capacity) = vehicles.ok_or_else(|| err(0, "missing VEHICLE section"))?;
    if nodes.len() < 2 {
        return Err(err(0, "need a depot and at least one customer"));
    }
    Ok(SolomonData {
        name,
        vehicles,
        capacity,
        nodes,
    })
}

pub fn write_solomon(data: &SolomonData) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}\n\nVEHICLE\nNUMBER     CAPACITY\n{:>6}{:>13}\n", data.name, data.vehicles, data.capacity);
    let _ = writeln!(out, "CUSTOMER\nCUST NO.  XCOORD.   YCOORD.    DEMAND   READY TIME  DUE DATE   SERVICE TIME\n");
    for (i, n) in data.nodes.iter().enumerate() {
        let _ = writeln!(
            out,
            "{:>6}{:>10}{:>11}{:>11}{:>11}{:>11}{:>11}",
            i, n.x, n.y, n.demand, n.ready, n.due, n.service
        );
    }
    out
}

/// Location dispersion of a synthetic topology.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dispersion {
    Random,
    Clustered,
    Mixed,
}

const GRID: f64 = 500.0;

/// A synthetic topology in the style of the 1 000-customer extended
/// Solomon instances: a `GRID x GRID` square with the depot in the centre.
pub fn synthetic_solomon(
    name: &str,
    dispersion: Dispersion,
    customers: usize,
    capacity: i64,
    rng: &mut Rng,
) -> SolomonData {
    let service = if dispersion == Dispersion::Clustered { 90 } else { 10 };
    let horizon = if capacity > 200 { 8000 } else { 1400 };
    let num_clusters = 10 + customers / 100;
    let centres: Vec<(f64, f64)> = (0..num_clusters)
        .map(|_| (rng.gen_range(40.0..GRID - 40.0), rng.gen_range(40.0..GRID - 40.0)))
        .collect();
    let scatter = Normal::new(0.0, 12.0).expect("valid normal");

    let mut nodes = vec![SolomonNode {
        x: GRID / 2.0,
        y: GRID / 2.0,
        demand: 0,
        ready: 0,
        due: horizon,
        service: 0,
    }];
    for i in 0..customers {
        let clustered = match dispersion {
            Dispersion::Random => false,
            Dispersion::Clustered => true,
            Dispersion::Mixed => i % 2 == 0,
        };
        let (x, y) = if clustered {
            let (cx, cy) = centres[rng.gen_range(0..centres.len())];
            let x: f64 = cx + scatter.sample(rng);
            let y: f64 = cy + scatter.sample(rng);
            (x.clamp(0.0, GRID).round(), y.clamp(0.0, GRID).round())
        } else {
            (rng.gen_range(0..=GRID as i64) as f64, rng.gen_range(0..=GRID as i64) as f64)
        };
        let demand = if dispersion == Dispersion::Clustered {
            10 * rng.gen_range(1..=5)
        } else {
            rng.gen_range(1..=50)
        };
        let ready = rng.gen_range(0..horizon / 2);
        nodes.push(SolomonNode {
            x,
            y,
            demand,
            ready,
            due: ready + rng.gen_range(30..=horizon / 2),
            service,
        });
    }
    SolomonData {
        name: name.to_string(),
        vehicles: 250,
        capacity,
        nodes,
    }
}
