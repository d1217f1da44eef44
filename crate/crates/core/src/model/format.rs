//! Plain-text instance and route files.
//!
//! Instances use a VRPLIB-style layout: `KEY : value` header lines followed
//! by numbered sections. See `docs/instance-format.md` for the grammar.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use super::{FleetSpec, Matrix, Request, RequestId, Solution, StaticInstance, Time, VehicleType};
use crate::{Error, Result};

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_num<T: std::str::FromStr>(tok: &str, line: usize) -> Result<T> {
    tok.parse()
        .map_err(|_| parse_err(line, format!("expected a number, got `{tok}`")))
}

#[derive(Default)]
struct Raw {
    name: String,
    dimension: Option<usize>,
    horizon: Option<Time>,
    earliest_departure: Time,
    capacity: Option<i64>,
    edge_weight_type: Option<String>,
    weights: Vec<i64>,
    costs: Vec<i64>,
    coords: HashMap<usize, (f64, f64)>,
    demand: HashMap<usize, i64>,
    windows: HashMap<usize, (Time, Time)>,
    service: HashMap<usize, Time>,
    release: HashMap<usize, Time>,
    dispatch: HashMap<usize, (Time, Time)>,
    ids: HashMap<usize, u32>,
    vehicles: Vec<VehicleType>,
    depots: Vec<usize>,
}

const SECTIONS: &[&str] = &[
    "EDGE_WEIGHT_SECTION",
    "COST_WEIGHT_SECTION",
    "NODE_COORD_SECTION",
    "DEMAND_SECTION",
    "TIME_WINDOW_SECTION",
    "SERVICE_TIME_SECTION",
    "RELEASE_TIME_SECTION",
    "DISPATCH_WINDOW_SECTION",
    "REQUEST_ID_SECTION",
    "VEHICLE_TYPE_SECTION",
    "DEPOT_SECTION",
];

/// Parses an instance file.
pub fn read_instance(text: &str) -> Result<StaticInstance> {
    let mut raw = Raw::default();
    let mut section: Option<&str> = None;

    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line == "EOF" {
            break;
        }
        if let Some(&name) = SECTIONS.iter().find(|&&s| line == s) {
            section = Some(name);
            continue;
        }
        if let Some((key, value)) = line.split_once(':') {
            if key.trim().chars().all(|c| c.is_ascii_uppercase() || c == '_') && !key.trim().is_empty() {
                section = None;
                let value = value.trim();
                match key.trim() {
                    "NAME" => raw.name = value.to_string(),
                    "DIMENSION" => raw.dimension = Some(parse_num(value, lineno)?),
                    "HORIZON" => raw.horizon = Some(parse_num(value, lineno)?),
                    "EARLIEST_DEPARTURE" => raw.earliest_departure = parse_num(value, lineno)?,
                    "CAPACITY" => raw.capacity = Some(parse_num(value, lineno)?),
                    "EDGE_WEIGHT_TYPE" => raw.edge_weight_type = Some(value.to_string()),
                    _ => {}
                }
                continue;
            }
        }

        let toks: Vec<&str> = line.split_whitespace().collect();
        let node = |k: usize| -> Result<usize> {
            let n: usize = parse_num(toks[k], lineno)?;
            if n == 0 {
                return Err(parse_err(lineno, "node numbers start at 1"));
            }
            Ok(n - 1)
        };
        let need = |n: usize| -> Result<()> {
            if toks.len() < n {
                Err(parse_err(lineno, format!("expected {n} fields")))
            } else {
                Ok(())
            }
        };
        match section {
            Some("EDGE_WEIGHT_SECTION") => {
                for t in &toks {
                    raw.weights.push(parse_num(t, lineno)?);
                }
            }
            Some("COST_WEIGHT_SECTION") => {
                for t in &toks {
                    raw.costs.push(parse_num(t, lineno)?);
                }
            }
            Some("NODE_COORD_SECTION") => {
                need(3)?;
                raw.coords
                    .insert(node(0)?, (parse_num(toks[1], lineno)?, parse_num(toks[2], lineno)?));
            }
            Some("DEMAND_SECTION") => {
                need(2)?;
                raw.demand.insert(node(0)?, parse_num(toks[1], lineno)?);
            }
            Some("TIME_WINDOW_SECTION") => {
                need(3)?;
                raw.windows
                    .insert(node(0)?, (parse_num(toks[1], lineno)?, parse_num(toks[2], lineno)?));
            }
            Some("SERVICE_TIME_SECTION") => {
                need(2)?;
                raw.service.insert(node(0)?, parse_num(toks[1], lineno)?);
            }
            Some("RELEASE_TIME_SECTION") => {
                need(2)?;
                raw.release.insert(node(0)?, parse_num(toks[1], lineno)?);
            }
            Some("DISPATCH_WINDOW_SECTION") => {
                need(3)?;
                raw.dispatch
                    .insert(node(0)?, (parse_num(toks[1], lineno)?, parse_num(toks[2], lineno)?));
            }
            Some("REQUEST_ID_SECTION") => {
                need(2)?;
                raw.ids.insert(node(0)?, parse_num(toks[1], lineno)?);
            }
            Some("VEHICLE_TYPE_SECTION") => {
                need(4)?;
                let count = if toks[0].eq_ignore_ascii_case("INF") {
                    None
                } else {
                    Some(parse_num(toks[0], lineno)?)
                };
                raw.vehicles.push(VehicleType {
                    count,
                    capacity: parse_num(toks[1], lineno)?,
                    fixed_cost: parse_num(toks[2], lineno)?,
                    available_from: parse_num(toks[3], lineno)?,
                });
            }
            Some("DEPOT_SECTION") => {
                let v: i64 = parse_num(toks[0], lineno)?;
                if v > 0 {
                    raw.depots.push(v as usize - 1);
                }
            }
            _ => return Err(parse_err(lineno, format!("unexpected line `{line}`"))),
        }
    }

    build(raw)
}

fn build(raw: Raw) -> Result<StaticInstance> {
    let dim = raw
        .dimension
        .ok_or_else(|| parse_err(0, "missing DIMENSION"))?;
    let depot = raw.depots.first().copied().unwrap_or(0);
    if depot >= dim {
        return Err(parse_err(0, "depot outside DIMENSION"));
    }

    let explicit = raw.edge_weight_type.as_deref().unwrap_or("EXPLICIT") == "EXPLICIT";
    let durations = if explicit && !raw.weights.is_empty() {
        Matrix::new(dim, raw.weights)?
    } else {
        if raw.coords.len() != dim {
            return Err(parse_err(0, "need EDGE_WEIGHT_SECTION or coordinates for every node"));
        }
        let c = &raw.coords;
        Matrix::from_fn(dim, |i, j| {
            let (a, b) = (c[&i], c[&j]);
            ((a.0 - b.0).hypot(a.1 - b.1)).round() as i64
        })
    };
    let durations = Arc::new(durations);
    let costs = if raw.costs.is_empty() {
        Arc::clone(&durations)
    } else {
        Arc::new(Matrix::new(dim, raw.costs)?)
    };

    let horizon = match raw.horizon {
        Some(h) => h,
        None => raw
            .windows
            .get(&depot)
            .map(|w| w.1)
            .ok_or_else(|| parse_err(0, "missing HORIZON and depot time window"))?,
    };

    let fleet = if raw.vehicles.is_empty() {
        FleetSpec::unlimited(raw.capacity.ok_or_else(|| parse_err(0, "missing CAPACITY"))?)
    } else {
        FleetSpec {
            classes: raw.vehicles,
        }
    };

    let mut requests = Vec::with_capacity(dim.saturating_sub(1));
    for node in (0..dim).filter(|&n| n != depot) {
        let (early, late) = raw.windows.get(&node).copied().unwrap_or((0, horizon));
        let release = raw.release.get(&node).copied().unwrap_or(0);
        let id = raw.ids.get(&node).copied().unwrap_or(node as u32);
        let mut req = Request::new(
            RequestId(id),
            node,
            raw.demand.get(&node).copied().unwrap_or(0),
            raw.service.get(&node).copied().unwrap_or(0),
            early,
            late,
            release,
            horizon,
        );
        if let Some(&(lo, hi)) = raw.dispatch.get(&node) {
            req = req.with_dispatch_window(lo, hi);
        }
        requests.push(req);
    }

    let name = if raw.name.is_empty() { "unnamed".to_string() } else { raw.name };
    let mut inst = StaticInstance::new(
        name,
        depot,
        requests,
        durations,
        costs,
        horizon,
        raw.earliest_departure,
        fleet,
    )?;
    if raw.coords.len() == dim {
        let coords = (0..dim).map(|i| raw.coords[&i]).collect();
        inst = inst.with_coords(Arc::new(coords));
    }
    Ok(inst)
}

/// Writes `instance` with an explicit node-level travel matrix. Node 1 is
/// the depot; node `k + 2` is the `k`-th request.
pub fn write_instance(instance: &StaticInstance) -> String {
    let mut out = String::new();
    let locs: Vec<usize> = std::iter::once(instance.depot())
        .chain(instance.requests().iter().map(|r| r.location))
        .collect();
    let dim = locs.len();

    let _ = writeln!(out, "NAME : {}", instance.name);
    let _ = writeln!(out, "TYPE : VRPTW-DW");
    let _ = writeln!(out, "DIMENSION : {dim}");
    let _ = writeln!(out, "HORIZON : {}", instance.horizon());
    let _ = writeln!(out, "EARLIEST_DEPARTURE : {}", instance.earliest_departure());
    let _ = writeln!(out, "EDGE_WEIGHT_TYPE : EXPLICIT");
    let _ = writeln!(out, "EDGE_WEIGHT_FORMAT : FULL_MATRIX");

    let write_matrix = |out: &mut String, get: &dyn Fn(usize, usize) -> i64| {
        for &i in &locs {
            let row: Vec<String> = locs.iter().map(|&j| get(i, j).to_string()).collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
    };
    let _ = writeln!(out, "EDGE_WEIGHT_SECTION");
    write_matrix(&mut out, &|i, j| instance.duration(i, j));
    if !Arc::ptr_eq(instance.durations(), instance.costs()) && instance.durations() != instance.costs() {
        let _ = writeln!(out, "COST_WEIGHT_SECTION");
        write_matrix(&mut out, &|i, j| instance.cost(i, j));
    }

    if let Some(coords) = instance.coords() {
        let _ = writeln!(out, "NODE_COORD_SECTION");
        for (node, &loc) in locs.iter().enumerate() {
            let (x, y) = coords[loc];
            let _ = writeln!(out, "{} {} {}", node + 1, x, y);
        }
    }

    let reqs = instance.requests();
    let section = |out: &mut String, title: &str, depot: String, f: &dyn Fn(&Request) -> String| {
        let _ = writeln!(out, "{title}");
        let _ = writeln!(out, "1 {depot}");
        for (k, r) in reqs.iter().enumerate() {
            let _ = writeln!(out, "{} {}", k + 2, f(r));
        }
    };
    let h = instance.horizon();
    section(&mut out, "DEMAND_SECTION", "0".into(), &|r| r.demand.to_string());
    section(&mut out, "TIME_WINDOW_SECTION", format!("0 {h}"), &|r| {
        format!("{} {}", r.tw_early, r.tw_late)
    });
    section(&mut out, "SERVICE_TIME_SECTION", "0".into(), &|r| r.service.to_string());
    section(&mut out, "RELEASE_TIME_SECTION", "0".into(), &|r| r.release.to_string());
    section(&mut out, "DISPATCH_WINDOW_SECTION", format!("0 {h}"), &|r| {
        format!("{} {}", r.dispatch_early, r.dispatch_late)
    });
    let _ = writeln!(out, "REQUEST_ID_SECTION");
    for (k, r) in reqs.iter().enumerate() {
        let _ = writeln!(out, "{} {}", k + 2, r.id);
    }
    let _ = writeln!(out, "VEHICLE_TYPE_SECTION");
    for v in &instance.fleet().classes {
        let count = v.count.map_or("INF".to_string(), |c| c.to_string());
        let _ = writeln!(out, "{count} {} {} {}", v.capacity, v.fixed_cost, v.available_from);
    }
    let _ = writeln!(out, "DEPOT_SECTION\n1\n-1\nEOF");
    out
}

/// One line per route: departure time followed by the visited request ids.
pub fn write_routes(solution: &Solution) -> String {
    let mut out = String::new();
    for route in &solution.routes {
        let _ = write!(out, "{}", route.departure);
        for id in &route.visits {
            let _ = write!(out, " {id}");
        }
        out.push('\n');
    }
    out
}

/// Parses a routes file into `(departure, visits)` pairs.
pub fn read_routes(text: &str) -> Result<Vec<(Time, Vec<RequestId>)>> {
    let mut routes = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut toks = line.split_whitespace();
        let departure = parse_num(toks.next().unwrap_or_default(), idx + 1)?;
        let visits = toks
            .map(|t| parse_num::<u32>(t, idx + 1).map(RequestId))
            .collect::<Result<Vec<_>>>()?;
        routes.push((departure, visits));
    }
    Ok(routes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Route;

    const SMALL: &str = "\
NAME : small
TYPE : VRPTW-DW
DIMENSION : 3
HORIZON : 480
CAPACITY : 10
EDGE_WEIGHT_TYPE : EXPLICIT
EDGE_WEIGHT_FORMAT : FULL_MATRIX
EDGE_WEIGHT_SECTION
0 30 40
30 0 50
40 50 0
DEMAND_SECTION
1 0
2 3
3 4
TIME_WINDOW_SECTION
1 0 480
2 10 20
3 0 480
SERVICE_TIME_SECTION
2 5
RELEASE_TIME_SECTION
3 60
DISPATCH_WINDOW_SECTION
3 60 60
DEPOT_SECTION
1
-1
EOF
";

    #[test]
    fn parses_small_instance() {
        let inst = read_instance(SMALL).unwrap();
        assert_eq!(inst.len(), 2);
        assert_eq!(inst.horizon(), 480);
        let r = inst.request(RequestId(1)).unwrap();
        assert_eq!((r.demand, r.service, r.tw_early, r.tw_late), (3, 5, 10, 20));
        assert_eq!((r.dispatch_early, r.dispatch_late), (0, 480));
        let r = inst.request(RequestId(2)).unwrap();
        assert_eq!((r.release, r.dispatch_early, r.dispatch_late), (60, 60, 60));
        assert_eq!(inst.duration(1, 2), 50);
        assert_eq!(inst.fleet().classes[0].capacity, 10);
    }

    #[test]
    fn write_then_read_preserves_instance() {
        let inst = read_instance(SMALL).unwrap();
        let back = read_instance(&write_instance(&inst)).unwrap();
        assert_eq!(back.requests(), inst.requests());
        assert_eq!(back.fleet(), inst.fleet());
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(back.duration(i, j), inst.duration(i, j));
            }
        }
    }

    #[test]
    fn malformed_input_reports_line() {
        let bad = SMALL.replace("2 3\n", "2 x\n");
        match read_instance(&bad) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 14),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(read_instance("NAME : nothing\n").is_err());
    }

    #[test]
    fn routes_file_round_trip() {
        let sol = Solution {
            routes: vec![
                Route {
                    vehicle_type: 0,
                    visits: vec![RequestId(4), RequestId(2)],
                    departure: 3600,
                },
                Route {
                    vehicle_type: 0,
                    visits: vec![RequestId(7)],
                    departure: 0,
                },
            ],
            cost: 0,
            penalized_cost: 0,
            feasible: true,
        };
        let text = write_routes(&sol);
        assert_eq!(text, "3600 4 2\n0 7\n");
        let parsed = read_routes(&text).unwrap();
        assert_eq!(parsed[0], (3600, vec![RequestId(4), RequestId(2)]));
    }
}
