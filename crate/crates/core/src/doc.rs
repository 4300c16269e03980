//! JSON documents for spaces, circuits, maps and symbolic graphs.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::distance::{fmt_rational, rational_from_json, Distance};
use crate::error::{Error, Result};
use crate::homotopy::Circuit;
use crate::npp::{PointMap, TsGraph};
use crate::space::{Coords, MetricSpace, Origin, PointId, PointMetric};

fn malformed(msg: impl Into<String>) -> Error {
    Error::Malformed(msg.into())
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| malformed(format!("missing field {key:?}")))
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| malformed(format!("{what} must be an array")))
}

fn uint(v: &Value, what: &str) -> Result<u64> {
    v.as_u64().ok_or_else(|| malformed(format!("{what} must be a non-negative integer")))
}

fn ids_of(v: &Value, what: &str) -> Result<Vec<PointId>> {
    array(v, what)?
        .iter()
        .map(|x| {
            let i = uint(x, what)?;
            u32::try_from(i).map(PointId).map_err(|_| malformed(format!("{what}: id {i} too large")))
        })
        .collect()
}

/// Parses any of the three space formats, with an optional window.
pub fn parse_space(v: &Value) -> Result<MetricSpace> {
    let kind = field(v, "kind")?.as_str().ok_or_else(|| malformed("kind must be a string"))?;
    let space = match kind {
        "points" => {
            let metric = match v.get("metric").and_then(Value::as_str).unwrap_or("euclidean") {
                "euclidean" => PointMetric::Euclidean,
                "l1" => PointMetric::L1,
                other => return Err(malformed(format!("unknown metric {other:?}"))),
            };
            let rows = array(field(v, "points")?, "points")?;
            let coords = match v.get("coords").and_then(Value::as_str).unwrap_or("integer") {
                "integer" => Coords::Integer(
                    rows.iter()
                        .map(|r| array(r, "point")?.iter().map(|c| c.as_i64().ok_or_else(|| malformed("integer coordinate expected"))).collect())
                        .collect::<Result<_>>()?,
                ),
                "rational" => Coords::Rational(
                    rows.iter()
                        .map(|r| array(r, "point")?.iter().map(rational_from_json).collect())
                        .collect::<Result<_>>()?,
                ),
                other => return Err(malformed(format!("unknown coords {other:?}"))),
            };
            MetricSpace::from_points(coords, metric)?
        }
        "matrix" => {
            let rows = array(field(v, "d")?, "d")?;
            let d = rows
                .iter()
                .map(|r| {
                    array(r, "matrix row")?
                        .iter()
                        .map(|e| match e {
                            Value::String(s) => Distance::parse(s),
                            other => rational_from_json(other).and_then(|q| {
                                if q < num_rational::Ratio::from_integer(0) {
                                    Err(malformed("negative distance"))
                                } else {
                                    Ok(Distance::from_rational(q))
                                }
                            }),
                        })
                        .collect()
                })
                .collect::<Result<_>>()?;
            MetricSpace::from_matrix(d)?
        }
        "graph" => {
            let n = uint(field(v, "n")?, "n")? as usize;
            let edges = array(field(v, "edges")?, "edges")?
                .iter()
                .map(|e| match e.as_array().map(Vec::as_slice) {
                    Some([a, b]) => Ok((uint(a, "edge")? as u32, uint(b, "edge")? as u32)),
                    _ => Err(malformed("edges must be pairs")),
                })
                .collect::<Result<Vec<_>>>()?;
            MetricSpace::from_graph(n, &edges)?
        }
        other => return Err(malformed(format!("unknown space kind {other:?}"))),
    };
    match v.get("window") {
        None | Some(Value::Null) => Ok(space),
        Some(w) => {
            let margin = w.get("margin").map(|m| uint(m, "margin")).transpose()?.unwrap_or(1) as u32;
            let rim = w.get("rim").map(|r| ids_of(r, "rim")).transpose()?;
            space.with_window(margin, rim)
        }
    }
}

/// Document for `space` in the format it was built from.
pub fn space_to_value(space: &MetricSpace) -> Value {
    let mut v = match (space.origin(), space.coords()) {
        (Origin::Points(metric), Some(coords)) => {
            let metric = match metric {
                PointMetric::Euclidean => "euclidean",
                PointMetric::L1 => "l1",
            };
            match coords {
                Coords::Integer(p) => json!({"kind": "points", "coords": "integer", "metric": metric, "points": p}),
                Coords::Rational(p) => {
                    let p: Vec<Vec<String>> = p.iter().map(|r| r.iter().map(|&q| fmt_rational(q)).collect()).collect();
                    json!({"kind": "points", "coords": "rational", "metric": metric, "points": p})
                }
            }
        }
        (Origin::Graph(edges), _) => json!({"kind": "graph", "n": space.len(), "edges": edges}),
        _ => {
            let d: Vec<Vec<Value>> = space
                .points()
                .map(|x| {
                    space
                        .points()
                        .map(|y| {
                            let d = space.d(x, y);
                            match d.as_rational() {
                                Some(q) if q.is_integer() => Value::from(*q.numer()),
                                _ => Value::from(d.to_string()),
                            }
                        })
                        .collect()
                })
                .collect();
            json!({"kind": "matrix", "d": d})
        }
    };
    if let Some(w) = space.window() {
        v["window"] = json!({"margin": w.margin, "rim": w.rim});
    }
    v
}

/// A space given inline or by file path (resolved by the caller).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpaceRef {
    Path(String),
    Inline(Value),
}

impl SpaceRef {
    /// Parses an inline space; `load` resolves paths.
    pub fn resolve(&self, load: &dyn Fn(&str) -> Result<Value>) -> Result<MetricSpace> {
        match self {
            SpaceRef::Inline(v) => parse_space(v),
            SpaceRef::Path(p) => parse_space(&load(p)?),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<SpaceRef>,
    pub base: u32,
    pub points: Vec<u32>,
}

impl CircuitDoc {
    pub fn from_circuit(c: &Circuit, space: Option<SpaceRef>) -> CircuitDoc {
        CircuitDoc { space, base: c.base.0, points: c.points.iter().map(|p| p.0).collect() }
    }

    pub fn circuit(&self, space: &MetricSpace) -> Result<Circuit> {
        let pts: Vec<PointId> = self.points.iter().map(|&i| PointId(i)).collect();
        for &p in &pts {
            space.check(p)?;
        }
        if pts.first() != Some(&PointId(self.base)) {
            return Err(Error::NotACircuit);
        }
        Circuit::new(space, pts)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<SpaceRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub codomain: Option<SpaceRef>,
    pub table: Vec<u32>,
}

impl MapDoc {
    pub fn map<'a>(&self, domain: &'a MetricSpace, codomain: &'a MetricSpace) -> Result<PointMap<'a>> {
        PointMap::new(domain, codomain, self.table.iter().map(|&i| PointId(i)).collect())
    }
}

pub fn parse_ts_graph(v: &Value) -> Result<TsGraph> {
    let n = uint(field(v, "n")?, "n")? as usize;
    let labels = array(field(v, "labels")?, "labels")?
        .iter()
        .map(|l| uint(l, "label").map(|x| x as u32))
        .collect::<Result<Vec<u32>>>()?;
    if labels.len() != n * n.saturating_sub(1) / 2 {
        return Err(malformed(format!("{} labels for n = {n}", labels.len())));
    }
    if labels.contains(&0) {
        return Err(malformed("labels must be positive"));
    }
    Ok(TsGraph { n, labels })
}
