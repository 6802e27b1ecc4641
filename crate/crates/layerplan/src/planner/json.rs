//! Deterministic JSON encoding of plan results.
//!
//! Objects serialize with sorted keys and floats use shortest round-trip
//! formatting, so the same result always produces the same bytes.
//! Infinite values appear as the string `"inf"`. The per-entry layer
//! indices are internal bookkeeping and are not serialized.

use super::PlanResult;
use crate::akima::{Cubic, SplinePath};
use crate::{Error, Result};
use ndarray::{Array1, Array2};
use serde_json::{Map, Number, Value};

fn cost_value(v: f64) -> Value {
    if v.is_finite() {
        Value::Number(Number::from_f64(v).expect("finite cost"))
    } else {
        Value::String("inf".into())
    }
}

fn finite_value(v: f64) -> Value {
    Value::Number(Number::from_f64(v).expect("finite coordinate"))
}

fn vec_value(vs: &[f64]) -> Value {
    Value::Array(vs.iter().copied().map(finite_value).collect())
}

fn path_value(path: &Array2<f64>) -> Value {
    Value::Array(path.rows().into_iter().map(|row| vec_value(row.as_slice().unwrap())).collect())
}

fn spline_value(spline: &SplinePath) -> Value {
    let edges = spline
        .edges
        .iter()
        .map(|e| {
            let mut obj = Map::new();
            obj.insert("a".into(), vec_value(&e.a));
            obj.insert("b".into(), vec_value(&e.b));
            obj.insert("c".into(), vec_value(&e.c));
            obj.insert("d".into(), vec_value(&e.d));
            Value::Object(obj)
        })
        .collect();
    let mut obj = Map::new();
    obj.insert("knots".into(), vec_value(&spline.knots));
    obj.insert("edges".into(), Value::Array(edges));
    Value::Object(obj)
}

fn bad(field: &str) -> Error {
    Error::InvalidParameter(format!("plan JSON: missing or malformed field `{field}`"))
}

fn parse_f64(v: &Value, field: &str) -> Result<f64> {
    match v {
        Value::Number(n) => n.as_f64().ok_or_else(|| bad(field)),
        Value::String(s) if s == "inf" => Ok(f64::INFINITY),
        _ => Err(bad(field)),
    }
}

fn parse_vec(v: &Value, field: &str) -> Result<Vec<f64>> {
    v.as_array()
        .ok_or_else(|| bad(field))?
        .iter()
        .map(|x| x.as_f64().ok_or_else(|| bad(field)))
        .collect()
}

fn parse_path(v: &Value) -> Result<Array2<f64>> {
    let rows = v.as_array().ok_or_else(|| bad("paths"))?;
    let points: Vec<Vec<f64>> =
        rows.iter().map(|r| parse_vec(r, "paths")).collect::<Result<_>>()?;
    if points.is_empty() {
        return Err(bad("paths"));
    }
    let dim = points[0].len();
    if points.iter().any(|p| p.len() != dim) {
        return Err(bad("paths"));
    }
    let mut out = Array2::zeros((points.len(), dim));
    for (r, p) in points.iter().enumerate() {
        for (c, x) in p.iter().enumerate() {
            out[[r, c]] = *x;
        }
    }
    Ok(out)
}

fn parse_spline(v: &Value) -> Result<SplinePath> {
    let obj = v.as_object().ok_or_else(|| bad("splines"))?;
    let knots = parse_vec(obj.get("knots").ok_or_else(|| bad("splines.knots"))?, "splines.knots")?;
    let edges_json =
        obj.get("edges").and_then(Value::as_array).ok_or_else(|| bad("splines.edges"))?;
    if knots.len() != edges_json.len() + 1 {
        return Err(bad("splines.knots"));
    }
    let mut edges = Vec::with_capacity(edges_json.len());
    for (k, e) in edges_json.iter().enumerate() {
        let obj = e.as_object().ok_or_else(|| bad("splines.edges"))?;
        let get = |name: &str| -> Result<Vec<f64>> {
            parse_vec(obj.get(name).ok_or_else(|| bad("splines.edges"))?, "splines.edges")
        };
        edges.push(Cubic {
            a: get("a")?,
            b: get("b")?,
            c: get("c")?,
            d: get("d")?,
            t0: knots[k],
            t1: knots[k + 1],
        });
    }
    Ok(SplinePath { knots, edges })
}

impl PlanResult {
    /// Structured JSON value with deterministic (sorted) key order.
    pub fn to_json_value(&self) -> Value {
        let mut obj = Map::new();
        obj.insert("paths".into(), Value::Array(self.paths.iter().map(path_value).collect()));
        obj.insert(
            "values".into(),
            Value::Array(self.optimal_values.iter().copied().map(cost_value).collect()),
        );
        obj.insert("feasible".into(), Value::Array(self.feasible.iter().map(|&f| Value::Bool(f)).collect()));
        obj.insert(
            "goal_index".into(),
            Value::Array(self.goal_index.iter().map(|&g| Value::Number(g.into())).collect()),
        );
        obj.insert(
            "splines".into(),
            match &self.splines {
                Some(splines) => Value::Array(splines.iter().map(spline_value).collect()),
                None => Value::Null,
            },
        );
        Value::Object(obj)
    }

    /// Compact deterministic JSON text.
    pub fn to_json_string(&self) -> String {
        self.to_json_value().to_string()
    }

    /// Parse a result serialized by [`Self::to_json_string`]. Layer
    /// indices are not part of the encoding and come back empty.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text)?;
        let obj = value.as_object().ok_or_else(|| bad("root"))?;

        let paths: Vec<Array2<f64>> = obj
            .get("paths")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("paths"))?
            .iter()
            .map(parse_path)
            .collect::<Result<_>>()?;
        let values: Vec<f64> = obj
            .get("values")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("values"))?
            .iter()
            .map(|v| parse_f64(v, "values"))
            .collect::<Result<_>>()?;
        let feasible: Vec<bool> = obj
            .get("feasible")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("feasible"))?
            .iter()
            .map(|v| v.as_bool().ok_or_else(|| bad("feasible")))
            .collect::<Result<_>>()?;
        let goal_index: Vec<usize> = obj
            .get("goal_index")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("goal_index"))?
            .iter()
            .map(|v| v.as_u64().map(|g| g as usize).ok_or_else(|| bad("goal_index")))
            .collect::<Result<_>>()?;
        let splines = match obj.get("splines") {
            None | Some(Value::Null) => None,
            Some(Value::Array(arr)) => {
                Some(arr.iter().map(parse_spline).collect::<Result<Vec<_>>>()?)
            }
            Some(_) => return Err(bad("splines")),
        };

        let batch = paths.len();
        if values.len() != batch || feasible.len() != batch || goal_index.len() != batch {
            return Err(bad("root"));
        }
        if let Some(s) = &splines {
            if s.len() != batch {
                return Err(bad("splines"));
            }
        }
        Ok(PlanResult {
            paths,
            optimal_values: Array1::from_vec(values),
            feasible,
            goal_index,
            layer_indices: vec![Vec::new(); batch],
            splines,
        })
    }
}
