//! JSON encodings of fans, bundles, resolutions, presentations and point
//! configurations. Scalars are strings `"p/q"` (or `"p"`); projective points
//! are pairs of scalars; matrices are arrays of rows.

use std::path::Path;

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::bundle::{BundleData, BundleError, FiltrationTriple, Partition, RayFiltration};
use crate::exactlin::LinAlgError;
use crate::fan::{Fan, FanError, RayVector};
use crate::git::{GitError, PointConfig};
use crate::resolution::{MonomialMatrix, MonomialResolution, ResolutionError};
use crate::scalar::{format_rational, parse_rational};
use crate::sheaf::{SheafError, SheafPresentation};
use crate::{LinePoint, Mat, Rational};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot read {path}: {message}")]
    Read { path: String, message: String },
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("field `{field}`: {message}")]
    Field { field: String, message: String },
    #[error(transparent)]
    Fan(#[from] FanError),
    #[error(transparent)]
    Bundle(#[from] BundleError),
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
    #[error(transparent)]
    Resolution(#[from] ResolutionError),
    #[error(transparent)]
    Sheaf(#[from] SheafError),
    #[error(transparent)]
    Git(#[from] GitError),
}

type Result<T> = std::result::Result<T, IoError>;

fn bad(field: &str, message: impl Into<String>) -> IoError {
    IoError::Field { field: field.to_string(), message: message.into() }
}

pub fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path).map_err(|e| IoError::Read { path: path.display().to_string(), message: e.to_string() })?;
    Ok(serde_json::from_str(&text)?)
}

fn field<'a>(v: &'a Value, name: &str) -> Result<&'a Value> {
    v.get(name).ok_or_else(|| bad(name, "missing"))
}

fn array<'a>(v: &'a Value, name: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| bad(name, "expected an array"))
}

fn uint(v: &Value, name: &str) -> Result<u64> {
    v.as_u64().ok_or_else(|| bad(name, "expected a nonnegative integer"))
}

fn int(v: &Value, name: &str) -> Result<i64> {
    v.as_i64().ok_or_else(|| bad(name, "expected an integer"))
}

pub fn rational_to_json(x: &Rational) -> Value {
    Value::String(format_rational(x))
}

pub fn rational_from_json(v: &Value, name: &str) -> Result<Rational> {
    match v {
        Value::String(s) => parse_rational(s).ok_or_else(|| bad(name, format!("not a rational: {s:?}"))),
        Value::Number(n) => n.as_i64().map(crate::scalar::int).ok_or_else(|| bad(name, "integers only")),
        _ => Err(bad(name, "expected a rational string")),
    }
}

pub fn line_to_json(p: &LinePoint) -> Value {
    json!([rational_to_json(p.a()), rational_to_json(p.b())])
}

pub fn line_from_json(v: &Value, name: &str) -> Result<LinePoint> {
    let coords = array(v, name)?;
    if coords.len() != 2 {
        return Err(bad(name, "expected two homogeneous coordinates"));
    }
    let a = rational_from_json(&coords[0], name)?;
    let b = rational_from_json(&coords[1], name)?;
    Ok(LinePoint::new(a, b)?)
}

pub fn matrix_to_json(m: &Mat) -> Value {
    Value::Array(m.to_rows().iter().map(|row| Value::Array(row.iter().map(rational_to_json).collect())).collect())
}

/// Parses an array of rows; `cols` fixes the width when there are no rows.
pub fn matrix_from_json(v: &Value, name: &str, cols: Option<usize>) -> Result<Mat> {
    let rows = array(v, name)?
        .iter()
        .map(|row| array(row, name)?.iter().map(|x| rational_from_json(x, name)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    if rows.is_empty() {
        return Ok(Mat::zeros(0, cols.unwrap_or(0)));
    }
    Ok(Mat::from_rows(&rows)?)
}

pub fn fan_to_json(f: &Fan) -> Value {
    serde_json::to_value(f).expect("fan serializes")
}

/// The ray list of a fan object, without validating it.
pub fn rays_from_json(v: &Value) -> Result<Vec<RayVector>> {
    array(field(v, "rays")?, "rays")?
        .iter()
        .map(|r| {
            let xy = array(r, "rays")?;
            if xy.len() != 2 {
                return Err(bad("rays", "expected [x, y]"));
            }
            Ok(RayVector::new(int(&xy[0], "rays")?, int(&xy[1], "rays")?))
        })
        .collect()
}

/// A fan object `{"rays": ...}` or a spec string such as `"hirzebruch:1"`.
pub fn fan_from_json(v: &Value) -> Result<Fan> {
    match v {
        Value::String(s) => Ok(Fan::from_spec(s)?),
        Value::Object(_) => Ok(Fan::new(rays_from_json(v)?)?),
        _ => Err(bad("fan", "expected an object or a spec string")),
    }
}

pub fn bundle_to_json(b: &BundleData) -> Value {
    let filtrations: Vec<Value> = b
        .filtrations()
        .iter()
        .map(|f| match &f.line {
            Some(l) => json!({"jump": f.jump, "line": line_to_json(l)}),
            None => json!({"jump": f.jump}),
        })
        .collect();
    json!({"fan": fan_to_json(b.fan()), "filtrations": filtrations})
}

pub fn bundle_from_json(v: &Value) -> Result<BundleData> {
    let fan = fan_from_json(field(v, "fan")?)?;
    let filtrations = array(field(v, "filtrations")?, "filtrations")?
        .iter()
        .map(|f| {
            let jump = uint(field(f, "jump")?, "jump")?;
            let jump = u32::try_from(jump).map_err(|_| bad("jump", "too large"))?;
            let line = f.get("line").map(|l| line_from_json(l, "line")).transpose()?;
            Ok(RayFiltration { jump, line })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BundleData::new(fan, filtrations)?)
}

/// `{"fan": ..., "triples": [{"i1": -2, "i2": 0, "line": [..]}, ...]}`.
pub fn triples_from_json(v: &Value) -> Result<(Fan, Vec<FiltrationTriple>)> {
    let fan = fan_from_json(field(v, "fan")?)?;
    let triples = array(field(v, "triples")?, "triples")?
        .iter()
        .map(|t| {
            let line = t.get("line").map(|l| line_from_json(l, "line")).transpose()?;
            Ok(FiltrationTriple::new(int(field(t, "i1")?, "i1")?, int(field(t, "i2")?, "i2")?, line)?)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((fan, triples))
}

pub fn triples_to_json(fan: &Fan, triples: &[FiltrationTriple]) -> Value {
    let triples: Vec<Value> = triples
        .iter()
        .map(|t| {
            let mut o = Map::new();
            o.insert("i1".into(), json!(t.i1()));
            o.insert("i2".into(), json!(t.i2()));
            if let Some(l) = t.line() {
                o.insert("line".into(), line_to_json(l));
            }
            Value::Object(o)
        })
        .collect();
    json!({"fan": fan_to_json(fan), "triples": triples})
}

pub fn partition_to_json(p: &Partition) -> Value {
    json!(p.parts())
}

pub fn partition_from_json(v: &Value, support: &[usize]) -> Result<Partition> {
    let parts = array(v, "partition")?
        .iter()
        .map(|part| array(part, "partition")?.iter().map(|r| Ok(uint(r, "partition")? as usize)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Ok(Partition::new(parts, support)?)
}

fn jumps_from_json(v: &Value) -> Result<Vec<u32>> {
    array(v, "jumps")?.iter().map(|j| u32::try_from(uint(j, "jumps")?).map_err(|_| bad("jumps", "too large"))).collect()
}

fn support(jumps: &[u32]) -> Vec<usize> {
    (0..jumps.len()).filter(|&i| jumps[i] > 0).collect()
}

fn matrix_fields(mm: &MonomialMatrix, cokernel_map: &Mat) -> Map<String, Value> {
    let mut o = Map::new();
    o.insert("partition".into(), partition_to_json(mm.partition()));
    o.insert("jumps".into(), json!(mm.jumps()));
    o.insert("coeffs".into(), matrix_to_json(mm.coeffs()));
    o.insert("cokernel_map".into(), matrix_to_json(cokernel_map));
    o
}

pub fn resolution_to_json(r: &MonomialResolution) -> Value {
    Value::Object(matrix_fields(r.matrix(), r.cokernel_map()))
}

/// Uses `cokernel_map` when present, otherwise the canonical cokernel of `coeffs`.
pub fn resolution_from_json(v: &Value) -> Result<MonomialResolution> {
    let jumps = jumps_from_json(field(v, "jumps")?)?;
    let partition = partition_from_json(field(v, "partition")?, &support(&jumps))?;
    let s = partition.len();
    let cokernel = match v.get("cokernel_map") {
        Some(c) => matrix_from_json(c, "cokernel_map", Some(s))?,
        None => {
            let coeffs = matrix_from_json(field(v, "coeffs")?, "coeffs", Some(s.saturating_sub(2)))?;
            MonomialMatrix::new(&jumps, partition.clone(), coeffs)?.cokernel_map()
        }
    };
    Ok(MonomialResolution::from_cokernel_map(&jumps, partition, cokernel)?)
}

pub fn presentation_to_json(p: &SheafPresentation) -> Value {
    let mut o = matrix_fields(p.matrix(), p.cokernel_map());
    o.insert("fan".into(), fan_to_json(p.fan()));
    Value::Object(o)
}

pub fn presentation_from_json(v: &Value) -> Result<SheafPresentation> {
    let fan = fan_from_json(field(v, "fan")?)?;
    let jumps = jumps_from_json(field(v, "jumps")?)?;
    let partition = partition_from_json(field(v, "partition")?, &support(&jumps))?;
    let s = partition.len();
    Ok(match v.get("cokernel_map") {
        Some(c) => SheafPresentation::from_cokernel_map(fan, &jumps, partition, matrix_from_json(c, "cokernel_map", Some(s))?)?,
        None => {
            let coeffs = matrix_from_json(field(v, "coeffs")?, "coeffs", Some(s.saturating_sub(2)))?;
            SheafPresentation::new(fan, &jumps, partition, coeffs)?
        }
    })
}

pub fn config_to_json(c: &PointConfig) -> Value {
    let points: Vec<Value> = c.points().iter().map(|p| Value::Array(p.iter().map(rational_to_json).collect())).collect();
    json!({"m": c.ambient(), "points": points})
}

pub fn config_from_json(v: &Value) -> Result<PointConfig> {
    let m = uint(field(v, "m")?, "m")? as usize;
    let points = array(field(v, "points")?, "points")?
        .iter()
        .map(|p| array(p, "points")?.iter().map(|x| rational_from_json(x, "points")).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Ok(PointConfig::new(m, points)?)
}

/// Canonical rendering: sorted keys, two-space indentation, trailing newline.
pub fn to_canonical_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}
