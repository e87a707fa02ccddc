//! Parsing of command-line inputs: models, bindings, and the JSON documents
//! for curves, sheaves, families and arcs.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;

use nodal_theta::curve::{ProjPoint, RationalNodalCurve, TfSheaf};
use nodal_theta::family::{AuxDivisor, MovingPoint, SheafFamily};
use nodal_theta::parse::parse_series;
use nodal_theta::powerseries::vars;
use nodal_theta::{Field, LocalModel, QCurve, QFamily, QModelElement, QSeries, QSheaf, QTruncSeries, Rational};
use serde_json::Value;

use crate::CliError;

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Input(msg.into())
}

/// Parses `n=1,m=1` (either key may be omitted and defaults to 0).
pub fn parse_model(src: &str) -> Result<LocalModel, CliError> {
    let (mut n, mut m) = (0usize, 0usize);
    for part in src.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (key, val) = part.split_once('=').ok_or_else(|| invalid(format!("model entry `{part}` is not key=value")))?;
        let val: usize = val.trim().parse().map_err(|_| invalid(format!("model entry `{part}` needs an integer")))?;
        match key.trim() {
            "n" => n = val,
            "m" => m = val,
            other => return Err(invalid(format!("unknown model key `{other}`"))),
        }
    }
    Ok(LocalModel::new(n, m)?)
}

/// Parses `x=u1,y=v1` into an alias table.
pub fn parse_bindings(src: Option<&str>, model: &LocalModel) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    let names = model.var_names();
    for part in src.unwrap_or("").split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (alias, target) = part.split_once('=').ok_or_else(|| invalid(format!("binding `{part}` is not alias=var")))?;
        let (alias, target) = (alias.trim(), target.trim());
        if !names.iter().any(|n| n == target) {
            return Err(invalid(format!("binding target `{target}` is not a model variable")));
        }
        if !is_identifier(alias) {
            return Err(invalid(format!("binding alias `{alias}` is not an identifier")));
        }
        out.insert(alias.to_string(), target.to_string());
    }
    Ok(out)
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_') && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Replaces aliased identifiers by their targets.
pub fn apply_bindings(src: &str, bindings: &BTreeMap<String, String>) -> String {
    let mut out = String::with_capacity(src.len());
    let mut ident = String::new();
    let flush = |ident: &mut String, out: &mut String| {
        out.push_str(bindings.get(ident.as_str()).unwrap_or(ident));
        ident.clear();
    };
    for c in src.chars() {
        if c.is_ascii_alphanumeric() || c == '_' {
            if ident.is_empty() && c.is_ascii_digit() {
                out.push(c);
            } else {
                ident.push(c);
            }
        } else {
            flush(&mut ident, &mut out);
            out.push(c);
        }
    }
    flush(&mut ident, &mut out);
    out
}

pub fn parse_element(
    model: &LocalModel,
    src: &str,
    bind: Option<&str>,
    truncation: u32,
) -> Result<QModelElement, CliError> {
    let bindings = parse_bindings(bind, model)?;
    Ok(model.parse(&apply_bindings(src, &bindings), truncation)?)
}

/// Reads an argument that is either inline JSON or a path to a JSON file.
pub fn read_json(arg: &str) -> Result<Value, CliError> {
    let trimmed = arg.trim_start();
    let text = if trimmed.starts_with('{') || trimmed.starts_with('[') {
        arg.to_string()
    } else {
        fs::read_to_string(arg).map_err(|e| invalid(format!("cannot read `{arg}`: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| invalid(format!("malformed JSON: {e}")))
}

/// A rational from a JSON number or a `"p/q"` string.
pub fn json_rational(v: &Value, what: &str) -> Result<Rational, CliError> {
    let parsed = match v {
        Value::Number(n) => n.as_i64().map(Rational::from_int),
        Value::String(s) => Rational::parse_exact(s),
        _ => None,
    };
    parsed.ok_or_else(|| invalid(format!("{what} must be an integer or a \"p/q\" string, got {v}")))
}

fn json_point(v: &Value) -> Result<ProjPoint<Rational>, CliError> {
    if let Value::String(s) = v {
        if matches!(s.to_ascii_lowercase().as_str(), "inf" | "infinity") {
            return Ok(ProjPoint::Infinity);
        }
    }
    json_rational(v, "node point").map(ProjPoint::Finite)
}

fn json_index(key: &str) -> Result<usize, CliError> {
    key.parse().map_err(|_| invalid(format!("node index `{key}` is not a nonnegative integer")))
}

pub fn parse_curve(doc: &Value) -> Result<QCurve, CliError> {
    let nodes = doc
        .get("nodes")
        .and_then(Value::as_array)
        .ok_or_else(|| invalid("curve document needs a \"nodes\" array"))?;
    let mut pairs = Vec::with_capacity(nodes.len());
    for node in nodes {
        match node.as_array().map(Vec::as_slice) {
            Some([p, q]) => pairs.push((json_point(p)?, json_point(q)?)),
            _ => return Err(invalid(format!("node {node} is not a pair"))),
        }
    }
    Ok(RationalNodalCurve::new(pairs)?.normalized())
}

pub fn parse_sheaf(doc: &Value, curve: &QCurve) -> Result<QSheaf, CliError> {
    let nonfree: BTreeSet<usize> = match doc.get("nonfree") {
        None => BTreeSet::new(),
        Some(Value::Array(items)) => items
            .iter()
            .map(|x| x.as_u64().map(|j| j as usize).ok_or_else(|| invalid(format!("nonfree entry {x} is not an index"))))
            .collect::<Result<_, _>>()?,
        Some(other) => return Err(invalid(format!("\"nonfree\" must be an array, got {other}"))),
    };
    let line_degree = doc
        .get("dL")
        .and_then(Value::as_i64)
        .ok_or_else(|| invalid("sheaf document needs an integer \"dL\""))?;
    let gluing: BTreeMap<usize, Rational> = match doc.get("glue") {
        None => BTreeMap::new(),
        Some(Value::Object(map)) => map
            .iter()
            .map(|(k, v)| Ok((json_index(k)?, json_rational(v, "gluing")?)))
            .collect::<Result<_, CliError>>()?,
        Some(other) => return Err(invalid(format!("\"glue\" must be an object, got {other}"))),
    };
    Ok(TfSheaf::new(curve, nonfree, line_degree, gluing)?)
}

/// Reads `--curve` and `--sheaf`; the sheaf may also sit under the
/// curve document's `"sheaf"` key.
pub fn curve_and_sheaf(curve_arg: &str, sheaf_arg: Option<&str>) -> Result<(QCurve, QSheaf), CliError> {
    let doc = read_json(curve_arg)?;
    let curve = parse_curve(&doc)?;
    let sheaf_doc = match sheaf_arg {
        Some(arg) => {
            let d = read_json(arg)?;
            d.get("sheaf").cloned().unwrap_or(d)
        }
        None => doc.get("sheaf").cloned().ok_or_else(|| invalid("no sheaf given (use --sheaf or a \"sheaf\" key)"))?,
    };
    let sheaf = parse_sheaf(&sheaf_doc, &curve)?;
    Ok((curve, sheaf))
}

/// A series in `t` given as an expression string or a number.
pub fn parse_t_series(v: &Value, precision: usize, what: &str) -> Result<QTruncSeries, CliError> {
    let src = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        _ => return Err(invalid(format!("{what} must be an expression string"))),
    };
    let s: QSeries = parse_series(&src, &vars(&["t"]), precision as u32)?;
    Ok(s.to_univariate(precision))
}

pub fn parse_family(
    doc: &Value,
    curve: &QCurve,
    sheaf: &QSheaf,
    default_n: usize,
    seed: u64,
) -> Result<(QFamily, AuxDivisor<Rational>), CliError> {
    let n = match doc.get("N") {
        None => default_n,
        Some(v) => v.as_u64().ok_or_else(|| invalid("\"N\" must be a nonnegative integer"))? as usize,
    };
    let gluing = match doc.get("glue") {
        None => BTreeMap::new(),
        Some(Value::Object(map)) => map
            .iter()
            .map(|(k, v)| Ok((json_index(k)?, parse_t_series(v, n, "gluing series")?)))
            .collect::<Result<_, CliError>>()?,
        Some(other) => return Err(invalid(format!("\"glue\" must be an object, got {other}"))),
    };
    let mut moving = Vec::new();
    if let Some(list) = doc.get("moving") {
        for item in list.as_array().ok_or_else(|| invalid("\"moving\" must be an array"))? {
            let base = json_rational(item.get("point").unwrap_or(&Value::Null), "moving point")?;
            let trajectory = parse_t_series(item.get("trajectory").unwrap_or(&Value::Null), n, "trajectory")?;
            moving.push(MovingPoint { base, trajectory });
        }
    }
    let aux = match doc.get("aux") {
        None => AuxDivisor::Seeded(seed),
        Some(Value::Array(points)) => {
            AuxDivisor::Points(points.iter().map(|p| json_rational(p, "auxiliary point")).collect::<Result<_, _>>()?)
        }
        Some(other) => return Err(invalid(format!("\"aux\" must be an array, got {other}"))),
    };
    Ok((SheafFamily::new(curve, sheaf.clone(), n, gluing, moving)?, aux))
}

/// Arc images in model variable order; unspecified variables map to 0.
pub fn parse_arc_images(doc: &Value, model: &LocalModel, default_n: u32) -> Result<(Vec<QSeries>, u32), CliError> {
    let n = match doc.get("N") {
        None => default_n,
        Some(v) => v.as_u64().ok_or_else(|| invalid("\"N\" must be a nonnegative integer"))? as u32,
    };
    let images = doc
        .get("images")
        .and_then(Value::as_object)
        .ok_or_else(|| invalid("arc document needs an \"images\" object"))?;
    let names = model.var_names();
    if let Some(k) = images.keys().find(|k| !names.contains(k)) {
        return Err(invalid(format!("arc image for unknown variable `{k}`")));
    }
    let tv = vars(&["t"]);
    let series = names
        .iter()
        .map(|name| match images.get(name) {
            None => Ok(QSeries::zero(tv.clone(), n)?),
            Some(Value::String(s)) => Ok(parse_series(s, &tv, n)?),
            Some(Value::Number(x)) => Ok(parse_series(&x.to_string(), &tv, n)?),
            Some(other) => Err(invalid(format!("image of {name} must be an expression, got {other}"))),
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok((series, n))
}
