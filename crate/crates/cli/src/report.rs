//! Canonical JSON and table rendering.

use nodal_theta::{Field, QSeries, QTruncSeries, Rational};
use serde_json::{json, Value};

/// Compact JSON with keys in sorted order (the map type of `serde_json`
/// without `preserve_order` is ordered).
pub fn canonical(v: &Value) -> String {
    v.to_string()
}

pub fn rational(x: &Rational) -> Value {
    Value::String(x.to_exact_string())
}

/// A truncated series as a polynomial expression in `t`, without the
/// error term.
pub fn t_series(s: &QTruncSeries) -> Value {
    let ps = QSeries::from_univariate(nodal_theta::powerseries::vars(&["t"]), s).expect("one variable");
    Value::String(ps.to_string())
}

pub fn opt<T: Into<Value>>(x: Option<T>) -> Value {
    x.map_or(Value::Null, Into::into)
}

pub fn hs_table(t: &nodal_theta::multiplicity::HilbertSamuelTable) -> Value {
    json!({
        "values": t.values,
        "dimension": opt(t.dimension),
        "multiplicity": opt(t.multiplicity),
        "stabilized": t.stabilized,
    })
}

/// Aligned `key  value` lines; nested values stay as compact JSON.
pub fn table(v: &Value) -> String {
    let Value::Object(map) = v else { return format!("{v}\n") };
    let width = map.keys().map(String::len).max().unwrap_or(0);
    map.iter()
        .map(|(k, v)| {
            let shown = match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            format!("{k:<width$}  {shown}\n")
        })
        .collect()
}
