//! JSON input and byte-stable JSON output.
//!
//! Functions are read from one of
//! * `{"subset": [i, …]}`: the indicator of a set,
//! * `{"values": [v, …]}` or a bare array, with `v` a number or `[re, im]`,
//! * `{"terms": [{"z": k, "subgroup": [i, …], "rep": x}, …]}`: `Σ k·1_{xH}`.
//!
//! Every float written is first rounded to 15 significant digits, so equal
//! inputs give identical bytes.

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::group_core::{GFunc, GSubset, Group};
use crate::mult_pairs::{MultiplicativePair, Width};
use crate::{Complex64, Error, Result};

pub const SIGNIFICANT_DIGITS: usize = 15;

fn json_err(e: serde_json::Error) -> Error {
    Error::Json(e.to_string())
}

/// `x` rounded to [`SIGNIFICANT_DIGITS`] significant digits; `−0` becomes `0`.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().unwrap_or(x)
}

/// Rounds every float in `v`. Integers are left alone; non-finite floats
/// become strings, since JSON has no spelling for them.
pub fn stabilize(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64 number");
            serde_json::Number::from_f64(round_sig(x)).map_or_else(|| Value::String(x.to_string()), Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(stabilize).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, stabilize(v))).collect()),
        other => other,
    }
}

/// Pretty, stabilized JSON text of any serializable value.
pub fn to_stable_string<T: Serialize + ?Sized>(v: &T) -> Result<String> {
    let value = serde_json::to_value(v).map_err(json_err)?;
    serde_json::to_string_pretty(&stabilize(value)).map_err(json_err)
}

pub fn complex_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

/// `{"values": [[re, im], …]}`.
pub fn function_json(f: &GFunc) -> Value {
    json!({ "values": f.values().iter().map(|&z| complex_json(z)).collect::<Vec<_>>() })
}

pub fn subset_json(s: &GSubset) -> Value {
    json!(s.members())
}

pub fn pair_json(p: &MultiplicativePair) -> Value {
    let width = match p.width {
        Width::Finite(r) => json!(r),
        Width::Unbounded => json!("unbounded"),
    };
    json!({
        "ground": subset_json(&p.ground),
        "perturb": subset_json(&p.perturb),
        "upper": subset_json(&p.upper),
        "lower": subset_json(&p.lower),
        "width": width,
    })
}

fn parse_value(text: &str) -> Result<Value> {
    serde_json::from_str(text.trim()).map_err(json_err)
}

fn index_list(g: &Group, v: &Value, what: &str) -> Result<Vec<usize>> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::Json(format!("{what}: expected an array of element indices")))?;
    arr.iter()
        .map(|x| {
            let i = x
                .as_u64()
                .ok_or_else(|| Error::Json(format!("{what}: `{x}` is not an element index")))? as usize;
            if i >= g.order() {
                return Err(Error::Json(format!("{what}: element {i} out of range for order {}", g.order())));
            }
            Ok(i)
        })
        .collect()
}

fn subset_from_value(g: &Group, v: &Value, what: &str) -> Result<GSubset> {
    GSubset::from_elements(g, index_list(g, v, what)?)
}

/// A subset given as a JSON array (`[0,2,5]`), a comma list (`0,2,5`) or
/// `{"subset": [...]}`; the empty string is the empty set.
pub fn parse_subset(g: &Group, text: &str) -> Result<GSubset> {
    let t = text.trim();
    if t.is_empty() {
        return Ok(GSubset::empty(g));
    }
    if t.starts_with('[') || t.starts_with('{') {
        let v = parse_value(t)?;
        let inner = v.get("subset").unwrap_or(&v);
        return subset_from_value(g, inner, "subset");
    }
    let elems = t
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| Error::Json(format!("subset: `{}` is not an element index", s.trim())))
        })
        .collect::<Result<Vec<_>>>()?;
    GSubset::from_elements(g, elems)
}

fn scalar(v: &Value) -> Result<Complex64> {
    if let Some(x) = v.as_f64() {
        return Ok(Complex64::new(x, 0.0));
    }
    match v.as_array().map(Vec::as_slice) {
        Some([re, im]) => match (re.as_f64(), im.as_f64()) {
            (Some(re), Some(im)) => Ok(Complex64::new(re, im)),
            _ => Err(Error::Json(format!("value `{v}` is not [re, im]"))),
        },
        _ => Err(Error::Json(format!("value `{v}` is neither a number nor [re, im]"))),
    }
}

pub fn function_from_value(g: &Group, v: &Value) -> Result<GFunc> {
    if let Value::Array(_) = v {
        return values_function(g, v);
    }
    let obj: &Map<String, Value> = v
        .as_object()
        .ok_or_else(|| Error::Json("function: expected an object or an array".into()))?;
    if let Some(s) = obj.get("subset") {
        return Ok(GFunc::indicator(&subset_from_value(g, s, "subset")?));
    }
    if let Some(vals) = obj.get("values") {
        return values_function(g, vals);
    }
    if let Some(terms) = obj.get("terms") {
        let terms = terms
            .as_array()
            .ok_or_else(|| Error::Json("terms: expected an array".into()))?;
        let mut out = vec![0i64; g.order()];
        for t in terms {
            let z = t
                .get("z")
                .and_then(Value::as_i64)
                .ok_or_else(|| Error::Json(format!("term `{t}` lacks integer `z`")))?;
            let h = subset_from_value(g, t.get("subgroup").unwrap_or(&Value::Null), "subgroup")?;
            if !h.is_subgroup() {
                return Err(Error::NotSubgroup);
            }
            let rep = t.get("rep").and_then(Value::as_u64).unwrap_or(g.identity() as u64) as usize;
            if rep >= g.order() {
                return Err(Error::Json(format!("rep {rep} out of range")));
            }
            for x in h.left_translate(rep).iter() {
                out[x] += z;
            }
        }
        return GFunc::from_integers(g, &out);
    }
    Err(Error::Json("function: expected one of `subset`, `values`, `terms`".into()))
}

fn values_function(g: &Group, v: &Value) -> Result<GFunc> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::Json("values: expected an array".into()))?;
    GFunc::new(g, arr.iter().map(scalar).collect::<Result<Vec<_>>>()?)
}

pub fn parse_function(g: &Group, text: &str) -> Result<GFunc> {
    function_from_value(g, &parse_value(text)?)
}

/// `{"ground", "perturb", "upper", "lower", "width"}`; `upper`/`lower`
/// default to the ground set and `width` to `"unbounded"`.
pub fn parse_pair(g: &Group, text: &str) -> Result<MultiplicativePair> {
    let v = parse_value(text)?;
    let get = |k: &str| -> Result<Option<GSubset>> { v.get(k).map(|s| subset_from_value(g, s, k)).transpose() };
    let ground = get("ground")?.ok_or_else(|| Error::Json("pair: `ground` missing".into()))?;
    let perturb = get("perturb")?.ok_or_else(|| Error::Json("pair: `perturb` missing".into()))?;
    let upper = get("upper")?.unwrap_or_else(|| ground.clone());
    let lower = get("lower")?.unwrap_or_else(|| ground.clone());
    let width = match v.get("width") {
        None => Width::Unbounded,
        Some(Value::String(s)) if s == "unbounded" => Width::Unbounded,
        Some(w) => Width::Finite(
            w.as_u64()
                .ok_or_else(|| Error::Json(format!("pair: width `{w}` is not a count")))? as usize,
        ),
    };
    MultiplicativePair::new(ground, perturb, upper, lower, width)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::build_group;

    #[test]
    fn sig_rounding() {
        assert_eq!(round_sig(0.1 + 0.2), 0.3);
        assert_eq!(round_sig(-0.0), 0.0);
        assert_eq!(round_sig(1.234_567_890_123_456_7e-20), 1.234_567_890_123_46e-20);
        let v = stabilize(json!({"a": [1.0000000000000002, 3], "b": f64::NAN.to_string()}));
        assert_eq!(v, json!({"a": [1.0, 3], "b": "NaN"}));
    }

    #[test]
    fn function_forms_agree() {
        let g = build_group("cyclic:4").unwrap();
        let a = parse_function(&g, r#"{"subset":[0,1]}"#).unwrap();
        let b = parse_function(&g, "[1, 1, 0, [0, 0]]").unwrap();
        let c = parse_function(&g, r#"{"values":[1,1,0,0]}"#).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
        let h = parse_function(&g, r#"{"terms":[{"z":2,"subgroup":[0,2],"rep":1},{"z":-1,"subgroup":[0]}]}"#).unwrap();
        assert_eq!(h.rounded(), vec![-1, 2, 0, 2]);
    }

    #[test]
    fn malformed_inputs() {
        let g = build_group("cyclic:4").unwrap();
        assert!(matches!(parse_function(&g, r#"{"subset":[9]}"#), Err(Error::Json(_))));
        assert!(matches!(parse_function(&g, "[1,2]"), Err(Error::Param(_)) | Err(Error::Json(_))));
        assert!(matches!(parse_function(&g, r#"{"terms":[{"z":1,"subgroup":[1]}]}"#), Err(Error::NotSubgroup)));
        assert!(matches!(parse_function(&g, "{"), Err(Error::Json(_))));
        assert!(parse_subset(&g, "0, x").is_err());
    }

    #[test]
    fn subset_and_pair_forms() {
        let g = build_group("cyclic:8").unwrap();
        let s = parse_subset(&g, "0,2, 4").unwrap();
        assert_eq!(s, parse_subset(&g, "[0,2,4]").unwrap());
        assert_eq!(s, parse_subset(&g, r#"{"subset":[4,2,0]}"#).unwrap());
        assert!(parse_subset(&g, "").unwrap().is_empty());
        let p = parse_pair(&g, r#"{"ground":[0,2,4,6],"perturb":[0,4]}"#).unwrap();
        let back = pair_json(&p);
        assert_eq!(back["width"], json!("unbounded"));
        assert_eq!(back["perturb"], json!([0, 4]));
    }

    #[test]
    fn output_is_byte_stable() {
        let g = build_group("cyclic:3").unwrap();
        let f = GFunc::from_fn(&g, |x| Complex64::new(1.0 / (x as f64 + 3.0), -0.0));
        let a = to_stable_string(&function_json(&f)).unwrap();
        let b = to_stable_string(&function_json(&f.clone())).unwrap();
        assert_eq!(a, b);
        assert!(a.contains("0.333333333333333"));
        assert!(!a.contains("-0.0"));
    }
}
