//! JSON documents for tensors, degenerations, rank expressions and kill sets.
//!
//! Every document is an object carrying `"schema"` and `"kind"` fields.
//! Labels are a string or a nested array of labels; scalars use the
//! encoding of their ring (see [`Scalar::to_json`]).

use std::collections::BTreeMap;
use std::path::Path;

use num_rational::BigRational;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::catalog::{RankExpression, RankFactor};
use crate::degeneration::{MonomialDegeneration, Weights};
use crate::error::{Error, Result};
use crate::scalar::{Ring, Scalar};
use crate::tensor::{Axis, KillSets, Label, Tensor, Triple, VarSet};

pub const SCHEMA_VERSION: u32 = 1;

fn malformed(what: &str) -> Error {
    Error::InvalidArgument(format!("malformed {what} document"))
}

/// Wraps `body` (an object) with the schema version and kind.
pub fn envelope(kind: &str, body: Value) -> Value {
    let mut out = Map::new();
    out.insert("schema".into(), json!(SCHEMA_VERSION));
    out.insert("kind".into(), json!(kind));
    match body {
        Value::Object(m) => out.extend(m),
        other => {
            out.insert("data".into(), other);
        }
    }
    Value::Object(out)
}

/// Checks `schema` and `kind` when present.
pub fn check_envelope(v: &Value, kind: &str) -> Result<()> {
    let obj = v.as_object().ok_or_else(|| malformed(kind))?;
    if let Some(s) = obj.get("schema") {
        if s.as_u64() != Some(SCHEMA_VERSION as u64) {
            return Err(Error::InvalidArgument(format!("unsupported schema version {s}")));
        }
    }
    if let Some(k) = obj.get("kind") {
        if k.as_str() != Some(kind) {
            return Err(Error::InvalidArgument(format!("expected a {kind} document, got {k}")));
        }
    }
    Ok(())
}

fn field<'a>(v: &'a Value, key: &str, what: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| Error::InvalidArgument(format!("{what} document lacks {key:?}")))
}

fn from_value<T: DeserializeOwned>(v: &Value) -> Result<T> {
    Ok(serde_json::from_value(v.clone())?)
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("plain data serializes")
}

fn labels(vs: &VarSet) -> Value {
    to_value(&vs.labels())
}

pub fn tensor_to_json(t: &Tensor) -> Value {
    let terms: Vec<Value> =
        t.terms().map(|(tr, c)| json!({"x": to_value(&tr.x), "y": to_value(&tr.y), "z": to_value(&tr.z), "c": c.to_json()})).collect();
    envelope(
        "tensor",
        json!({"ring": to_value(t.ring()), "x": labels(t.x()), "y": labels(t.y()), "z": labels(t.z()), "terms": terms}),
    )
}

pub fn tensor_from_json(v: &Value) -> Result<Tensor> {
    check_envelope(v, "tensor")?;
    let ring: Ring = from_value(field(v, "ring", "tensor")?)?;
    ring.validate()?;
    let axis_labels = |k: &str| -> Result<Vec<Label>> { from_value(field(v, k, "tensor")?) };
    let mut t = Tensor::new(ring.clone(), axis_labels("x")?, axis_labels("y")?, axis_labels("z")?)?;
    let terms = field(v, "terms", "tensor")?.as_array().ok_or_else(|| malformed("tensor"))?;
    for term in terms {
        let l = |k: &str| -> Result<Label> { from_value(field(term, k, "term")?) };
        let c = Scalar::from_json(&ring, field(term, "c", "term")?)?;
        let tr = Triple::new(l("x")?, l("y")?, l("z")?);
        if t.contains(&tr) {
            return Err(Error::InvalidArgument(format!("repeated term {} {} {}", tr.x, tr.y, tr.z)));
        }
        t.insert(tr, c)?;
    }
    Ok(t)
}

fn weights_to_json(w: &Weights) -> Value {
    Value::Array(w.iter().map(|(l, &v)| json!([to_value(l), v])).collect())
}

fn weights_from_json(v: &Value) -> Result<Weights> {
    let arr = v.as_array().ok_or_else(|| malformed("weights"))?;
    let mut out = BTreeMap::new();
    for entry in arr {
        let (l, w): (Label, i64) = from_value(entry)?;
        if out.insert(l.clone(), w).is_some() {
            return Err(Error::InvalidArgument(format!("weight for {l} given twice")));
        }
    }
    Ok(out)
}

pub fn degeneration_to_json(d: &MonomialDegeneration) -> Value {
    envelope(
        "degeneration",
        json!({
            "big": tensor_to_json(&d.big),
            "small": tensor_to_json(&d.small),
            "a": weights_to_json(&d.a),
            "b": weights_to_json(&d.b),
            "c": weights_to_json(&d.c),
        }),
    )
}

pub fn degeneration_from_json(v: &Value) -> Result<MonomialDegeneration> {
    check_envelope(v, "degeneration")?;
    let t = |k: &str| tensor_from_json(field(v, k, "degeneration")?);
    let w = |k: &str| weights_from_json(field(v, k, "degeneration")?);
    Ok(MonomialDegeneration::new(t("big")?, t("small")?, w("a")?, w("b")?, w("c")?))
}

fn rational_to_json(r: &BigRational) -> Value {
    Scalar::Rational(r.clone()).to_json()
}

pub fn rank_expression_to_json(r: &RankExpression) -> Value {
    let coeffs = |v: &[Scalar]| Value::Array(v.iter().map(Scalar::to_json).collect());
    let factors: Vec<Value> =
        r.factors.iter().map(|f| json!({"x": coeffs(&f.x), "y": coeffs(&f.y), "z": coeffs(&f.z)})).collect();
    envelope(
        "rank-expression",
        json!({
            "ring": to_value(&r.ring),
            "x": labels(&r.x),
            "y": labels(&r.y),
            "z": labels(&r.z),
            "scale": rational_to_json(&r.scale),
            "border_order": r.border_order,
            "rank": r.rank(),
            "factors": factors,
        }),
    )
}

pub fn rank_expression_from_json(v: &Value) -> Result<RankExpression> {
    check_envelope(v, "rank-expression")?;
    let ring: Ring = from_value(field(v, "ring", "rank-expression")?)?;
    ring.validate()?;
    let varset = |k: &str, axis: Axis| -> Result<VarSet> { VarSet::new(axis, from_value(field(v, k, "rank-expression")?)?) };
    let scale = match Scalar::from_json(&Ring::Rational, field(v, "scale", "rank-expression")?)? {
        Scalar::Rational(r) => r,
        _ => unreachable!("rational ring yields rationals"),
    };
    let border_order: Option<usize> = from_value(v.get("border_order").unwrap_or(&Value::Null))?;
    let coeffs = |f: &Value, k: &str| -> Result<Vec<Scalar>> {
        field(f, k, "factor")?
            .as_array()
            .ok_or_else(|| malformed("factor"))?
            .iter()
            .map(|c| Scalar::from_json(&ring, c))
            .collect()
    };
    let factors = field(v, "factors", "rank-expression")?
        .as_array()
        .ok_or_else(|| malformed("rank-expression"))?
        .iter()
        .map(|f| Ok(RankFactor { x: coeffs(f, "x")?, y: coeffs(f, "y")?, z: coeffs(f, "z")? }))
        .collect::<Result<Vec<_>>>()?;
    Ok(RankExpression {
        ring: ring.clone(),
        x: varset("x", Axis::X)?,
        y: varset("y", Axis::Y)?,
        z: varset("z", Axis::Z)?,
        factors,
        scale,
        border_order,
    })
}

pub fn kill_sets_to_json(k: &KillSets) -> Value {
    envelope("kill-sets", to_value(k))
}

pub fn kill_sets_from_json(v: &Value) -> Result<KillSets> {
    check_envelope(v, "kill-sets")?;
    from_value(v)
}

pub fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
    Ok(serde_json::from_str(&text)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{cw_degeneration, rank_expression_tp, rank_expression_tp_shifted, structural_tensor, TpField};
    use crate::degeneration::compose_border;

    #[test]
    fn tensor_round_trip() {
        let t = structural_tensor(3, 0).unwrap();
        let v = tensor_to_json(&t);
        assert_eq!(v["schema"], json!(1));
        assert_eq!(v["terms"].as_array().unwrap().len(), 9);
        assert_eq!(tensor_from_json(&v).unwrap(), t);
    }

    #[test]
    fn degeneration_round_trip() {
        let d = cw_degeneration(2).unwrap();
        assert_eq!(degeneration_from_json(&degeneration_to_json(&d)).unwrap(), d);
    }

    #[test]
    fn rank_expression_round_trip() {
        for r in [rank_expression_tp(3, TpField::Cyclotomic).unwrap(), rank_expression_tp(4, TpField::Prime).unwrap()] {
            assert_eq!(rank_expression_from_json(&rank_expression_to_json(&r)).unwrap(), r);
        }
        let b = compose_border(&rank_expression_tp_shifted(3, TpField::Cyclotomic, 1).unwrap(), &cw_degeneration(1).unwrap())
            .unwrap();
        assert_eq!(rank_expression_from_json(&rank_expression_to_json(&b)).unwrap(), b);
    }

    #[test]
    fn kind_and_schema_are_checked() {
        let t = tensor_to_json(&structural_tensor(2, 0).unwrap());
        assert!(degeneration_from_json(&t).is_err());
        let mut bad = t.clone();
        bad["schema"] = json!(99);
        assert!(tensor_from_json(&bad).is_err());
        let bare = json!({"x": ["1"]});
        assert_eq!(kill_sets_from_json(&bare).unwrap().x.len(), 1);
    }

    #[test]
    fn repeated_terms_are_rejected() {
        let mut v = tensor_to_json(&structural_tensor(2, 0).unwrap());
        let first = v["terms"][0].clone();
        v["terms"].as_array_mut().unwrap().push(first);
        assert!(tensor_from_json(&v).is_err());
    }
}
