//! JSON form of family descriptors.
//!
//! ```json
//! {"kind": "ap", "ctx": null, "params": {"len": 3, "a": 1, "d": 2}}
//! ```
//!
//! `params` holds the shape fields of the kind and, optionally, every free
//! parameter by name. Integers are JSON numbers when they fit in `i64` and
//! decimal strings otherwise.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};

use super::deuber::DeuberShape;
use super::poly::{IntPolynomial, MultiStarPolynomial};
use super::{FamilyDescriptor, FamilyError, FamilyKind, Instance, Shape};
use crate::symmetric::SymmetricContext;

pub fn bigint_to_json(value: &BigInt) -> Value {
    match value.to_i64() {
        Some(v) => Value::from(v),
        None => Value::String(value.to_string()),
    }
}

pub fn bigint_from_json(value: &Value) -> Option<BigInt> {
    match value {
        Value::Number(n) => n.as_i64().map(BigInt::from).or_else(|| n.as_u64().map(BigInt::from)),
        Value::String(s) => s.trim().parse().ok(),
        _ => None,
    }
}

fn bad(msg: impl Into<String>) -> FamilyError {
    FamilyError::InvalidParams(msg.into())
}

fn field<'a>(params: &'a Map<String, Value>, name: &str) -> Result<&'a Value, FamilyError> {
    params.get(name).ok_or_else(|| bad(format!("missing field {name:?}")))
}

fn usize_field(params: &Map<String, Value>, name: &str) -> Result<usize, FamilyError> {
    field(params, name)?
        .as_u64()
        .and_then(|v| usize::try_from(v).ok())
        .ok_or_else(|| bad(format!("field {name:?} must be a non-negative integer")))
}

fn i64_field(params: &Map<String, Value>, name: &str) -> Result<i64, FamilyError> {
    field(params, name)?.as_i64().ok_or_else(|| bad(format!("field {name:?} must be an integer")))
}

fn bool_field(params: &Map<String, Value>, name: &str) -> Result<bool, FamilyError> {
    match params.get(name) {
        None => Ok(false),
        Some(v) => v.as_bool().ok_or_else(|| bad(format!("field {name:?} must be a boolean"))),
    }
}

fn array<'a>(value: &'a Value, what: &str) -> Result<&'a Vec<Value>, FamilyError> {
    value.as_array().ok_or_else(|| bad(format!("{what} must be an array")))
}

fn bigint_list(value: &Value, what: &str) -> Result<Vec<BigInt>, FamilyError> {
    array(value, what)?
        .iter()
        .map(|v| bigint_from_json(v).ok_or_else(|| bad(format!("{what} must hold integers"))))
        .collect()
}

fn bigint_lists(value: &Value, what: &str) -> Result<Vec<Vec<BigInt>>, FamilyError> {
    array(value, what)?.iter().map(|v| bigint_list(v, what)).collect()
}

fn usize_lists(value: &Value, what: &str) -> Result<Vec<Vec<usize>>, FamilyError> {
    array(value, what)?
        .iter()
        .map(|row| {
            array(row, what)?
                .iter()
                .map(|v| v.as_u64().map(|u| u as usize).ok_or_else(|| bad(format!("{what} must hold indices"))))
                .collect()
        })
        .collect()
}

fn lists_to_json(lists: &[Vec<BigInt>]) -> Value {
    Value::Array(lists.iter().map(|l| Value::Array(l.iter().map(bigint_to_json).collect())).collect())
}

fn multi_poly_to_json(poly: &MultiStarPolynomial) -> Value {
    let monomials: Vec<Value> = poly
        .monomials()
        .iter()
        .map(|(exp, coeff)| json!({"exponents": exp, "coeff": bigint_to_json(coeff)}))
        .collect();
    json!({"arity": poly.arity(), "monomials": monomials})
}

fn multi_poly_from_json(ctx: &SymmetricContext, value: &Value) -> Result<MultiStarPolynomial, FamilyError> {
    let obj = value.as_object().ok_or_else(|| bad("polynomial must be an object"))?;
    let arity = usize_field(obj, "arity")?;
    let mut monomials = Vec::new();
    for m in array(field(obj, "monomials")?, "monomials")? {
        let m = m.as_object().ok_or_else(|| bad("monomial must be an object"))?;
        let exponents = array(field(m, "exponents")?, "exponents")?
            .iter()
            .map(|e| e.as_u64().and_then(|e| u32::try_from(e).ok()).ok_or_else(|| bad("exponents must be u32")))
            .collect::<Result<Vec<u32>, _>>()?;
        let coeff = bigint_from_json(field(m, "coeff")?).ok_or_else(|| bad("coeff must be an integer"))?;
        monomials.push((exponents, coeff));
    }
    Ok(MultiStarPolynomial::new(*ctx, arity, monomials)?)
}

fn shape_to_json(shape: &Shape) -> Map<String, Value> {
    let mut out = Map::new();
    let mut put = |k: &str, v: Value| {
        out.insert(k.to_string(), v);
    };
    match shape {
        Shape::APlain { len } | Shape::SymmetricSystem { len } => put("len", json!(len)),
        Shape::StarSchur => {}
        Shape::GeoArithAdd { m } | Shape::GeoArithStar { m } => put("m", json!(m)),
        Shape::Gap { order, len } => {
            put("order", json!(order));
            put("len", json!(len));
        }
        Shape::PolyProgression { polys } => {
            let polys: Vec<Vec<BigInt>> = polys.iter().map(|p| p.coefficients().to_vec()).collect();
            put("polys", lists_to_json(&polys));
        }
        Shape::PolyVdW { coeffs } => put("coeffs", lists_to_json(coeffs)),
        Shape::MpcSet { m, p, c } => {
            put("m", json!(m));
            put("p", json!(p));
            put("c", json!(c));
        }
        Shape::DeuberStar(d) => {
            put("base_lengths", json!(d.base_lengths));
            put("selections", json!(d.selections));
            let families: Vec<Value> =
                d.families.iter().map(|f| Value::Array(f.iter().map(multi_poly_to_json).collect())).collect();
            put("families", Value::Array(families));
            put("include_identity_rows", json!(d.include_identity_rows));
            put("include_b0_entries", json!(d.include_b0_entries));
        }
        Shape::CstCorollary { len, coeffs } => {
            put("len", json!(len));
            put("coeffs", lists_to_json(coeffs));
        }
    }
    out
}

fn shape_from_json(
    kind: FamilyKind,
    ctx: Option<&SymmetricContext>,
    params: &Map<String, Value>,
) -> Result<Shape, FamilyError> {
    Ok(match kind {
        FamilyKind::APlain => Shape::APlain { len: usize_field(params, "len")? },
        FamilyKind::StarSchur => Shape::StarSchur,
        FamilyKind::GeoArithAdd => Shape::GeoArithAdd { m: u32_of(usize_field(params, "m")?)? },
        FamilyKind::GeoArithStar => Shape::GeoArithStar { m: u32_of(usize_field(params, "m")?)? },
        FamilyKind::Gap => {
            Shape::Gap { order: usize_field(params, "order")?, len: u32_of(usize_field(params, "len")?)? }
        }
        FamilyKind::PolyProgression => Shape::PolyProgression {
            polys: bigint_lists(field(params, "polys")?, "polys")?.into_iter().map(IntPolynomial::new).collect(),
        },
        FamilyKind::PolyVdW => Shape::PolyVdW { coeffs: bigint_lists(field(params, "coeffs")?, "coeffs")? },
        FamilyKind::SymmetricSystem => Shape::SymmetricSystem { len: usize_field(params, "len")? },
        FamilyKind::MpcSet => Shape::MpcSet {
            m: usize_field(params, "m")?,
            p: i64_field(params, "p")?,
            c: i64_field(params, "c")?,
        },
        FamilyKind::DeuberStar => {
            let ctx = ctx.ok_or(FamilyError::MissingContext(kind.name()))?;
            let families = array(field(params, "families")?, "families")?
                .iter()
                .map(|row| array(row, "families")?.iter().map(|p| multi_poly_from_json(ctx, p)).collect())
                .collect::<Result<Vec<Vec<_>>, FamilyError>>()?;
            let base_lengths = array(field(params, "base_lengths")?, "base_lengths")?
                .iter()
                .map(|v| v.as_u64().map(|u| u as usize).ok_or_else(|| bad("base_lengths must hold sizes")))
                .collect::<Result<Vec<_>, _>>()?;
            Shape::DeuberStar(DeuberShape {
                base_lengths,
                selections: usize_lists(field(params, "selections")?, "selections")?,
                families,
                include_identity_rows: bool_field(params, "include_identity_rows")?,
                include_b0_entries: bool_field(params, "include_b0_entries")?,
            })
        }
        FamilyKind::CstCorollary => Shape::CstCorollary {
            len: usize_field(params, "len")?,
            coeffs: bigint_lists(field(params, "coeffs")?, "coeffs")?,
        },
    })
}

fn u32_of(v: usize) -> Result<u32, FamilyError> {
    u32::try_from(v).map_err(|_| bad(format!("{v} is out of range")))
}

impl FamilyDescriptor {
    pub fn to_json(&self) -> Value {
        let mut params = shape_to_json(&self.shape);
        if let Some(values) = &self.params {
            for (name, v) in self.free_names().into_iter().zip(values) {
                params.insert(name, bigint_to_json(v));
            }
        }
        let ctx = match &self.ctx {
            Some(c) => json!({"l": c.l(), "k": c.k()}),
            None => Value::Null,
        };
        json!({"kind": self.kind().name(), "ctx": ctx, "params": Value::Object(params)})
    }

    pub fn from_json(value: &Value) -> Result<Self, FamilyError> {
        let obj = value.as_object().ok_or_else(|| bad("descriptor must be a JSON object"))?;
        let name = field(obj, "kind")?.as_str().ok_or_else(|| bad("kind must be a string"))?;
        let kind = FamilyKind::from_name(name).ok_or_else(|| FamilyError::UnknownKind(name.to_string()))?;
        let ctx = match obj.get("ctx") {
            None | Some(Value::Null) => None,
            Some(Value::Object(c)) => Some(SymmetricContext::new(i64_field(c, "l")?, i64_field(c, "k")?)?),
            Some(_) => return Err(bad("ctx must be an object or null")),
        };
        let empty = Map::new();
        let params = match obj.get("params") {
            None | Some(Value::Null) => &empty,
            Some(Value::Object(p)) => p,
            Some(_) => return Err(bad("params must be an object")),
        };
        let shape = shape_from_json(kind, ctx.as_ref(), params)?;
        let desc = FamilyDescriptor::new(shape, ctx)?;
        let names = desc.free_names();
        let present: Vec<Option<BigInt>> = names
            .iter()
            .map(|n| params.get(n).map(|v| bigint_from_json(v).ok_or_else(|| bad(format!("{n} must be an integer")))))
            .map(Option::transpose)
            .collect::<Result<_, _>>()?;
        if present.iter().all(Option::is_none) {
            return Ok(desc);
        }
        let values = present
            .into_iter()
            .zip(&names)
            .map(|(v, n)| v.ok_or_else(|| bad(format!("free parameter {n} missing; give all or none"))))
            .collect::<Result<Vec<_>, _>>()?;
        desc.with_params(values)
    }
}

impl Instance {
    pub fn to_json(&self) -> Value {
        let provenance: Map<String, Value> =
            self.provenance.iter().map(|(n, v)| (n.clone(), bigint_to_json(v))).collect();
        json!({
            "elements": self.elements.iter().map(bigint_to_json).collect::<Vec<_>>(),
            "raw_count": self.raw_count,
            "degenerate": self.degenerate,
            "params": Value::Object(provenance),
        })
    }
}
