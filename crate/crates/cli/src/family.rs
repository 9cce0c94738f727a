//! Building a family descriptor from `--family-file` and flags. The file is
//! read first; every flag given on the command line then overwrites the
//! matching descriptor field.

use std::path::PathBuf;

use clap::Args;
use serde_json::{json, Map, Value};
use symmcfg::FamilyDescriptor;

use crate::CliError;

#[derive(Debug, Clone, Default, Args)]
pub struct FamilyArgs {
    /// Family kind (ap, star-schur, geo-arith-add, geo-arith-star, gap,
    /// poly-progression, poly-vdw, symmetric-system, mpc-set, deuber-star,
    /// cst-corollary).
    #[arg(long)]
    pub family: Option<String>,
    /// JSON descriptor {"kind", "ctx", "params"}; flags win on conflict.
    #[arg(long)]
    pub family_file: Option<PathBuf>,
    /// Context (l,k) for ⊛-based families.
    #[arg(long, allow_negative_numbers = true)]
    pub l: Option<i64>,
    #[arg(long, allow_negative_numbers = true)]
    pub k: Option<i64>,
    /// Length: progression length, GAP range n, generator count.
    #[arg(long)]
    pub len: Option<u64>,
    /// m for geo-arithmetic grids and (m,p,c)-sets.
    #[arg(long)]
    pub m: Option<u64>,
    /// Coefficient bound p of an (m,p,c)-set.
    #[arg(long)]
    pub p: Option<i64>,
    /// c of an (m,p,c)-set, or the exponent of poly-vdw.
    #[arg(long, allow_negative_numbers = true)]
    pub c: Option<i64>,
    /// GAP order (number of step parameters).
    #[arg(long)]
    pub order: Option<u64>,
    /// Polynomials, constant term first: "0,1;0,0,1".
    #[arg(long, allow_hyphen_values = true)]
    pub polys: Option<String>,
    /// Coefficient tuples: "1;2,3".
    #[arg(long, allow_hyphen_values = true)]
    pub coeffs: Option<String>,
    /// Free parameter values: "a=1,d=2".
    #[arg(long, allow_hyphen_values = true)]
    pub params: Option<String>,
}

fn parse_lists(flag: &str, text: &str) -> Result<Value, CliError> {
    let rows = text
        .split(';')
        .map(|row| {
            row.split(',')
                .map(|v| {
                    let v = v.trim();
                    v.parse::<i64>()
                        .map(Value::from)
                        .or_else(|_| v.parse::<num_bigint::BigInt>().map(|b| Value::String(b.to_string())))
                        .map_err(|_| CliError::usage(format!("--{flag}: {v:?} is not an integer")))
                })
                .collect::<Result<Vec<_>, _>>()
                .map(Value::Array)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Value::Array(rows))
}

impl FamilyArgs {
    pub fn descriptor(&self) -> Result<FamilyDescriptor, CliError> {
        let mut doc = match &self.family_file {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::usage(format!("--family-file {}: {e}", path.display())))?;
                serde_json::from_str(&text)
                    .map_err(|e| CliError::usage(format!("--family-file {}: {e}", path.display())))?
            }
            None => json!({}),
        };
        let obj = doc.as_object_mut().ok_or_else(|| CliError::usage("--family-file must hold a JSON object"))?;
        if let Some(kind) = &self.family {
            obj.insert("kind".into(), json!(kind));
        }
        if !obj.contains_key("kind") {
            return Err(CliError::usage("--family is required (or a --family-file with a kind)"));
        }
        match (self.l, self.k) {
            (None, None) => {}
            (l, k) => {
                let old = obj.get("ctx").and_then(Value::as_object).cloned().unwrap_or_default();
                let l = l.map(Value::from).or_else(|| old.get("l").cloned());
                let k = k.map(Value::from).or_else(|| old.get("k").cloned());
                let (Some(l), Some(k)) = (l, k) else {
                    return Err(CliError::usage("--l and --k must be given together"));
                };
                obj.insert("ctx".into(), json!({"l": l, "k": k}));
            }
        }
        let params = obj.entry("params").or_insert_with(|| Value::Object(Map::new()));
        let params = params.as_object_mut().ok_or_else(|| CliError::usage("params must be a JSON object"))?;
        let mut put = |key: &str, v: Value| {
            params.insert(key.to_string(), v);
        };
        if let Some(v) = self.len {
            put("len", json!(v));
        }
        if let Some(v) = self.m {
            put("m", json!(v));
        }
        if let Some(v) = self.p {
            put("p", json!(v));
        }
        if let Some(v) = self.c {
            put("c", json!(v));
        }
        if let Some(v) = self.order {
            put("order", json!(v));
        }
        if let Some(text) = &self.polys {
            put("polys", parse_lists("polys", text)?);
        }
        if let Some(text) = &self.coeffs {
            put("coeffs", parse_lists("coeffs", text)?);
        }
        if let Some(text) = &self.params {
            for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
                let (name, value) = part
                    .split_once('=')
                    .ok_or_else(|| CliError::usage(format!("--params: {part:?} must look like name=value")))?;
                let value: num_bigint::BigInt = value
                    .trim()
                    .parse()
                    .map_err(|_| CliError::usage(format!("--params: {value:?} is not an integer")))?;
                put(name.trim(), Value::String(value.to_string()));
            }
        }
        FamilyDescriptor::from_json(&doc).map_err(CliError::from)
    }
}
