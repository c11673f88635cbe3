//! TOML instance files.
//!
//! ```toml
//! num_interfaces = 2
//! num_services = 1
//! num_resources = 1
//! demand = [[5]]                 # J rows of K integers
//! capacity = [[3], [4]]          # I rows of K integers
//! unit_cost = [[1], ["2"]]       # I rows of K rationals
//! activation_cost = [10, "21/2"] # I rationals
//! overhead = [[[0]], [["1/2"]]]  # optional, I x J x K rationals
//! ```
//!
//! Rationals are integers or strings of the form `"p/q"`, `"p"` or a finite
//! decimal such as `"0.25"`. Unknown keys are rejected.

use std::fmt::Write as _;
use std::path::Path;

use serde::de::{self, Deserializer, Visitor};
use serde::Deserialize;

use crate::instance::{validate, RawInstance, SiaInstance, ValidationError};
use crate::rational::Rational;

#[derive(Debug, thiserror::Error)]
pub enum InstanceFileError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Syntax(String),
    #[error("invalid instance: {0}")]
    Invalid(#[from] ValidationError),
}

/// A rational literal in a TOML document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalLit(pub Rational);

impl<'de> Deserialize<'de> for RationalLit {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct LitVisitor;

        impl Visitor<'_> for LitVisitor {
            type Value = RationalLit;

            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("an integer or a rational string such as \"3/4\"")
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Self::Value, E> {
                Ok(RationalLit(Rational::from_int(v)))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Self::Value, E> {
                Ok(RationalLit(Rational::from(v)))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Self::Value, E> {
                v.parse().map(RationalLit).map_err(E::custom)
            }
        }

        deserializer.deserialize_any(LitVisitor)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDoc {
    num_interfaces: usize,
    num_services: usize,
    num_resources: usize,
    demand: Vec<Vec<i64>>,
    capacity: Vec<Vec<i64>>,
    unit_cost: Vec<Vec<RationalLit>>,
    activation_cost: Vec<RationalLit>,
    overhead: Option<Vec<Vec<Vec<RationalLit>>>>,
}

fn unwrap_rows(rows: Vec<Vec<RationalLit>>) -> Vec<Vec<Rational>> {
    rows.into_iter().map(|r| r.into_iter().map(|l| l.0).collect()).collect()
}

pub fn parse_instance(text: &str) -> Result<SiaInstance, InstanceFileError> {
    let doc: InstanceDoc = toml::from_str(text).map_err(|e| InstanceFileError::Syntax(e.to_string()))?;
    let raw = RawInstance {
        num_interfaces: doc.num_interfaces,
        num_services: doc.num_services,
        num_resources: doc.num_resources,
        demand: doc.demand,
        capacity: doc.capacity,
        unit_cost: unwrap_rows(doc.unit_cost),
        activation_cost: doc.activation_cost.into_iter().map(|l| l.0).collect(),
        overhead: doc.overhead.map(|t| t.into_iter().map(unwrap_rows).collect()),
    };
    Ok(validate(raw)?)
}

pub fn read_instance(path: &Path) -> Result<SiaInstance, InstanceFileError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| InstanceFileError::Io { path: path.display().to_string(), source })?;
    parse_instance(&text)
}

fn lit(q: &Rational) -> String {
    match q.to_i64() {
        Some(n) => n.to_string(),
        None => format!("\"{q}\""),
    }
}

fn row<T>(items: impl IntoIterator<Item = T>, f: impl Fn(T) -> String) -> String {
    let parts: Vec<String> = items.into_iter().map(f).collect();
    format!("[{}]", parts.join(", "))
}

/// Renders an instance in the file format. The overhead tensor is omitted
/// when it is all zero.
pub fn write_instance(instance: &SiaInstance) -> String {
    let raw = instance.to_raw();
    let mut out = String::new();
    let _ = writeln!(out, "num_interfaces = {}", raw.num_interfaces);
    let _ = writeln!(out, "num_services = {}", raw.num_services);
    let _ = writeln!(out, "num_resources = {}", raw.num_resources);
    let _ = writeln!(out, "demand = {}", row(&raw.demand, |r| row(r, |v| v.to_string())));
    let _ = writeln!(out, "capacity = {}", row(&raw.capacity, |r| row(r, |v| v.to_string())));
    let _ = writeln!(out, "unit_cost = {}", row(&raw.unit_cost, |r| row(r, lit)));
    let _ = writeln!(out, "activation_cost = {}", row(&raw.activation_cost, lit));
    if instance.has_overhead() {
        let tensor = raw.overhead.expect("to_raw always fills overhead");
        let _ = writeln!(out, "overhead = {}", row(&tensor, |m| row(m, |r| row(r, lit))));
    }
    out
}
