//! JSON tableau files.
//!
//! ```json
//! {"name":"radau-iia-2","order":3,"A":[["5/12","-1/12"],["3/4","1/4"]],"b":["3/4","1/4"],"c":["1/3","1"]}
//! ```
//!
//! Numeric entries are either JSON numbers or strings holding an exact
//! rational `"p/q"` (or a bare integer `"p"`).

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::ButcherTableau;
use crate::error::{Error, Result};

#[derive(Deserialize)]
#[serde(untagged)]
enum Entry {
    Number(f64),
    Text(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTableau {
    name: String,
    order: u32,
    #[serde(rename = "A")]
    a: Vec<Vec<Entry>>,
    b: Vec<Entry>,
    c: Vec<Entry>,
}

#[derive(Serialize)]
struct OutTableau<'a> {
    name: &'a str,
    order: u32,
    #[serde(rename = "A")]
    a: &'a [Vec<f64>],
    b: &'a [f64],
    c: &'a [f64],
}

fn parse_rational(text: &str) -> Option<f64> {
    let text = text.trim();
    match text.split_once('/') {
        Some((p, q)) => {
            let p: i64 = p.trim().parse().ok()?;
            let q: i64 = q.trim().parse().ok()?;
            (q != 0).then(|| p as f64 / q as f64)
        }
        None => text.parse::<i64>().ok().map(|p| p as f64),
    }
}

fn entry_value(entry: &Entry, field: impl FnOnce() -> String) -> Result<f64> {
    match entry {
        Entry::Number(x) => Ok(*x),
        Entry::Text(s) => parse_rational(s).ok_or_else(|| Error::Parse {
            location: Some(field()),
            message: format!("`{s}` is not a number or a rational of the form \"p/q\""),
        }),
    }
}

/// Parses and validates a tableau from JSON text.
pub fn parse_tableau(text: &str) -> Result<ButcherTableau> {
    let raw: RawTableau = serde_json::from_str(text).map_err(|e| Error::Parse {
        location: Some(format!("line {}, column {}", e.line(), e.column())),
        message: e.to_string(),
    })?;
    let a = raw
        .a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, e)| entry_value(e, || format!("field A[{i}][{j}]")))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let vector = |v: &[Entry], field: &str| -> Result<Vec<f64>> {
        v.iter()
            .enumerate()
            .map(|(i, e)| entry_value(e, || format!("field {field}[{i}]")))
            .collect()
    };
    let b = vector(&raw.b, "b")?;
    let c = vector(&raw.c, "c")?;
    ButcherTableau::new(raw.name, raw.order, a, b, c)
}

/// Reads a tableau file.
pub fn load_tableau(path: impl AsRef<Path>) -> Result<ButcherTableau> {
    parse_tableau(&std::fs::read_to_string(path)?)
}

/// Serializes with shortest round-trip decimal literals, so that
/// `parse_tableau(tableau_to_json(t)) == t` exactly.
pub fn tableau_to_json(t: &ButcherTableau) -> String {
    serde_json::to_string(&OutTableau {
        name: t.name(),
        order: t.order(),
        a: t.a(),
        b: t.b(),
        c: t.c(),
    })
    .expect("tableau serialization cannot fail")
}

/// Writes a tableau file.
pub fn save_tableau(t: &ButcherTableau, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, tableau_to_json(t) + "\n")?;
    Ok(())
}
