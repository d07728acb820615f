//! Textual region descriptions.
//!
//! A region file is TOML with a `kind` key and kind-specific fields:
//!
//! ```toml
//! kind = "polygon"            # polygon | polar | slices | disk_slice | offset_disk
//! vertices = [0, 0, 1, 0, 1, 1, 0, 1]
//! anchor = [0.5, 0.5]         # optional
//! ```
//!
//! | kind          | fields                                                  |
//! |---------------|---------------------------------------------------------|
//! | `polygon`     | `vertices`: flat `[x0, y0, x1, y1, ...]`, counterclockwise |
//! | `polar`       | `family = "limacon"` with `a`, or `family = "circle"` with `radius` |
//! | `slices`      | `family = "crescent"`                                   |
//! | `disk_slice`  | `a` in `[0, 1/2]`                                       |
//! | `offset_disk` | `r` in `[0, 1)`                                         |
//!
//! Every kind accepts an optional `anchor = [x, y]`. Unknown keys are errors.

use toml::{Table, Value};

use crate::error::{Error, Result};
use crate::region::{AnchorPoint, Point, Region};

#[derive(Debug, Clone)]
pub struct RegionFile {
    pub region: Region,
    pub anchor: Option<AnchorPoint>,
}

pub fn parse_region_file(source: &str) -> Result<RegionFile> {
    let table: Table = source
        .parse()
        .map_err(|e: toml::de::Error| Error::Parse(e.to_string().trim_end().to_string()))?;
    let doc = Doc { source, table: &table };

    let kind = doc.string("kind")?;
    let (allowed, region): (&[&str], Region) = match kind.as_str() {
        "polygon" => {
            let coords = doc.numbers("vertices")?;
            (&["vertices"], Region::polygon_from_flat(&coords).map_err(|e| doc.at("vertices", e))?)
        }
        "polar" => match doc.string("family")?.as_str() {
            "limacon" => (
                &["family", "a"],
                Region::limacon(doc.number("a")?).map_err(|e| doc.at("a", e))?,
            ),
            "circle" => (
                &["family", "radius"],
                Region::circle(doc.number("radius")?).map_err(|e| doc.at("radius", e))?,
            ),
            other => {
                return Err(doc.field_error(
                    "family",
                    &format!("unknown polar family `{other}` (expected limacon or circle)"),
                ))
            }
        },
        "slices" => match doc.string("family")?.as_str() {
            "crescent" => (&["family"], Region::crescent()),
            other => {
                return Err(doc.field_error(
                    "family",
                    &format!("unknown slices family `{other}` (expected crescent)"),
                ))
            }
        },
        "disk_slice" => (&["a"], Region::disk_slice(doc.number("a")?).map_err(|e| doc.at("a", e))?),
        "offset_disk" => (&["r"], Region::offset_disk(doc.number("r")?).map_err(|e| doc.at("r", e))?),
        other => {
            return Err(doc.field_error(
                "kind",
                &format!(
                    "unknown kind `{other}` (expected polygon, polar, slices, disk_slice or offset_disk)"
                ),
            ))
        }
    };

    for key in table.keys() {
        if key != "kind" && key != "anchor" && !allowed.contains(&key.as_str()) {
            return Err(doc.field_error(key, &format!("unknown key for kind `{kind}`")));
        }
    }

    let anchor = if table.contains_key("anchor") {
        let xy = doc.numbers("anchor")?;
        if xy.len() != 2 {
            return Err(doc.field_error("anchor", "expected [x, y]"));
        }
        Some(Point::new(xy[0], xy[1]))
    } else {
        None
    };
    Ok(RegionFile { region, anchor })
}

struct Doc<'a> {
    source: &'a str,
    table: &'a Table,
}

impl Doc<'_> {
    /// 1-based line on which `key` is assigned, if it can be found.
    fn line_of(&self, key: &str) -> Option<usize> {
        self.source.lines().position(|l| {
            let l = l.trim_start();
            l.strip_prefix(key)
                .is_some_and(|rest| rest.trim_start().starts_with('='))
        })
        .map(|i| i + 1)
    }

    fn field_error(&self, key: &str, msg: &str) -> Error {
        match self.line_of(key) {
            Some(line) => Error::Parse(format!("line {line}, field `{key}`: {msg}")),
            None => Error::Parse(format!("field `{key}`: {msg}")),
        }
    }

    /// Attach the field location to a validation error, keeping its category.
    fn at(&self, key: &str, e: Error) -> Error {
        let loc = match self.line_of(key) {
            Some(line) => format!("line {line}, field `{key}`"),
            None => format!("field `{key}`"),
        };
        match e {
            Error::DegenerateRegion(m) => Error::DegenerateRegion(format!("{loc}: {m}")),
            Error::InvalidRegion(m) => Error::InvalidRegion(format!("{loc}: {m}")),
            Error::Domain(m) => Error::Domain(format!("{loc}: {m}")),
            other => other,
        }
    }

    fn get(&self, key: &str) -> Result<&Value> {
        self.table
            .get(key)
            .ok_or_else(|| Error::Parse(format!("missing field `{key}`")))
    }

    fn string(&self, key: &str) -> Result<String> {
        match self.get(key)? {
            Value::String(s) => Ok(s.clone()),
            _ => Err(self.field_error(key, "expected a string")),
        }
    }

    fn number(&self, key: &str) -> Result<f64> {
        as_number(self.get(key)?).ok_or_else(|| self.field_error(key, "expected a number"))
    }

    fn numbers(&self, key: &str) -> Result<Vec<f64>> {
        match self.get(key)? {
            Value::Array(items) => items
                .iter()
                .map(as_number)
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| self.field_error(key, "expected an array of numbers")),
            _ => Err(self.field_error(key, "expected an array of numbers")),
        }
    }
}

fn as_number(v: &Value) -> Option<f64> {
    match v {
        Value::Float(x) => Some(*x),
        Value::Integer(i) => Some(*i as f64),
        _ => None,
    }
}
