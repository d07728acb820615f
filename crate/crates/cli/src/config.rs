use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use triangle_cover::{parse_region_file, AnchorPoint, Error, Point, Region, Result};

/// Everything needed to reproduce one invocation. Embedded verbatim in json
/// reports and accepted back by `replay`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: CommandKind,
    /// Inline shorthand or path of a region file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region_spec: Option<String>,
    /// Contents of the region file when `region_spec` named one, so the
    /// report stays reproducible without the file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region_source: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchor: Option<AnchorSpec>,
    /// Family for `closed-form` and `sweep`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    /// Named family parameters for `closed-form`.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub parameters: BTreeMap<String, f64>,
    /// Parameter list for `sweep`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub grid: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<KernelMethod>,
    /// Starting direction for the half-turn formula.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<f64>,
    pub tolerance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    pub seed: u64,
    /// Cells per axis for the double integral.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub panels: Option<usize>,
    /// Grid points per axis for `maximize`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refine_iters: Option<usize>,
    pub output: OutputFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Compute,
    ClosedForm,
    Simulate,
    Sylvester,
    Bounds,
    Maximize,
    Sweep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum KernelMethod {
    /// `1/4 − 3∮(1/2 − H)² f`.
    Eq15,
    /// Half-turn form from a starting direction `u`.
    Eq12,
    /// Half-turn form from a direction where `H = 1/2`.
    Eq14,
    /// Slow two-dimensional oracle.
    DoubleIntegral,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnchorSpec {
    /// The anchor from the region file, or the region's natural anchor.
    Default,
    Origin,
    Centroid,
    Point { x: f64, y: f64 },
}

impl AnchorSpec {
    /// Parse the `--anchor` values: `origin`, `centroid`, or `X Y`.
    pub fn from_args(values: &[String]) -> Result<Self> {
        match values {
            [] => Ok(AnchorSpec::Default),
            [one] if one == "origin" => Ok(AnchorSpec::Origin),
            [one] if one == "centroid" => Ok(AnchorSpec::Centroid),
            [x, y] => {
                let parse = |s: &str| {
                    s.parse::<f64>()
                        .map_err(|_| Error::Domain(format!("anchor coordinate `{s}` is not a number")))
                };
                Ok(AnchorSpec::Point {
                    x: parse(x)?,
                    y: parse(y)?,
                })
            }
            _ => Err(Error::Domain(
                "--anchor takes `origin`, `centroid`, or two coordinates".into(),
            )),
        }
    }
}

/// A region together with the anchor its description carried, if any.
pub struct ResolvedRegion {
    pub region: Region,
    pub file_anchor: Option<AnchorPoint>,
}

impl ResolvedRegion {
    pub fn anchor(&self, spec: AnchorSpec) -> AnchorPoint {
        match spec {
            AnchorSpec::Default => self.file_anchor.unwrap_or_else(|| self.region.natural_anchor()),
            AnchorSpec::Origin => Point::ORIGIN,
            AnchorSpec::Centroid => match &self.region {
                Region::Polygon(p) => p.centroid(),
                other => other.natural_anchor(),
            },
            AnchorSpec::Point { x, y } => Point::new(x, y),
        }
    }
}

/// Read the file behind `spec` when it is not an inline shorthand.
pub fn load_region_source(spec: &str) -> Result<Option<String>> {
    if shorthand(spec)?.is_some() {
        return Ok(None);
    }
    std::fs::read_to_string(Path::new(spec))
        .map(Some)
        .map_err(|e| Error::Parse(format!("cannot read region file `{spec}`: {e}")))
}

/// Build the region from a shorthand, or from file contents read earlier.
pub fn resolve_region(spec: &str, source: Option<&str>) -> Result<ResolvedRegion> {
    if let Some(region) = shorthand(spec)? {
        return Ok(ResolvedRegion {
            region,
            file_anchor: None,
        });
    }
    let text = match source {
        Some(s) => s.to_string(),
        None => load_region_source(spec)?.unwrap_or_default(),
    };
    let file = parse_region_file(&text)?;
    Ok(ResolvedRegion {
        region: file.region,
        file_anchor: file.anchor,
    })
}

/// Inline region names: `limacon:a=2`, `cardioid`, `square`, `disk`,
/// `crescent`, `triangle`, `regular:n=5`, `slice-disk:a=0.25`,
/// `offset-disk:r=0.5`. Returns `None` for anything else.
fn shorthand(spec: &str) -> Result<Option<Region>> {
    let (name, args) = match spec.split_once(':') {
        Some((n, a)) => (n, a),
        None => (spec, ""),
    };
    let params = parse_params(spec, args)?;
    let want = |key: &str| -> Result<f64> {
        params
            .get(key)
            .copied()
            .ok_or_else(|| Error::Parse(format!("region `{spec}` needs `{key}=`")))
    };
    let check_keys = |allowed: &[&str]| -> Result<()> {
        match params.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(Error::Parse(format!("region `{spec}`: unknown parameter `{k}`"))),
            None => Ok(()),
        }
    };
    let region = match name {
        "limacon" => {
            check_keys(&["a"])?;
            Region::limacon(want("a")?)?
        }
        "cardioid" => {
            check_keys(&[])?;
            Region::limacon(1.0)?
        }
        "square" => {
            check_keys(&[])?;
            Region::unit_square()
        }
        "disk" => {
            check_keys(&[])?;
            Region::disk()
        }
        "crescent" => {
            check_keys(&[])?;
            Region::crescent()
        }
        "triangle" => {
            check_keys(&[])?;
            Region::equilateral_triangle()
        }
        "regular" => {
            check_keys(&["n"])?;
            let n = want("n")?;
            if n.fract() != 0.0 || n < 0.0 {
                return Err(Error::Domain(format!("regular polygon needs an integer n, got {n}")));
            }
            Region::regular_polygon(n as usize)?
        }
        "slice-disk" => {
            check_keys(&["a"])?;
            Region::disk_slice(want("a")?)?
        }
        "offset-disk" => {
            check_keys(&["r"])?;
            Region::offset_disk(want("r")?)?
        }
        _ => return Ok(None),
    };
    Ok(Some(region))
}

fn parse_params(spec: &str, args: &str) -> Result<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    for part in args.split(',').filter(|p| !p.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("region `{spec}`: expected key=value, got `{part}`")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("region `{spec}`: `{v}` is not a number")))?;
        out.insert(k.trim().to_string(), v);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shorthands_resolve() {
        for s in [
            "limacon:a=2",
            "cardioid",
            "square",
            "disk",
            "crescent",
            "triangle",
            "regular:n=5",
            "slice-disk:a=0.25",
            "offset-disk:r=0.5",
        ] {
            assert!(shorthand(s).unwrap().is_some(), "{s}");
        }
        assert!(shorthand("some/file.toml").unwrap().is_none());
    }

    #[test]
    fn shorthand_errors() {
        assert!(matches!(shorthand("limacon"), Err(Error::Parse(_))));
        assert!(matches!(shorthand("limacon:b=2"), Err(Error::Parse(_))));
        assert!(matches!(shorthand("limacon:a=x"), Err(Error::Parse(_))));
        assert!(matches!(shorthand("limacon:a=0.5"), Err(Error::Domain(_))));
        assert!(matches!(shorthand("regular:n=4.5"), Err(Error::Domain(_))));
    }

    #[test]
    fn anchor_args() {
        assert_eq!(AnchorSpec::from_args(&[]).unwrap(), AnchorSpec::Default);
        assert_eq!(AnchorSpec::from_args(&["origin".into()]).unwrap(), AnchorSpec::Origin);
        assert_eq!(
            AnchorSpec::from_args(&["0.25".into(), "-1".into()]).unwrap(),
            AnchorSpec::Point { x: 0.25, y: -1.0 }
        );
        assert!(AnchorSpec::from_args(&["left".into()]).is_err());
        assert!(AnchorSpec::from_args(&["1".into(), "y".into()]).is_err());
    }
}
