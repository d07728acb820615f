use std::io::Write;

use serde::Serialize;
use triangle_cover::{BoundsReport, MaximizerReport, McEstimate, Point, ProbabilityResult};

use crate::config::{OutputFormat, RunConfig};

/// One row of a parameter sweep. Missing methods serialize as empty CSV
/// fields and as `null` in json.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub family: String,
    pub parameter: f64,
    pub p_closed_form: Option<f64>,
    pub p_quadrature: Option<f64>,
    pub p_mc: Option<f64>,
    pub mc_std_err: Option<f64>,
    pub n: Option<u64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Outcome {
    Probability {
        anchor: Point,
        #[serde(flatten)]
        result: ProbabilityResult,
    },
    ClosedForm {
        family: String,
        value: f64,
        method: &'static str,
        error_estimate: f64,
    },
    Simulation {
        anchor: Point,
        #[serde(flatten)]
        estimate: McEstimate,
        method: &'static str,
    },
    Sylvester {
        #[serde(flatten)]
        estimate: McEstimate,
        /// Probability that four points are not in convex position.
        nonconvex: f64,
        method: &'static str,
    },
    Bounds {
        anchor: Point,
        #[serde(flatten)]
        bounds: BoundsReport,
        symmetry_defect: f64,
    },
    Maximize(MaximizerReport),
    Sweep {
        rows: Vec<SweepRow>,
    },
}

#[derive(Serialize)]
struct JsonReport<'a> {
    config: &'a RunConfig,
    result: &'a Outcome,
}

enum Field {
    Num(f64),
    Int(u64),
    Text(String),
}

/// Render with 12 significant digits.
pub fn sig12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{x:.11e}")
    }
}

impl Field {
    fn text(&self) -> String {
        match self {
            Field::Num(x) => sig12(*x),
            Field::Int(n) => n.to_string(),
            Field::Text(s) => s.clone(),
        }
    }

    fn csv(&self) -> String {
        match self {
            Field::Num(x) => format!("{x:?}"),
            Field::Int(n) => n.to_string(),
            Field::Text(s) => s.clone(),
        }
    }
}

impl Outcome {
    fn fields(&self) -> Vec<(&'static str, Field)> {
        use Field::*;
        match self {
            Outcome::Probability { anchor, result } => vec![
                ("anchor_x", Num(anchor.x)),
                ("anchor_y", Num(anchor.y)),
                ("value", Num(result.value)),
                ("raw_value", Num(result.raw_value)),
                ("method", Text(result.method.as_str().into())),
                ("error_estimate", Num(result.error_estimate)),
            ],
            Outcome::ClosedForm {
                family,
                value,
                method,
                error_estimate,
            } => vec![
                ("family", Text(family.clone())),
                ("value", Num(*value)),
                ("method", Text((*method).into())),
                ("error_estimate", Num(*error_estimate)),
            ],
            Outcome::Simulation {
                anchor,
                estimate,
                method,
            } => vec![
                ("anchor_x", Num(anchor.x)),
                ("anchor_y", Num(anchor.y)),
                ("p_hat", Num(estimate.p_hat)),
                ("std_err", Num(estimate.std_err)),
                ("n", Int(estimate.n)),
                ("seed", Int(estimate.seed)),
                ("hits", Int(estimate.hits)),
                ("method", Text((*method).into())),
            ],
            Outcome::Sylvester {
                estimate,
                nonconvex,
                method,
            } => vec![
                ("p_hat", Num(estimate.p_hat)),
                ("std_err", Num(estimate.std_err)),
                ("nonconvex", Num(*nonconvex)),
                ("n", Int(estimate.n)),
                ("seed", Int(estimate.seed)),
                ("hits", Int(estimate.hits)),
                ("method", Text((*method).into())),
            ],
            Outcome::Bounds {
                anchor,
                bounds,
                symmetry_defect,
            } => vec![
                ("anchor_x", Num(anchor.x)),
                ("anchor_y", Num(anchor.y)),
                ("h", Num(bounds.h)),
                ("lower", Num(bounds.lower)),
                ("p", Num(bounds.p)),
                ("upper", Num(bounds.upper)),
                ("symmetry_defect", Num(*symmetry_defect)),
            ],
            Outcome::Maximize(rep) => vec![
                ("argmax_x", Num(rep.argmax.x)),
                ("argmax_y", Num(rep.argmax.y)),
                ("p_max", Num(rep.p_max)),
                ("iterations", Int(rep.trace.len() as u64)),
            ],
            Outcome::Sweep { .. } => Vec::new(),
        }
    }
}

pub fn write_report<W: Write>(out: &mut W, config: &RunConfig, outcome: &Outcome) -> std::io::Result<()> {
    match config.output {
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut *out, &JsonReport { config, result: outcome })?;
            writeln!(out)
        }
        OutputFormat::Csv => write_csv(out, outcome),
        OutputFormat::Text => write_text(out, config, outcome),
    }
}

fn write_text<W: Write>(out: &mut W, config: &RunConfig, outcome: &Outcome) -> std::io::Result<()> {
    if let Some(region) = &config.region_spec {
        writeln!(out, "region: {region}")?;
    }
    if let Outcome::Sweep { rows } = outcome {
        let header = ["family", "parameter", "p_closed_form", "p_quadrature", "p_mc", "mc_std_err", "n", "seed"];
        writeln!(out, "{}", header.join("\t"))?;
        let opt = |x: Option<f64>| x.map(sig12).unwrap_or_else(|| "-".into());
        let opt_int = |x: Option<u64>| x.map(|v| v.to_string()).unwrap_or_else(|| "-".into());
        for r in rows {
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                r.family,
                sig12(r.parameter),
                opt(r.p_closed_form),
                opt(r.p_quadrature),
                opt(r.p_mc),
                opt(r.mc_std_err),
                opt_int(r.n),
                opt_int(r.seed)
            )?;
        }
        return Ok(());
    }
    for (name, value) in outcome.fields() {
        writeln!(out, "{name}: {}", value.text())?;
    }
    Ok(())
}

fn write_csv<W: Write>(out: &mut W, outcome: &Outcome) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if let Outcome::Sweep { rows } = outcome {
        if rows.is_empty() {
            w.write_record(["family", "parameter", "p_closed_form", "p_quadrature", "p_mc", "mc_std_err", "n", "seed"])?;
        }
        for r in rows {
            w.serialize(r)?;
        }
    } else {
        let fields = outcome.fields();
        w.write_record(fields.iter().map(|(k, _)| *k))?;
        w.write_record(fields.iter().map(|(_, v)| v.csv()))?;
    }
    w.flush()
}
