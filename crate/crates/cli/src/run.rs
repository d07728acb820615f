use triangle_cover::closed_forms::{self, BarycentricPoint};
use triangle_cover::kernel::{self, MassProfile};
use triangle_cover::{analysis, angular_density, montecarlo, Error, Point, Region, Result};

use crate::config::{resolve_region, AnchorSpec, CommandKind, KernelMethod, RunConfig};
use crate::report::{Outcome, SweepRow};

/// Smallest sample count accepted for stochastic commands.
pub const MIN_SAMPLES: u64 = 1000;

pub const CLOSED_FAMILIES: &[&str] = &[
    "limacon",
    "regular-polygon",
    "triangle",
    "square",
    "square-diagonal",
    "slice-disk",
    "offset-disk",
    "disk-average",
];

pub const SWEEP_FAMILIES: &[&str] = &["limacon", "regular-polygon", "offset-disk", "square-diagonal", "slice-disk"];

pub fn execute(config: &RunConfig) -> Result<Outcome> {
    if !(config.tolerance > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {}", config.tolerance)));
    }
    match config.command {
        CommandKind::Compute => compute(config),
        CommandKind::ClosedForm => closed_form(config),
        CommandKind::Simulate => {
            let (region, anchor) = region_and_anchor(config)?;
            let n = samples(config)?;
            let estimate = montecarlo::estimate_probability(&region, anchor, n, config.seed)?;
            Ok(Outcome::Simulation {
                anchor,
                estimate,
                method: "monte_carlo",
            })
        }
        CommandKind::Sylvester => {
            let (region, _) = region_and_anchor(config)?;
            let n = samples(config)?;
            let estimate = montecarlo::sylvester_nonconvex(&region, n, config.seed)?;
            Ok(Outcome::Sylvester {
                nonconvex: 4.0 * estimate.p_hat,
                estimate,
                method: "monte_carlo",
            })
        }
        CommandKind::Bounds => {
            let (region, anchor) = region_and_anchor(config)?;
            let bounds = analysis::bounds(&region, anchor)?;
            let symmetry_defect = analysis::symmetry_defect(&region, anchor)?;
            Ok(Outcome::Bounds {
                anchor,
                bounds,
                symmetry_defect,
            })
        }
        CommandKind::Maximize => {
            let (region, _) = region_and_anchor(config)?;
            let report = analysis::maximize(
                &region,
                config.grid_size.unwrap_or(16),
                config.refine_iters.unwrap_or(200),
            )?;
            Ok(Outcome::Maximize(report))
        }
        CommandKind::Sweep => sweep(config),
    }
}

fn region_and_anchor(config: &RunConfig) -> Result<(Region, Point)> {
    let spec = config
        .region_spec
        .as_deref()
        .ok_or_else(|| Error::Parse("missing region".into()))?;
    let resolved = resolve_region(spec, config.region_source.as_deref())?;
    let anchor = resolved.anchor(config.anchor.unwrap_or(AnchorSpec::Default));
    Ok((resolved.region, anchor))
}

fn samples(config: &RunConfig) -> Result<u64> {
    let n = config
        .samples
        .ok_or_else(|| Error::Domain("sample count required".into()))?;
    if n < MIN_SAMPLES {
        return Err(Error::Domain(format!("need at least {MIN_SAMPLES} samples, got {n}")));
    }
    Ok(n)
}

fn compute(config: &RunConfig) -> Result<Outcome> {
    let (region, anchor) = region_and_anchor(config)?;
    let tol = config.tolerance;
    let result = match config.method.unwrap_or(KernelMethod::Eq15) {
        KernelMethod::Eq15 => kernel::probability_with_tolerance(&angular_density(&region, anchor)?, tol)?,
        KernelMethod::Eq12 => {
            let profile = MassProfile::new(&angular_density(&region, anchor)?)?;
            kernel::probability_via_u_from_profile(&profile, config.u.unwrap_or(0.0), tol)?
        }
        KernelMethod::Eq14 => {
            let profile = MassProfile::new(&angular_density(&region, anchor)?)?;
            kernel::probability_eq14_from_profile(&profile, tol)?
        }
        KernelMethod::DoubleIntegral => {
            kernel::probability_double_integral(&region, anchor, config.panels.unwrap_or(512))?
        }
    };
    Ok(Outcome::Probability { anchor, result })
}

fn param(config: &RunConfig, key: &str) -> Result<f64> {
    config
        .parameters
        .get(key)
        .copied()
        .ok_or_else(|| Error::Domain(format!("missing parameter --{key}")))
}

fn positive_integer(x: f64, what: &str) -> Result<u64> {
    if x.fract() != 0.0 || x < 1.0 || x > u32::MAX as f64 {
        return Err(Error::Domain(format!("{what} must be a positive integer, got {x}")));
    }
    Ok(x as u64)
}

fn closed_form(config: &RunConfig) -> Result<Outcome> {
    let family = config
        .family
        .clone()
        .ok_or_else(|| Error::Domain("missing family".into()))?;
    // Families evaluated by one-dimensional quadrature report the tolerance
    // they are computed to; the others are exact up to round-off.
    let (value, error_estimate) = match family.as_str() {
        "limacon" => (closed_forms::limacon_probability(param(config, "a")?)?, 0.0),
        "regular-polygon" => (
            closed_forms::regular_polygon_probability(positive_integer(param(config, "m")?, "m")?)?,
            0.0,
        ),
        "triangle" => {
            let p = BarycentricPoint::new(param(config, "alpha")?, param(config, "beta")?, param(config, "gamma")?)?;
            (closed_forms::triangle_probability(p)?, 0.0)
        }
        "square" => (closed_forms::square_probability(param(config, "u")?, param(config, "v")?)?, 1e-13),
        "square-diagonal" => (closed_forms::square_diagonal_probability(param(config, "u")?)?, 0.0),
        "slice-disk" => (closed_forms::slice_disk_probability(param(config, "a")?)?, 0.0),
        "offset-disk" => (closed_forms::offset_disk_probability(param(config, "r")?)?, 1e-12),
        "disk-average" => (closed_forms::offset_disk_average()?.value, 1e-10),
        other => {
            return Err(Error::Domain(format!(
                "unknown family `{other}` (expected one of {})",
                CLOSED_FAMILIES.join(", ")
            )))
        }
    };
    Ok(Outcome::ClosedForm {
        family,
        value,
        method: "closed_form",
        error_estimate,
    })
}

/// Closed form, region and anchor for one sweep parameter.
fn sweep_case(family: &str, x: f64) -> Result<(f64, Region, Point)> {
    Ok(match family {
        "limacon" => (closed_forms::limacon_probability(x)?, Region::limacon(x)?, Point::ORIGIN),
        "regular-polygon" => {
            let m = positive_integer(x, "m")?;
            (
                closed_forms::regular_polygon_probability(m)?,
                Region::regular_polygon(2 * m as usize + 1)?,
                Point::ORIGIN,
            )
        }
        "offset-disk" => {
            let region = Region::offset_disk(x)?;
            let anchor = region.natural_anchor();
            (closed_forms::offset_disk_probability(x)?, region, anchor)
        }
        "square-diagonal" => (
            closed_forms::square_diagonal_probability(x)?,
            Region::unit_square(),
            Point::new(x, x),
        ),
        "slice-disk" => (closed_forms::slice_disk_probability(x)?, Region::disk_slice(x)?, Point::ORIGIN),
        other => {
            return Err(Error::Domain(format!(
                "unknown sweep family `{other}` (expected one of {})",
                SWEEP_FAMILIES.join(", ")
            )))
        }
    })
}

fn sweep(config: &RunConfig) -> Result<Outcome> {
    let family = config
        .family
        .clone()
        .ok_or_else(|| Error::Domain("missing family".into()))?;
    if !SWEEP_FAMILIES.contains(&family.as_str()) {
        return Err(Error::Domain(format!(
            "unknown sweep family `{family}` (expected one of {})",
            SWEEP_FAMILIES.join(", ")
        )));
    }
    if let Some(n) = config.samples {
        if n < MIN_SAMPLES {
            return Err(Error::Domain(format!("need at least {MIN_SAMPLES} samples, got {n}")));
        }
    }
    let mut rows = Vec::new();
    for &x in &config.grid {
        let (closed, region, anchor) = match sweep_case(&family, x) {
            Ok(case) => case,
            Err(e) if e.is_domain() => {
                eprintln!("warning: skipping {family} parameter {x}: {e}");
                continue;
            }
            Err(e) => return Err(e),
        };
        let quad = kernel::probability_with_tolerance(&angular_density(&region, anchor)?, config.tolerance)?;
        let mc = match config.samples {
            Some(n) => Some(montecarlo::estimate_probability(&region, anchor, n, config.seed)?),
            None => None,
        };
        rows.push(SweepRow {
            family: family.clone(),
            parameter: x,
            p_closed_form: Some(closed),
            p_quadrature: Some(quad.value),
            p_mc: mc.map(|m| m.p_hat),
            mc_std_err: mc.map(|m| m.std_err),
            n: mc.map(|m| m.n),
            seed: mc.map(|m| m.seed),
        });
    }
    Ok(Outcome::Sweep { rows })
}
