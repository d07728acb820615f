//! Bounds, symmetry and extremal behavior of the coverage probability as a
//! function of the region and the anchor.


use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closed_forms::{triangle_probability, BarycentricPoint};
use crate::error::{Error, Result};
use crate::kernel::{self, minimize_periodic, MassProfile};
use crate::region::{angular_density, area, AnchorPoint, Point, Region};

/// Two-sided bound on `P` from the smallest half-turn mass `h`:
/// `1/4 − (1+4h)(1/2−h)² ≤ P ≤ 1/4 − 2(1/2−h)³`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub h: f64,
    pub lower: f64,
    pub upper: f64,
    pub p: f64,
}

impl BoundsReport {
    pub fn from_h(h: f64, p: f64) -> Self {
        let d = 0.5 - h;
        Self {
            h,
            lower: 0.25 - (1.0 + 4.0 * h) * d * d,
            upper: 0.25 - 2.0 * d * d * d,
            p,
        }
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.lower <= self.p + tol && self.p <= self.upper + tol
    }
}

pub fn bounds(region: &Region, anchor: AnchorPoint) -> Result<BoundsReport> {
    let profile = MassProfile::new(&angular_density(region, anchor)?)?;
    let h = kernel::min_half_mass(&profile);
    let p = kernel::probability_from_profile(&profile, kernel::DEFAULT_TOLERANCE)?;
    let report = BoundsReport::from_h(h, p.value);
    if !report.holds(1e-9) {
        return Err(Error::Consistency(format!(
            "P = {} outside [{}, {}] for h = {h}",
            report.p, report.lower, report.upper
        )));
    }
    Ok(report)
}

/// `sup_θ |H(θ) − 1/2|`; zero exactly when the region is centrally symmetric
/// about the anchor.
pub fn symmetry_defect(region: &Region, anchor: AnchorPoint) -> Result<f64> {
    let profile = MassProfile::new(&angular_density(region, anchor)?)?;
    Ok(symmetry_defect_of(&profile))
}

pub fn symmetry_defect_of(profile: &MassProfile) -> f64 {
    let (_, v) = minimize_periodic(|t| -(profile.h(t) - 0.5).abs(), &profile.kinks(), 2048);
    -v
}

/// Direction where `H` is smallest, with that value.
pub fn min_half_mass_direction(profile: &MassProfile) -> (f64, f64) {
    minimize_periodic(|t| profile.h(t), &profile.kinks(), 2048)
}

/// `P` at anchors `boundary_point + ε_k · direction` with
/// `ε_k = ε₀ 2^{-k}`, `ε₀ = √area / 4`.
pub fn boundary_limit_probe(
    region: &Region,
    boundary_point: Point,
    direction: Point,
    steps: usize,
) -> Result<Vec<(f64, f64)>> {
    let start = 0.25 * area(region)?.sqrt();
    boundary_limit_probe_from(region, boundary_point, direction, steps, start)
}

pub fn boundary_limit_probe_from(
    region: &Region,
    boundary_point: Point,
    direction: Point,
    steps: usize,
    start: f64,
) -> Result<Vec<(f64, f64)>> {
    let len = direction.norm();
    if !(len > 0.0) || !(start > 0.0) {
        return Err(Error::Domain("probe needs a nonzero direction and step".into()));
    }
    let dir = Point::new(direction.x / len, direction.y / len);
    (0..steps)
        .map(|k| {
            let eps = start * 0.5f64.powi(k as i32);
            let anchor = Point::new(boundary_point.x + eps * dir.x, boundary_point.y + eps * dir.y);
            if !region.contains(anchor) {
                return Err(Error::Domain(format!(
                    "probe step {k} at ({}, {}) left the region",
                    anchor.x, anchor.y
                )));
            }
            let p = kernel::probability_of(region, anchor)?;
            Ok((eps, p.value))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaximizerReport {
    pub argmax: Point,
    pub p_max: f64,
    /// Best point after the grid scan and after each refinement step.
    pub trace: Vec<(Point, f64)>,
}

/// Empirical maximizer of `P` over anchors: a `grid × grid` scan of the
/// bounding box followed by Nelder–Mead refinement.
pub fn maximize(region: &Region, grid: usize, refine_iters: usize) -> Result<MaximizerReport> {
    if grid < 8 {
        return Err(Error::Domain(format!("grid must be at least 8, got {grid}")));
    }
    let (lo, hi) = region.bounding_box();
    let dx = (hi.x - lo.x) / grid as f64;
    let dy = (hi.y - lo.y) / grid as f64;
    let candidates: Vec<Point> = (0..grid)
        .flat_map(|j| (0..grid).map(move |i| (i, j)))
        .map(|(i, j)| Point::new(lo.x + (i as f64 + 0.5) * dx, lo.y + (j as f64 + 0.5) * dy))
        .filter(|p| region.contains(*p))
        .collect();
    if candidates.is_empty() {
        return Err(Error::Domain("no grid point inside the region".into()));
    }
    let values: Vec<f64> = candidates
        .par_iter()
        .map(|p| kernel::probability_of(region, *p).map(|r| r.value))
        .collect::<Result<_>>()?;

    let mut best = 0;
    for (k, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = k;
        }
    }
    let start = candidates[best];
    let mut trace = vec![(start, values[best])];

    let objective = |p: Point| -> f64 {
        if !region.contains(p) {
            return f64::NEG_INFINITY;
        }
        kernel::probability_of(region, p).map_or(f64::NEG_INFINITY, |r| r.value)
    };
    nelder_mead(objective, start, 0.5 * dx, 0.5 * dy, refine_iters, &mut trace);

    let (argmax, p_max) = trace
        .iter()
        .copied()
        .fold(trace[0], |acc, x| if x.1 > acc.1 { x } else { acc });
    Ok(MaximizerReport {
        argmax,
        p_max,
        trace,
    })
}

/// Maximize `f` from a right-angled start simplex; pushes the best vertex
/// after every iteration onto `trace`.
fn nelder_mead<F: Fn(Point) -> f64>(
    f: F,
    start: Point,
    step_x: f64,
    step_y: f64,
    iters: usize,
    trace: &mut Vec<(Point, f64)>,
) {
    let mut simplex = [
        start,
        Point::new(start.x + step_x, start.y),
        Point::new(start.x, start.y + step_y),
    ];
    let mut vals = simplex.map(&f);
    for _ in 0..iters {
        // Sort descending: best first.
        let mut order = [0, 1, 2];
        order.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]));
        simplex = order.map(|i| simplex[i]);
        vals = order.map(|i| vals[i]);
        trace.push((simplex[0], vals[0]));

        let size = (simplex[1] - simplex[0]).norm().max((simplex[2] - simplex[0]).norm());
        if size < 1e-10 || (vals[0] - vals[2]).abs() < 1e-15 && size < 1e-6 {
            break;
        }

        let c = Point::new(0.5 * (simplex[0].x + simplex[1].x), 0.5 * (simplex[0].y + simplex[1].y));
        let along = |t: f64| Point::new(c.x + t * (simplex[2].x - c.x), c.y + t * (simplex[2].y - c.y));
        let reflected = along(-1.0);
        let fr = f(reflected);
        if fr > vals[0] {
            let expanded = along(-2.0);
            let fe = f(expanded);
            if fe > fr {
                simplex[2] = expanded;
                vals[2] = fe;
            } else {
                simplex[2] = reflected;
                vals[2] = fr;
            }
        } else if fr > vals[1] {
            simplex[2] = reflected;
            vals[2] = fr;
        } else {
            let contracted = if fr > vals[2] { along(-0.5) } else { along(0.5) };
            let fc = f(contracted);
            if fc > vals[2].max(fr) {
                simplex[2] = contracted;
                vals[2] = fc;
            } else {
                // Shrink toward the best vertex.
                for k in 1..3 {
                    simplex[k] = Point::new(
                        0.5 * (simplex[0].x + simplex[k].x),
                        0.5 * (simplex[0].y + simplex[k].y),
                    );
                    vals[k] = f(simplex[k]);
                }
            }
        }
    }
    let mut best = 0;
    for k in 1..3 {
        if vals[k] > vals[best] {
            best = k;
        }
    }
    trace.push((simplex[best], vals[best]));
}

/// `triangle_probability` on the barycentric lattice `(i, j, k)/steps` with
/// `i + j + k = steps`, interior points only.
pub fn barycentric_sweep(steps: usize) -> Result<Vec<(BarycentricPoint, f64)>> {
    let mut out = Vec::new();
    let s = steps as f64;
    for i in 1..steps {
        for j in 1..steps - i {
            let k = steps - i - j;
            let p = BarycentricPoint::new(i as f64 / s, j as f64 / s, k as f64 / s)?;
            out.push((p, triangle_probability(p)?));
        }
    }
    Ok(out)
}

/// Lower and upper envelopes as functions of `h` alone, for
/// plotting: `(lower(h), upper(h))`.
pub fn bound_envelope(h: f64) -> (f64, f64) {
    let r = BoundsReport::from_h(h, 0.0);
    (r.lower, r.upper)
}
