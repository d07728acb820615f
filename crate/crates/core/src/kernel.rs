//! Containment probability from an angular density.
//!
//! With `G` the cumulative mass of the density and `H(θ) = G(θ+π) − G(θ)` the
//! mass on one side of the chord through the anchor, the probability that a
//! random triangle covers the anchor is
//!
//! ```text
//! P = 1/4 − 3 ∮ (1/2 − H(θ))² f(θ) dθ
//! ```
//!
//! which is the production formula here. Three half-turn variants anchored at
//! a starting direction `u` and a direct double integral over pairs of
//! directions are kept as cross-checks.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{self, Options, Panel};
use crate::region::{angular_density, wrap_angle, AnchorPoint, AngularDensity, Region};

/// Default absolute tolerance on `P`.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

/// Absolute tolerance for the cumulative mass `G`.
const MASS_TOLERANCE: f64 = 1e-13;

/// Smallest tolerance on `P` the kernel accepts. The tabulated `G` carries
/// about `MASS_TOLERANCE` of error, so tighter requests cannot be honoured.
pub const MIN_TOLERANCE: f64 = 1e-14;

fn check_tolerance(tol: f64) -> Result<()> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    if tol < MIN_TOLERANCE {
        return Err(Error::Quadrature {
            tolerance: tol,
            estimate: MIN_TOLERANCE,
        });
    }
    Ok(())
}

/// How a [`ProbabilityResult`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    QuadratureEq15,
    QuadratureEq12,
    QuadratureEq14,
    DoubleIntegral,
    MonteCarlo,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::QuadratureEq15 => "quadrature_eq15",
            Method::QuadratureEq12 => "quadrature_eq12",
            Method::QuadratureEq14 => "quadrature_eq14",
            Method::DoubleIntegral => "double_integral",
            Method::MonteCarlo => "monte_carlo",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityResult {
    /// Probability clamped to `[0, 1/4]`.
    pub value: f64,
    /// Value before clamping.
    pub raw_value: f64,
    pub method: Method,
    pub error_estimate: f64,
}

impl ProbabilityResult {
    fn clamped(raw: f64, method: Method, error_estimate: f64) -> Self {
        Self {
            value: raw.clamp(0.0, 0.25),
            raw_value: raw,
            method,
            error_estimate,
        }
    }
}

/// Cumulative mass `G` and half-turn mass `H` of a density.
///
/// `G` is tabulated at the ends of adaptively refined panels and evaluated in
/// between with one fixed Gauss–Legendre rule, so `G(θ)` costs one panel
/// rule. `G` is unwrapped periodically, `G(θ + 2π) = G(θ) + 1`, which makes
/// `H(θ) + H(θ + π) = 1` hold to round-off.
#[derive(Debug, Clone)]
pub struct MassProfile {
    density: AngularDensity,
    nodes: Vec<f64>,
    cumulative: Vec<f64>,
    total: f64,
    error: f64,
}

impl MassProfile {
    pub fn new(f: &AngularDensity) -> Result<Self> {
        Self::with_tolerance(f, MASS_TOLERANCE)
    }

    pub fn with_tolerance(f: &AngularDensity, tol: f64) -> Result<Self> {
        let opts = Options {
            abs_tol: tol,
            max_panels: 50_000,
            min_width: 1e-13,
        };
        let panels = quadrature::panels(&|t| f.eval(t), 0.0, TAU, f.breakpoints(), opts)?;
        let mut nodes = Vec::with_capacity(panels.len() + 1);
        let mut cumulative = Vec::with_capacity(panels.len() + 1);
        let mut acc = 0.0;
        nodes.push(0.0);
        cumulative.push(0.0);
        for p in &panels {
            acc += p.value;
            nodes.push(p.b);
            cumulative.push(acc);
        }
        let total = acc;
        if !(total > 0.0) {
            return Err(Error::DegenerateRegion("density has zero mass".into()));
        }
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Consistency(format!(
                "density integrates to {total}, expected 1"
            )));
        }
        for c in &mut cumulative {
            *c /= total;
        }
        let error = panels.iter().map(|p: &Panel| p.error).sum();
        Ok(Self {
            density: f.clone(),
            nodes,
            cumulative,
            total,
            error,
        })
    }

    pub fn density(&self) -> &AngularDensity {
        &self.density
    }

    /// Density rescaled by the same total as `G`.
    pub fn f(&self, theta: f64) -> f64 {
        self.density.eval(theta) / self.total
    }

    /// Error estimate of the tabulated `G`.
    pub fn mass_error(&self) -> f64 {
        self.error
    }

    /// Cumulative mass from angle 0, unwrapped over all reals.
    pub fn g(&self, theta: f64) -> f64 {
        let turns = (theta / TAU).floor();
        let mut phi = theta - turns * TAU;
        let mut turns = turns;
        if phi >= TAU {
            phi -= TAU;
            turns += 1.0;
        }
        if phi < 0.0 {
            phi = 0.0;
        }
        let i = self.nodes.partition_point(|&n| n <= phi).saturating_sub(1);
        let i = i.min(self.nodes.len() - 2);
        let a = self.nodes[i];
        let partial = if phi > a {
            quadrature::fixed(&|t| self.density.eval(t), a, phi) / self.total
        } else {
            0.0
        };
        self.cumulative[i] + partial + turns
    }

    /// Mass of the wedge swept counterclockwise from `from` to `to`
    /// (`to ≥ from`).
    pub fn wedge(&self, from: f64, to: f64) -> f64 {
        self.g(to) - self.g(from)
    }

    /// Area fraction to the left of the directed chord at angle `theta`.
    pub fn h(&self, theta: f64) -> f64 {
        self.g(theta + PI) - self.g(theta)
    }

    /// Breakpoints of the density together with their antipodes: the angles
    /// where `H` and the kernel integrands may kink.
    pub fn kinks(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for &b in self.density.breakpoints() {
            out.push(wrap_angle(b));
            out.push(wrap_angle(b + PI));
        }
        out.sort_by(f64::total_cmp);
        out.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
        out
    }

    /// Kinks lifted into `(lo, hi)`.
    fn kinks_in(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut out = Vec::new();
        for k in self.kinks() {
            let mut x = k + ((lo - k) / TAU).ceil() * TAU;
            while x < hi {
                if x > lo {
                    out.push(x);
                }
                x += TAU;
            }
        }
        out.sort_by(f64::total_cmp);
        out
    }

    fn integrate<F: Fn(f64) -> f64>(&self, g: F, lo: f64, hi: f64, tol: f64) -> Result<quadrature::Integral> {
        let opts = Options {
            abs_tol: tol,
            max_panels: 20_000,
            min_width: 1e-13,
        };
        quadrature::integrate(&g, lo, hi, &self.kinks_in(lo, hi), opts)
    }
}

/// Tabulate `G` and `H` for a density.
pub fn mass_profile(f: &AngularDensity) -> Result<MassProfile> {
    MassProfile::new(f)
}

/// `P = 1/4 − 3 ∮ (1/2 − H)² f`, to [`DEFAULT_TOLERANCE`].
pub fn probability(f: &AngularDensity) -> Result<ProbabilityResult> {
    probability_with_tolerance(f, DEFAULT_TOLERANCE)
}

pub fn probability_with_tolerance(f: &AngularDensity, tol: f64) -> Result<ProbabilityResult> {
    let profile = MassProfile::new(f)?;
    probability_from_profile(&profile, tol)
}

pub fn probability_from_profile(profile: &MassProfile, tol: f64) -> Result<ProbabilityResult> {
    check_tolerance(tol)?;
    let integral = profile.integrate(
        |t| {
            let d = 0.5 - profile.h(t);
            d * d * profile.f(t)
        },
        0.0,
        TAU,
        tol / 3.0,
    )?;
    let raw = 0.25 - 3.0 * integral.value;
    Ok(ProbabilityResult::clamped(
        raw,
        Method::QuadratureEq15,
        3.0 * integral.error + 3.0 * profile.mass_error(),
    ))
}

/// Probability of covering `anchor` with a triangle drawn from `region`.
pub fn probability_of(region: &Region, anchor: AnchorPoint) -> Result<ProbabilityResult> {
    probability(&angular_density(region, anchor)?)
}

/// The two half-turn formulas started at direction `u`:
///
/// ```text
/// P = −x²(3 − 2x) + 6 ∫_u^{u+π} H(1 − H) f
///   = 1/4 − (1 − 2x)³/4 − 6 ∫_u^{u+π} (1/2 − H)² f,    x = H(u)
/// ```
///
/// Both are evaluated; a disagreement beyond ten times their combined error
/// is reported as [`Error::Consistency`].
pub fn probability_via_u(f: &AngularDensity, u: f64) -> Result<ProbabilityResult> {
    let profile = MassProfile::new(f)?;
    probability_via_u_from_profile(&profile, u, DEFAULT_TOLERANCE)
}

pub fn probability_via_u_from_profile(
    profile: &MassProfile,
    u: f64,
    tol: f64,
) -> Result<ProbabilityResult> {
    let forms = half_turn_forms(profile, u, tol)?;
    // Round-off floor: the two forms are algebraically identical.
    let allowed = (10.0 * forms.error).max(1e-12);
    if (forms.balanced - forms.deviation).abs() > allowed {
        return Err(Error::Consistency(format!(
            "half-turn forms at u={}: {} vs {}",
            forms.u, forms.balanced, forms.deviation
        )));
    }
    Ok(ProbabilityResult::clamped(
        forms.balanced,
        Method::QuadratureEq12,
        forms.balanced_error,
    ))
}

/// Both half-turn formulas at one starting direction, unclamped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfTurnForms {
    /// Starting direction, wrapped into `[0, 2π)`.
    pub u: f64,
    /// `−x²(3 − 2x) + 6 ∫ H(1 − H) f`.
    pub balanced: f64,
    /// `1/4 − (1 − 2x)³/4 − 6 ∫ (1/2 − H)² f`.
    pub deviation: f64,
    pub balanced_error: f64,
    /// Combined error bound of both forms.
    pub error: f64,
}

pub fn half_turn_forms(profile: &MassProfile, u: f64, tol: f64) -> Result<HalfTurnForms> {
    check_tolerance(tol)?;
    let u = wrap_angle(u);
    let x = profile.h(u);
    let balanced = profile.integrate(
        |t| {
            let h = profile.h(t);
            h * (1.0 - h) * profile.f(t)
        },
        u,
        u + PI,
        tol / 6.0,
    )?;
    let deviation = profile.integrate(
        |t| {
            let d = 0.5 - profile.h(t);
            d * d * profile.f(t)
        },
        u,
        u + PI,
        tol / 6.0,
    )?;
    Ok(HalfTurnForms {
        u,
        balanced: -x * x * (3.0 - 2.0 * x) + 6.0 * balanced.value,
        deviation: 0.25 - (1.0 - 2.0 * x).powi(3) / 4.0 - 6.0 * deviation.value,
        balanced_error: 6.0 * balanced.error + 6.0 * profile.mass_error(),
        error: 6.0 * (balanced.error + deviation.error) + 12.0 * profile.mass_error(),
    })
}

/// A direction `u*` with `H(u*) = 1/2` (to `1e-12`).
///
/// `H(θ) − 1/2` and `H(θ + π) − 1/2` have opposite signs, so bisection on
/// `[0, π]` always brackets a root. Returns 0 when `H(0)` is already 1/2.
pub fn find_median_angle(profile: &MassProfile) -> f64 {
    let d = |t: f64| profile.h(t) - 0.5;
    let d0 = d(0.0);
    if d0.abs() <= 1e-12 {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0, PI);
    let (mut best, mut best_abs) = (0.0, d0.abs());
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let dm = d(mid);
        if dm.abs() < best_abs {
            best = mid;
            best_abs = dm.abs();
        }
        if dm.abs() <= 1e-14 || mid <= lo || mid >= hi {
            break;
        }
        if (dm > 0.0) == (d0 > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    best
}

/// `P = 1/4 − 6 ∫_{u*}^{u*+π} (1/2 − H)² f` with `u*` from
/// [`find_median_angle`].
pub fn probability_eq14(f: &AngularDensity) -> Result<ProbabilityResult> {
    let profile = MassProfile::new(f)?;
    probability_eq14_from_profile(&profile, DEFAULT_TOLERANCE)
}

pub fn probability_eq14_from_profile(profile: &MassProfile, tol: f64) -> Result<ProbabilityResult> {
    check_tolerance(tol)?;
    let u = find_median_angle(profile);
    let deviation = profile.integrate(
        |t| {
            let d = 0.5 - profile.h(t);
            d * d * profile.f(t)
        },
        u,
        u + PI,
        tol / 6.0,
    )?;
    let raw = 0.25 - 6.0 * deviation.value;
    Ok(ProbabilityResult::clamped(
        raw,
        Method::QuadratureEq14,
        6.0 * deviation.error + 6.0 * profile.mass_error(),
    ))
}

/// Slow oracle: `P = ∬ Area(R_st) f(s) f(t) ds dt`, where `R_st` is the part of
/// the region inside the convex angle between the reversed directions `s+π`
/// and `t+π`.
///
/// Midpoint tensor rule on `n_panels` and `2·n_panels` cells, each cell
/// weighted by its exact mass under `f`, combined by
/// Richardson extrapolation; the error estimate is the extrapolation
/// correction. On the line `t = s + π` the wedge area jumps between `H` and
/// `1 − H`; cells centered there use the mean, 1/2.
pub fn probability_double_integral(
    region: &Region,
    anchor: AnchorPoint,
    n_panels: usize,
) -> Result<ProbabilityResult> {
    if n_panels < 64 {
        return Err(Error::Domain(format!(
            "double integral needs at least 64 panels, got {n_panels}"
        )));
    }
    let n = n_panels + n_panels % 2;
    let profile = MassProfile::new(&angular_density(region, anchor)?)?;
    let coarse = midpoint_tensor(&profile, n);
    let fine = midpoint_tensor(&profile, 2 * n);
    let extrapolated = fine + (fine - coarse) / 3.0;
    Ok(ProbabilityResult::clamped(
        extrapolated,
        Method::DoubleIntegral,
        (fine - coarse).abs() / 3.0,
    ))
}

fn midpoint_tensor(profile: &MassProfile, n: usize) -> f64 {
    use rayon::prelude::*;

    let h = TAU / n as f64;
    let half = n / 2;
    let theta: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) * h).collect();
    // Cell masses rather than f at the midpoint, so jumps of f inside a cell
    // do not spoil the second-order rule.
    let edges: Vec<f64> = (0..=n).map(|i| profile.g(i as f64 * h)).collect();
    let mass: Vec<f64> = edges.windows(2).map(|w| w[1] - w[0]).collect();
    let g: Vec<f64> = theta.iter().map(|&t| profile.g(t)).collect();
    // Unwrapped G at midpoint index k ≥ 0.
    let gu = |k: usize| g[k % n] + (k / n) as f64;

    let rows: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let base = i + half;
            let g_base = gu(base);
            let mut row = 0.0;
            for d in 1..n {
                let area = if d < half {
                    gu(base + d) - g_base
                } else if d > half {
                    1.0 + g_base - gu(base + d)
                } else {
                    0.5
                };
                row += area * mass[(i + d) % n];
            }
            row * mass[i]
        })
        .collect();
    quadrature::pairwise_sum(&rows)
}

/// Global minimum `h` of `H` over all directions, in `[0, 1/2]`.
pub fn min_half_mass(profile: &MassProfile) -> f64 {
    let (_, v) = minimize_periodic(|t| profile.h(t), &profile.kinks(), 2048);
    v.clamp(0.0, 0.5)
}

/// Minimize a 2π-periodic function: sample on a uniform grid plus `extra`
/// angles, then golden-section refine around every sampled local minimum
/// that is close to the best sample.
pub(crate) fn minimize_periodic<F: Fn(f64) -> f64>(func: F, extra: &[f64], grid: usize) -> (f64, f64) {
    let mut ts: Vec<f64> = (0..grid).map(|k| TAU * k as f64 / grid as f64).collect();
    ts.extend(extra.iter().map(|&t| wrap_angle(t)));
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    let vs: Vec<f64> = ts.iter().map(|&t| func(t)).collect();
    let m = ts.len();
    let (mut best_t, mut best_v) = (ts[0], vs[0]);
    for (t, v) in ts.iter().zip(&vs) {
        if *v < best_v {
            best_t = *t;
            best_v = *v;
        }
    }
    let cutoff = best_v + 1e-6;
    for i in 0..m {
        let prev = vs[(i + m - 1) % m];
        let next = vs[(i + 1) % m];
        if vs[i] > cutoff || vs[i] > prev || vs[i] > next {
            continue;
        }
        let lo = if i == 0 { ts[m - 1] - TAU } else { ts[i - 1] };
        let hi = if i + 1 == m { ts[0] + TAU } else { ts[i + 1] };
        let (t, v) = golden_section(&func, lo, hi);
        if v < best_v {
            best_t = wrap_angle(t);
            best_v = v;
        }
    }
    (best_t, best_v)
}

pub(crate) fn golden_section<F: Fn(f64) -> f64>(func: &F, mut a: f64, mut b: f64) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (func(c), func(d));
    for _ in 0..200 {
        if b - a <= 1e-13 {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = func(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = func(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::region::Point;

    fn limacon(a: f64) -> AngularDensity {
        angular_density(&Region::limacon(a).unwrap(), Point::ORIGIN).unwrap()
    }

    #[test]
    fn unreachable_tolerance_is_a_numerical_error() {
        let f = limacon(2.0);
        assert!(matches!(probability_with_tolerance(&f, 1e-300), Err(Error::Quadrature { .. })));
        assert!(matches!(probability_with_tolerance(&f, 0.0), Err(Error::Domain(_))));
        let profile = mass_profile(&f).unwrap();
        assert!(matches!(probability_eq14_from_profile(&profile, 1e-20), Err(Error::Quadrature { .. })));
        assert!(matches!(half_turn_forms(&profile, 0.3, 1e-20), Err(Error::Quadrature { .. })));
        assert!(probability_from_profile(&profile, 1e-12).is_ok());
    }

    #[test]
    fn disk_half_mass_is_one_half() {
        let p = mass_profile(&angular_density(&Region::disk(), Point::ORIGIN).unwrap()).unwrap();
        for k in 0..20 {
            assert!((p.h(k as f64 * 0.37) - 0.5).abs() < 1e-14);
        }
        assert_eq!(find_median_angle(&p), 0.0);
        assert!((min_half_mass(&p) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn limacon_half_mass_closed_form() {
        let a = 2.0;
        let p = mass_profile(&limacon(a)).unwrap();
        for k in 0..40 {
            let t = k as f64 * PI / 40.0;
            let expect = 4.0 * a * t.sin() / ((2.0 * a * a + 1.0) * PI);
            assert!(((0.5 - p.h(t)) - expect).abs() < 1e-13, "t={t}");
        }
        assert_eq!(find_median_angle(&p), 0.0);
    }

    #[test]
    fn limacon_min_half_mass() {
        for &a in &[1.0, 2.0, 3.0] {
            let p = mass_profile(&limacon(a)).unwrap();
            let expect = 0.5 - 4.0 * a / ((2.0 * a * a + 1.0) * PI);
            assert!((min_half_mass(&p) - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn g_is_unwrapped() {
        let p = mass_profile(&limacon(1.5)).unwrap();
        assert!(p.g(0.0).abs() < 1e-15);
        assert!((p.g(TAU) - 1.0).abs() < 1e-15);
        assert!((p.g(1.0 + TAU) - p.g(1.0) - 1.0).abs() < 1e-14);
        assert!((p.g(-1.0) - p.g(TAU - 1.0) + 1.0).abs() < 1e-14);
    }

    #[test]
    fn limacon_probabilities() {
        let f = limacon(2.0);
        let expect = 0.25 - 272.0 / (243.0 * PI * PI);
        let p15 = probability(&f).unwrap();
        assert_eq!(p15.method, Method::QuadratureEq15);
        assert!((p15.value - expect).abs() < 1e-10);
        let p14 = probability_eq14(&f).unwrap();
        assert!((p14.value - expect).abs() < 1e-10);
        let p12 = probability_via_u(&f, 1.0).unwrap();
        assert!((p12.value - expect).abs() < 1e-10);
    }

    #[test]
    fn symmetric_density_gives_one_quarter() {
        let f = AngularDensity::from_fn(|t| (2.0 + (2.0 * t).cos()) / (4.0 * PI), vec![]);
        assert!((probability(&f).unwrap().value - 0.25).abs() < 1e-12);
    }

    #[test]
    fn clamping_keeps_raw_value() {
        let r = ProbabilityResult::clamped(0.25 + 1e-14, Method::QuadratureEq15, 0.0);
        assert_eq!(r.value, 0.25);
        assert!(r.raw_value > 0.25);
    }

    #[test]
    fn double_integral_rejects_coarse_grids() {
        assert!(matches!(
            probability_double_integral(&Region::disk(), Point::ORIGIN, 16),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn double_integral_disk() {
        let r = probability_double_integral(&Region::disk(), Point::ORIGIN, 256).unwrap();
        assert!((r.value - 0.25).abs() < 1e-6, "{r:?}");
    }

    #[test]
    fn golden_section_finds_parabola_minimum() {
        let (t, v) = golden_section(&|x: f64| (x - 0.3).powi(2) + 1.0, 0.0, 1.0);
        assert!((t - 0.3).abs() < 1e-6 && (v - 1.0).abs() < 1e-12);
    }
}
