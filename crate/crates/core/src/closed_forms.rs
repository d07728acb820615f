//! Exact and semi-exact coverage probabilities for the worked families:
//! limaçons, regular polygons, triangles in barycentric coordinates, the
//! square, the sliced disk and the disk with an off-center anchor.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{self, Options};

/// Areal coordinates of a point in a triangle: the distance to each side
/// over the matching altitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BarycentricPoint {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl BarycentricPoint {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        let coords = [alpha, beta, gamma];
        if coords.iter().any(|c| !c.is_finite() || *c < -1e-12 || *c > 1.0 + 1e-12) {
            return Err(Error::Domain(format!(
                "barycentric coordinates ({alpha}, {beta}, {gamma}) outside [0, 1]"
            )));
        }
        if (alpha + beta + gamma - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!(
                "barycentric coordinates sum to {}",
                alpha + beta + gamma
            )));
        }
        Ok(Self {
            alpha: alpha.clamp(0.0, 1.0),
            beta: beta.clamp(0.0, 1.0),
            gamma: gamma.clamp(0.0, 1.0),
        })
    }

    pub fn centroid() -> Self {
        Self {
            alpha: 1.0 / 3.0,
            beta: 1.0 / 3.0,
            gamma: 1.0 / 3.0,
        }
    }

    pub fn is_interior(&self) -> bool {
        self.alpha > 0.0 && self.beta > 0.0 && self.gamma > 0.0
    }
}

/// `1/4 − 12a²(4a²+1) / ((2a²+1)³π²)` for the unit-area limaçon
/// `r ∝ a + cos θ` about its pole.
pub fn limacon_probability(a: f64) -> Result<f64> {
    if !(a >= 1.0) || a.is_nan() {
        return Err(Error::Domain(format!("limaçon needs a ≥ 1, got {a}")));
    }
    if a.is_infinite() {
        return Ok(0.25);
    }
    let a2 = a * a;
    let d = 2.0 * a2 + 1.0;
    Ok(0.25 - 12.0 * (a2 / d) * ((4.0 * a2 + 1.0) / d) / (d * PI * PI))
}

/// Regular polygon with `2m + 1` vertices, anchor at the center.
///
/// With `a = cos²(π/(2m+1))`:
///
/// ```text
/// P = 1/4 − (1 + 9a − 9a² − a³ + 6a(1+a) ln a) / (4 (2m+1)² (1−a)³)
/// ```
///
/// The numerator is `O((1−a)⁵)`, so for small `1 − a` the same quantity is
/// taken from the power series of the underlying integral
/// `∫₀¹ e² s²(1−s)² / (1 − e(1−s))² ds`, `e = 1 − a`.
pub fn regular_polygon_probability(m: u64) -> Result<f64> {
    if m == 0 {
        return Err(Error::Domain("regular polygon needs m ≥ 1".into()));
    }
    let n = 2.0 * m as f64 + 1.0;
    let e = (PI / n).sin().powi(2);
    if e >= 0.05 {
        let a = 1.0 - e;
        let num = 1.0 + 9.0 * a - 9.0 * a * a - a.powi(3) + 6.0 * a * (1.0 + a) * a.ln();
        Ok(0.25 - num / (4.0 * n * n * e.powi(3)))
    } else {
        Ok(0.25 - 3.0 / (4.0 * n * n) * polygon_deficit_series(e))
    }
}

/// `Σ_k 2(k+1) e^{k+2} / ((k+3)(k+4)(k+5))`.
fn polygon_deficit_series(e: f64) -> f64 {
    let mut sum = 0.0;
    let mut pow = e * e;
    for k in 0..400 {
        let kf = k as f64;
        let term = 2.0 * (kf + 1.0) * pow / ((kf + 3.0) * (kf + 4.0) * (kf + 5.0));
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
        pow *= e;
    }
    sum
}

/// Antiderivative of `(α+u)²/u − γ(α+u)⁴/u²`.
fn triangle_antiderivative(alpha: f64, gamma: f64, u: f64) -> f64 {
    let a = alpha;
    let log_terms = if a > 0.0 {
        (a * a - 4.0 * gamma * a.powi(3)) * u.ln() + gamma * a.powi(4) / u
    } else {
        0.0
    };
    log_terms + 2.0 * a * u + 0.5 * u * u
        - gamma * (6.0 * a * a * u + 2.0 * a * u * u + u.powi(3) / 3.0)
}

fn triangle_limits(alpha: f64, gamma: f64) -> (f64, f64) {
    (alpha * gamma / (1.0 - gamma), 1.0 - alpha)
}

/// `I(α, γ) = γ² ∫_{αγ/(1−γ)}^{1−α} ((α+u)²/u − γ(α+u)⁴/u²) du`, closed form.
pub fn triangle_integral(alpha: f64, gamma: f64) -> f64 {
    if gamma <= 0.0 || gamma >= 1.0 {
        return 0.0;
    }
    let (lo, hi) = triangle_limits(alpha, gamma);
    if hi <= lo {
        return 0.0;
    }
    gamma
        * gamma
        * (triangle_antiderivative(alpha, gamma, hi) - triangle_antiderivative(alpha, gamma, lo))
}

/// Same integral as [`triangle_integral`] by adaptive quadrature.
pub fn triangle_integral_quadrature(alpha: f64, gamma: f64) -> Result<f64> {
    if gamma <= 0.0 || gamma >= 1.0 {
        return Ok(0.0);
    }
    let (lo, hi) = triangle_limits(alpha, gamma);
    if hi <= lo {
        return Ok(0.0);
    }
    let integrand = |u: f64| {
        let s = alpha + u;
        s * s / u - gamma * s.powi(4) / (u * u)
    };
    let r = quadrature::integrate(&integrand, lo, hi, &[], Options::with_tol(1e-15))?;
    Ok(gamma * gamma * r.value)
}

/// Triangle with the anchor at barycentric coordinates `(α, β, γ)`:
///
/// ```text
/// P = 6(I(α,γ) + I(β,γ) + I(β,α)) − γ²(3 − 3α − 2γ)/(1 − α)³
/// ```
///
/// Independent of the triangle's shape. Points on the boundary give 0.
pub fn triangle_probability(p: BarycentricPoint) -> Result<f64> {
    let BarycentricPoint { alpha, beta, gamma } = p;
    if !p.is_interior() {
        return Ok(0.0);
    }
    let sum = triangle_integral(alpha, gamma) + triangle_integral(beta, gamma) + triangle_integral(beta, alpha);
    let x = gamma / (1.0 - alpha);
    Ok(6.0 * sum - x * x * (3.0 - 2.0 * x))
}

/// Unit square `[0,1]²` with anchor `(u, v)`.
///
/// The anchor is first moved by the square's symmetries into
/// `0 < v ≤ u ≤ 1/2`; there `P = 6(I₁+I₂+I₃+I₄) − v²(3u − v)/(4u³)` with the
/// four side integrals evaluated by adaptive quadrature. Anchors on the
/// boundary give the limit 0.
pub fn square_probability(u: f64, v: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&u) || !(0.0..=1.0).contains(&v) {
        return Err(Error::Domain(format!("anchor ({u}, {v}) outside the unit square")));
    }
    let (u, v) = reduce_square(u, v);
    if v == 0.0 {
        return Ok(0.0);
    }
    let opts = Options::with_tol(1e-14);
    let x1 = (u - v) / (1.0 - v);
    let x2 = u / (1.0 - v);
    let i1 = quadrature::integrate(
        &|x: f64| {
            let h = v * (1.0 - x).powi(2) / (2.0 * (u - x));
            0.5 * v * h * (1.0 - h)
        },
        0.0,
        x1,
        &[],
        opts,
    )?;
    let i2 = quadrature::integrate(
        &|x: f64| {
            let h = (2.0 * v * x + u - x) / (2.0 * v);
            0.5 * v * h * (1.0 - h)
        },
        x1,
        x2,
        &[],
        opts,
    )?;
    let i3 = quadrature::integrate(
        &|x: f64| {
            let h = v * x * x / (2.0 * (x - u));
            0.5 * v * h * (1.0 - h)
        },
        x2,
        1.0,
        &[],
        opts,
    )?;
    let i4 = quadrature::integrate(
        &|y: f64| {
            let h = (v + y * (1.0 - 2.0 * u)) / (2.0 * (1.0 - u));
            0.5 * (1.0 - u) * h * (1.0 - h)
        },
        0.0,
        v / u,
        &[],
        opts,
    )?;
    let sides = quadrature::pairwise_sum(&[i1.value, i2.value, i3.value, i4.value]);
    Ok(6.0 * sides - v * v * (3.0 * u - v) / (4.0 * u.powi(3)))
}

/// Map `(u, v)` into the fundamental domain `0 ≤ v ≤ u ≤ 1/2`.
fn reduce_square(u: f64, v: f64) -> (f64, f64) {
    let u = u.min(1.0 - u);
    let v = v.min(1.0 - v);
    if v <= u {
        (u, v)
    } else {
        (v, u)
    }
}

/// Anchor on the diagonal of the unit square, `(u, u)` with `0 < u ≤ 1/2`:
///
/// ```text
/// P = 1/4 − (1−2u)(1−2u²)(1+u−6u³)/(4(1−u)) + 3u⁴(1−2u²) ln((1−u)/u)
/// ```
pub fn square_diagonal_probability(u: f64) -> Result<f64> {
    if !(u > 0.0 && u <= 0.5) {
        return Err(Error::Domain(format!("diagonal anchor needs 0 < u ≤ 1/2, got {u}")));
    }
    let u2 = u * u;
    Ok(0.25 - (1.0 - 2.0 * u) * (1.0 - 2.0 * u2) * (1.0 + u - 6.0 * u2 * u) / (4.0 * (1.0 - u))
        + 3.0 * u2 * u2 * (1.0 - 2.0 * u2) * ((1.0 - u) / u).ln())
}

/// Disk with the wedge `|θ| < πa` removed, anchor at the center:
/// `(1+a)(1−2a)² / (4(1−a)³)`.
pub fn slice_disk_probability(a: f64) -> Result<f64> {
    if !(0.0..=0.5).contains(&a) {
        return Err(Error::Domain(format!("slice fraction a={a} outside [0, 1/2]")));
    }
    Ok((1.0 + a) * (1.0 - 2.0 * a).powi(2) / (4.0 * (1.0 - a).powi(3)))
}

fn offset_disk_integrand(r: f64, t: f64) -> f64 {
    let (s, c) = t.sin_cos();
    let q = 1.0 - 2.0 * r * c + r * r;
    let arg = (r * s / q.sqrt()).clamp(-1.0, 1.0);
    let bracket = 0.5 - arg.acos() / PI + r * (1.0 - r * c) * s / (PI * q);
    bracket * bracket * (1.0 - r * c)
}

/// Disk with the anchor at distance `rR` from the center (`R` the radius):
///
/// ```text
/// P_r = 1/4 − (3/π) ∫₀^π [1/2 − arccos(r sin t/√q)/π + r(1 − r cos t) sin t/(πq)]² (1 − r cos t) dt
/// ```
///
/// with `q = 1 − 2r cos t + r²`, by adaptive quadrature.
pub fn offset_disk_probability(r: f64) -> Result<f64> {
    offset_disk_probability_with_tolerance(r, 1e-12)
}

fn offset_disk_probability_with_tolerance(r: f64, tol: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::Domain(format!("offset fraction r={r} outside [0, 1)")));
    }
    if r == 0.0 {
        return Ok(0.25);
    }
    let i = quadrature::integrate(
        &|t| offset_disk_integrand(r, t),
        0.0,
        PI,
        &[],
        Options::with_tol(tol * PI / 3.0),
    )?;
    Ok(0.25 - 3.0 / PI * i.value)
}

/// Average of [`offset_disk_probability`] over all anchors in the disk,
/// `2 ∫₀¹ P_r r dr`, with the reference value `35/(48π²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskAverage {
    pub value: f64,
    pub reference: f64,
}

pub fn offset_disk_average() -> Result<DiskAverage> {
    let failure = std::cell::RefCell::new(None);
    let outer = quadrature::integrate(
        &|r: f64| match offset_disk_probability_with_tolerance(r, 1e-12) {
            Ok(p) => 2.0 * p * r,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        },
        0.0,
        1.0,
        &[],
        Options::with_tol(1e-10),
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(DiskAverage {
        value: outer?.value,
        reference: 35.0 / (48.0 * PI * PI),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn centroid_value() -> f64 {
        2.0 / 27.0 + 20.0 * 2f64.ln() / 81.0
    }

    #[test]
    fn limacon_values() {
        let p1 = limacon_probability(1.0).unwrap();
        assert!((p1 - (0.25 - 20.0 / (9.0 * PI * PI))).abs() < 1e-15);
        assert!((p1 - 0.0248418142).abs() < 1e-10);
        let p2 = limacon_probability(2.0).unwrap();
        assert!((p2 - (0.25 - 272.0 / (243.0 * PI * PI))).abs() < 1e-15);
        let big = limacon_probability(1e6).unwrap();
        assert!(big < 0.25 && 0.25 - big < 1e-11);
        assert!(matches!(limacon_probability(0.5), Err(Error::Domain(_))));
    }

    #[test]
    fn regular_polygon_values() {
        let tri = regular_polygon_probability(1).unwrap();
        assert!((tri - centroid_value()).abs() < 1e-12);
        let penta = regular_polygon_probability(2).unwrap();
        assert!((penta - 0.24982224).abs() < 5e-9);
        let exact_penta = ((990.0 + 438.0 * 5f64.sqrt()) * (5f64.sqrt() - 1.0).ln()
            - 30.0 * (2.0 + 3.0 * 5f64.sqrt()))
            / 625.0;
        assert!((penta - exact_penta).abs() < 1e-13);
        let many = regular_polygon_probability(10_000).unwrap();
        assert!(many <= 0.25 && 0.25 - many < 1e-6);
    }

    #[test]
    fn regular_polygon_branches_agree() {
        for m in 1..12u64 {
            let n = 2.0 * m as f64 + 1.0;
            let e = (PI / n).sin().powi(2);
            let a = 1.0 - e;
            let num = 1.0 + 9.0 * a - 9.0 * a * a - a.powi(3) + 6.0 * a * (1.0 + a) * a.ln();
            let closed = 0.25 - num / (4.0 * n * n * e.powi(3));
            let series = 0.25 - 3.0 / (4.0 * n * n) * polygon_deficit_series(e);
            assert!((closed - series).abs() < 1e-12, "m={m}: {closed} vs {series}");
        }
    }

    #[test]
    fn triangle_integral_closed_form_matches_quadrature() {
        for &(a, g) in &[(1.0 / 3.0, 1.0 / 3.0), (1.0 / 6.0, 0.5), (0.3, 0.1), (0.05, 0.9), (0.0, 0.4)] {
            let closed = triangle_integral(a, g);
            let quad = triangle_integral_quadrature(a, g).unwrap();
            assert!((closed - quad).abs() < 1e-12, "I({a},{g}): {closed} vs {quad}");
        }
    }

    #[test]
    fn triangle_values() {
        let c = triangle_probability(BarycentricPoint::centroid()).unwrap();
        assert!((c - centroid_value()).abs() < 1e-14);
        let p = triangle_probability(BarycentricPoint::new(1.0 / 6.0, 1.0 / 3.0, 0.5).unwrap()).unwrap();
        let expect = 1.0 / 27.0 + 41.0 * 5f64.ln() / 972.0 + 17.0 * 2f64.ln() / 243.0;
        assert!((p - expect).abs() < 1e-14);
    }

    #[test]
    fn triangle_boundary_limit() {
        let mut last = f64::INFINITY;
        for k in 1..10 {
            let g = 10f64.powi(-k);
            let p = triangle_probability(
                BarycentricPoint::new((1.0 - g) / 2.0, (1.0 - g) / 2.0, g).unwrap(),
            )
            .unwrap();
            assert!(p < last);
            last = p;
        }
        assert!(last < 1e-6);
        assert_eq!(
            triangle_probability(BarycentricPoint::new(0.5, 0.5, 0.0).unwrap()).unwrap(),
            0.0
        );
    }

    #[test]
    fn barycentric_validation() {
        assert!(BarycentricPoint::new(0.5, 0.6, -0.1).is_err());
        assert!(BarycentricPoint::new(0.5, 0.5, 0.5).is_err());
    }

    #[test]
    fn square_values() {
        let p = square_probability(0.5, 0.25).unwrap();
        assert!((p - (5.0 / 48.0 + 9.0 * 3f64.ln() / 256.0)).abs() < 1e-12);
        let p = square_probability(1.0 / 3.0, 1.0 / 3.0).unwrap();
        assert!((p - (23.0 / 162.0 + 7.0 * 2f64.ln() / 243.0)).abs() < 1e-12);
        assert!((square_probability(0.5, 0.5).unwrap() - 0.25).abs() < 1e-12);
        let e = std::f64::consts::E;
        let u = 1.0 / (1.0 + e);
        // The diagonal formula with ln((1-u)/u) = 1, reduced to a rational function of e.
        let expect = (e.powi(5) + 6.0 * e.powi(4) + 13.0 * e.powi(3) + 7.0 * e * e - 6.0 * e + 1.0)
            / (e * (e + 1.0).powi(6));
        assert!((square_probability(u, u).unwrap() - expect).abs() < 1e-12);
        assert_eq!(square_probability(0.0, 0.3).unwrap(), 0.0);
        assert!(square_probability(1.2, 0.3).is_err());
    }

    #[test]
    fn square_diagonal_matches_general() {
        for &u in &[0.05, 0.1, 0.25, 1.0 / 3.0, 0.45, 0.5] {
            let d = square_diagonal_probability(u).unwrap();
            let g = square_probability(u, u).unwrap();
            assert!((d - g).abs() < 1e-9, "u={u}: {d} vs {g}");
        }
        assert!(square_diagonal_probability(0.6).is_err());
    }

    #[test]
    fn slice_disk_values() {
        assert_eq!(slice_disk_probability(0.0).unwrap(), 0.25);
        assert_eq!(slice_disk_probability(0.5).unwrap(), 0.0);
        // (5/4)(1/4) / (4 · 27/64) = 5/27
        assert!((slice_disk_probability(0.25).unwrap() - 5.0 / 27.0).abs() < 1e-15);
        assert!(slice_disk_probability(0.6).is_err());
    }

    #[test]
    fn offset_disk_values() {
        assert_eq!(offset_disk_probability(0.0).unwrap(), 0.25);
        let half = offset_disk_probability(0.5).unwrap();
        // Published to four digits only.
        assert!((half - 0.1250).abs() < 5e-4, "{half}");
        assert!((half - 0.125050117073).abs() < 1e-11, "{half}");
        let mut last = 0.25;
        for k in 1..50 {
            let p = offset_disk_probability(k as f64 * 0.95 / 49.0).unwrap();
            assert!(p < last);
            last = p;
        }
        let p9 = offset_disk_probability(0.9).unwrap();
        assert!(p9 > 0.0 && p9 < 0.125);
        assert!(offset_disk_probability(1.0).is_err());
    }

    #[test]
    fn offset_disk_average_value() {
        let avg = offset_disk_average().unwrap();
        assert!((avg.value - avg.reference).abs() < 1e-7, "{avg:?}");
    }
}
