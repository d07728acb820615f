//! Planar regions seen from an anchor point, and the angular density they
//! induce.
//!
//! The density `f(θ)` is the pushforward of area to the polar angle about
//! the anchor: `∫_{θ1}^{θ2} f` is the fraction of the region's area lying in
//! the wedge between the two rays. For a ray that meets the region in the
//! intervals `[r_in, r_out]`, `f(θ) = Σ (r_out² − r_in²) / (2·area)`.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::closed_forms::BarycentricPoint;
use crate::error::{Error, Result};
use crate::quadrature::{self, Options};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn angle(self) -> f64 {
        wrap_angle(self.y.atan2(self.x))
    }
}

impl std::ops::Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl std::ops::Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl From<(f64, f64)> for Point {
    fn from((x, y): (f64, f64)) -> Self {
        Point::new(x, y)
    }
}

/// The fixed point whose coverage is measured.
pub type AnchorPoint = Point;

pub(crate) fn cross(a: Point, b: Point) -> f64 {
    a.x * b.y - a.y * b.x
}

pub(crate) fn dot(a: Point, b: Point) -> f64 {
    a.x * b.x + a.y * b.y
}

/// Map an angle to `[0, 2π)`.
pub fn wrap_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t >= TAU {
        0.0
    } else {
        t
    }
}

/// A ray segment `[r_in, r_out]` measured from the anchor.
pub type Interval = (f64, f64);

/// Simple polygon with counterclockwise vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    vertices: Vec<Point>,
}

impl Polygon {
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::InvalidRegion(format!(
                "polygon needs at least 3 vertices, got {}",
                vertices.len()
            )));
        }
        if vertices.iter().any(|v| !v.x.is_finite() || !v.y.is_finite()) {
            return Err(Error::InvalidRegion("non-finite polygon vertex".into()));
        }
        let poly = Self { vertices };
        let area = poly.signed_area();
        let scale = poly.diameter().powi(2);
        if area.abs() <= 1e-14 * scale {
            return Err(Error::DegenerateRegion("polygon has zero area".into()));
        }
        if area < 0.0 {
            return Err(Error::InvalidRegion(
                "polygon vertices must be counterclockwise".into(),
            ));
        }
        if let Some((i, j)) = poly.first_self_intersection() {
            return Err(Error::InvalidRegion(format!(
                "polygon edges {i} and {j} intersect"
            )));
        }
        Ok(poly)
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn signed_area(&self) -> f64 {
        0.5 * self.edges().map(|(p, q)| cross(p, q)).sum::<f64>()
    }

    pub fn centroid(&self) -> Point {
        let (mut cx, mut cy, mut a) = (0.0, 0.0, 0.0);
        let o = self.vertices[0];
        for (p, q) in self.edges() {
            let (p, q) = (p - o, q - o);
            let c = cross(p, q);
            a += c;
            cx += (p.x + q.x) * c;
            cy += (p.y + q.y) * c;
        }
        Point::new(o.x + cx / (3.0 * a), o.y + cy / (3.0 * a))
    }

    fn diameter(&self) -> f64 {
        let (lo, hi) = bbox(&self.vertices);
        (hi - lo).norm()
    }

    fn first_self_intersection(&self) -> Option<(usize, usize)> {
        let n = self.vertices.len();
        let edges: Vec<(Point, Point)> = self.edges().collect();
        for i in 0..n {
            for j in i + 1..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                if adjacent {
                    // Adjacent edges share a vertex; they only conflict when
                    // they fold back onto each other.
                    let (a, b) = edges[i];
                    let (c, d) = edges[j];
                    let (u, v) = (b - a, d - c);
                    if cross(u, v).abs() <= 1e-15 * u.norm() * v.norm() && dot(u, v) < 0.0 {
                        return Some((i, j));
                    }
                    continue;
                }
                if segments_intersect(edges[i].0, edges[i].1, edges[j].0, edges[j].1) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    /// Crossing-number point-in-polygon test.
    pub fn contains(&self, p: Point) -> bool {
        let mut inside = false;
        for (a, b) in self.edges() {
            if (a.y > p.y) != (b.y > p.y) {
                let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
                if p.x < x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    fn distance_to_boundary(&self, p: Point) -> f64 {
        self.edges()
            .map(|(a, b)| segment_distance(p, a, b))
            .fold(f64::INFINITY, f64::min)
    }

    /// Counterclockwise translation copy.
    pub fn translated(&self, dx: f64, dy: f64) -> Polygon {
        Polygon {
            vertices: self
                .vertices
                .iter()
                .map(|v| Point::new(v.x + dx, v.y + dy))
                .collect(),
        }
    }
}

fn segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = b - a;
    let len2 = dot(ab, ab);
    let t = if len2 == 0.0 {
        0.0
    } else {
        (dot(p - a, ab) / len2).clamp(0.0, 1.0)
    };
    (p - Point::new(a.x + t * ab.x, a.y + t * ab.y)).norm()
}

fn segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool {
    let o1 = cross(b - a, c - a);
    let o2 = cross(b - a, d - a);
    let o3 = cross(d - c, a - c);
    let o4 = cross(d - c, b - c);
    if ((o1 > 0.0 && o2 < 0.0) || (o1 < 0.0 && o2 > 0.0))
        && ((o3 > 0.0 && o4 < 0.0) || (o3 < 0.0 && o4 > 0.0))
    {
        return true;
    }
    let on = |p: Point, q: Point, r: Point, o: f64| {
        o == 0.0
            && r.x >= p.x.min(q.x)
            && r.x <= p.x.max(q.x)
            && r.y >= p.y.min(q.y)
            && r.y <= p.y.max(q.y)
    };
    on(a, b, c, o1) || on(a, b, d, o2) || on(c, d, a, o3) || on(c, d, b, o4)
}

fn bbox(points: &[Point]) -> (Point, Point) {
    let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in points {
        lo.x = lo.x.min(p.x);
        lo.y = lo.y.min(p.y);
        hi.x = hi.x.max(p.x);
        hi.y = hi.y.max(p.y);
    }
    (lo, hi)
}

/// Radius function of a user-supplied polar graph.
pub type RadiusFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Ray intersections of a user-supplied radial-slice region.
pub type SlicesFn = Arc<dyn Fn(f64) -> Vec<Interval> + Send + Sync>;

/// Boundary curve `r = r(θ)` about the origin.
#[derive(Clone)]
pub enum PolarCurve {
    Circle { radius: f64 },
    /// `r = c (a + cos θ)` with `c` chosen for unit area; `a = 1` is the
    /// cardioid.
    Limacon { a: f64 },
    Custom {
        name: String,
        radius: RadiusFn,
        breakpoints: Vec<f64>,
        max_radius: f64,
    },
}

impl fmt::Debug for PolarCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolarCurve::Circle { radius } => f.debug_struct("Circle").field("radius", radius).finish(),
            PolarCurve::Limacon { a } => f.debug_struct("Limacon").field("a", a).finish(),
            PolarCurve::Custom { name, .. } => f.debug_struct("Custom").field("name", name).finish(),
        }
    }
}

impl PolarCurve {
    /// Scale making the limaçon `c (a + cos θ)` have unit area.
    pub fn limacon_scale(a: f64) -> f64 {
        (2.0 / ((2.0 * a * a + 1.0) * PI)).sqrt()
    }

    pub fn radius(&self, theta: f64) -> f64 {
        match self {
            PolarCurve::Circle { radius } => *radius,
            PolarCurve::Limacon { a } => Self::limacon_scale(*a) * (a + theta.cos()),
            PolarCurve::Custom { radius, .. } => radius(theta).max(0.0),
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        match self {
            PolarCurve::Custom { breakpoints, .. } => breakpoints.clone(),
            _ => Vec::new(),
        }
    }

    fn max_radius(&self) -> f64 {
        match self {
            PolarCurve::Circle { radius } => *radius,
            PolarCurve::Limacon { a } => Self::limacon_scale(*a) * (a + 1.0),
            PolarCurve::Custom { max_radius, .. } => *max_radius,
        }
    }

    fn contains(&self, p: Point, slack: f64) -> bool {
        let rho = p.norm();
        match self {
            PolarCurve::Circle { radius } => rho <= radius * (1.0 + slack),
            PolarCurve::Limacon { a } => {
                // ρ ≤ c(a + x/ρ)  ⇔  ρ² ≤ c(aρ + x)
                let c = Self::limacon_scale(*a);
                rho * rho <= c * (a * rho + p.x) + slack * c * c
            }
            PolarCurve::Custom { radius, .. } => {
                rho == 0.0 || rho <= radius(p.angle()) * (1.0 + slack)
            }
        }
    }
}

/// A region described by its ray intersections about the origin. Needed for
/// regions that are not star-shaped about the anchor.
#[derive(Clone)]
pub struct RadialSlices {
    name: String,
    slices: SlicesFn,
    breakpoints: Vec<f64>,
    max_radius: f64,
}

impl fmt::Debug for RadialSlices {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialSlices")
            .field("name", &self.name)
            .field("breakpoints", &self.breakpoints)
            .finish()
    }
}

impl RadialSlices {
    /// `slices(θ)` must return sorted, disjoint intervals with
    /// `0 ≤ r_in < r_out ≤ max_radius`. This is checked on a sample grid.
    pub fn new(
        name: impl Into<String>,
        slices: SlicesFn,
        mut breakpoints: Vec<f64>,
        max_radius: f64,
    ) -> Result<Self> {
        if !(max_radius > 0.0 && max_radius.is_finite()) {
            return Err(Error::InvalidRegion("max_radius must be positive".into()));
        }
        for k in 0..1024 {
            let theta = TAU * (k as f64 + 0.5) / 1024.0;
            let mut prev = 0.0;
            for (i, &(r_in, r_out)) in slices(theta).iter().enumerate() {
                let ordered = if i == 0 { r_in >= 0.0 } else { r_in > prev };
                if !ordered || r_out < r_in || r_out > max_radius * (1.0 + 1e-12) {
                    return Err(Error::InvalidRegion(format!(
                        "slices at θ={theta} are not sorted, disjoint and within max_radius"
                    )));
                }
                prev = r_out;
            }
        }
        for b in &mut breakpoints {
            *b = wrap_angle(*b);
        }
        breakpoints.sort_by(f64::total_cmp);
        Ok(Self {
            name: name.into(),
            slices,
            breakpoints,
            max_radius,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn at(&self, theta: f64) -> Vec<Interval> {
        (self.slices)(theta)
            .into_iter()
            .filter(|(a, b)| b > a)
            .collect()
    }

    fn contains(&self, p: Point, slack: f64) -> bool {
        let rho = p.norm();
        let tol = slack * self.max_radius;
        if slack > 0.0 && rho <= tol {
            // The pole is the anchor of every slice region.
            return true;
        }
        self.at(p.angle())
            .iter()
            .any(|&(a, b)| rho >= a - tol && rho <= b + tol)
    }
}

/// A planar region. Every kind except `Polygon` is positioned relative to the
/// coordinate origin (its pole).
#[derive(Debug, Clone)]
pub enum Region {
    Polygon(Polygon),
    Polar(PolarCurve),
    Slices(RadialSlices),
    /// Unit-area disk about the origin with the wedge `|θ| < π a` removed.
    DiskSlice { a: f64 },
    /// Unit-area disk about the origin whose natural anchor sits at
    /// `(r R, 0)`, `R = 1/√π`.
    OffsetDisk { r: f64 },
}

impl Region {
    pub fn polygon(vertices: Vec<Point>) -> Result<Self> {
        Polygon::new(vertices).map(Region::Polygon)
    }

    /// Polygon from a flat `[x0, y0, x1, y1, ...]` list.
    pub fn polygon_from_flat(coords: &[f64]) -> Result<Self> {
        if !coords.len().is_multiple_of(2) {
            return Err(Error::InvalidRegion(
                "odd number of polygon coordinates".into(),
            ));
        }
        Self::polygon(coords.chunks(2).map(|c| Point::new(c[0], c[1])).collect())
    }

    /// The unit square `[0, 1]²`.
    pub fn unit_square() -> Self {
        Self::polygon_from_flat(&[0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0, 1.0]).unwrap()
    }

    /// Unit-area equilateral triangle with vertices `(-s, 0)`, `(s, 0)`,
    /// `(0, s√3)`, `s = 3^{-1/4}`.
    pub fn equilateral_triangle() -> Self {
        let s = 3f64.powf(-0.25);
        Self::polygon(vec![
            Point::new(-s, 0.0),
            Point::new(s, 0.0),
            Point::new(0.0, s * 3f64.sqrt()),
        ])
        .unwrap()
    }

    /// Unit-area regular polygon centered at the origin, first vertex on the
    /// positive x axis.
    pub fn regular_polygon(n_vertices: usize) -> Result<Self> {
        if n_vertices < 3 {
            return Err(Error::Domain(format!(
                "regular polygon needs at least 3 vertices, got {n_vertices}"
            )));
        }
        let n = n_vertices as f64;
        let radius = (2.0 / (n * (TAU / n).sin())).sqrt();
        Self::polygon(
            (0..n_vertices)
                .map(|k| {
                    let t = TAU * k as f64 / n;
                    Point::new(radius * t.cos(), radius * t.sin())
                })
                .collect(),
        )
    }

    /// Triangle through three points in either orientation.
    pub fn triangle(a: Point, b: Point, c: Point) -> Result<Self> {
        if cross(b - a, c - a) < 0.0 {
            Self::polygon(vec![a, c, b])
        } else {
            Self::polygon(vec![a, b, c])
        }
    }

    /// Unit-area disk about the origin.
    pub fn disk() -> Self {
        Self::circle(1.0 / PI.sqrt()).unwrap()
    }

    pub fn circle(radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::DegenerateRegion(format!("circle radius {radius}")));
        }
        Ok(Region::Polar(PolarCurve::Circle { radius }))
    }

    /// Unit-area limaçon `r = c (a + cos θ)`, `a ≥ 1`.
    pub fn limacon(a: f64) -> Result<Self> {
        if !(a >= 1.0 && a.is_finite()) {
            return Err(Error::Domain(format!("limaçon needs a ≥ 1, got {a}")));
        }
        Ok(Region::Polar(PolarCurve::Limacon { a }))
    }

    pub fn custom_polar(
        name: impl Into<String>,
        radius: RadiusFn,
        breakpoints: Vec<f64>,
        max_radius: f64,
    ) -> Result<Self> {
        if !(max_radius > 0.0 && max_radius.is_finite()) {
            return Err(Error::InvalidRegion("max_radius must be positive".into()));
        }
        for k in 0..1024 {
            let t = TAU * k as f64 / 1024.0;
            let r = radius(t);
            if !(r >= 0.0) || r > max_radius * (1.0 + 1e-12) {
                return Err(Error::InvalidRegion(format!(
                    "radius {r} at θ={t} outside [0, max_radius]"
                )));
            }
            if (radius(t + TAU) - r).abs() > 1e-9 * max_radius {
                return Err(Error::InvalidRegion("radius is not 2π-periodic".into()));
            }
        }
        Ok(Region::Polar(PolarCurve::Custom {
            name: name.into(),
            radius,
            breakpoints: breakpoints.into_iter().map(wrap_angle).collect(),
            max_radius,
        }))
    }

    /// The region `x ≤ x² + y² ≤ 1`: the unit disk minus the disk of radius
    /// 1/2 centered at `(1/2, 0)`. The origin lies on its boundary.
    pub fn crescent() -> Self {
        let slices: SlicesFn = Arc::new(|theta: f64| {
            let c = theta.cos();
            if c > 0.0 {
                if c < 1.0 {
                    vec![(c, 1.0)]
                } else {
                    Vec::new()
                }
            } else {
                vec![(0.0, 1.0)]
            }
        });
        Region::Slices(
            RadialSlices::new("crescent", slices, vec![PI / 2.0, 3.0 * PI / 2.0], 1.0).unwrap(),
        )
    }

    pub fn disk_slice(a: f64) -> Result<Self> {
        if !(0.0..=0.5).contains(&a) {
            return Err(Error::Domain(format!("slice fraction a={a} outside [0, 1/2]")));
        }
        Ok(Region::DiskSlice { a })
    }

    pub fn offset_disk(r: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&r) {
            return Err(Error::Domain(format!("offset fraction r={r} outside [0, 1)")));
        }
        Ok(Region::OffsetDisk { r })
    }

    fn disk_slice_radius(a: f64) -> f64 {
        1.0 / (PI - PI * a).sqrt()
    }

    /// The anchor the region is usually studied with: the centroid for
    /// polygons, the pole for polar kinds, `(rR, 0)` for the offset disk.
    pub fn natural_anchor(&self) -> AnchorPoint {
        match self {
            Region::Polygon(p) => p.centroid(),
            Region::OffsetDisk { r } => Point::new(r / PI.sqrt(), 0.0),
            _ => Point::ORIGIN,
        }
    }

    /// Radius of an origin-centered disk containing the region.
    pub fn bounding_radius(&self) -> f64 {
        match self {
            Region::Polygon(p) => p.vertices.iter().map(|v| v.norm()).fold(0.0, f64::max),
            Region::Polar(c) => c.max_radius(),
            Region::Slices(s) => s.max_radius,
            Region::DiskSlice { a } => Self::disk_slice_radius(*a),
            Region::OffsetDisk { .. } => 1.0 / PI.sqrt(),
        }
    }

    /// Axis-aligned bounding box `(min, max)`.
    pub fn bounding_box(&self) -> (Point, Point) {
        match self {
            Region::Polygon(p) => bbox(&p.vertices),
            Region::Polar(PolarCurve::Limacon { a }) => {
                // x ranges over c(a+cosθ)cosθ, |y| ≤ c(a+1).
                let c = PolarCurve::limacon_scale(*a);
                let x_min = if a < &2.0 { -c * a * a / 4.0 } else { -c * (a - 1.0) };
                let x_min = x_min.min(0.0);
                let r = c * (a + 1.0);
                (Point::new(x_min, -r), Point::new(r, r))
            }
            _ => {
                let r = self.bounding_radius();
                (Point::new(-r, -r), Point::new(r, r))
            }
        }
    }

    pub fn contains(&self, p: Point) -> bool {
        self.contains_with_slack(p, 0.0)
    }

    fn contains_with_slack(&self, p: Point, slack: f64) -> bool {
        match self {
            Region::Polygon(poly) => {
                poly.contains(p)
                    || (slack > 0.0 && poly.distance_to_boundary(p) <= slack * poly.diameter())
            }
            Region::Polar(c) => c.contains(p, slack),
            Region::Slices(s) => s.contains(p, slack),
            Region::DiskSlice { a } => {
                let rho = p.norm();
                let big = Self::disk_slice_radius(*a);
                if rho > big * (1.0 + slack) {
                    return false;
                }
                if rho <= slack * big {
                    return true;
                }
                let phi = p.y.atan2(p.x).abs();
                phi >= PI * a - slack
            }
            Region::OffsetDisk { .. } => p.norm() <= (1.0 + slack) / PI.sqrt(),
        }
    }

    /// Membership allowing points within a relative `1e-12` of the boundary.
    pub fn contains_closed(&self, p: Point) -> bool {
        self.contains_with_slack(p, 1e-12)
    }

    fn pole_breakpoints(&self) -> Vec<f64> {
        match self {
            Region::Polar(c) => c.breakpoints(),
            Region::Slices(s) => s.breakpoints.clone(),
            Region::DiskSlice { a } if *a > 0.0 => {
                vec![PI * a, TAU - PI * a]
            }
            _ => Vec::new(),
        }
    }

    fn pole_intervals(&self, theta: f64) -> Vec<Interval> {
        match self {
            Region::Polar(c) => {
                let r = c.radius(theta);
                if r > 0.0 {
                    vec![(0.0, r)]
                } else {
                    Vec::new()
                }
            }
            Region::Slices(s) => s.at(theta),
            Region::DiskSlice { a } => {
                let phi = wrap_angle(theta);
                let off = phi.min(TAU - phi);
                if off >= PI * a {
                    vec![(0.0, Self::disk_slice_radius(*a))]
                } else {
                    Vec::new()
                }
            }
            Region::OffsetDisk { .. } => vec![(0.0, 1.0 / PI.sqrt())],
            Region::Polygon(_) => unreachable!("polygons have no pole"),
        }
    }
}

/// Lebesgue area of the region.
pub fn area(region: &Region) -> Result<f64> {
    let a = match region {
        Region::Polygon(p) => p.signed_area(),
        Region::Polar(PolarCurve::Circle { radius }) => PI * radius * radius,
        Region::Polar(PolarCurve::Limacon { a }) => {
            let c = PolarCurve::limacon_scale(*a);
            c * c * PI * (a * a + 0.5)
        }
        Region::Polar(c @ PolarCurve::Custom { .. }) => {
            let bps = c.breakpoints();
            quadrature::integrate(
                &|t: f64| 0.5 * c.radius(t).powi(2),
                0.0,
                TAU,
                &bps,
                Options::with_tol(1e-13),
            )?
            .value
        }
        Region::Slices(s) => {
            quadrature::integrate(
                &|t: f64| {
                    0.5 * s
                        .at(t)
                        .iter()
                        .map(|(a, b)| b * b - a * a)
                        .sum::<f64>()
                },
                0.0,
                TAU,
                &s.breakpoints,
                Options::with_tol(1e-13),
            )?
            .value
        }
        Region::DiskSlice { .. } | Region::OffsetDisk { .. } => 1.0,
    };
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::DegenerateRegion(format!("area {a}")));
    }
    Ok(a)
}

/// Intersection of the ray from `anchor` at angle `theta` with the region,
/// as sorted disjoint intervals of distance from the anchor.
pub fn radial_slices_at(region: &Region, anchor: AnchorPoint, theta: f64) -> Vec<Interval> {
    match region {
        Region::Polygon(p) => polygon_ray(p, anchor, theta),
        _ if anchor == Point::ORIGIN => region.pole_intervals(theta),
        Region::Polar(PolarCurve::Circle { radius }) => circle_ray(*radius, anchor, theta),
        Region::OffsetDisk { .. } => circle_ray(1.0 / PI.sqrt(), anchor, theta),
        _ => membership_ray(region, anchor, theta),
    }
}

fn circle_ray(radius: f64, anchor: Point, theta: f64) -> Vec<Interval> {
    let e = Point::new(theta.cos(), theta.sin());
    let b = dot(anchor, e);
    let c = dot(anchor, anchor) - radius * radius;
    let disc = b * b - c;
    if disc <= 0.0 {
        return Vec::new();
    }
    let s = disc.sqrt();
    // Stable roots of t² + 2bt + c = 0.
    let far = if b <= 0.0 { -b + s } else { -c / (b + s) };
    let near = if b <= 0.0 { c / (-b + s) } else { -b - s };
    let (lo, hi) = (near.max(0.0), far);
    if hi > lo {
        vec![(lo, hi)]
    } else {
        Vec::new()
    }
}

fn polygon_ray(poly: &Polygon, anchor: Point, theta: f64) -> Vec<Interval> {
    let e = Point::new(theta.cos(), theta.sin());
    let mut ts = vec![0.0];
    for (p, q) in poly.edges() {
        let w = q - p;
        let denom = cross(e, w);
        if denom == 0.0 {
            continue;
        }
        let ap = p - anchor;
        let t = cross(ap, w) / denom;
        let s = cross(ap, e) / denom;
        if t > 0.0 && (-1e-12..=1.0 + 1e-12).contains(&s) {
            ts.push(t);
        }
    }
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    let mut out: Vec<Interval> = Vec::new();
    for w in ts.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        if poly.contains(Point::new(anchor.x + mid * e.x, anchor.y + mid * e.y)) {
            match out.last_mut() {
                Some(last) if last.1 == w[0] => last.1 = w[1],
                _ => out.push((w[0], w[1])),
            }
        }
    }
    out
}

/// Ray casting against a membership predicate: sample the ray, then bisect
/// every change of membership.
fn membership_ray(region: &Region, anchor: Point, theta: f64) -> Vec<Interval> {
    const SAMPLES: usize = 512;
    let e = Point::new(theta.cos(), theta.sin());
    let reach = anchor.norm() + region.bounding_radius() * (1.0 + 1e-9);
    let at = |t: f64| region.contains(Point::new(anchor.x + t * e.x, anchor.y + t * e.y));
    let step = reach / SAMPLES as f64;

    let mut out = Vec::new();
    let mut start = if at(0.5 * step) { Some(0.0) } else { None };
    let mut prev_t = 0.5 * step;
    let mut prev_in = start.is_some();
    for k in 1..=SAMPLES {
        let t = (k as f64 + 0.5) * step;
        let now_in = k < SAMPLES && at(t);
        if now_in != prev_in {
            let (mut lo, mut hi) = (prev_t, t);
            for _ in 0..64 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if at(mid) == prev_in {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let edge = 0.5 * (lo + hi);
            if now_in {
                start = Some(edge);
            } else if let Some(s) = start.take() {
                out.push((s, edge));
            }
        }
        prev_in = now_in;
        prev_t = t;
    }
    out
}

#[derive(Debug, Clone, Copy)]
struct EdgeWedge {
    start: f64,
    span: f64,
    /// `cross(p - O, q - O)`, twice the area of the triangle O p q.
    twice_area: f64,
    dir: Point,
}

#[derive(Clone)]
enum RayProfile {
    /// Anchor in the kernel of a polygon: one edge per direction.
    Edges(Vec<EdgeWedge>),
    Rays { region: Region, anchor: Point },
    Function(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

/// Normalized angular density `f(θ)` on `[0, 2π)`.
#[derive(Clone)]
pub struct AngularDensity {
    profile: RayProfile,
    total_area: f64,
    breakpoints: Vec<f64>,
}

impl fmt::Debug for AngularDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AngularDensity")
            .field("total_area", &self.total_area)
            .field("breakpoints", &self.breakpoints)
            .finish_non_exhaustive()
    }
}

impl AngularDensity {
    /// Wrap an already-normalized density. `breakpoints` are the angles where
    /// `f` may fail to be smooth.
    pub fn from_fn(
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        breakpoints: Vec<f64>,
    ) -> Self {
        Self {
            profile: RayProfile::Function(Arc::new(f)),
            total_area: 1.0,
            breakpoints: normalize_breakpoints(breakpoints),
        }
    }

    /// The density seen after rotating the angle origin by `shift`:
    /// `θ ↦ f(θ + shift)`.
    pub fn rotated(&self, shift: f64) -> Self {
        let inner = self.clone();
        let bps = self.breakpoints.iter().map(|b| b - shift).collect();
        Self {
            profile: RayProfile::Function(Arc::new(move |t| inner.eval(t + shift))),
            total_area: self.total_area,
            breakpoints: normalize_breakpoints(bps),
        }
    }

    pub fn eval(&self, theta: f64) -> f64 {
        let theta = wrap_angle(theta);
        match &self.profile {
            RayProfile::Edges(wedges) => {
                // Last wedge starting at or before θ, or the last one overall
                // when θ precedes every start (wrap-around).
                let idx = wedges.partition_point(|w| w.start <= theta);
                let w = if idx == 0 { wedges[wedges.len() - 1] } else { wedges[idx - 1] };
                let off = wrap_angle(theta - w.start);
                if off > w.span {
                    return 0.0;
                }
                let e = Point::new(theta.cos(), theta.sin());
                let denom = cross(e, w.dir);
                if denom <= 0.0 {
                    return 0.0;
                }
                let r = w.twice_area / denom;
                0.5 * r * r / self.total_area
            }
            RayProfile::Rays { region, anchor } => {
                let s: f64 = radial_slices_at(region, *anchor, theta)
                    .iter()
                    .map(|(a, b)| b * b - a * a)
                    .sum();
                0.5 * s / self.total_area
            }
            RayProfile::Function(f) => f(theta),
        }
    }

    /// Sorted breakpoints in `[0, 2π)`.
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// Area of the region before normalization.
    pub fn total_area(&self) -> f64 {
        self.total_area
    }
}

fn normalize_breakpoints(mut bps: Vec<f64>) -> Vec<f64> {
    for b in &mut bps {
        *b = wrap_angle(*b);
    }
    bps.sort_by(f64::total_cmp);
    bps.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    bps
}

/// Angular density of `region` about `anchor`, normalized to unit mass.
pub fn angular_density(region: &Region, anchor: AnchorPoint) -> Result<AngularDensity> {
    if !anchor.x.is_finite() || !anchor.y.is_finite() {
        return Err(Error::Domain("anchor is not finite".into()));
    }
    if !region.contains_closed(anchor) {
        return Err(Error::Domain(format!(
            "anchor ({}, {}) is outside the region",
            anchor.x, anchor.y
        )));
    }
    let total_area = area(region)?;
    let (profile, bps) = match region {
        Region::Polygon(poly) => {
            let bps: Vec<f64> = poly
                .vertices
                .iter()
                .filter(|v| **v != anchor)
                .map(|v| (*v - anchor).angle())
                .collect();
            match kernel_wedges(poly, anchor) {
                Some(w) => (RayProfile::Edges(w), bps),
                None => (
                    RayProfile::Rays {
                        region: region.clone(),
                        anchor,
                    },
                    bps,
                ),
            }
        }
        _ => {
            let bps = if anchor == Point::ORIGIN {
                region.pole_breakpoints()
            } else {
                Vec::new()
            };
            (
                RayProfile::Rays {
                    region: region.clone(),
                    anchor,
                },
                bps,
            )
        }
    };
    Ok(AngularDensity {
        profile,
        total_area,
        breakpoints: normalize_breakpoints(bps),
    })
}

/// Per-edge wedges when every edge faces the anchor (anchor in the polygon's
/// kernel), else `None`.
fn kernel_wedges(poly: &Polygon, anchor: Point) -> Option<Vec<EdgeWedge>> {
    let scale = poly.diameter().powi(2);
    let mut wedges = Vec::with_capacity(poly.vertices.len());
    for (p, q) in poly.edges() {
        let (pa, qa) = (p - anchor, q - anchor);
        let c = cross(pa, qa);
        if c < -1e-13 * scale {
            return None;
        }
        if c <= 1e-15 * scale {
            continue;
        }
        wedges.push(EdgeWedge {
            start: pa.angle(),
            span: c.atan2(dot(pa, qa)),
            twice_area: c,
            dir: q - p,
        });
    }
    if wedges.is_empty() {
        return None;
    }
    wedges.sort_by(|a, b| a.start.total_cmp(&b.start));
    Some(wedges)
}

/// Barycentric coordinates of `p` in triangle `abc`: the ratios of the
/// distance to each side over the matching altitude.
pub fn barycentric(a: Point, b: Point, c: Point, p: Point) -> Result<BarycentricPoint> {
    let total = cross(b - a, c - a);
    if total.abs() <= f64::EPSILON * (b - a).norm() * (c - a).norm() {
        return Err(Error::DegenerateRegion("collinear triangle".into()));
    }
    let alpha = cross(b - p, c - p) / total;
    let beta = cross(c - p, a - p) / total;
    let gamma = 1.0 - alpha - beta;
    BarycentricPoint::new(alpha, beta, gamma)
}
