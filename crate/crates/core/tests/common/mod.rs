//! Regions and helpers shared by the integration tests.

#![allow(dead_code)]

use triangle_cover::{Point, Region};

/// A scalene triangle used wherever "a concrete triangle" is needed.
pub fn scalene() -> (Point, Point, Point, Region) {
    let (a, b, c) = (Point::new(0.0, 0.0), Point::new(3.0, 0.5), Point::new(1.0, 2.0));
    (a, b, c, Region::triangle(a, b, c).unwrap())
}

pub fn from_barycentric(a: Point, b: Point, c: Point, w: [f64; 3]) -> Point {
    Point::new(
        w[0] * a.x + w[1] * b.x + w[2] * c.x,
        w[0] * a.y + w[1] * b.y + w[2] * c.y,
    )
}

/// Every region/anchor pair used by the property checks, with whether it
/// is centrally symmetric about the anchor.
pub fn registered() -> Vec<(String, Region, Point, bool)> {
    let mut out = Vec::new();
    let eq = Region::equilateral_triangle();
    out.push(("equilateral centroid".to_string(), eq.clone(), eq.natural_anchor(), false));
    for a in [1.0, 2.0, 3.0] {
        out.push((format!("limaçon a={a}"), Region::limacon(a).unwrap(), Point::ORIGIN, false));
    }
    for n in [4, 5, 6] {
        out.push((
            format!("regular {n}-gon center"),
            Region::regular_polygon(n).unwrap(),
            Point::ORIGIN,
            n % 2 == 0,
        ));
    }
    let (a, b, c, tri) = scalene();
    out.push((
        "scalene (1/6, 1/3, 1/2)".to_string(),
        tri.clone(),
        from_barycentric(a, b, c, [1.0 / 6.0, 1.0 / 3.0, 0.5]),
        false,
    ));
    out.push(("scalene centroid".to_string(), tri.clone(), tri.natural_anchor(), false));
    let sq = Region::unit_square();
    for (u, v, sym) in [(0.5, 0.5, true), (0.5, 0.25, false), (1.0 / 3.0, 1.0 / 3.0, false), (0.1, 0.7, false)] {
        out.push((format!("square ({u:.3}, {v:.3})"), sq.clone(), Point::new(u, v), sym));
    }
    out.push(("crescent origin".to_string(), Region::crescent(), Point::ORIGIN, false));
    for a in [0.1, 0.25, 0.4] {
        out.push((format!("sliced disk a={a}"), Region::disk_slice(a).unwrap(), Point::ORIGIN, false));
    }
    out.push(("disk center".to_string(), Region::disk(), Point::ORIGIN, true));
    for r in [0.25, 0.5] {
        let region = Region::offset_disk(r).unwrap();
        let anchor = region.natural_anchor();
        out.push((format!("offset disk r={r}"), region, anchor, false));
    }
    out
}

