//! Direct simulation of the covering event.
//!
//! Samples are drawn in fixed-size blocks. Block `b` of a run with seed `s`
//! uses ChaCha8 seeded from `s` on stream `b`, so an estimate depends only on
//! `(region, anchor, n, seed)` and not on the number of worker threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::region::{area, cross, AnchorPoint, Point, Region};

/// Samples per RNG substream.
pub const BLOCK: u64 = 1 << 16;

/// Smallest acceptable ratio of region area to bounding-box area.
const MIN_ACCEPTANCE: f64 = 1e-4;

/// Attempts allowed for a single point before giving up.
const MAX_ATTEMPTS: u32 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub p_hat: f64,
    pub std_err: f64,
    pub n: u64,
    pub seed: u64,
    pub hits: u64,
}

impl McEstimate {
    pub fn from_counts(hits: u64, n: u64, seed: u64) -> Self {
        let p = hits as f64 / n as f64;
        Self {
            p_hat: p,
            std_err: (p * (1.0 - p) / n as f64).sqrt(),
            n,
            seed,
            hits,
        }
    }

    /// Distance from `value` in standard errors.
    pub fn z_score(&self, value: f64) -> f64 {
        let se = self.std_err.max(f64::MIN_POSITIVE);
        (self.p_hat - value) / se
    }
}

/// Uniform sampler over a region by rejection from its bounding box.
#[derive(Debug, Clone)]
pub struct Sampler<'a> {
    region: &'a Region,
    lo: Point,
    hi: Point,
    acceptance: f64,
}

impl<'a> Sampler<'a> {
    pub fn new(region: &'a Region) -> Result<Self> {
        let (lo, hi) = region.bounding_box();
        let box_area = (hi.x - lo.x) * (hi.y - lo.y);
        let acceptance = area(region)? / box_area;
        if !(acceptance >= MIN_ACCEPTANCE) {
            return Err(Error::RejectionBudgetExceeded(format!(
                "acceptance rate {acceptance:e} below {MIN_ACCEPTANCE:e}"
            )));
        }
        Ok(Self {
            region,
            lo,
            hi,
            acceptance,
        })
    }

    /// Expected fraction of bounding-box draws that land in the region.
    pub fn acceptance(&self) -> f64 {
        self.acceptance
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Point> {
        self.sample_counting(rng).map(|(p, _)| p)
    }

    /// A sample together with the number of box draws it took.
    pub fn sample_counting<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(Point, u32)> {
        for attempt in 1..=MAX_ATTEMPTS {
            let x = self.lo.x + (self.hi.x - self.lo.x) * rng.random::<f64>();
            let y = self.lo.y + (self.hi.y - self.lo.y) * rng.random::<f64>();
            let p = Point::new(x, y);
            if self.region.contains(p) {
                return Ok((p, attempt));
            }
        }
        Err(Error::RejectionBudgetExceeded(format!(
            "no accepted point in {MAX_ATTEMPTS} draws"
        )))
    }
}

/// One uniform point of `region`.
pub fn sample_point<R: Rng + ?Sized>(region: &Region, rng: &mut R) -> Result<Point> {
    Sampler::new(region)?.sample(rng)
}

/// Whether `o` lies in the closed triangle `abc`. A degenerate triangle
/// covers exactly the points of its segment span.
pub fn triangle_contains(a: Point, b: Point, c: Point, o: Point) -> bool {
    let d1 = cross(b - a, o - a);
    let d2 = cross(c - b, o - b);
    let d3 = cross(a - c, o - c);
    if d1 == 0.0 && d2 == 0.0 && d3 == 0.0 {
        let lo_x = a.x.min(b.x).min(c.x);
        let hi_x = a.x.max(b.x).max(c.x);
        let lo_y = a.y.min(b.y).min(c.y);
        let hi_y = a.y.max(b.y).max(c.y);
        return o.x >= lo_x && o.x <= hi_x && o.y >= lo_y && o.y <= hi_y;
    }
    let neg = d1 < 0.0 || d2 < 0.0 || d3 < 0.0;
    let pos = d1 > 0.0 || d2 > 0.0 || d3 > 0.0;
    !(neg && pos)
}

fn block_rng(seed: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    rng
}

fn run_blocks<F>(n: u64, seed: u64, trial: F) -> Result<u64>
where
    F: Fn(&mut ChaCha8Rng) -> Result<bool> + Sync,
{
    let blocks = n.div_ceil(BLOCK);
    let counts: Result<Vec<u64>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = block_rng(seed, b);
            let len = BLOCK.min(n - b * BLOCK);
            let mut hits = 0;
            for _ in 0..len {
                if trial(&mut rng)? {
                    hits += 1;
                }
            }
            Ok(hits)
        })
        .collect();
    Ok(counts?.into_iter().sum())
}

fn check_samples(n: u64) -> Result<()> {
    if n < 1000 {
        return Err(Error::Domain(format!("need at least 1000 samples, got {n}")));
    }
    Ok(())
}

/// Frequency with which three uniform points of `region` span a triangle
/// containing `anchor`.
pub fn estimate_probability(
    region: &Region,
    anchor: AnchorPoint,
    n: u64,
    seed: u64,
) -> Result<McEstimate> {
    check_samples(n)?;
    let sampler = Sampler::new(region)?;
    let hits = run_blocks(n, seed, |rng| {
        let a = sampler.sample(rng)?;
        let b = sampler.sample(rng)?;
        let c = sampler.sample(rng)?;
        Ok(triangle_contains(a, b, c, anchor))
    })?;
    Ok(McEstimate::from_counts(hits, n, seed))
}

/// Frequency with which the first of four uniform points falls inside the
/// triangle of the other three. Four times this is the probability that the
/// four points are not in convex position.
pub fn sylvester_nonconvex(region: &Region, n: u64, seed: u64) -> Result<McEstimate> {
    check_samples(n)?;
    let sampler = Sampler::new(region)?;
    let hits = run_blocks(n, seed, |rng| {
        let o = sampler.sample(rng)?;
        let a = sampler.sample(rng)?;
        let b = sampler.sample(rng)?;
        let c = sampler.sample(rng)?;
        Ok(triangle_contains(a, b, c, o))
    })?;
    Ok(McEstimate::from_counts(hits, n, seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn containment_basics() {
        let (a, b, c) = (Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.0, 1.0));
        assert!(triangle_contains(a, b, c, Point::new(0.25, 0.25)));
        assert!(!triangle_contains(a, b, c, Point::new(0.6, 0.6)));
        assert!(triangle_contains(a, b, c, a));
        // Orientation does not matter.
        assert!(triangle_contains(a, c, b, Point::new(0.25, 0.25)));
    }

    #[test]
    fn degenerate_triangles() {
        let (a, b, c) = (Point::new(0.0, 0.0), Point::new(1.0, 1.0), Point::new(2.0, 2.0));
        assert!(triangle_contains(a, b, c, Point::new(1.5, 1.5)));
        assert!(!triangle_contains(a, b, c, Point::new(3.0, 3.0)));
        assert!(!triangle_contains(a, b, c, Point::new(1.0, 0.0)));
        let p = Point::new(0.3, 0.3);
        assert!(triangle_contains(p, p, p, p));
        assert!(!triangle_contains(p, p, p, Point::ORIGIN));
    }

    #[test]
    fn unit_square_always_accepts() {
        let r = Region::unit_square();
        let s = Sampler::new(&r).unwrap();
        assert_eq!(s.acceptance(), 1.0);
        let mut rng = block_rng(1, 0);
        for _ in 0..1000 {
            let (_, tries) = s.sample_counting(&mut rng).unwrap();
            assert_eq!(tries, 1);
        }
    }

    #[test]
    fn crescent_acceptance_rate() {
        let r = Region::crescent();
        let s = Sampler::new(&r).unwrap();
        let expect = 0.75 * PI / 4.0;
        assert!((s.acceptance() - expect).abs() < 1e-12);
        let mut rng = block_rng(7, 0);
        let n = 100_000;
        let mut draws = 0u64;
        for _ in 0..n {
            draws += s.sample_counting(&mut rng).unwrap().1 as u64;
        }
        // Draws per accepted point is geometric with mean 1/p, variance (1-p)/p².
        let mean = draws as f64 / n as f64;
        let sigma = ((1.0 - expect) / (expect * expect) / n as f64).sqrt();
        assert!((mean - 1.0 / expect).abs() < 4.0 * sigma, "{mean}");
    }

    #[test]
    fn disk_samples_are_centered() {
        let r = Region::disk();
        let s = Sampler::new(&r).unwrap();
        let mut rng = block_rng(3, 0);
        let n = 1_000_000;
        let (mut sx, mut sy) = (0.0, 0.0);
        for _ in 0..n {
            let p = s.sample(&mut rng).unwrap();
            sx += p.x;
            sy += p.y;
        }
        // Var(x) = R²/4 = 1/(4π).
        let sigma = (1.0 / (4.0 * PI) / n as f64).sqrt();
        assert!((sx / n as f64).abs() < 4.0 * sigma);
        assert!((sy / n as f64).abs() < 4.0 * sigma);
    }

    #[test]
    fn thin_region_is_rejected() {
        let r = Region::polygon_from_flat(&[0.0, 0.0, 1.0, 0.0, 1.0, 1e-5, 0.0, 1.0]).unwrap();
        // Area ≈ 0.5, box is the unit square: fine.
        assert!(Sampler::new(&r).is_ok());
        let sliver = Region::polygon_from_flat(&[0.0, 0.0, 1.0, 1.0, 1.0 - 1e-6, 1.0]).unwrap();
        assert!(matches!(
            Sampler::new(&sliver),
            Err(Error::RejectionBudgetExceeded(_))
        ));
    }

    #[test]
    fn seed_determinism() {
        let r = Region::unit_square();
        let o = Point::new(0.3, 0.6);
        let a = estimate_probability(&r, o, 200_000, 11).unwrap();
        let b = estimate_probability(&r, o, 200_000, 11).unwrap();
        assert_eq!(a, b);
        let c = estimate_probability(&r, o, 200_000, 12).unwrap();
        assert_ne!(a.hits, c.hits);
    }

    #[test]
    fn too_few_samples() {
        assert!(matches!(
            estimate_probability(&Region::disk(), Point::ORIGIN, 10, 0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn std_err_formula() {
        let e = McEstimate::from_counts(250, 1000, 0);
        assert_eq!(e.p_hat, 0.25);
        assert!((e.std_err - (0.25f64 * 0.75 / 1000.0).sqrt()).abs() < 1e-18);
    }
}
