//! Probability that a triangle with three independent uniform vertices in a
//! planar region contains a fixed anchor point.
//!
//! The computation reduces the six-dimensional integral to one dimension: the
//! region is summarized by its angular area density `f(θ)` about the anchor
//! ([`region::angular_density`]), and the probability is a quadrature over
//! `f` and the half-turn mass `H` ([`kernel`]). Closed forms for the standard
//! families live in [`closed_forms`], and [`montecarlo`] provides a direct
//! simulation used as an independent check.

pub mod analysis;
pub mod closed_forms;
pub mod error;
pub mod kernel;
pub mod montecarlo;
pub mod quadrature;
pub mod region;
pub mod region_file;

pub use analysis::{BoundsReport, MaximizerReport};
pub use closed_forms::BarycentricPoint;
pub use error::{Error, Result};
pub use kernel::{MassProfile, Method, ProbabilityResult};
pub use montecarlo::McEstimate;
pub use region::{angular_density, area, AnchorPoint, AngularDensity, Point, Region};
pub use region_file::{parse_region_file, RegionFile};
