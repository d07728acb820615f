//! The slow double-integral oracle against the one-dimensional kernel.

use triangle_cover::kernel;

mod common;
use common::registered;

/// Cells per axis for the coarse midpoint rule.
const PANELS: usize = 512;

#[test]
fn double_integral_agrees_with_quadrature_on_every_registered_region() {
    let mut failures = Vec::new();
    for (name, region, anchor, _) in registered() {
        let quad = kernel::probability_of(&region, anchor).unwrap();
        let slow = kernel::probability_double_integral(&region, anchor, PANELS).unwrap();
        let diff = (quad.raw_value - slow.raw_value).abs();
        eprintln!(
            "{name}: quadrature {:.10} double integral {:.10} (est. error {:.1e}) diff {diff:.1e}",
            quad.raw_value, slow.raw_value, slow.error_estimate
        );
        if diff > 1e-5 {
            failures.push(name);
        }
    }
    assert!(failures.is_empty(), "disagreement on {failures:?}");
}
