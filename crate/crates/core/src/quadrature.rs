//! Piecewise Gauss–Legendre quadrature with global adaptive bisection.
//!
//! Every integrand in this crate is piecewise analytic with kinks or jumps at
//! angles that are known in advance, so integration always starts from a
//! caller-supplied list of breakpoints. Each panel is integrated with a fixed
//! 16-point rule; the error of a panel is estimated by comparing the rule on
//! the whole panel with the rule on its two halves, and the panel with the
//! largest estimate is bisected until the total estimate meets the target.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Number of nodes of the fixed panel rule.
pub const ORDER: usize = 16;

/// Nodes on `[-1, 1]` and matching weights of an `n`-point Gauss–Legendre rule.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi's initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

fn rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(ORDER))
}

/// Fixed 16-point Gauss–Legendre estimate of `∫_a^b f`.
pub fn fixed<F: Fn(f64) -> f64 + ?Sized>(f: &F, a: f64, b: f64) -> f64 {
    let (nodes, weights) = rule();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut sum = 0.0;
    for (x, w) in nodes.iter().zip(weights) {
        sum += w * f(mid + half * x);
    }
    sum * half
}

/// Sum in a fixed binary-tree order so results do not depend on how the
/// terms were produced.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        2 => xs[0] + xs[1],
        n => {
            let (l, r) = xs.split_at(n / 2);
            pairwise_sum(l) + pairwise_sum(r)
        }
    }
}

/// Options for [`integrate`] and [`panels`].
#[derive(Debug, Clone, Copy)]
pub struct Options {
    pub abs_tol: f64,
    pub max_panels: usize,
    /// Panels narrower than this are never bisected.
    pub min_width: f64,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            max_panels: 20_000,
            min_width: 1e-13,
        }
    }
}

impl Options {
    pub fn with_tol(abs_tol: f64) -> Self {
        Self {
            abs_tol,
            ..Self::default()
        }
    }
}

/// An integrated sub-interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Panel {
    pub a: f64,
    pub b: f64,
    pub value: f64,
    pub error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub panels: usize,
}

struct Pending(Panel);

impl PartialEq for Pending {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Pending {}
impl PartialOrd for Pending {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Pending {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .error
            .total_cmp(&other.0.error)
            .then_with(|| other.0.a.total_cmp(&self.0.a))
    }
}

fn evaluate<F: Fn(f64) -> f64 + ?Sized>(f: &F, a: f64, b: f64) -> Panel {
    let m = 0.5 * (a + b);
    let whole = fixed(f, a, b);
    let halves = fixed(f, a, m) + fixed(f, m, b);
    let err = (whole - halves).abs();
    // Below this the two estimates only differ by rounding.
    let floor = 1e-15 * halves.abs().max(whole.abs());
    Panel {
        a,
        b,
        value: halves,
        error: if err <= floor { 0.0 } else { err },
    }
}

/// Adaptively split `[lo, hi]` (cut at every interior breakpoint) until the
/// summed error estimate is at most `opts.abs_tol`. Returns the final panels
/// sorted by position.
pub fn panels<F: Fn(f64) -> f64 + ?Sized>(
    f: &F,
    lo: f64,
    hi: f64,
    breakpoints: &[f64],
    opts: Options,
) -> Result<Vec<Panel>> {
    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&x| x > lo && x < hi)
        .collect();
    cuts.push(lo);
    cuts.push(hi);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * (1.0 + b.abs()));

    let mut heap = BinaryHeap::new();
    let mut done = Vec::new();
    let mut total_err = 0.0;
    for w in cuts.windows(2) {
        let p = evaluate(f, w[0], w[1]);
        total_err += p.error;
        heap.push(Pending(p));
    }

    while total_err > opts.abs_tol && heap.len() + done.len() < opts.max_panels {
        let Some(Pending(worst)) = heap.pop() else {
            break;
        };
        if worst.error == 0.0 {
            heap.push(Pending(worst));
            break;
        }
        if worst.b - worst.a <= opts.min_width {
            total_err -= worst.error;
            done.push(worst);
            continue;
        }
        let m = 0.5 * (worst.a + worst.b);
        let l = evaluate(f, worst.a, m);
        let r = evaluate(f, m, worst.b);
        total_err += l.error + r.error - worst.error;
        heap.push(Pending(l));
        heap.push(Pending(r));
    }

    let mut out: Vec<Panel> = done.into_iter().chain(heap.into_iter().map(|p| p.0)).collect();
    out.sort_by(|x, y| x.a.total_cmp(&y.a));
    let err: Vec<f64> = out.iter().map(|p| p.error).collect();
    let err = pairwise_sum(&err);
    if !err.is_finite() || err > opts.abs_tol {
        return Err(Error::Quadrature {
            tolerance: opts.abs_tol,
            estimate: err,
        });
    }
    Ok(out)
}

/// `∫_lo^hi f` to absolute tolerance `opts.abs_tol`.
pub fn integrate<F: Fn(f64) -> f64 + ?Sized>(
    f: &F,
    lo: f64,
    hi: f64,
    breakpoints: &[f64],
    opts: Options,
) -> Result<Integral> {
    let ps = panels(f, lo, hi, breakpoints, opts)?;
    Ok(summarize(&ps))
}

pub fn summarize(ps: &[Panel]) -> Integral {
    let values: Vec<f64> = ps.iter().map(|p| p.value).collect();
    let errors: Vec<f64> = ps.iter().map(|p| p.error).collect();
    Integral {
        value: pairwise_sum(&values),
        error: pairwise_sum(&errors),
        panels: ps.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn rule_integrates_degree_31_exactly() {
        // ∫_{-1}^{1} x^30 = 2/31
        let v = fixed(&|x: f64| x.powi(30), -1.0, 1.0);
        assert!((v - 2.0 / 31.0).abs() < 1e-15);
        let (_, w) = gauss_legendre(ORDER);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn kinked_integrand_with_breakpoint() {
        let f = |x: f64| (x - 0.3).abs();
        let r = integrate(&f, 0.0, 1.0, &[0.3], Options::with_tol(1e-14)).unwrap();
        assert!((r.value - (0.045 + 0.245)).abs() < 1e-14);
    }

    #[test]
    fn hidden_jump_is_resolved_by_bisection() {
        let f = |x: f64| if x < 1.0 / 3.0 { 1.0 } else { 0.0 };
        let r = integrate(&f, 0.0, 1.0, &[], Options::with_tol(1e-10)).unwrap();
        assert!((r.value - 1.0 / 3.0).abs() < 1e-10, "{r:?}");
    }

    #[test]
    fn log_endpoint_singularity() {
        let r = integrate(&|x: f64| x.ln(), 0.0, 1.0, &[], Options::with_tol(1e-10)).unwrap();
        assert!((r.value + 1.0).abs() < 1e-10);
    }

    #[test]
    fn budget_exhaustion_is_an_error() {
        let opts = Options {
            abs_tol: 1e-14,
            max_panels: 4,
            min_width: 1e-13,
        };
        let f = |x: f64| (50.0 * x).sin() / (1e-3 + x);
        assert!(matches!(
            integrate(&f, 0.0, PI, &[], opts),
            Err(Error::Quadrature { .. })
        ));
    }

    #[test]
    fn pairwise_sum_matches_naive_on_small_input() {
        let xs = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(pairwise_sum(&xs), 15.0);
    }
}
