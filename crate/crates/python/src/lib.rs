//! Python module `tricover`: regions, the quadrature kernel, closed forms,
//! Monte Carlo estimates, bounds and the anchor maximizer.
//!
//! Bad input raises `DomainError` (a `ValueError`); numerical failures raise
//! `NumericalError` (a `RuntimeError`).

use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use triangle_cover::closed_forms::{self, BarycentricPoint};
use triangle_cover::kernel::{self, MassProfile};
use triangle_cover::{analysis, angular_density, montecarlo, Error, McEstimate, Point, ProbabilityResult};

create_exception!(tricover, DomainError, PyValueError);
create_exception!(tricover, NumericalError, PyRuntimeError);

fn to_py(e: Error) -> PyErr {
    if e.is_domain() {
        DomainError::new_err(e.to_string())
    } else {
        NumericalError::new_err(e.to_string())
    }
}

trait OrRaise<T> {
    fn or_raise(self) -> PyResult<T>;
}

impl<T> OrRaise<T> for triangle_cover::Result<T> {
    fn or_raise(self) -> PyResult<T> {
        self.map_err(to_py)
    }
}

/// A bounded planar region.
#[pyclass(name = "Region", module = "tricover", frozen)]
struct PyRegion {
    inner: triangle_cover::Region,
}

fn wrap(inner: triangle_cover::Region) -> PyRegion {
    PyRegion { inner }
}

#[pymethods]
impl PyRegion {
    /// Simple polygon from `[(x, y), ...]`.
    #[staticmethod]
    fn polygon(vertices: Vec<(f64, f64)>) -> PyResult<Self> {
        let pts = vertices.into_iter().map(|(x, y)| Point::new(x, y)).collect();
        Ok(wrap(triangle_cover::Region::polygon(pts).or_raise()?))
    }

    #[staticmethod]
    fn unit_square() -> Self {
        wrap(triangle_cover::Region::unit_square())
    }

    #[staticmethod]
    fn equilateral_triangle() -> Self {
        wrap(triangle_cover::Region::equilateral_triangle())
    }

    #[staticmethod]
    fn regular_polygon(n: usize) -> PyResult<Self> {
        Ok(wrap(triangle_cover::Region::regular_polygon(n).or_raise()?))
    }

    #[staticmethod]
    fn disk() -> Self {
        wrap(triangle_cover::Region::disk())
    }

    #[staticmethod]
    fn circle(radius: f64) -> PyResult<Self> {
        Ok(wrap(triangle_cover::Region::circle(radius).or_raise()?))
    }

    #[staticmethod]
    fn limacon(a: f64) -> PyResult<Self> {
        Ok(wrap(triangle_cover::Region::limacon(a).or_raise()?))
    }

    #[staticmethod]
    fn crescent() -> Self {
        wrap(triangle_cover::Region::crescent())
    }

    #[staticmethod]
    fn disk_slice(a: f64) -> PyResult<Self> {
        Ok(wrap(triangle_cover::Region::disk_slice(a).or_raise()?))
    }

    #[staticmethod]
    fn offset_disk(r: f64) -> PyResult<Self> {
        Ok(wrap(triangle_cover::Region::offset_disk(r).or_raise()?))
    }

    /// Parse a TOML region description. Returns `(region, anchor_or_None)`.
    #[staticmethod]
    fn from_toml(text: &str) -> PyResult<(Self, Option<(f64, f64)>)> {
        let file = triangle_cover::parse_region_file(text).or_raise()?;
        Ok((wrap(file.region), file.anchor.map(|p| (p.x, p.y))))
    }

    fn area(&self) -> PyResult<f64> {
        triangle_cover::area(&self.inner).or_raise()
    }

    fn natural_anchor(&self) -> (f64, f64) {
        let p = self.inner.natural_anchor();
        (p.x, p.y)
    }

    fn contains(&self, x: f64, y: f64) -> bool {
        self.inner.contains(Point::new(x, y))
    }

    fn __repr__(&self) -> String {
        let p = self.inner.natural_anchor();
        format!("Region(anchor=({}, {}))", p.x, p.y)
    }
}

impl PyRegion {
    fn anchor(&self, anchor: Option<(f64, f64)>) -> Point {
        anchor
            .map(|(x, y)| Point::new(x, y))
            .unwrap_or_else(|| self.inner.natural_anchor())
    }
}

fn probability_dict<'py>(py: Python<'py>, anchor: Point, r: &ProbabilityResult) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("anchor", (anchor.x, anchor.y))?;
    d.set_item("value", r.value)?;
    d.set_item("raw_value", r.raw_value)?;
    d.set_item("method", r.method.as_str())?;
    d.set_item("error_estimate", r.error_estimate)?;
    Ok(d)
}

fn estimate_dict<'py>(py: Python<'py>, e: &McEstimate) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("p_hat", e.p_hat)?;
    d.set_item("std_err", e.std_err)?;
    d.set_item("n", e.n)?;
    d.set_item("seed", e.seed)?;
    d.set_item("hits", e.hits)?;
    Ok(d)
}

/// Covering probability at `anchor` (default: the region's natural anchor).
///
/// `method` is one of `eq15`, `eq12` (uses `u`), `eq14` or `double-integral`
/// (uses `panels`).
#[pyfunction]
#[pyo3(signature = (region, anchor=None, tolerance=kernel::DEFAULT_TOLERANCE, method="eq15", u=0.0, panels=512))]
fn probability<'py>(
    py: Python<'py>,
    region: &PyRegion,
    anchor: Option<(f64, f64)>,
    tolerance: f64,
    method: &str,
    u: f64,
    panels: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let o = region.anchor(anchor);
    let reg = &region.inner;
    let result = py
        .detach(|| -> triangle_cover::Result<ProbabilityResult> {
            match method {
                "eq15" => kernel::probability_with_tolerance(&angular_density(reg, o)?, tolerance),
                "eq12" => {
                    let profile = MassProfile::new(&angular_density(reg, o)?)?;
                    kernel::probability_via_u_from_profile(&profile, u, tolerance)
                }
                "eq14" => {
                    let profile = MassProfile::new(&angular_density(reg, o)?)?;
                    kernel::probability_eq14_from_profile(&profile, tolerance)
                }
                "double-integral" => kernel::probability_double_integral(reg, o, panels),
                other => Err(Error::Domain(format!(
                    "unknown method `{other}` (expected eq15, eq12, eq14 or double-integral)"
                ))),
            }
        })
        .or_raise()?;
    probability_dict(py, o, &result)
}

#[pyfunction]
fn limacon_probability(a: f64) -> PyResult<f64> {
    closed_forms::limacon_probability(a).or_raise()
}

/// Probability at the centre of a regular `(2m+1)`-gon.
#[pyfunction]
fn regular_polygon_probability(m: u64) -> PyResult<f64> {
    closed_forms::regular_polygon_probability(m).or_raise()
}

#[pyfunction]
fn triangle_probability(alpha: f64, beta: f64, gamma: f64) -> PyResult<f64> {
    closed_forms::triangle_probability(BarycentricPoint::new(alpha, beta, gamma).or_raise()?).or_raise()
}

#[pyfunction]
fn square_probability(u: f64, v: f64) -> PyResult<f64> {
    closed_forms::square_probability(u, v).or_raise()
}

#[pyfunction]
fn square_diagonal_probability(u: f64) -> PyResult<f64> {
    closed_forms::square_diagonal_probability(u).or_raise()
}

#[pyfunction]
fn slice_disk_probability(a: f64) -> PyResult<f64> {
    closed_forms::slice_disk_probability(a).or_raise()
}

#[pyfunction]
fn offset_disk_probability(r: f64) -> PyResult<f64> {
    closed_forms::offset_disk_probability(r).or_raise()
}

/// `(average over the disk, reference value)`.
#[pyfunction]
fn offset_disk_average() -> PyResult<(f64, f64)> {
    let avg = closed_forms::offset_disk_average().or_raise()?;
    Ok((avg.value, avg.reference))
}

#[pyfunction]
#[pyo3(signature = (region, anchor=None, n=1_000_000, seed=0))]
fn simulate<'py>(
    py: Python<'py>,
    region: &PyRegion,
    anchor: Option<(f64, f64)>,
    n: u64,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let o = region.anchor(anchor);
    let est = py
        .detach(|| montecarlo::estimate_probability(&region.inner, o, n, seed))
        .or_raise()?;
    let d = estimate_dict(py, &est)?;
    d.set_item("anchor", (o.x, o.y))?;
    Ok(d)
}

/// Monte Carlo estimate for four points; `nonconvex` is four times `p_hat`.
#[pyfunction]
#[pyo3(signature = (region, n=1_000_000, seed=0))]
fn sylvester<'py>(py: Python<'py>, region: &PyRegion, n: u64, seed: u64) -> PyResult<Bound<'py, PyDict>> {
    let est = py
        .detach(|| montecarlo::sylvester_nonconvex(&region.inner, n, seed))
        .or_raise()?;
    let d = estimate_dict(py, &est)?;
    d.set_item("nonconvex", 4.0 * est.p_hat)?;
    Ok(d)
}

#[pyfunction]
#[pyo3(signature = (region, anchor=None))]
fn bounds<'py>(py: Python<'py>, region: &PyRegion, anchor: Option<(f64, f64)>) -> PyResult<Bound<'py, PyDict>> {
    let o = region.anchor(anchor);
    let (b, defect) = py
        .detach(|| -> triangle_cover::Result<_> {
            Ok((
                analysis::bounds(&region.inner, o)?,
                analysis::symmetry_defect(&region.inner, o)?,
            ))
        })
        .or_raise()?;
    let d = PyDict::new(py);
    d.set_item("anchor", (o.x, o.y))?;
    d.set_item("h", b.h)?;
    d.set_item("lower", b.lower)?;
    d.set_item("p", b.p)?;
    d.set_item("upper", b.upper)?;
    d.set_item("symmetry_defect", defect)?;
    Ok(d)
}

#[pyfunction]
#[pyo3(signature = (region, grid=16, refine=200))]
fn maximize<'py>(py: Python<'py>, region: &PyRegion, grid: usize, refine: usize) -> PyResult<Bound<'py, PyDict>> {
    let rep = py
        .detach(|| analysis::maximize(&region.inner, grid, refine))
        .or_raise()?;
    let d = PyDict::new(py);
    d.set_item("argmax", (rep.argmax.x, rep.argmax.y))?;
    d.set_item("p_max", rep.p_max)?;
    let trace: Vec<((f64, f64), f64)> = rep.trace.iter().map(|(p, v)| ((p.x, p.y), *v)).collect();
    d.set_item("trace", trace)?;
    Ok(d)
}

#[pymodule]
fn tricover(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add("DomainError", py.get_type::<DomainError>())?;
    m.add("NumericalError", py.get_type::<NumericalError>())?;
    m.add("DEFAULT_TOLERANCE", kernel::DEFAULT_TOLERANCE)?;
    m.add_class::<PyRegion>()?;
    m.add_function(wrap_pyfunction!(probability, m)?)?;
    m.add_function(wrap_pyfunction!(limacon_probability, m)?)?;
    m.add_function(wrap_pyfunction!(regular_polygon_probability, m)?)?;
    m.add_function(wrap_pyfunction!(triangle_probability, m)?)?;
    m.add_function(wrap_pyfunction!(square_probability, m)?)?;
    m.add_function(wrap_pyfunction!(square_diagonal_probability, m)?)?;
    m.add_function(wrap_pyfunction!(slice_disk_probability, m)?)?;
    m.add_function(wrap_pyfunction!(offset_disk_probability, m)?)?;
    m.add_function(wrap_pyfunction!(offset_disk_average, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(sylvester, m)?)?;
    m.add_function(wrap_pyfunction!(bounds, m)?)?;
    m.add_function(wrap_pyfunction!(maximize, m)?)?;
    Ok(())
}
