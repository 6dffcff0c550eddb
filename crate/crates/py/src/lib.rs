//! Python bindings for `gromov-core`.

use gromov_core::lattice::{parse_rational, rational_from_f64, to_f64, Rational};
use gromov_core::{
    ball_count as core_ball_count, gh_exact as core_gh_exact, Correspondence, FiniteMetricSpace, SolverOptions,
};
use pyo3::exceptions::{PyOverflowError, PyValueError};
use pyo3::prelude::*;

fn err(e: gromov_core::Error) -> PyErr {
    match e {
        gromov_core::Error::CapExceeded { .. }
        | gromov_core::Error::SizeOverflow { .. }
        | gromov_core::Error::BoxTooLarge(_)
        | gromov_core::Error::DimensionCapExceeded(_) => PyOverflowError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// Accepts an int, a float or a string such as `"5/2"`.
fn rational(obj: &Bound<'_, PyAny>) -> PyResult<Rational> {
    if let Ok(v) = obj.extract::<i64>() {
        return Ok(Rational::from_integer(v as i128));
    }
    if let Ok(s) = obj.extract::<String>() {
        return parse_rational(&s).map_err(err);
    }
    rational_from_f64(obj.extract::<f64>()?).map_err(err)
}

fn rationals(objs: &[Bound<'_, PyAny>]) -> PyResult<Vec<Rational>> {
    objs.iter().map(rational).collect()
}

/// A finite metric space given by its distance matrix.
#[pyclass(name = "MetricSpace", module = "gromov_lab", frozen)]
pub struct PyMetricSpace {
    inner: FiniteMetricSpace,
}

#[pymethods]
impl PyMetricSpace {
    #[new]
    #[pyo3(signature = (matrix, labels=None))]
    fn new(matrix: Vec<Vec<f64>>, labels: Option<Vec<String>>) -> PyResult<Self> {
        let inner = match labels {
            Some(l) => FiniteMetricSpace::validate(matrix, l),
            None => FiniteMetricSpace::from_matrix(matrix),
        }
        .map_err(err)?;
        Ok(PyMetricSpace { inner })
    }

    /// Points on the real line with `|a - b|` distances.
    #[staticmethod]
    fn from_reals(points: Vec<f64>) -> PyResult<Self> {
        Ok(PyMetricSpace { inner: gromov_core::from_reals(&points).map_err(err)? })
    }

    #[staticmethod]
    fn point() -> Self {
        PyMetricSpace { inner: FiniteMetricSpace::point() }
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("MetricSpace(points={}, diameter={})", self.inner.len(), self.inner.diameter())
    }

    fn d(&self, i: usize, j: usize) -> PyResult<f64> {
        if i >= self.inner.len() || j >= self.inner.len() {
            return Err(PyValueError::new_err("index out of range"));
        }
        Ok(self.inner.d(i, j))
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        self.inner.labels().to_vec()
    }

    fn diameter(&self) -> f64 {
        self.inner.diameter()
    }

    fn to_matrix(&self) -> Vec<Vec<f64>> {
        self.inner.to_matrix()
    }

    fn scale(&self, t: f64) -> PyResult<Self> {
        Ok(PyMetricSpace { inner: self.inner.scale(t).map_err(err)? })
    }

    fn l1_product(&self, other: &PyMetricSpace) -> PyResult<Self> {
        Ok(PyMetricSpace { inner: self.inner.l1_product(&other.inner).map_err(err)? })
    }

    fn add_constant(&self, c: f64) -> PyResult<Self> {
        Ok(PyMetricSpace { inner: self.inner.add_constant(c).map_err(err)? })
    }

    /// `None` when `pairing` is an isometry, else the first violating `(i, j)`.
    fn isometry_violation(&self, other: &PyMetricSpace, pairing: Vec<usize>) -> PyResult<Option<(usize, usize)>> {
        use gromov_core::IsometryCheck;
        Ok(match self.inner.check_isometry(&other.inner, &pairing).map_err(err)? {
            IsometryCheck::Isometric => None,
            IsometryCheck::Violation { i, j, .. } => Some((i, j)),
        })
    }
}

/// Result of [`gh_exact`].
#[pyclass(name = "Certificate", module = "gromov_lab", frozen, get_all)]
pub struct PyCertificate {
    value: f64,
    witness: Vec<(usize, usize)>,
    lower_proof: String,
    nodes_explored: u64,
    optimal: bool,
}

#[pymethods]
impl PyCertificate {
    fn __repr__(&self) -> String {
        format!(
            "Certificate(value={}, lower_proof={}, nodes_explored={})",
            self.value, self.lower_proof, self.nodes_explored
        )
    }
}

#[pyfunction]
#[pyo3(signature = (x, y, node_budget=None))]
fn gh_exact(py: Python<'_>, x: &PyMetricSpace, y: &PyMetricSpace, node_budget: Option<u64>) -> PyResult<PyCertificate> {
    let mut opts = SolverOptions::default();
    if let Some(b) = node_budget {
        opts.node_budget = b;
    }
    let cert = py.detach(|| core_gh_exact(&x.inner, &y.inner, &opts)).map_err(err)?;
    Ok(PyCertificate {
        value: cert.value,
        witness: cert.witness.pairs().to_vec(),
        lower_proof: cert.lower_proof.tag().to_string(),
        nodes_explored: cert.nodes_explored,
        optimal: cert.lower_proof.is_optimal(),
    })
}

/// Distortion of a correspondence given as a list of `(i, j)` pairs.
#[pyfunction]
fn distortion(x: &PyMetricSpace, y: &PyMetricSpace, pairs: Vec<(usize, usize)>) -> PyResult<f64> {
    Correspondence::new(x.inner.len(), y.inner.len(), pairs)
        .and_then(|c| c.distortion(&x.inner, &y.inner))
        .map_err(err)
}

#[pyfunction]
fn hausdorff(z: &PyMetricSpace, a: Vec<usize>, b: Vec<usize>) -> PyResult<f64> {
    gromov_core::hausdorff_distance(&a, &b, &z.inner).map_err(err)
}

#[pyfunction]
fn gh_scaling_value(x: &PyMetricSpace, t1: f64, t2: f64) -> PyResult<f64> {
    gromov_core::gh_scaling_value(&x.inner, t1, t2).map_err(err)
}

#[pyfunction]
fn product_bound_constraint(n: u64, w: f64, t: f64, diam_y: f64) -> PyResult<f64> {
    gromov_core::product_bound_constraint(n, w, t, diam_y).map_err(err)
}

/// Points of `Zⁿ` in the closed ball of radius `r`.
#[pyfunction]
fn ball_count(py: Python<'_>, n: usize, r: &Bound<'_, PyAny>) -> PyResult<u64> {
    let r = rational(r)?;
    py.detach(|| core_ball_count(n, &r)).map_err(err)
}

/// `[(t, N, N', ratio)]` for each radius in `ts`.
#[pyfunction]
#[pyo3(signature = (n, lam, c, ts))]
fn ratio_series(
    n: usize,
    lam: &Bound<'_, PyAny>,
    c: &Bound<'_, PyAny>,
    ts: Vec<Bound<'_, PyAny>>,
) -> PyResult<Vec<(f64, u64, u64, Option<f64>)>> {
    let report = gromov_core::ratio_series(n, rational(lam)?, rational(c)?, &rationals(&ts)?).map_err(err)?;
    Ok(report.rows.iter().map(|r| (to_f64(&r.t), r.count, r.count_prime, r.ratio)).collect())
}

/// First `t` in `grid` with `N(λt) > N'(t + c/λ)`, or `None`.
#[pyfunction]
#[pyo3(signature = (n, lam, c, grid))]
fn witness_radius(
    n: usize,
    lam: &Bound<'_, PyAny>,
    c: &Bound<'_, PyAny>,
    grid: Vec<Bound<'_, PyAny>>,
) -> PyResult<Option<f64>> {
    let t = gromov_core::witness_radius(n, rational(lam)?, rational(c)?, &rationals(&grid)?).map_err(err)?;
    Ok(t.as_ref().map(to_f64))
}

/// The window `{-k..k}ⁿ` of `Zⁿ` with the Euclidean metric.
#[pyfunction]
fn zn_window(n: usize, k: usize) -> PyResult<PyMetricSpace> {
    Ok(PyMetricSpace { inner: gromov_core::zn_window(n, k).map_err(err)? })
}

#[pymodule]
fn gromov_lab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMetricSpace>()?;
    m.add_class::<PyCertificate>()?;
    m.add_function(wrap_pyfunction!(gh_exact, m)?)?;
    m.add_function(wrap_pyfunction!(distortion, m)?)?;
    m.add_function(wrap_pyfunction!(hausdorff, m)?)?;
    m.add_function(wrap_pyfunction!(gh_scaling_value, m)?)?;
    m.add_function(wrap_pyfunction!(product_bound_constraint, m)?)?;
    m.add_function(wrap_pyfunction!(ball_count, m)?)?;
    m.add_function(wrap_pyfunction!(ratio_series, m)?)?;
    m.add_function(wrap_pyfunction!(witness_radius, m)?)?;
    m.add_function(wrap_pyfunction!(zn_window, m)?)?;
    Ok(())
}
