//! Python bindings for `rand_acim`.

use std::collections::BTreeMap;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use rand_acim::cocycle::{self, CocycleSpec, Scheme};
use rand_acim::driving::{Base, RotationBase};
use rand_acim::fourier;
use rand_acim::maps::{self, MapBounds, MapFamily};
use rand_acim::sobolev::{self, Extension, GridFunction};
use rand_acim::ulam;
use rand_acim::Error;

fn to_py(e: Error) -> PyErr {
    if e.is_usage_error() {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

fn extension(name: &str) -> PyResult<Extension> {
    match name {
        "circle" => Ok(Extension::Circle),
        "zero" => Ok(Extension::ZeroExtend),
        other => Err(PyValueError::new_err(format!("extension must be 'circle' or 'zero', got {other:?}"))),
    }
}

fn family(name: &str, rho: f64) -> PyResult<MapFamily> {
    let f = match name {
        "example" => MapFamily::Example,
        "doubling" => MapFamily::Doubling,
        "identity" => MapFamily::Identity,
        other => return Err(PyValueError::new_err(format!("unknown family {other:?}"))),
    };
    Ok(if rho != 0.0 { f.translated(rho) } else { f })
}

/// A piecewise expanding circle map.
#[pyclass(name = "PiecewiseMap", frozen)]
struct PyPiecewiseMap {
    inner: maps::PiecewiseMap,
}

#[pymethods]
impl PyPiecewiseMap {
    /// Map from branch endpoints and per-branch polynomial coefficients in the local coordinate.
    #[new]
    #[pyo3(signature = (breakpoints, coefficients, gamma = 1.0))]
    fn new(breakpoints: Vec<f64>, coefficients: Vec<Vec<f64>>, gamma: f64) -> PyResult<Self> {
        Ok(Self {
            inner: maps::PiecewiseMap::from_breakpoints(&breakpoints, &coefficients, gamma).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn example_family(omega: f64) -> Self {
        Self {
            inner: maps::PiecewiseMap::example_family(omega),
        }
    }

    #[staticmethod]
    fn doubling() -> Self {
        Self {
            inner: maps::PiecewiseMap::doubling(),
        }
    }

    #[staticmethod]
    fn identity() -> Self {
        Self {
            inner: maps::PiecewiseMap::identity(),
        }
    }

    #[staticmethod]
    fn rotation(beta: f64) -> Self {
        Self {
            inner: maps::PiecewiseMap::rotation(beta),
        }
    }

    #[getter]
    fn branch_count(&self) -> usize {
        self.inner.branch_count()
    }

    /// `T(x) mod 1`.
    fn eval(&self, x: f64) -> f64 {
        self.inner.eval(x)
    }

    fn derivative(&self, x: f64) -> PyResult<f64> {
        self.inner.derivative(x).map_err(to_py)
    }

    /// `T + rho (mod 1)`.
    fn translated(&self, rho: f64) -> Self {
        Self {
            inner: self.inner.translated(rho),
        }
    }

    /// `(passed, min |DT|, C^{1+γ} norm, failures)` against the default bounds.
    #[pyo3(signature = (grid_points = 2000))]
    fn validate(&self, grid_points: usize) -> (bool, f64, f64, Vec<String>) {
        let r = self.inner.validate(grid_points, &MapBounds::default());
        (r.passed(), r.min_abs_derivative, r.c1_gamma_norm, r.failures)
    }

    fn __repr__(&self) -> String {
        format!("PiecewiseMap(branches={})", self.inner.branch_count())
    }
}

/// Row-stochastic Ulam matrix of one map.
#[pyclass(name = "UlamMatrix", frozen)]
struct PyUlamMatrix {
    inner: ulam::UlamMatrix,
}

#[pymethods]
impl PyUlamMatrix {
    #[getter]
    fn k(&self) -> usize {
        self.inner.k()
    }

    fn get(&self, i: usize, j: usize) -> f64 {
        self.inner.get(i, j)
    }

    fn to_dense(&self) -> Vec<Vec<f64>> {
        let k = self.inner.k();
        self.inner.to_dense().chunks(k).map(|r| r.to_vec()).collect()
    }

    /// `v · M`.
    fn apply(&self, v: Vec<f64>) -> PyResult<Vec<f64>> {
        self.inner.apply(&v).map_err(to_py)
    }
}

/// Ulam matrix with `q` test points per bin, or exact preimage lengths when `q` is omitted.
#[pyfunction]
#[pyo3(signature = (map, k, q = None))]
fn ulam_matrix(map: &PyPiecewiseMap, k: usize, q: Option<usize>) -> PyResult<PyUlamMatrix> {
    let inner = match q {
        Some(q) => ulam::assemble_testpoints(&map.inner, k, q),
        None => ulam::assemble_exact(&map.inner, k),
    }
    .map_err(to_py)?;
    Ok(PyUlamMatrix { inner })
}

/// Galerkin matrix rows `A[m][m']`, `m, m' = −K..K`, optionally Cesàro weighted.
#[pyfunction]
#[pyo3(signature = (map, modes, tol = fourier::DEFAULT_QUAD_TOL, cesaro = false))]
fn galerkin_matrix(
    map: &PyPiecewiseMap,
    modes: usize,
    tol: f64,
    cesaro: bool,
) -> PyResult<Vec<Vec<(f64, f64)>>> {
    let mut a = fourier::galerkin_matrix(&map.inner, modes, tol).map_err(to_py)?;
    if cesaro {
        a = fourier::cesaro_weighting(&a).map_err(to_py)?;
    }
    let d = a.dim();
    Ok(a.entries().chunks(d).map(|r| r.iter().map(|z| (z.re, z.im)).collect()).collect())
}

/// Bin averages of samples onto `k` bins.
#[pyfunction]
fn conditional_expectation(samples: Vec<f64>, k: usize) -> PyResult<Vec<f64>> {
    ulam::conditional_expectation(&samples, k).map_err(to_py)
}

/// `‖f‖_p + ‖S_t f‖_p` of midpoint samples.
#[pyfunction]
#[pyo3(signature = (samples, p = 2.0, t = 0.4, extension = "circle"))]
fn hpt_norm(samples: Vec<f64>, p: f64, t: f64, extension: &str) -> PyResult<f64> {
    let g = GridFunction::new(samples, self::extension(extension)?).map_err(to_py)?;
    Ok(sobolev::hpt_norm_at(&g, p, t))
}

/// Branch-matched distance between two maps.
#[pyfunction]
#[pyo3(signature = (a, b, grid_points = 2000))]
fn d_ly(a: &PyPiecewiseMap, b: &PyPiecewiseMap, grid_points: usize) -> f64 {
    maps::d_ly(&a.inner, &b.inner, grid_points)
}

#[allow(clippy::too_many_arguments)]
fn spec(
    family_name: &str,
    rho: f64,
    scheme: &str,
    k: usize,
    q: usize,
    modes: usize,
    steps: usize,
    alpha: f64,
    omega0: f64,
) -> PyResult<CocycleSpec> {
    let scheme = match scheme {
        "ulam" => Scheme::Ulam { k, q },
        "ulam-exact" => Scheme::UlamExact { k },
        "galerkin-cesaro" => Scheme::GalerkinCesaro {
            modes,
            tol: fourier::DEFAULT_QUAD_TOL,
        },
        "galerkin-plain" => Scheme::GalerkinPlain {
            modes,
            tol: fourier::DEFAULT_QUAD_TOL,
        },
        other => return Err(PyValueError::new_err(format!("unknown scheme {other:?}"))),
    };
    CocycleSpec::new(
        family(family_name, rho)?,
        Base::Rotation(RotationBase::new(alpha, 0.0)),
        scheme,
        steps,
        omega0,
    )
    .map_err(to_py)
}

/// Push Lebesgue measure along the rotation orbit; returns `{step: [(x, value), ...]}`.
#[pyfunction]
#[pyo3(signature = (
    family = "example", scheme = "ulam", k = 1000, q = 1000, modes = 100, steps = 22,
    record = vec![20, 21, 22], alpha = std::f64::consts::FRAC_1_SQRT_2, omega0 = 0.0, rho = 0.0
))]
#[allow(clippy::too_many_arguments)]
fn push_forward(
    py: Python<'_>,
    family: &str,
    scheme: &str,
    k: usize,
    q: usize,
    modes: usize,
    steps: usize,
    record: Vec<usize>,
    alpha: f64,
    omega0: f64,
    rho: f64,
) -> PyResult<BTreeMap<usize, Vec<(f64, f64)>>> {
    let spec = spec(family, rho, scheme, k, q, modes, steps, alpha, omega0)?;
    let r = py.detach(|| cocycle::push_forward(&spec, &record)).map_err(to_py)?;
    Ok(r.densities.into_iter().map(|(s, d)| (s, d.points())).collect())
}

/// `(λ̂₁, λ̂₂)` of an Ulam cocycle of a named family.
#[pyfunction]
#[pyo3(signature = (family = "example", k = 500, q = 1000, n = 200, trials = 10, renorm_every = 10, seed = 0))]
#[allow(clippy::too_many_arguments)]
fn lyapunov(
    py: Python<'_>,
    family: &str,
    k: usize,
    q: usize,
    n: usize,
    trials: usize,
    renorm_every: usize,
    seed: u64,
) -> PyResult<(f64, f64)> {
    let spec = spec(family, 0.0, "ulam", k, q, 1, 1, std::f64::consts::FRAC_1_SQRT_2, 0.0)?;
    let r = py
        .detach(|| cocycle::lyapunov(&spec, n, trials, renorm_every, seed))
        .map_err(to_py)?;
    Ok((r.lambda1_hat, r.lambda2_hat))
}

#[pymodule]
pub fn rand_acim_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPiecewiseMap>()?;
    m.add_class::<PyUlamMatrix>()?;
    m.add_function(wrap_pyfunction!(ulam_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(galerkin_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(conditional_expectation, m)?)?;
    m.add_function(wrap_pyfunction!(hpt_norm, m)?)?;
    m.add_function(wrap_pyfunction!(d_ly, m)?)?;
    m.add_function(wrap_pyfunction!(push_forward, m)?)?;
    m.add_function(wrap_pyfunction!(lyapunov, m)?)?;
    Ok(())
}
