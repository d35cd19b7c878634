//! Python bindings for `starip`.
//!
//! Potentials cross the boundary as lists of samples on the uniform grid over
//! `[0, pi]`; eigenvalue families as lists of floats. Reports that carry many
//! fields come back as JSON strings.

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

use starip::reconstruct::{full_inverse, InverseOptions, ReconstructionResult, DEFAULT_BASIS_DIM};
use starip::weyl::{GValue, PartialSpectrum, WeylValue};
use starip::{Error, GridFunction};

create_exception!(pystarip, StarIpError, PyException);

fn to_py(e: Error) -> PyErr {
    match e.root() {
        Error::InvalidGrid(_) | Error::InvalidProblem(_) | Error::Parse(_) => PyValueError::new_err(e.to_string()),
        _ => StarIpError::new_err(e.to_string()),
    }
}

fn grid(values: Vec<f64>) -> PyResult<GridFunction> {
    GridFunction::new(values).map_err(to_py)
}

fn grids(values: Vec<Vec<f64>>) -> PyResult<Vec<GridFunction>> {
    values.into_iter().map(grid).collect()
}

fn json<T: serde::Serialize>(value: &T) -> PyResult<String> {
    serde_json::to_string(value).map_err(|e| StarIpError::new_err(e.to_string()))
}

/// Star graph with `m >= 2` edges of length pi, each carrying a potential
/// sampled on the same uniform grid.
#[pyclass(name = "StarGraph", frozen)]
struct PyStarGraph {
    inner: starip::StarGraphProblem,
}

#[pymethods]
impl PyStarGraph {
    #[new]
    fn new(potentials: Vec<Vec<f64>>) -> PyResult<Self> {
        let inner = starip::StarGraphProblem::new(grids(potentials)?).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m()
    }

    #[getter]
    fn n_points(&self) -> usize {
        self.inner.n_points()
    }

    /// `omega_j = (1/2) int q_j`.
    fn omegas(&self) -> Vec<f64> {
        self.inner.omegas()
    }

    fn omega_hat(&self) -> f64 {
        self.inner.omega_hat()
    }

    fn potential(&self, j: usize) -> PyResult<Vec<f64>> {
        if j == 0 || j > self.inner.m() {
            return Err(PyValueError::new_err(format!("edge {j} out of range 1..={}", self.inner.m())));
        }
        Ok(self.inner.potential(j).values().to_vec())
    }

    /// Labelled eigenvalues as `(n, k, lambda, multiplicity)` tuples.
    fn spectrum(&self, n_max: usize) -> PyResult<Vec<(usize, usize, f64, usize)>> {
        let t = starip::compute_spectrum(&self.inner, n_max).map_err(to_py)?;
        Ok(t.entries.iter().map(|e| (e.n, e.k, e.lambda, e.multiplicity)).collect())
    }

    /// `(lambda_n1 for n <= n_max + 1, lambda_n2 for n <= n_max)`, the input
    /// of `full_inverse`.
    fn inverse_data(&self, n_max: usize) -> PyResult<(Vec<f64>, Vec<f64>)> {
        let t = starip::compute_spectrum(&self.inner, n_max + 1).map_err(to_py)?;
        Ok((t.family(1), t.family(2)[..n_max].to_vec()))
    }

    /// Checks the spectral assumptions on the first `n_max` eigenvalues of
    /// every family. Returns a JSON report.
    fn check_assumptions(&self, n_max: usize) -> PyResult<String> {
        let t = starip::compute_spectrum(&self.inner, n_max).map_err(to_py)?;
        json(&starip::graph::check_assumptions(&self.inner, &t).map_err(to_py)?)
    }

    fn __repr__(&self) -> String {
        format!("StarGraph(m={}, n_points={})", self.inner.m(), self.inner.n_points())
    }
}

/// `(S(pi), S'(pi))` for one edge at `lambda`.
#[pyfunction]
fn solve_edge(q: Vec<f64>, lambda: f64) -> PyResult<(f64, f64)> {
    let b = starip::solve_edge(&grid(q)?, lambda).map_err(to_py)?;
    Ok((b.s_end, b.s_prime_end))
}

/// `M(lambda) = -S'(pi)/S(pi)`, or `None` at a pole.
#[pyfunction]
fn weyl_function(q: Vec<f64>, lambda: f64) -> PyResult<Option<f64>> {
    Ok(match starip::weyl::weyl_function(&grid(q)?, lambda).map_err(to_py)? {
        WeylValue::Finite(v) => Some(v),
        WeylValue::Pole => None,
    })
}

/// `g_nk` for both families; infinite entries are `inf`.
#[pyfunction]
fn aggregate_g(known: Vec<Vec<f64>>, family1: Vec<f64>, family2: Vec<f64>) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let g = starip::weyl::aggregate_g(&grids(known)?, &PartialSpectrum::new(family1, family2)).map_err(to_py)?;
    let flat = |v: &[GValue]| -> Vec<f64> {
        v.iter()
            .map(|g| match g {
                GValue::Finite(x) => *x,
                GValue::Infinite => f64::INFINITY,
            })
            .collect()
    };
    Ok((flat(&g.family1), flat(&g.family2)))
}

#[pyclass(name = "Reconstruction", frozen)]
struct PyReconstruction {
    inner: ReconstructionResult,
}

#[pymethods]
impl PyReconstruction {
    #[getter]
    fn q1(&self) -> Vec<f64> {
        self.inner.q1.values().to_vec()
    }

    /// Diagnostics of every step as a JSON string.
    fn diagnostics(&self) -> PyResult<String> {
        json(&self.inner.diagnostics)
    }

    fn l2_distance(&self, other: Vec<f64>) -> PyResult<f64> {
        self.inner.q1.l2_distance(&grid(other)?).map_err(to_py)
    }
}

/// Recovers `q_1` from the known potentials and the `k = 1, 2` families.
#[pyfunction]
#[pyo3(signature = (known, lambda1, lambda2, n_max=None, basis_dim=DEFAULT_BASIS_DIM))]
fn inverse(
    known: Vec<Vec<f64>>,
    lambda1: Vec<f64>,
    lambda2: Vec<f64>,
    n_max: Option<usize>,
    basis_dim: usize,
) -> PyResult<PyReconstruction> {
    let opts = InverseOptions { n_max, basis_dim, ..Default::default() };
    let inner = full_inverse(&grids(known)?, &lambda1, &lambda2, &opts).map_err(to_py)?;
    Ok(PyReconstruction { inner })
}

/// Reconstructs from perturbed spectra of `graph`; returns the report as JSON.
#[pyfunction]
#[pyo3(signature = (graph, n_max, epsilons, trials=5, seed=0, basis_dim=DEFAULT_BASIS_DIM))]
fn stability(
    graph: &PyStarGraph,
    n_max: usize,
    epsilons: Vec<f64>,
    trials: usize,
    seed: u64,
    basis_dim: usize,
) -> PyResult<String> {
    let opts = InverseOptions { n_max: Some(n_max), basis_dim, ..Default::default() };
    let report = starip::stability::run_stability(&graph.inner, &epsilons, trials, seed, &opts).map_err(to_py)?;
    json(&report)
}

#[pymodule]
fn pystarip(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("StarIpError", m.py().get_type::<StarIpError>())?;
    m.add("DEFAULT_POINTS", starip::DEFAULT_POINTS)?;
    m.add_class::<PyStarGraph>()?;
    m.add_class::<PyReconstruction>()?;
    m.add_function(wrap_pyfunction!(solve_edge, m)?)?;
    m.add_function(wrap_pyfunction!(weyl_function, m)?)?;
    m.add_function(wrap_pyfunction!(aggregate_g, m)?)?;
    m.add_function(wrap_pyfunction!(inverse, m)?)?;
    m.add_function(wrap_pyfunction!(stability, m)?)?;
    Ok(())
}
