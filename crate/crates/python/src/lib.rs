//! Python bindings: matrices, step CDFs, Monte Carlo estimates, exact
//! oracles, the bounds, and the random-transpositions walk.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use subspec::ensembles::{self, EntryDist};
use subspec::{linalg, montecarlo, oracle, sampling, spectra, walk, Error, Mode};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::NoConvergence { .. } | Error::Verification(_) | Error::Io(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn parse_mode(mode: &str) -> PyResult<Mode> {
    mode.parse().map_err(to_py)
}

fn parse_dist(dist: &str) -> PyResult<EntryDist> {
    match dist {
        "gaussian" => Ok(EntryDist::Gaussian),
        "pm1" => Ok(EntryDist::Pm1),
        other => Err(PyValueError::new_err(format!("unknown distribution {other:?}"))),
    }
}

/// Dense real or complex matrix.
#[pyclass(module = "pysubspec")]
struct Matrix {
    inner: linalg::DenseMatrix,
}

#[pymethods]
impl Matrix {
    /// Real matrix from a list of equal-length rows.
    #[new]
    fn new(rows: Vec<Vec<f64>>) -> PyResult<Self> {
        Ok(Matrix { inner: linalg::DenseMatrix::from_rows(&rows).map_err(to_py)? })
    }

    #[staticmethod]
    fn rw_covariance(n: usize) -> Self {
        Matrix { inner: ensembles::rw_covariance(n) }
    }

    #[staticmethod]
    fn half_ones(n: usize) -> Self {
        Matrix { inner: ensembles::half_ones_diagonal(n) }
    }

    #[staticmethod]
    #[pyo3(signature = (n, seed, dist = "gaussian"))]
    fn random_symmetric(n: usize, seed: u64, dist: &str) -> PyResult<Self> {
        Ok(Matrix { inner: ensembles::random_symmetric(n, seed, parse_dist(dist)?) })
    }

    #[staticmethod]
    fn random_general(rows: usize, cols: usize, seed: u64) -> Self {
        Matrix { inner: ensembles::random_general(rows, cols, seed) }
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        Ok(Matrix { inner: ensembles::load_matrix(path).map_err(to_py)? })
    }

    fn save(&self, path: &str) -> PyResult<()> {
        ensembles::save_matrix(&self.inner, path).map_err(to_py)
    }

    #[getter]
    fn shape(&self) -> (usize, usize) {
        (self.inner.rows(), self.inner.cols())
    }

    /// Real parts as nested lists.
    fn to_list(&self) -> Vec<Vec<f64>> {
        (0..self.inner.rows()).map(|i| (0..self.inner.cols()).map(|j| self.inner.get(i, j)).collect()).collect()
    }

    fn eigenvalues(&self) -> PyResult<Vec<f64>> {
        Ok(linalg::eigenvalues_hermitian(&self.inner).map_err(to_py)?.values().to_vec())
    }

    fn singular_values(&self) -> PyResult<Vec<f64>> {
        Ok(linalg::singular_values(&self.inner).map_err(to_py)?.values().to_vec())
    }

    /// Principal submatrix on 1-based indices.
    fn principal_submatrix(&self, indices: Vec<usize>) -> PyResult<Matrix> {
        let zero_based = indices
            .iter()
            .map(|&i| i.checked_sub(1).ok_or_else(|| PyValueError::new_err("indices are 1-based")))
            .collect::<PyResult<Vec<_>>>()?;
        let s = sampling::SubsetSample::new(self.inner.rows(), zero_based).map_err(to_py)?;
        Ok(Matrix { inner: sampling::principal_submatrix(&self.inner, &s).map_err(to_py)? })
    }

    fn __repr__(&self) -> String {
        format!("Matrix({}x{}, {})", self.inner.rows(), self.inner.cols(), self.inner.field().as_str())
    }
}

/// Right-continuous step CDF.
#[pyclass(module = "pysubspec")]
struct StepCdf {
    inner: spectra::StepCdf,
}

#[pymethods]
impl StepCdf {
    #[new]
    fn new(jumps: Vec<f64>, cum: Vec<f64>) -> PyResult<Self> {
        Ok(StepCdf { inner: spectra::StepCdf::new(jumps, cum).map_err(to_py)? })
    }

    /// ESD of a list of values.
    #[staticmethod]
    fn from_values(values: Vec<f64>) -> PyResult<Self> {
        Ok(StepCdf { inner: spectra::esd(&linalg::Spectrum::new(values).map_err(to_py)?) })
    }

    #[getter]
    fn jumps(&self) -> Vec<f64> {
        self.inner.jumps().to_vec()
    }

    #[getter]
    fn cum(&self) -> Vec<f64> {
        self.inner.cum().to_vec()
    }

    fn __call__(&self, x: f64) -> f64 {
        self.inner.eval(x)
    }

    fn eval_left(&self, x: f64) -> f64 {
        self.inner.eval_left(x)
    }

    fn sup_distance(&self, other: PyRef<'_, StepCdf>) -> f64 {
        spectra::sup_distance(&self.inner, &other.inner)
    }

    fn to_csv(&self) -> String {
        self.inner.to_csv()
    }

    fn __repr__(&self) -> String {
        format!("StepCdf({} jumps)", self.inner.jumps().len())
    }
}

/// Two-sample KS test; returns `(statistic, lambda, p_value)`.
#[pyfunction]
fn ks_two_sample(f: PyRef<'_, StepCdf>, a: usize, g: PyRef<'_, StepCdf>, b: usize) -> PyResult<(f64, f64, f64)> {
    let r = spectra::ks_two_sample(&f.inner, a, &g.inner, b).map_err(to_py)?;
    Ok((r.statistic, r.lambda, r.p_value))
}

#[pyfunction]
fn kolmogorov_q(lambda: f64) -> f64 {
    spectra::kolmogorov_q(lambda)
}

/// Uniform k-subset drawn from stream `index` of `master_seed`, 1-based.
#[pyfunction]
#[pyo3(signature = (n, k, master_seed, index = 0))]
fn random_k_subset(n: usize, k: usize, master_seed: u64, index: u64) -> PyResult<Vec<usize>> {
    let mut rng = sampling::SeedPlan::new(master_seed).stream(index);
    Ok(sampling::random_k_subset(n, k, &mut rng).map_err(to_py)?.one_based())
}

#[pyfunction]
fn derive_sample_seed(master_seed: u64, index: u64) -> u64 {
    sampling::derive_sample_seed(master_seed, index)
}

#[pyfunction]
#[pyo3(signature = (m, k, n_samples, seed, mode = "eigen"))]
fn estimate_f(m: PyRef<'_, Matrix>, k: usize, n_samples: usize, seed: u64, mode: &str) -> PyResult<StepCdf> {
    let inner = montecarlo::estimate_f(&m.inner, k, parse_mode(mode)?, n_samples, seed).map_err(to_py)?;
    Ok(StepCdf { inner })
}

/// Summary of a Monte Carlo run against `reference` (exact or estimated
/// by default): `(mean, stderr, per-sample distances)`.
#[pyfunction]
#[pyo3(signature = (m, k, n_samples, seed, mode = "eigen", reference = None))]
fn estimate_supnorm(
    py: Python<'_>,
    m: PyRef<'_, Matrix>,
    k: usize,
    n_samples: usize,
    seed: u64,
    mode: &str,
    reference: Option<PyRef<'_, StepCdf>>,
) -> PyResult<(f64, f64, Vec<f64>)> {
    let mode = parse_mode(mode)?;
    let reference = match reference {
        Some(r) => r.inner.clone(),
        None => montecarlo::default_reference(&m.inner, k, mode, n_samples, seed).map_err(to_py)?.0,
    };
    let matrix = &m.inner;
    let report = py
        .detach(|| montecarlo::estimate_supnorm(matrix, k, mode, n_samples, seed, &reference))
        .map_err(to_py)?;
    Ok((report.mean_supnorm, report.mean_stderr, report.samples))
}

#[pyfunction]
#[pyo3(signature = (m, k, mode = "eigen"))]
fn exact_f(m: PyRef<'_, Matrix>, k: usize, mode: &str) -> PyResult<StepCdf> {
    Ok(StepCdf { inner: oracle::exact_f(&m.inner, k, parse_mode(mode)?).map_err(to_py)? })
}

/// Exact law of `||F_A - F||_inf` as `(value, probability)` pairs.
#[pyfunction]
#[pyo3(signature = (m, k, mode = "eigen"))]
fn exact_supnorm_distribution(m: PyRef<'_, Matrix>, k: usize, mode: &str) -> PyResult<Vec<(f64, f64)>> {
    Ok(oracle::exact_supnorm_distribution(&m.inner, k, parse_mode(mode)?).map_err(to_py)?.atoms().to_vec())
}

#[pyfunction]
#[pyo3(signature = (m, k, x, r, mode = "eigen"))]
fn exact_pointwise_tail(m: PyRef<'_, Matrix>, k: usize, x: f64, r: f64, mode: &str) -> PyResult<f64> {
    oracle::exact_pointwise_tail(&m.inner, k, x, r, parse_mode(mode)?).map_err(to_py)
}

#[pyfunction]
fn halfones_exact_mean(n: usize, k: usize) -> PyResult<f64> {
    oracle::halfones_exact_mean(n, k).map_err(to_py)
}

#[pyfunction]
fn hypergeometric_pmf(n: usize, d: usize, k: usize) -> PyResult<Vec<f64>> {
    oracle::hypergeometric_pmf(n, d, k).map_err(to_py)
}

#[pyfunction]
fn theorem1_tail_bound(k: usize, r: f64) -> f64 {
    montecarlo::theorem1_tail_bound(k, r)
}

#[pyfunction]
fn theorem1_mean_bound(k: usize) -> f64 {
    montecarlo::theorem1_mean_bound(k)
}

#[pyfunction]
fn pointwise_tail_bound(k: usize, r: f64) -> f64 {
    montecarlo::pointwise_tail_bound(k, r)
}

/// Spectral gap of the random-transpositions walk on `S_n`, `2 <= n <= 6`.
#[pyfunction]
fn spectral_gap(py: Python<'_>, n: usize) -> PyResult<f64> {
    py.detach(|| walk::spectral_gap(n)).map_err(to_py)
}

/// `(row_sum_error, reversibility_error, invariance_error, gap)`.
#[pyfunction]
fn verify_kernel(py: Python<'_>, n: usize) -> PyResult<(f64, f64, f64, f64)> {
    let r = py.detach(|| walk::verify_kernel(n)).map_err(to_py)?;
    Ok((r.row_sum_error, r.reversibility_error, r.invariance_error, r.gap))
}

/// Largest `k n |||f_x|||^2` over the grid; raises if any exceeds 4.
#[pyfunction]
#[pyo3(signature = (m, k, x_grid, mode = "eigen"))]
fn verify_triple_norm_bound(m: PyRef<'_, Matrix>, k: usize, x_grid: Vec<f64>, mode: &str) -> PyResult<f64> {
    walk::verify_triple_norm_bound(&m.inner, k, &x_grid, parse_mode(mode)?).map_err(to_py)
}

#[pymodule]
fn pysubspec(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Matrix>()?;
    m.add_class::<StepCdf>()?;
    m.add_function(wrap_pyfunction!(ks_two_sample, m)?)?;
    m.add_function(wrap_pyfunction!(kolmogorov_q, m)?)?;
    m.add_function(wrap_pyfunction!(random_k_subset, m)?)?;
    m.add_function(wrap_pyfunction!(derive_sample_seed, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_f, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_supnorm, m)?)?;
    m.add_function(wrap_pyfunction!(exact_f, m)?)?;
    m.add_function(wrap_pyfunction!(exact_supnorm_distribution, m)?)?;
    m.add_function(wrap_pyfunction!(exact_pointwise_tail, m)?)?;
    m.add_function(wrap_pyfunction!(halfones_exact_mean, m)?)?;
    m.add_function(wrap_pyfunction!(hypergeometric_pmf, m)?)?;
    m.add_function(wrap_pyfunction!(theorem1_tail_bound, m)?)?;
    m.add_function(wrap_pyfunction!(theorem1_mean_bound, m)?)?;
    m.add_function(wrap_pyfunction!(pointwise_tail_bound, m)?)?;
    m.add_function(wrap_pyfunction!(spectral_gap, m)?)?;
    m.add_function(wrap_pyfunction!(verify_kernel, m)?)?;
    m.add_function(wrap_pyfunction!(verify_triple_norm_bound, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
