use std::path::Path;

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use hcl_core::cli::ProblemConfig;
use hcl_core::solve::{self, Mode};
use hcl_core::spectra::{self, HermitianMatrix};
use hcl_core::{grid, subsol, symfunc, Error, LambdaTuple};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Domain(_) | Error::Config(_) | Error::Inadmissible(_) | Error::Range(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn tuple(v: Vec<f64>) -> PyResult<LambdaTuple> {
    LambdaTuple::new(v).map_err(py_err)
}

/// A symmetric function `f` on its Gårding cone.
#[pyclass(name = "FuncFamily", module = "hcl")]
struct PyFamily {
    inner: symfunc::FuncFamily,
}

#[pymethods]
impl PyFamily {
    #[staticmethod]
    fn log_det(n: usize) -> PyResult<Self> {
        Ok(Self { inner: symfunc::FuncFamily::log_det(n).map_err(py_err)? })
    }

    #[staticmethod]
    fn sigma_root(n: usize, k: usize) -> PyResult<Self> {
        Ok(Self { inner: symfunc::FuncFamily::sigma_root(n, k).map_err(py_err)? })
    }

    #[staticmethod]
    fn log_sigma(n: usize, k: usize) -> PyResult<Self> {
        Ok(Self { inner: symfunc::FuncFamily::log_sigma(n, k).map_err(py_err)? })
    }

    #[staticmethod]
    fn sigma_quotient(n: usize, k: usize, l: usize) -> PyResult<Self> {
        Ok(Self { inner: symfunc::FuncFamily::sigma_quotient(n, k, l).map_err(py_err)? })
    }

    #[staticmethod]
    fn guan_mixed(n: usize, k: usize, beta: Vec<f64>) -> PyResult<Self> {
        Ok(Self { inner: symfunc::FuncFamily::guan_mixed(n, k, beta).map_err(py_err)? })
    }

    /// Parses `{"kind": ..., "n": ...}`.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner: symfunc::FuncFamily = serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        inner.validate().map_err(py_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.short_name()
    }

    fn eval(&self, lam: Vec<f64>) -> PyResult<f64> {
        self.inner.eval_slice(&lam).map_err(py_err)
    }

    fn grad(&self, lam: Vec<f64>) -> PyResult<Vec<f64>> {
        self.inner.grad_slice(&lam).map_err(py_err)
    }

    fn admits(&self, lam: Vec<f64>) -> bool {
        self.inner.admits(&lam)
    }

    fn sup_boundary(&self) -> f64 {
        self.inner.sup_boundary()
    }

    fn __repr__(&self) -> String {
        format!("FuncFamily({})", self.inner.short_name())
    }
}

/// Hermitian eigenvalues, ascending, of `re + i·im` (row lists).
#[pyfunction]
fn eigvalsh(re: Vec<Vec<f64>>, im: Vec<Vec<f64>>) -> PyResult<Vec<f64>> {
    let n = re.len();
    if im.len() != n || re.iter().chain(&im).any(|r| r.len() != n) {
        return Err(PyValueError::new_err("re and im must be square with equal shape"));
    }
    let mut data = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            data[j * n + i] = Complex64::new(re[i][j], im[i][j]);
        }
    }
    let m = HermitianMatrix::new(n, data).map_err(py_err)?;
    Ok(spectra::eigh(&m).map_err(py_err)?.values)
}

#[pyfunction]
fn sigma_k(lam: Vec<f64>, k: usize) -> PyResult<f64> {
    symfunc::sigma_k(&tuple(lam)?, k).map_err(py_err)
}

/// Eigenvalue localization of the bordered matrix with diagonal `d`, border
/// `a_re + i·a_im` and the given corner.
#[pyfunction]
fn localize<'py>(
    py: Python<'py>,
    d: Vec<f64>,
    a_re: Vec<f64>,
    a_im: Vec<f64>,
    corner: f64,
    epsilon: f64,
) -> PyResult<Bound<'py, PyDict>> {
    if a_re.len() != a_im.len() {
        return Err(PyValueError::new_err("a_re and a_im differ in length"));
    }
    let a = a_re.iter().zip(&a_im).map(|(&r, &i)| Complex64::new(r, i)).collect();
    let b = spectra::BorderedHermitian::new(d, a, corner).map_err(py_err)?;
    let v = spectra::localize(&b, epsilon).map_err(py_err)?;
    let out = PyDict::new(py);
    out.set_item("satisfied", v.satisfied)?;
    out.set_item("threshold", v.threshold)?;
    out.set_item("eigenvalues", v.witness)?;
    out.set_item("worst_ratio", v.worst_ratio)?;
    out.set_item("boundary_hits", v.boundary_hits)?;
    Ok(out)
}

#[pyfunction]
fn growth_threshold(d: Vec<f64>, a_re: Vec<f64>, a_im: Vec<f64>, epsilon: f64) -> PyResult<f64> {
    let a = a_re.iter().zip(&a_im).map(|(&r, &i)| Complex64::new(r, i)).collect();
    let b = spectra::BorderedHermitian::new(d, a, 0.0).map_err(py_err)?;
    spectra::growth_threshold(&b, epsilon).map_err(py_err)
}

/// `(in_gamma, in_gamma_g)` for `λ`.
#[pyfunction]
fn in_gamma_g(f: &PyFamily, lam: Vec<f64>) -> PyResult<(bool, bool)> {
    let v = symfunc::in_gamma_g(&f.inner, &tuple(lam)?, symfunc::DEFAULT_T_MAX).map_err(py_err)?;
    Ok((v.in_gamma, v.in_gamma_g))
}

/// `("yes" | "no" | "indeterminate", analytic)`.
#[pyfunction]
fn is_c_subsolution(f: &PyFamily, lam: Vec<f64>, psi: f64) -> PyResult<(String, bool)> {
    let r = subsol::is_c_subsolution(&f.inner, &tuple(lam)?, psi, symfunc::DEFAULT_T_MAX).map_err(py_err)?;
    Ok((format!("{:?}", r.verdict).to_lowercase(), r.analytic))
}

/// Constants `R0, ε1, δ0, ε` of the dichotomy context.
#[pyfunction]
fn dichotomy_context<'py>(
    py: Python<'py>,
    f: &PyFamily,
    sigma: f64,
    mu: Vec<f64>,
    delta: f64,
    r: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let ctx = subsol::build_context(&f.inner, sigma, &tuple(mu)?, delta, r).map_err(py_err)?;
    let out = PyDict::new(py);
    out.set_item("r0", ctx.r0)?;
    out.set_item("eps1", ctx.eps1)?;
    out.set_item("delta0", ctx.delta0)?;
    out.set_item("epsilon", ctx.epsilon)?;
    Ok(out)
}

/// Solution `h` of `Δ_C h = 1`, `h = 0` on the boundary of the unit square
/// with `cells × cells` cells; values in row-major order.
#[pyfunction]
fn unit_poisson(cells: usize) -> PyResult<Vec<f64>> {
    let s = grid::SFactor::unit_square(cells);
    let d = std::sync::Arc::new(grid::GridDomain::product(1, &[], &[], &s).map_err(py_err)?);
    Ok(solve::unit_poisson(&d).map_err(py_err)?.into_values())
}

/// Solves the problem described by a JSON configuration.
#[pyfunction]
#[pyo3(signature = (config, base_dir = "."))]
fn solve_config<'py>(py: Python<'py>, config: &str, base_dir: &str) -> PyResult<Bound<'py, PyDict>> {
    let c: ProblemConfig = serde_json::from_str(config).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let spec = c.build(Path::new(base_dir)).map_err(py_err)?;
    let opts = c.options.solve_options();
    let r = py
        .detach(|| match spec.mode {
            Mode::Closed => solve::solve_closed(&spec, &opts),
            Mode::Dirichlet => solve::solve_dirichlet(&spec, &opts),
        })
        .map_err(py_err)?;
    let out = PyDict::new(py);
    out.set_item("c", r.c)?;
    out.set_item("iterations", r.iterations)?;
    out.set_item("residual", r.final_residual())?;
    out.set_item("ratio2nd", r.estimates.ratio2nd)?;
    out.set_item("bdry_ratio", r.estimates.bdry_ratio)?;
    out.set_item("sandwich_ok", r.estimates.sandwich_ok)?;
    out.set_item("counts", spec.domain.counts().to_vec())?;
    out.set_item("u", r.u.into_values())?;
    Ok(out)
}

#[pymodule]
fn hcl(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyFamily>()?;
    m.add_function(wrap_pyfunction!(eigvalsh, m)?)?;
    m.add_function(wrap_pyfunction!(sigma_k, m)?)?;
    m.add_function(wrap_pyfunction!(localize, m)?)?;
    m.add_function(wrap_pyfunction!(growth_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(in_gamma_g, m)?)?;
    m.add_function(wrap_pyfunction!(is_c_subsolution, m)?)?;
    m.add_function(wrap_pyfunction!(dichotomy_context, m)?)?;
    m.add_function(wrap_pyfunction!(unit_poisson, m)?)?;
    m.add_function(wrap_pyfunction!(solve_config, m)?)?;
    Ok(())
}
