use manlab_core::linalg::CMatrix;
use manlab_core::man::{self as engine, LogBase};
use manlab_core::protocol;
use manlab_core::{ManError, OperatorAlgebra};
use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn err(e: ManError) -> PyErr {
    match e {
        ManError::IllConditioned(_) | ManError::Numerical(_) => {
            PyRuntimeError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn base(log_base: &str) -> PyResult<LogBase> {
    log_base.parse().map_err(|e: ManError| err(e))
}

fn to_py(py: Python<'_>, value: &impl serde::Serialize) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

fn matrix(rows: Vec<Vec<Complex64>>) -> PyResult<CMatrix> {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    if rows.iter().any(|r| r.len() != m) {
        return Err(PyValueError::new_err("ragged matrix"));
    }
    Ok(CMatrix::from_fn(n, m, |i, j| rows[i][j]))
}

fn unmatrix(m: &CMatrix) -> Vec<Vec<Complex64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

fn basis(rows: Vec<Vec<Complex64>>) -> PyResult<Vec<manlab_core::linalg::CVector>> {
    Ok(manlab_core::fixtures::columns(&matrix(rows)?))
}

/// Finite-dimensional *-algebra of operators on C^d.
#[pyclass(name = "Algebra", module = "manlab", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyAlgebra {
    inner: OperatorAlgebra,
}

impl From<OperatorAlgebra> for PyAlgebra {
    fn from(inner: OperatorAlgebra) -> Self {
        Self { inner }
    }
}

#[pymethods]
impl PyAlgebra {
    #[staticmethod]
    fn full(d: usize) -> PyResult<Self> {
        OperatorAlgebra::full(d).map(Into::into).map_err(err)
    }

    #[staticmethod]
    fn trivial(d: usize) -> PyResult<Self> {
        OperatorAlgebra::trivial(d).map(Into::into).map_err(err)
    }

    /// Blocks as `(n_J, d_J)` pairs with an optional basis-change unitary.
    #[staticmethod]
    #[pyo3(signature = (blocks, basis_change=None))]
    fn structural(
        blocks: Vec<(usize, usize)>,
        basis_change: Option<Vec<Vec<Complex64>>>,
    ) -> PyResult<Self> {
        let u = basis_change.map(matrix).transpose()?;
        OperatorAlgebra::structural(&blocks, u.as_ref())
            .map(Into::into)
            .map_err(err)
    }

    /// Maximal abelian algebra diagonal in the columns of `unitary`.
    #[staticmethod]
    fn masa(unitary: Vec<Vec<Complex64>>) -> PyResult<Self> {
        OperatorAlgebra::masa(&basis(unitary)?)
            .map(Into::into)
            .map_err(err)
    }

    /// Operators supported on `region` (0-based sites).
    #[staticmethod]
    fn lattice(site_dims: Vec<usize>, region: Vec<usize>) -> PyResult<Self> {
        OperatorAlgebra::lattice(&site_dims, &region)
            .map(Into::into)
            .map_err(err)
    }

    #[staticmethod]
    fn generated(generators: Vec<Vec<Vec<Complex64>>>, dim: usize) -> PyResult<Self> {
        let gens = generators
            .into_iter()
            .map(matrix)
            .collect::<PyResult<Vec<_>>>()?;
        OperatorAlgebra::from_generators(&gens, dim)
            .map(Into::into)
            .map_err(err)
    }

    #[staticmethod]
    fn factor_left(d1: usize, d2: usize) -> PyResult<Self> {
        OperatorAlgebra::factor_left(d1, d2)
            .map(Into::into)
            .map_err(err)
    }

    #[staticmethod]
    fn factor_right(d1: usize, d2: usize) -> PyResult<Self> {
        OperatorAlgebra::factor_right(d1, d2)
            .map(Into::into)
            .map_err(err)
    }

    #[staticmethod]
    fn symmetric_operators(k: usize) -> PyResult<Self> {
        OperatorAlgebra::symmetric_operators(k)
            .map(Into::into)
            .map_err(err)
    }

    #[staticmethod]
    fn asymptotically_abelian(d: usize) -> PyResult<Self> {
        OperatorAlgebra::asymptotically_abelian(d)
            .map(Into::into)
            .map_err(err)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn algebra_dim(&self) -> usize {
        self.inner.algebra_dim()
    }

    fn commutant(&self) -> Self {
        self.inner.commutant().into()
    }

    fn center(&self) -> Self {
        self.inner.center().into()
    }

    fn conjugate(&self, unitary: Vec<Vec<Complex64>>) -> PyResult<Self> {
        self.inner
            .conjugate(&matrix(unitary)?)
            .map(Into::into)
            .map_err(err)
    }

    fn project(&self, x: Vec<Vec<Complex64>>) -> PyResult<Vec<Vec<Complex64>>> {
        Ok(unmatrix(&self.inner.project(&matrix(x)?)))
    }

    fn contains(&self, x: Vec<Vec<Complex64>>) -> PyResult<bool> {
        Ok(self.inner.contains(&matrix(x)?))
    }

    fn summary(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &self.inner.summary().map_err(err)?)
    }

    fn __repr__(&self) -> String {
        format!(
            "Algebra(dim={}, algebra_dim={})",
            self.inner.dim(),
            self.inner.algebra_dim()
        )
    }
}

/// S(A:B) by `omega`, `projection`, `collinear` or `entropy`.
#[pyfunction]
#[pyo3(signature = (a, b, method="omega", log_base="2"))]
fn man(
    py: Python<'_>,
    a: &PyAlgebra,
    b: &PyAlgebra,
    method: &str,
    log_base: &str,
) -> PyResult<Py<PyAny>> {
    let base = base(log_base)?;
    let (a, b) = (&a.inner, &b.inner);
    let report = match method {
        "omega" => engine::man_omega(a, b, base),
        "projection" => engine::man_projection(a, b, base),
        "collinear" => engine::man_collinear(a, b, base),
        "entropy" => engine::entropy_decomposition_man(a, b, base).map(|(r, _)| r),
        other => return Err(PyValueError::new_err(format!("unknown method {other:?}"))),
    }
    .map_err(err)?;
    to_py(py, &report)
}

#[pyfunction]
#[pyo3(signature = (a, log_base="2"))]
fn self_man(py: Python<'_>, a: &PyAlgebra, log_base: &str) -> PyResult<Py<PyAny>> {
    to_py(
        py,
        &engine::self_man(&a.inner, base(log_base)?).map_err(err)?,
    )
}

#[pyfunction]
#[pyo3(signature = (a, b, log_base="2"))]
fn bounds(py: Python<'_>, a: &PyAlgebra, b: &PyAlgebra, log_base: &str) -> PyResult<Py<PyAny>> {
    to_py(
        py,
        &engine::man_bounds(&a.inner, &b.inner, base(log_base)?).map_err(err)?,
    )
}

#[pyfunction]
fn orbit_averaged_man(a: &PyAlgebra, b: &PyAlgebra) -> PyResult<f64> {
    engine::orbit_averaged_man(&a.inner, &b.inner).map_err(err)
}

/// Closed forms for region algebras on identical sites (0-based regions).
#[pyfunction]
#[pyo3(signature = (site_dims, s1, s2, log_base="2"))]
fn lattice_man(
    py: Python<'_>,
    site_dims: Vec<usize>,
    s1: Vec<usize>,
    s2: Vec<usize>,
    log_base: &str,
) -> PyResult<Py<PyAny>> {
    to_py(
        py,
        &engine::lattice_man(&site_dims, &s1, &s2, base(log_base)?).map_err(err)?,
    )
}

/// Quantumness of the basis in the columns of `u` against that of `v`.
#[pyfunction]
fn quantumness(
    py: Python<'_>,
    u: Vec<Vec<Complex64>>,
    v: Vec<Vec<Complex64>>,
) -> PyResult<Py<PyAny>> {
    to_py(
        py,
        &engine::quantumness(&basis(u)?, &basis(v)?).map_err(err)?,
    )
}

#[pyfunction]
#[pyo3(signature = (a, u, log_base="2"))]
fn a_otoc(
    py: Python<'_>,
    a: &PyAlgebra,
    u: Vec<Vec<Complex64>>,
    log_base: &str,
) -> PyResult<Py<PyAny>> {
    to_py(
        py,
        &engine::a_otoc(&a.inner, &matrix(u)?, base(log_base)?).map_err(err)?,
    )
}

#[pyfunction]
#[pyo3(signature = (a, b, samples=protocol::DEFAULT_SAMPLES, seed=0))]
fn mc_man(
    py: Python<'_>,
    a: &PyAlgebra,
    b: &PyAlgebra,
    samples: usize,
    seed: u64,
) -> PyResult<Py<PyAny>> {
    let r = py
        .detach(|| protocol::mc_man_direct(&a.inner, &b.inner, samples, seed))
        .map_err(err)?;
    to_py(py, &r)
}

/// Choi-state protocol; self-MAN when `b` is omitted.
#[pyfunction]
#[pyo3(signature = (a, b=None, shots=None, seed=0))]
fn protocol_choi(
    py: Python<'_>,
    a: &PyAlgebra,
    b: Option<&PyAlgebra>,
    shots: Option<u64>,
    seed: u64,
) -> PyResult<Py<PyAny>> {
    let r = match b {
        Some(b) => protocol::protocol_choi(&a.inner, &b.inner, shots, seed),
        None => protocol::protocol_choi_self(&a.inner, shots, seed),
    }
    .map_err(err)?;
    to_py(py, &r)
}

/// Random-state protocol; self-MAN when `b` is omitted.
#[pyfunction]
#[pyo3(signature = (a, b=None, samples=protocol::DEFAULT_SAMPLES, shots=None, seed=0))]
fn protocol_stochastic(
    py: Python<'_>,
    a: &PyAlgebra,
    b: Option<&PyAlgebra>,
    samples: usize,
    shots: Option<u64>,
    seed: u64,
) -> PyResult<Py<PyAny>> {
    let r = py
        .detach(|| match b {
            Some(b) => protocol::protocol_stochastic(&a.inner, &b.inner, samples, shots, seed),
            None => protocol::protocol_stochastic_self(&a.inner, samples, shots, seed),
        })
        .map_err(err)?;
    to_py(py, &r)
}

#[pyfunction]
#[pyo3(signature = (a, b, epsilon, samples=1000, state_samples=32, seed=0))]
fn markov_check(
    py: Python<'_>,
    a: &PyAlgebra,
    b: &PyAlgebra,
    epsilon: f64,
    samples: usize,
    state_samples: usize,
    seed: u64,
) -> PyResult<Py<PyAny>> {
    let r = py
        .detach(|| {
            protocol::markov_bound_check(&a.inner, &b.inner, epsilon, samples, state_samples, seed)
        })
        .map_err(err)?;
    to_py(py, &r)
}

#[pymodule]
fn manlab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyAlgebra>()?;
    m.add_function(wrap_pyfunction!(man, m)?)?;
    m.add_function(wrap_pyfunction!(self_man, m)?)?;
    m.add_function(wrap_pyfunction!(bounds, m)?)?;
    m.add_function(wrap_pyfunction!(orbit_averaged_man, m)?)?;
    m.add_function(wrap_pyfunction!(lattice_man, m)?)?;
    m.add_function(wrap_pyfunction!(quantumness, m)?)?;
    m.add_function(wrap_pyfunction!(a_otoc, m)?)?;
    m.add_function(wrap_pyfunction!(mc_man, m)?)?;
    m.add_function(wrap_pyfunction!(protocol_choi, m)?)?;
    m.add_function(wrap_pyfunction!(protocol_stochastic, m)?)?;
    m.add_function(wrap_pyfunction!(markov_check, m)?)?;
    Ok(())
}
