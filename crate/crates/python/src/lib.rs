//! Python bindings for `affine-bv`.
//!
//! Bit strings cross the boundary as `'0'`/`'1'` strings, most significant
//! bit first; truth tables as strings over `0`, `1` and `-`.

use std::collections::BTreeMap;

use affine_bv::algorithms::{self, Mode, RunConfig, VariantPolicy};
use affine_bv::analysis::{self, DcFractions, SweepMode};
use affine_bv::boolfn::{self, BitString};
use affine_bv::rng::DEFAULT_SEED;
use affine_bv::statevector::OracleVariant;
use pyo3::exceptions::{PyMemoryError, PyValueError};
use pyo3::prelude::*;

fn to_py(e: affine_bv::Error) -> PyErr {
    match e {
        affine_bv::Error::RegisterLimit { .. } => PyMemoryError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn variant(name: &str) -> PyResult<OracleVariant> {
    match name {
        "plus" => Ok(OracleVariant::Plus),
        "minus" => Ok(OracleVariant::Minus),
        other => Err(PyValueError::new_err(format!(
            "unknown oracle variant {other:?}"
        ))),
    }
}

fn bits(s: &str) -> PyResult<BitString> {
    s.parse::<BitString>().map_err(to_py)
}

#[pyclass(
    name = "AffineSpec",
    module = "affine_bv",
    frozen,
    eq,
    hash,
    from_py_object
)]
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PyAffineSpec {
    inner: boolfn::AffineSpec,
}

#[pymethods]
impl PyAffineSpec {
    #[new]
    #[pyo3(signature = (linear, affinity = false))]
    fn new(linear: &str, affinity: bool) -> PyResult<Self> {
        let inner = boolfn::AffineSpec::new(bits(linear)?, affinity).map_err(to_py)?;
        Ok(Self { inner })
    }

    /// Every affine function of `n` inputs, ordered by (coefficients, affinity).
    #[staticmethod]
    fn all(n: usize) -> PyResult<Vec<Self>> {
        let specs = boolfn::AffineSpec::all(n).map_err(to_py)?;
        Ok(specs.into_iter().map(|inner| Self { inner }).collect())
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn linear(&self) -> String {
        self.inner.linear_coeffs().to_string()
    }

    #[getter]
    fn affinity(&self) -> bool {
        self.inner.affinity()
    }

    fn is_linear(&self) -> bool {
        self.inner.is_linear()
    }

    fn complement(&self) -> Self {
        Self {
            inner: self.inner.complement(),
        }
    }

    fn eval(&self, x: &str) -> PyResult<bool> {
        self.inner.eval(&bits(x)?).map_err(to_py)
    }

    fn truth_table(&self) -> PyResult<String> {
        Ok(boolfn::truth_table(&self.inner).map_err(to_py)?.to_string())
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!(
            "AffineSpec('{}', {})",
            self.linear(),
            if self.affinity() { "True" } else { "False" }
        )
    }
}

#[pyclass(name = "PartialFunction", module = "affine_bv", frozen)]
pub struct PyPartialFunction {
    inner: boolfn::PartialFunction,
}

#[pymethods]
impl PyPartialFunction {
    /// `table` has `2**n` characters from `0`, `1`, `-`.
    #[new]
    fn new(n: usize, table: &str) -> PyResult<Self> {
        let inner = boolfn::parse_function_file(&format!("n={n}\n{table}\n")).map_err(to_py)?;
        Ok(Self { inner })
    }

    /// The partial function that agrees with `spec` except at `dc_indices`.
    #[staticmethod]
    fn mask(spec: PyRef<'_, PyAffineSpec>, dc_indices: Vec<usize>) -> PyResult<Self> {
        let table = boolfn::truth_table(&spec.inner).map_err(to_py)?;
        let inner = boolfn::mask(&table, dc_indices).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn table(&self) -> String {
        self.inner.to_string()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn dc_count(&self) -> usize {
        self.inner.dc_count()
    }

    fn n0_prime(&self) -> usize {
        self.inner.n0_prime()
    }

    fn n1_prime(&self) -> usize {
        self.inner.n1_prime()
    }

    fn dc_indices(&self) -> Vec<usize> {
        self.inner.dc_indices().collect()
    }

    fn is_consistent_with(&self, spec: PyRef<'_, PyAffineSpec>) -> bool {
        self.inner.is_consistent_with(&spec.inner)
    }

    /// `(d0, d1)` relative to the completion `spec`.
    fn dc_split(&self, spec: PyRef<'_, PyAffineSpec>) -> PyResult<(usize, usize)> {
        let table = boolfn::truth_table(&spec.inner).map_err(to_py)?;
        let s = boolfn::dc_split(&self.inner, &table).map_err(to_py)?;
        Ok((s.d0, s.d1))
    }

    fn completions(&self) -> PyResult<Vec<PyAffineSpec>> {
        let specs = boolfn::consistent_affine_completions(&self.inner).map_err(to_py)?;
        Ok(specs
            .into_iter()
            .map(|inner| PyAffineSpec { inner })
            .collect())
    }

    /// Contents of the equivalent `.bfn` file.
    fn to_file_text(&self) -> String {
        boolfn::write_function_file(&self.inner)
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("PartialFunction({}, '{}')", self.inner.n(), self.inner)
    }
}

#[pyfunction]
fn parse_function_file(text: &str) -> PyResult<PyPartialFunction> {
    let inner = boolfn::parse_function_file(text).map_err(to_py)?;
    Ok(PyPartialFunction { inner })
}

/// `(gamma0, gamma1)` for `n` inputs with `d0` and `d1` don't cares.
#[pyfunction]
fn gammas(n: usize, d0: usize, d1: usize) -> PyResult<(f64, f64)> {
    let g = analysis::gammas(n, d0, d1).map_err(to_py)?;
    Ok((g.gamma0, g.gamma1))
}

#[pyfunction]
fn p_linear(d: f64, d1: f64) -> PyResult<f64> {
    Ok(analysis::p_linear(&DcFractions::new(d, d1).map_err(to_py)?))
}

#[pyfunction]
fn p_affine(d: f64, d1: f64) -> PyResult<f64> {
    Ok(analysis::p_affine(&DcFractions::new(d, d1).map_err(to_py)?))
}

#[pyfunction]
fn in_linear_class(d: f64, d1: f64) -> PyResult<bool> {
    Ok(analysis::in_linear_class(
        &DcFractions::new(d, d1).map_err(to_py)?,
    ))
}

#[pyfunction]
fn in_affine_class(d: f64, d1: f64) -> PyResult<bool> {
    Ok(analysis::in_affine_class(
        &DcFractions::new(d, d1).map_err(to_py)?,
    ))
}

/// Exact one-query distribution over `C`.
#[pyfunction]
#[pyo3(signature = (partial, oracle = "plus"))]
fn one_query_distribution(
    partial: PyRef<'_, PyPartialFunction>,
    oracle: &str,
) -> PyResult<Vec<f64>> {
    algorithms::one_query_distribution(&partial.inner, variant(oracle)?).map_err(to_py)
}

/// Exact two-query distribution indexed by `2 * C + c_n`.
#[pyfunction]
#[pyo3(signature = (partial, oracle = "plus"))]
fn two_query_distribution(
    partial: PyRef<'_, PyPartialFunction>,
    oracle: &str,
) -> PyResult<Vec<f64>> {
    algorithms::two_query_distribution(&partial.inner, variant(oracle)?).map_err(to_py)
}

/// Majority vote over seeded shots. Returns a dict with `linear`,
/// `affinity` (None in linear mode), `votes`, `oracle`, `shots`, `seed`,
/// `ambiguous` and `variant_anomaly`.
#[pyfunction]
#[pyo3(signature = (partial, mode = "affine", oracle = "auto", trials = algorithms::DEFAULT_TRIALS_PER_ORACLE, seed = DEFAULT_SEED))]
fn identify<'py>(
    py: Python<'py>,
    partial: &Bound<'py, PyPartialFunction>,
    mode: &str,
    oracle: &str,
    trials: usize,
    seed: u64,
) -> PyResult<Bound<'py, pyo3::types::PyDict>> {
    let mode = match mode {
        "linear" => Mode::LinearOnly,
        "affine" => Mode::Affine,
        other => return Err(PyValueError::new_err(format!("unknown mode {other:?}"))),
    };
    let variant_policy = match oracle {
        "auto" => VariantPolicy::Auto,
        "plus" => VariantPolicy::ForcePlus,
        "minus" => VariantPolicy::ForceMinus,
        "vote" => VariantPolicy::BothWithVote,
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown oracle policy {other:?}"
            )))
        }
    };
    let config = RunConfig {
        mode,
        variant_policy,
        trials_per_oracle: trials,
        rng_seed: seed,
    };
    let inner = &partial.get().inner;
    let r = py
        .detach(|| algorithms::majority_vote(inner, &config))
        .map_err(to_py)?;
    let votes: BTreeMap<String, usize> = r
        .vote_table
        .iter()
        .map(|(c, k)| (c.to_string(), *k))
        .collect();
    let out = pyo3::types::PyDict::new(py);
    out.set_item("linear", r.linear.to_string())?;
    out.set_item("affinity", r.affinity)?;
    out.set_item("votes", votes)?;
    out.set_item("oracle", r.variant_used.to_string())?;
    out.set_item("shots", r.shots)?;
    out.set_item("seed", r.seed)?;
    out.set_item("ambiguous", r.ambiguous)?;
    out.set_item("variant_anomaly", r.variant_anomaly)?;
    Ok(out)
}

/// Landscape rows `(D, D1, P, in_class)`.
#[pyfunction]
#[pyo3(signature = (mode = "linear", steps = 100))]
fn sweep(py: Python<'_>, mode: &str, steps: usize) -> PyResult<Vec<(f64, f64, f64, bool)>> {
    let mode = match mode {
        "linear" => SweepMode::Linear,
        "affine" => SweepMode::Affine,
        other => return Err(PyValueError::new_err(format!("unknown mode {other:?}"))),
    };
    let rows = py
        .detach(|| analysis::sweep_landscape(mode, steps))
        .map_err(to_py)?;
    Ok(rows
        .into_iter()
        .map(|r| (r.d, r.d1, r.probability, r.in_class))
        .collect())
}

#[pymodule]
fn affine_bv_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyAffineSpec>()?;
    m.add_class::<PyPartialFunction>()?;
    m.add_function(wrap_pyfunction!(parse_function_file, m)?)?;
    m.add_function(wrap_pyfunction!(gammas, m)?)?;
    m.add_function(wrap_pyfunction!(p_linear, m)?)?;
    m.add_function(wrap_pyfunction!(p_affine, m)?)?;
    m.add_function(wrap_pyfunction!(in_linear_class, m)?)?;
    m.add_function(wrap_pyfunction!(in_affine_class, m)?)?;
    m.add_function(wrap_pyfunction!(one_query_distribution, m)?)?;
    m.add_function(wrap_pyfunction!(two_query_distribution, m)?)?;
    m.add_function(wrap_pyfunction!(identify, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    Ok(())
}
