//! Python bindings for `qwrw`.
//!
//! Complex amplitudes cross the boundary as Python `complex`, matrices as
//! nested lists, and run reports as plain dicts.

use num_complex::Complex64;
use pyo3::exceptions::{PyMemoryError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyModule};

use qwrw::analysis::{self, Distribution};
use qwrw::bridge;
use qwrw::coin::{self, Mat};
use qwrw::experiment::{self, ExperimentConfig};
use qwrw::verify::{self as checks, VerifyPlan};
use qwrw::walk;

fn to_py_err(e: qwrw::Error) -> PyErr {
    match e {
        qwrw::Error::Config(_) | qwrw::Error::Usage(_) | qwrw::Error::Parse(_) | qwrw::Error::UndefinedMoments => {
            PyValueError::new_err(e.to_string())
        }
        qwrw::Error::Capacity(_) => PyMemoryError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn matrix<const R: usize, const C: usize>(m: &Mat<R, C>) -> Vec<Vec<f64>> {
    m.0.iter().map(|row| row.to_vec()).collect()
}

fn check_site(d: usize, site: usize) -> PyResult<()> {
    if site == 0 || site > d {
        return Err(PyValueError::new_err(format!("site {site} outside 1..={d}")));
    }
    Ok(())
}

/// The Hadamard coin as a 2x2 nested list.
#[pyfunction]
fn hadamard() -> Vec<Vec<f64>> {
    matrix(&coin::hadamard())
}

/// The 4x4 column-stochastic transition matrix of the chain.
#[pyfunction]
fn transition_a() -> Vec<Vec<f64>> {
    matrix(&coin::transition_a())
}

/// The 2x4 projection from chain rows to coin states.
#[pyfunction]
fn projection_b() -> Vec<Vec<f64>> {
    matrix(&coin::projection_b())
}

/// Max-abs residuals of the three coin-algebra identities, keyed by name.
#[pyfunction]
fn verify_coin_algebra() -> Vec<(&'static str, f64)> {
    vec![
        ("decomposition", coin::verify_decomposition()),
        ("projector_identities", coin::verify_projector_identities()),
        ("commutators", coin::verify_commutators()),
    ]
}

/// Lattice size, start site and step count.
#[pyclass(name = "LatticeConfig", module = "pyqwrw", frozen, from_py_object)]
#[derive(Clone)]
struct PyLatticeConfig(walk::LatticeConfig);

#[pymethods]
impl PyLatticeConfig {
    #[new]
    #[pyo3(signature = (d, n, start=None))]
    fn new(d: usize, n: usize, start: Option<usize>) -> PyResult<Self> {
        let cfg = match start {
            Some(s) => walk::LatticeConfig::new(d, s, n),
            None => walk::LatticeConfig::centered(d, n),
        };
        cfg.map(Self).map_err(to_py_err)
    }

    #[getter]
    fn d(&self) -> usize {
        self.0.d()
    }

    #[getter]
    fn start(&self) -> usize {
        self.0.start()
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    /// True when no amplitude can reach either edge within `n` steps.
    fn interior_safe(&self) -> bool {
        self.0.interior_safe()
    }

    fn __repr__(&self) -> String {
        format!(
            "LatticeConfig(d={}, n={}, start={})",
            self.0.d(),
            self.0.n(),
            self.0.start()
        )
    }
}

/// Hadamard walk state: two complex coin amplitudes per site.
#[pyclass(name = "QuantumState", module = "pyqwrw", from_py_object)]
#[derive(Clone)]
struct PyQuantumState(walk::QuantumState);

#[pymethods]
impl PyQuantumState {
    #[new]
    fn new(amplitudes: Vec<Complex64>) -> PyResult<Self> {
        walk::QuantumState::from_amplitudes(amplitudes)
            .map(Self)
            .map_err(to_py_err)
    }

    /// Point mass at 1-based `site` with coin amplitudes `(a, b)`.
    #[staticmethod]
    fn point(d: usize, site: usize, a: Complex64, b: Complex64) -> PyResult<Self> {
        check_site(d, site)?;
        Ok(Self(walk::QuantumState::point(d, site, [a, b])))
    }

    #[getter]
    fn d(&self) -> usize {
        self.0.d()
    }

    fn amplitudes(&self) -> Vec<Complex64> {
        self.0.amplitudes().to_vec()
    }

    fn norm_sqr(&self) -> f64 {
        self.0.norm_sqr()
    }

    /// Advance `steps` steps in place; returns the total norm lost at the edges.
    #[pyo3(signature = (steps=1))]
    fn advance(&mut self, steps: usize) -> f64 {
        (0..steps).map(|_| self.0.advance()).sum()
    }

    /// A new state `steps` steps later.
    fn evolve(&self, steps: usize) -> Self {
        Self(walk::evolve(self.0.clone(), steps, walk::step_quantum))
    }

    /// Per-site probabilities of coin |0> and coin |1>.
    fn distribution(&self) -> (Vec<f64>, Vec<f64>) {
        let (p0, p1) = bridge::quantum_distribution(&self.0);
        (p0.into_values(), p1.into_values())
    }

    /// The chain state whose lift is this state.
    fn embed(&self) -> PyRwState {
        PyRwState(bridge::canonical_embed(&self.0))
    }

    fn __len__(&self) -> usize {
        self.0.d()
    }

    fn __eq__(&self, other: PyRef<'_, Self>) -> bool {
        self.0 == other.0
    }

    fn __repr__(&self) -> String {
        format!("QuantumState(d={}, norm_sqr={:.6})", self.0.d(), self.0.norm_sqr())
    }
}

/// Four-row chain state, with the power of sqrt(2) carried by scaled steps.
#[pyclass(name = "RwState", module = "pyqwrw", from_py_object)]
#[derive(Clone)]
struct PyRwState(walk::RwState);

#[pymethods]
impl PyRwState {
    #[new]
    #[pyo3(signature = (populations, scale_exp=0))]
    fn new(populations: Vec<Complex64>, scale_exp: u32) -> PyResult<Self> {
        walk::RwState::from_populations(populations, scale_exp)
            .map(Self)
            .map_err(to_py_err)
    }

    /// Point mass at 1-based `site` with the four row values.
    #[staticmethod]
    fn point(d: usize, site: usize, rows: [Complex64; 4]) -> PyResult<Self> {
        check_site(d, site)?;
        Ok(Self(walk::RwState::point(d, site, rows)))
    }

    /// Build from four equal-length row vectors.
    #[staticmethod]
    fn vectorize(rows: [Vec<Complex64>; 4]) -> PyResult<Self> {
        walk::RwState::vectorize(&rows).map(Self).map_err(to_py_err)
    }

    #[getter]
    fn d(&self) -> usize {
        self.0.d()
    }

    #[getter]
    fn scale_exp(&self) -> u32 {
        self.0.scale_exp()
    }

    fn populations(&self) -> Vec<Complex64> {
        self.0.populations().to_vec()
    }

    /// The four rows as separate length-`d` vectors.
    fn devectorize(&self) -> [Vec<Complex64>; 4] {
        self.0.devectorize()
    }

    fn population(&self) -> Complex64 {
        self.0.population()
    }

    /// Advance `steps` steps in place; returns the population lost at the edges.
    #[pyo3(signature = (steps=1, scaled=false))]
    fn advance(&mut self, steps: usize, scaled: bool) -> Complex64 {
        (0..steps).map(|_| self.0.advance(scaled)).sum()
    }

    /// A new state `steps` steps later.
    #[pyo3(signature = (steps, scaled=false))]
    fn evolve(&self, steps: usize, scaled: bool) -> Self {
        Self(walk::evolve(self.0.clone(), steps, |s| walk::step_rw(s, scaled)))
    }

    /// The quantum state obtained by projecting the rows onto coin states.
    fn lift(&self) -> PyQuantumState {
        PyQuantumState(bridge::lift(&self.0).to_quantum())
    }

    /// Coin probabilities recovered from a chain evolved `n` unscaled (or
    /// `n` scaled) steps from the lifted initial state.
    fn quantum_distribution(&self, n: usize) -> PyResult<(Vec<f64>, Vec<f64>)> {
        let (p0, p1) = bridge::quantum_distribution_from_rw(&self.0, n).map_err(to_py_err)?;
        Ok((p0.into_values(), p1.into_values()))
    }

    fn __len__(&self) -> usize {
        self.0.d()
    }

    fn __eq__(&self, other: PyRef<'_, Self>) -> bool {
        self.0 == other.0
    }

    fn __repr__(&self) -> String {
        let p = self.0.population();
        format!(
            "RwState(d={}, scale_exp={}, population={}{:+}i)",
            self.0.d(),
            self.0.scale_exp(),
            p.re,
            p.im
        )
    }
}

/// Mean, variance and peak sites of a nonnegative per-site distribution.
#[pyfunction]
#[pyo3(signature = (values, threshold=analysis::PEAK_THRESHOLD))]
fn moments<'py>(py: Python<'py>, values: Vec<f64>, threshold: f64) -> PyResult<Bound<'py, PyDict>> {
    let m = analysis::moments_with_threshold(&Distribution::new(values), threshold).map_err(to_py_err)?;
    let out = PyDict::new(py);
    out.set_item("mean", m.mean)?;
    out.set_item("variance", m.variance)?;
    out.set_item("peaks", m.peaks)?;
    Ok(out)
}

/// Total probability of the two coin distributions.
#[pyfunction]
fn energy(p0: Vec<f64>, p1: Vec<f64>) -> f64 {
    analysis::energy(&Distribution::new(p0), &Distribution::new(p1))
}

fn json_to_py<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (text,))
}

/// Simulate both models and return distributions, final states and the report.
///
/// `init` takes the same forms as the command line: `qw:a,b` or
/// `rw:r1,r2,r3,r4` with complex literals such as `1+0.5i`.
#[pyfunction]
#[pyo3(signature = (d=80, n=20, start=None, init=None, engine=None, seed=0))]
fn run<'py>(
    py: Python<'py>,
    d: usize,
    n: usize,
    start: Option<usize>,
    init: Option<&str>,
    engine: Option<&str>,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let mut cfg = ExperimentConfig {
        d,
        n,
        start,
        seed,
        ..ExperimentConfig::default()
    };
    if let Some(init) = init {
        cfg.init = init.parse().map_err(to_py_err)?;
    }
    if let Some(engine) = engine {
        cfg.engine = engine.parse().map_err(to_py_err)?;
    }
    let out = py.detach(|| experiment::run(&cfg)).map_err(to_py_err)?;
    let dict = PyDict::new(py);
    dict.set_item("p0_qw", out.p0_qw.into_values())?;
    dict.set_item("p1_qw", out.p1_qw.into_values())?;
    dict.set_item("p0_rw", out.p0_rw.into_values())?;
    dict.set_item("p1_rw", out.p1_rw.into_values())?;
    dict.set_item("quantum", PyQuantumState(out.quantum))?;
    dict.set_item("chain", PyRwState(out.chain))?;
    dict.set_item("report", json_to_py(py, &experiment::to_json(&out.report))?)?;
    Ok(dict)
}

/// Run the identity and equivalence checks; returns a list of check dicts.
#[pyfunction]
#[pyo3(signature = (sites=None, steps=None, seed=0))]
fn verify<'py>(
    py: Python<'py>,
    sites: Option<Vec<usize>>,
    steps: Option<Vec<usize>>,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let mut plan = VerifyPlan {
        seed,
        ..VerifyPlan::default()
    };
    if let Some(sites) = sites {
        plan.sites = sites;
    }
    if let Some(steps) = steps {
        plan.steps = steps;
    }
    let report = py.detach(|| checks::run(&plan)).map_err(to_py_err)?;
    let text = serde_json::to_string(&report.checks).expect("checks serialize");
    json_to_py(py, &text)
}

#[pymodule]
pub fn pyqwrw(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyLatticeConfig>()?;
    m.add_class::<PyQuantumState>()?;
    m.add_class::<PyRwState>()?;
    m.add_function(wrap_pyfunction!(hadamard, m)?)?;
    m.add_function(wrap_pyfunction!(transition_a, m)?)?;
    m.add_function(wrap_pyfunction!(projection_b, m)?)?;
    m.add_function(wrap_pyfunction!(verify_coin_algebra, m)?)?;
    m.add_function(wrap_pyfunction!(moments, m)?)?;
    m.add_function(wrap_pyfunction!(energy, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
