//! Python bindings for `spinanneal`.
//!
//! Structured results (records, summaries, configs) cross the boundary as
//! plain dicts and lists produced through the stdlib `json` module, so the
//! Python side never depends on Rust layouts.

use num_complex::Complex64;
use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use serde_json::{json, Value};

use spinanneal::anneal::run_sweep_with;
use spinanneal::io::{column_values, columns, config_echo, render_results, RunConfig};
use spinanneal::merits::{coherence_l1, entanglement_entropy_in, fidelity, mean_magnetization};
use spinanneal::operators::{build_driver, build_target, build_trigger, interpolate};
use spinanneal::spectrum::{diagonalize, energy_gap, ground_degeneracy, DEFAULT_DEGENERACY_REL_TOL};
use spinanneal::{
    summarize, Bipartition, CouplingVector, Edge, Error, Execution, HermitianOperator, LogBase,
    ModelSpec, Preset, QuantumState, SpinGraph, SweepConfig, SweepResult,
};

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::Numerical(_) => PyRuntimeError::new_err(e.to_string()),
        Error::AtLambda { ref source, .. } if matches!(**source, Error::Numerical(_)) => {
            PyRuntimeError::new_err(e.to_string())
        }
        Error::Io { .. } => PyOSError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn json_err(e: serde_json::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_python<'py>(py: Python<'py>, value: &Value) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (value.to_string(),))
}

fn state_from(amplitudes: Vec<Complex64>) -> PyResult<QuantumState> {
    QuantumState::new(amplitudes).map_err(to_py_err)
}

fn parse_base(base: &str) -> PyResult<LogBase> {
    serde_json::from_value(Value::from(base)).map_err(json_err)
}

/// Interaction graph. Sites are numbered from 1 on the Python side.
#[pyclass(name = "SpinGraph", module = "pyspinanneal", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySpinGraph {
    inner: SpinGraph,
}

#[pymethods]
impl PySpinGraph {
    /// `edges` holds `(i, j, J)` triples with 1-based sites and i < j.
    #[new]
    fn new(n_sites: usize, edges: Vec<(usize, usize, f64)>, fields: Vec<f64>) -> PyResult<Self> {
        let edges = edges
            .into_iter()
            .map(|(i, j, coupling)| {
                if i == 0 || j == 0 {
                    return Err(PyValueError::new_err("sites are numbered from 1"));
                }
                Ok(Edge {
                    i: i - 1,
                    j: j - 1,
                    coupling,
                })
            })
            .collect::<PyResult<Vec<_>>>()?;
        SpinGraph::new(n_sites, edges, fields)
            .map(|inner| PySpinGraph { inner })
            .map_err(to_py_err)
    }

    /// Uniform coupling `J` and field `h` on a named preset topology.
    #[staticmethod]
    #[pyo3(signature = (name, j = -1.0, h = 1.0))]
    fn preset(name: &str, j: f64, h: f64) -> PyResult<Self> {
        let preset: Preset = name.parse().map_err(to_py_err)?;
        SpinGraph::preset(preset, j, h)
            .map(|inner| PySpinGraph { inner })
            .map_err(to_py_err)
    }

    /// `couplings` is `[J12, J13, J14, J23, J24, J34]`; entries for edges
    /// absent from the preset must be zero.
    #[staticmethod]
    #[pyo3(signature = (name, couplings, h = vec![1.0; 4]))]
    fn from_coupling_vector(name: &str, couplings: Vec<f64>, h: Vec<f64>) -> PyResult<Self> {
        let preset: Preset = name.parse().map_err(to_py_err)?;
        let couplings = CouplingVector::from_slice(&couplings).map_err(to_py_err)?;
        SpinGraph::from_coupling_vector(preset, &couplings, &h)
            .map(|inner| PySpinGraph { inner })
            .map_err(to_py_err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        serde_json::from_str(text)
            .map(|inner| PySpinGraph { inner })
            .map_err(json_err)
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(json_err)
    }

    #[getter]
    fn n_sites(&self) -> usize {
        self.inner.n_sites()
    }

    #[getter]
    fn edges(&self) -> Vec<(usize, usize, f64)> {
        self.inner.edges().iter().map(|e| (e.i + 1, e.j + 1, e.coupling)).collect()
    }

    #[getter]
    fn fields(&self) -> Vec<f64> {
        self.inner.fields().to_vec()
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!(
            "SpinGraph(n_sites={}, edges=[{}], fields={:?})",
            self.inner.n_sites(),
            self.inner.edge_listing(),
            self.inner.fields()
        )
    }
}

/// Outcome of one λ sweep.
#[pyclass(name = "SweepResult", module = "pyspinanneal", frozen)]
struct PySweepResult {
    inner: SweepResult,
}

#[pymethods]
impl PySweepResult {
    #[getter]
    fn lambdas(&self) -> Vec<f64> {
        self.inner.lambdas()
    }

    /// `(lambda*, gap*)` of the refined gap minimum.
    #[getter]
    fn min_gap(&self) -> (f64, f64) {
        (self.inner.min_gap.lambda, self.inner.min_gap.gap)
    }

    #[getter]
    fn target_ground_energy(&self) -> f64 {
        self.inner.target_ground_energy
    }

    #[getter]
    fn target_ground_degeneracy(&self) -> usize {
        self.inner.target_ground_degeneracy
    }

    #[getter]
    fn graph(&self) -> PySpinGraph {
        PySpinGraph {
            inner: self.inner.graph.clone(),
        }
    }

    #[getter]
    fn columns(&self) -> Vec<String> {
        columns(&self.inner)
    }

    /// One CSV column as a list of floats.
    fn column(&self, name: &str) -> PyResult<Vec<f64>> {
        column_values(&self.inner, name).map_err(to_py_err)
    }

    /// Records as a list of dicts keyed by column name.
    fn records<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let names = columns(&self.inner);
        let table = names
            .iter()
            .map(|n| column_values(&self.inner, n))
            .collect::<Result<Vec<_>, _>>()
            .map_err(to_py_err)?;
        let rows: Vec<Value> = (0..self.inner.records.len())
            .map(|k| {
                let mut row = serde_json::Map::new();
                for (name, col) in names.iter().zip(&table) {
                    let v = if name == "ground_degeneracy" {
                        Value::from(col[k] as u64)
                    } else {
                        Value::from(col[k])
                    };
                    row.insert(name.clone(), v);
                }
                Value::Object(row)
            })
            .collect();
        to_python(py, &Value::Array(rows))
    }

    fn summary<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let s = summarize(&self.inner).map_err(to_py_err)?;
        to_python(py, &serde_json::to_value(s).map_err(json_err)?)
    }

    /// The configuration that reproduces this result, as a dict.
    fn config<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_python(py, &config_echo(&self.inner))
    }

    #[pyo3(signature = (timestamp = "unspecified"))]
    fn to_csv(&self, timestamp: &str) -> PyResult<String> {
        render_results(&self.inner, timestamp).map_err(to_py_err)
    }

    fn __len__(&self) -> usize {
        self.inner.records.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "SweepResult(model={}, points={}, min_gap=({:.6}, {:.6e}))",
            self.inner.spec.model.name(),
            self.inner.records.len(),
            self.inner.min_gap.lambda,
            self.inner.min_gap.gap
        )
    }
}

fn model_spec(model: &str, trigger: &str, trigger_strength: Option<f64>) -> PyResult<ModelSpec> {
    let spec: ModelSpec = serde_json::from_value(json!({
        "model": model,
        "trigger": trigger,
        "trigger_strength": trigger_strength,
    }))
    .map_err(json_err)?;
    spec.validate().map_err(to_py_err)?;
    Ok(spec)
}

/// Runs a λ sweep of `model` on `graph`.
#[pyfunction]
#[pyo3(signature = (
    graph,
    model = "ising",
    trigger = "none",
    trigger_strength = None,
    lambda_points = 201,
    partitions = None,
    entropy_base = "natural",
    refine_gap = true,
    parallel = true,
))]
#[allow(clippy::too_many_arguments)]
fn run_sweep(
    py: Python<'_>,
    graph: &PySpinGraph,
    model: &str,
    trigger: &str,
    trigger_strength: Option<f64>,
    lambda_points: usize,
    partitions: Option<Vec<String>>,
    entropy_base: &str,
    refine_gap: bool,
    parallel: bool,
) -> PyResult<PySweepResult> {
    let spec = model_spec(model, trigger, trigger_strength)?;
    let partitions = partitions
        .map(|labels| {
            labels
                .iter()
                .map(|l| l.parse::<Bipartition>())
                .collect::<Result<Vec<_>, _>>()
        })
        .transpose()
        .map_err(to_py_err)?;
    let cfg = SweepConfig {
        lambda_points,
        partitions,
        refine_gap,
        entropy_base: parse_base(entropy_base)?,
        ..SweepConfig::default()
    };
    let execution = if parallel {
        Execution::Parallel
    } else {
        Execution::Sequential
    };
    let graph = graph.inner.clone();
    py.detach(move || run_sweep_with(&graph, &spec, &cfg, execution))
        .map(|inner| PySweepResult { inner })
        .map_err(to_py_err)
}

/// Runs the sweep described by a JSON config document (the CLI format).
#[pyfunction]
fn run_config(py: Python<'_>, text: &str) -> PyResult<PySweepResult> {
    let cfg = RunConfig::parse(text).map_err(to_py_err)?;
    let graph = cfg.graph.build().map_err(to_py_err)?;
    py.detach(move || spinanneal::run_sweep(&graph, &cfg.model, &cfg.sweep))
        .map(|inner| PySweepResult { inner })
        .map_err(to_py_err)
}

fn operator(
    graph: &PySpinGraph,
    lam: f64,
    model: &str,
    trigger: &str,
    trigger_strength: Option<f64>,
) -> PyResult<HermitianOperator> {
    let spec = model_spec(model, trigger, trigger_strength)?;
    let g = &graph.inner;
    let driver = build_driver(g.n_sites()).map_err(to_py_err)?;
    let target = build_target(g, spec.model);
    let trig = spec
        .effective_trigger()
        .map(|(kind, strength)| build_trigger(g, kind, strength))
        .transpose()
        .map_err(to_py_err)?;
    interpolate(&driver, &target, trig.as_ref(), lam).map_err(to_py_err)
}

/// Dense H(λ) as a list of rows of complex numbers.
#[pyfunction]
#[pyo3(signature = (graph, lam, model = "ising", trigger = "none", trigger_strength = None))]
fn hamiltonian(
    graph: &PySpinGraph,
    lam: f64,
    model: &str,
    trigger: &str,
    trigger_strength: Option<f64>,
) -> PyResult<Vec<Vec<Complex64>>> {
    let h = operator(graph, lam, model, trigger, trigger_strength)?;
    let m = h.matrix();
    Ok((0..m.nrows()).map(|r| m.row(r).iter().copied().collect()).collect())
}

/// Eigen-decomposition of H(λ): `(energies, states)` in ascending order,
/// each state a list of complex amplitudes in canonical phase.
#[pyfunction]
#[pyo3(signature = (graph, lam, model = "ising", trigger = "none", trigger_strength = None))]
fn spectrum(
    graph: &PySpinGraph,
    lam: f64,
    model: &str,
    trigger: &str,
    trigger_strength: Option<f64>,
) -> PyResult<(Vec<f64>, Vec<Vec<Complex64>>)> {
    let h = operator(graph, lam, model, trigger, trigger_strength)?;
    let es = diagonalize(&h).map_err(to_py_err)?;
    let states = es.states.iter().map(|s| s.amplitudes().to_vec()).collect();
    Ok((es.energies, states))
}

/// `(gap, ground_degeneracy)` of H(λ).
#[pyfunction]
#[pyo3(signature = (graph, lam, model = "ising", trigger = "none", trigger_strength = None))]
fn gap(
    graph: &PySpinGraph,
    lam: f64,
    model: &str,
    trigger: &str,
    trigger_strength: Option<f64>,
) -> PyResult<(f64, usize)> {
    let h = operator(graph, lam, model, trigger, trigger_strength)?;
    let es = diagonalize(&h).map_err(to_py_err)?;
    Ok((
        energy_gap(&es).map_err(to_py_err)?,
        ground_degeneracy(&es, DEFAULT_DEGENERACY_REL_TOL),
    ))
}

/// Von Neumann entropy of the reduced state on `left` (1-based sites).
#[pyfunction]
#[pyo3(signature = (amplitudes, left, base = "natural"))]
fn entanglement_entropy(amplitudes: Vec<Complex64>, left: Vec<usize>, base: &str) -> PyResult<f64> {
    let state = state_from(amplitudes)?;
    let n = state.n_sites();
    let right = (1..=n).filter(|s| !left.contains(s)).collect();
    let part = Bipartition::new(left, right, n).map_err(to_py_err)?;
    entanglement_entropy_in(&state, &part, parse_base(base)?).map_err(to_py_err)
}

#[pyfunction]
fn magnetization(amplitudes: Vec<Complex64>) -> PyResult<f64> {
    Ok(mean_magnetization(&state_from(amplitudes)?))
}

#[pyfunction]
fn coherence(amplitudes: Vec<Complex64>) -> PyResult<f64> {
    Ok(coherence_l1(&state_from(amplitudes)?))
}

#[pyfunction]
#[pyo3(name = "fidelity")]
fn state_fidelity(state: Vec<Complex64>, target: Vec<Complex64>) -> PyResult<f64> {
    fidelity(&state_from(state)?, &state_from(target)?).map_err(to_py_err)
}

#[pyfunction]
fn presets() -> Vec<(String, Vec<(usize, usize)>)> {
    Preset::ALL
        .iter()
        .map(|p| {
            (
                p.name().to_string(),
                p.pairs().iter().map(|&(i, j)| (i + 1, j + 1)).collect(),
            )
        })
        .collect()
}

#[pymodule]
pub fn pyspinanneal(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PySpinGraph>()?;
    m.add_class::<PySweepResult>()?;
    m.add_function(wrap_pyfunction!(run_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(run_config, m)?)?;
    m.add_function(wrap_pyfunction!(hamiltonian, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(gap, m)?)?;
    m.add_function(wrap_pyfunction!(entanglement_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(magnetization, m)?)?;
    m.add_function(wrap_pyfunction!(coherence, m)?)?;
    m.add_function(wrap_pyfunction!(state_fidelity, m)?)?;
    m.add_function(wrap_pyfunction!(presets, m)?)?;
    Ok(())
}
