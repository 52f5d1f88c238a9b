//! Python bindings: `import pdnet_py`.
//!
//! ```python
//! import pdnet_py as pd
//! g = pd.Graph.grid_torus(40, 25)
//! sim = pd.Simulation(g, p=1.0, mu=0.01, seed=3)
//! sim.step(1000)
//! print(sim.census())
//! ```

use std::sync::Arc;

use pyo3::exceptions::{PyIndexError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use pdnet::experiment::{run_plan, summarize_plan, write_summary_csv};
use pdnet::manifest::{parse_update_mode, NetworkFields};
use pdnet::{
    census, coexistence_value as phi, generate_network, grid_torus, load_edge_list, render_grid_ppm,
    save_edge_list, significance_flag as flag, welch_t as welch, Error, ExperimentPlan, NeighborCounts,
    Neighborhood, SimConfig, Strategy,
};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Index { .. } => PyIndexError::new_err(e.to_string()),
        e if e.is_usage() || matches!(e, Error::Parse { .. } | Error::Infeasible(_)) => {
            PyValueError::new_err(e.to_string())
        }
        e => PyRuntimeError::new_err(e.to_string()),
    }
}

/// Undirected simple graph.
#[pyclass(name = "Graph", frozen, from_py_object)]
#[derive(Clone)]
struct PyGraph {
    inner: Arc<pdnet::Graph>,
    dims: Option<(usize, usize)>,
}

#[pymethods]
impl PyGraph {
    /// Torus grid; `neighborhood` is "moore" or "von_neumann".
    #[staticmethod]
    #[pyo3(signature = (width, height, neighborhood = "moore"))]
    fn grid_torus(width: usize, height: usize, neighborhood: &str) -> PyResult<Self> {
        let nb = match neighborhood {
            "moore" => Neighborhood::Moore,
            "von_neumann" => Neighborhood::VonNeumann,
            other => return Err(PyValueError::new_err(format!("unknown neighborhood {other:?}"))),
        };
        let g = grid_torus(width, height, nb).map_err(py_err)?;
        Ok(PyGraph { inner: Arc::new(g), dims: Some((width, height)) })
    }

    /// Generate a network family such as "erdos_renyi" or "scale_free".
    /// Keyword arguments override the family's 1000-node preset.
    #[staticmethod]
    #[pyo3(signature = (kind, seed = 0, **fields))]
    fn generate(kind: &str, seed: u64, fields: Option<&Bound<'_, PyDict>>) -> PyResult<Self> {
        let mut f = NetworkFields::default();
        if let Some(fields) = fields {
            for (key, value) in fields.iter() {
                let key: String = key.extract()?;
                match key.as_str() {
                    "width" => f.width = Some(value.extract()?),
                    "height" => f.height = Some(value.extract()?),
                    "n" => f.n = Some(value.extract()?),
                    "k" => f.k = Some(value.extract()?),
                    "edges" => f.edges = Some(value.extract()?),
                    "cells" => f.cells = Some(value.extract()?),
                    "inner_density" => f.inner_density = Some(value.extract()?),
                    "core_fraction" => f.core_fraction = Some(value.extract()?),
                    "core_density" => f.core_density = Some(value.extract()?),
                    "seed_core" => f.seed_core = Some(value.extract()?),
                    "seed_density" => f.seed_density = Some(value.extract()?),
                    "attach" => f.attach = Some(value.extract()?),
                    "isolated" => f.isolated = Some(value.extract()?),
                    "rewire" => f.rewire = Some(value.extract()?),
                    "add" => f.add = Some(value.extract()?),
                    other => return Err(PyValueError::new_err(format!("unknown network field {other:?}"))),
                }
            }
        }
        let spec = f.build(kind).map_err(py_err)?;
        let g = generate_network(&spec, seed).map_err(py_err)?;
        Ok(PyGraph { inner: Arc::new(g), dims: spec.grid_dims() })
    }

    #[staticmethod]
    fn from_edge_list(text: &str) -> PyResult<Self> {
        let g = load_edge_list(text).map_err(py_err)?;
        Ok(PyGraph { inner: Arc::new(g), dims: None })
    }

    fn to_edge_list(&self) -> String {
        save_edge_list(&self.inner)
    }

    fn node_count(&self) -> usize {
        self.inner.node_count()
    }

    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    fn neighbors(&self, v: usize) -> PyResult<Vec<u32>> {
        self.check(v)?;
        Ok(self.inner.neighbors(v).to_vec())
    }

    fn degree(&self, v: usize) -> PyResult<usize> {
        self.check(v)?;
        Ok(self.inner.degree(v))
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.edges().collect()
    }

    /// `(width, height)` for grids, else None.
    fn grid_dims(&self) -> Option<(usize, usize)> {
        self.dims
    }

    fn __len__(&self) -> usize {
        self.inner.node_count()
    }

    fn __repr__(&self) -> String {
        format!("Graph(nodes={}, edges={})", self.inner.node_count(), self.inner.edge_count())
    }
}

impl PyGraph {
    fn check(&self, v: usize) -> PyResult<()> {
        let n = self.inner.node_count();
        if v >= n {
            return Err(py_err(Error::Index { node: v, count: n }));
        }
        Ok(())
    }
}

/// Game constants.
#[pyclass(name = "PayoffParams", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct PyPayoffParams {
    inner: pdnet::PayoffParams,
}

#[pymethods]
impl PyPayoffParams {
    #[new]
    #[pyo3(signature = (b = 100.0, c = 5.0, beta = 150.0, gamma = 50.0, sigma = 12.5))]
    fn new(b: f64, c: f64, beta: f64, gamma: f64, sigma: f64) -> PyResult<Self> {
        let inner = pdnet::PayoffParams { b, c, beta, gamma, sigma };
        inner.validate().map_err(py_err)?;
        Ok(PyPayoffParams { inner })
    }

    /// "default" or "table".
    #[staticmethod]
    fn preset(name: &str) -> PyResult<Self> {
        pdnet::PayoffParams::preset(name)
            .map(|inner| PyPayoffParams { inner })
            .ok_or_else(|| PyValueError::new_err(format!("unknown preset {name:?}")))
    }

    #[getter]
    fn b(&self) -> f64 {
        self.inner.b
    }
    #[getter]
    fn c(&self) -> f64 {
        self.inner.c
    }
    #[getter]
    fn beta(&self) -> f64 {
        self.inner.beta
    }
    #[getter]
    fn gamma(&self) -> f64 {
        self.inner.gamma
    }
    #[getter]
    fn sigma(&self) -> f64 {
        self.inner.sigma
    }

    fn __repr__(&self) -> String {
        let p = self.inner;
        format!("PayoffParams(b={}, c={}, beta={}, gamma={}, sigma={})", p.b, p.c, p.beta, p.gamma, p.sigma)
    }
}

/// Payoffs for playing C, D, L and P against the given neighbor counts.
#[pyfunction]
#[pyo3(signature = (n_c, n_d, n_l, n_p, params = None))]
fn aggregate_payoffs(n_c: u32, n_d: u32, n_l: u32, n_p: u32, params: Option<PyPayoffParams>) -> [f64; 4] {
    let params = params.map(|p| p.inner).unwrap_or_default();
    pdnet::aggregate_payoffs(NeighborCounts::new(n_c, n_d, n_l, n_p), &params)
}

/// Agents on a graph. Strategies are reported as letters C, D, L, P.
#[pyclass(name = "Simulation")]
struct PySimulation {
    graph: PyGraph,
    sim: pdnet::Simulation,
}

#[pymethods]
impl PySimulation {
    #[new]
    #[pyo3(signature = (graph, p, mu, seed = 0, params = None, update = "sequential"))]
    fn new(
        graph: PyGraph,
        p: f64,
        mu: f64,
        seed: u64,
        params: Option<PyPayoffParams>,
        update: &str,
    ) -> PyResult<Self> {
        let mut config = SimConfig::new(p, mu, 1, seed);
        config.params = params.map(|p| p.inner).unwrap_or_default();
        config.update_mode = parse_update_mode(update).map_err(py_err)?;
        config.validate().map_err(py_err)?;
        let sim = pdnet::Simulation::new(&graph.inner, config).map_err(py_err)?;
        Ok(PySimulation { graph, sim })
    }

    /// Advance `ticks` ticks.
    #[pyo3(signature = (ticks = 1))]
    fn step(&mut self, py: Python<'_>, ticks: u64) {
        let graph = Arc::clone(&self.graph.inner);
        let sim = &mut self.sim;
        py.detach(|| {
            for _ in 0..ticks {
                sim.step(&graph);
            }
        });
    }

    #[getter]
    fn tick(&self) -> u64 {
        self.sim.state().tick
    }

    fn strategies(&self) -> String {
        self.sim.state().strategies.iter().map(|s| s.letter()).collect()
    }

    /// Counts of C, D, L, P among non-isolated nodes, and their coexistence value.
    fn census(&self) -> PyResult<([usize; 4], f64)> {
        let snap = census(&self.graph.inner, self.sim.state()).map_err(py_err)?;
        Ok((snap.counts, snap.phi))
    }

    /// Plain PPM of the current state; grid graphs only.
    fn render_ppm(&self) -> PyResult<String> {
        let (w, h) = self.graph.dims.ok_or_else(|| PyValueError::new_err("rendering needs a grid graph"))?;
        render_grid_ppm(self.sim.state(), w, h).map_err(py_err)
    }
}

#[pyfunction]
fn coexistence_value(counts: [f64; 4]) -> f64 {
    phi(counts)
}

/// Welch t-test of `a` against `b`: (t, df, p_two_tailed).
#[pyfunction]
fn welch_t(a: Vec<f64>, b: Vec<f64>) -> PyResult<(f64, f64, f64)> {
    let w = welch(&a, &b).map_err(py_err)?;
    Ok((w.t, w.df, w.p_two_tailed))
}

#[pyfunction]
fn significance_flag(p_value: f64) -> &'static str {
    flag(p_value)
}

/// Run a replicated sweep and return the summary CSV text.
#[pyfunction]
#[pyo3(signature = (graph, p_values, mu_values, replications = 30, ticks = 10000, base_seed = 0,
                    null_p = 1.0, null_mu = 0.0, params = None))]
#[allow(clippy::too_many_arguments)]
fn sweep(
    py: Python<'_>,
    graph: PyGraph,
    p_values: Vec<f64>,
    mu_values: Vec<f64>,
    replications: usize,
    ticks: u64,
    base_seed: u64,
    null_p: f64,
    null_mu: f64,
    params: Option<PyPayoffParams>,
) -> PyResult<String> {
    let plan = ExperimentPlan {
        p_values,
        mu_values,
        replications,
        ticks,
        base_seed,
        null_condition: (null_p, null_mu),
        params: params.map(|p| p.inner).unwrap_or_default(),
        ..ExperimentPlan::default()
    };
    py.detach(|| {
        let results = run_plan(&graph.inner, &plan)?;
        Ok(write_summary_csv(&summarize_plan(&results, &plan)?))
    })
    .map_err(py_err)
}

#[pymodule]
fn pdnet_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_class::<PyPayoffParams>()?;
    m.add_class::<PySimulation>()?;
    m.add_function(wrap_pyfunction!(aggregate_payoffs, m)?)?;
    m.add_function(wrap_pyfunction!(coexistence_value, m)?)?;
    m.add_function(wrap_pyfunction!(welch_t, m)?)?;
    m.add_function(wrap_pyfunction!(significance_flag, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add("STRATEGIES", Strategy::ALL.map(|s| s.letter().to_string()))?;
    Ok(())
}
