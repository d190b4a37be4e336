//! Python bindings for the torus-chaos simulator.
//!
//! States cross the boundary as flat lists of complex amplitudes in
//! row-major `(j1, j2)` order; scenario results come back as dicts of
//! column lists.

use num_complex::Complex64 as C64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use torus_chaos::catmap::{propagator_1d, propagator_2d, CoupledPropagator, CoupledSpec, Floquet, MapSpec};
use torus_chaos::classical::{lyapunov_estimate, ClassicalSystem};
use torus_chaos::harness::{self, ConfigOverrides, Dynamics, OtocB, TimeSeriesRecord, VerifyLevel};
use torus_chaos::hilbert::partial_trace_pure;
use torus_chaos::linalg::CVector;
use torus_chaos::otoc::{self, InitialState, Observable, OperatorBasis};
use torus_chaos::states::{self, PhasePoint};
use torus_chaos::{entropy, wigner, Error, HilbertDim, StateVector, Subsystem};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::NumericalHealth(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn dim(n: usize) -> PyResult<HilbertDim> {
    HilbertDim::new(n).map_err(py_err)
}

fn parse_dynamics(s: &str) -> PyResult<Dynamics> {
    match s.to_ascii_lowercase().as_str() {
        "ee" => Ok(Dynamics::Ee),
        "he" => Ok(Dynamics::He),
        "hh" => Ok(Dynamics::Hh),
        _ => Err(PyValueError::new_err(format!(
            "unknown dynamics {s:?}; expected ee, he or hh"
        ))),
    }
}

fn parse_otoc_b(s: &str) -> PyResult<OtocB> {
    match s.to_ascii_lowercase().as_str() {
        "p2d" => Ok(OtocB::P2d),
        "rho0" => Ok(OtocB::Rho0),
        "both" => Ok(OtocB::Both),
        _ => Err(PyValueError::new_err(format!(
            "unknown otoc_b {s:?}; expected p2d, rho0 or both"
        ))),
    }
}

fn map_spec(kind: &str, k: f64) -> PyResult<MapSpec> {
    match kind.to_ascii_lowercase().as_str() {
        "hyperbolic" | "h" => Ok(MapSpec::hyperbolic(k)),
        "elliptic" | "e" => Ok(MapSpec::elliptic(k)),
        _ => Err(PyValueError::new_err(format!(
            "unknown map {kind:?}; expected hyperbolic or elliptic"
        ))),
    }
}

fn state_from(amps: Vec<C64>) -> PyResult<StateVector> {
    StateVector::new(CVector::from_vec(amps)).map_err(py_err)
}

fn square_side(len: usize) -> PyResult<usize> {
    let n = (len as f64).sqrt().round() as usize;
    if n * n != len || n < 2 {
        return Err(PyValueError::new_err(format!(
            "state length {len} is not n*n with n >= 2"
        )));
    }
    Ok(n)
}

/// Two coupled cat maps with a precomputed factored propagator.
#[pyclass(name = "CoupledMap", frozen)]
struct PyCoupledMap {
    u: CoupledPropagator,
    n: usize,
}

#[pymethods]
impl PyCoupledMap {
    #[new]
    #[pyo3(signature = (dynamics, n, k = 0.25, kc = 0.5))]
    fn new(dynamics: &str, n: usize, k: f64, kc: f64) -> PyResult<Self> {
        let (s1, s2) = parse_dynamics(dynamics)?.specs(k);
        let spec = CoupledSpec::new(s1, s2, kc, dim(n)?).map_err(py_err)?;
        Ok(PyCoupledMap {
            u: propagator_2d(&spec).map_err(py_err)?,
            n,
        })
    }

    #[getter]
    fn n(&self) -> usize {
        self.n
    }

    fn unitarity_defect(&self) -> f64 {
        self.u.unitarity_defect()
    }

    /// Applies `steps` forward steps to a length `n*n` state.
    #[pyo3(signature = (state, steps = 1))]
    fn evolve(&self, state: Vec<C64>, steps: usize) -> PyResult<Vec<C64>> {
        let mut psi = state_from(state)?;
        if psi.dim() != self.n * self.n {
            return Err(PyValueError::new_err(format!(
                "expected {} amplitudes",
                self.n * self.n
            )));
        }
        for _ in 0..steps {
            psi = self.u.forward_state(&psi);
        }
        Ok(psi.as_slice().to_vec())
    }

    /// OTOC-RE basis sum over the clock-shift basis after `t` steps.
    fn otoc_re_sum(&self, state: Vec<C64>, t: usize) -> PyResult<f64> {
        let init = InitialState::from(state_from(state)?);
        otoc::otoc_re_sum(&init, &self.u, t, &OperatorBasis::clock_shift(dim(self.n)?)).map_err(py_err)
    }

    /// State-expectation OTOC of position `X` against momentum (`b="p2d"`) or
    /// the initial projector (`b="rho0"`) for `t = 0..=t_max`, as
    /// `(c, c2, c4_real, c4_imag)` tuples.
    #[pyo3(signature = (state, t_max, b = "p2d"))]
    fn otoc_series(&self, state: Vec<C64>, t_max: usize, b: &str) -> PyResult<Vec<(f64, f64, f64, f64)>> {
        let psi = state_from(state)?;
        let d = dim(self.n)?;
        let b = match b {
            "p2d" => Observable::p2d(d),
            "rho0" => Observable::Projector(psi.clone()),
            _ => {
                return Err(PyValueError::new_err(format!(
                    "unknown operator {b:?}; expected p2d or rho0"
                )))
            }
        };
        let series = otoc::otoc_series(&Observable::x2d(d), &b, &psi, &self.u, t_max).map_err(py_err)?;
        Ok(series.iter().map(|s| (s.c, s.c2, s.c4_real, s.c4_imag)).collect())
    }
}

/// Single-DOF cat-map propagator as a list of rows.
#[pyfunction]
#[pyo3(signature = (kind, n, k = 0.25))]
fn propagator(kind: &str, n: usize, k: f64) -> PyResult<Vec<Vec<C64>>> {
    let u = propagator_1d(&map_spec(kind, k)?, dim(n)?).map_err(py_err)?;
    let m = u.matrix();
    Ok((0..n).map(|r| m.row(r).iter().copied().collect()).collect())
}

#[pyfunction]
fn coherent_state(n: usize, q: f64, p: f64) -> PyResult<Vec<C64>> {
    Ok(states::coherent_state(dim(n)?, PhasePoint::new(q, p))
        .as_slice()
        .to_vec())
}

#[pyfunction]
fn product_state(a: Vec<C64>, b: Vec<C64>) -> PyResult<Vec<C64>> {
    Ok(states::product_state(&state_from(a)?, &state_from(b)?)
        .as_slice()
        .to_vec())
}

/// Entanglement entropies of subsystem 1 for a bipartite `n x n` pure state.
#[pyfunction]
fn entropies<'py>(py: Python<'py>, state: Vec<C64>) -> PyResult<Bound<'py, PyDict>> {
    let n = square_side(state.len())?;
    let rho = partial_trace_pure(&state_from(state)?, (n, n), Subsystem::First).map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("purity", entropy::purity(&rho))?;
    d.set_item("s_linear", entropy::linear_entropy(&rho))?;
    d.set_item("s_vn", entropy::von_neumann(&rho).map_err(py_err)?)?;
    d.set_item("s_renyi2", entropy::renyi2(&rho))?;
    Ok(d)
}

/// Wigner separability entropy of a bipartite pure state.
#[pyfunction]
fn wse(state: Vec<C64>) -> PyResult<f64> {
    let n = square_side(state.len())?;
    wigner::wse_pure_fast(&state_from(state)?, (n, n)).map_err(py_err)
}

/// Largest classical Lyapunov exponent of one kicked cat map.
#[pyfunction]
#[pyo3(signature = (kind, steps = 10_000, k = 0.0, q = 0.1234, p = 0.5678))]
fn lyapunov(kind: &str, steps: usize, k: f64, q: f64, p: f64) -> PyResult<f64> {
    lyapunov_estimate(ClassicalSystem::Single(&map_spec(kind, k)?, (q, p)), steps).map_err(py_err)
}

#[pyfunction]
fn rmt_linear_entropy(n: usize) -> PyResult<f64> {
    Ok(entropy::rmt_saturation(dim(n)?).linear)
}

/// Runs one scenario and returns its time series as `{column: [values]}`.
#[pyfunction]
#[pyo3(signature = (dynamics = "hh", n = 64, t_max = 50, k = None, kc = None, center1 = None, center2 = None, otoc_b = None))]
#[allow(clippy::too_many_arguments)]
fn run_scenario<'py>(
    py: Python<'py>,
    dynamics: &str,
    n: usize,
    t_max: usize,
    k: Option<f64>,
    kc: Option<f64>,
    center1: Option<(f64, f64)>,
    center2: Option<(f64, f64)>,
    otoc_b: Option<&str>,
) -> PyResult<Bound<'py, PyDict>> {
    let center = |c: Option<(f64, f64)>| c.map(|(q, p)| format!("{q:?},{p:?}"));
    let overrides = ConfigOverrides {
        dynamics: Some(parse_dynamics(dynamics)?),
        n: Some(n),
        t_max: Some(t_max),
        k,
        kc,
        center1: center(center1),
        center2: center(center2),
        otoc_b: otoc_b.map(parse_otoc_b).transpose()?,
        outputs: None,
    };
    let cfg = overrides.resolve().map_err(py_err)?;
    let out = py.detach(|| harness::run_scenario(&cfg)).map_err(py_err)?;
    let d = PyDict::new(py);
    for name in TimeSeriesRecord::COLUMNS {
        d.set_item(name, out.column(name).unwrap_or_default())?;
    }
    d.set_item("s_vn_rescaled", out.s_vn_rescaled())?;
    d.set_item("alpha_xp", out.alpha_xp)?;
    d.set_item("alpha_xrho", out.alpha_xrho)?;
    d.set_item("max_marginal_gap", out.max_marginal_gap)?;
    Ok(d)
}

/// Runs the invariant suite; returns `(name, residual, tolerance, passed)`.
#[pyfunction]
#[pyo3(signature = (level = "fast"))]
fn verify(py: Python<'_>, level: &str) -> PyResult<Vec<(String, f64, f64, bool)>> {
    let level = match level {
        "fast" => VerifyLevel::Fast,
        "full" => VerifyLevel::Full,
        _ => {
            return Err(PyValueError::new_err(format!(
                "unknown level {level:?}; expected fast or full"
            )))
        }
    };
    let report = py.detach(|| harness::verify(level)).map_err(py_err)?;
    Ok(report
        .checks
        .iter()
        .map(|c| (c.name.clone(), c.residual, c.tolerance, c.passed()))
        .collect())
}

#[pymodule]
fn torus_chaos_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyCoupledMap>()?;
    m.add_function(wrap_pyfunction!(propagator, m)?)?;
    m.add_function(wrap_pyfunction!(coherent_state, m)?)?;
    m.add_function(wrap_pyfunction!(product_state, m)?)?;
    m.add_function(wrap_pyfunction!(entropies, m)?)?;
    m.add_function(wrap_pyfunction!(wse, m)?)?;
    m.add_function(wrap_pyfunction!(lyapunov, m)?)?;
    m.add_function(wrap_pyfunction!(rmt_linear_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
