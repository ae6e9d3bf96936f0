//! Python bindings: a `Model` class wrapping the two-qubit protocol
//! plus module-level helpers for the closed form and the ratio sweep.
//! Validation errors map to ValueError, numeric failures to
//! RuntimeError.

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use minqet::analysis;
use minqet::model::{self, ModelParams};
use minqet::protocol;

fn to_py(err: minqet::Error) -> PyErr {
    match err {
        minqet::Error::Validation(_) => PyValueError::new_err(err.to_string()),
        minqet::Error::Numeric(_) => PyRuntimeError::new_err(err.to_string()),
    }
}

/// One measurement outcome inside a protocol run.
#[pyclass(frozen, get_all)]
struct Branch {
    mu: u8,
    probability: f64,
    pre_operation_energy: f64,
    post_operation_energy: f64,
}

/// Energy bookkeeping for one full protocol round.
#[pyclass(frozen, get_all)]
struct Trace {
    theta: f64,
    wait_time: f64,
    e_injected: f64,
    e_after_operation: f64,
    e_extracted: f64,
}

#[pymethods]
impl Trace {
    fn __repr__(&self) -> String {
        format!(
            "Trace(theta={}, e_injected={}, e_extracted={})",
            self.theta, self.e_injected, self.e_extracted
        )
    }
}

/// Optimal feedback angle with the harmonic coefficients of
/// E_B(theta) = gamma + alpha cos(2 theta) + beta sin(2 theta).
#[pyclass(frozen, get_all)]
struct Optimum {
    theta_star: f64,
    e_b_max: f64,
    gamma: f64,
    alpha: f64,
    beta: f64,
}

#[pymethods]
impl Optimum {
    fn __repr__(&self) -> String {
        format!(
            "Optimum(theta_star={}, e_b_max={})",
            self.theta_star, self.e_b_max
        )
    }
}

/// Single-harmonic fit of the post-measurement energy curve at B.
#[pyclass(frozen, get_all)]
struct CurveFit {
    amplitude: f64,
    frequency: f64,
    max_residual: f64,
    multi_frequency: bool,
}

/// One published formula compared against the matrix oracle.
#[pyclass(frozen, get_all)]
struct AuditRow {
    quantity: String,
    paper_value: f64,
    oracle_value: f64,
    abs_diff: f64,
    matches: bool,
    rescaled_value: Option<f64>,
    rescaled_matches: Option<bool>,
}

#[pymethods]
impl AuditRow {
    fn __repr__(&self) -> String {
        format!(
            "AuditRow(quantity='{}', matches={})",
            self.quantity,
            if self.matches { "True" } else { "False" }
        )
    }
}

/// Timing and uncertainty-product report for one protocol run.
#[pyclass(frozen, get_all)]
struct Audit {
    epsilon: f64,
    t_teleportation: f64,
    e_b_max: f64,
    product_e_t: f64,
    paper_bound: f64,
    eq99_satisfied: bool,
    eq103_satisfied: bool,
    delta_t: f64,
    delta_e: f64,
    e_cc: Option<f64>,
}

/// One sweep sample at coupling ratio x = h/k.
#[pyclass(frozen, get_all)]
struct SweepPoint {
    x: f64,
    theta_star: f64,
    e_b_over_k: f64,
}

/// Log-grid sweep of the coupling ratio with a refined supremum.
#[pyclass(frozen)]
struct Sweep {
    #[pyo3(get)]
    x_at_max: f64,
    #[pyo3(get)]
    sup_value: f64,
    rows: Vec<(f64, f64, f64)>,
}

#[pymethods]
impl Sweep {
    #[getter]
    fn rows(&self) -> Vec<SweepPoint> {
        self.rows
            .iter()
            .map(|&(x, theta_star, e_b_over_k)| SweepPoint {
                x,
                theta_star,
                e_b_over_k,
            })
            .collect()
    }
}

/// The two-qubit model at fixed couplings, exposing the protocol steps
/// and the verification helpers.
#[pyclass(frozen)]
struct Model {
    params: ModelParams,
}

impl Model {
    fn ops_and_ensemble(
        &self,
    ) -> PyResult<(model::ModelOperators, protocol::MeasurementEnsemble)> {
        let ops = model::build_model(self.params).map_err(to_py)?;
        let ground = model::ground_state_analytic(self.params).map_err(to_py)?;
        let ensemble = protocol::apply_measurement(&ground).map_err(to_py)?;
        Ok((ops, ensemble))
    }
}

#[pymethods]
impl Model {
    #[new]
    fn new(h: f64, k: f64) -> PyResult<Self> {
        Ok(Model {
            params: ModelParams::new(h, k).map_err(to_py)?,
        })
    }

    #[getter]
    fn h(&self) -> f64 {
        self.params.h
    }

    #[getter]
    fn k(&self) -> f64 {
        self.params.k
    }

    fn __repr__(&self) -> String {
        format!("Model(h={}, k={})", self.params.h, self.params.k)
    }

    /// Ground-state amplitudes in the product basis, A factor first.
    fn ground_state(&self) -> PyResult<Vec<Complex64>> {
        let ground = model::ground_state_analytic(self.params).map_err(to_py)?;
        Ok(ground.state().amplitudes().to_vec())
    }

    /// Eigenvalues of the total Hamiltonian, ascending.
    fn spectrum(&self) -> PyResult<Vec<f64>> {
        let ops = model::build_model(self.params).map_err(to_py)?;
        let eig = minqet::linalg::hermitian_eig(ops.h_total()).map_err(to_py)?;
        Ok(eig.eigenvalues)
    }

    /// Ground-state expectations of the three Hamiltonian terms; all
    /// vanish by the zero-point construction.
    fn zero_point(&self) -> PyResult<(f64, f64, f64)> {
        let ops = model::build_model(self.params).map_err(to_py)?;
        let ground = model::ground_state_analytic(self.params).map_err(to_py)?;
        let check = model::zero_point_check(&ops, &ground).map_err(to_py)?;
        Ok((check.h_a, check.h_b, check.v))
    }

    /// Average total-energy increase caused by the measurement at A.
    fn injected_energy(&self) -> PyResult<f64> {
        let (ops, ensemble) = self.ops_and_ensemble()?;
        protocol::injected_energy(&ensemble, &ops).map_err(to_py)
    }

    /// Post-measurement energy at B after free evolution for time t.
    fn energy_at_b(&self, t: f64) -> PyResult<f64> {
        let (ops, ensemble) = self.ops_and_ensemble()?;
        protocol::energy_at_b(&ensemble, &ops, t).map_err(to_py)
    }

    /// Runs one feedback round at the given angle and wait time.
    #[pyo3(signature = (theta, wait=0.0))]
    fn extract(&self, theta: f64, wait: f64) -> PyResult<(Trace, Vec<Branch>)> {
        let (ops, ensemble) = self.ops_and_ensemble()?;
        let trace =
            protocol::extracted_energy(&ensemble, &ops, theta, wait).map_err(to_py)?;
        let branches = trace
            .branch_details
            .iter()
            .map(|b| Branch {
                mu: b.mu,
                probability: b.probability,
                pre_operation_energy: b.pre_operation_energy,
                post_operation_energy: b.post_operation_energy,
            })
            .collect();
        Ok((
            Trace {
                theta: trace.theta,
                wait_time: trace.wait_time,
                e_injected: trace.e_injected,
                e_after_operation: trace.e_after_operation,
                e_extracted: trace.e_extracted,
            },
            branches,
        ))
    }

    /// Finds the extraction-maximizing feedback angle.
    fn optimize(&self) -> PyResult<Optimum> {
        let optimum = analysis::optimize_theta(self.params).map_err(to_py)?;
        Ok(Optimum {
            theta_star: optimum.theta_star,
            e_b_max: optimum.e_b_max,
            gamma: optimum.harmonic_coeffs.gamma,
            alpha: optimum.harmonic_coeffs.alpha,
            beta: optimum.harmonic_coeffs.beta,
        })
    }

    /// Compares the published closed forms against the matrix oracle.
    fn formula_audit(&self) -> PyResult<Vec<AuditRow>> {
        let rows = analysis::formula_audit(self.params).map_err(to_py)?;
        Ok(rows
            .into_iter()
            .map(|r| AuditRow {
                quantity: r.quantity,
                paper_value: r.paper_value,
                oracle_value: r.oracle_value,
                abs_diff: r.abs_diff,
                matches: r.matches,
                rescaled_value: r.rescaled_value,
                rescaled_matches: r.rescaled_matches,
            })
            .collect())
    }

    /// Fits a(1 - cos omega t) to the energy curve at B.
    #[pyo3(signature = (n_samples=64))]
    fn fit_curve(&self, n_samples: usize) -> PyResult<CurveFit> {
        let fit = analysis::fit_energy_curve(self.params, n_samples).map_err(to_py)?;
        Ok(CurveFit {
            amplitude: fit.amplitude,
            frequency: fit.frequency,
            max_residual: fit.max_residual,
            multi_frequency: fit.multi_frequency,
        })
    }

    /// Evaluates the teleportation timing and uncertainty conditions.
    #[pyo3(signature = (epsilon=1e-3, e_cc=None))]
    fn uncertainty_audit(&self, epsilon: f64, e_cc: Option<f64>) -> PyResult<Audit> {
        let audit =
            analysis::uncertainty_audit(self.params, epsilon, e_cc).map_err(to_py)?;
        Ok(Audit {
            epsilon: audit.epsilon,
            t_teleportation: audit.t_teleportation,
            e_b_max: audit.e_b_max,
            product_e_t: audit.product_e_t,
            paper_bound: audit.paper_bound,
            eq99_satisfied: audit.eq99_satisfied,
            eq103_satisfied: audit.eq103_satisfied,
            delta_t: audit.delta_t,
            delta_e: audit.delta_e,
            e_cc: audit.e_cc,
        })
    }
}

/// Closed form of the maximal extraction at the optimal angle.
#[pyfunction]
fn analytic_eb(h: f64, k: f64) -> PyResult<f64> {
    Ok(analysis::analytic_eb(ModelParams::new(h, k).map_err(to_py)?))
}

/// Sweeps the coupling ratio x = h/k on a log grid with k = 1.
#[pyfunction]
fn sweep_ratio(x_min: f64, x_max: f64, n: usize) -> PyResult<Sweep> {
    let table = analysis::sweep_ratio(x_min, x_max, n).map_err(to_py)?;
    Ok(Sweep {
        x_at_max: table.sup_estimate.x_at_max,
        sup_value: table.sup_estimate.value,
        rows: table
            .rows
            .iter()
            .map(|r| (r.x, r.theta_star, r.e_b_over_k))
            .collect(),
    })
}

#[pymodule]
fn minqet_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Model>()?;
    m.add_class::<Trace>()?;
    m.add_class::<Branch>()?;
    m.add_class::<Optimum>()?;
    m.add_class::<CurveFit>()?;
    m.add_class::<AuditRow>()?;
    m.add_class::<Audit>()?;
    m.add_class::<SweepPoint>()?;
    m.add_class::<Sweep>()?;
    m.add_function(wrap_pyfunction!(analytic_eb, m)?)?;
    m.add_function(wrap_pyfunction!(sweep_ratio, m)?)?;
    Ok(())
}
