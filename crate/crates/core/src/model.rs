//! Two-qubit transverse-field Ising pair with its interaction, shifted
//! so that each local term and the coupling term average to exactly
//! zero in the ground state. The ground energy is then zero and every
//! later energy in the protocol is measured from that reference.

use serde::{Deserialize, Serialize};

use crate::linalg::{
    expectation, hermitian_eig, kron, pauli, Axis, Complex, HermitianOperator, Ket, Operator,
};
use crate::tolerances as tol;
use crate::{Error, Result};

/// Field strength h and coupling k, both strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub h: f64,
    pub k: f64,
}

impl ModelParams {
    pub fn new(h: f64, k: f64) -> Result<Self> {
        if !h.is_finite() || !k.is_finite() || h <= 0.0 || k <= 0.0 {
            return Err(Error::validation(
                "model parameters h and k must be finite and strictly positive",
            ));
        }
        Ok(Self { h, k })
    }

    /// sqrt(4h^2 + k^2), the spectral width of the pair.
    pub fn scale(&self) -> f64 {
        (4.0 * self.h * self.h + self.k * self.k).sqrt()
    }
}

/// The three Hamiltonian pieces and their sum.
#[derive(Debug, Clone)]
pub struct ModelOperators {
    params: ModelParams,
    h_a: HermitianOperator,
    h_b: HermitianOperator,
    v: HermitianOperator,
    h_total: HermitianOperator,
}

impl ModelOperators {
    pub fn params(&self) -> ModelParams {
        self.params
    }

    pub fn h_a(&self) -> &HermitianOperator {
        &self.h_a
    }

    pub fn h_b(&self) -> &HermitianOperator {
        &self.h_b
    }

    pub fn v(&self) -> &HermitianOperator {
        &self.v
    }

    pub fn h_total(&self) -> &HermitianOperator {
        &self.h_total
    }
}

/// Lifts a single-qubit operator onto subsystem A (left factor).
pub fn embed_on_a(op: &Operator) -> Result<Operator> {
    kron(op, &Operator::identity(2)?)
}

/// Lifts a single-qubit operator onto subsystem B (right factor).
pub fn embed_on_b(op: &Operator) -> Result<Operator> {
    kron(&Operator::identity(2)?, op)
}

/// Builds H_A, H_B, V and their sum. The identity shifts 2h^2/c on the
/// local terms and k^2/c on the coupling (c the spectral width) are
/// what zero the ground-state energy.
pub fn build_model(params: ModelParams) -> Result<ModelOperators> {
    let ModelParams { h, k } = params;
    let c = params.scale();
    let id4 = Operator::identity(4)?;
    let sz_a = embed_on_a(pauli(Axis::Z).op())?;
    let sz_b = embed_on_b(pauli(Axis::Z).op())?;
    let sx_a = embed_on_a(pauli(Axis::X).op())?;
    let sx_b = embed_on_b(pauli(Axis::X).op())?;

    let local_shift = 2.0 * h * h / c;
    let h_a = &(&sz_a * h) + &(&id4 * local_shift);
    let h_b = &(&sz_b * h) + &(&id4 * local_shift);
    let v = &(&(&sx_a * &sx_b) * k) + &(&id4 * (k * k / c));
    let h_total = &(&h_a + &h_b) + &v;

    Ok(ModelOperators {
        params,
        h_a: HermitianOperator::new(h_a)?,
        h_b: HermitianOperator::new(h_b)?,
        v: HermitianOperator::new(v)?,
        h_total: HermitianOperator::new(h_total)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GroundStateSource {
    Analytic,
    Numeric,
}

/// Ground state together with how it was obtained.
#[derive(Debug, Clone)]
pub struct GroundState {
    state: Ket,
    source: GroundStateSource,
}

impl GroundState {
    pub fn state(&self) -> &Ket {
        &self.state
    }

    pub fn source(&self) -> GroundStateSource {
        self.source
    }
}

/// Closed-form ground state. The amplitudes are written with the
/// cancellation-free identity 1 - 2h/c = k^2 / (c (c + 2h)) so they
/// stay accurate when h dominates k.
pub fn ground_state_analytic(params: ModelParams) -> Result<GroundState> {
    let ModelParams { h, k } = params;
    let c = params.scale();
    let a_pp = k / (2.0 * c * (c + 2.0 * h)).sqrt();
    let a_mm = -((c + 2.0 * h) / (2.0 * c)).sqrt();
    let state = Ket::new(vec![
        Complex::new(a_pp, 0.0),
        Complex::ZERO,
        Complex::ZERO,
        Complex::new(a_mm, 0.0),
    ])?;
    Ok(GroundState {
        state,
        source: GroundStateSource::Analytic,
    })
}

/// Ground state from full diagonalization. Fails when the spectral gap
/// closes, since the lowest eigenvector is then not unique.
pub fn ground_state_numeric(ops: &ModelOperators) -> Result<GroundState> {
    let eig = hermitian_eig(ops.h_total())?;
    let gap = eig.eigenvalues[1] - eig.eigenvalues[0];
    if gap <= tol::SPECTRAL_GAP_MIN {
        return Err(Error::numeric(format!(
            "spectral gap {gap} too small to isolate a unique ground state"
        )));
    }
    Ok(GroundState {
        state: eig.eigenvectors[0].clone(),
        source: GroundStateSource::Numeric,
    })
}

/// Ground-state expectation of each Hamiltonian piece; all three must
/// vanish for the zero-point convention to hold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroPointCheck {
    pub h_a: f64,
    pub h_b: f64,
    pub v: f64,
    pub pass: bool,
}

pub fn zero_point_check(ops: &ModelOperators, ground: &GroundState) -> Result<ZeroPointCheck> {
    let h_a = expectation(ground.state(), ops.h_a())?;
    let h_b = expectation(ground.state(), ops.h_b())?;
    let v = expectation(ground.state(), ops.v())?;
    let pass = h_a.abs() <= tol::DERIVED && h_b.abs() <= tol::DERIVED && v.abs() <= tol::DERIVED;
    Ok(ZeroPointCheck { h_a, h_b, v, pass })
}

/// n log-spaced points from lo to hi inclusive.
pub(crate) fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (la, lb) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (la + (lb - la) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Standard 20-point coverage grid: five h values by four k values,
/// log-spaced over [0.1, 10] each.
pub fn validation_grid() -> Vec<ModelParams> {
    let hs = log_space(0.1, 10.0, 5);
    let ks = log_space(0.1, 10.0, 4);
    let mut grid = Vec::with_capacity(hs.len() * ks.len());
    for &h in &hs {
        for &k in &ks {
            grid.push(ModelParams::new(h, k).expect("grid bounds are positive"));
        }
    }
    grid
}
