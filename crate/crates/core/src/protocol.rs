//! Measurement and feedback steps of the protocol: project side A onto
//! the sigma_x eigenbasis, track both outcome branches as an ensemble,
//! then rotate side B conditioned on the communicated outcome and
//! account for where the energy went.

use serde::{Deserialize, Serialize};

use crate::linalg::{
    evolve, evolve_from, expectation, pauli, Axis, Complex, EigenSystem, HermitianOperator, Ket,
    Operator, UnitaryOperator,
};
use crate::model::{embed_on_a, embed_on_b, GroundState, ModelOperators, ModelParams};
use crate::tolerances as tol;
use crate::{Error, Result};

/// Projectors (1 +- sigma_x on A)/2, indexed by the outcome mu.
pub fn measurement_projectors() -> [HermitianOperator; 2] {
    let id = Operator::identity(4).expect("dim 4 identity");
    let sx_a = embed_on_a(pauli(Axis::X).op()).expect("embedding within dim limit");
    let p0 = &(&id + &sx_a) * 0.5;
    let p1 = &(&id - &sx_a) * 0.5;
    [
        HermitianOperator::new(p0).expect("projectors are Hermitian"),
        HermitianOperator::new(p1).expect("projectors are Hermitian"),
    ]
}

/// One measurement outcome: its label, probability, and post state.
#[derive(Debug, Clone)]
pub struct MeasurementBranch {
    pub mu: u8,
    pub probability: f64,
    pub state: Ket,
}

/// Both outcome branches of the projective measurement.
#[derive(Debug, Clone)]
pub struct MeasurementEnsemble {
    branches: [MeasurementBranch; 2],
}

impl MeasurementEnsemble {
    pub fn branches(&self) -> &[MeasurementBranch; 2] {
        &self.branches
    }
}

/// Projects the ground state onto both sigma_x outcomes of A.
pub fn apply_measurement(ground: &GroundState) -> Result<MeasurementEnsemble> {
    let projectors = measurement_projectors();
    let mut branches = Vec::with_capacity(2);
    let mut total = 0.0;
    for (mu, projector) in projectors.iter().enumerate() {
        let probability = expectation(ground.state(), projector)?;
        if probability < tol::BRANCH_PROB_MIN {
            return Err(Error::numeric(format!(
                "branch {mu} probability {probability} below the renormalization floor"
            )));
        }
        total += probability;
        let projected = projector.op().apply(ground.state().amplitudes())?;
        let amps = projected
            .iter()
            .map(|z| z / probability.sqrt())
            .collect::<Vec<Complex>>();
        branches.push(MeasurementBranch {
            mu: mu as u8,
            probability,
            state: Ket::new(amps)?,
        });
    }
    if (total - 1.0).abs() > tol::ALGEBRAIC {
        return Err(Error::numeric(format!(
            "branch probabilities sum to {total}"
        )));
    }
    let branches: [MeasurementBranch; 2] = branches.try_into().expect("two branches");
    Ok(MeasurementEnsemble { branches })
}

/// Ensemble-average energy deposited by the measurement, relative to
/// the zero ground level.
pub fn injected_energy(ensemble: &MeasurementEnsemble, ops: &ModelOperators) -> Result<f64> {
    let mut energy = 0.0;
    for branch in ensemble.branches() {
        energy += branch.probability * expectation(&branch.state, ops.h_total())?;
    }
    Ok(energy)
}

/// Ensemble-average local energy on B after evolving for time t.
pub fn energy_at_b(ensemble: &MeasurementEnsemble, ops: &ModelOperators, t: f64) -> Result<f64> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::validation("sampling time must be finite and >= 0"));
    }
    let eig = crate::linalg::hermitian_eig(ops.h_total())?;
    energy_at_b_spectral(ensemble, &eig, ops.h_b(), t)
}

/// Spectrum-reusing variant of [`energy_at_b`] for dense sampling.
pub fn energy_at_b_spectral(
    ensemble: &MeasurementEnsemble,
    eig: &EigenSystem,
    h_b: &HermitianOperator,
    t: f64,
) -> Result<f64> {
    let u = evolve_from(eig, t)?;
    let mut energy = 0.0;
    for branch in ensemble.branches() {
        let evolved = u.transform(&branch.state)?;
        energy += branch.probability * expectation(&evolved, h_b)?;
    }
    Ok(energy)
}

/// Conditioned feedback rotation: cos(theta) I -i (-1)^mu sin(theta)
/// sigma_y on B.
pub fn bob_unitary(mu: u8, theta: f64) -> Result<UnitaryOperator> {
    if mu > 1 {
        return Err(Error::validation("measurement outcome must be 0 or 1"));
    }
    if !theta.is_finite() {
        return Err(Error::validation("rotation angle must be finite"));
    }
    let sign = if mu == 0 { 1.0 } else { -1.0 };
    let id = Operator::identity(4)?;
    let sy_b = embed_on_b(pauli(Axis::Y).op())?;
    let op = &(&id * theta.cos()) + &(&sy_b * Complex::new(0.0, -sign * theta.sin()));
    UnitaryOperator::new(op)
}

/// Per-branch energy bookkeeping for one protocol run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchDetail {
    pub mu: u8,
    pub probability: f64,
    pub pre_operation_energy: f64,
    pub post_operation_energy: f64,
}

/// Energy ledger of a full protocol run. `e_extracted` is defined as
/// `e_injected - e_after_operation`; positive means B gained usable
/// energy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolTrace {
    pub params: ModelParams,
    pub theta: f64,
    pub wait_time: f64,
    pub e_injected: f64,
    pub e_after_operation: f64,
    pub e_extracted: f64,
    pub branch_details: [BranchDetail; 2],
}

/// Runs the feedback step: optional free evolution for `wait_time`,
/// then the conditioned rotation on B in each branch.
pub fn extracted_energy(
    ensemble: &MeasurementEnsemble,
    ops: &ModelOperators,
    theta: f64,
    wait_time: f64,
) -> Result<ProtocolTrace> {
    run_feedback(ensemble, ops, theta, wait_time, false)
}

/// Same feedback step with the classical labels crossed: branch mu
/// receives the rotation meant for the other outcome. Models acting
/// without the communicated bit; expected to deposit, not extract.
pub fn extracted_energy_swapped(
    ensemble: &MeasurementEnsemble,
    ops: &ModelOperators,
    theta: f64,
    wait_time: f64,
) -> Result<ProtocolTrace> {
    run_feedback(ensemble, ops, theta, wait_time, true)
}

fn run_feedback(
    ensemble: &MeasurementEnsemble,
    ops: &ModelOperators,
    theta: f64,
    wait_time: f64,
    swap_labels: bool,
) -> Result<ProtocolTrace> {
    if !theta.is_finite() {
        return Err(Error::validation("rotation angle must be finite"));
    }
    if !wait_time.is_finite() || wait_time < 0.0 {
        return Err(Error::validation("wait time must be finite and >= 0"));
    }
    let e_injected = injected_energy(ensemble, ops)?;
    let evolver = if wait_time > 0.0 {
        Some(evolve(ops.h_total(), wait_time)?)
    } else {
        None
    };

    let mut details = Vec::with_capacity(2);
    let mut e_after = 0.0;
    for branch in ensemble.branches() {
        let state_t = match &evolver {
            Some(u) => u.transform(&branch.state)?,
            None => branch.state.clone(),
        };
        let pre = expectation(&state_t, ops.h_total())?;
        let label = if swap_labels { 1 - branch.mu } else { branch.mu };
        let rotation = bob_unitary(label, theta)?;
        let rotated = rotation.transform(&state_t)?;
        let post = expectation(&rotated, ops.h_total())?;
        e_after += branch.probability * post;
        details.push(BranchDetail {
            mu: branch.mu,
            probability: branch.probability,
            pre_operation_energy: pre,
            post_operation_energy: post,
        });
    }

    Ok(ProtocolTrace {
        params: ops.params(),
        theta,
        wait_time,
        e_injected,
        e_after_operation: e_after,
        e_extracted: e_injected - e_after,
        branch_details: details.try_into().expect("two branches"),
    })
}
