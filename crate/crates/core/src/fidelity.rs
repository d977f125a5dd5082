//! Average gate fidelity of a simulated channel against an ideal unitary.
//!
//! ```text
//! F = ( Σ_j tr[U U_j† U† ε(U_j)] + d² ) / ( d²(d + 1) )
//! ```
//!
//! where `U_j` runs over the `d²` Pauli strings of the logical register and
//! `ε` embeds an operator into the simulation space, propagates it, and reads
//! back the logical block. Population that leaks out of the logical subspace
//! simply goes missing from `ε(U_j)` and lowers `F`.

use crate::dynamics::GateSchedule;
use crate::error::{invalid, Error, Result};
use crate::operators::{pauli_strings, Operator, StateVector};

/// A gate to evaluate: the schedule, the logical basis inside the simulation
/// space, and the ideal logical unitary.
#[derive(Clone, Debug)]
pub struct ChannelSpec {
    pub schedule: GateSchedule,
    pub basis: Vec<StateVector>,
    pub ideal: Operator,
}

/// Fidelity with the channel outputs it was computed from.
#[derive(Clone, Debug)]
pub struct FidelityReport {
    pub fidelity: f64,
    /// `ε(U_j)` restricted to the logical block, in Pauli-string order.
    pub outputs: Vec<Operator>,
}

/// Number of qubits for a power-of-two dimension.
fn qubits(d: usize) -> Result<usize> {
    if d == 0 || !d.is_power_of_two() {
        return invalid(format!("logical dimension {d} is not a power of two"));
    }
    Ok(d.trailing_zeros() as usize)
}

/// Evaluates the fidelity formula from the channel outputs on the Pauli strings.
pub fn fidelity_from_outputs(ideal: &Operator, outputs: &[Operator]) -> Result<f64> {
    let d = ideal.dim();
    let paulis = pauli_strings(qubits(d)?);
    if outputs.len() != paulis.len() {
        return Err(Error::DimensionMismatch { expected: paulis.len(), got: outputs.len() });
    }
    let ud = ideal.dagger();
    let mut sum = 0.0;
    for (p, e) in paulis.iter().zip(outputs) {
        sum += ideal.dot(&p.dagger()).dot(&ud).dot(e).trace().re;
    }
    let d2 = (d * d) as f64;
    Ok((sum + d2) / (d2 * (d as f64 + 1.0)))
}

/// Fidelity of an arbitrary linear map `channel` on `d × d` operators.
pub fn average_fidelity_of_map(ideal: &Operator, channel: impl Fn(&Operator) -> Operator) -> Result<f64> {
    let paulis = pauli_strings(qubits(ideal.dim())?);
    let outputs: Vec<Operator> = paulis.iter().map(&channel).collect();
    fidelity_from_outputs(ideal, &outputs)
}

/// Propagates every embedded Pauli string through the schedule.
pub fn average_gate_fidelity(spec: &ChannelSpec) -> Result<FidelityReport> {
    let d = spec.ideal.dim();
    if spec.basis.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: spec.basis.len() });
    }
    let dim = spec.schedule.system.dim()?;
    if spec.basis.iter().any(|b| b.dim() != dim) {
        return invalid("logical basis vectors do not live in the simulation space");
    }
    let paulis = pauli_strings(qubits(d)?);
    let mut ops: Vec<Operator> = paulis.iter().map(|p| p.embed(&spec.basis)).collect();
    spec.schedule.propagate(&mut ops)?;
    let outputs: Vec<Operator> = ops.iter().map(|o| o.restrict(&spec.basis)).collect();
    let fidelity = fidelity_from_outputs(&spec.ideal, &outputs)?;
    Ok(FidelityReport { fidelity, outputs })
}

/// `⟨ψ|ρ|ψ⟩`.
pub fn state_fidelity(rho: &Operator, psi: &StateVector) -> f64 {
    rho.expectation(psi).re
}
