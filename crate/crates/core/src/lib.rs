//! Nonadiabatic holonomic gates between a single Rydberg control atom and a
//! mesoscopic Rydberg ensemble encoding a qubit in collective states, with
//! invariant-based pulses that cancel systematic amplitude errors.
//!
//! The crate is organised bottom-up:
//!
//! * [`operators`]: dense matrices, state vectors, Pauli strings.
//! * [`model`]: Hilbert spaces, Hamiltonians and jump operators.
//! * [`pulses`]: pulse envelopes and the invariant-based construction.
//! * [`dynamics`]: Lindblad integration and gate schedules.
//! * [`fidelity`]: average gate fidelity.
//! * [`experiments`]: the parameter scans, with CSV/JSON output.

pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod fidelity;
pub mod model;
pub mod operators;
pub mod pulses;
pub mod units;

pub use error::{Error, Result};
