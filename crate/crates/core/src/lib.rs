//! Simulation of the five-qubit perfect code running on an analog,
//! signal-based emulation of qubits.
//!
//! States are carried as sums of complex tones, corrupted by additive white
//! Gaussian noise and by perturbed gate coefficients, then syndrome-measured,
//! corrected and decoded in software. The [`harness`] module drives the Monte
//! Carlo gate-fidelity experiments; the remaining modules are the building
//! blocks.

pub mod channels;
pub mod code;
pub mod error;
pub mod gates;
pub mod harness;
pub mod metrics;
pub mod par;
pub mod qubit;
pub mod rng;
pub mod signal;

pub use error::{Error, Result};
pub use num_complex::Complex64;
