//! Two-tone Floquet analysis of driven qubits.
//!
//! The crate covers the full pipeline from dense operator algebra up to
//! experiment-level routines: quasiphase spectra over commensurate drive
//! ratios, gate-parameter (anticrossing) extraction, longitudinal Floquet
//! qubit readout with a modulated coupler, and Floquet-state initialization
//! protocols with their empirical scaling laws.
//!
//! All frequencies are angular (rad/ns) internally; times are in ns.
//! User-facing configuration speaks ordinary GHz and is converted with
//! [`ghz`].

pub mod error;
pub mod floquet;
pub mod gate;
pub mod hamiltonian;
pub mod hilbert;
pub mod init;
pub(crate) mod linalg;
pub mod propagator;
pub mod readout;
pub mod twotone;

pub use error::{FloqError, Result};

use std::f64::consts::PI;

/// Convert an ordinary frequency in GHz to angular rad/ns.
pub fn ghz(f: f64) -> f64 {
    2.0 * PI * f
}
