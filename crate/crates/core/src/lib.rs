//! Entangled photon-pair spectroscopy of a three-manifold exciton model.
//!
//! Energies are in eV, times in fs. Every phase `omega * t` is divided by
//! [`HBAR`].

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagrams;
pub mod error;
pub mod exciton;
pub mod io;
pub mod oracle;
pub mod par;
pub mod photon_state;
pub mod signals;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// Reduced Planck constant in eV·fs.
pub const HBAR: f64 = 0.658_211_956_9;

/// One meV in eV.
pub const MEV: f64 = 1e-3;
