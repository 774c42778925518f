//! Entropic measures of quantum correlations.
//!
//! The crate measures how much information a bipartite quantum state loses
//! under unread local measurements, for a family of generalized entropies
//! (von Neumann, linear, Tsallis, Rényi). Minimizing that loss over local
//! measurement bases yields entropy-indexed generalizations of quantum
//! discord; closed forms for mixtures of pure states with white noise and
//! two-qubit entanglement monotones (concurrence, entanglement of formation,
//! negativity) provide independent cross-checks. A small CLI exposes the
//! same operations for table generation and self-verification.

pub mod entangle;
pub mod entropy;
pub mod error;
pub mod measure;
pub mod minimize;
pub mod oracle;
pub mod qstate;

pub mod cli;

pub use error::{Error, Result};

/// Complex double, the scalar type throughout.
pub type C64 = nalgebra::Complex<f64>;
