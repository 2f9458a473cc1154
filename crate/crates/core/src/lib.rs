//! Density-matrix simulation of decoherence in the Ekert91 key distribution
//! protocol.
//!
//! A singlet pair is shared between Alice and Bob; a noise channel acts on
//! Bob's qubit only. The crate computes the resulting two-qubit state, its
//! Wootters concurrence, CHSH S-factors (for fixed planar directions and the
//! optimum over all directions), critical error rates, and runs Monte Carlo
//! protocol sessions that estimate the QBER and S from sampled outcomes.
//!
//! Basis order everywhere is `|00⟩, |01⟩, |10⟩, |11⟩` with Alice's qubit
//! first, stored row-major.

pub mod bell;
pub mod channels;
pub mod entanglement;
mod error;
pub mod exec;
pub mod linalg;
pub mod protocol;
pub mod states;
pub mod sweep;

pub use error::{Error, Result};
pub use exec::Execution;
