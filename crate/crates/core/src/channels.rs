//! Single-qubit Kraus channels and their one-sided application to Bob's
//! qubit of a shared pair.

use std::fmt;

use crate::error::check_range;
use crate::linalg::{pauli_i, pauli_x, pauli_y, pauli_z, tensor, ComplexMatrix};
use crate::states::TwoQubitState;
use crate::{Error, Result};

/// Completeness tolerance for `Σ E_k†E_k = I`.
pub const CPTP_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChannelFamily {
    Depolarizing,
    BitFlip,
    GeneralizedAmplitudeDamping,
}

impl fmt::Display for ChannelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ChannelFamily::Depolarizing => "depolarizing",
            ChannelFamily::BitFlip => "bitflip",
            ChannelFamily::GeneralizedAmplitudeDamping => "gad",
        })
    }
}

/// A single-qubit channel in operator-sum form. Elements are built and stored
/// once at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    family: ChannelFamily,
    params: Vec<(&'static str, f64)>,
    elements: Vec<ComplexMatrix>,
}

impl KrausChannel {
    /// Assembles a channel from raw elements without validation. Use
    /// [`validate_cptp`] before trusting it.
    pub fn from_elements(
        family: ChannelFamily,
        params: Vec<(&'static str, f64)>,
        elements: Vec<ComplexMatrix>,
    ) -> Self {
        Self {
            family,
            params,
            elements,
        }
    }

    /// The noiseless channel, represented as `depolarizing(0)`.
    pub fn identity() -> Self {
        depolarizing(0.0).expect("p = 0 is in range")
    }

    pub fn family(&self) -> ChannelFamily {
        self.family
    }

    pub fn params(&self) -> &[(&'static str, f64)] {
        &self.params
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        self.params
            .iter()
            .find(|(n, _)| *n == name)
            .map(|&(_, v)| v)
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    /// Applies the channel to a single-qubit density matrix.
    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        if rho.rows() != 2 || rho.cols() != 2 {
            return Err(Error::Dimension(format!(
                "single-qubit channel applied to a {}x{} matrix",
                rho.rows(),
                rho.cols()
            )));
        }
        let mut out = ComplexMatrix::zeros(2, 2);
        for e in &self.elements {
            out = &out + &e.conjugate(rho)?;
        }
        Ok(out)
    }
}

/// `ρ ↦ p·I/2 + (1-p)·ρ` with elements `√(1-3p/4)·I` and `(√p/2)·{X, Y, Z}`.
pub fn depolarizing(p: f64) -> Result<KrausChannel> {
    check_range("p", p, 0.0, 1.0)?;
    let e0 = pauli_i().scale((1.0 - 0.75 * p).sqrt());
    let w = p.sqrt() / 2.0;
    Ok(KrausChannel {
        family: ChannelFamily::Depolarizing,
        params: vec![("p", p)],
        elements: vec![
            e0,
            pauli_x().scale(w),
            pauli_y().scale(w),
            pauli_z().scale(w),
        ],
    })
}

/// Elements `√p·I` and `√(1-p)·X`: the qubit is flipped with probability `1-p`.
pub fn bit_flip(p: f64) -> Result<KrausChannel> {
    check_range("p", p, 0.0, 1.0)?;
    Ok(KrausChannel {
        family: ChannelFamily::BitFlip,
        params: vec![("p", p)],
        elements: vec![pauli_i().scale(p.sqrt()), pauli_x().scale((1.0 - p).sqrt())],
    })
}

/// Generalized amplitude damping: decay probability `gamma`, relaxing toward
/// `|0⟩` with weight `p` and toward `|1⟩` with weight `1-p`.
pub fn generalized_amplitude_damping(p: f64, gamma: f64) -> Result<KrausChannel> {
    check_range("p", p, 0.0, 1.0)?;
    check_range("gamma", gamma, 0.0, 1.0)?;
    let sp = p.sqrt();
    let sq = (1.0 - p).sqrt();
    let sg = gamma.sqrt();
    let sd = (1.0 - gamma).sqrt();
    let m = |a: f64, b: f64, c: f64, d: f64| ComplexMatrix::from_real(2, 2, &[a, b, c, d]).unwrap();
    Ok(KrausChannel {
        family: ChannelFamily::GeneralizedAmplitudeDamping,
        params: vec![("p", p), ("gamma", gamma)],
        elements: vec![
            m(sp, 0.0, 0.0, sp * sd),
            m(0.0, sp * sg, 0.0, 0.0),
            m(sq * sd, 0.0, 0.0, sq),
            m(0.0, 0.0, sq * sg, 0.0),
        ],
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CptpReport {
    /// Largest entry of `|Σ E_k†E_k - I|`.
    pub max_deviation: f64,
    pub passed: bool,
}

pub fn validate_cptp(c: &KrausChannel) -> CptpReport {
    let mut sum = ComplexMatrix::zeros(2, 2);
    for e in &c.elements {
        match e.dagger().matmul(e) {
            Ok(prod) if prod.rows() == 2 && prod.cols() == 2 => sum = &sum + &prod,
            _ => {
                return CptpReport {
                    max_deviation: f64::INFINITY,
                    passed: false,
                }
            }
        }
    }
    let max_deviation = sum.max_abs_diff(&ComplexMatrix::identity(2));
    CptpReport {
        max_deviation,
        passed: max_deviation <= CPTP_TOL,
    }
}

/// `Σ_k (I⊗E_k) ρ (I⊗E_k)†`: the channel acts on Bob's (second) qubit only.
pub fn apply_one_sided(c: &KrausChannel, rho: &TwoQubitState) -> Result<TwoQubitState> {
    let report = validate_cptp(c);
    if !report.passed {
        return Err(Error::NotTracePreserving {
            max_deviation: report.max_deviation,
        });
    }
    let id = pauli_i();
    let mut out = ComplexMatrix::zeros(4, 4);
    for e in &c.elements {
        let lifted = tensor(&id, e)?;
        out = &out + &lifted.conjugate(rho.matrix())?;
    }
    TwoQubitState::new(out)
}
