//! Two-qubit density matrices: the singlet and the noisy states reached
//! through each channel, parameterized by the key error rate `d`. Key
//! statistics come from the computational basis.

use std::fmt;

use rand::Rng;

use crate::channels::{self, ChannelFamily, KrausChannel};
use crate::error::check_range;
use crate::linalg::{hermitian_eigenvalues, ComplexMatrix, C64};
use crate::{Error, Result};

/// Tolerance for the trace, Hermiticity and positivity checks on states.
pub const STATE_TOL: f64 = 1e-10;

/// A validated 4×4 density matrix (unit trace, Hermitian, PSD).
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitState {
    matrix: ComplexMatrix,
}

impl TwoQubitState {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if matrix.rows() != 4 || matrix.cols() != 4 {
            return Err(Error::Dimension(format!(
                "two-qubit state must be 4x4, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace {tr}")));
        }
        let asym = matrix.hermitian_defect();
        if asym > STATE_TOL {
            return Err(Error::InvalidState(format!("max asymmetry {asym:.3e}")));
        }
        let min = hermitian_eigenvalues(&matrix)?[3];
        if min < -STATE_TOL {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min:.3e}"
            )));
        }
        Ok(Self { matrix })
    }

    fn from_real(entries: &[f64; 16]) -> Result<Self> {
        Self::new(ComplexMatrix::from_real(4, 4, entries)?)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// `I/4`.
    pub fn maximally_mixed() -> Self {
        Self {
            matrix: ComplexMatrix::identity(4).scale(0.25),
        }
    }

    /// `M†M / Tr(M†M)` for a matrix `M` with entries uniform in the unit
    /// square of the complex plane, centred on the origin.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let data = (0..16)
                .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let m = ComplexMatrix::new(4, 4, data).expect("16 entries");
            let mm = m.dagger().matmul(&m).expect("square");
            let tr = mm.trace().re;
            if tr > 1e-6 {
                let rho = mm.scale(1.0 / tr).hermitian_part();
                if let Ok(state) = Self::new(rho) {
                    return state;
                }
            }
        }
    }
}

/// `ρ_S = |ψ_S⟩⟨ψ_S|` for `|ψ_S⟩ = (|01⟩ - |10⟩)/√2`.
pub fn singlet() -> TwoQubitState {
    TwoQubitState::from_real(&[
        0.0, 0.0, 0.0, 0.0, //
        0.0, 0.5, -0.5, 0.0, //
        0.0, -0.5, 0.5, 0.0, //
        0.0, 0.0, 0.0, 0.0,
    ])
    .expect("singlet is a valid state")
}

/// Singlet after depolarizing noise on Bob's qubit, at error rate
/// `d = p/2 ∈ [0, 1/2]`.
pub fn noisy_singlet_depolarizing(d: f64) -> Result<TwoQubitState> {
    check_range("d", d, 0.0, 0.5)?;
    let diag = d / 2.0;
    let mid = (1.0 - d) / 2.0;
    let coh = (2.0 * d - 1.0) / 2.0;
    TwoQubitState::from_real(&[
        diag, 0.0, 0.0, 0.0, //
        0.0, mid, coh, 0.0, //
        0.0, coh, mid, 0.0, //
        0.0, 0.0, 0.0, diag,
    ])
}

/// Singlet after a bit flip on Bob's qubit, at error rate `d = 1-p ∈ [0, 1]`.
pub fn noisy_singlet_bitflip(d: f64) -> Result<TwoQubitState> {
    check_range("d", d, 0.0, 1.0)?;
    let h = d / 2.0;
    let m = (1.0 - d) / 2.0;
    TwoQubitState::from_real(&[
        h, 0.0, 0.0, -h, //
        0.0, m, -m, 0.0, //
        0.0, -m, m, 0.0, //
        -h, 0.0, 0.0, h,
    ])
}

/// Singlet after generalized amplitude damping on Bob's qubit, at error rate
/// `d = γ/2 ∈ [0, 1/2]`.
pub fn noisy_singlet_gad(p: f64, d: f64) -> Result<TwoQubitState> {
    check_range("p", p, 0.0, 1.0)?;
    check_range("d", d, 0.0, 0.5)?;
    let coh = -(1.0 - 2.0 * d).sqrt() / 2.0;
    TwoQubitState::from_real(&[
        p * d,
        0.0,
        0.0,
        0.0, //
        0.0,
        (1.0 - 2.0 * p * d) / 2.0,
        coh,
        0.0, //
        0.0,
        coh,
        (1.0 - 2.0 * (1.0 - p) * d) / 2.0,
        0.0, //
        0.0,
        0.0,
        0.0,
        (1.0 - p) * d,
    ])
}

/// Outcome statistics of the computational-basis key measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeyStatistics {
    /// `probabilities[i][j]` = P(Alice reads i, Bob reads j).
    pub probabilities: [[f64; 2]; 2],
    /// `P(0,0) + P(1,1)`: Bob's bits are flipped before comparison, so equal
    /// raw outcomes are key errors.
    pub error_rate: f64,
}

pub fn key_statistics(rho: &TwoQubitState) -> KeyStatistics {
    let m = rho.matrix();
    let p = |i: usize| m[(i, i)].re;
    let probabilities = [[p(0), p(1)], [p(2), p(3)]];
    KeyStatistics {
        probabilities,
        error_rate: probabilities[0][0] + probabilities[1][1],
    }
}

/// A noise family with its secondary parameters fixed, swept by error rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseFamily {
    Depolarizing,
    BitFlip,
    Gad { p: f64 },
}

impl NoiseFamily {
    pub fn channel_family(&self) -> ChannelFamily {
        match self {
            NoiseFamily::Depolarizing => ChannelFamily::Depolarizing,
            NoiseFamily::BitFlip => ChannelFamily::BitFlip,
            NoiseFamily::Gad { .. } => ChannelFamily::GeneralizedAmplitudeDamping,
        }
    }

    /// Secondary parameter, if the family has one.
    pub fn p(&self) -> Option<f64> {
        match *self {
            NoiseFamily::Gad { p } => Some(p),
            _ => None,
        }
    }

    /// Largest error rate reachable by the family.
    pub fn max_error_rate(&self) -> f64 {
        match self {
            NoiseFamily::BitFlip => 1.0,
            _ => 0.5,
        }
    }

    /// Closed-form noisy singlet at error rate `d`.
    pub fn state(&self, d: f64) -> Result<TwoQubitState> {
        match *self {
            NoiseFamily::Depolarizing => noisy_singlet_depolarizing(d),
            NoiseFamily::BitFlip => noisy_singlet_bitflip(d),
            NoiseFamily::Gad { p } => noisy_singlet_gad(p, d),
        }
    }

    /// The physical channel that produces error rate `d` on the singlet.
    pub fn channel(&self, d: f64) -> Result<KrausChannel> {
        check_range("d", d, 0.0, self.max_error_rate())?;
        match *self {
            NoiseFamily::Depolarizing => channels::depolarizing(2.0 * d),
            NoiseFamily::BitFlip => channels::bit_flip(1.0 - d),
            NoiseFamily::Gad { p } => channels::generalized_amplitude_damping(p, 2.0 * d),
        }
    }
}

impl fmt::Display for NoiseFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.channel_family(), f)
    }
}
