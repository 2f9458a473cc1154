//! Wootters concurrence: the general spectral algorithm and closed forms for
//! the depolarized and amplitude-damped singlets.

use crate::error::check_range;
use crate::linalg::{hermitian_eigenvalues, matrix_sqrt_psd, numerical_zero, pauli_y, tensor};
use crate::states::TwoQubitState;
use crate::{Error, Result};

/// Eigenvalues of `√ρ ρ̃ √ρ` in `[-SPECTRUM_TOL, 0)` are rounding noise and
/// clamped to zero, as are positive ones below the numerical zero; anything
/// more negative is a numerical breakdown.
pub const SPECTRUM_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcurrenceSpectrum {
    /// Square roots of the eigenvalues of `ρρ̃`, descending.
    pub lambdas: [f64; 4],
    /// `max(0, λ₁ - λ₂ - λ₃ - λ₄)`.
    pub concurrence: f64,
}

/// Computes the Wootters spectrum of `ρ` with the spin-flipped state
/// `ρ̃ = (Y⊗Y) ρ* (Y⊗Y)`. The eigenvalues of `ρρ̃` are taken from the
/// Hermitian form `√ρ ρ̃ √ρ`, which has the same spectrum.
pub fn concurrence(rho: &TwoQubitState) -> Result<ConcurrenceSpectrum> {
    let m = rho.matrix();
    let yy = tensor(&pauli_y(), &pauli_y())?;
    let flipped = yy.conjugate(&m.conj())?;
    let root = matrix_sqrt_psd(m)?;
    let h = root.matmul(&flipped)?.matmul(&root)?.hermitian_part();

    let eig = hermitian_eigenvalues(&h)?;
    let cutoff = numerical_zero(4, eig[0].abs().max(eig[3].abs()));
    let mut lambdas = [0.0; 4];
    for (slot, &mu) in lambdas.iter_mut().zip(&eig) {
        if mu < -SPECTRUM_TOL {
            return Err(Error::NotPositive { eigenvalue: mu });
        }
        *slot = if mu <= cutoff { 0.0 } else { mu.sqrt() };
    }
    // eig is descending, so lambdas already are.
    let c = lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3];
    Ok(ConcurrenceSpectrum {
        lambdas,
        concurrence: c.clamp(0.0, 1.0),
    })
}

/// Concurrence of the depolarized singlet: `1 - 3d` up to `d = 1/3`, then 0.
pub fn concurrence_dp_closed(d: f64) -> Result<f64> {
    check_range("d", d, 0.0, 0.5)?;
    Ok((1.0 - 3.0 * d).max(0.0))
}

/// The four Wootters roots `(λ₊, λ₋, λ₁, λ₂)` of the amplitude-damped singlet.
pub fn gad_lambdas(p: f64, d: f64) -> Result<[f64; 4]> {
    check_range("p", p, 0.0, 1.0)?;
    check_range("d", d, 0.0, 0.5)?;
    let q = p * (1.0 - p);
    let base = 1.0 - 2.0 * d + 2.0 * q * d * d;
    let disc = ((1.0 - 2.0 * d) * (1.0 - 2.0 * d + 4.0 * q * d * d)).sqrt();
    let plus = ((base + disc) / 2.0).sqrt();
    // λ₊λ₋ = q d², which avoids cancellation in (base - disc).
    let minus = if plus > 0.0 { q * d * d / plus } else { 0.0 };
    let side = q.sqrt() * d;
    Ok([plus, minus, side, side])
}

/// Concurrence of the amplitude-damped singlet, `λ₊ - λ₋ - λ₁ - λ₂` below the
/// threshold `μ(p)` and zero above it.
pub fn concurrence_gad_closed(p: f64, d: f64) -> Result<f64> {
    let [plus, minus, l1, l2] = gad_lambdas(p, d)?;
    if d >= gad_disentanglement_threshold(p)? {
        return Ok(0.0);
    }
    Ok((plus - minus - l1 - l2).max(0.0))
}

/// Error rate `μ(p) = (√(1 + 4p(1-p)) - 1) / (4p(1-p))` at which the
/// amplitude-damped singlet becomes separable.
pub fn gad_disentanglement_threshold(p: f64) -> Result<f64> {
    check_range("p", p, 0.0, 1.0)?;
    let q = p * (1.0 - p);
    // Rationalized: no 0/0 at p ∈ {0, 1}, where the limit is 1/2.
    Ok(1.0 / ((1.0 + 4.0 * q).sqrt() + 1.0))
}
