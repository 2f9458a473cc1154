//! CHSH analysis for measurement directions in the x–y plane.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, TAU};

use crate::linalg::{hermitian_eigenvalues, pauli_x, pauli_y, pauli_z, tensor, ComplexMatrix, C64};
use crate::states::{NoiseFamily, TwoQubitState};
use crate::{Error, Result};

/// Classical bound on `|S|`.
pub const CLASSICAL_BOUND: f64 = 2.0;

const BISECTION_WIDTH: f64 = 1e-12;
const BISECTION_MAX_ITER: usize = 200;

/// A spin measurement direction in the x–y plane, given by its azimuth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementDirection {
    theta: f64,
}

impl MeasurementDirection {
    /// Normalizes `theta` into `[0, 2π)`.
    pub fn new(theta: f64) -> Self {
        let mut t = theta.rem_euclid(TAU);
        if t >= TAU {
            t = 0.0;
        }
        Self { theta: t }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// `|±⟩ = (|0⟩ ± e^{iθ}|1⟩)/√2`.
    pub fn eigenket(&self, plus: bool) -> [C64; 2] {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let sign = if plus { 1.0 } else { -1.0 };
        [C64::new(s, 0.0), C64::from_polar(sign * s, self.theta)]
    }

    pub fn projector(&self, plus: bool) -> ComplexMatrix {
        let k = self.eigenket(plus);
        ComplexMatrix::outer(&k, &k)
    }

    /// Unit Bloch vector.
    pub fn vector(&self) -> [f64; 3] {
        [self.theta.cos(), self.theta.sin(), 0.0]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChshConfig {
    pub a1: MeasurementDirection,
    pub a2: MeasurementDirection,
    pub b1: MeasurementDirection,
    pub b2: MeasurementDirection,
}

impl ChshConfig {
    pub fn new(a1: f64, a2: f64, b1: f64, b2: f64) -> Self {
        Self {
            a1: MeasurementDirection::new(a1),
            a2: MeasurementDirection::new(a2),
            b1: MeasurementDirection::new(b1),
            b2: MeasurementDirection::new(b2),
        }
    }

    /// `a1 = 0, a2 = π/2, b1 = π/4, b2 = 3π/4`, maximal for the singlet.
    pub fn canonical() -> Self {
        Self::new(0.0, FRAC_PI_2, FRAC_PI_4, 3.0 * FRAC_PI_4)
    }

    /// The four `(a, b)` pairs in CHSH order, with their signs in S.
    pub fn cells(&self) -> [(MeasurementDirection, MeasurementDirection, f64); 4] {
        [
            (self.a1, self.b1, 1.0),
            (self.a1, self.b2, -1.0),
            (self.a2, self.b1, 1.0),
            (self.a2, self.b2, 1.0),
        ]
    }
}

impl Default for ChshConfig {
    fn default() -> Self {
        Self::canonical()
    }
}

/// Probabilities of the four joint outcomes, `plus_plus` meaning Alice `+`
/// and Bob `+`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointProbabilities {
    pub plus_plus: f64,
    pub plus_minus: f64,
    pub minus_plus: f64,
    pub minus_minus: f64,
}

impl JointProbabilities {
    pub fn as_array(&self) -> [f64; 4] {
        [
            self.plus_plus,
            self.plus_minus,
            self.minus_plus,
            self.minus_minus,
        ]
    }

    pub fn total(&self) -> f64 {
        self.as_array().iter().sum()
    }

    pub fn correlation(&self) -> f64 {
        self.plus_plus + self.minus_minus - self.plus_minus - self.minus_plus
    }
}

/// `P_{±±} = Tr[(Π_a^± ⊗ Π_b^±) ρ]`.
pub fn joint_probabilities(
    rho: &TwoQubitState,
    a: MeasurementDirection,
    b: MeasurementDirection,
) -> JointProbabilities {
    let p = |sa: bool, sb: bool| {
        let proj = tensor(&a.projector(sa), &b.projector(sb)).expect("2x2 projectors");
        trace_product(&proj, rho.matrix())
    };
    JointProbabilities {
        plus_plus: p(true, true),
        plus_minus: p(true, false),
        minus_plus: p(false, true),
        minus_minus: p(false, false),
    }
}

// Re Tr[A·B] without forming the product.
fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = C64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            s += a[(i, k)] * b[(k, i)];
        }
    }
    s.re
}

/// Correlation coefficient `E = P₊₊ + P₋₋ - P₊₋ - P₋₊`.
pub fn correlation(rho: &TwoQubitState, a: MeasurementDirection, b: MeasurementDirection) -> f64 {
    joint_probabilities(rho, a, b).correlation()
}

/// Signed `S = E(a1,b1) - E(a1,b2) + E(a2,b1) + E(a2,b2)`; compare `|S|` to 2.
pub fn chsh_s(rho: &TwoQubitState, cfg: &ChshConfig) -> f64 {
    cfg.cells()
        .iter()
        .map(|&(a, b, sign)| sign * correlation(rho, a, b))
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationTensor {
    /// `t[i][j] = Tr[ρ σ_i⊗σ_j]` with `σ = (X, Y, Z)`.
    pub t: [[f64; 3]; 3],
}

impl CorrelationTensor {
    /// Eigenvalues of `TᵀT`, descending.
    pub fn gram_eigenvalues(&self) -> Result<Vec<f64>> {
        let t = &self.t;
        let mut g = [0.0; 9];
        for i in 0..3 {
            for j in 0..3 {
                g[3 * i + j] = (0..3).map(|k| t[k][i] * t[k][j]).sum();
            }
        }
        hermitian_eigenvalues(&ComplexMatrix::from_real(3, 3, &g)?)
    }

    /// `E(a, b) = aᵀ T b` for Bloch vectors `a`, `b`.
    pub fn correlation(&self, a: [f64; 3], b: [f64; 3]) -> f64 {
        a.iter()
            .zip(&self.t)
            .map(|(ai, row)| ai * row.iter().zip(&b).map(|(t, bj)| t * bj).sum::<f64>())
            .sum()
    }
}

pub fn correlation_tensor(rho: &TwoQubitState) -> CorrelationTensor {
    let sigma = [pauli_x(), pauli_y(), pauli_z()];
    let mut t = [[0.0; 3]; 3];
    for (i, si) in sigma.iter().enumerate() {
        for (j, sj) in sigma.iter().enumerate() {
            let op = tensor(si, sj).expect("2x2 Paulis");
            t[i][j] = trace_product(&op, rho.matrix());
        }
    }
    CorrelationTensor { t }
}

/// Maximum of `|S|` over all measurement directions: `2√(m₁ + m₂)` with
/// `m₁ ≥ m₂` the two largest eigenvalues of `TᵀT`.
pub fn optimal_s(rho: &TwoQubitState) -> Result<f64> {
    let m = correlation_tensor(rho).gram_eigenvalues()?;
    Ok(2.0 * (m[0].max(0.0) + m[1].max(0.0)).sqrt())
}

/// Error rate at which `|S|` for `angles` drops to the classical bound,
/// bracketed on `[0, family.max_error_rate()]` and located by bisection.
pub fn critical_error_rate(family: NoiseFamily, angles: &ChshConfig) -> Result<f64> {
    let excess =
        |d: f64| -> Result<f64> { Ok(chsh_s(&family.state(d)?, angles).abs() - CLASSICAL_BOUND) };
    let (mut lo, mut hi) = (0.0, family.max_error_rate());
    if excess(lo)? <= 0.0 || excess(hi)? > 0.0 {
        return Err(Error::NoSignChange { lo, hi });
    }
    for _ in 0..BISECTION_MAX_ITER {
        if hi - lo <= BISECTION_WIDTH {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if excess(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{
        noisy_singlet_bitflip, noisy_singlet_depolarizing, noisy_singlet_gad, singlet,
    };
    use std::f64::consts::{PI, SQRT_2};

    fn dir(t: f64) -> MeasurementDirection {
        MeasurementDirection::new(t)
    }

    #[test]
    fn direction_normalization() {
        assert!((dir(-FRAC_PI_2).theta() - 1.5 * PI).abs() < 1e-15);
        assert!((dir(5.0 * PI).theta() - PI).abs() < 1e-12);
        assert_eq!(dir(TAU).theta(), 0.0);
        assert_eq!(dir(-0.0).theta(), 0.0);
        assert!(dir(-1e-18).theta() < TAU);
    }

    #[test]
    fn singlet_joint_probabilities() {
        let p = joint_probabilities(&singlet(), dir(0.3), dir(0.3));
        assert!(p.plus_plus.abs() < 1e-15 && p.minus_minus.abs() < 1e-15);
        assert!((p.plus_minus - 0.5).abs() < 1e-15 && (p.minus_plus - 0.5).abs() < 1e-15);

        let p = joint_probabilities(&singlet(), dir(FRAC_PI_4), dir(0.0));
        let expected = (1.0 - SQRT_2 / 2.0) / 4.0;
        assert!((p.plus_plus - expected).abs() < 1e-15);
        assert!((p.plus_plus - 0.073223).abs() < 1e-6);

        let p = joint_probabilities(&TwoQubitState::maximally_mixed(), dir(1.0), dir(2.5));
        for x in p.as_array() {
            assert!((x - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn correlation_examples() {
        for (ta, tb) in [(0.0, 0.0), (0.3, 1.1), (2.0, -0.7)] {
            let e = correlation(&singlet(), dir(ta), dir(tb));
            let dot: f64 = dir(ta)
                .vector()
                .iter()
                .zip(dir(tb).vector())
                .map(|(a, b)| a * b)
                .sum();
            assert!((e + dot).abs() < 1e-15);
            assert!((e + (ta - tb).cos()).abs() < 1e-15);
            assert!(correlation(&TwoQubitState::maximally_mixed(), dir(ta), dir(tb)).abs() < 1e-15);
        }
        for d in [0.0, 0.1, 0.35] {
            let e = correlation(&noisy_singlet_depolarizing(d).unwrap(), dir(0.8), dir(0.8));
            assert!((e + (1.0 - 2.0 * d)).abs() < 1e-15);
        }
    }

    #[test]
    fn chsh_examples() {
        let cfg = ChshConfig::canonical();
        let s = chsh_s(&singlet(), &cfg);
        assert!((s.abs() - 2.0 * SQRT_2).abs() < 1e-12);
        let s = chsh_s(&noisy_singlet_depolarizing(0.1).unwrap(), &cfg);
        assert!((s.abs() - 2.262742).abs() < 1e-6);
        for d in [0.0, 0.3, 0.7, 1.0] {
            let s = chsh_s(&noisy_singlet_bitflip(d).unwrap(), &cfg);
            assert!((s.abs() - 2.0 * SQRT_2 * (1.0 - d)).abs() < 1e-12);
        }
    }

    #[test]
    fn correlation_tensor_examples() {
        let diag = |t: &CorrelationTensor, e: [f64; 3]| {
            for i in 0..3 {
                for j in 0..3 {
                    let want = if i == j { e[i] } else { 0.0 };
                    assert!((t.t[i][j] - want).abs() < 1e-14, "{t:?} vs {e:?}");
                }
            }
        };
        diag(&correlation_tensor(&singlet()), [-1.0, -1.0, -1.0]);
        for d in [0.1, 0.5, 0.9] {
            let t = correlation_tensor(&noisy_singlet_bitflip(d).unwrap());
            diag(&t, [-1.0, -(1.0 - 2.0 * d), -(1.0 - 2.0 * d)]);
        }
        for p in [0.0, 0.4, 1.0] {
            for d in [0.1, 0.3] {
                let t = correlation_tensor(&noisy_singlet_gad(p, d).unwrap());
                let r = (1.0 - 2.0 * d).sqrt();
                diag(&t, [-r, -r, -(1.0 - 2.0 * d)]);
            }
        }
    }

    #[test]
    fn tensor_reproduces_planar_correlations() {
        let rho = noisy_singlet_gad(0.3, 0.2).unwrap();
        let t = correlation_tensor(&rho);
        for (ta, tb) in [(0.0, 1.0), (0.4, 2.9), (5.0, 0.1)] {
            let direct = correlation(&rho, dir(ta), dir(tb));
            assert!((t.correlation(dir(ta).vector(), dir(tb).vector()) - direct).abs() < 1e-14);
        }
    }

    #[test]
    fn optimal_s_examples() {
        assert!((optimal_s(&singlet()).unwrap() - 2.0 * SQRT_2).abs() < 1e-12);
        let s = optimal_s(&noisy_singlet_bitflip(0.25).unwrap()).unwrap();
        assert!((s - 2.0 * 1.25f64.sqrt()).abs() < 1e-12);
        assert!((s - 2.236068).abs() < 1e-6);
        for d in [0.0, 0.1, 0.4] {
            let rho = noisy_singlet_depolarizing(d).unwrap();
            let opt = optimal_s(&rho).unwrap();
            assert!((opt - 2.0 * SQRT_2 * (1.0 - 2.0 * d)).abs() < 1e-12);
            assert!((opt - chsh_s(&rho, &ChshConfig::canonical()).abs()).abs() < 1e-12);
        }
    }

    #[test]
    fn critical_rates() {
        let cfg = ChshConfig::canonical();
        let dp = critical_error_rate(NoiseFamily::Depolarizing, &cfg).unwrap();
        assert!((dp - (1.0 - SQRT_2 / 2.0) / 2.0).abs() < 1e-10);
        for p in [0.0, 0.5, 1.0] {
            let gad = critical_error_rate(NoiseFamily::Gad { p }, &cfg).unwrap();
            assert!((gad - 0.25).abs() < 1e-10);
        }
        let bf = critical_error_rate(NoiseFamily::BitFlip, &cfg).unwrap();
        assert!((bf - (1.0 - SQRT_2 / 2.0)).abs() < 1e-10);
    }

    #[test]
    fn critical_rate_needs_a_violation() {
        // With a1 = a2 the two b2 terms cancel and S = 2E(0, π/2) = 0.
        let flat = ChshConfig::new(0.0, 0.0, FRAC_PI_2, FRAC_PI_2);
        assert!(matches!(
            critical_error_rate(NoiseFamily::Depolarizing, &flat),
            Err(Error::NoSignChange { .. })
        ));
    }

    #[test]
    fn phase_covariance_holds_except_for_bit_flip() {
        let states = [
            singlet(),
            noisy_singlet_depolarizing(0.2).unwrap(),
            noisy_singlet_gad(0.3, 0.3).unwrap(),
        ];
        for rho in &states {
            for shift in [0.4, 1.7, 4.0] {
                let e0 = correlation(rho, dir(0.2), dir(1.0));
                let e1 = correlation(rho, dir(0.2 + shift), dir(1.0 + shift));
                assert!((e0 - e1).abs() < 1e-14);
            }
        }
        let rho = noisy_singlet_bitflip(0.2).unwrap();
        let e0 = correlation(&rho, dir(0.0), dir(0.0));
        let e1 = correlation(&rho, dir(FRAC_PI_2), dir(FRAC_PI_2));
        assert!((e0 - e1).abs() > 0.1);
    }
}
