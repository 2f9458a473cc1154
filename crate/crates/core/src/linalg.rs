//! Dense complex matrices for the 2×2 (single qubit) and 4×4 (qubit pair)
//! roles, plus a cyclic Jacobi eigensolver for Hermitian matrices.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::{Error, Result};

pub type C64 = Complex64;

/// Default absolute tolerance for matrix comparisons. All quantities handled
/// by this crate are O(1).
pub const DEFAULT_TOL: f64 = 1e-9;

/// Maximum tolerated `|h - h†|` entry for inputs to the Hermitian routines.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Eigenvalues above `-PSD_TOL` are treated as zero by [`matrix_sqrt_psd`].
pub const PSD_TOL: f64 = 1e-10;

const JACOBI_THRESHOLD: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 100;

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries.
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::new(rows, cols, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn diag_real(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &x) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(x, 0.0);
        }
        m
    }

    /// Outer product `|u⟩⟨v|`.
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        let mut m = Self::zeros(u.len(), v.len());
        for (i, ui) in u.iter().enumerate() {
            for (j, vj) in v.iter().enumerate() {
                m[(i, j)] = ui * vj.conj();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        Ok(out)
    }

    /// `self · x · self†`.
    pub fn conjugate(&self, x: &Self) -> Result<Self> {
        self.matmul(x)?.matmul(&self.dagger())
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }

    /// Largest entrywise modulus of `self - self†`.
    pub fn hermitian_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// `(self + self†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let d = self.dagger();
        let mut m = self.clone();
        for (a, b) in m.data.iter_mut().zip(&d.data) {
            *a = (*a + b) * 0.5;
        }
        m
    }

    fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.cols + c]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "shape mismatch"
        );
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "shape mismatch"
        );
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

/// Panics on a shape mismatch; use [`ComplexMatrix::matmul`] for a checked product.
impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("shape mismatch")
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, " ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, " {:+.6}{:+.6}i", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

pub fn pauli_i() -> ComplexMatrix {
    ComplexMatrix::identity(2)
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
}

pub fn pauli_y() -> ComplexMatrix {
    let i = C64::new(0.0, 1.0);
    let o = C64::new(0.0, 0.0);
    ComplexMatrix::new(2, 2, vec![o, -i, i, o]).unwrap()
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]).unwrap()
}

/// Kronecker product `a ⊗ b` of two 2×2 matrices, basis `|00⟩,|01⟩,|10⟩,|11⟩`.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    for (name, m) in [("left", a), ("right", b)] {
        if m.rows != 2 || m.cols != 2 {
            return Err(Error::Dimension(format!(
                "{name} tensor factor is {}x{}, expected 2x2",
                m.rows, m.cols
            )));
        }
    }
    let mut out = ComplexMatrix::zeros(4, 4);
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out[(2 * i + k, 2 * j + l)] = a[(i, j)] * b[(k, l)];
                }
            }
        }
    }
    Ok(out)
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Real eigenvalues, descending.
    pub values: Vec<f64>,
    /// Unitary whose column `k` is the eigenvector of `values[k]`.
    pub vectors: ComplexMatrix,
}

fn check_hermitian(h: &ComplexMatrix) -> Result<()> {
    if !h.is_square() {
        return Err(Error::Dimension(format!(
            "{}x{} matrix is not square",
            h.rows, h.cols
        )));
    }
    let max_asymmetry = h.hermitian_defect();
    if max_asymmetry > HERMITIAN_TOL || max_asymmetry.is_nan() {
        return Err(Error::NotHermitian { max_asymmetry });
    }
    Ok(())
}

/// Diagonalizes a Hermitian matrix with cyclic complex Jacobi rotations.
pub fn hermitian_eigen(h: &ComplexMatrix) -> Result<HermitianEigen> {
    check_hermitian(h)?;
    let n = h.rows;
    let mut a = h.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let threshold = JACOBI_THRESHOLD * a.frobenius().max(1.0);

    let off_norm = |a: &ComplexMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    loop {
        let off = off_norm(&a);
        if off <= threshold {
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps,
                off_norm: off,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut pairs: Vec<(f64, usize)> = (0..n).map(|i| (a[(i, i)].re, i)).collect();
    pairs.sort_by(|x, y| y.0.total_cmp(&x.0));
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (col, &(_, src)) in pairs.iter().enumerate() {
        for r in 0..n {
            vectors[(r, col)] = v[(r, src)];
        }
    }
    Ok(HermitianEigen {
        values: pairs.into_iter().map(|(x, _)| x).collect(),
        vectors,
    })
}

// Zeroes a[p][q] with the unitary U = diag(1, e^{-iφ}) · R(θ) acting on the
// (p, q) plane: A ← U† A U, V ← V U.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let phase = apq / r; // e^{iφ}
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let tau = (aqq - app) / (2.0 * r);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    let u_pp = C64::new(c, 0.0);
    let u_pq = C64::new(s, 0.0);
    let u_qp = -phase.conj() * s;
    let u_qq = phase.conj() * c;

    let n = a.rows;
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * u_pp + akq * u_qp;
        a[(k, q)] = akp * u_pq + akq * u_qq;
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * u_pp + vkq * u_qp;
        v[(k, q)] = vkp * u_pq + vkq * u_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = u_pp.conj() * apk + u_qp.conj() * aqk;
        a[(q, k)] = u_pq.conj() * apk + u_qq.conj() * aqk;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
}

/// Real eigenvalues of a Hermitian matrix, sorted descending. Small negative
/// values from rounding are returned as-is.
pub fn hermitian_eigenvalues(h: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(hermitian_eigen(h)?.values)
}

/// Eigenvalues at most this far from zero are indistinguishable from it in
/// a spectrum whose largest magnitude is `scale`.
pub fn numerical_zero(n: usize, scale: f64) -> f64 {
    n as f64 * f64::EPSILON * scale
}

/// Principal square root of a positive semidefinite Hermitian matrix.
///
/// Eigenvalues below [`numerical_zero`] are treated as exact zeros: their
/// rounding noise would otherwise be amplified to `√ε` by the square root.
pub fn matrix_sqrt_psd(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eigen(h)?;
    let n = h.rows;
    let cutoff = numerical_zero(n, eig.values.iter().fold(0.0, |m, v| m.max(v.abs())));
    let mut roots = Vec::with_capacity(n);
    for &lambda in &eig.values {
        if lambda < -PSD_TOL {
            return Err(Error::NotPositive { eigenvalue: lambda });
        }
        roots.push(if lambda <= cutoff { 0.0 } else { lambda.sqrt() });
    }
    let mut out = ComplexMatrix::zeros(n, n);
    for (k, &root) in roots.iter().enumerate() {
        if root == 0.0 {
            continue;
        }
        for i in 0..n {
            let vik = eig.vectors[(i, k)] * root;
            for j in 0..n {
                out[(i, j)] += vik * eig.vectors[(j, k)].conj();
            }
        }
    }
    Ok(out.hermitian_part())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn singlet_matrix() -> ComplexMatrix {
        ComplexMatrix::from_real(
            4,
            4,
            &[
                0.0, 0.0, 0.0, 0.0, //
                0.0, 0.5, -0.5, 0.0, //
                0.0, -0.5, 0.5, 0.0, //
                0.0, 0.0, 0.0, 0.0,
            ],
        )
        .unwrap()
    }

    #[test]
    fn tensor_identity_and_zz() {
        let ii = tensor(&pauli_i(), &pauli_i()).unwrap();
        assert!(ii.approx_eq(&ComplexMatrix::identity(4), 0.0));
        let zz = tensor(&pauli_z(), &pauli_z()).unwrap();
        assert!(zz.approx_eq(&ComplexMatrix::diag_real(&[1.0, -1.0, -1.0, 1.0]), 0.0));
    }

    #[test]
    fn tensor_rejects_non_2x2() {
        let err = tensor(&ComplexMatrix::identity(4), &pauli_x()).unwrap_err();
        assert!(matches!(err, Error::Dimension(_)));
    }

    #[test]
    fn basis_order_matches_singlet_vector() {
        // (|01⟩ - |10⟩)/√2 in the |00⟩,|01⟩,|10⟩,|11⟩ order.
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = [c(0.0, 0.0), c(s, 0.0), c(-s, 0.0), c(0.0, 0.0)];
        let rho = ComplexMatrix::outer(&psi, &psi);
        assert!(rho.approx_eq(&singlet_matrix(), 1e-15));
    }

    // Brute-force (I⊗X) ρ (I⊗X)† with explicit index arithmetic: the operator
    // maps |a b⟩ to |a, 1-b⟩, so entry (ab, cd) comes from (a b̄, c d̄).
    #[test]
    fn one_sided_x_conjugation_matches_brute_force() {
        let rho = singlet_matrix();
        let ix = tensor(&pauli_i(), &pauli_x()).unwrap();
        let fast = ix.conjugate(&rho).unwrap();

        let mut brute = ComplexMatrix::zeros(4, 4);
        for row in 0..4 {
            for col in 0..4 {
                let (a, b) = (row / 2, row % 2);
                let (cc, d) = (col / 2, col % 2);
                brute[(row, col)] = rho[(2 * a + (1 - b), 2 * cc + (1 - d))];
            }
        }
        assert!(fast.approx_eq(&brute, 1e-15));
        // Bob's populations swap: the |01⟩,|10⟩ support moves to |00⟩,|11⟩.
        assert_eq!(fast[(0, 0)].re, 0.5);
        assert_eq!(fast[(3, 3)].re, 0.5);
        assert_eq!(fast[(1, 1)].re, 0.0);
        assert_eq!(fast[(0, 3)].re, -0.5);
    }

    #[test]
    fn eigenvalues_trivial_cases() {
        assert_eq!(
            hermitian_eigenvalues(&ComplexMatrix::identity(4)).unwrap(),
            vec![1.0; 4]
        );
        let d = ComplexMatrix::diag_real(&[0.2, 0.0, 0.5, 0.3]);
        assert_eq!(hermitian_eigenvalues(&d).unwrap(), vec![0.5, 0.3, 0.2, 0.0]);
    }

    #[test]
    fn eigenvalues_reject_non_hermitian() {
        let mut m = ComplexMatrix::identity(4);
        m[(0, 1)] = c(0.25, 0.0);
        match hermitian_eigenvalues(&m) {
            Err(Error::NotHermitian { max_asymmetry }) => {
                assert!((max_asymmetry - 0.25).abs() < 1e-15)
            }
            other => panic!("expected NotHermitian, got {other:?}"),
        }
    }

    #[test]
    fn eigenvectors_diagonalize_complex_hermitian() {
        let h = ComplexMatrix::new(
            4,
            4,
            vec![
                c(2.0, 0.0),
                c(0.3, 0.4),
                c(0.0, -1.0),
                c(0.1, 0.0),
                c(0.3, -0.4),
                c(1.0, 0.0),
                c(0.5, 0.5),
                c(0.0, 0.2),
                c(0.0, 1.0),
                c(0.5, -0.5),
                c(-1.0, 0.0),
                c(0.7, 0.0),
                c(0.1, 0.0),
                c(0.0, -0.2),
                c(0.7, 0.0),
                c(0.5, 0.0),
            ],
        )
        .unwrap();
        let eig = hermitian_eigen(&h).unwrap();
        let v = &eig.vectors;
        let recon = &(v * &ComplexMatrix::diag_real(&eig.values)) * &v.dagger();
        assert!(recon.approx_eq(&h, 1e-12), "{recon:?}");
        assert!((&v.dagger() * v).approx_eq(&ComplexMatrix::identity(4), 1e-12));
        assert!(eig.values.windows(2).all(|w| w[0] >= w[1]));
    }

    // Characteristic polynomial of a real symmetric 4×4 via Faddeev–LeVerrier,
    // in plain arrays. Returns c[0..=4] with det(λI - A) = Σ c[k] λ^(4-k).
    fn char_poly(a: &[[f64; 4]; 4]) -> [f64; 5] {
        let mul = |x: &[[f64; 4]; 4], y: &[[f64; 4]; 4]| {
            let mut z = [[0.0; 4]; 4];
            for i in 0..4 {
                for j in 0..4 {
                    for k in 0..4 {
                        z[i][j] += x[i][k] * y[k][j];
                    }
                }
            }
            z
        };
        let mut coeffs = [0.0; 5];
        coeffs[0] = 1.0;
        let mut m = [[0.0; 4]; 4];
        for k in 1..=4 {
            let mut next = mul(a, &m);
            for (i, row) in next.iter_mut().enumerate() {
                row[i] += coeffs[k - 1];
            }
            m = next;
            let am = mul(a, &m);
            let tr: f64 = (0..4).map(|i| am[i][i]).sum();
            coeffs[k] = -tr / k as f64;
        }
        coeffs
    }

    // Durand–Kerner simultaneous iteration on a monic quartic.
    fn quartic_roots(coeffs: &[f64; 5]) -> Vec<f64> {
        let eval = |z: C64| {
            coeffs
                .iter()
                .fold(C64::new(0.0, 0.0), |acc, &k| acc * z + k)
        };
        let seed = C64::new(0.4, 0.9);
        let mut roots: Vec<C64> = (0..4).map(|k| seed.powu(k as u32)).collect();
        for _ in 0..5000 {
            let prev = roots.clone();
            for i in 0..4 {
                let mut denom = C64::new(1.0, 0.0);
                for j in 0..4 {
                    if i != j {
                        denom *= roots[i] - roots[j];
                    }
                }
                let step = eval(roots[i]) / denom;
                roots[i] -= step;
            }
            if roots.iter().zip(&prev).all(|(a, b)| (a - b).norm() < 1e-15) {
                break;
            }
        }
        let mut re: Vec<f64> = roots.iter().map(|z| z.re).collect();
        re.sort_by(|a, b| b.total_cmp(a));
        re
    }

    #[test]
    fn eigenvalues_of_depolarized_singlet_match_characteristic_polynomial() {
        // Depolarized singlet at error rate D = 0.2.
        let d = 0.2;
        let a = [
            [d / 2.0, 0.0, 0.0, 0.0],
            [0.0, (1.0 - d) / 2.0, (2.0 * d - 1.0) / 2.0, 0.0],
            [0.0, (2.0 * d - 1.0) / 2.0, (1.0 - d) / 2.0, 0.0],
            [0.0, 0.0, 0.0, d / 2.0],
        ];
        let flat: Vec<f64> = a.iter().flatten().copied().collect();
        let m = ComplexMatrix::from_real(4, 4, &flat).unwrap();
        let values = hermitian_eigenvalues(&m).unwrap();

        let poly = char_poly(&a);
        // Coefficients must equal the signed elementary symmetric polynomials
        // of the computed spectrum.
        let e1: f64 = values.iter().sum();
        let mut e2 = 0.0;
        let mut e3 = 0.0;
        for i in 0..4 {
            for j in (i + 1)..4 {
                e2 += values[i] * values[j];
                for k in (j + 1)..4 {
                    e3 += values[i] * values[j] * values[k];
                }
            }
        }
        let e4: f64 = values.iter().product();
        let expected = [1.0, -e1, e2, -e3, e4];
        for (p, e) in poly.iter().zip(expected) {
            assert!((p - e).abs() < 1e-12, "{poly:?} vs {expected:?}");
        }

        // The spectrum has a triple root, which limits root-finder accuracy
        // to about cbrt(machine epsilon).
        let roots = quartic_roots(&poly);
        for (r, v) in roots.iter().zip(&values) {
            assert!((r - v).abs() < 1e-4, "{roots:?} vs {values:?}");
        }
        assert!((values[0] - 0.7).abs() < 1e-14);
        for v in &values[1..] {
            assert!((v - 0.1).abs() < 1e-14);
        }
    }

    #[test]
    fn sqrt_examples() {
        let id = ComplexMatrix::identity(4);
        assert!(matrix_sqrt_psd(&id).unwrap().approx_eq(&id, 1e-15));
        let d = ComplexMatrix::diag_real(&[4.0, 1.0, 0.0, 0.0]);
        let s = matrix_sqrt_psd(&d).unwrap();
        assert!(s.approx_eq(&ComplexMatrix::diag_real(&[2.0, 1.0, 0.0, 0.0]), 1e-15));
        let rho = singlet_matrix();
        let root = matrix_sqrt_psd(&rho).unwrap();
        assert!((&root * &root).approx_eq(&rho, 1e-12));
        assert!(root.approx_eq(&rho, 1e-12));
    }

    #[test]
    fn sqrt_rejects_negative_eigenvalue() {
        let m = ComplexMatrix::diag_real(&[1.0, -1e-6]);
        assert!(matches!(
            matrix_sqrt_psd(&m),
            Err(Error::NotPositive { .. })
        ));
        // Rounding-level negatives are clamped.
        let m = ComplexMatrix::diag_real(&[1.0, -1e-12]);
        let s = matrix_sqrt_psd(&m).unwrap();
        assert_eq!(s[(1, 1)].re, 0.0);
    }
}
