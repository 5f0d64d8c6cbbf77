//! Dense complex linear algebra for small matrices.
//!
//! Everything here is sized for meters of a handful of levels (N up to a few
//! dozen). Matrices are row-major `Vec<Complex64>`; arithmetic operators panic
//! on shape mismatch, while the public entry points that accept user data
//! return [`Error::DimensionMismatch`] instead.

use std::cmp::Ordering;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::state::MeterState;
use crate::tolerance::Tolerances;

pub type C64 = Complex64;

const MAX_JACOBI_SWEEPS: usize = 100;

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `<a|b>`, conjugating the first argument.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

pub fn normalized(v: &[C64]) -> Vec<C64> {
    let n = norm(v);
    v.iter().map(|x| x / n).collect()
}

/// Multiplies `v` by a global phase so that its largest-modulus component is
/// real and positive. Components within a relative 1e-10 of the maximum count
/// as tied and the first of them is chosen.
pub fn fix_phase(v: &mut [C64]) {
    let max = v.iter().map(|x| x.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    let pivot = v
        .iter()
        .position(|x| x.norm() >= max * (1.0 - 1e-10))
        .unwrap_or(0);
    let phase = v[pivot].conj() / v[pivot].norm();
    for x in v.iter_mut() {
        *x *= phase;
    }
    v[pivot] = c64(v[pivot].re, 0.0);
}

/// Total order used for every spectrum: modulus descending, then real part
/// descending, then imaginary part descending.
pub fn spectral_order(a: &C64, b: &C64) -> Ordering {
    b.norm()
        .total_cmp(&a.norm())
        .then(b.re.total_cmp(&a.re))
        .then(b.im.total_cmp(&a.im))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::default(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = c64(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from row-major entries.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument("matrix dimensions must be positive".into()));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Square matrix from nested rows; panics on ragged input.
    pub fn from_rows(rows: &[&[C64]]) -> Self {
        let n = rows.len();
        let m = rows[0].len();
        assert!(rows.iter().all(|r| r.len() == m), "ragged rows");
        Self {
            rows: n,
            cols: m,
            data: rows.iter().flat_map(|r| r.iter().copied()).collect(),
        }
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = *d;
        }
        m
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d: Vec<C64> = diag.iter().map(|&x| c64(x, 0.0)).collect();
        Self::from_diagonal(&d)
    }

    /// `|v><v|`.
    pub fn outer(v: &[C64]) -> Self {
        let n = v.len();
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = v[i] * v[j].conj();
            }
        }
        m
    }

    pub fn pauli_x() -> Self {
        let (o, l) = (c64(0.0, 0.0), c64(1.0, 0.0));
        Self::from_rows(&[&[o, l], &[l, o]])
    }

    pub fn pauli_y() -> Self {
        let o = c64(0.0, 0.0);
        Self::from_rows(&[&[o, c64(0.0, -1.0)], &[c64(0.0, 1.0), o]])
    }

    pub fn pauli_z() -> Self {
        Self::from_real_diagonal(&[1.0, -1.0])
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

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn trace(&self) -> C64 {
        self.diagonal().into_iter().sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// Kronecker product `self ⊗ other`; the left factor's index is major.
    pub fn kron(&self, other: &Self) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut m = Self::zeros(rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        m[(i * other.rows + k, j * other.cols + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        m
    }

    /// `K M K†`.
    pub fn sandwich(&self, m: &Self) -> Self {
        &(self * m) * &self.adjoint()
    }

    /// Largest entrywise deviation from Hermiticity.
    pub fn hermiticity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut dev = 0.0_f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// Hermitian to `tol`, measured relative to `max(1, ‖m‖_F)`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.hermiticity_deviation() <= tol * self.frobenius_norm().max(1.0)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        let prod = &self.adjoint() * self;
        (&prod - &Self::identity(self.rows)).frobenius_norm() <= tol
    }

    /// Norm of the commutator `[M, M†]`.
    pub fn normality_deviation(&self) -> f64 {
        let adj = self.adjoint();
        (&(self * &adj) - &(&adj * self)).frobenius_norm()
    }

    pub fn is_normal(&self, tol: f64) -> bool {
        self.is_square() && self.normality_deviation() <= tol * self.frobenius_norm().powi(2).max(1.0)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C64::default() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

/// Eigenvalues and unit eigenvectors, in [`spectral_order`].
///
/// Each eigenvector carries the phase convention of [`fix_phase`], so two
/// decompositions of the same matrix compare equal entry by entry.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<C64>,
    pub eigenvectors: Vec<Vec<C64>>,
    /// `|λ1| − |λ2|`, zero for a one-dimensional spectrum.
    pub moduli_gap: f64,
}

impl SpectralDecomposition {
    pub fn from_pairs(mut pairs: Vec<(C64, Vec<C64>)>) -> Self {
        for (_, v) in pairs.iter_mut() {
            *v = normalized(v);
            fix_phase(v);
        }
        pairs.sort_by(|a, b| spectral_order(&a.0, &b.0));
        let (eigenvalues, eigenvectors): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
        let moduli_gap = if eigenvalues.len() >= 2 {
            eigenvalues[0].norm() - eigenvalues[1].norm()
        } else {
            0.0
        };
        Self {
            eigenvalues,
            eigenvectors,
            moduli_gap,
        }
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn moduli(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|l| l.norm()).collect()
    }

    /// `Σ λ_j |v_j><v_j|`; equals the input only for normal matrices.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.eigenvectors[0].len();
        let mut m = ComplexMatrix::zeros(n, n);
        for (l, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            m = &m + &ComplexMatrix::outer(v).scale(*l);
        }
        m
    }

    /// Largest `‖M v − λ v‖` over all pairs.
    pub fn max_residual(&self, m: &ComplexMatrix) -> f64 {
        self.eigenvalues
            .iter()
            .zip(&self.eigenvectors)
            .map(|(l, v)| {
                let mv = m.mul_vec(v);
                let r: Vec<C64> = mv.iter().zip(v).map(|(a, b)| a - l * b).collect();
                norm(&r)
            })
            .fold(0.0, f64::max)
    }
}

/// Closed-form eigendecomposition of a general 2×2 matrix.
///
/// The eigenvalues are the roots of `λ² − tr·λ + det`. A diagonal input
/// (including scalar multiples of the identity) keeps the canonical basis.
/// A non-diagonal matrix whose two eigenvectors coincide is defective and
/// reported as [`Error::DegenerateSpectrum`].
pub fn eig2x2(m: &ComplexMatrix, tol: &Tolerances) -> Result<SpectralDecomposition> {
    if m.rows != 2 || m.cols != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: m.rows.max(m.cols),
        });
    }
    let (a, b, c, d) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
    let zero = C64::default();
    if b == zero && c == zero {
        return Ok(SpectralDecomposition::from_pairs(vec![
            (a, vec![c64(1.0, 0.0), zero]),
            (d, vec![zero, c64(1.0, 0.0)]),
        ]));
    }
    let half_trace = (a + d) * 0.5;
    let half_diff = (a - d) * 0.5;
    let root = (half_diff * half_diff + b * c).sqrt();
    if root == zero {
        return Err(Error::DegenerateSpectrum);
    }
    let lambdas = [half_trace + root, half_trace - root];
    let vectors: Vec<Vec<C64>> = lambdas
        .iter()
        .map(|&l| {
            if b.norm() >= c.norm() {
                normalized(&[b, l - a])
            } else {
                normalized(&[l - d, c])
            }
        })
        .collect();
    if inner(&vectors[0], &vectors[1]).norm() >= 1.0 - tol.verification {
        return Err(Error::DegenerateSpectrum);
    }
    Ok(SpectralDecomposition::from_pairs(
        lambdas.into_iter().zip(vectors).collect(),
    ))
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi sweeps.
///
/// Each rotation first removes the phase of the pivot `a_pq` and then applies
/// the real symmetric Jacobi rotation, so the diagonal stays real throughout.
pub fn hermitian_eig(m: &ComplexMatrix, tol: &Tolerances) -> Result<SpectralDecomposition> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: m.rows,
            found: m.cols,
        });
    }
    let deviation = m.hermiticity_deviation();
    if deviation > tol.hermiticity * m.frobenius_norm().max(1.0) {
        return Err(Error::NotHermitian { deviation });
    }
    let (values, vectors) = jacobi(m, tol.jacobi);
    Ok(SpectralDecomposition::from_pairs(
        values
            .into_iter()
            .map(|x| c64(x, 0.0))
            .zip((0..m.rows).map(|j| vectors.column(j)))
            .collect(),
    ))
}

/// Returns the real eigenvalues and the eigenvector matrix (columns) of the
/// Hermitian part of `m`, unsorted.
fn jacobi(m: &ComplexMatrix, threshold: f64) -> (Vec<f64>, ComplexMatrix) {
    let n = m.rows;
    let mut a = (m + &m.adjoint()).scale(c64(0.5, 0.0));
    for i in 0..n {
        a[(i, i)] = c64(a[(i, i)].re, 0.0);
    }
    let mut w = ComplexMatrix::identity(n);
    let limit = threshold * a.frobenius_norm();

    for _ in 0..MAX_JACOBI_SWEEPS {
        let mut off = 0.0_f64;
        for p in 0..n {
            for q in p + 1..n {
                off = off.max(a[(p, q)].norm());
            }
        }
        if off <= limit {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r == 0.0 {
                    continue;
                }
                let unphase = apq.conj() / r;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * r);
                let t = if theta == 0.0 {
                    1.0
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // V = diag(1, e^{-iβ}) · [[c, s], [-s, c]] in the (p, q) plane.
                let v = [
                    [c64(c, 0.0), c64(s, 0.0)],
                    [unphase * (-s), unphase * c],
                ];
                rotate_columns(&mut a, p, q, &v);
                rotate_rows(&mut a, p, q, &v);
                rotate_columns(&mut w, p, q, &v);
                a[(p, p)] = c64(app - t * r, 0.0);
                a[(q, q)] = c64(aqq + t * r, 0.0);
                a[(p, q)] = C64::default();
                a[(q, p)] = C64::default();
            }
        }
    }
    ((0..n).map(|i| a[(i, i)].re).collect(), w)
}

/// `M ← M V` restricted to columns p, q.
fn rotate_columns(m: &mut ComplexMatrix, p: usize, q: usize, v: &[[C64; 2]; 2]) {
    for k in 0..m.rows {
        let (mp, mq) = (m[(k, p)], m[(k, q)]);
        m[(k, p)] = mp * v[0][0] + mq * v[1][0];
        m[(k, q)] = mp * v[0][1] + mq * v[1][1];
    }
}

/// `M ← V† M` restricted to rows p, q.
fn rotate_rows(m: &mut ComplexMatrix, p: usize, q: usize, v: &[[C64; 2]; 2]) {
    for k in 0..m.cols {
        let (mp, mq) = (m[(p, k)], m[(q, k)]);
        m[(p, k)] = v[0][0].conj() * mp + v[1][0].conj() * mq;
        m[(q, k)] = v[0][1].conj() * mp + v[1][1].conj() * mq;
    }
}

/// Eigendecomposition of a normal N×N matrix.
///
/// A normal matrix `M = H1 + i·H2` has commuting Hermitian parts, so a
/// generic real combination `H1 + κ·H2` shares its eigenvectors with `M`.
/// The eigenvalues are then read off as Rayleigh quotients. A few values of
/// κ are tried in case one of them happens to merge distinct eigenvalues.
pub fn normal_eig(m: &ComplexMatrix, tol: &Tolerances) -> Result<SpectralDecomposition> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: m.rows,
            found: m.cols,
        });
    }
    let scale = m.frobenius_norm().max(f64::MIN_POSITIVE);
    let deviation = m.normality_deviation();
    if deviation > tol.verification * scale * scale {
        return Err(Error::NotNormal { deviation });
    }
    let adj = m.adjoint();
    let h1 = (m + &adj).scale(c64(0.5, 0.0));
    let h2 = (m - &adj).scale(c64(0.0, -0.5));
    let mut best: Option<(f64, SpectralDecomposition)> = None;
    for kappa in [0.618_033_988_749_894_8, 1.414_213_562_373_095, 0.271_828_182_845_904_5] {
        let combined = &h1 + &h2.scale(c64(kappa, 0.0));
        let (_, vectors) = jacobi(&combined, tol.jacobi);
        let pairs: Vec<(C64, Vec<C64>)> = (0..m.rows)
            .map(|j| {
                let v = vectors.column(j);
                let lambda = inner(&v, &m.mul_vec(&v));
                (lambda, v)
            })
            .collect();
        let decomposition = SpectralDecomposition::from_pairs(pairs);
        let residual = decomposition.max_residual(m);
        if residual <= tol.verification * scale {
            return Ok(decomposition);
        }
        if best.as_ref().map_or(true, |(r, _)| residual < *r) {
            best = Some((residual, decomposition));
        }
    }
    Err(Error::InvalidArgument(format!(
        "normal eigensolver did not converge (residual {:e})",
        best.map(|b| b.0).unwrap_or(f64::NAN)
    )))
}

/// Eigendecomposition dispatch: closed form for 2×2, Jacobi otherwise.
pub fn eig(m: &ComplexMatrix, tol: &Tolerances) -> Result<SpectralDecomposition> {
    if m.rows == 2 && m.cols == 2 {
        eig2x2(m, tol)
    } else {
        normal_eig(m, tol)
    }
}

/// `½ Σ |σ_i(a − b)|`; for Hermitian differences the singular values are the
/// absolute eigenvalues.
pub fn trace_distance(a: &MeterState, b: &MeterState) -> Result<f64> {
    if a.dimension() != b.dimension() {
        return Err(Error::DimensionMismatch {
            expected: a.dimension(),
            found: b.dimension(),
        });
    }
    let diff = a.rho() - b.rho();
    let (values, _) = jacobi(&diff, crate::tolerance::JACOBI);
    Ok(0.5 * values.iter().map(|x| x.abs()).sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn assert_vec_eq(a: &[C64], b: &[C64], eps: f64) {
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).norm() <= eps, "{a:?} != {b:?}");
        }
    }

    #[test]
    fn eig2x2_identity_keeps_canonical_basis() {
        let s = eig2x2(&ComplexMatrix::identity(2), &tol()).unwrap();
        assert_eq!(s.eigenvalues, vec![c64(1.0, 0.0), c64(1.0, 0.0)]);
        assert_vec_eq(&s.eigenvectors[0], &[c64(1.0, 0.0), c64(0.0, 0.0)], 0.0);
        assert_vec_eq(&s.eigenvectors[1], &[c64(0.0, 0.0), c64(1.0, 0.0)], 0.0);
        assert_eq!(s.moduli_gap, 0.0);
    }

    #[test]
    fn eig2x2_sigma_x_combination() {
        let m = &ComplexMatrix::identity(2) + &ComplexMatrix::pauli_x().scale(c64(0.5, 0.0));
        let s = eig2x2(&m, &tol()).unwrap();
        assert_abs_diff_eq!(s.eigenvalues[0].re, 1.5, epsilon = 1e-15);
        assert_abs_diff_eq!(s.eigenvalues[1].re, 0.5, epsilon = 1e-15);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_vec_eq(&s.eigenvectors[0], &[c64(h, 0.0), c64(h, 0.0)], 1e-15);
        assert_vec_eq(&s.eigenvectors[1], &[c64(h, 0.0), c64(-h, 0.0)], 1e-15);
        assert_abs_diff_eq!(s.moduli_gap, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn eig2x2_defective_matrix_is_rejected() {
        let o = c64(0.0, 0.0);
        let l = c64(1.0, 0.0);
        let jordan = ComplexMatrix::from_rows(&[&[l, l], &[o, l]]);
        assert_eq!(eig2x2(&jordan, &tol()), Err(Error::DegenerateSpectrum));
    }

    #[test]
    fn eig2x2_rejects_wrong_shape() {
        let m = ComplexMatrix::identity(3);
        assert!(matches!(eig2x2(&m, &tol()), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn eig2x2_general_residuals() {
        let m = ComplexMatrix::from_rows(&[
            &[c64(0.3, -1.2), c64(2.0, 0.5)],
            &[c64(-0.7, 0.1), c64(1.1, 0.4)],
        ]);
        let s = eig2x2(&m, &tol()).unwrap();
        assert!(s.max_residual(&m) <= 1e-10 * m.frobenius_norm());
        assert!(s.eigenvalues[0].norm() >= s.eigenvalues[1].norm());
    }

    #[test]
    fn hermitian_eig_pauli_z_and_x() {
        let s = hermitian_eig(&ComplexMatrix::pauli_z(), &tol()).unwrap();
        assert_eq!(s.eigenvalues, vec![c64(1.0, 0.0), c64(-1.0, 0.0)]);
        assert_vec_eq(&s.eigenvectors[0], &[c64(1.0, 0.0), c64(0.0, 0.0)], 0.0);
        assert_vec_eq(&s.eigenvectors[1], &[c64(0.0, 0.0), c64(1.0, 0.0)], 0.0);

        let s = hermitian_eig(&ComplexMatrix::pauli_x(), &tol()).unwrap();
        assert_eq!(s.eigenvalues, vec![c64(1.0, 0.0), c64(-1.0, 0.0)]);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_vec_eq(&s.eigenvectors[0], &[c64(h, 0.0), c64(h, 0.0)], 1e-15);
        assert_vec_eq(&s.eigenvectors[1], &[c64(h, 0.0), c64(-h, 0.0)], 1e-15);
    }

    #[test]
    fn hermitian_eig_rejects_non_hermitian() {
        let m = ComplexMatrix::from_rows(&[
            &[c64(1.0, 0.0), c64(1.0, 0.0)],
            &[c64(0.0, 0.0), c64(1.0, 0.0)],
        ]);
        assert!(matches!(hermitian_eig(&m, &tol()), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn hermitian_eig_pauli_y_phases() {
        let s = hermitian_eig(&ComplexMatrix::pauli_y(), &tol()).unwrap();
        assert!(s.max_residual(&ComplexMatrix::pauli_y()) < 1e-14);
        // first component is the pivot; it must come out real and positive
        assert!(s.eigenvectors[0][0].im == 0.0 && s.eigenvectors[0][0].re > 0.0);
    }

    #[test]
    fn trace_distance_reference_values() {
        let zero = MeterState::pure(&[c64(1.0, 0.0), c64(0.0, 0.0)]).unwrap();
        let one = MeterState::pure(&[c64(0.0, 0.0), c64(1.0, 0.0)]).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = MeterState::pure(&[c64(h, 0.0), c64(h, 0.0)]).unwrap();
        assert_eq!(trace_distance(&zero, &zero).unwrap(), 0.0);
        assert_abs_diff_eq!(trace_distance(&zero, &one).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(trace_distance(&zero, &plus).unwrap(), h, epsilon = 1e-15);
    }

    #[test]
    fn trace_distance_dimension_mismatch() {
        let a = MeterState::maximally_mixed(2);
        let b = MeterState::maximally_mixed(3);
        assert_eq!(
            trace_distance(&a, &b),
            Err(Error::DimensionMismatch { expected: 2, found: 3 })
        );
    }

    #[test]
    fn normal_eig_diagonal_complex() {
        let m = ComplexMatrix::from_diagonal(&[c64(0.5, 0.5), c64(-1.0, 0.2), c64(0.1, 0.0)]);
        let s = normal_eig(&m, &tol()).unwrap();
        assert_abs_diff_eq!(s.eigenvalues[0].re, -1.0, epsilon = 1e-14);
        assert!(s.max_residual(&m) < 1e-13);
    }

    #[test]
    fn normal_eig_rejects_non_normal() {
        let o = c64(0.0, 0.0);
        let l = c64(1.0, 0.0);
        let m = ComplexMatrix::from_rows(&[&[l, l, o], &[o, l, o], &[o, o, l]]);
        assert!(matches!(normal_eig(&m, &tol()), Err(Error::NotNormal { .. })));
    }

    #[test]
    fn unitary_and_hermitian_predicates() {
        assert!(ComplexMatrix::pauli_y().is_unitary(1e-15));
        assert!(ComplexMatrix::pauli_y().is_hermitian(1e-15));
        let m = ComplexMatrix::from_diagonal(&[c64(1.0, 0.0), c64(0.0, 2.0)]);
        assert!(!m.is_unitary(1e-12));
        assert!(!m.is_hermitian(1e-12));
        assert!(m.is_normal(1e-12));
    }

    #[test]
    fn kron_index_convention() {
        let z = ComplexMatrix::pauli_z();
        let x = ComplexMatrix::pauli_x();
        let zx = z.kron(&x);
        assert_eq!(zx[(0, 1)], c64(1.0, 0.0));
        assert_eq!(zx[(2, 3)], c64(-1.0, 0.0));
        assert_eq!(zx[(0, 2)], c64(0.0, 0.0));
    }
}
