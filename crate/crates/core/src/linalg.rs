//! Dense complex linear algebra for small dimensions.
//!
//! Matrices are stored row-major. Everything here targets `d ≤ 16`; the
//! Hermitian eigensolver is a cyclic complex Jacobi method, which is simple
//! and accurate to roundoff at these sizes.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};

/// Double-precision complex scalar.
pub type C64 = Complex64;

/// Off-diagonal Frobenius norm (relative to `max(1, ‖A‖_F)`) at which Jacobi stops.
pub const JACOBI_OFF_TOL: f64 = 1e-12;
/// Maximum number of cyclic Jacobi sweeps.
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Numerical tolerances used by validating constructors.
///
/// Every check in the crate reads its threshold from one of these fields, so a
/// caller can tighten or loosen validation without touching global state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Max entrywise asymmetry `‖M − M†‖_max` accepted for Hermitian input.
    pub hermitian: f64,
    /// Smallest eigenvalue accepted as PSD is `-psd`.
    pub psd: f64,
    /// Allowed `|tr ρ − 1|` for density operators.
    pub trace: f64,
    /// Allowed `|Σ p − 1|` for ensembles.
    pub probability_sum: f64,
    /// Allowed `‖U†U − I‖_max`.
    pub unitary: f64,
    /// Allowed completeness residual `‖Σ F_y − I‖_max` and `‖B†B − F‖_max`.
    pub povm: f64,
    /// Outcomes with probability at or below this are treated as never occurring.
    pub zero_probability: f64,
    /// Slack added to `α` and `1 − δ` when judging gentleness.
    pub gentleness: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hermitian: 1e-10,
            psd: 1e-10,
            trace: 1e-10,
            probability_sum: 1e-10,
            unitary: 1e-9,
            povm: 1e-9,
            zero_probability: 1e-12,
            gentleness: 1e-12,
        }
    }
}

/// Square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    /// All-zero `d×d` matrix.
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be at least 1");
        Self {
            dim,
            data: vec![C64::zero(); dim * dim],
        }
    }

    /// Identity matrix.
    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix entry by entry.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(dim);
        for r in 0..dim {
            for c in 0..dim {
                m[(r, c)] = f(r, c);
            }
        }
        m
    }

    /// Builds a matrix from rows, checking squareness and finiteness.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::NotSquare {
                dim: 0,
                row: 0,
                len: 0,
            });
        }
        let mut data = Vec::with_capacity(dim * dim);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::NotSquare {
                    dim,
                    row: r,
                    len: row.len(),
                });
            }
            for (c, z) in row.iter().enumerate() {
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(Error::NonFinite { row: r, col: c });
                }
            }
            data.extend_from_slice(row);
        }
        Ok(Self { dim, data })
    }

    /// Real matrix from rows.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    /// Diagonal matrix with real entries.
    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &x) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(x, 0.0);
        }
        m
    }

    /// Outer product `|v⟩⟨v|`.
    pub fn outer(v: &[C64]) -> Self {
        Self::from_fn(v.len(), |r, c| v[r] * v[c].conj())
    }

    /// Matrix dimension `d`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    /// Rows as owned vectors.
    pub fn rows(&self) -> Vec<Vec<C64>> {
        self.data.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    /// Column `j` as a vector.
    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.dim).map(|r| self[(r, j)]).collect()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self[(c, r)].conj())
    }

    /// Trace.
    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// Multiplies every entry by a complex scalar.
    pub fn scale(&self, s: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    /// Multiplies every entry by a real scalar.
    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    /// `self · v`.
    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim, "vector length mismatch");
        self.data
            .chunks(self.dim)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Frobenius norm.
    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `‖self − other‖_max`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `‖U†U − I‖_max`.
    pub fn unitarity_residual(&self) -> f64 {
        (&self.adjoint() * self).max_abs_diff(&Self::identity(self.dim))
    }

    /// Errors unless the matrix is unitary within `tol`.
    pub fn check_unitary(&self, tol: f64) -> Result<()> {
        let r = self.unitarity_residual();
        if r <= tol {
            Ok(())
        } else {
            Err(Error::NotUnitary(r))
        }
    }

    /// `‖M − M†‖_max`.
    pub fn hermitian_residual(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    fn same_dim(&self, other: &Self) -> Result<()> {
        if self.dim == other.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            })
        }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.dim + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.dim + c]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self[(r, k)];
                if a.is_zero() {
                    continue;
                }
                for c in 0..n {
                    out.data[r * n + c] += a * rhs.data[k * n + c];
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

/// `AB − BA`.
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    a.same_dim(b)?;
    Ok(&(a * b) - &(b * a))
}

/// A Hermitian matrix, symmetrized to `(M + M†)/2` on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix(ComplexMatrix);

impl HermitianMatrix {
    /// Validates Hermiticity with the default tolerance.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(m, Tolerances::default().hermitian)
    }

    /// Validates Hermiticity against `tol`, then symmetrizes.
    pub fn with_tolerance(m: ComplexMatrix, tol: f64) -> Result<Self> {
        let r = m.hermitian_residual();
        if !(r <= tol) {
            return Err(Error::NotHermitian(r));
        }
        Ok(Self::symmetrized(m))
    }

    /// Symmetrizes without checking; for results of operations that are
    /// Hermitian up to roundoff.
    pub(crate) fn symmetrized(m: ComplexMatrix) -> Self {
        let n = m.dim();
        let mut out = m;
        for r in 0..n {
            out[(r, r)] = C64::new(out[(r, r)].re, 0.0);
            for c in r + 1..n {
                let avg = (out[(r, c)] + out[(c, r)].conj()) * 0.5;
                out[(r, c)] = avg;
                out[(c, r)] = avg.conj();
            }
        }
        Self(out)
    }

    /// Real diagonal matrix.
    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        Self(ComplexMatrix::from_real_diagonal(diag))
    }

    /// Identity.
    pub fn identity(dim: usize) -> Self {
        Self(ComplexMatrix::identity(dim))
    }

    /// `|v⟩⟨v|`.
    pub fn projector(v: &[C64]) -> Self {
        Self::symmetrized(ComplexMatrix::outer(v))
    }

    /// Dimension.
    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    /// Underlying matrix.
    pub fn as_matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    /// Unwraps the matrix.
    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    /// Real trace.
    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    /// `self + other`.
    pub fn add(&self, other: &Self) -> Self {
        Self::symmetrized(&self.0 + &other.0)
    }

    /// `self − other`.
    pub fn sub(&self, other: &Self) -> Self {
        Self::symmetrized(&self.0 - &other.0)
    }

    /// `s · self`.
    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.scale_real(s))
    }

    /// `U · self · U†`.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Self {
        Self::symmetrized(&(u * &self.0) * &u.adjoint())
    }

    /// `Re tr(self · other)`; exact for two Hermitian operands.
    pub fn trace_product(&self, other: &Self) -> f64 {
        let n = self.dim();
        assert_eq!(n, other.dim(), "dimension mismatch");
        let mut acc = 0.0;
        for r in 0..n {
            for c in 0..n {
                acc += (self.0[(r, c)] * other.0[(c, r)]).re;
            }
        }
        acc
    }

    /// `⟨v|self|v⟩`.
    pub fn expectation(&self, v: &[C64]) -> f64 {
        let mv = self.0.mul_vec(v);
        v.iter().zip(&mv).map(|(a, b)| (a.conj() * b).re).sum()
    }

    /// Eigendecomposition.
    pub fn eig(&self) -> Result<EigenDecomposition> {
        eig_hermitian(self)
    }

    /// Applies `f` to the spectrum: `V f(Λ) V†`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let e = self.eig()?;
        let vals: Vec<f64> = e.values.iter().map(|&l| f(l)).collect();
        Ok(e.recompose_with(&vals))
    }
}

/// Spectral decomposition `M = V diag(λ) V†` with eigenvalues descending.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    /// Eigenvalues, largest first.
    pub values: Vec<f64>,
    /// Unitary whose columns are the matching eigenvectors.
    pub vectors: ComplexMatrix,
}

impl EigenDecomposition {
    /// `V diag(vals) V†`.
    pub fn recompose_with(&self, vals: &[f64]) -> HermitianMatrix {
        let n = self.vectors.dim();
        let v = &self.vectors;
        let m = ComplexMatrix::from_fn(n, |r, c| {
            (0..n)
                .map(|k| v[(r, k)] * vals[k] * v[(c, k)].conj())
                .sum()
        });
        HermitianMatrix::symmetrized(m)
    }

    /// Smallest eigenvalue.
    pub fn min(&self) -> f64 {
        *self.values.last().expect("non-empty spectrum")
    }

    /// Largest eigenvalue.
    pub fn max(&self) -> f64 {
        self.values[0]
    }
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for r in 0..n {
        for c in 0..n {
            if r != c {
                s += a[(r, c)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Cyclic complex Jacobi eigendecomposition of a Hermitian matrix.
///
/// Each rotation first removes the phase of `a_pq` with a diagonal unitary and
/// then applies the classical real Jacobi rotation, so the combined 2×2 block
/// is `[[c, s], [-s e^{-iφ}, c e^{-iφ}]]`.
pub fn eig_hermitian(m: &HermitianMatrix) -> Result<EigenDecomposition> {
    let n = m.dim();
    let mut a = m.as_matrix().clone();
    let mut v = ComplexMatrix::identity(n);
    let tol = JACOBI_OFF_TOL * a.frobenius().max(1.0);

    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&a);
        if off <= tol {
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps,
                residual: off,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag == 0.0 {
                    continue;
                }
                let phase_conj = (apq / mag).conj();
                let theta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * mag);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    let t = 1.0 / (theta.abs() + (theta * theta + 1.0).sqrt());
                    if theta < 0.0 {
                        -t
                    } else {
                        t
                    }
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let u_pp = C64::new(c, 0.0);
                let u_pq = C64::new(s, 0.0);
                let u_qp = phase_conj * (-s);
                let u_qq = phase_conj * c;

                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * u_pp + akq * u_qp;
                    a[(k, q)] = akp * u_pq + akq * u_qq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = u_pp.conj() * apk + u_qp.conj() * aqk;
                    a[(q, k)] = u_pq.conj() * apk + u_qq.conj() * aqk;
                }
                a[(p, q)] = C64::zero();
                a[(q, p)] = C64::zero();
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * u_pp + vkq * u_qp;
                    v[(k, q)] = vkp * u_pq + vkq * u_qq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, |r, c| v[(r, order[c])]);
    Ok(EigenDecomposition { values, vectors })
}

/// `tr|M| = Σ|λᵢ|`.
pub fn trace_norm(m: &HermitianMatrix) -> Result<f64> {
    Ok(eig_hermitian(m)?.values.iter().map(|l| l.abs()).sum())
}

/// Normalized trace distance `½ tr|ρ − σ|`.
pub fn trace_distance(rho: &HermitianMatrix, sigma: &HermitianMatrix) -> Result<f64> {
    rho.as_matrix().same_dim(sigma.as_matrix())?;
    Ok(0.5 * trace_norm(&rho.sub(sigma))?)
}

/// True iff `λ_min(m) ≥ −tol`.
pub fn is_psd(m: &HermitianMatrix, tol: f64) -> bool {
    match eig_hermitian(m) {
        Ok(e) => e.min() >= -tol,
        Err(_) => false,
    }
}

/// Principal square root of a PSD matrix (default tolerance).
pub fn psd_sqrt(m: &HermitianMatrix) -> Result<HermitianMatrix> {
    psd_sqrt_with(m, Tolerances::default().psd)
}

/// Principal square root; eigenvalues in `[−tol, 0)` are clamped to zero.
pub fn psd_sqrt_with(m: &HermitianMatrix, tol: f64) -> Result<HermitianMatrix> {
    let e = eig_hermitian(m)?;
    if e.min() < -tol {
        return Err(Error::NotPsd(e.min()));
    }
    let vals: Vec<f64> = e.values.iter().map(|&l| l.max(0.0).sqrt()).collect();
    Ok(e.recompose_with(&vals))
}

/// Positive part `Σ_{λᵢ ≥ 0} λᵢ |i⟩⟨i|` of a Hermitian matrix.
pub fn positive_part(m: &HermitianMatrix) -> Result<HermitianMatrix> {
    m.map_spectrum(|l| l.max(0.0))
}
