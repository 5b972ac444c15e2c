//! Hermitian matrices as elements of the dual of the unitary Lie algebra.
//!
//! The space carries three real-bilinear operations used everywhere else in
//! the crate:
//!
//! * the scalar product `<A, B> = Tr(AB) / 2`,
//! * the Lie bracket `[A, B] = (AB - BA) / i`,
//! * the Jordan bracket `[A, B]_+ = AB + BA`.
//!
//! Both brackets return Hermitian matrices, and the scalar product is
//! invariant under both.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_same_dim, Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Largest `|M_ij - conj(M_ji)|` accepted at construction, relative to
/// `max(1, max_ij |M_ij|)`.
pub const HERMITICITY_TOLERANCE: f64 = 1e-12;

const EIGEN_MAX_ITERATIONS_PER_DIM: usize = 1000;

#[inline]
pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// A square complex matrix equal to its conjugate transpose.
#[derive(Clone, PartialEq)]
pub struct HermitianMatrix {
    m: CMatrix,
}

impl fmt::Debug for HermitianMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HermitianMatrix({}x{}) {}", self.dim(), self.dim(), self.m)
    }
}

impl HermitianMatrix {
    /// Validates Hermiticity within [`HERMITICITY_TOLERANCE`] and stores the
    /// exact Hermitian part `(M + M^dagger) / 2`.
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        if m.nrows() == 0 {
            return Err(Error::Empty);
        }
        let scale = m.iter().map(|z| z.norm()).fold(1.0_f64, f64::max);
        let tolerance = HERMITICITY_TOLERANCE * scale;
        let n = m.nrows();
        let mut asymmetry = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                asymmetry = asymmetry.max((m[(i, j)] - m[(j, i)].conj()).norm());
            }
        }
        if asymmetry > tolerance {
            return Err(Error::NotHermitian {
                asymmetry,
                tolerance,
            });
        }
        Ok(Self::hermitian_part(&m))
    }

    /// `(M + M^dagger) / 2` with no tolerance check.
    pub fn hermitian_part(m: &CMatrix) -> Self {
        assert_eq!(m.nrows(), m.ncols(), "hermitian_part needs a square matrix");
        let mut h = (m + m.adjoint()) * c(0.5, 0.0);
        for i in 0..h.nrows() {
            h[(i, i)].im = 0.0;
        }
        Self { m: h }
    }

    pub fn from_real(m: &DMatrix<f64>) -> Result<Self> {
        Self::new(m.map(|x| c(x, 0.0)))
    }

    pub fn from_parts(re: &DMatrix<f64>, im: &DMatrix<f64>) -> Result<Self> {
        if re.shape() != im.shape() {
            return Err(Error::Format(format!(
                "real part is {:?} but imaginary part is {:?}",
                re.shape(),
                im.shape()
            )));
        }
        Self::new(DMatrix::from_fn(re.nrows(), re.ncols(), |i, j| {
            c(re[(i, j)], im[(i, j)])
        }))
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            m: CMatrix::zeros(n, n),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            m: CMatrix::identity(n, n),
        }
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        Self {
            m: CMatrix::from_fn(n, n, |i, j| if i == j { c(values[i], 0.0) } else { c(0.0, 0.0) }),
        }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.m[(i, j)]
    }

    pub fn trace(&self) -> f64 {
        self.m.diagonal().iter().map(|z| z.re).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            m: &self.m * c(s, 0.0),
        }
    }

    /// Ordinary matrix product. Not Hermitian in general.
    pub fn product(&self, other: &Self) -> Result<CMatrix> {
        ensure_same_dim(self.dim(), other.dim())?;
        Ok(&self.m * &other.m)
    }

    /// `A^p` for a non-negative integer power.
    pub fn pow(&self, p: u32) -> Self {
        let mut out = CMatrix::identity(self.dim(), self.dim());
        for _ in 0..p {
            out = &out * &self.m;
        }
        Self::hermitian_part(&out)
    }

    /// `U A U^dagger` for any square `U` of matching size.
    pub fn conjugate_by(&self, u: &CMatrix) -> Result<Self> {
        ensure_same_dim(self.dim(), u.nrows())?;
        ensure_same_dim(u.nrows(), u.ncols())?;
        Ok(Self::hermitian_part(&(u * &self.m * u.adjoint())))
    }

    /// Coordinates in the basis that is orthonormal for [`hs_inner`]:
    /// `a_ii / sqrt(2)` for each diagonal entry, then `(Re a_ij, Im a_ij)`
    /// for each `i < j` in row-major order. Length `n^2`.
    pub fn to_coordinates(&self) -> DVector<f64> {
        let n = self.dim();
        let mut v = Vec::with_capacity(n * n);
        for i in 0..n {
            v.push(self.m[(i, i)].re / std::f64::consts::SQRT_2);
        }
        for i in 0..n {
            for j in (i + 1)..n {
                v.push(self.m[(i, j)].re);
                v.push(self.m[(i, j)].im);
            }
        }
        DVector::from_vec(v)
    }

    /// Inverse of [`HermitianMatrix::to_coordinates`].
    pub fn from_coordinates(n: usize, v: &DVector<f64>) -> Result<Self> {
        if v.len() != n * n {
            return Err(Error::DimensionMismatch {
                left: v.len(),
                right: n * n,
            });
        }
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = c(v[i] * std::f64::consts::SQRT_2, 0.0);
        }
        let mut idx = n;
        for i in 0..n {
            for j in (i + 1)..n {
                let z = c(v[idx], v[idx + 1]);
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
                idx += 2;
            }
        }
        Ok(Self { m })
    }

    /// The [`hs_inner`]-orthonormal basis matching [`HermitianMatrix::to_coordinates`].
    pub fn orthonormal_basis(n: usize) -> Vec<Self> {
        (0..n * n)
            .map(|k| {
                let mut v = DVector::zeros(n * n);
                v[k] = 1.0;
                Self::from_coordinates(n, &v).expect("length is n^2")
            })
            .collect()
    }

    pub fn spectral(&self) -> Result<SpectralData> {
        spectral(self)
    }
}

impl Add for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn add(self, rhs: Self) -> HermitianMatrix {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch in add");
        HermitianMatrix {
            m: &self.m + &rhs.m,
        }
    }
}

impl Sub for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn sub(self, rhs: Self) -> HermitianMatrix {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch in sub");
        HermitianMatrix {
            m: &self.m - &rhs.m,
        }
    }
}

impl Neg for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn neg(self) -> HermitianMatrix {
        HermitianMatrix { m: -&self.m }
    }
}

impl Mul<f64> for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn mul(self, rhs: f64) -> HermitianMatrix {
        self.scale(rhs)
    }
}

/// A vector in `C^n`. Serializes as `{"re": [..], "im": [..]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "VectorParts", try_from = "VectorParts")]
pub struct ComplexVector(pub CVector);

#[derive(Serialize, Deserialize)]
struct VectorParts {
    re: Vec<f64>,
    im: Vec<f64>,
}

impl From<ComplexVector> for VectorParts {
    fn from(v: ComplexVector) -> Self {
        Self {
            re: v.0.iter().map(|z| z.re).collect(),
            im: v.0.iter().map(|z| z.im).collect(),
        }
    }
}

impl TryFrom<VectorParts> for ComplexVector {
    type Error = Error;

    fn try_from(p: VectorParts) -> Result<Self> {
        ensure_same_dim(p.re.len(), p.im.len())?;
        Ok(Self::new(p.re.iter().zip(&p.im).map(|(&r, &i)| c(r, i)).collect()))
    }
}

impl ComplexVector {
    pub fn new(entries: Vec<Complex64>) -> Self {
        Self(CVector::from_vec(entries))
    }

    pub fn zeros(n: usize) -> Self {
        Self(CVector::zeros(n))
    }

    /// The `k`-th standard basis vector.
    pub fn basis(n: usize, k: usize) -> Self {
        let mut v = CVector::zeros(n);
        v[k] = c(1.0, 0.0);
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        Self(&self.0 / c(n, 0.0))
    }

    /// `<self, other>`, antilinear in `self`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        ensure_same_dim(self.dim(), other.dim())?;
        Ok(self.0.dotc(&other.0))
    }

    pub fn as_vector(&self) -> &CVector {
        &self.0
    }
}

/// Eigenvalues sorted descending with orthonormal eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct SpectralData {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
    pub source_dim: usize,
}

impl SpectralData {
    /// `U diag(lambda) U^dagger`.
    pub fn reconstruct(&self) -> HermitianMatrix {
        self.apply(|x| x)
    }

    /// `U diag(f(lambda)) U^dagger`.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> HermitianMatrix {
        let u = &self.eigenvectors;
        let d = CMatrix::from_diagonal(&DVector::from_iterator(
            self.source_dim,
            self.eigenvalues.iter().map(|&l| c(f(l), 0.0)),
        ));
        HermitianMatrix::hermitian_part(&(u * d * u.adjoint()))
    }

    pub fn spectral_norm(&self) -> f64 {
        self.eigenvalues.iter().map(|l| l.abs()).fold(0.0, f64::max)
    }

    /// `n * ||A||_2 * 1e-12`.
    pub fn default_rank_tolerance(&self) -> f64 {
        self.source_dim as f64 * self.spectral_norm() * 1e-12
    }

    pub fn signature(&self, tol: f64) -> Signature {
        Signature {
            k_plus: self.eigenvalues.iter().filter(|&&l| l > tol).count(),
            k_minus: self.eigenvalues.iter().filter(|&&l| l < -tol).count(),
            dim: self.source_dim,
        }
    }

    /// Eigenvectors whose eigenvalues lie in `[-tol, tol]`, as columns.
    pub fn kernel_basis(&self, tol: f64) -> CMatrix {
        let cols: Vec<CVector> = self
            .eigenvalues
            .iter()
            .enumerate()
            .filter(|(_, l)| l.abs() <= tol)
            .map(|(i, _)| self.eigenvectors.column(i).into_owned())
            .collect();
        if cols.is_empty() {
            CMatrix::zeros(self.source_dim, 0)
        } else {
            CMatrix::from_columns(&cols)
        }
    }

    /// Eigenvectors whose eigenvalues exceed `tol` in magnitude, as columns.
    pub fn range_basis(&self, tol: f64) -> CMatrix {
        let cols: Vec<CVector> = self
            .eigenvalues
            .iter()
            .enumerate()
            .filter(|(_, l)| l.abs() > tol)
            .map(|(i, _)| self.eigenvectors.column(i).into_owned())
            .collect();
        if cols.is_empty() {
            CMatrix::zeros(self.source_dim, 0)
        } else {
            CMatrix::from_columns(&cols)
        }
    }
}

/// Counts of eigenvalues above `tol` and below `-tol`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub k_plus: usize,
    pub k_minus: usize,
    pub dim: usize,
}

impl Signature {
    pub fn rank(&self) -> usize {
        self.k_plus + self.k_minus
    }
}

/// `<A, B> = Tr(AB) / 2`.
pub fn hs_inner(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<f64> {
    ensure_same_dim(a.dim(), b.dim())?;
    Ok(0.5 * trace_of_product(a.matrix(), b.matrix()).re)
}

/// `Tr(XY)` without forming the product.
pub(crate) fn trace_of_product(x: &CMatrix, y: &CMatrix) -> Complex64 {
    let n = x.nrows();
    let mut acc = c(0.0, 0.0);
    for i in 0..n {
        for j in 0..x.ncols() {
            acc += x[(i, j)] * y[(j, i)];
        }
    }
    acc
}

/// `[A, B] = (AB - BA) / i`.
pub fn lie_bracket(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<HermitianMatrix> {
    ensure_same_dim(a.dim(), b.dim())?;
    let comm = a.matrix() * b.matrix() - b.matrix() * a.matrix();
    Ok(HermitianMatrix::hermitian_part(&(comm * c(0.0, -1.0))))
}

/// `[A, B]_+ = AB + BA`.
pub fn jordan_bracket(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<HermitianMatrix> {
    ensure_same_dim(a.dim(), b.dim())?;
    let anti = a.matrix() * b.matrix() + b.matrix() * a.matrix();
    Ok(HermitianMatrix::hermitian_part(&anti))
}

/// Full eigendecomposition, eigenvalues sorted descending. Ties keep the
/// solver's order.
pub fn spectral(a: &HermitianMatrix) -> Result<SpectralData> {
    let n = a.dim();
    let max_iter = EIGEN_MAX_ITERATIONS_PER_DIM * n.max(1);
    let eig = SymmetricEigen::try_new(a.matrix().clone(), f64::EPSILON, max_iter).ok_or(
        Error::EigenNoConvergence {
            dim: n,
            iterations: max_iter,
        },
    )?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[j]
            .partial_cmp(&eig.eigenvalues[i])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let cols: Vec<CVector> = order
        .iter()
        .map(|&i| eig.eigenvectors.column(i).into_owned())
        .collect();
    Ok(SpectralData {
        eigenvalues,
        eigenvectors: CMatrix::from_columns(&cols),
        source_dim: n,
    })
}

/// Signature with `tol` or, when `None`, the scale-aware default
/// `n * ||A||_2 * 1e-12`.
pub fn rank_signature(a: &HermitianMatrix, tol: Option<f64>) -> Result<Signature> {
    if let Some(t) = tol {
        if !(t > 0.0) {
            return Err(Error::InvalidArgument(format!("rank tolerance must be > 0, got {t}")));
        }
    }
    let spec = spectral(a)?;
    let tol = tol.unwrap_or_else(|| spec.default_rank_tolerance());
    Ok(spec.signature(tol))
}
