//! Geometry of unitary orbits `{U xi U^dagger}` in the Hermitian matrices.
//!
//! Every operator here is diagonal in the eigenbasis of `xi`: the matrix unit
//! `E^k_l` is scaled by a multiplier depending on `(lambda_k, lambda_l)`.
//!
//! | operator              | multiplier                       |
//! |-----------------------|----------------------------------|
//! | `jtilde`  `[A, xi]`   | `i (lambda_k - lambda_l)`        |
//! | `rtilde`  `[A, xi]_+` | `lambda_k + lambda_l`            |
//! | `complex_structure`   | `i sgn(lambda_k - lambda_l)`     |
//! | `product_structure`   | `sgn(lambda_k + lambda_l)`       |
//!
//! Eigenvalues closer than `max(1, ||xi||) * 1e-9` form one degeneracy class;
//! signs vanish inside a class and on sums below the same tolerance.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_same_dim, Result};
use crate::hermitian::{c, jordan_bracket, lie_bracket, spectral, CMatrix, HermitianMatrix, SpectralData};
use crate::linalg::orthonormalize;
use crate::tensors::{lambda_eval, r_eval};

/// Relative gap below which eigenvalues are treated as equal.
pub const DEGENERACY_TOLERANCE: f64 = 1e-9;

/// Relative tolerance used when orthonormalizing distribution spans.
const SPAN_TOLERANCE: f64 = 1e-9;

/// A point `xi` of a unitary orbit with its cached spectral data.
#[derive(Debug, Clone)]
pub struct OrbitPoint {
    xi: HermitianMatrix,
    spec: SpectralData,
    classes: Vec<Vec<usize>>,
    class_of: Vec<usize>,
    tol: f64,
}

impl OrbitPoint {
    pub fn new(xi: HermitianMatrix) -> Result<Self> {
        let spec = spectral(&xi)?;
        let tol = spec.spectral_norm().max(1.0) * DEGENERACY_TOLERANCE;
        let mut classes: Vec<Vec<usize>> = Vec::new();
        let mut class_of = vec![0; xi.dim()];
        for (i, &l) in spec.eigenvalues.iter().enumerate() {
            let join = i > 0 && (spec.eigenvalues[i - 1] - l).abs() <= tol;
            if !join {
                classes.push(Vec::new());
            }
            let id = classes.len() - 1;
            classes[id].push(i);
            class_of[i] = id;
        }
        Ok(Self {
            xi,
            spec,
            classes,
            class_of,
            tol,
        })
    }

    pub fn xi(&self) -> &HermitianMatrix {
        &self.xi
    }

    pub fn spectral(&self) -> &SpectralData {
        &self.spec
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.spec.eigenvalues
    }

    /// Index classes of equal eigenvalues, in descending eigenvalue order.
    pub fn degeneracy_classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    pub fn dim(&self) -> usize {
        self.xi.dim()
    }

    /// Real dimension of the orbit, `n^2 - sum(m_c^2)` over class sizes.
    pub fn orbit_dim(&self) -> usize {
        let n = self.dim();
        n * n - self.classes.iter().map(|c| c.len() * c.len()).sum::<usize>()
    }

    fn same_class(&self, k: usize, l: usize) -> bool {
        self.class_of[k] == self.class_of[l]
    }

    /// `V^dagger A V`.
    pub fn to_eigenbasis(&self, a: &HermitianMatrix) -> Result<CMatrix> {
        ensure_same_dim(self.dim(), a.dim())?;
        let v = &self.spec.eigenvectors;
        Ok(v.adjoint() * a.matrix() * v)
    }

    /// `V A' V^dagger`.
    pub fn from_eigenbasis(&self, a: &CMatrix) -> HermitianMatrix {
        let v = &self.spec.eigenvectors;
        HermitianMatrix::hermitian_part(&(v * a * v.adjoint()))
    }

    fn scale_entries(&self, a: &HermitianMatrix, f: impl Fn(usize, usize) -> Complex64) -> Result<HermitianMatrix> {
        let mut m = self.to_eigenbasis(a)?;
        for k in 0..self.dim() {
            for l in 0..self.dim() {
                m[(k, l)] *= f(k, l);
            }
        }
        Ok(self.from_eigenbasis(&m))
    }

    fn sign_diff(&self, k: usize, l: usize) -> f64 {
        if self.same_class(k, l) {
            0.0
        } else {
            (self.spec.eigenvalues[k] - self.spec.eigenvalues[l]).signum()
        }
    }

    fn sign_sum(&self, k: usize, l: usize) -> f64 {
        let s = self.spec.eigenvalues[k] + self.spec.eigenvalues[l];
        if s.abs() <= self.tol {
            0.0
        } else {
            s.signum()
        }
    }
}

/// A generator together with the tangent vector it induces at an orbit point.
#[derive(Debug, Clone)]
pub struct TangentPair {
    pub generator: HermitianMatrix,
    pub vector: HermitianMatrix,
}

impl TangentPair {
    /// `([A, xi])`.
    pub fn lambda(p: &OrbitPoint, a: HermitianMatrix) -> Result<Self> {
        let vector = lie_bracket(&a, p.xi())?;
        Ok(Self { generator: a, vector })
    }

    /// `([A, xi]_+)`.
    pub fn r(p: &OrbitPoint, a: HermitianMatrix) -> Result<Self> {
        let vector = jordan_bracket(&a, p.xi())?;
        Ok(Self { generator: a, vector })
    }
}

/// `J~(A) = [A, xi]`.
pub fn jtilde(p: &OrbitPoint, a: &HermitianMatrix) -> Result<HermitianMatrix> {
    let lam = p.eigenvalues();
    p.scale_entries(a, |k, l| c(0.0, lam[k] - lam[l]))
}

/// `R~(A) = [A, xi]_+`.
pub fn rtilde(p: &OrbitPoint, a: &HermitianMatrix) -> Result<HermitianMatrix> {
    let lam = p.eigenvalues();
    p.scale_entries(a, |k, l| c(lam[k] + lam[l], 0.0))
}

/// `J = (-J~^2)^{-1/2} J~`, the invariant complex structure of the orbit.
pub fn complex_structure(p: &OrbitPoint, a: &HermitianMatrix) -> Result<HermitianMatrix> {
    p.scale_entries(a, |k, l| c(0.0, p.sign_diff(k, l)))
}

/// `R = |R~|^{-1} R~`; satisfies `R^3 = R`.
pub fn product_structure(p: &OrbitPoint, a: &HermitianMatrix) -> Result<HermitianMatrix> {
    p.scale_entries(a, |k, l| c(p.sign_sum(k, l), 0.0))
}

/// `eta([A, xi], [B, xi]) = -<xi, [A, B]>` for generators `A`, `B`.
pub fn orbit_symplectic(p: &OrbitPoint, a: &HermitianMatrix, b: &HermitianMatrix) -> Result<f64> {
    Ok(-lambda_eval(p.xi(), a, b)?)
}

/// `g([A, xi], [B, xi]) = eta([A, xi], J [B, xi])`; `J [B, xi]` is generated
/// by `J(B)` since `J` and `J~` commute.
pub fn orbit_metric(p: &OrbitPoint, a: &HermitianMatrix, b: &HermitianMatrix) -> Result<f64> {
    let jb = complex_structure(p, b)?;
    orbit_symplectic(p, a, &jb)
}

/// `sigma([A, xi]_+, [B, xi]_+) = <xi, [A, B]_+>` for generators `A`, `B`.
pub fn partial_sigma(p: &OrbitPoint, a: &HermitianMatrix, b: &HermitianMatrix) -> Result<f64> {
    r_eval(p.xi(), a, b)
}

/// `[V, xi] / ||xi||`, the complex structure of a rank-one orbit acting on
/// tangent vectors; cubes to its negative there.
pub fn rank_one_j(p: &OrbitPoint, v: &HermitianMatrix) -> Result<HermitianMatrix> {
    let norm = p.spectral().spectral_norm();
    Ok(jtilde(p, v)?.scale(1.0 / norm))
}

/// Least-squares generator `A` of a tangent vector `V = [A, xi]`:
/// `A'_kl = V'_kl / (i (lambda_k - lambda_l))` off the degeneracy classes.
pub fn generator_for(p: &OrbitPoint, v: &HermitianMatrix) -> Result<HermitianMatrix> {
    let lam = p.eigenvalues();
    p.scale_entries(v, |k, l| {
        if p.same_class(k, l) {
            c(0.0, 0.0)
        } else {
            c(0.0, -1.0 / (lam[k] - lam[l]))
        }
    })
}

/// Least-squares generator `A` of `V = [A, xi]_+`:
/// `A'_kl = V'_kl / (lambda_k + lambda_l)` where the sum is nonzero.
pub fn r_generator_for(p: &OrbitPoint, v: &HermitianMatrix) -> Result<HermitianMatrix> {
    let lam = p.eigenvalues();
    p.scale_entries(v, |k, l| {
        if p.sign_sum(k, l) == 0.0 {
            c(0.0, 0.0)
        } else {
            c(1.0 / (lam[k] + lam[l]), 0.0)
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Distribution {
    /// `{[A, xi]}`, tangent to the unitary orbit.
    Lambda,
    /// `{[A, xi]_+}`.
    R,
    /// `{[A, xi^2]}`.
    Zero,
}

/// Orthonormal basis of the distribution at `p`, spanned by the images of an
/// orthonormal basis of the Hermitian matrices.
pub fn distribution_basis(p: &OrbitPoint, which: Distribution) -> Result<Vec<HermitianMatrix>> {
    let n = p.dim();
    let xi2 = p.xi().pow(2);
    let images = HermitianMatrix::orthonormal_basis(n)
        .iter()
        .map(|a| match which {
            Distribution::Lambda => jtilde(p, a),
            Distribution::R => rtilde(p, a),
            Distribution::Zero => lie_bracket(a, &xi2),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(orthonormalize(&images, SPAN_TOLERANCE))
}

/// A linear vector field `xi -> [A, xi]` or `xi -> [A, xi]_+`.
#[derive(Debug, Clone)]
pub enum FundamentalField {
    Lambda(HermitianMatrix),
    R(HermitianMatrix),
}

impl FundamentalField {
    pub fn apply(&self, xi: &HermitianMatrix) -> Result<HermitianMatrix> {
        match self {
            FundamentalField::Lambda(a) => lie_bracket(a, xi),
            FundamentalField::R(a) => jordan_bracket(a, xi),
        }
    }
}

/// `[X, Y](xi) = DX(xi) Y(xi) - DY(xi) X(xi)`, which for linear fields is
/// `X(Y(xi)) - Y(X(xi))`. With this sign `A -> Lambda_A` is a Lie algebra
/// homomorphism.
pub fn field_commutator(x: &FundamentalField, y: &FundamentalField, xi: &HermitianMatrix) -> Result<HermitianMatrix> {
    let xy = x.apply(&y.apply(xi)?)?;
    let yx = y.apply(&x.apply(xi)?)?;
    Ok(&xy - &yx)
}
