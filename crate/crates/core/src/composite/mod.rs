//! Bipartite systems `H = H1 (x) H2`: product embedding, partial trace and
//! transpose, separable states, and the convex-roof extension of a seed
//! function from pure states to all density matrices.

mod decomposition;
mod roof;
mod seed;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_same_dim, Error, Result};
use crate::hermitian::{spectral, CMatrix, ComplexVector, HermitianMatrix};
use crate::random::{dirichlet_uniform, random_unit_vector, rng_from_seed};

pub use decomposition::{
    caratheodory_reduce, caratheodory_reduce_cost_aware, caratheodory_reduce_points, splice,
    PureDecomposition, WEIGHT_TOLERANCE,
};
pub use roof::{convex_roof, convex_roof_with, OptimizerTrace, RoofConfig, RoofEstimate};
pub use seed::{seed_function, LinearEntropy, SeedFunction};

/// Dimensions of the two factors. Basis index `(i1, i2)` maps to
/// `i1 * n2 + i2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductSpace {
    pub n1: usize,
    pub n2: usize,
}

impl ProductSpace {
    pub fn new(n1: usize, n2: usize) -> Result<Self> {
        if n1 == 0 || n2 == 0 {
            return Err(Error::InvalidArgument(format!(
                "factor dimensions must be >= 1, got {n1}x{n2}"
            )));
        }
        Ok(Self { n1, n2 })
    }

    pub fn dim(&self) -> usize {
        self.n1 * self.n2
    }

    pub fn index(&self, i1: usize, i2: usize) -> usize {
        i1 * self.n2 + i2
    }

    pub fn split(&self, i: usize) -> (usize, usize) {
        (i / self.n2, i % self.n2)
    }

    /// Real dimension of the affine hull of the density matrices, `n^2 - 1`.
    pub fn ambient_dim(&self) -> usize {
        self.dim() * self.dim() - 1
    }

    fn check(&self, rho: &HermitianMatrix) -> Result<()> {
        ensure_same_dim(self.dim(), rho.dim())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Factor {
    First,
    Second,
}

/// `a (x) b`.
pub fn segre(ps: &ProductSpace, a: &HermitianMatrix, b: &HermitianMatrix) -> Result<HermitianMatrix> {
    ensure_same_dim(ps.n1, a.dim())?;
    ensure_same_dim(ps.n2, b.dim())?;
    Ok(HermitianMatrix::hermitian_part(&a.matrix().kronecker(b.matrix())))
}

/// `x1 (x) x2`.
pub fn product_vector(ps: &ProductSpace, x1: &ComplexVector, x2: &ComplexVector) -> Result<ComplexVector> {
    ensure_same_dim(ps.n1, x1.dim())?;
    ensure_same_dim(ps.n2, x2.dim())?;
    Ok(ComplexVector(x1.as_vector().kronecker(x2.as_vector())))
}

/// `U1 (x) U2`.
pub fn local_operator(ps: &ProductSpace, u1: &CMatrix, u2: &CMatrix) -> Result<CMatrix> {
    ensure_same_dim(ps.n1, u1.nrows())?;
    ensure_same_dim(ps.n2, u2.nrows())?;
    Ok(u1.kronecker(u2))
}

/// Reduced state on the kept factor.
pub fn partial_trace(ps: &ProductSpace, rho: &HermitianMatrix, keep: Factor) -> Result<HermitianMatrix> {
    ps.check(rho)?;
    let m = rho.matrix();
    let out = match keep {
        Factor::First => CMatrix::from_fn(ps.n1, ps.n1, |a, b| {
            (0..ps.n2).map(|j| m[(ps.index(a, j), ps.index(b, j))]).sum()
        }),
        Factor::Second => CMatrix::from_fn(ps.n2, ps.n2, |a, b| {
            (0..ps.n1).map(|j| m[(ps.index(j, a), ps.index(j, b))]).sum()
        }),
    };
    Ok(HermitianMatrix::hermitian_part(&out))
}

/// Transpose on the second factor:
/// `rho^T2_{(i1,i2),(j1,j2)} = rho_{(i1,j2),(j1,i2)}`.
pub fn partial_transpose(ps: &ProductSpace, rho: &HermitianMatrix) -> Result<HermitianMatrix> {
    ps.check(rho)?;
    let n = ps.dim();
    let m = rho.matrix();
    let out = CMatrix::from_fn(n, n, |r, s| {
        let (i1, i2) = ps.split(r);
        let (j1, j2) = ps.split(s);
        m[(ps.index(i1, j2), ps.index(j1, i2))]
    });
    HermitianMatrix::new(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PptResult {
    pub ppt: bool,
    pub min_eigenvalue: f64,
}

/// Positivity of the partial transpose: necessary for separability, and
/// sufficient when `n1 * n2 <= 6`.
pub fn ppt_test(ps: &ProductSpace, rho: &HermitianMatrix, tol: f64) -> Result<PptResult> {
    let pt = partial_transpose(ps, rho)?;
    let min = spectral(&pt)?.eigenvalues.last().copied().unwrap_or(0.0);
    Ok(PptResult {
        ppt: min >= -tol,
        min_eigenvalue: min,
    })
}

/// `sum_i t_i |x1_i (x) x2_i><x1_i (x) x2_i|` with Dirichlet-uniform weights
/// and Haar-random unit factors.
pub fn sample_separable_decomposition(ps: &ProductSpace, terms: usize, seed: u64) -> Result<PureDecomposition> {
    if terms == 0 {
        return Err(Error::InvalidArgument("need at least one term".into()));
    }
    let mut rng = rng_from_seed(seed);
    let weights = dirichlet_uniform(terms, &mut rng);
    let vectors = (0..terms)
        .map(|_| {
            let a = random_unit_vector(ps.n1, &mut rng);
            let b = random_unit_vector(ps.n2, &mut rng);
            product_vector(ps, &a, &b).map(|v| v.normalized())
        })
        .collect::<Result<Vec<_>>>()?;
    PureDecomposition::new(weights, vectors)
}

pub fn sample_separable(ps: &ProductSpace, terms: usize, seed: u64) -> Result<HermitianMatrix> {
    Ok(sample_separable_decomposition(ps, terms, seed)?.mixed_state())
}

/// Coefficient matrix `M[i1][i2] = x_(i1, i2)` of a vector on the product.
pub fn coefficient_matrix(ps: &ProductSpace, x: &ComplexVector) -> Result<CMatrix> {
    ensure_same_dim(ps.dim(), x.dim())?;
    Ok(CMatrix::from_fn(ps.n1, ps.n2, |a, b| x.0[ps.index(a, b)]))
}

/// Schmidt coefficients of a vector, descending.
pub fn schmidt_coefficients(ps: &ProductSpace, x: &ComplexVector) -> Result<Vec<f64>> {
    let m = coefficient_matrix(ps, x)?;
    Ok(crate::linalg::complex_singular_values(&m))
}

/// Real `n^2` coordinates of a Hermitian matrix, as used for affine
/// dependence among projectors.
pub(crate) fn point_of(rho: &HermitianMatrix) -> nalgebra::DVector<f64> {
    rho.to_coordinates()
}

pub(crate) fn column_matrix(points: &[nalgebra::DVector<f64>]) -> DMatrix<f64> {
    DMatrix::from_columns(points)
}
