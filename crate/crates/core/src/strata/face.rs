//! Faces of the convex set of density matrices.
//!
//! The face through a rank-`k` density matrix `rho` consists of all density
//! matrices supported on `range(rho)`; it is affinely a copy of the
//! `k`-dimensional density matrices.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_same_dim, Error, Result};
use crate::hermitian::{spectral, CMatrix, HermitianMatrix};

#[derive(Debug, Clone)]
pub struct Face {
    /// Orthonormal basis of `range(rho)`, `n x k`.
    pub support: CMatrix,
    /// Orthonormal basis of `Ker(rho)`, `n x (n-k)`.
    pub kernel: CMatrix,
    pub k: usize,
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityCheck {
    pub trace_error: f64,
    pub min_eigenvalue: f64,
}

/// Trace distance from 1 and smallest eigenvalue; `Err` when either is
/// outside `tol`.
pub fn check_density(rho: &HermitianMatrix, tol: f64) -> Result<DensityCheck> {
    let spec = spectral(rho)?;
    let min = spec.eigenvalues.last().copied().unwrap_or(0.0);
    let check = DensityCheck {
        trace_error: (rho.trace() - 1.0).abs(),
        min_eigenvalue: min,
    };
    if check.trace_error > tol {
        return Err(Error::NotDensity(format!("trace {} differs from 1", rho.trace())));
    }
    if min < -tol {
        return Err(Error::NotDensity(format!("negative eigenvalue {min:e}")));
    }
    Ok(check)
}

pub fn face_at(rho: &HermitianMatrix, tol: f64) -> Result<Face> {
    check_density(rho, tol)?;
    let spec = spectral(rho)?;
    let support = spec.range_basis(tol);
    let kernel = spec.kernel_basis(tol);
    Ok(Face {
        k: support.ncols(),
        support,
        kernel,
        tol,
    })
}

impl Face {
    /// `sigma` is a density matrix and `sigma K = 0` on the kernel basis `K`.
    pub fn contains(&self, sigma: &HermitianMatrix) -> Result<bool> {
        ensure_same_dim(self.support.nrows(), sigma.dim())?;
        if check_density(sigma, self.tol).is_err() {
            return Ok(false);
        }
        let leak = sigma.matrix() * &self.kernel;
        Ok(leak.iter().all(|z| z.norm() <= self.tol))
    }

    /// Real dimension of the face, `k^2 - 1`.
    pub fn dim(&self) -> usize {
        self.k * self.k - 1
    }
}
