//! Orbits of the congruence action `(T, xi) -> T xi T^dagger` of `GL(n)`.
//!
//! Orbits are labelled by the signature: every Hermitian `xi` equals
//! `T^dagger D T` with `D = diag(1,..,1, -1,..,-1, 0,..,0)`.

use crate::error::{ensure_same_dim, Error, Result};
use crate::hermitian::{c, spectral, CMatrix, HermitianMatrix, Signature};
use crate::linalg::condition_number;

/// Condition number above which `T` is treated as singular.
pub const GL_CONDITION_BOUND: f64 = 1e12;

/// `T xi T^dagger` for invertible `T`.
pub fn gl_action(t: &CMatrix, xi: &HermitianMatrix) -> Result<HermitianMatrix> {
    if t.nrows() != t.ncols() {
        return Err(Error::NotSquare {
            rows: t.nrows(),
            cols: t.ncols(),
        });
    }
    ensure_same_dim(t.nrows(), xi.dim())?;
    let cond = condition_number(t);
    if !(cond < GL_CONDITION_BOUND) {
        return Err(Error::Singular { condition: cond });
    }
    Ok(HermitianMatrix::hermitian_part(&(t * xi.matrix() * t.adjoint())))
}

#[derive(Debug, Clone)]
pub struct GlFactor {
    pub t: CMatrix,
    pub signature: Signature,
}

impl GlFactor {
    pub fn normal_form(&self) -> HermitianMatrix {
        signature_matrix(&self.signature)
    }

    /// `T^dagger D T`.
    pub fn reconstruct(&self) -> HermitianMatrix {
        let d = self.normal_form();
        HermitianMatrix::hermitian_part(&(self.t.adjoint() * d.matrix() * &self.t))
    }
}

/// `diag(1 (k_plus times), -1 (k_minus times), 0, ...)`.
pub fn signature_matrix(sig: &Signature) -> HermitianMatrix {
    let mut d = vec![0.0; sig.dim];
    for v in d.iter_mut().take(sig.k_plus) {
        *v = 1.0;
    }
    for v in d.iter_mut().skip(sig.k_plus).take(sig.k_minus) {
        *v = -1.0;
    }
    HermitianMatrix::diagonal(&d)
}

/// `xi = T^dagger D T` with `T = C V^dagger`, where `V` holds eigenvectors
/// ordered positive, negative, zero and `C = diag(sqrt|lambda|, .., 1)`.
/// `tol` defaults to the scale-aware rank tolerance.
pub fn gl_orbit_factor(xi: &HermitianMatrix, tol: Option<f64>) -> Result<GlFactor> {
    let n = xi.dim();
    let spec = spectral(xi)?;
    let tol = tol.unwrap_or_else(|| spec.default_rank_tolerance());
    let lam = &spec.eigenvalues;
    let mut order: Vec<usize> = (0..n).filter(|&i| lam[i] > tol).collect();
    order.extend((0..n).filter(|&i| lam[i] < -tol));
    order.extend((0..n).filter(|&i| lam[i].abs() <= tol));
    let signature = spec.signature(tol);
    if signature.rank() == 0 {
        return Ok(GlFactor {
            t: CMatrix::identity(n, n),
            signature,
        });
    }
    let mut t = CMatrix::zeros(n, n);
    for (row, &i) in order.iter().enumerate() {
        let scale = if lam[i].abs() > tol { lam[i].abs().sqrt() } else { 1.0 };
        let v = spec.eigenvectors.column(i);
        for col in 0..n {
            t[(row, col)] = v[col].conj() * c(scale, 0.0);
        }
    }
    Ok(GlFactor { t, signature })
}
