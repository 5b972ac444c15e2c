//! Small dense helpers shared by the geometry modules.

use nalgebra::{DMatrix, DVector};

use crate::hermitian::{CMatrix, HermitianMatrix};

/// Singular values, descending.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    s
}

pub fn complex_singular_values(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    s
}

/// Number of singular values strictly above `threshold`.
pub fn numerical_rank(m: &DMatrix<f64>, threshold: f64) -> usize {
    singular_values(m).iter().filter(|&&s| s > threshold).count()
}

/// `sigma_max / sigma_min`, infinite when singular.
pub fn condition_number(m: &CMatrix) -> f64 {
    let s = complex_singular_values(m);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        (Some(_), Some(_)) => f64::INFINITY,
        _ => 1.0,
    }
}

/// `sigma_r / sigma_{r+1}` (0-based `rank` values kept); infinite when there
/// is no next singular value or it is exactly zero.
pub fn singular_gap(values: &[f64], rank: usize) -> f64 {
    if rank == 0 {
        return f64::INFINITY;
    }
    match values.get(rank) {
        None | Some(&0.0) => f64::INFINITY,
        Some(&next) => values[rank - 1] / next,
    }
}

/// Modified Gram-Schmidt (two passes) over the [`hs_inner`](crate::hermitian::hs_inner)
/// coordinates; vectors whose residual norm falls below `rel_tol * max_norm`
/// are dropped.
pub fn orthonormalize(vectors: &[HermitianMatrix], rel_tol: f64) -> Vec<HermitianMatrix> {
    let Some(first) = vectors.first() else {
        return Vec::new();
    };
    let n = first.dim();
    let coords: Vec<DVector<f64>> = vectors.iter().map(|v| v.to_coordinates()).collect();
    let scale = coords.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Vec::new();
    }
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for v in coords {
        let mut w = v;
        for _ in 0..2 {
            for b in &basis {
                let p = b.dot(&w);
                w -= b * p;
            }
        }
        let norm = w.norm();
        if norm > rel_tol * scale {
            basis.push(w / norm);
        }
    }
    basis
        .iter()
        .map(|b| HermitianMatrix::from_coordinates(n, b).expect("length is n^2"))
        .collect()
}

/// Null vector of a real matrix with more columns than rank, taken as the
/// right singular vector of the smallest singular value after padding to a
/// square matrix. Returns the vector and that singular value relative to
/// the largest one.
pub fn null_vector(m: &DMatrix<f64>) -> (DVector<f64>, f64) {
    let cols = m.ncols();
    let rows = m.nrows().max(cols);
    let mut padded = DMatrix::<f64>::zeros(rows, cols);
    padded.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let (mut imin, mut smin, mut smax) = (0, f64::INFINITY, 0.0_f64);
    for (i, &s) in svd.singular_values.iter().enumerate() {
        smax = smax.max(s);
        if s < smin {
            smin = s;
            imin = i;
        }
    }
    let v = v_t.row(imin).transpose();
    let rel = if smax > 0.0 { smin / smax } else { 0.0 };
    (v, rel)
}
