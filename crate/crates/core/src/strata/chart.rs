//! Charts on the manifold of rank-`k` positive semidefinite matrices.
//!
//! A rank-`k` PSD matrix `X` whose principal block on the index set `J` is
//! invertible is determined by its `J` columns: `X = C M^{-1} C^dagger` with
//! `C = X[:, J]` and `M = X[J, J]`. The chart at a base point `A` records the
//! displacement of those columns, split into the Hermitian `J x J` block and
//! the `(n-k) x k` block of the remaining rows.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{ensure_same_dim, Error, Result};
use crate::hermitian::{c, rank_signature, spectral, CMatrix, HermitianMatrix, HERMITICITY_TOLERANCE};
use crate::linalg::{condition_number, singular_gap, singular_values};
use crate::strata::{stratum_dim, Stratum};

/// Default upper bound on the condition number of the `J x J` block.
pub const DEFAULT_CONDITION_BOUND: f64 = 1e6;

/// A strictly increasing, non-empty set of 0-based indices below `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexSet {
    indices: Vec<usize>,
    n: usize,
}

impl IndexSet {
    pub fn new(indices: Vec<usize>, n: usize) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::InvalidIndexSet("index set is empty".into()));
        }
        if indices.len() > n {
            return Err(Error::InvalidIndexSet(format!(
                "{} indices exceed dimension {n}",
                indices.len()
            )));
        }
        for w in indices.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::InvalidIndexSet(format!(
                    "indices must be strictly increasing, got {indices:?}"
                )));
            }
        }
        if let Some(&last) = indices.last() {
            if last >= n {
                return Err(Error::InvalidIndexSet(format!(
                    "index {last} out of range for dimension {n}"
                )));
            }
        }
        Ok(Self { indices, n })
    }

    /// From 1-based indices, as written on the command line.
    pub fn from_one_based(indices: &[usize], n: usize) -> Result<Self> {
        if indices.contains(&0) {
            return Err(Error::InvalidIndexSet("1-based indices start at 1".into()));
        }
        Self::new(indices.iter().map(|i| i - 1).collect(), n)
    }

    /// `{0, ..., k-1}`.
    pub fn leading(k: usize, n: usize) -> Result<Self> {
        Self::new((0..k).collect(), n)
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Indices not in the set, increasing.
    pub fn complement(&self) -> Vec<usize> {
        (0..self.n).filter(|i| self.indices.binary_search(i).is_err()).collect()
    }
}

/// Chart data `(J, A)` for the rank-`k` stratum through `A`.
#[derive(Debug, Clone)]
pub struct ChartPhi {
    j: IndexSet,
    base: HermitianMatrix,
    condition_bound: f64,
}

impl ChartPhi {
    /// Requires `rank(A) = |J|` and a positive definite `A[J, J]` with
    /// condition number below [`DEFAULT_CONDITION_BOUND`].
    pub fn new(base: HermitianMatrix, j: IndexSet) -> Result<Self> {
        Self::with_condition_bound(base, j, DEFAULT_CONDITION_BOUND)
    }

    pub fn with_condition_bound(base: HermitianMatrix, j: IndexSet, condition_bound: f64) -> Result<Self> {
        ensure_same_dim(base.dim(), j.dim())?;
        if !(condition_bound > 1.0) {
            return Err(Error::InvalidArgument(format!(
                "condition bound must exceed 1, got {condition_bound}"
            )));
        }
        let sig = rank_signature(&base, None)?;
        if sig.k_minus != 0 {
            return Err(Error::InvalidArgument("chart base point must be PSD".into()));
        }
        if sig.rank() != j.len() {
            return Err(Error::InvalidArgument(format!(
                "base point has rank {} but |J| = {}",
                sig.rank(),
                j.len()
            )));
        }
        let chart = Self {
            j,
            base,
            condition_bound,
        };
        let m = principal_block(chart.base.matrix(), chart.j.indices());
        chart.check_block(&m).map_err(|e| match e {
            Error::OutsideChartDomain(msg) => {
                Error::InvalidArgument(format!("base point J-block unusable: {msg}"))
            }
            other => other,
        })?;
        Ok(chart)
    }

    pub fn index_set(&self) -> &IndexSet {
        &self.j
    }

    pub fn base(&self) -> &HermitianMatrix {
        &self.base
    }

    pub fn n(&self) -> usize {
        self.base.dim()
    }

    pub fn k(&self) -> usize {
        self.j.len()
    }

    pub fn condition_bound(&self) -> f64 {
        self.condition_bound
    }

    fn check_block(&self, m: &CMatrix) -> Result<()> {
        if m.clone().cholesky().is_none() {
            return Err(Error::OutsideChartDomain("J-block is not positive definite".into()));
        }
        let cond = condition_number(m);
        if !(cond < self.condition_bound) {
            return Err(Error::OutsideChartDomain(format!(
                "J-block condition number {cond:e} exceeds {:e}",
                self.condition_bound
            )));
        }
        Ok(())
    }
}

/// Chart coordinates: Hermitian `k x k` block on `J x J` and the
/// `(n-k) x k` block on `J^c x J`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartCoordinates {
    pub block_jj: HermitianMatrix,
    pub block_off: CMatrix,
}

impl ChartCoordinates {
    pub fn zeros(n: usize, k: usize) -> Self {
        Self {
            block_jj: HermitianMatrix::zeros(k),
            block_off: CMatrix::zeros(n - k, k),
        }
    }

    pub fn k(&self) -> usize {
        self.block_jj.dim()
    }

    pub fn n(&self) -> usize {
        self.block_off.nrows() + self.k()
    }

    /// `2nk - k^2`.
    pub fn real_dim(&self) -> usize {
        let (n, k) = (self.n(), self.k());
        2 * n * k - k * k
    }

    /// Diagonal of the `J x J` block, then real and imaginary parts of its
    /// strict upper triangle row by row, then the off block row by row.
    pub fn to_real_vector(&self) -> DVector<f64> {
        let k = self.k();
        let mut out = Vec::with_capacity(self.real_dim());
        for i in 0..k {
            out.push(self.block_jj.get(i, i).re);
        }
        for i in 0..k {
            for j in (i + 1)..k {
                let z = self.block_jj.get(i, j);
                out.push(z.re);
                out.push(z.im);
            }
        }
        for r in 0..self.block_off.nrows() {
            for s in 0..k {
                let z = self.block_off[(r, s)];
                out.push(z.re);
                out.push(z.im);
            }
        }
        DVector::from_vec(out)
    }

    pub fn from_real_vector(n: usize, k: usize, v: &DVector<f64>) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::InvalidArgument(format!("need 1 <= k <= n, got k={k}, n={n}")));
        }
        ensure_same_dim(v.len(), 2 * n * k - k * k)?;
        let mut jj = CMatrix::zeros(k, k);
        let mut p = 0;
        for i in 0..k {
            jj[(i, i)] = c(v[p], 0.0);
            p += 1;
        }
        for i in 0..k {
            for j in (i + 1)..k {
                jj[(i, j)] = c(v[p], v[p + 1]);
                jj[(j, i)] = c(v[p], -v[p + 1]);
                p += 2;
            }
        }
        let mut off = CMatrix::zeros(n - k, k);
        for r in 0..(n - k) {
            for s in 0..k {
                off[(r, s)] = c(v[p], v[p + 1]);
                p += 2;
            }
        }
        Ok(Self {
            block_jj: HermitianMatrix::new(jj)?,
            block_off: off,
        })
    }
}

fn principal_block(m: &CMatrix, idx: &[usize]) -> CMatrix {
    CMatrix::from_fn(idx.len(), idx.len(), |r, s| m[(idx[r], idx[s])])
}

/// `Phi_{J,A}(X)`: the `J x J` and `J^c x J` blocks of `X - A`.
pub fn chart_forward(chart: &ChartPhi, x: &HermitianMatrix) -> Result<ChartCoordinates> {
    ensure_same_dim(chart.n(), x.dim())?;
    let d = x.matrix() - chart.base.matrix();
    let j = chart.j.indices();
    let jc = chart.j.complement();
    let jj = principal_block(&d, j);
    let off = CMatrix::from_fn(jc.len(), j.len(), |r, s| d[(jc[r], j[s])]);
    Ok(ChartCoordinates {
        block_jj: HermitianMatrix::hermitian_part(&jj),
        block_off: off,
    })
}

/// `Phi_{J,A}^{-1}(y) = C M^{-1} C^dagger` where `C` is the `J` column block
/// of `A + y` and `M = C[J, :]`.
pub fn chart_inverse(chart: &ChartPhi, y: &ChartCoordinates) -> Result<HermitianMatrix> {
    ensure_same_dim(chart.n(), y.n())?;
    ensure_same_dim(chart.k(), y.k())?;
    let j = chart.j.indices();
    let jc = chart.j.complement();
    let a = chart.base.matrix();
    let mut cols = CMatrix::from_fn(chart.n(), j.len(), |i, s| a[(i, j[s])]);
    for (r, &row) in j.iter().enumerate() {
        for s in 0..j.len() {
            cols[(row, s)] += y.block_jj.get(r, s);
        }
    }
    for (r, &row) in jc.iter().enumerate() {
        for s in 0..j.len() {
            cols[(row, s)] += y.block_off[(r, s)];
        }
    }
    let m = CMatrix::from_fn(j.len(), j.len(), |r, s| cols[(j[r], s)]);
    chart.check_block(&m)?;
    rational_reconstruction(&cols, &m)
}

/// `C M^{-1} C^dagger` for a positive definite `M`.
fn rational_reconstruction(cols: &CMatrix, m: &CMatrix) -> Result<HermitianMatrix> {
    let chol = m
        .clone()
        .cholesky()
        .ok_or_else(|| Error::OutsideChartDomain("J-block is not positive definite".into()))?;
    let m_inv_ct = chol.solve(&cols.adjoint());
    Ok(HermitianMatrix::hermitian_part(&(cols * m_inv_ct)))
}

/// The unique rank-`k` PSD matrix whose rows indexed by `J` are `rows`
/// (`k x n`): `X = rows^dagger M^{-1} rows` with `M = rows[:, J]`.
pub fn reconstruct_from_rows(rows: &CMatrix, j: &IndexSet) -> Result<HermitianMatrix> {
    ensure_same_dim(rows.nrows(), j.len())?;
    ensure_same_dim(rows.ncols(), j.dim())?;
    let idx = j.indices();
    let m = CMatrix::from_fn(idx.len(), idx.len(), |r, s| rows[(r, idx[s])]);
    let scale = m.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let asym = (&m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if asym > HERMITICITY_TOLERANCE * scale {
        return Err(Error::NotHermitian {
            asymmetry: asym,
            tolerance: HERMITICITY_TOLERANCE * scale,
        });
    }
    let cond = condition_number(&m);
    if !cond.is_finite() || cond > 1e14 {
        return Err(Error::Singular { condition: cond });
    }
    let m = (&m + m.adjoint()) * c(0.5, 0.0);
    let cols = rows.adjoint();
    rational_reconstruction(&cols, &m).map_err(|_| {
        Error::InvalidArgument("J-block of the rows is not positive definite".into())
    })
}

/// Singular values of a chart Jacobian with the rank and gap read off at
/// the expected stratum dimension.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JacobianSpectrum {
    pub singular_values: Vec<f64>,
    pub expected_rank: usize,
    /// Count of singular values above `1e-6 * sigma_max`.
    pub numerical_rank: usize,
    /// `sigma_r / sigma_{r+1}` at `r = expected_rank`.
    pub gap: f64,
}

/// Real Jacobian, in Hilbert-Schmidt coordinates, of the retraction
/// `X -> Phi^{-1}(Phi(X))` at the base point (divided by its trace for the
/// density stratum). Its image is the tangent space of the stratum, so the
/// rank is the stratum dimension. Central differences with one Richardson
/// step; `h` is relative to the smallest eigenvalue of the base `J`-block,
/// which bounds the region where `M^{-1}` is well approximated.
pub fn retraction_jacobian(chart: &ChartPhi, stratum: Stratum, h: f64) -> Result<DMatrix<f64>> {
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(format!("step must be > 0, got {h}")));
    }
    let block = HermitianMatrix::hermitian_part(&principal_block(chart.base.matrix(), chart.j.indices()));
    let h = h * spectral(&block)?.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let n = chart.n();
    let basis = HermitianMatrix::orthonormal_basis(n);
    let eval = |dir: &HermitianMatrix, s: f64| -> Result<DVector<f64>> {
        let x = chart.base() + &dir.scale(s);
        let y = chart_forward(chart, &x)?;
        let r = chart_inverse(chart, &y)?;
        let r = match stratum {
            Stratum::Cone => r,
            Stratum::Density => {
                let tr = r.trace();
                r.scale(1.0 / tr)
            }
        };
        Ok(r.to_coordinates())
    };
    let mut jac = DMatrix::zeros(n * n, n * n);
    for (col, dir) in basis.iter().enumerate() {
        let d1 = (eval(dir, h)? - eval(dir, -h)?) / (2.0 * h);
        let d2 = (eval(dir, 2.0 * h)? - eval(dir, -2.0 * h)?) / (4.0 * h);
        let d = (d1 * 4.0 - d2) / 3.0;
        jac.set_column(col, &d);
    }
    Ok(jac)
}

pub fn jacobian_spectrum(chart: &ChartPhi, stratum: Stratum, h: f64) -> Result<JacobianSpectrum> {
    let jac = retraction_jacobian(chart, stratum, h)?;
    let s = singular_values(&jac);
    let expected_rank = stratum_dim(chart.n(), chart.k(), stratum)?;
    let top = s.first().copied().unwrap_or(0.0);
    let numerical_rank = s.iter().filter(|&&v| v > 1e-6 * top).count();
    let gap = singular_gap(&s, expected_rank);
    Ok(JacobianSpectrum {
        singular_values: s,
        expected_rank,
        numerical_rank,
        gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{ginibre, random_psd_of_rank, rng_from_seed};

    fn chart_for(n: usize, k: usize, seed: u64) -> ChartPhi {
        let mut rng = rng_from_seed(seed);
        let a = random_psd_of_rank(n, k, &mut rng);
        ChartPhi::new(a, IndexSet::leading(k, n).unwrap()).unwrap()
    }

    #[test]
    fn index_set_validation() {
        assert!(IndexSet::new(vec![], 3).is_err());
        assert!(IndexSet::new(vec![1, 0], 3).is_err());
        assert!(IndexSet::new(vec![0, 0], 3).is_err());
        assert!(IndexSet::new(vec![3], 3).is_err());
        let j = IndexSet::from_one_based(&[1, 3], 4).unwrap();
        assert_eq!(j.indices(), &[0, 2]);
        assert_eq!(j.complement(), vec![1, 3]);
        assert!(IndexSet::from_one_based(&[0], 4).is_err());
    }

    #[test]
    fn forward_at_base_is_zero() {
        let chart = chart_for(4, 2, 1);
        let y = chart_forward(&chart, chart.base()).unwrap();
        assert_eq!(y.block_jj.max_abs_entry(), 0.0);
        assert!(y.block_off.iter().all(|z| z.norm() == 0.0));
        assert_eq!(y.real_dim(), 12);
    }

    #[test]
    fn forward_extracts_blocks_of_a_displacement() {
        let chart = chart_for(3, 1, 2);
        let mut e = CMatrix::zeros(3, 3);
        e[(0, 0)] = c(0.5, 0.0);
        e[(2, 0)] = c(0.1, 0.2);
        e[(0, 2)] = c(0.1, -0.2);
        let x = chart.base() + &HermitianMatrix::new(e).unwrap();
        let y = chart_forward(&chart, &x).unwrap();
        assert!((y.block_jj.get(0, 0).re - 0.5).abs() < 1e-14);
        assert!((y.block_off[(0, 0)]).norm() < 1e-14);
        assert!((y.block_off[(1, 0)] - c(0.1, 0.2)).norm() < 1e-14);
    }

    #[test]
    fn inverse_at_zero_is_base() {
        let chart = chart_for(5, 3, 3);
        let x = chart_inverse(&chart, &ChartCoordinates::zeros(5, 3)).unwrap();
        assert!((&x - chart.base()).max_abs_entry() < 1e-10);
    }

    #[test]
    fn inverse_two_by_two_closed_form() {
        let chart = ChartPhi::new(
            HermitianMatrix::diagonal(&[1.0, 0.0]),
            IndexSet::leading(1, 2).unwrap(),
        )
        .unwrap();
        let w = c(0.3, -0.7);
        let mut y = ChartCoordinates::zeros(2, 1);
        y.block_off[(0, 0)] = w;
        let x = chart_inverse(&chart, &y).unwrap();
        assert!((x.get(0, 0) - c(1.0, 0.0)).norm() < 1e-15);
        assert!((x.get(1, 0) - w).norm() < 1e-15);
        assert!((x.get(0, 1) - w.conj()).norm() < 1e-15);
        assert!((x.get(1, 1).re - w.norm_sqr()).abs() < 1e-15);
    }

    #[test]
    fn inverse_outside_domain() {
        let chart = chart_for(3, 1, 4);
        let mut y = ChartCoordinates::zeros(3, 1);
        y.block_jj = HermitianMatrix::diagonal(&[-chart.base().get(0, 0).re]);
        assert!(matches!(
            chart_inverse(&chart, &y),
            Err(Error::OutsideChartDomain(_))
        ));
    }

    #[test]
    fn real_vector_round_trip() {
        let mut rng = rng_from_seed(5);
        let v = crate::random::random_real_vector(2 * 5 * 2 - 4, &mut rng);
        let y = ChartCoordinates::from_real_vector(5, 2, &v).unwrap();
        assert!((y.to_real_vector() - v).norm() < 1e-15);
    }

    #[test]
    fn rows_reconstruction() {
        let p = HermitianMatrix::diagonal(&[1.0, 0.0, 0.0]);
        let j = IndexSet::leading(1, 3).unwrap();
        let rows = p.matrix().rows(0, 1).into_owned();
        let x = reconstruct_from_rows(&rows, &j).unwrap();
        assert!((&x - &p).max_abs_entry() < 1e-15);

        let mut rng = rng_from_seed(6);
        let t = ginibre(2, 4, &mut rng);
        let x0 = HermitianMatrix::hermitian_part(&(t.adjoint() * t));
        let j = IndexSet::new(vec![1, 3], 4).unwrap();
        let rows = CMatrix::from_fn(2, 4, |r, s| x0.get(j.indices()[r], s));
        let x = reconstruct_from_rows(&rows, &j).unwrap();
        assert!((&x - &x0).max_abs_entry() < 1e-9);

        let full = random_psd_of_rank(3, 3, &mut rng);
        let j = IndexSet::leading(3, 3).unwrap();
        let x = reconstruct_from_rows(full.matrix(), &j).unwrap();
        assert!((&x - &full).max_abs_entry() < 1e-10);
    }

    #[test]
    fn rows_reconstruction_errors() {
        let j = IndexSet::leading(2, 3).unwrap();
        let singular = CMatrix::from_fn(2, 3, |_, _| c(1.0, 0.0));
        assert!(matches!(reconstruct_from_rows(&singular, &j), Err(Error::Singular { .. })));
        let mut skew = CMatrix::identity(2, 3);
        skew[(0, 1)] = c(0.5, 0.0);
        assert!(matches!(reconstruct_from_rows(&skew, &j), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn jacobian_rank_matches_dimension() {
        let chart = chart_for(4, 2, 7);
        let cone = jacobian_spectrum(&chart, Stratum::Cone, 1e-4).unwrap();
        assert_eq!(cone.expected_rank, 12);
        assert_eq!(cone.numerical_rank, 12);
        assert!(cone.gap > 1e3);
        let dens = jacobian_spectrum(&chart, Stratum::Density, 1e-4).unwrap();
        assert_eq!(dens.numerical_rank, 11);
        assert!(dens.gap > 1e3);
    }
}
