//! Convex decompositions of a density matrix into pure states, and their
//! reduction to at most `dim + 1` terms by elimination of affine
//! dependences.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::composite::{column_matrix, point_of, ProductSpace, SeedFunction};
use crate::error::{Error, Result};
use crate::hermitian::{c, CMatrix, CVector, ComplexVector, HermitianMatrix};
use crate::linalg::null_vector;
use crate::tensors::momentum_map;

/// Tolerance on `sum t_i = 1`, on unit norms and on negative weights.
pub const WEIGHT_TOLERANCE: f64 = 1e-12;

/// Relative singular value above which no affine dependence is assumed.
const DEPENDENCE_TOLERANCE: f64 = 1e-8;

/// `rho = sum_i t_i |x_i><x_i|` with `t_i >= 0`, `sum t_i = 1`, `||x_i|| = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PureDecomposition {
    pub weights: Vec<f64>,
    pub vectors: Vec<ComplexVector>,
}

impl PureDecomposition {
    pub fn new(weights: Vec<f64>, vectors: Vec<ComplexVector>) -> Result<Self> {
        if weights.len() != vectors.len() {
            return Err(Error::InconsistentDecomposition(format!(
                "{} weights for {} vectors",
                weights.len(),
                vectors.len()
            )));
        }
        if weights.is_empty() {
            return Err(Error::InconsistentDecomposition("no terms".into()));
        }
        let n = vectors[0].dim();
        if let Some(v) = vectors.iter().find(|v| v.dim() != n) {
            return Err(Error::DimensionMismatch { left: n, right: v.dim() });
        }
        if let Some(t) = weights.iter().find(|t| !(**t >= -WEIGHT_TOLERANCE)) {
            return Err(Error::InconsistentDecomposition(format!("negative weight {t}")));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_TOLERANCE * weights.len().max(1) as f64 {
            return Err(Error::InconsistentDecomposition(format!("weights sum to {sum}")));
        }
        if let Some(v) = vectors.iter().find(|v| (v.norm() - 1.0).abs() > WEIGHT_TOLERANCE) {
            return Err(Error::InconsistentDecomposition(format!(
                "vector of norm {} is not a unit vector",
                v.norm()
            )));
        }
        let weights = weights.into_iter().map(|t| t.max(0.0)).collect();
        Ok(Self { weights, vectors })
    }

    /// From unnormalized vectors `y_i` with `t_i = ||y_i||^2`; zero vectors
    /// are dropped.
    pub fn from_unnormalized(ys: &[CVector]) -> Result<Self> {
        let mut weights = Vec::new();
        let mut vectors = Vec::new();
        for y in ys {
            let t = y.norm_squared();
            if t > 0.0 && t.is_finite() {
                weights.push(t);
                vectors.push(ComplexVector(y / c(t.sqrt(), 0.0)));
            }
        }
        Self::new(weights, vectors)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.vectors[0].dim()
    }

    /// `sum_i t_i |x_i><x_i|`.
    pub fn mixed_state(&self) -> HermitianMatrix {
        let n = self.dim();
        let mut m = CMatrix::zeros(n, n);
        for (t, x) in self.weights.iter().zip(&self.vectors) {
            m += x.as_vector() * x.as_vector().adjoint() * c(*t, 0.0);
        }
        HermitianMatrix::hermitian_part(&m)
    }

    /// `sqrt(t_i) x_i`.
    pub fn unnormalized(&self) -> Vec<CVector> {
        self.weights
            .iter()
            .zip(&self.vectors)
            .map(|(t, x)| x.as_vector() * c(t.sqrt(), 0.0))
            .collect()
    }

    /// `sum_i t_i F(|x_i><x_i|)`.
    pub fn cost(&self, ps: &ProductSpace, seed: &dyn SeedFunction) -> f64 {
        self.term_costs(ps, seed)
            .iter()
            .zip(&self.weights)
            .map(|(f, t)| f * t)
            .sum()
    }

    /// `F(|x_i><x_i|)` per term.
    pub fn term_costs(&self, ps: &ProductSpace, seed: &dyn SeedFunction) -> Vec<f64> {
        self.vectors
            .iter()
            .map(|x| seed.weighted_cost(ps, x.as_vector().as_slice()))
            .collect()
    }

    fn points(&self) -> Vec<DVector<f64>> {
        self.vectors.iter().map(|x| point_of(&momentum_map(x))).collect()
    }

    fn select(&self, weights: Vec<f64>, keep: &[usize]) -> Result<Self> {
        let sum: f64 = keep.iter().map(|&i| weights[i]).sum();
        let w = keep.iter().map(|&i| weights[i] / sum).collect();
        let v = keep.iter().map(|&i| self.vectors[i].clone()).collect();
        Self::new(w, v)
    }
}

/// `lambda d1 + (1 - lambda) d2`, term lists concatenated.
pub fn splice(lambda: f64, d1: &PureDecomposition, d2: &PureDecomposition) -> Result<PureDecomposition> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidArgument(format!("mixing weight {lambda} outside [0, 1]")));
    }
    let mut weights: Vec<f64> = d1.weights.iter().map(|t| lambda * t).collect();
    weights.extend(d2.weights.iter().map(|t| (1.0 - lambda) * t));
    let mut vectors = d1.vectors.clone();
    vectors.extend(d2.vectors.iter().cloned());
    PureDecomposition::new(weights, vectors)
}

/// One elimination step: a null vector `a` of `[1 ... 1; p_1 ... p_m]`, a
/// shift `t - theta a` that keeps all weights nonnegative, and the index
/// that reaches zero. With `costs`, the sign of `a` is chosen so that
/// `sum a_i F_i >= 0`, which makes the shift non-increasing in cost.
fn eliminate_one(weights: &mut [f64], points: &[DVector<f64>], costs: Option<&[f64]>) -> Result<usize> {
    let m = weights.len();
    let dim = points[0].len();
    let mut a_mat = DMatrix::zeros(dim + 1, m);
    a_mat.row_mut(0).fill(1.0);
    a_mat.view_mut((1, 0), (dim, m)).copy_from(&column_matrix(points));
    let (mut a, rel) = null_vector(&a_mat);
    if rel > DEPENDENCE_TOLERANCE {
        return Err(Error::InconsistentDecomposition(format!(
            "points are affinely independent (relative singular value {rel:e}); ambient dimension too small"
        )));
    }
    let flip = match costs {
        Some(f) => a.iter().zip(f).map(|(ai, fi)| ai * fi).sum::<f64>() < 0.0,
        None => {
            let max = a.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let min = a.iter().copied().fold(f64::INFINITY, f64::min);
            -min > max
        }
    };
    if flip {
        a = -a;
    }
    let mut best: Option<(usize, f64)> = None;
    for i in 0..m {
        if a[i] > 0.0 {
            let theta = weights[i] / a[i];
            if best.is_none_or(|(_, b)| theta < b) {
                best = Some((i, theta));
            }
        }
    }
    let (i0, theta) = best.ok_or_else(|| Error::InconsistentDecomposition("null vector has no positive entry".into()))?;
    for i in 0..m {
        weights[i] = (weights[i] - theta * a[i]).max(0.0);
    }
    weights[i0] = 0.0;
    Ok(i0)
}

/// Weights and surviving indices after reducing a convex combination of
/// `points` in a real space of dimension `ambient_dim` to at most
/// `ambient_dim + 1` terms. The combination `sum t_i p_i` is preserved.
pub fn caratheodory_reduce_points(
    weights: &[f64],
    points: &[DVector<f64>],
    costs: Option<&[f64]>,
    ambient_dim: usize,
) -> Result<(Vec<f64>, Vec<usize>)> {
    if weights.len() != points.len() || costs.is_some_and(|f| f.len() != weights.len()) {
        return Err(Error::InconsistentDecomposition("length mismatch".into()));
    }
    let mut w = weights.to_vec();
    let mut keep: Vec<usize> = (0..w.len()).filter(|&i| w[i] > 0.0).collect();
    while keep.len() > ambient_dim + 1 {
        let pts: Vec<DVector<f64>> = keep.iter().map(|&i| points[i].clone()).collect();
        let fs: Option<Vec<f64>> = costs.map(|f| keep.iter().map(|&i| f[i]).collect());
        let mut sub: Vec<f64> = keep.iter().map(|&i| w[i]).collect();
        eliminate_one(&mut sub, &pts, fs.as_deref())?;
        for (j, &i) in keep.iter().enumerate() {
            w[i] = sub[j];
        }
        keep.retain(|&i| w[i] > 0.0);
    }
    Ok((w, keep))
}

/// Reduction to at most `ambient_dim + 1` terms (`n^2 - 1` for density
/// matrices on `C^n`), preserving the mixed state.
pub fn caratheodory_reduce(d: &PureDecomposition, ambient_dim: usize) -> Result<PureDecomposition> {
    if d.len() <= ambient_dim + 1 {
        return Ok(d.clone());
    }
    let (w, keep) = caratheodory_reduce_points(&d.weights, &d.points(), None, ambient_dim)?;
    d.select(w, &keep)
}

/// As [`caratheodory_reduce`], never increasing `sum t_i F(x_i)`.
pub fn caratheodory_reduce_cost_aware(
    d: &PureDecomposition,
    ambient_dim: usize,
    ps: &ProductSpace,
    seed: &dyn SeedFunction,
) -> Result<PureDecomposition> {
    if d.len() <= ambient_dim + 1 {
        return Ok(d.clone());
    }
    let costs = d.term_costs(ps, seed);
    let (w, keep) = caratheodory_reduce_points(&d.weights, &d.points(), Some(&costs), ambient_dim)?;
    d.select(w, &keep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::composite::{sample_separable_decomposition, LinearEntropy};
    use crate::random::{dirichlet_uniform, random_unit_vector, rng_from_seed};

    fn random_decomposition(n: usize, m: usize, seed: u64) -> PureDecomposition {
        let mut rng = rng_from_seed(seed);
        let w = dirichlet_uniform(m, &mut rng);
        let v = (0..m).map(|_| random_unit_vector(n, &mut rng)).collect();
        PureDecomposition::new(w, v).unwrap()
    }

    #[test]
    fn validation() {
        let x = ComplexVector::basis(2, 0);
        assert!(PureDecomposition::new(vec![0.5], vec![x.clone()]).is_err());
        assert!(PureDecomposition::new(vec![1.5, -0.5], vec![x.clone(), x.clone()]).is_err());
        let long = ComplexVector(x.as_vector() * c(2.0, 0.0));
        assert!(PureDecomposition::new(vec![1.0], vec![long]).is_err());
        assert!(PureDecomposition::new(vec![1.0], vec![x]).is_ok());
    }

    #[test]
    fn short_decomposition_unchanged() {
        let d = random_decomposition(2, 3, 100);
        assert_eq!(caratheodory_reduce(&d, 3).unwrap(), d);
    }

    #[test]
    fn collinear_points() {
        let pts = vec![DVector::from_vec(vec![0.0]), DVector::from_vec(vec![0.5]), DVector::from_vec(vec![1.0])];
        let w = [0.25, 0.5, 0.25];
        let (w2, keep) = caratheodory_reduce_points(&w, &pts, None, 1).unwrap();
        assert!(keep.len() <= 2);
        let mean: f64 = keep.iter().map(|&i| w2[i] * pts[i][0]).sum();
        let total: f64 = keep.iter().map(|&i| w2[i]).sum();
        assert!((mean - 0.5).abs() < 1e-14 && (total - 1.0).abs() < 1e-14);
    }

    #[test]
    fn reduces_long_decompositions() {
        let d = random_decomposition(4, 30, 101);
        let r = caratheodory_reduce(&d, 15).unwrap();
        assert!(r.len() <= 16);
        let res = (&d.mixed_state() - &r.mixed_state()).frobenius_norm();
        assert!(res < 1e-10, "residual {res}");
    }

    #[test]
    fn independent_points_are_rejected() {
        let d = random_decomposition(2, 4, 102);
        assert!(matches!(caratheodory_reduce(&d, 1), Err(Error::InconsistentDecomposition(_))));
    }

    #[test]
    fn cost_aware_reduction_never_increases_cost() {
        let ps = ProductSpace::new(2, 2).unwrap();
        for seed in 0..5 {
            let d = random_decomposition(4, 25, 103 + seed);
            let r = caratheodory_reduce_cost_aware(&d, 15, &ps, &LinearEntropy).unwrap();
            assert!(r.len() <= 16);
            assert!(r.cost(&ps, &LinearEntropy) <= d.cost(&ps, &LinearEntropy) + 1e-12);
            assert!((&d.mixed_state() - &r.mixed_state()).frobenius_norm() < 1e-10);
        }
    }

    #[test]
    fn splice_mixes_states() {
        let ps = ProductSpace::new(2, 2).unwrap();
        let a = sample_separable_decomposition(&ps, 3, 1).unwrap();
        let b = random_decomposition(4, 2, 104);
        let s = splice(0.25, &a, &b).unwrap();
        assert_eq!(s.len(), 5);
        let want = &a.mixed_state().scale(0.25) + &b.mixed_state().scale(0.75);
        assert!((&s.mixed_state() - &want).max_abs_entry() < 1e-14);
        let cost = 0.25 * a.cost(&ps, &LinearEntropy) + 0.75 * b.cost(&ps, &LinearEntropy);
        assert!((s.cost(&ps, &LinearEntropy) - cost).abs() < 1e-14);
        assert!(splice(1.5, &a, &b).is_err());
    }
}
