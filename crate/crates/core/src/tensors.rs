//! Linear contravariant tensors on the space of Hermitian matrices.
//!
//! With covectors identified with Hermitian matrices through the scalar
//! product, the Poisson tensor is `Lambda(xi)(A, B) = <xi, [A, B]>` and the
//! Riemann-Jordan tensor is `R(xi)(A, B) = <xi, [A, B]_+>`. Their combination
//! `R + i Lambda` evaluates to `Tr(xi A B)` and is the pushforward of the
//! Hermitian structure of `C^n` under the momentum map `x -> |x><x|`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_same_dim, Result};
use crate::hermitian::{
    c, hs_inner, jordan_bracket, lie_bracket, trace_of_product, CMatrix, ComplexVector,
    HermitianMatrix,
};

/// `f_A(x) = <x, A x> / 2`.
#[derive(Debug, Clone)]
pub struct QuadraticFunction {
    pub generator: HermitianMatrix,
}

impl QuadraticFunction {
    pub fn new(generator: HermitianMatrix) -> Self {
        Self { generator }
    }

    pub fn eval(&self, x: &ComplexVector) -> Result<f64> {
        quadratic_eval(self, x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TensorKind {
    Lambda,
    R,
    Complex,
}

/// A tensor evaluation; `im` is zero unless the kind is [`TensorKind::Complex`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TensorValue {
    pub kind: TensorKind,
    pub re: f64,
    pub im: f64,
}

/// `mu(x) = |x><x|`, entries `x_i conj(x_j)`.
pub fn momentum_map(x: &ComplexVector) -> HermitianMatrix {
    let v = x.as_vector();
    HermitianMatrix::hermitian_part(&(v * v.adjoint()))
}

/// `|x><y|`, entries `x_i conj(y_j)`. Not Hermitian unless `x` and `y` are parallel.
pub fn ket_bra(x: &ComplexVector, y: &ComplexVector) -> CMatrix {
    x.as_vector() * y.as_vector().adjoint()
}

pub fn quadratic_eval(f: &QuadraticFunction, x: &ComplexVector) -> Result<f64> {
    ensure_same_dim(f.generator.dim(), x.dim())?;
    let ax = f.generator.matrix() * x.as_vector();
    Ok(0.5 * x.as_vector().dotc(&ax).re)
}

/// `{f_A, f_B}_H(x) = <A x, B x>`: real part is the metric bracket, imaginary
/// part the symplectic one.
pub fn hilbert_bracket(a: &HermitianMatrix, b: &HermitianMatrix, x: &ComplexVector) -> Result<Complex64> {
    ensure_same_dim(a.dim(), b.dim())?;
    ensure_same_dim(a.dim(), x.dim())?;
    let ax = a.matrix() * x.as_vector();
    let bx = b.matrix() * x.as_vector();
    Ok(ax.dotc(&bx))
}

/// `Lambda(xi)(A, B) = Tr(xi (AB - BA)) / 2i`.
pub fn lambda_eval(xi: &HermitianMatrix, a: &HermitianMatrix, b: &HermitianMatrix) -> Result<f64> {
    ensure_same_dim(xi.dim(), a.dim())?;
    hs_inner(xi, &lie_bracket(a, b)?)
}

/// `R(xi)(A, B) = Tr(xi (AB + BA)) / 2`.
pub fn r_eval(xi: &HermitianMatrix, a: &HermitianMatrix, b: &HermitianMatrix) -> Result<f64> {
    ensure_same_dim(xi.dim(), a.dim())?;
    hs_inner(xi, &jordan_bracket(a, b)?)
}

/// `(R + i Lambda)(xi)(A, B) = Tr(xi A B)`.
pub fn complex_tensor_eval(
    xi: &HermitianMatrix,
    a: &HermitianMatrix,
    b: &HermitianMatrix,
) -> Result<Complex64> {
    ensure_same_dim(xi.dim(), a.dim())?;
    ensure_same_dim(a.dim(), b.dim())?;
    let ab = a.matrix() * b.matrix();
    Ok(trace_of_product(xi.matrix(), &ab))
}

pub fn evaluate(
    kind: TensorKind,
    xi: &HermitianMatrix,
    a: &HermitianMatrix,
    b: &HermitianMatrix,
) -> Result<TensorValue> {
    let (re, im) = match kind {
        TensorKind::Lambda => (lambda_eval(xi, a, b)?, 0.0),
        TensorKind::R => (r_eval(xi, a, b)?, 0.0),
        TensorKind::Complex => {
            let z = complex_tensor_eval(xi, a, b)?;
            (z.re, z.im)
        }
    };
    Ok(TensorValue { kind, re, im })
}

/// Generators of the two brackets of quadratic functions:
/// `{f_A, f_B}_g = f_{AB+BA}` and `{f_A, f_B}_omega = f_{-i(AB-BA)}`.
#[derive(Debug, Clone)]
pub struct QuadraticBrackets {
    pub g_part: HermitianMatrix,
    pub omega_part: HermitianMatrix,
}

pub fn bracket_of_quadratics(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<QuadraticBrackets> {
    Ok(QuadraticBrackets {
        g_part: jordan_bracket(a, b)?,
        omega_part: lie_bracket(a, b)?,
    })
}

/// `[T(xi)(E_a, E_b)]_{a,b}` over the given covector basis.
pub fn gram_matrix(
    kind: TensorKind,
    xi: &HermitianMatrix,
    basis: &[HermitianMatrix],
) -> Result<DMatrix<f64>> {
    let m = basis.len();
    let mut g = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            g[(i, j)] = match kind {
                TensorKind::Lambda => lambda_eval(xi, &basis[i], &basis[j])?,
                TensorKind::R => r_eval(xi, &basis[i], &basis[j])?,
                TensorKind::Complex => complex_tensor_eval(xi, &basis[i], &basis[j])?.re,
            };
        }
    }
    Ok(g)
}

/// The two-level example: basis `{U, X, Y, Z}` of 2x2 Hermitian matrices,
/// orthonormal for `<A, B> = Tr(AB)/2`.
pub mod u2 {
    use super::*;

    pub fn basis() -> [HermitianMatrix; 4] {
        let z = c(0.0, 0.0);
        let one = c(1.0, 0.0);
        let u = HermitianMatrix::identity(2);
        let x = HermitianMatrix::diagonal(&[1.0, -1.0]);
        let y = HermitianMatrix::new(CMatrix::from_row_slice(2, 2, &[z, one, one, z]))
            .expect("hermitian");
        let zz = HermitianMatrix::new(CMatrix::from_row_slice(
            2,
            2,
            &[z, c(0.0, 1.0), c(0.0, -1.0), z],
        ))
        .expect("hermitian");
        [u, x, y, zz]
    }

    /// `u U + x X + y Y + z Z`, so that `u = Tr(U xi)/2` and so on.
    pub fn point(u: f64, x: f64, y: f64, z: f64) -> HermitianMatrix {
        let [bu, bx, by, bz] = basis();
        &(&bu.scale(u) + &bx.scale(x)) + &(&by.scale(y) + &bz.scale(z))
    }

    /// Rank pattern of `(Lambda, R)` at `(u, x, y, z)`: Lambda has rank 0 on
    /// the `u` axis and 2 elsewhere; R has rank 0 at the origin, 2 for
    /// `u = 0`, 3 on the cone `x^2+y^2+z^2 = u^2 > 0` and 4 otherwise.
    pub fn predicted_ranks(u: f64, x: f64, y: f64, z: f64, tol: f64) -> (usize, usize) {
        let r2 = x * x + y * y + z * z;
        let lambda = if r2 <= tol { 0 } else { 2 };
        let r = if u.abs() <= tol && r2 <= tol {
            0
        } else if u.abs() <= tol {
            2
        } else if (r2 - u * u).abs() <= tol {
            3
        } else {
            4
        };
        (lambda, r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian::{spectral, CVector};
    use crate::linalg::numerical_rank;
    use crate::random::{random_hermitian, rng_from_seed};
    use approx::assert_abs_diff_eq;

    fn random_vector(n: usize, seed: u64) -> ComplexVector {
        let mut rng = rng_from_seed(seed);
        ComplexVector(CVector::from_fn(n, |_, _| crate::random::complex_gaussian(&mut rng)))
    }

    #[test]
    fn momentum_map_examples() {
        assert_eq!(momentum_map(&ComplexVector::zeros(3)).max_abs_entry(), 0.0);
        let e1 = momentum_map(&ComplexVector::basis(3, 0));
        assert!((&e1 - &HermitianMatrix::diagonal(&[1.0, 0.0, 0.0])).max_abs_entry() < 1e-15);

        let x = random_vector(4, 10);
        let r2 = x.norm().powi(2);
        let xi = momentum_map(&x);
        assert_abs_diff_eq!(xi.trace(), r2, epsilon = 1e-12);
        let s = spectral(&xi).unwrap();
        assert_abs_diff_eq!(s.spectral_norm(), r2, epsilon = 1e-12);
        let sq = xi.pow(2);
        assert!((&sq - &xi.scale(r2)).max_abs_entry() < 1e-12);
        // ket convention: entry (i, j) = x_i conj(x_j)
        assert!((xi.get(0, 1) - x.0[0] * x.0[1].conj()).norm() < 1e-15);
    }

    #[test]
    fn quadratic_eval_examples() {
        let x = random_vector(3, 11);
        let f_i = QuadraticFunction::new(HermitianMatrix::identity(3));
        assert_abs_diff_eq!(f_i.eval(&x).unwrap(), x.norm().powi(2) / 2.0, epsilon = 1e-14);

        let mut rng = rng_from_seed(12);
        let a = random_hermitian(3, &mut rng);
        let f_a = QuadraticFunction::new(a.clone());
        for k in 0..3 {
            let v = f_a.eval(&ComplexVector::basis(3, k)).unwrap();
            assert_abs_diff_eq!(v, a.get(k, k).re / 2.0, epsilon = 1e-15);
        }
        let tr = trace_of_product(momentum_map(&x).matrix(), a.matrix());
        let direct = x.inner(&ComplexVector(a.matrix() * x.as_vector())).unwrap();
        assert!((tr - direct).norm() < 1e-12);
        assert!(f_a.eval(&ComplexVector::zeros(2)).is_err());
    }

    #[test]
    fn lambda_and_r_examples() {
        let mut rng = rng_from_seed(13);
        let xi = random_hermitian(3, &mut rng);
        let a = random_hermitian(3, &mut rng);
        let b = random_hermitian(3, &mut rng);
        assert_abs_diff_eq!(lambda_eval(&xi, &a, &a).unwrap(), 0.0, epsilon = 1e-14);
        assert_eq!(lambda_eval(&HermitianMatrix::zeros(3), &a, &b).unwrap(), 0.0);
        assert_abs_diff_eq!(
            lambda_eval(&xi, &a, &b).unwrap(),
            -lambda_eval(&xi, &b, &a).unwrap(),
            epsilon = 1e-13
        );
        let tr_ab = trace_of_product(a.matrix(), b.matrix()).re;
        assert_abs_diff_eq!(r_eval(&HermitianMatrix::identity(3), &a, &b).unwrap(), tr_ab, epsilon = 1e-12);
        let tr_xib = trace_of_product(xi.matrix(), b.matrix()).re;
        assert_abs_diff_eq!(r_eval(&xi, &HermitianMatrix::identity(3), &b).unwrap(), tr_xib, epsilon = 1e-12);
        assert_abs_diff_eq!(r_eval(&xi, &a, &b).unwrap(), r_eval(&xi, &b, &a).unwrap(), epsilon = 1e-13);
    }

    #[test]
    fn complex_tensor_examples() {
        let mut rng = rng_from_seed(14);
        let xi = random_hermitian(4, &mut rng);
        let a = random_hermitian(4, &mut rng);
        let b = random_hermitian(4, &mut rng);
        let aa = complex_tensor_eval(&xi, &a, &a).unwrap();
        assert!(aa.im.abs() < 1e-12);
        assert_abs_diff_eq!(aa.re, trace_of_product(xi.matrix(), &(a.matrix() * a.matrix())).re, epsilon = 1e-12);

        let mixed = HermitianMatrix::identity(4).scale(0.25);
        let v = complex_tensor_eval(&mixed, &a, &b).unwrap();
        assert!((v - trace_of_product(a.matrix(), b.matrix()) / 4.0).norm() < 1e-13);

        let v = complex_tensor_eval(&xi, &a, &b).unwrap();
        let naive = (xi.matrix() * a.matrix() * b.matrix()).trace();
        assert!((v - naive).norm() < 1e-12);
        assert_abs_diff_eq!(v.re, r_eval(&xi, &a, &b).unwrap(), epsilon = 1e-12);
        assert_abs_diff_eq!(v.im, lambda_eval(&xi, &a, &b).unwrap(), epsilon = 1e-12);
    }

    #[test]
    fn bracket_of_quadratics_examples() {
        let mut rng = rng_from_seed(15);
        let a = random_hermitian(3, &mut rng);
        let br = bracket_of_quadratics(&a, &a).unwrap();
        assert!((&br.g_part - &a.pow(2).scale(2.0)).max_abs_entry() < 1e-13);
        assert!(br.omega_part.max_abs_entry() < 1e-14);
        let br = bracket_of_quadratics(&HermitianMatrix::identity(3), &a).unwrap();
        assert!((&br.g_part - &a.scale(2.0)).max_abs_entry() < 1e-13);
        assert!(br.omega_part.max_abs_entry() < 1e-14);

        let b = random_hermitian(3, &mut rng);
        let x = random_vector(3, 16);
        let br = bracket_of_quadratics(&a, &b).unwrap();
        // gradients of f_A, f_B at x are A x, B x
        let ax = a.matrix() * x.as_vector();
        let bx = b.matrix() * x.as_vector();
        let oracle = ax.dotc(&bx);
        let g = QuadraticFunction::new(br.g_part).eval(&x).unwrap();
        let w = QuadraticFunction::new(br.omega_part).eval(&x).unwrap();
        assert_abs_diff_eq!(g, oracle.re, epsilon = 1e-12);
        assert_abs_diff_eq!(w, oracle.im, epsilon = 1e-12);
    }

    #[test]
    fn u2_basis_is_orthonormal() {
        let b = u2::basis();
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(hs_inner(&b[i], &b[j]).unwrap(), expect, epsilon = 1e-15);
            }
        }
        let p = u2::point(0.3, -0.2, 0.5, 0.7);
        let coords: Vec<f64> = b.iter().map(|e| hs_inner(e, &p).unwrap()).collect();
        for (got, want) in coords.iter().zip([0.3, -0.2, 0.5, 0.7]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-15);
        }
    }

    #[test]
    fn u2_sampled_rank_pattern() {
        let basis = u2::basis();
        let cases = [
            (0.0, 0.0, 0.0, 0.0, 0, 0),
            (1.0, 0.0, 0.0, 0.0, 0, 4),
            (0.0, 0.5, 0.0, 0.0, 2, 2),
            (1.0, 0.6, 0.8, 0.0, 2, 3),
            (1.0, 0.1, 0.2, 0.3, 2, 4),
            (-0.5, 0.0, 0.0, 0.5, 2, 3),
        ];
        for (u, x, y, z, rl, rr) in cases {
            let xi = u2::point(u, x, y, z);
            let gl = gram_matrix(TensorKind::Lambda, &xi, &basis).unwrap();
            let gr = gram_matrix(TensorKind::R, &xi, &basis).unwrap();
            assert_eq!(numerical_rank(&gl, 1e-9), rl, "Lambda at {u},{x},{y},{z}");
            assert_eq!(numerical_rank(&gr, 1e-9), rr, "R at {u},{x},{y},{z}");
            assert_eq!(u2::predicted_ranks(u, x, y, z, 1e-12), (rl, rr));
        }
    }
}
