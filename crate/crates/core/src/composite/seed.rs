//! Seed functions: continuous functions on pure states that vanish exactly on
//! product states.

use num_complex::Complex64;

use crate::composite::{partial_trace, Factor, ProductSpace};
use crate::error::{Error, Result};
use crate::hermitian::{spectral, HermitianMatrix};
use crate::strata::check_density;

/// A seed function `F` on pure states, evaluated through unnormalized
/// vectors `y` as the weighted cost `c(y) = ||y||^2 F(y / ||y||)`.
pub trait SeedFunction: Sync {
    fn name(&self) -> &'static str;

    /// `c(y)`; zero for `y = 0`.
    fn weighted_cost(&self, ps: &ProductSpace, y: &[Complex64]) -> f64;

    /// `c(y)` and the Wirtinger gradient `dc / d conj(y)` written into `grad`.
    fn weighted_cost_and_gradient(&self, ps: &ProductSpace, y: &[Complex64], grad: &mut [Complex64]) -> f64;

    /// `F(rho)` for a pure density matrix.
    fn pure_value(&self, ps: &ProductSpace, rho: &HermitianMatrix) -> Result<f64>;
}

/// `F(rho) = 1 - Tr((Tr_2 rho)^2)`, the linear entropy of the reduced state.
/// For `y` with coefficient matrix `M` and `S = M M^dagger`:
/// `c(y) = ||y||^2 - Tr(S^2) / ||y||^2`.
#[derive(Debug, Clone, Copy, Default)]
pub struct LinearEntropy;

impl LinearEntropy {
    fn reduced(ps: &ProductSpace, y: &[Complex64], s: &mut [Complex64]) -> (f64, f64) {
        let (n1, n2) = (ps.n1, ps.n2);
        let mut norm2 = 0.0;
        for z in y {
            norm2 += z.norm_sqr();
        }
        let mut purity = 0.0;
        for a in 0..n1 {
            for b in 0..n1 {
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..n2 {
                    acc += y[a * n2 + j] * y[b * n2 + j].conj();
                }
                s[a * n1 + b] = acc;
                purity += acc.norm_sqr();
            }
        }
        (norm2, purity)
    }
}

impl SeedFunction for LinearEntropy {
    fn name(&self) -> &'static str {
        "linear-entropy"
    }

    fn weighted_cost(&self, ps: &ProductSpace, y: &[Complex64]) -> f64 {
        let mut s = vec![Complex64::new(0.0, 0.0); ps.n1 * ps.n1];
        let (norm2, purity) = Self::reduced(ps, y, &mut s);
        if norm2 == 0.0 {
            return 0.0;
        }
        norm2 - purity / norm2
    }

    fn weighted_cost_and_gradient(&self, ps: &ProductSpace, y: &[Complex64], grad: &mut [Complex64]) -> f64 {
        let (n1, n2) = (ps.n1, ps.n2);
        let mut s = vec![Complex64::new(0.0, 0.0); n1 * n1];
        let (norm2, purity) = Self::reduced(ps, y, &mut s);
        if norm2 == 0.0 {
            grad.iter_mut().for_each(|g| *g = Complex64::new(0.0, 0.0));
            return 0.0;
        }
        let scale = 1.0 + purity / (norm2 * norm2);
        for a in 0..n1 {
            for j in 0..n2 {
                let mut sm = Complex64::new(0.0, 0.0);
                for b in 0..n1 {
                    sm += s[a * n1 + b] * y[b * n2 + j];
                }
                grad[a * n2 + j] = y[a * n2 + j] * scale - sm * (2.0 / norm2);
            }
        }
        norm2 - purity / norm2
    }

    fn pure_value(&self, ps: &ProductSpace, rho: &HermitianMatrix) -> Result<f64> {
        let red = partial_trace(ps, rho, Factor::First)?;
        let purity = red.matrix().iter().map(|z| z.norm_sqr()).sum::<f64>();
        Ok(1.0 - purity)
    }
}

/// Linear entropy of a pure state; errors unless `rho` is a rank-one
/// density matrix within `tol`.
pub fn seed_function(ps: &ProductSpace, rho_pure: &HermitianMatrix, tol: f64) -> Result<f64> {
    ps.check(rho_pure)?;
    check_density(rho_pure, tol)?;
    let spec = spectral(rho_pure)?;
    if spec.eigenvalues.len() > 1 && spec.eigenvalues[1] > tol {
        return Err(Error::NotPure(format!(
            "second eigenvalue {:e} exceeds {tol:e}",
            spec.eigenvalues[1]
        )));
    }
    LinearEntropy.pure_value(ps, rho_pure)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::composite::product_vector;
    use crate::hermitian::{c, CVector, ComplexVector};
    use crate::random::{random_unit_vector, random_unitary, rng_from_seed};
    use crate::tensors::momentum_map;

    fn maximally_entangled(d: usize) -> ComplexVector {
        let mut v = CVector::zeros(d * d);
        for i in 0..d {
            v[i * d + i] = c(1.0 / (d as f64).sqrt(), 0.0);
        }
        ComplexVector(v)
    }

    #[test]
    fn product_states_vanish() {
        let ps = ProductSpace::new(3, 2).unwrap();
        let mut rng = rng_from_seed(90);
        let x = product_vector(&ps, &random_unit_vector(3, &mut rng), &random_unit_vector(2, &mut rng)).unwrap();
        let f = seed_function(&ps, &momentum_map(&x), 1e-10).unwrap();
        assert!(f.abs() < 1e-14);
    }

    #[test]
    fn maximally_entangled_values() {
        for d in 2..5 {
            let ps = ProductSpace::new(d, d).unwrap();
            let f = seed_function(&ps, &momentum_map(&maximally_entangled(d)), 1e-10).unwrap();
            assert!((f - (1.0 - 1.0 / d as f64)).abs() < 1e-14);
        }
    }

    #[test]
    fn mixed_input_rejected() {
        let ps = ProductSpace::new(2, 2).unwrap();
        let mixed = HermitianMatrix::identity(4).scale(0.25);
        assert!(matches!(seed_function(&ps, &mixed, 1e-10), Err(Error::NotPure(_))));
        assert!(matches!(
            seed_function(&ps, &HermitianMatrix::identity(4), 1e-10),
            Err(Error::NotDensity(_))
        ));
    }

    #[test]
    fn local_unitary_invariance() {
        let ps = ProductSpace::new(2, 3).unwrap();
        let mut rng = rng_from_seed(91);
        let x = random_unit_vector(6, &mut rng);
        let u = random_unitary(2, &mut rng).kronecker(&random_unitary(3, &mut rng));
        let f0 = seed_function(&ps, &momentum_map(&x), 1e-10).unwrap();
        let f1 = seed_function(&ps, &momentum_map(&ComplexVector(&u * x.as_vector())), 1e-10).unwrap();
        assert!((f0 - f1).abs() < 1e-13);
        assert!((0.0..=0.5).contains(&f0));
    }

    #[test]
    fn weighted_cost_matches_pure_value() {
        let ps = ProductSpace::new(2, 3).unwrap();
        let mut rng = rng_from_seed(92);
        let x = random_unit_vector(6, &mut rng);
        let y: Vec<Complex64> = x.0.iter().map(|z| z * 1.7).collect();
        let f = LinearEntropy.pure_value(&ps, &momentum_map(&x)).unwrap();
        assert!((LinearEntropy.weighted_cost(&ps, &y) - 1.7 * 1.7 * f).abs() < 1e-13);
        assert_eq!(LinearEntropy.weighted_cost(&ps, &[Complex64::new(0.0, 0.0); 6]), 0.0);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let ps = ProductSpace::new(2, 2).unwrap();
        let mut rng = rng_from_seed(93);
        let y: Vec<Complex64> = random_unit_vector(4, &mut rng).0.iter().map(|z| z * 0.8).collect();
        let mut g = vec![Complex64::new(0.0, 0.0); 4];
        LinearEntropy.weighted_cost_and_gradient(&ps, &y, &mut g);
        let h = 1e-6;
        for k in 0..4 {
            let shift = |dz: Complex64| {
                let mut z = y.clone();
                z[k] += dz;
                LinearEntropy.weighted_cost(&ps, &z)
            };
            let d_re = (shift(c(h, 0.0)) - shift(c(-h, 0.0))) / (2.0 * h);
            let d_im = (shift(c(0.0, h)) - shift(c(0.0, -h))) / (2.0 * h);
            // dc/d conj(z) = (d/dRe + i d/dIm) / 2
            let wirtinger = c(d_re, d_im) * 0.5;
            assert!((wirtinger - g[k]).norm() < 1e-8, "entry {k}");
        }
    }
}
