//! Tangency to rank strata.
//!
//! `V` is tangent to the stratum of `rho` iff `<V x, y> = 0` for all `x, y`
//! in `Ker(rho)`; on the density stratum additionally `Tr V = 0`.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_same_dim, Error, Result};
use crate::hermitian::{spectral, HermitianMatrix};
use crate::par::{map_indexed, Execution};
use crate::strata::Stratum;

/// Relative tolerance on sample spacing.
const SPACING_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TangentTest {
    pub tangent: bool,
    pub residual: f64,
    pub kernel_dim: usize,
}

/// `max |<V k_i, k_j>|` over a kernel basis of `rho` (plus `|Tr V|` on the
/// density stratum). The kernel holds eigenvalues at or below the
/// scale-aware rank tolerance `n ||rho|| 1e-12`.
pub fn tangent_test(
    rho: &HermitianMatrix,
    v: &HermitianMatrix,
    stratum: Stratum,
    tol: f64,
) -> Result<TangentTest> {
    ensure_same_dim(rho.dim(), v.dim())?;
    let spec = spectral(rho)?;
    let kernel = spec.kernel_basis(spec.default_rank_tolerance());
    let restricted = kernel.adjoint() * v.matrix() * &kernel;
    let mut residual = restricted.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if stratum == Stratum::Density {
        residual += v.trace().abs();
    }
    Ok(TangentTest {
        tangent: residual <= tol,
        residual,
        kernel_dim: kernel.ncols(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TangencyEntry {
    pub t: f64,
    pub rank: usize,
    pub residual: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TangencyReport {
    pub entries: Vec<TangencyEntry>,
    pub max_residual: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Finite-difference derivative at sample `i`, fourth order where the
/// neighbourhood allows it.
fn derivative(samples: &[(f64, HermitianMatrix)], i: usize, h: f64) -> HermitianMatrix {
    let len = samples.len();
    let f = |k: usize| &samples[k].1;
    if len >= 5 && i >= 2 && i + 2 < len {
        // (8 (f1 - f-1) - (f2 - f-2)) / 12h
        let d1 = f(i + 1) - f(i - 1);
        let d2 = f(i + 2) - f(i - 2);
        (&d1.scale(8.0) - &d2).scale(1.0 / (12.0 * h))
    } else if len >= 5 && i == 1 {
        // (-3 f-1 - 10 f0 + 18 f1 - 6 f2 + f3) / 12h
        let s = &(&f(0).scale(-3.0) + &f(1).scale(-10.0)) + &(&f(2).scale(18.0) + &f(3).scale(-6.0));
        (&s + f(4)).scale(1.0 / (12.0 * h))
    } else if len >= 5 && i + 2 == len {
        let s = &(&f(i + 1).scale(3.0) + &f(i).scale(10.0))
            + &(&f(i - 1).scale(-18.0) + &f(i - 2).scale(6.0));
        (&s - f(i - 3)).scale(1.0 / (12.0 * h))
    } else {
        (f(i + 1) - f(i - 1)).scale(1.0 / (2.0 * h))
    }
}

/// Tangent test of the finite-difference derivative at every interior
/// sample of a uniformly spaced curve. Samples are evaluated independently
/// and merged in order.
pub fn curve_tangency_report(
    samples: &[(f64, HermitianMatrix)],
    stratum: Stratum,
    tol: f64,
    exec: Execution,
) -> Result<TangencyReport> {
    if samples.len() < 3 {
        return Err(Error::TooFewSamples(samples.len()));
    }
    let n = samples[0].1.dim();
    for (_, m) in samples {
        ensure_same_dim(n, m.dim())?;
    }
    let h = samples[1].0 - samples[0].0;
    if !(h > 0.0) {
        return Err(Error::NonUniformSamples);
    }
    for w in samples.windows(2) {
        if ((w[1].0 - w[0].0) - h).abs() > SPACING_TOLERANCE * h.abs().max(1.0) {
            return Err(Error::NonUniformSamples);
        }
    }
    let results = map_indexed(samples.len() - 2, exec, |j| -> Result<TangencyEntry> {
        let i = j + 1;
        let rho = &samples[i].1;
        let v = derivative(samples, i, h);
        let spec = spectral(rho)?;
        let rank = spec.signature(spec.default_rank_tolerance()).rank();
        let test = tangent_test(rho, &v, stratum, tol)?;
        Ok(TangencyEntry {
            t: samples[i].0,
            rank,
            residual: test.residual,
            pass: test.tangent,
        })
    });
    let entries = results.into_iter().collect::<Result<Vec<_>>>()?;
    let max_residual = entries
        .iter()
        .map(|e| e.residual)
        .fold(0.0, |m: f64, r| if r.is_nan() || m.is_nan() { f64::NAN } else { m.max(r) });
    Ok(TangencyReport {
        pass: entries.iter().all(|e| e.pass),
        entries,
        max_residual,
        tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian::{lie_bracket, CMatrix};
    use crate::random::{ginibre, random_hermitian, random_psd_of_rank, rng_from_seed};

    #[test]
    fn commutator_directions_are_tangent() {
        let mut rng = rng_from_seed(20);
        let rho = random_psd_of_rank(5, 2, &mut rng);
        let a = random_hermitian(5, &mut rng);
        let v = lie_bracket(&a, &rho).unwrap();
        let t = tangent_test(&rho, &v, Stratum::Cone, 1e-10).unwrap();
        assert!(t.tangent, "residual {}", t.residual);
        assert_eq!(t.kernel_dim, 3);
        let t = tangent_test(&rho, &v, Stratum::Density, 1e-10).unwrap();
        assert!(t.tangent);
    }

    #[test]
    fn kernel_direction_is_not_tangent() {
        let rho = HermitianMatrix::diagonal(&[1.0, 0.0]);
        let v = HermitianMatrix::diagonal(&[0.0, 1.0]);
        let t = tangent_test(&rho, &v, Stratum::Cone, 1e-9).unwrap();
        assert!(!t.tangent);
        assert!((t.residual - 1.0).abs() < 1e-15);
    }

    #[test]
    fn density_mode_needs_trace_zero() {
        let rho = HermitianMatrix::diagonal(&[0.5, 0.5, 0.0]);
        let v = HermitianMatrix::diagonal(&[1.0, 0.0, 0.0]);
        assert!(tangent_test(&rho, &v, Stratum::Cone, 1e-9).unwrap().tangent);
        assert!(!tangent_test(&rho, &v, Stratum::Density, 1e-9).unwrap().tangent);
    }

    fn polynomial_curve(n: usize, k: usize, len: usize, seed: u64) -> Vec<(f64, HermitianMatrix)> {
        let mut rng = rng_from_seed(seed);
        let t0 = ginibre(k, n, &mut rng);
        let t1 = ginibre(k, n, &mut rng);
        let t2 = ginibre(k, n, &mut rng);
        (0..len)
            .map(|i| {
                let t = -0.2 + 0.05 * i as f64;
                let tt: CMatrix = &t0 + &t1 * crate::hermitian::c(t, 0.0) + &t2 * crate::hermitian::c(t * t, 0.0);
                (t, HermitianMatrix::hermitian_part(&(tt.adjoint() * tt)))
            })
            .collect()
    }

    #[test]
    fn polynomial_curve_is_tangent() {
        let samples = polynomial_curve(5, 2, 9, 21);
        let r = curve_tangency_report(&samples, Stratum::Cone, 1e-6, Execution::Sequential).unwrap();
        assert_eq!(r.entries.len(), 7);
        assert!(r.pass, "max residual {}", r.max_residual);
        assert!(r.entries.iter().all(|e| e.rank == 2));
    }

    #[test]
    fn constant_curve_has_zero_residual() {
        let mut rng = rng_from_seed(22);
        let rho = random_psd_of_rank(4, 2, &mut rng);
        let samples: Vec<_> = (0..4).map(|i| (i as f64 * 0.1, rho.clone())).collect();
        let r = curve_tangency_report(&samples, Stratum::Density, 1e-12, Execution::Parallel).unwrap();
        assert_eq!(r.max_residual, 0.0);
    }

    #[test]
    fn report_errors() {
        let rho = HermitianMatrix::identity(2);
        let two = vec![(0.0, rho.clone()), (1.0, rho.clone())];
        assert!(matches!(
            curve_tangency_report(&two, Stratum::Cone, 1e-6, Execution::Sequential),
            Err(Error::TooFewSamples(2))
        ));
        let uneven = vec![(0.0, rho.clone()), (1.0, rho.clone()), (3.0, rho)];
        assert!(matches!(
            curve_tangency_report(&uneven, Stratum::Cone, 1e-6, Execution::Sequential),
            Err(Error::NonUniformSamples)
        ));
    }

    #[test]
    fn parallel_and_sequential_reports_agree() {
        let samples = polynomial_curve(4, 1, 12, 23);
        let a = curve_tangency_report(&samples, Stratum::Cone, 1e-6, Execution::Sequential).unwrap();
        let b = curve_tangency_report(&samples, Stratum::Cone, 1e-6, Execution::Parallel).unwrap();
        let ra: Vec<f64> = a.entries.iter().map(|e| e.residual).collect();
        let rb: Vec<f64> = b.entries.iter().map(|e| e.residual).collect();
        assert_eq!(ra, rb);
    }
}
