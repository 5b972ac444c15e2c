use num_complex::Complex64;

use qsg_core::hermitian::{rank_signature, CMatrix, HermitianMatrix};
use qsg_core::random::{ginibre, random_density_of_rank, random_hermitian, rng_from_seed};
use qsg_core::strata::{
    curve_tangency_report, face_at, gl_action, gl_orbit_factor, jacobian_spectrum, stratum_dim, tangent_test,
    ChartPhi, IndexSet, Stratum,
};
use qsg_core::Execution;

/// Samples `T(t)^dagger T(t)` for `T(t) = T0 + t T1 + t^2 T2`, `k x n`.
fn polynomial_curve(n: usize, k: usize, seed: u64, density: bool) -> Vec<(f64, HermitianMatrix)> {
    let mut rng = rng_from_seed(seed);
    let t0 = ginibre(k, n, &mut rng);
    let t1 = ginibre(k, n, &mut rng);
    let t2 = ginibre(k, n, &mut rng);
    (0..11)
        .map(|i| {
            let t = -0.05 + 0.01 * i as f64;
            let tt = &t0 + &t1 * Complex64::new(t, 0.0) + &t2 * Complex64::new(t * t, 0.0);
            let m = HermitianMatrix::hermitian_part(&(tt.adjoint() * &tt));
            let m = if density { m.scale(1.0 / m.trace()) } else { m };
            (t, m)
        })
        .collect()
}

#[test]
fn polynomial_curves_are_tangent() {
    for n in 2..=5 {
        for k in 1..=n {
            for (stratum, density) in [(Stratum::Cone, false), (Stratum::Density, true)] {
                let curve = polynomial_curve(n, k, (n * 31 + k) as u64, density);
                let report = curve_tangency_report(&curve, stratum, 1e-6, Execution::Sequential).unwrap();
                assert!(report.pass, "n={n} k={k} {stratum:?}: max residual {}", report.max_residual);
                assert!(report.entries.iter().all(|e| e.rank == k));
            }
        }
    }
}

#[test]
fn transversal_direction_is_not_tangent() {
    let rho = HermitianMatrix::diagonal(&[1.0, 0.0, 0.0]);
    let v = HermitianMatrix::diagonal(&[0.0, 1.0, 0.0]);
    let t = tangent_test(&rho, &v, Stratum::Cone, 1e-9).unwrap();
    assert!(!t.tangent);
    assert_eq!(t.kernel_dim, 2);
    assert!((t.residual - 1.0).abs() < 1e-12);
    // trace-changing directions leave the density slice
    let w = HermitianMatrix::diagonal(&[1.0, 0.0, 0.0]);
    assert!(tangent_test(&rho, &w, Stratum::Cone, 1e-9).unwrap().tangent);
    assert!(!tangent_test(&rho, &w, Stratum::Density, 1e-9).unwrap().tangent);
}

#[test]
fn parallel_and_sequential_reports_agree() {
    let curve = polynomial_curve(4, 2, 7, false);
    let a = curve_tangency_report(&curve, Stratum::Cone, 1e-6, Execution::Parallel).unwrap();
    let b = curve_tangency_report(&curve, Stratum::Cone, 1e-6, Execution::Sequential).unwrap();
    assert_eq!(a, b);
}

#[test]
fn jacobian_rank_matches_stratum_dimension() {
    for n in 2..=5 {
        for k in 1..=n {
            let mut rng = rng_from_seed((100 + n * 10 + k) as u64);
            let base = random_density_of_rank(n, k, &mut rng);
            let chart = ChartPhi::new(base, IndexSet::leading(k, n).unwrap()).unwrap();
            for stratum in [Stratum::Cone, Stratum::Density] {
                let s = jacobian_spectrum(&chart, stratum, 1e-4).unwrap();
                assert_eq!(s.expected_rank, stratum_dim(n, k, stratum).unwrap());
                assert_eq!(s.numerical_rank, s.expected_rank, "n={n} k={k} {stratum:?}");
                assert!(s.gap >= 1e3, "n={n} k={k} gap {}", s.gap);
            }
        }
    }
}

#[test]
fn pure_state_manifold_is_projective_space() {
    for n in 2..=6 {
        assert_eq!(stratum_dim(n, 1, Stratum::Density).unwrap(), 2 * (n - 1));
        assert_eq!(stratum_dim(n, n, Stratum::Density).unwrap(), n * n - 1);
    }
}

#[test]
fn gl_factor_is_invariant_along_the_orbit() {
    let mut rng = rng_from_seed(77);
    for n in 1..=6 {
        let xi = random_hermitian(n, &mut rng);
        let f = gl_orbit_factor(&xi, None).unwrap();
        assert!((&f.reconstruct() - &xi).max_abs_entry() < 1e-9);
        for _ in 0..5 {
            let t: CMatrix = ginibre(n, n, &mut rng);
            let moved = gl_action(&t, &xi).unwrap();
            assert_eq!(gl_orbit_factor(&moved, None).unwrap().signature, f.signature);
        }
    }
}

#[test]
fn faces_contain_their_sub_densities() {
    let mut rng = rng_from_seed(5);
    let rho = random_density_of_rank(4, 2, &mut rng);
    let face = face_at(&rho, 1e-9).unwrap();
    assert_eq!(face.k, 2);
    assert_eq!(face.dim(), 3);
    // rho lies in its own face; a full-rank state does not
    assert!(face.contains(&rho).unwrap());
    let full = random_density_of_rank(4, 4, &mut rng);
    assert!(!face.contains(&full).unwrap());
    assert_eq!(rank_signature(&full, None).unwrap().rank(), 4);
}
