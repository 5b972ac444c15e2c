//! Invariant batteries shared by `verify all`, `kahler verify` and the
//! acceptance suite. Each trial draws from its own RNG stream, so the checks
//! do not depend on execution order.

use qsg_core::composite::{
    caratheodory_reduce, convex_roof, local_operator, ppt_test, product_vector, sample_separable,
    schmidt_coefficients, seed_function, segre, splice, ProductSpace, PureDecomposition, RoofConfig,
};
use qsg_core::hermitian::{hs_inner, jordan_bracket, lie_bracket, ComplexVector, HermitianMatrix};
use qsg_core::kahler::{
    complex_structure, distribution_basis, field_commutator, generator_for, jtilde, orbit_metric, orbit_symplectic,
    partial_sigma, product_structure, r_generator_for, rank_one_j, rtilde, Distribution, FundamentalField,
    OrbitPoint,
};
use qsg_core::linalg::numerical_rank;
use qsg_core::random::{
    dirichlet_uniform, ginibre, random_density_of_rank, random_hermitian, random_hermitian_with_spectrum,
    random_real_vector, random_unit_vector, random_unitary, rng_for_stream, QsgRng,
};
use qsg_core::strata::{
    chart_forward, chart_inverse, curve_tangency_report, face_at, gl_action, gl_orbit_factor, jacobian_spectrum,
    reconstruct_from_rows, ChartPhi, IndexSet, Stratum,
};
use qsg_core::tensors::{
    bracket_of_quadratics, complex_tensor_eval, gram_matrix, hilbert_bracket, lambda_eval, momentum_map,
    quadratic_eval, u2, QuadraticFunction, TensorKind,
};
use qsg_core::{par, CMatrix, Execution, Result};

use crate::report::Check;

pub const BRACKET_TOL: f64 = 1e-10;
pub const U2_RANK_THRESHOLD: f64 = 1e-9;
pub const CHART_TOL: f64 = 1e-8;
pub const JACOBIAN_STEP: f64 = 1e-4;
pub const MIN_JACOBIAN_GAP: f64 = 1e3;
pub const TANGENCY_TOL: f64 = 1e-6;
pub const KAHLER_TOL: f64 = 1e-9;
pub const PROJECTOR_TOL: f64 = 1e-10;
pub const GL_TOL: f64 = 1e-9;
pub const CARATHEODORY_TOL: f64 = 1e-10;
pub const SEPARABLE_ROOF_TOL: f64 = 1e-3;
pub const PURE_ROOF_TOL: f64 = 1e-12;
pub const ROOF_AGREEMENT_TOL: f64 = 2e-3;
pub const ENTANGLED_VALUE: f64 = 0.05;
pub const PPT_TOL: f64 = 1e-9;
pub const ROWS_TOL: f64 = 1e-8;
pub const FACE_TOL: f64 = 1e-9;

// Stream namespaces, one per battery.
const HERMITIAN: u64 = 1;
const TENSORS: u64 = 2;
const CHART: u64 = 3;
const JACOBIAN: u64 = 4;
const CURVES: u64 = 5;
const GL: u64 = 6;
const KAHLER: u64 = 7;
const CARATHEODORY: u64 = 8;
const PURE: u64 = 9;
const MIXED: u64 = 10;
const SUPPORT: u64 = 11;

/// Domain redraws before a chart sample counts as a failure.
const CHART_ATTEMPTS: usize = 20;

fn stream(seed: u64, battery: u64, trial: usize) -> QsgRng {
    rng_for_stream(seed, (battery << 40) | trial as u64)
}

/// Largest value; NaN wins so that it surfaces as a failure.
fn worst(values: impl IntoIterator<Item = f64>) -> f64 {
    values
        .into_iter()
        .fold(0.0, |acc, v| if v.is_nan() || v > acc { v } else { acc })
}

fn collect<T>(rows: Vec<Result<T>>) -> Result<Vec<T>> {
    rows.into_iter().collect()
}

fn dist(a: &HermitianMatrix, b: &HermitianMatrix) -> f64 {
    (a - b).max_abs_entry()
}

fn pick(dims: &[usize], t: usize) -> usize {
    dims[t % dims.len()]
}

/// `k` consecutive indices starting at `shift`, wrapped mod `n`.
fn rotated_index_set(k: usize, n: usize, shift: usize) -> Result<IndexSet> {
    let mut idx: Vec<usize> = (0..k).map(|i| (shift + i) % n).collect();
    idx.sort_unstable();
    IndexSet::new(idx, n)
}

pub fn hermitian_battery(dims: &[usize], trials: usize, seed: u64, exec: Execution) -> Result<Vec<Check>> {
    let rows = collect(par::map_indexed(trials, exec, |t| -> Result<[f64; 5]> {
        let n = pick(dims, t);
        let mut rng = stream(seed, HERMITIAN, t);
        let a = random_hermitian(n, &mut rng);
        let b = random_hermitian(n, &mut rng);
        let c = random_hermitian(n, &mut rng);
        let scale = (a.frobenius_norm() * b.frobenius_norm() * c.frobenius_norm()).max(1.0);
        let anti = dist(&lie_bracket(&a, &b)?, &(-&lie_bracket(&b, &a)?));
        let cyclic = &(&lie_bracket(&a, &lie_bracket(&b, &c)?)? + &lie_bracket(&b, &lie_bracket(&c, &a)?)?)
            + &lie_bracket(&c, &lie_bracket(&a, &b)?)?;
        let lie_inv = hs_inner(&lie_bracket(&a, &b)?, &c)? - hs_inner(&a, &lie_bracket(&b, &c)?)?;
        let jor_inv = hs_inner(&jordan_bracket(&a, &b)?, &c)? - hs_inner(&a, &jordan_bracket(&b, &c)?)?;
        let coords = dist(&HermitianMatrix::from_coordinates(n, &a.to_coordinates())?, &a);
        let spectral = dist(&a.spectral()?.reconstruct(), &a) / a.frobenius_norm().max(1.0);
        Ok([
            anti,
            cyclic.max_abs_entry() / scale,
            lie_inv.abs().max(jor_inv.abs()) / scale,
            coords,
            spectral,
        ])
    }))?;
    let col = |i: usize| worst(rows.iter().map(|r| r[i]));
    Ok(vec![
        Check::at_most("hermitian.lie_antisymmetry", col(0), BRACKET_TOL),
        Check::at_most("hermitian.jacobi_identity", col(1), BRACKET_TOL),
        Check::at_most("hermitian.scalar_product_invariance", col(2), BRACKET_TOL),
        Check::at_most("hermitian.coordinates_round_trip", col(3), BRACKET_TOL),
        Check::at_most("hermitian.spectral_reconstruction", col(4), BRACKET_TOL),
    ])
}

/// `<Ax, Bx> = Tr(mu(x) A B)`, its split into the quadratic functions of the
/// Jordan and Lie products, and the pushforward `R + i Lambda` at `mu(x)`.
pub fn tensors_battery(dims: &[usize], trials: usize, seed: u64, exec: Execution) -> Result<Vec<Check>> {
    let rows = collect(par::map_indexed(trials, exec, |t| -> Result<[f64; 4]> {
        let n = pick(dims, t);
        let mut rng = stream(seed, TENSORS, t);
        let x = random_unit_vector(n, &mut rng);
        let a = random_hermitian(n, &mut rng);
        let b = random_hermitian(n, &mut rng);
        let xi = random_hermitian(n, &mut rng);
        let scale = a.frobenius_norm() * b.frobenius_norm();
        let mu = momentum_map(&x);
        let h = hilbert_bracket(&a, &b, &x)?;
        let direct = (mu.matrix() * a.matrix() * b.matrix()).trace();
        let br = bracket_of_quadratics(&a, &b)?;
        let g_part = quadratic_eval(&QuadraticFunction::new(br.g_part), &x)?;
        let omega_part = quadratic_eval(&QuadraticFunction::new(br.omega_part), &x)?;
        let split = (h.re - g_part).abs().max((h.im - omega_part).abs());
        let push = (complex_tensor_eval(&mu, &a, &b)? - h).norm();
        let casimir = lambda_eval(&xi, &xi.pow(2), &b)?.abs()
            / (xi.frobenius_norm().powi(3) * b.frobenius_norm()).max(f64::MIN_POSITIVE);
        Ok([(h - direct).norm() / scale, split / scale, push / scale, casimir])
    }))?;
    let col = |i: usize| worst(rows.iter().map(|r| r[i]));
    Ok(vec![
        Check::at_most("tensors.bracket_identity", col(0), BRACKET_TOL),
        Check::at_most("tensors.bracket_split", col(1), BRACKET_TOL),
        Check::at_most("tensors.pushforward", col(2), BRACKET_TOL),
        Check::at_most("tensors.casimir_kernel", col(3), BRACKET_TOL),
    ])
}

/// Ranks of the `Lambda` and `R` Gram matrices on the `{-1, -1/2, 0, 1/2, 1}^4`
/// grid of the two-level example against the case table.
pub fn u2_rank_table() -> Result<Check> {
    const GRID: [f64; 5] = [-1.0, -0.5, 0.0, 0.5, 1.0];
    let basis = u2::basis();
    let mut mismatches = 0;
    for u in GRID {
        for x in GRID {
            for y in GRID {
                for z in GRID {
                    let xi = u2::point(u, x, y, z);
                    let (rl, rr) = u2::predicted_ranks(u, x, y, z, 1e-12);
                    let gl = gram_matrix(TensorKind::Lambda, &xi, &basis)?;
                    let gr = gram_matrix(TensorKind::R, &xi, &basis)?;
                    mismatches += usize::from(numerical_rank(&gl, U2_RANK_THRESHOLD) != rl);
                    mismatches += usize::from(numerical_rank(&gr, U2_RANK_THRESHOLD) != rr);
                }
            }
        }
    }
    Ok(Check::mismatches("tensors.u2_rank_table", mismatches))
}

fn rank_pairs(dims: &[usize]) -> Vec<(usize, usize)> {
    dims.iter().flat_map(|&n| (1..=n).map(move |k| (n, k))).collect()
}

/// Round trips `Phi^{-1}(Phi(X))` for `X` near the chart base, every rank
/// `k <= n`; the residual is relative to the largest entry of `X`.
pub fn chart_round_trips(dims: &[usize], per_rank: usize, seed: u64, exec: Execution) -> Result<Check> {
    let pairs = rank_pairs(dims);
    let residuals = collect(par::map_indexed(pairs.len() * per_rank, exec, |t| -> Result<f64> {
        let (n, k) = pairs[t / per_rank];
        let mut rng = stream(seed, CHART, t);
        let j = rotated_index_set(k, n, t)?;
        for _ in 0..CHART_ATTEMPTS {
            let b = ginibre(k, n, &mut rng);
            let db = ginibre(k, n, &mut rng).map(|z| z * 0.1);
            let b2 = &b + &db;
            let base = HermitianMatrix::hermitian_part(&(b.adjoint() * &b));
            let x = HermitianMatrix::hermitian_part(&(b2.adjoint() * &b2));
            let Ok(chart) = ChartPhi::new(base, j.clone()) else {
                continue;
            };
            let Ok(y) = chart_forward(&chart, &x) else {
                continue;
            };
            let back = chart_inverse(&chart, &y)?;
            return Ok(dist(&back, &x) / x.max_abs_entry().max(1.0));
        }
        Ok(f64::INFINITY)
    }))?;
    Ok(Check::at_most("strata.chart_round_trip", worst(residuals), CHART_TOL))
}

/// Numerical rank of the chart Jacobian on both strata against
/// `2nk - k^2` (cone) and `2nk - k^2 - 1` (density), with the singular gap.
pub fn jacobian_ranks(dims: &[usize], seed: u64, exec: Execution) -> Result<Vec<Check>> {
    let pairs = rank_pairs(dims);
    let rows = collect(par::map_indexed(pairs.len(), exec, |t| -> Result<(usize, f64)> {
        let (n, k) = pairs[t];
        let mut rng = stream(seed, JACOBIAN, t);
        let j = rotated_index_set(k, n, t)?;
        for _ in 0..CHART_ATTEMPTS {
            let Ok(chart) = ChartPhi::new(random_density_of_rank(n, k, &mut rng), j.clone()) else {
                continue;
            };
            let mut mismatches = 0;
            let mut inverse_gap: f64 = 0.0;
            for stratum in [Stratum::Cone, Stratum::Density] {
                let s = jacobian_spectrum(&chart, stratum, JACOBIAN_STEP)?;
                mismatches += usize::from(s.numerical_rank != s.expected_rank);
                inverse_gap = worst([inverse_gap, 1.0 / s.gap]);
            }
            return Ok((mismatches, inverse_gap));
        }
        Ok((2, f64::INFINITY))
    }))?;
    Ok(vec![
        Check::mismatches("strata.jacobian_rank", rows.iter().map(|r| r.0).sum()),
        Check::at_most(
            "strata.jacobian_inverse_gap",
            worst(rows.iter().map(|r| r.1)),
            1.0 / MIN_JACOBIAN_GAP,
        ),
    ])
}

/// A rank-`k` density is rebuilt from its `J` rows; its face contains every
/// density supported on its range and no pure state from its kernel.
pub fn support_battery(dims: &[usize], trials: usize, seed: u64, exec: Execution) -> Result<Vec<Check>> {
    let rows = collect(par::map_indexed(trials, exec, |t| -> Result<(f64, usize)> {
        let n = pick(dims, t);
        let k = 1 + t % n;
        let mut rng = stream(seed, SUPPORT, t);
        let rho = random_density_of_rank(n, k, &mut rng);
        let j = rotated_index_set(k, n, t)?;
        let top = CMatrix::from_fn(k, n, |r, c| rho.get(j.indices()[r], c));
        let rebuilt = reconstruct_from_rows(&top, &j)?;
        let face = face_at(&rho, FACE_TOL)?;
        let inner = random_density_of_rank(k, 1 + t % k, &mut rng);
        let sub = HermitianMatrix::hermitian_part(&(&face.support * inner.matrix() * face.support.adjoint()));
        let mut mismatches = usize::from(!face.contains(&sub)?);
        if k < n {
            let v = face.kernel.columns(0, 1);
            let outside = HermitianMatrix::hermitian_part(&(v * v.adjoint()));
            mismatches += usize::from(face.contains(&outside)?);
        }
        Ok((dist(&rebuilt, &rho), mismatches))
    }))?;
    Ok(vec![
        Check::at_most("strata.rows_reconstruction", worst(rows.iter().map(|r| r.0)), ROWS_TOL),
        Check::mismatches("strata.face_containment", rows.iter().map(|r| r.1).sum()),
    ])
}

/// Samples of `T(t)^dagger T(t)` with `T(t) = T0 + t T1 + t^2 T2` of size
/// `k x n` on `t in [-0.05, 0.05]`; trace-normalized for the density stratum.
pub fn polynomial_curve(n: usize, k: usize, density: bool, rng: &mut QsgRng) -> Vec<(f64, HermitianMatrix)> {
    let t0 = ginibre(k, n, rng);
    let t1 = ginibre(k, n, rng);
    let t2 = ginibre(k, n, rng);
    (0..11)
        .map(|i| {
            let t = -0.05 + 0.01 * i as f64;
            let tt: CMatrix = &t0 + t1.map(|z| z * t) + t2.map(|z| z * (t * t));
            let m = HermitianMatrix::hermitian_part(&(tt.adjoint() * &tt));
            let m = if density { m.scale(1.0 / m.trace()) } else { m };
            (t, m)
        })
        .collect()
}

/// Finite-difference derivatives of random rank-`k` curves are tangent to
/// their stratum; ranks cycle through `1..=n`, strata alternate.
pub fn curve_tangency(dims: &[usize], curves: usize, seed: u64, exec: Execution) -> Result<Vec<Check>> {
    let rows = collect(par::map_indexed(curves, exec, |c| -> Result<(f64, usize)> {
        let n = pick(dims, c);
        let k = 1 + (c / dims.len()) % n;
        let density = c % 2 == 1;
        let stratum = if density { Stratum::Density } else { Stratum::Cone };
        let mut rng = stream(seed, CURVES, c);
        let samples = polynomial_curve(n, k, density, &mut rng);
        let report = curve_tangency_report(&samples, stratum, TANGENCY_TOL, Execution::Sequential)?;
        let rank_errors = report.entries.iter().filter(|e| e.rank != k).count();
        Ok((report.max_residual, rank_errors))
    }))?;
    Ok(vec![
        Check::at_most("strata.curve_tangency", worst(rows.iter().map(|r| r.0)), TANGENCY_TOL),
        Check::mismatches("strata.curve_rank", rows.iter().map(|r| r.1).sum()),
    ])
}

/// `T^dagger D T` reconstructs `xi`, and the signature survives random
/// congruences `xi -> T xi T^dagger`. Some points carry exact zero eigenvalues.
pub fn gl_factorization(
    dims: &[usize],
    points: usize,
    conjugations: usize,
    seed: u64,
    exec: Execution,
) -> Result<Vec<Check>> {
    let rows = collect(par::map_indexed(points, exec, |t| -> Result<(f64, usize)> {
        let n = pick(dims, t);
        let mut rng = stream(seed, GL, t);
        let mut values: Vec<f64> = random_real_vector(n, &mut rng).iter().copied().collect();
        for v in values.iter_mut().take((t % 3).min(n)) {
            *v = 0.0;
        }
        let xi = random_hermitian_with_spectrum(&values, &mut rng);
        let f = gl_orbit_factor(&xi, None)?;
        let residual = dist(&f.reconstruct(), &xi) / xi.max_abs_entry().max(1.0);
        let mut mismatches = 0;
        for _ in 0..conjugations {
            let moved = gl_action(&ginibre(n, n, &mut rng), &xi)?;
            mismatches += usize::from(gl_orbit_factor(&moved, None)?.signature != f.signature);
        }
        Ok((residual, mismatches))
    }))?;
    Ok(vec![
        Check::at_most("strata.gl_reconstruct", worst(rows.iter().map(|r| r.0)), GL_TOL),
        Check::mismatches("strata.gl_signature_invariance", rows.iter().map(|r| r.1).sum()),
    ])
}

/// Where the Kähler battery takes its orbit points from.
#[derive(Debug, Clone)]
pub enum KahlerSource {
    /// The same point for every trial; only the generators vary.
    Fixed(HermitianMatrix),
    /// Random points (distinct eigenvalues almost surely), dimensions cycling.
    Random(Vec<usize>),
}

#[derive(Default)]
struct KahlerRow {
    j_squared: f64,
    compatibility: f64,
    symplectic_invariance: f64,
    metric_symmetry: f64,
    metric_min_ratio: f64,
    r_cubed: f64,
    commutation: f64,
    projector: f64,
    fields: f64,
    rank_one: f64,
}

fn kahler_trial(xi: HermitianMatrix, rng: &mut QsgRng) -> Result<KahlerRow> {
    let n = xi.dim();
    let p = OrbitPoint::new(xi)?;
    let a = random_hermitian(n, rng);
    let b = random_hermitian(n, rng);
    let xi_scale = p.spectral().spectral_norm().max(1.0);
    let scale = xi_scale * a.frobenius_norm() * b.frobenius_norm();

    let v = jtilde(&p, &a)?;
    let jjv = complex_structure(&p, &complex_structure(&p, &v)?)?;
    let ja = complex_structure(&p, &a)?;
    let jb = complex_structure(&p, &b)?;
    let eta = orbit_symplectic(&p, &a, &b)?;

    let tangent = distribution_basis(&p, Distribution::Lambda)?;
    let gens = tangent.iter().map(|e| generator_for(&p, e)).collect::<Result<Vec<_>>>()?;
    let m = gens.len();
    let mut gram = nalgebra::DMatrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            gram[(i, j)] = orbit_metric(&p, &gens[i], &gens[j])?;
        }
    }
    let metric_symmetry = (&gram - gram.transpose()).amax();
    let metric_min_ratio = if m == 0 {
        1.0
    } else {
        let sym = (&gram + gram.transpose()) * 0.5;
        let ev = sym.symmetric_eigenvalues();
        ev.min() / ev.max().abs().max(f64::MIN_POSITIVE)
    };

    let r1 = product_structure(&p, &a)?;
    let r3 = product_structure(&p, &product_structure(&p, &r1)?)?;
    let target = lie_bracket(&a, &p.xi().pow(2))?;
    let jr = jtilde(&p, &rtilde(&p, &a)?)?;
    let rj = rtilde(&p, &jtilde(&p, &a)?)?;
    let comm_scale = (xi_scale * xi_scale * a.max_abs_entry()).max(1.0);

    let pp = OrbitPoint::new(momentum_map(&random_unit_vector(n, rng)))?;
    let projector = (orbit_metric(&pp, &a, &b)? - hs_inner(&jtilde(&pp, &a)?, &jtilde(&pp, &b)?)?).abs();

    // Lambda_[A,B] = [Lambda_A, Lambda_B], -[R_A, R_B] and [R_A, Lambda_B] = R_[A,B]
    let ab = lie_bracket(&a, &b)?;
    let (la, lb) = (FundamentalField::Lambda(a.clone()), FundamentalField::Lambda(b.clone()));
    let (ra, rb) = (FundamentalField::R(a.clone()), FundamentalField::R(b.clone()));
    let l_ab = FundamentalField::Lambda(ab.clone()).apply(p.xi())?;
    let r_ab = FundamentalField::R(ab).apply(p.xi())?;
    let fields = dist(&field_commutator(&la, &lb, p.xi())?, &l_ab)
        .max(dist(&field_commutator(&ra, &rb, p.xi())?, &(-&l_ab)))
        .max(dist(&field_commutator(&ra, &lb, p.xi())?, &r_ab))
        / scale;

    // on a unit pure state: J^3 = -J and sigma(R^-1 V, R^-1 W) = <V, W>
    let va = jtilde(&pp, &a)?;
    let vb = jtilde(&pp, &b)?;
    let j1 = rank_one_j(&pp, &va)?;
    let j3 = rank_one_j(&pp, &rank_one_j(&pp, &j1)?)?;
    let (ga, gb) = (r_generator_for(&pp, &va)?, r_generator_for(&pp, &vb)?);
    let rank_one = (dist(&j3, &(-&j1)) / j1.max_abs_entry().max(1.0))
        .max(dist(&rtilde(&pp, &ga)?, &va) / va.max_abs_entry().max(1.0))
        .max((partial_sigma(&pp, &ga, &gb)? - hs_inner(&va, &vb)?).abs() / (a.frobenius_norm() * b.frobenius_norm()));

    Ok(KahlerRow {
        j_squared: dist(&jjv, &(-&v)) / v.max_abs_entry().max(1.0),
        compatibility: (orbit_metric(&p, &ja, &b)? - eta).abs() / scale,
        symplectic_invariance: (orbit_symplectic(&p, &ja, &jb)? - eta).abs() / scale,
        metric_symmetry,
        metric_min_ratio,
        r_cubed: dist(&r3, &r1),
        commutation: dist(&jr, &target).max(dist(&rj, &target)) / comm_scale,
        projector,
        fields,
        rank_one,
    })
}

/// `J^2 = -1` on tangent vectors, `g(JV, W) = eta(V, W)`, `eta(JV, JW) = eta(V, W)`,
/// `g` symmetric positive definite, `R^3 = R`, `[A, xi^2] = J~R~A = R~J~A`,
/// `g = <.,.>` on rank-one projector orbits, the fundamental-field brackets
/// and the rank-one complex and Jordan structures.
pub fn kahler_battery(source: &KahlerSource, trials: usize, seed: u64, exec: Execution) -> Result<Vec<Check>> {
    let rows = collect(par::map_indexed(trials, exec, |t| {
        let mut rng = stream(seed, KAHLER, t);
        let xi = match source {
            KahlerSource::Fixed(xi) => xi.clone(),
            KahlerSource::Random(dims) => random_hermitian(pick(dims, t), &mut rng),
        };
        kahler_trial(xi, &mut rng)
    }))?;
    let col = |f: fn(&KahlerRow) -> f64| worst(rows.iter().map(f));
    let min_ratio = rows.iter().map(|r| r.metric_min_ratio).fold(1.0, f64::min);
    Ok(vec![
        Check::at_most("kahler.j_squared", col(|r| r.j_squared), KAHLER_TOL),
        Check::at_most("kahler.metric_compatibility", col(|r| r.compatibility), KAHLER_TOL),
        Check::at_most("kahler.symplectic_invariance", col(|r| r.symplectic_invariance), KAHLER_TOL),
        Check::at_most("kahler.metric_symmetry", col(|r| r.metric_symmetry), KAHLER_TOL),
        Check::with_pass("kahler.metric_positive", (-min_ratio).max(0.0), 0.0, min_ratio > 0.0),
        Check::at_most("kahler.r_cubed", col(|r| r.r_cubed), KAHLER_TOL),
        Check::at_most("kahler.commutation", col(|r| r.commutation), KAHLER_TOL),
        Check::at_most("kahler.projector_metric", col(|r| r.projector), PROJECTOR_TOL),
        Check::at_most("kahler.field_brackets", col(|r| r.fields), KAHLER_TOL),
        Check::at_most("kahler.rank_one_structure", col(|r| r.rank_one), KAHLER_TOL),
    ])
}

/// Over-long random decompositions on `2x2` and `2x3` reduce to at most
/// `ambient_dim + 1` terms without changing the mixed state.
pub fn caratheodory_battery(per_system: usize, seed: u64, exec: Execution) -> Result<Vec<Check>> {
    let systems = [ProductSpace::new(2, 2)?, ProductSpace::new(2, 3)?];
    let rows = collect(par::map_indexed(2 * per_system, exec, |t| -> Result<(f64, usize)> {
        let ps = systems[t / per_system];
        let mut rng = stream(seed, CARATHEODORY, t);
        let m = ps.ambient_dim() + 2 + t % 10;
        let weights = dirichlet_uniform(m, &mut rng);
        let vectors = (0..m).map(|_| random_unit_vector(ps.dim(), &mut rng)).collect();
        let d = PureDecomposition::new(weights, vectors)?;
        let r = caratheodory_reduce(&d, ps.ambient_dim())?;
        let residual = (&r.mixed_state() - &d.mixed_state()).frobenius_norm();
        Ok((residual, usize::from(r.len() > ps.ambient_dim() + 1)))
    }))?;
    Ok(vec![
        Check::at_most("composite.caratheodory_residual", worst(rows.iter().map(|r| r.0)), CARATHEODORY_TOL),
        Check::mismatches("composite.caratheodory_length", rows.iter().map(|r| r.1).sum()),
    ])
}

/// Sizes of the convex-roof battery on the `2x2` system.
#[derive(Debug, Clone)]
pub struct RoofBattery {
    pub seed: u64,
    pub separable_states: usize,
    pub mixed_states: usize,
    pub pure_states: usize,
    pub restarts: usize,
    pub max_iter: usize,
    pub execution: Execution,
}

impl RoofBattery {
    fn roof_config(&self) -> RoofConfig {
        RoofConfig {
            seed: self.seed,
            restarts: self.restarts,
            max_iter: self.max_iter,
            execution: self.execution,
            ..RoofConfig::default()
        }
    }
}

pub fn bell_state() -> HermitianMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let v = ComplexVector::new(
        [h, 0.0, 0.0, h]
            .iter()
            .map(|&x| num_complex::Complex64::new(x, 0.0))
            .collect(),
    );
    momentum_map(&v)
}

/// Seed for the `s`-th separable sample of a battery run.
fn separable_seed(seed: u64, s: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(s as u64)
}

/// Bell value and the pure-state path, vanishing on constructed separable
/// states, splice convexity, local-unitary invariance and agreement with
/// the partial-transpose test.
pub fn roof_battery(cfg: &RoofBattery) -> Result<Vec<Check>> {
    let ps = ProductSpace::new(2, 2)?;
    let roof_cfg = cfg.roof_config();
    let roof = |rho: &HermitianMatrix| convex_roof(&ps, rho, &roof_cfg);
    // (value, passes PPT) for every estimated state
    let mut valued: Vec<(f64, bool)> = Vec::new();
    let ppt = |rho: &HermitianMatrix| -> Result<bool> { Ok(ppt_test(&ps, rho, PPT_TOL)?.ppt) };

    let bell = bell_state();
    let bell_value = roof(&bell)?.value;
    valued.push((bell_value, ppt(&bell)?));

    let mut pure_residual: f64 = 0.0;
    let mut schmidt_residual: f64 = 0.0;
    let mut segre_residual: f64 = 0.0;
    for t in 0..cfg.pure_states {
        let mut rng = stream(cfg.seed, PURE, t);
        let x = random_unit_vector(4, &mut rng);
        let rho = momentum_map(&x);
        let value = roof(&rho)?.value;
        let entropy = seed_function(&ps, &rho, 1e-10)?;
        pure_residual = worst([pure_residual, (value - entropy).abs()]);
        let quartic: f64 = schmidt_coefficients(&ps, &x)?.iter().map(|s| s.powi(4)).sum();
        schmidt_residual = worst([schmidt_residual, (entropy - (1.0 - quartic)).abs()]);
        valued.push((value, ppt(&rho)?));

        let (x1, x2) = (random_unit_vector(2, &mut rng), random_unit_vector(2, &mut rng));
        let product = segre(&ps, &momentum_map(&x1), &momentum_map(&x2))?;
        let embedded = momentum_map(&product_vector(&ps, &x1, &x2)?);
        segre_residual = worst([segre_residual, dist(&product, &embedded), seed_function(&ps, &product, 1e-10)?.abs()]);
    }

    let mut separable_value: f64 = 0.0;
    let mut separable_ppt_failures = 0;
    for s in 0..cfg.separable_states {
        let rho = sample_separable(&ps, 1 + s % 6, separable_seed(cfg.seed, s))?;
        let passes = ppt(&rho)?;
        separable_ppt_failures += usize::from(!passes);
        let value = roof(&rho)?.value;
        separable_value = worst([separable_value, value]);
        valued.push((value, passes));
    }

    let m = cfg.mixed_states;
    let mut states = Vec::with_capacity(m);
    let mut invariance: f64 = 0.0;
    for i in 0..m {
        let mut rng = stream(cfg.seed, MIXED, i);
        let rho = random_density_of_rank(4, 2 + i % 3, &mut rng);
        let est = roof(&rho)?;
        let u = local_operator(&ps, &random_unitary(2, &mut rng), &random_unitary(2, &mut rng))?;
        let moved = rho.conjugate_by(&u)?;
        let moved_value = roof(&moved)?.value;
        invariance = worst([invariance, (moved_value - est.value).abs()]);
        valued.push((est.value, ppt(&rho)?));
        valued.push((moved_value, ppt(&moved)?));
        states.push((rho, est));
    }

    let mut convexity: f64 = 0.0;
    for i in 0..m {
        let j = (i + 1) % m;
        let lambda = [0.25, 0.5, 0.75][i % 3];
        let (r1, e1) = &states[i];
        let (r2, e2) = &states[j];
        let mix = &r1.scale(lambda) + &r2.scale(1.0 - lambda);
        let cert = splice(lambda, &e1.best_decomposition, &e2.best_decomposition)?;
        let rhs = lambda * e1.value + (1.0 - lambda) * e2.value;
        let with_cert = RoofConfig {
            warm_starts: vec![cert],
            ..roof_cfg.clone()
        };
        let value = convex_roof(&ps, &mix, &with_cert)?.value;
        convexity = worst([convexity, (value - rhs).max(0.0)]);
        valued.push((value, ppt(&mix)?));
    }

    let inconsistent = valued.iter().filter(|(v, passes)| *v > ENTANGLED_VALUE && *passes).count();
    Ok(vec![
        Check::at_most("composite.bell_value", (bell_value - 0.5).abs(), PURE_ROOF_TOL),
        Check::at_most("composite.pure_path", pure_residual, PURE_ROOF_TOL),
        Check::at_most("composite.schmidt_entropy", schmidt_residual, PURE_ROOF_TOL),
        Check::at_most("composite.segre_product", segre_residual, PURE_ROOF_TOL),
        Check::at_most("composite.separable_roof", separable_value, SEPARABLE_ROOF_TOL),
        Check::mismatches("composite.separable_ppt", separable_ppt_failures),
        Check::at_most("composite.local_unitary_invariance", invariance, ROOF_AGREEMENT_TOL),
        Check::at_most("composite.splice_convexity", convexity, ROOF_AGREEMENT_TOL),
        Check::mismatches("composite.entangled_fail_ppt", inconsistent),
    ])
}

/// Sizes for `verify all`.
#[derive(Debug, Clone)]
pub struct VerifyAll {
    pub n: usize,
    pub seed: u64,
    pub trials: usize,
    pub restarts: usize,
    pub execution: Execution,
}

/// Every module battery at dimension `n`; the composite batteries use the
/// `2x2` system (and `2x3` for the reduction).
pub fn verify_all(cfg: &VerifyAll) -> Result<Vec<Check>> {
    let dims = [cfg.n];
    let (seed, trials, exec) = (cfg.seed, cfg.trials, cfg.execution);
    let mut checks = hermitian_battery(&dims, trials, seed, exec)?;
    checks.extend(tensors_battery(&dims, trials, seed, exec)?);
    checks.push(u2_rank_table()?);
    checks.push(chart_round_trips(&dims, trials, seed, exec)?);
    checks.extend(jacobian_ranks(&dims, seed, exec)?);
    checks.extend(support_battery(&dims, trials, seed, exec)?);
    checks.extend(curve_tangency(&dims, trials, seed, exec)?);
    checks.extend(gl_factorization(&dims, trials, 5, seed, exec)?);
    checks.extend(kahler_battery(&KahlerSource::Random(dims.to_vec()), trials, seed, exec)?);
    checks.extend(caratheodory_battery(trials, seed, exec)?);
    checks.extend(roof_battery(&RoofBattery {
        seed,
        separable_states: trials,
        mixed_states: trials,
        pure_states: 3,
        restarts: cfg.restarts,
        max_iter: RoofConfig::default().max_iter,
        execution: exec,
    })?);
    Ok(checks)
}
