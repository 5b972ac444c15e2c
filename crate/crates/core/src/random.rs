//! Seeded random generators for Hermitian matrices, states and unitaries.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::hermitian::{c, CMatrix, CVector, ComplexVector, HermitianMatrix};

pub type QsgRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> QsgRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `stream` of the generator seeded with `seed`.
pub fn rng_for_stream(seed: u64, stream: u64) -> QsgRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Hermitian part of a Ginibre matrix.
pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> HermitianMatrix {
    HermitianMatrix::hermitian_part(&ginibre(n, n, rng))
}

/// Haar-distributed unit vector.
pub fn random_unit_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexVector {
    loop {
        let v = ComplexVector(CVector::from_fn(n, |_, _| complex_gaussian(rng)));
        if v.norm() > 1e-8 {
            return v.normalized();
        }
    }
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of
/// `diag(R)` moved into `Q`.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let g = ginibre(n, n, rng);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// `T^dagger T` with `T` a `k x n` Ginibre matrix: PSD of rank `k` almost surely.
pub fn random_psd_of_rank<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> HermitianMatrix {
    let t = ginibre(k, n, rng);
    HermitianMatrix::hermitian_part(&(t.adjoint() * t))
}

/// Trace-one PSD matrix of rank `k`.
pub fn random_density_of_rank<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> HermitianMatrix {
    let p = random_psd_of_rank(n, k, rng);
    let tr = p.trace();
    p.scale(1.0 / tr)
}

/// `U diag(values) U^dagger` with Haar `U`.
pub fn random_hermitian_with_spectrum<R: Rng + ?Sized>(values: &[f64], rng: &mut R) -> HermitianMatrix {
    let u = random_unitary(values.len(), rng);
    HermitianMatrix::diagonal(values)
        .conjugate_by(&u)
        .expect("square unitary of matching size")
}

/// Uniform point on the probability simplex with `m` vertices.
pub fn dirichlet_uniform<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Vec<f64> {
    let e: Vec<f64> = (0..m).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|x| x / s).collect()
}

pub fn random_real_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.sample(StandardNormal))
}
