//! Convex-roof extension `f(rho) = inf sum_i t_i F(x_i)` over pure-state
//! decompositions `rho = sum_i t_i |x_i><x_i|`.
//!
//! With `rho = Psi Psi^dagger`, `Psi = E diag(sqrt(lambda))` of rank `r`, the
//! decompositions of length `m` are exactly `y_i = Psi w_i` where `w_i^T` are
//! the rows of an `m x r` matrix `W` with `W^dagger W = I`. The roof is
//! minimized over this complex Stiefel manifold by projected gradient
//! descent with a QR retraction, from several seeded starts. The result is
//! an upper bound on the infimum.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::composite::{
    caratheodory_reduce_cost_aware, LinearEntropy, ProductSpace, PureDecomposition, SeedFunction,
};
use crate::error::{Error, Result};
use crate::hermitian::{c, spectral, CMatrix, ComplexVector, HermitianMatrix};
use crate::par::{map_indexed, Execution};
use crate::random::{ginibre, rng_for_stream};
use crate::strata::check_density;

const DENSITY_TOLERANCE: f64 = 1e-9;
const ARMIJO: f64 = 1e-4;
const MIN_STEP: f64 = 1e-14;
const MAX_STEP: f64 = 1e4;
const MAX_BACKTRACKS: usize = 60;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RoofConfig {
    pub seed: u64,
    pub restarts: usize,
    pub max_iter: usize,
    pub grad_tol: f64,
    /// Decomposition length `m`; defaults to `n^2 + 1`.
    pub terms: Option<usize>,
    pub execution: Execution,
    /// Decompositions of `rho` used as additional starting points.
    #[serde(skip)]
    pub warm_starts: Vec<PureDecomposition>,
}

impl Default for RoofConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            restarts: 32,
            max_iter: 2000,
            grad_tol: 1e-8,
            terms: None,
            execution: Execution::Parallel,
            warm_starts: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerTrace {
    /// Runs performed: random restarts followed by warm starts.
    pub runs: usize,
    pub best_run: usize,
    pub iterations: usize,
    pub final_gradient_norm: f64,
    pub converged: bool,
    pub run_values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoofEstimate {
    pub value: f64,
    pub best_decomposition: PureDecomposition,
    pub optimizer_trace: OptimizerTrace,
}

/// Convex roof of the linear entropy.
pub fn convex_roof(ps: &ProductSpace, rho: &HermitianMatrix, cfg: &RoofConfig) -> Result<RoofEstimate> {
    convex_roof_with(ps, rho, cfg, &LinearEntropy)
}

pub fn convex_roof_with(
    ps: &ProductSpace,
    rho: &HermitianMatrix,
    cfg: &RoofConfig,
    seed_fn: &dyn SeedFunction,
) -> Result<RoofEstimate> {
    ps.check(rho)?;
    check_density(rho, DENSITY_TOLERANCE)?;
    let n = ps.dim();
    let spec = spectral(rho)?;
    let tol = spec.default_rank_tolerance();
    let range: Vec<usize> = (0..n).filter(|&i| spec.eigenvalues[i] > tol).collect();
    let r = range.len();
    let psi = CMatrix::from_fn(n, r, |a, k| {
        spec.eigenvectors[(a, range[k])] * c(spec.eigenvalues[range[k]].sqrt(), 0.0)
    });

    if r == 1 {
        let x = ComplexVector(spec.eigenvectors.column(range[0]).into_owned());
        let value = seed_fn.pure_value(ps, rho)?;
        return Ok(RoofEstimate {
            value,
            best_decomposition: PureDecomposition::new(vec![1.0], vec![x])?,
            optimizer_trace: OptimizerTrace {
                runs: 0,
                best_run: 0,
                iterations: 0,
                final_gradient_norm: 0.0,
                converged: true,
                run_values: Vec::new(),
            },
        });
    }

    let m = cfg.terms.unwrap_or(n * n + 1);
    if m < r {
        return Err(Error::InvalidArgument(format!(
            "decomposition length {m} is below the rank {r} of the state"
        )));
    }
    if cfg.restarts == 0 && cfg.warm_starts.is_empty() {
        return Err(Error::InvalidArgument("need at least one restart or warm start".into()));
    }
    let problem = Problem { ps: *ps, psi, m, seed_fn };
    let warm = cfg
        .warm_starts
        .iter()
        .map(|d| problem.stiefel_point_of(d))
        .collect::<Result<Vec<_>>>()?;

    let runs = cfg.restarts + warm.len();
    let results = map_indexed(runs, cfg.execution, |run| {
        let start = if run < cfg.restarts {
            let mut rng = rng_for_stream(cfg.seed, run as u64);
            retract(&ginibre(m, r, &mut rng))
        } else {
            warm[run - cfg.restarts].clone()
        };
        problem.descend(start, cfg, run)
    });
    let results = results.into_iter().collect::<Result<Vec<_>>>()?;

    let mut best = 0;
    for (i, res) in results.iter().enumerate() {
        if res.value < results[best].value {
            best = i;
        }
    }
    let run_values: Vec<f64> = results.iter().map(|r| r.value).collect();
    let winner = &results[best];
    let decomposition = PureDecomposition::from_unnormalized(&problem.ensemble(&winner.w))?;
    let value = decomposition.cost(ps, seed_fn);
    Ok(RoofEstimate {
        value,
        best_decomposition: decomposition,
        optimizer_trace: OptimizerTrace {
            runs,
            best_run: best,
            iterations: winner.iterations,
            final_gradient_norm: winner.gradient_norm,
            converged: winner.converged,
            run_values,
        },
    })
}

struct Problem<'a> {
    ps: ProductSpace,
    psi: CMatrix,
    m: usize,
    seed_fn: &'a dyn SeedFunction,
}

struct RunResult {
    w: CMatrix,
    value: f64,
    iterations: usize,
    gradient_norm: f64,
    converged: bool,
}

/// `Re tr(A^dagger B)`.
fn real_inner(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

/// Orthonormal columns spanning those of `w`, with the QR phase fixed so
/// that `diag(R) > 0`.
fn retract(w: &CMatrix) -> CMatrix {
    let qr = w.clone().qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..q.ncols() {
        let d = r[(j, j)];
        if d.norm() > 0.0 {
            let phase = d / d.norm();
            for i in 0..q.nrows() {
                q[(i, j)] *= phase;
            }
        }
    }
    q
}

impl Problem<'_> {
    /// Columns `y_i = Psi w_i`, i.e. `Psi W^T`.
    fn ensemble_matrix(&self, w: &CMatrix) -> CMatrix {
        &self.psi * w.transpose()
    }

    fn ensemble(&self, w: &CMatrix) -> Vec<nalgebra::DVector<Complex64>> {
        let y = self.ensemble_matrix(w);
        (0..y.ncols()).map(|i| y.column(i).into_owned()).collect()
    }

    fn cost(&self, w: &CMatrix) -> f64 {
        let y = self.ensemble_matrix(w);
        (0..y.ncols())
            .map(|i| self.seed_fn.weighted_cost(&self.ps, y.column(i).as_slice()))
            .sum()
    }

    /// Cost and Wirtinger gradient `df / d conj(W) = G_y^T conj(Psi)`.
    fn cost_and_gradient(&self, w: &CMatrix) -> (f64, CMatrix) {
        let y = self.ensemble_matrix(w);
        let mut gy = CMatrix::zeros(y.nrows(), y.ncols());
        let mut total = 0.0;
        for i in 0..y.ncols() {
            let mut g = vec![c(0.0, 0.0); y.nrows()];
            total += self
                .seed_fn
                .weighted_cost_and_gradient(&self.ps, y.column(i).as_slice(), &mut g);
            gy.column_mut(i).copy_from_slice(&g);
        }
        (total, gy.transpose() * self.psi.map(|z| z.conj()))
    }

    /// Projection onto the tangent space at `w`: `G - W sym(W^dagger G)`.
    fn riemannian(w: &CMatrix, g: &CMatrix) -> CMatrix {
        let wg = w.adjoint() * g;
        let sym = (&wg + wg.adjoint()) * c(0.5, 0.0);
        g - w * sym
    }

    /// Stiefel point of a decomposition of the same state: terms are reduced
    /// to at most `m` without raising the cost, then `w_i = diag(1/sqrt(lambda)) E^dagger y_i`.
    fn stiefel_point_of(&self, d: &PureDecomposition) -> Result<CMatrix> {
        let n = self.ps.dim();
        if d.dim() != n {
            return Err(Error::DimensionMismatch { left: n, right: d.dim() });
        }
        let d = if d.len() > self.m {
            caratheodory_reduce_cost_aware(d, self.ps.ambient_dim(), &self.ps, self.seed_fn)?
        } else {
            d.clone()
        };
        if d.len() > self.m {
            return Err(Error::InvalidArgument(format!(
                "warm start has {} terms after reduction, more than {}",
                d.len(),
                self.m
            )));
        }
        let r = self.psi.ncols();
        // Psi^+ = diag(1/lambda) Psi^dagger since Psi has orthogonal columns
        let mut pinv = self.psi.adjoint();
        for k in 0..r {
            let norm2 = self.psi.column(k).norm_squared();
            for j in 0..n {
                pinv[(k, j)] /= c(norm2, 0.0);
            }
        }
        let mut w = CMatrix::zeros(self.m, r);
        for (i, y) in d.unnormalized().iter().enumerate() {
            let wi = &pinv * y;
            for k in 0..r {
                w[(i, k)] = wi[k];
            }
        }
        Ok(retract(&w))
    }

    fn descend(&self, start: CMatrix, cfg: &RoofConfig, run: usize) -> Result<RunResult> {
        let mut w = start;
        let (mut f, g) = self.cost_and_gradient(&w);
        let mut grad = Self::riemannian(&w, &g);
        let mut step = 1.0;
        let mut iterations = 0;
        let mut converged = false;
        let diverged = |iteration: usize, reason: &str| Error::OptimizerDiverged {
            restart: run,
            iteration,
            reason: reason.into(),
        };
        if !f.is_finite() {
            return Err(diverged(0, "non-finite cost at start"));
        }
        while iterations < cfg.max_iter {
            let gnorm2 = real_inner(&grad, &grad);
            if gnorm2.sqrt() < cfg.grad_tol {
                converged = true;
                break;
            }
            let mut alpha = step;
            let mut accepted = None;
            for _ in 0..MAX_BACKTRACKS {
                let trial = retract(&(&w - &grad * c(alpha, 0.0)));
                let ft = self.cost(&trial);
                if ft.is_nan() {
                    return Err(diverged(iterations, "cost evaluated to NaN"));
                }
                if ft <= f - ARMIJO * 2.0 * alpha * gnorm2 {
                    accepted = Some((trial, ft));
                    break;
                }
                alpha *= 0.5;
                if alpha < MIN_STEP {
                    break;
                }
            }
            let Some((w_new, _)) = accepted else {
                break;
            };
            let (f_new, g_new) = self.cost_and_gradient(&w_new);
            let grad_new = Self::riemannian(&w_new, &g_new);
            // Barzilai-Borwein step for the next iteration
            let s = &w_new - &w;
            let yv = &grad_new - &grad;
            let sy = real_inner(&s, &yv).abs();
            step = if sy > 0.0 {
                (real_inner(&s, &s) / sy).clamp(MIN_STEP, MAX_STEP)
            } else {
                (alpha * 2.0).min(MAX_STEP)
            };
            w = w_new;
            f = f_new;
            grad = grad_new;
            iterations += 1;
        }
        let gradient_norm = real_inner(&grad, &grad).sqrt();
        Ok(RunResult {
            w,
            value: f,
            iterations,
            gradient_norm,
            converged: converged || gradient_norm < cfg.grad_tol,
        })
    }
}
