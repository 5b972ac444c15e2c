//! Geometry of Hermitian operators.
//!
//! * [`hermitian`]: Hermitian matrices with the scalar product
//!   `<A, B> = Tr(AB)/2`, the Lie bracket `(AB - BA)/i` and the Jordan
//!   product `AB + BA`.
//! * [`tensors`]: the Poisson tensor `Lambda` and the Riemann-Jordan tensor
//!   `R` as pushforwards of the Hermitian structure of `C^n`.
//! * [`strata`]: charts and tangent spaces of the rank-`k` PSD matrices,
//!   congruence orbits and faces of the density matrices.
//! * [`kahler`]: complex and product structures, symplectic form and metric
//!   on unitary orbits.
//! * [`composite`]: bipartite systems and the convex-roof entanglement
//!   measure.
//!
//! Data-parallel loops go through [`par`]; the `parallel` feature (default)
//! enables rayon.

// `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod composite;
pub mod error;
pub mod hermitian;
pub mod io;
pub mod kahler;
pub mod linalg;
pub mod par;
pub mod random;
pub mod strata;
pub mod tensors;

pub use error::{Error, Result};
pub use hermitian::{
    hs_inner, jordan_bracket, lie_bracket, rank_signature, spectral, CMatrix, CVector, ComplexVector,
    HermitianMatrix, Signature, SpectralData,
};
pub use par::Execution;
