//! Numerical laboratory for complex Hessian-type equations
//! `f(λ[ω⁻¹(χ + i∂∂̄u)]) = ψ` on flat model geometries.
//!
//! The crate is organised bottom-up:
//!
//! * [`symfunc`]: symmetric functions `f` on Gårding cones, their derivatives,
//!   cone membership and structural verifiers.
//! * [`spectra`]: Hermitian eigenvalues (complex Jacobi), the bordered-matrix
//!   eigenvalue localization machinery and the matrix derivative of `f(λ(G))`.
//! * [`subsol`]: level sets of `f`, the ε-dichotomy context and the
//!   C-subsolution test.
//! * [`grid`]: flat tori and products `X × S`, scalar and Hermitian fields,
//!   finite-difference complex Hessians.
//! * [`solve`]: Poisson solves, sub/supersolutions, damped Newton for the
//!   closed and Dirichlet problems, degenerate sweeps and estimate reports.
//! * [`cli`]: configuration and batch drivers behind the `hcl` binary.

pub mod cli;
pub mod error;
pub mod grid;
pub mod sampling;
pub mod solve;
pub mod spectra;
pub mod subsol;
pub mod symfunc;

pub use error::{Error, Result};
pub use grid::{GridDomain, HermitianField, NodeKind, ScalarField};
pub use spectra::{BorderedHermitian, HermitianMatrix, LocalizationVerdict};
pub use symfunc::{ConeVerdict, FamilyKind, FuncFamily, LambdaTuple};
