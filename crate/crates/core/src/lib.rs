//! Nonlinear eigenvalue problems `T(λ)u = 0` solved through contour-integral
//! rational approximation or Chebyshev interpolation of `T`, followed by a
//! structured linearization.
//!
//! The pieces, bottom-up:
//!
//! - [`linalg`]: dense complex kernels (LU, Gram-Schmidt, Hessenberg QR).
//! - [`quadrature`]: contours, quadrature rules and Chebyshev machinery.
//! - [`approx`]: the rational approximant `Σ B_i/(z − σ_i)` and the
//!   Chebyshev interpolant `Σ B_i τ_i(z)`.
//! - [`pencil`]: the block pencils `(A, M)` whose eigenvalues are those of the
//!   approximants, plus a dense reference solve.
//! - [`structured`]: inverse-power steps that apply `(A − σM)⁻¹M` with a
//!   single `n × n` factorization.
//! - [`solvers`]: shift-and-invert Arnoldi and the reduced (Rayleigh-Ritz)
//!   subspace iteration.
//! - [`gallery`]: analytic test problems with independently known spectra.
//! - [`harness`]: configuration files, reports and the batch driver behind
//!   the `nlevp` binary.

pub mod approx;
pub mod error;
pub mod gallery;
pub mod harness;
pub mod linalg;
pub mod pencil;
pub mod quadrature;
pub mod solvers;
pub mod structured;

pub use error::{Error, Result};
pub use linalg::{DenseMatrix, C64};
