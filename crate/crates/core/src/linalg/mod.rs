//! Dense complex linear algebra.
//!
//! Everything here works on row-major [`DenseMatrix`] values and plain
//! `&[C64]` vectors. The sizes involved (block pencils of a few hundred rows,
//! projected problems of a few dozen) do not justify a BLAS dependency.

mod eig;
mod lu;
mod matrix;
mod ortho;
pub mod random;
pub mod vector;

pub use eig::{
    dense_eig, dense_eigvals, hessenberg_eig, hessenberg_eigvec, hessenberg_reduce, EigenPair, HessenbergEig,
    HessenbergReduction,
};
pub use lu::{lu_factor, lu_solve, smallest_singular_value, LuFactors};
pub use matrix::DenseMatrix;
pub use ortho::{orthonormalize, Basis};

pub type C64 = num_complex::Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
