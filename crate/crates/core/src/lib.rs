//! Numerical tools around positive definite norm-dependent functions,
//! multidimensional versions of random variables and embedding of normed
//! spaces in L0.
//!
//! The crate is organized by subsystem:
//!
//! * [`numerics`] - quadrature, sphere rules, Bessel functions, a Jacobi
//!   eigensolver, the two-sample Kolmogorov-Smirnov test and a counter-based RNG.
//! * [`starbody`] - Minkowski functionals of origin-symmetric star bodies.
//! * [`posdef`] - Gram matrix tests and refutation search for `f(||x||_K)`.
//! * [`l0embed`] - the Fourier-analytic L0 criterion and 2-D measure recovery.
//! * [`proofcheck`] - the epsilon-limit machinery relating positive
//!   definiteness to the L0 criterion.
//! * [`stable`] - p-stable vectors and the version property.
//! * [`cli`] - command-line orchestration.

pub mod cli;
pub mod error;
pub mod l0embed;
pub mod numerics;
pub mod posdef;
pub mod proofcheck;
pub mod stable;
pub mod starbody;

pub use error::{Error, Result};
