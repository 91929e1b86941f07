//! Norm-constrained interpolation in vector-valued de Branges–Rovnyak and
//! Hardy spaces at desk scale.
//!
//! The library works with finite-dimensional interpolation data
//! `{S, T, E, N, x}`: a rational Schur-class function `S`, matrices `T`, `E`,
//! `N` describing an operator-argument interpolation condition, and a target
//! vector `x`.  From such data it builds the Gram operator `P`, decides
//! solvability (`P ⪰ xx*`), constructs a unitary Redheffer colligation whose
//! characteristic function `Σ` parametrizes every solution through a linear
//! fractional transform, and exposes the explicit special cases: classical and
//! operator-argument Nevanlinna–Pick / Carathéodory–Fejér problems in `H²`,
//! model-space intersections `K_S ∩ B·H²`, and scalar boundary interpolation
//! with higher-order boundary derivatives.
//!
//! All matrices are dense complex (`ndarray::Array2<Complex64>`); the
//! factorization backend is `faer`.  Every operation is a pure function of its
//! inputs and deterministic, so results are reproducible bit-for-bit under a
//! fixed configuration.

pub mod aipdata;
pub mod boundary;
pub mod cli;
pub mod homint;
pub mod numlin;
pub mod oap;
pub mod rational;
pub mod redheffer;
pub mod solve;

use num_complex::Complex64;

/// Dense complex matrix, the universal carrier for every operator in the
/// library.
pub type CMat = ndarray::Array2<Complex64>;
/// Dense complex column vector.
pub type CVec = ndarray::Array1<Complex64>;

/// Library-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("matrix is not positive semidefinite (min eigenvalue {min_eig:.3e})")]
    NotPsd { min_eig: f64 },
    #[error("spectral radius {rho} is not < 1; equation is ill-posed")]
    Unstable { rho: f64 },
    #[error("singular linear system: {0}")]
    Singular(String),
    #[error("pole of rational function at z = {z}")]
    Pole { z: Complex64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("data set is not admissible: {0}")]
    NotAdmissible(String),
    #[error("problem is not solvable: solvability margin {margin:.6e}")]
    Unsolvable { margin: f64 },
    #[error("parameter recovery failed: {0}")]
    RecoveryFailed(String),
    #[error("internal inconsistency: {0}")]
    Internal(String),
    #[error("input error: {0}")]
    Input(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

/// Convenience result alias.
pub type Result<T> = std::result::Result<T, Error>;
