//! Spectral solver for the planar three-body Coulomb problem.
//!
//! Two particles of charges `Q1`, `Q2` bound to a third of charge `Q3` are
//! described with a pair of successive parabolic transformations. In the
//! resulting coordinates `(x_p, y_p, x_m, y_m)` every term of the
//! Schrödinger equation is a polynomial, so the problem becomes a sparse
//! generalized eigenproblem in a basis of four-oscillator Fock states.

pub mod assembly;
pub mod basis;
pub mod eigensolver;
pub mod exact;
pub mod hamiltonian;
pub mod oscillator;
pub mod sparse;
pub mod spectra;
pub mod symmetry;

use std::sync::atomic::{AtomicUsize, Ordering};

pub use num_complex::Complex64;

static THREADS: AtomicUsize = AtomicUsize::new(0);

/// Caps the worker threads used by assembly. `0` restores the default.
pub fn set_threads(n: usize) {
    THREADS.store(n, Ordering::Relaxed);
}

/// Worker threads for parallel assembly.
pub fn threads() -> usize {
    match THREADS.load(Ordering::Relaxed) {
        0 => std::thread::available_parallelism().map_or(1, |n| n.get()),
        n => n,
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("length mismatch: {left} operators, {right} weights")]
    LengthMismatch { left: usize, right: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("coefficient with an irrational part survived conversion to ladder form")]
    IrrationalCoefficient,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("inconsistent symmetry: {0}")]
    InconsistentSymmetry(String),
    #[error("group verification failed: {0}")]
    GroupCheck(String),
    #[error("matrix element overflows exact integer accumulation")]
    Overflow,
    #[error("factorization hit a near-singular pivot at block {block}; move the shift")]
    SingularShift { block: usize },
    #[error("eigensolver did not converge: {converged} of {requested} pairs after {iterations} iterations")]
    NotConverged { converged: usize, requested: usize, iterations: usize },
    #[error("dense reference solver limited to dimension {limit}, got {dim}")]
    TooLarge { dim: usize, limit: usize },
    #[error("metric is not positive definite")]
    NotPositiveDefinite,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Convergence failures are reported separately from bad input.
    pub fn is_convergence(&self) -> bool {
        matches!(self, Error::NotConverged { .. } | Error::SingularShift { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
