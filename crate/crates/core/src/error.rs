//! Error type shared by all solver modules.

use thiserror::Error;

/// Everything that can go wrong in a solver call.
///
/// Variants carry the numbers needed to diagnose a failed run without
/// re-running it; none of them allocate on the happy path.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Two grid functions of different sizes were combined.
    #[error("grid size mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },

    /// Newton/bisection on the Legendre transform stalled.
    #[error(
        "Legendre solve did not converge after {iterations} iterations (residual {residual:e})"
    )]
    NoConvergence { iterations: usize, residual: f64 },

    /// A flow trajectory left the admissible momentum band.
    #[error("momentum blow-up at t = {t}: |p| = {p_abs} exceeds {bound}")]
    BlowUp { t: f64, p_abs: f64, bound: f64 },

    /// A one-step displacement fell outside the velocity window.
    #[error("displacement {displacement} exceeds the velocity window |d| <= {max_displacement}")]
    WindowExceeded { displacement: f64, max_displacement: f64 },

    /// An explicit finite-volume step was asked to outrun its stencil.
    #[error("CFL violation: dt*max|speed| = {lhs:e} > dx = {dx:e}")]
    CflViolation { lhs: f64, dx: f64 },

    /// No time-periodic limit was found within the iteration horizon.
    #[error("no asymptotic period <= {t_max} detected in {n_max} iterations (best: T = {best_t} at L1 distance {best_distance:e})")]
    NoPeriodDetected { n_max: usize, t_max: usize, best_t: usize, best_distance: f64 },

    /// The linear drift fit of the value sequence is too noisy to trust.
    #[error("alpha estimate did not converge: stderr {stderr:e} exceeds {bound:e}")]
    NotConverged { stderr: f64, bound: f64 },

    /// A Hamiltonian spec violates its structural requirements.
    #[error("invalid Hamiltonian spec: {0}")]
    InvalidSpec(String),

    /// A solver configuration violates its structural requirements.
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
