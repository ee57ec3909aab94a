//! Numerics for the periodically forced inviscid Burgers equation
//! ∂_t y + ∂_x(y²/2 + V(t, x)) = 0 on the circle 𝕋 = ℝ/ℤ.
//!
//! The central object is the Lax–Oleinik evolution of Hamilton–Jacobi
//! values ([`lax_oleinik`]), from which entropy solutions, their graphs,
//! effective Hamiltonians α(c), rotation numbers and long-time periodic
//! limits are derived ([`entropy`], [`asymptotics`]). A Godunov
//! finite-volume scheme provides an independent cross-check of the same
//! dynamics. [`hamiltonian`] holds the model catalogue and the classical
//! characteristic flow.

pub mod asymptotics;
pub mod entropy;
pub mod error;
pub mod grid;
pub mod hamiltonian;
pub mod lax_oleinik;

pub use asymptotics::{
    corollary_check, detect_asymptotic_period, estimate_alpha, estimate_rho, rational_period,
    AlphaEstimate, AsymptoticsReport, CorollaryReport,
};
pub use error::{Error, Result};
pub use grid::GridFunction;
pub use hamiltonian::{HamiltonianSpec, PhasePoint, Trajectory};
pub use lax_oleinik::{LaxOleinikConfig, ValueChain};
