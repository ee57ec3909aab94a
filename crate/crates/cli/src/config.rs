//! JSON experiment configuration: the Hamiltonian, the lattice, the
//! initial data, and the experiment knobs. Every run is reproducible
//! from its config file plus the seed recorded in the manifest.

use burgers_core::{Error, GridFunction, HamiltonianSpec, LaxOleinikConfig, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub spec: HamiltonianSpec,
    pub grid: GridBlock,
    #[serde(default)]
    pub initial: InitialData,
    #[serde(default)]
    pub experiment: ExperimentBlock,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridBlock {
    pub n: usize,
    #[serde(default = "default_m")]
    pub m: usize,
    #[serde(default = "default_v_max")]
    pub v_max: f64,
}

fn default_m() -> usize {
    LaxOleinikConfig::DEFAULT_M
}

fn default_v_max() -> f64 {
    LaxOleinikConfig::DEFAULT_V_MAX
}

/// Initial state y0 on the circle. `Fourier` is explicit coefficients;
/// `Random` draws 1/k-weighted trigonometric coefficients from the run
/// seed, matching the library's randomized property tests.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialData {
    Constant { value: f64 },
    Fourier { mean: f64, modes: Vec<FourierMode> },
    Random { mean: f64, max_mode: usize, amp: f64 },
}

impl Default for InitialData {
    fn default() -> Self {
        Self::Constant { value: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FourierMode {
    pub k: usize,
    #[serde(default)]
    pub amp_cos: f64,
    #[serde(default)]
    pub amp_sin: f64,
}

/// Experiment knobs; every subcommand reads the subset it needs.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentBlock {
    /// Periods to iterate (evolve, graphs), regression horizon
    /// (alpha-curve), or detection horizon (period).
    pub n_periods: usize,
    /// L¹ tolerance for period detection and the corollary check.
    pub tolerance: f64,
    /// Gate on the alpha regression's standard error.
    pub alpha_stderr_bound: f64,
    /// Drives for alpha-curve.
    pub c_grid: Vec<f64>,
    /// Space resolutions for oracle-compare.
    pub n_grid: Vec<usize>,
    /// Period indices at which the corollary check records states.
    pub periods: Vec<usize>,
    /// Integrator step of the characteristic flow in graphs.
    pub dt_flow: f64,
    /// Seed for random initial data; the --seed flag overrides it.
    pub seed: u64,
}

impl Default for ExperimentBlock {
    fn default() -> Self {
        Self {
            n_periods: 20,
            tolerance: 5e-3,
            alpha_stderr_bound: f64::INFINITY,
            c_grid: Vec::new(),
            n_grid: vec![256, 512, 1024],
            periods: vec![8, 16, 24, 32],
            dt_flow: 1.0 / 64.0,
            seed: 0,
        }
    }
}

impl ExperimentConfig {
    /// Structural validation beyond what serde enforces. The grid block
    /// is checked by constructing a solver config once.
    pub fn validate(&self) -> Result<()> {
        self.spec.validate()?;
        self.lax(0.0)?;
        let e = &self.experiment;
        if !(e.tolerance > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "tolerance must be positive, got {}",
                e.tolerance
            )));
        }
        if !(e.alpha_stderr_bound > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "alpha_stderr_bound must be positive, got {}",
                e.alpha_stderr_bound
            )));
        }
        if !(e.dt_flow > 0.0 && e.dt_flow <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "dt_flow must lie in (0, 1], got {}",
                e.dt_flow
            )));
        }
        if e.n_periods == 0 {
            return Err(Error::InvalidConfig("n_periods must be positive".into()));
        }
        Ok(())
    }

    /// Solver lattice at the given drive.
    pub fn lax(&self, c: f64) -> Result<LaxOleinikConfig> {
        LaxOleinikConfig::new(self.grid.n, self.grid.m, self.grid.v_max, c)
    }

    /// Solver lattice at the given resolution (oracle-compare refines n
    /// while keeping the sub-step count).
    pub fn lax_at(&self, n: usize, c: f64) -> Result<LaxOleinikConfig> {
        LaxOleinikConfig::new(n, self.grid.m, self.grid.v_max, c)
    }

    /// Initial state on the configured grid.
    pub fn initial_state(&self, seed: u64) -> GridFunction {
        self.initial.realize(self.grid.n, seed)
    }
}

impl InitialData {
    pub fn realize(&self, n: usize, seed: u64) -> GridFunction {
        match self {
            Self::Constant { value } => GridFunction::constant(n, *value),
            Self::Fourier { mean, modes } => GridFunction::sample(n, |x| {
                let mut v = *mean;
                for m in modes {
                    let phase = TAU * m.k as f64 * x;
                    v += m.amp_cos * phase.cos() + m.amp_sin * phase.sin();
                }
                v
            }),
            Self::Random { mean, max_mode, amp } => {
                let mut rng = ChaCha12Rng::seed_from_u64(seed);
                GridFunction::random_trig(n, *mean, *max_mode, *amp, &mut rng)
            }
        }
    }
}
