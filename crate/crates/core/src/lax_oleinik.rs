//! Discrete Lax–Oleinik (Hopf–Lax) operator on the circle.
//!
//! One period of the variational evolution
//!
//!   V^c_{t0,t1}(u)(x) = min over curves x(·) ending at x of
//!                       u(x(t0)) + ∫ [L(s, x, ẋ) − c·ẋ] ds
//!
//! is computed by dynamic programming on a space–time lattice: nodes
//! x_i = i/n, layers dt = 1/m apart, one straight segment per layer with
//! the action evaluated by the midpoint rule. The per-step velocity window
//! |ẋ| ≤ v_max bounds the stencil, and argmin pointers turn the value chain
//! into discrete calibrated curves via [`backtrack_minimizer`].
//!
//! Determinism: within a layer the minimization scans displacements in a
//! fixed order and breaks exact ties by smaller |displacement|, then by
//! leftmost predecessor index, so reruns are bit-identical and composing
//! two half chains equals one full chain exactly.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::hamiltonian::{HamiltonianSpec, PhasePoint, Trajectory};

/// Hard cap on n·m per chain; keeps accidental quadratic configs at desk scale.
pub const LATTICE_BUDGET: usize = 1 << 23;

/// Lattice geometry for one evolution: n spatial nodes, m layers per unit
/// time, velocity window v_max, and the momentum shift c (the drive −c·ẋ
/// in the action).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LaxOleinikConfig {
    n: usize,
    m: usize,
    v_max: f64,
    c: f64,
}

impl LaxOleinikConfig {
    pub const DEFAULT_M: usize = 64;
    pub const DEFAULT_V_MAX: f64 = 4.0;

    pub fn new(n: usize, m: usize, v_max: f64, c: f64) -> Result<Self> {
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::InvalidConfig(format!("n = {n} must be a power of two >= 2")));
        }
        if m == 0 {
            return Err(Error::InvalidConfig("m must be positive".into()));
        }
        if !(v_max > 0.0 && v_max.is_finite() && c.is_finite()) {
            return Err(Error::InvalidConfig("v_max must be positive and c finite".into()));
        }
        let reach = v_max / m as f64;
        if reach < 2.0 / n as f64 {
            return Err(Error::InvalidConfig(format!(
                "velocity window spans less than two cells: v_max/m = {reach:e} < 2/n"
            )));
        }
        if reach > 0.5 {
            return Err(Error::InvalidConfig(format!(
                "velocity window v_max/m = {reach} exceeds the half-circle; windings would alias"
            )));
        }
        if n * m > LATTICE_BUDGET {
            return Err(Error::InvalidConfig(format!(
                "lattice n*m = {} exceeds budget {LATTICE_BUDGET}",
                n * m
            )));
        }
        Ok(Self { n, m, v_max, c })
    }

    /// n, m = 64, v_max = 4 with the given drive.
    pub fn with_defaults(n: usize, c: f64) -> Result<Self> {
        Self::new(n, Self::DEFAULT_M, Self::DEFAULT_V_MAX, c)
    }

    /// Same lattice, different drive.
    pub fn with_c(&self, c: f64) -> Self {
        Self { c, ..*self }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn v_max(&self) -> f64 {
        self.v_max
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn dt(&self) -> f64 {
        1.0 / self.m as f64
    }

    pub fn dx(&self) -> f64 {
        1.0 / self.n as f64
    }

    /// Half-width of the displacement stencil in cells.
    pub fn window_cells(&self) -> usize {
        (self.v_max * self.dt() * self.n as f64 + 1e-9).floor() as usize
    }
}

/// Action of one straight lattice segment from x_from to x_to + winding
/// over [t, t + dt]: dt·[L(t + dt/2, midpoint, v) − c·v] with
/// v = (x_to − x_from + winding)/dt.
pub fn step_action(
    spec: &HamiltonianSpec,
    cfg: &LaxOleinikConfig,
    t: f64,
    x_from: f64,
    x_to: f64,
    winding: i32,
) -> Result<f64> {
    let dt = cfg.dt();
    let d = x_to - x_from + winding as f64;
    let max_d = cfg.v_max * dt;
    if d.abs() > max_d + 1e-12 {
        return Err(Error::WindowExceeded { displacement: d, max_displacement: max_d });
    }
    let v = d / dt;
    let base = velocity_action(spec, cfg.c, dt, v)?;
    let x_mid = (x_from + 0.5 * d).rem_euclid(1.0);
    Ok(base - dt * spec.potential(t + 0.5 * dt, x_mid))
}

/// Velocity-only part of the step action, dt·[L_kin(v) − c·v]; the
/// potential is subtracted separately so layers can cache it on the
/// half grid without changing the rounding of the total.
fn velocity_action(spec: &HamiltonianSpec, c: f64, dt: f64, v: f64) -> Result<f64> {
    match spec {
        HamiltonianSpec::SeparableForced { .. } => Ok(dt * (0.5 * v * v - c * v)),
        HamiltonianSpec::PureMomentum { .. } => {
            let l = spec.lagrangian(0.0, 0.0, v)?;
            Ok(dt * (l.value - c * v))
        }
    }
}

/// One Bellman layer.
#[derive(Debug, Clone)]
pub struct LaxStep {
    pub u_next: GridFunction,
    /// Chosen predecessor node for each target node.
    pub argmin: Vec<usize>,
    /// Nodes whose argmin sat on the window boundary; nonzero means the
    /// window clipped the minimizer and v_max should be raised.
    pub boundary_hits: usize,
}

/// Applies one dt-layer of the dynamic program at layer time t.
pub fn lax_oleinik_step(
    spec: &HamiltonianSpec,
    cfg: &LaxOleinikConfig,
    u: &GridFunction,
    t: f64,
) -> Result<LaxStep> {
    if u.n() != cfg.n {
        return Err(Error::SizeMismatch { left: u.n(), right: cfg.n });
    }
    let kernel = Kernel::build(spec, cfg)?;
    Ok(kernel.advance(spec, cfg, u.values(), t))
}

/// Value function history over a run of the dynamic program.
///
/// `layers[k]` lives at time t0 + k·dt; `argmins[k][i]` is the predecessor
/// in layer k of node i in layer k + 1. Every layer k ≥ 1 inherits the
/// scheme's Lipschitz and semi-concavity bounds regardless of u0.
#[derive(Debug, Clone)]
pub struct ValueChain {
    t0: f64,
    dt: f64,
    c: f64,
    layers: Vec<GridFunction>,
    argmins: Vec<Vec<usize>>,
    boundary_hits: usize,
}

impl ValueChain {
    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn steps(&self) -> usize {
        self.argmins.len()
    }

    pub fn layers(&self) -> &[GridFunction] {
        &self.layers
    }

    pub fn layer(&self, k: usize) -> &GridFunction {
        &self.layers[k]
    }

    pub fn final_layer(&self) -> &GridFunction {
        self.layers.last().unwrap()
    }

    pub fn argmin_layer(&self, k: usize) -> &[usize] {
        &self.argmins[k]
    }

    /// Total argmin-on-window-boundary count across all layers.
    pub fn window_saturation(&self) -> usize {
        self.boundary_hits
    }

    /// Writes the chain in long format `k,x,u` (one row per layer node).
    pub fn write_csv<W: std::io::Write>(&self, w: &mut W) -> std::io::Result<()> {
        use crate::grid::fmt_g17;
        writeln!(w, "k,x,u")?;
        for (k, layer) in self.layers.iter().enumerate() {
            for (i, v) in layer.values().iter().enumerate() {
                writeln!(w, "{},{},{}", k, fmt_g17(layer.node(i)), fmt_g17(*v))?;
            }
        }
        Ok(())
    }
}

/// Runs `steps` layers from u0 at start time t0, keeping full history.
pub fn lax_oleinik_chain(
    spec: &HamiltonianSpec,
    cfg: &LaxOleinikConfig,
    u0: &GridFunction,
    t0: f64,
    steps: usize,
) -> Result<ValueChain> {
    if u0.n() != cfg.n {
        return Err(Error::SizeMismatch { left: u0.n(), right: cfg.n });
    }
    let kernel = Kernel::build(spec, cfg)?;
    let mut layers = Vec::with_capacity(steps + 1);
    let mut argmins = Vec::with_capacity(steps);
    let mut boundary = 0;
    layers.push(u0.clone());
    for k in 0..steps {
        let t = t0 + k as f64 * cfg.dt();
        let step = kernel.advance(spec, cfg, layers[k].values(), t);
        boundary += step.boundary_hits;
        layers.push(step.u_next);
        argmins.push(step.argmin);
    }
    Ok(ValueChain { t0, dt: cfg.dt(), c: cfg.c, layers, argmins, boundary_hits: boundary })
}

/// One full forcing period (m layers) starting at t0.
pub fn lax_oleinik_period(
    spec: &HamiltonianSpec,
    cfg: &LaxOleinikConfig,
    u0: &GridFunction,
    t0: f64,
) -> Result<ValueChain> {
    lax_oleinik_chain(spec, cfg, u0, t0, cfg.m)
}

/// Runs `steps` layers keeping only the final one. Returns the final layer
/// and the boundary-hit count. Identical arithmetic to the chain driver.
pub fn lax_oleinik_apply(
    spec: &HamiltonianSpec,
    cfg: &LaxOleinikConfig,
    u0: &GridFunction,
    t0: f64,
    steps: usize,
) -> Result<(GridFunction, usize)> {
    if u0.n() != cfg.n {
        return Err(Error::SizeMismatch { left: u0.n(), right: cfg.n });
    }
    let kernel = Kernel::build(spec, cfg)?;
    let mut u = u0.clone();
    let mut boundary = 0;
    for k in 0..steps {
        let t = t0 + k as f64 * cfg.dt();
        let step = kernel.advance(spec, cfg, u.values(), t);
        boundary += step.boundary_hits;
        u = step.u_next;
    }
    Ok((u, boundary))
}

/// Follows argmin pointers back from the final-layer node `x_end_index`,
/// returning the discrete calibrated curve, forward in time.
///
/// Momenta use the layer-midpoint convention: point k carries the dual
/// variable of its outgoing segment, p = ∂_v L(t_k + dt/2, midpoint, v_k)
/// (the −c·ẋ drive is a null Lagrangian, so this is the momentum of the
/// unshifted flow and y-values on the graph coincide with it).
pub fn backtrack_minimizer(
    spec: &HamiltonianSpec,
    chain: &ValueChain,
    x_end_index: usize,
) -> Result<Trajectory> {
    let steps = chain.steps();
    if steps == 0 {
        return Err(Error::InvalidConfig("cannot backtrack a chain with no steps".into()));
    }
    let n = chain.layer(0).n() as isize;
    let mut idx = vec![0usize; steps + 1];
    idx[steps] = x_end_index % n as usize;
    for k in (0..steps).rev() {
        idx[k] = chain.argmins[k][idx[k + 1]];
    }
    let dt = chain.dt;
    let mut momenta = Vec::with_capacity(steps);
    for k in 0..steps {
        let mut delta = (idx[k + 1] as isize - idx[k] as isize).rem_euclid(n);
        if delta > n / 2 {
            delta -= n;
        }
        let d = delta as f64 / n as f64;
        let v = d / dt;
        let x_mid = (idx[k] as f64 / n as f64 + 0.5 * d).rem_euclid(1.0);
        let t_mid = chain.t0 + (k as f64 + 0.5) * dt;
        momenta.push(spec.lagrangian(t_mid, x_mid, v)?.p_star);
    }
    let points = (0..=steps)
        .map(|k| {
            let p = momenta[k.min(steps - 1)];
            PhasePoint::new(idx[k] as f64 / n as f64, p)
        })
        .collect();
    Ok(Trajectory { t0: chain.t0, dt, points })
}

/// Precomputed per-chain data: window half-width and the velocity part of
/// the action for each displacement in the stencil.
struct Kernel {
    w: isize,
    kin: Vec<f64>,
}

impl Kernel {
    fn build(spec: &HamiltonianSpec, cfg: &LaxOleinikConfig) -> Result<Self> {
        let w = cfg.window_cells() as isize;
        let n = cfg.n as f64;
        let dt = cfg.dt();
        let mut kin = Vec::with_capacity(2 * w as usize + 1);
        for delta in -w..=w {
            // Same rounding path as step_action: d exact (dyadic), then d/dt.
            let d = delta as f64 / n;
            kin.push(velocity_action(spec, cfg.c, dt, d / dt)?);
        }
        Ok(Self { w, kin })
    }

    fn advance(
        &self,
        spec: &HamiltonianSpec,
        cfg: &LaxOleinikConfig,
        prev: &[f64],
        t: f64,
    ) -> LaxStep {
        let n = cfg.n as isize;
        let dt = cfg.dt();
        let t_mid = t + 0.5 * dt;
        // Potential sampled once per layer on the half grid; entry r is
        // dt·V(t_mid, r/2n), the exact midpoint of every (from, to) pair.
        let two_n = 2 * cfg.n;
        let pot: Vec<f64> =
            (0..two_n).map(|r| dt * spec.potential(t_mid, r as f64 / two_n as f64)).collect();

        let w = self.w;
        let mut u_next = vec![0.0; cfg.n];
        let mut argmin = vec![0usize; cfg.n];
        let mut boundary = 0usize;
        for i in 0..n {
            let mut best = f64::INFINITY;
            let mut best_abs = isize::MAX;
            let mut best_j = 0isize;
            let mut best_delta = 0isize;
            for delta in -w..=w {
                let mut j = i - delta;
                if j < 0 {
                    j += n;
                } else if j >= n {
                    j -= n;
                }
                let mut r = 2 * i - delta;
                if r < 0 {
                    r += 2 * n;
                } else if r >= 2 * n {
                    r -= 2 * n;
                }
                let a = self.kin[(delta + w) as usize] - pot[r as usize];
                let cand = prev[j as usize] + a;
                let abs = delta.abs();
                if cand < best
                    || (cand == best && (abs < best_abs || (abs == best_abs && j < best_j)))
                {
                    best = cand;
                    best_abs = abs;
                    best_j = j;
                    best_delta = delta;
                }
            }
            u_next[i as usize] = best;
            argmin[i as usize] = best_j as usize;
            if best_delta.abs() == w {
                boundary += 1;
            }
        }
        LaxStep { u_next: GridFunction::from_values(u_next), argmin, boundary_hits: boundary }
    }
}
