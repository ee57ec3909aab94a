//! Time-periodic Hamiltonians H(t, x, p) on T*𝕋 and their flows.
//!
//! Two families are supported:
//!
//! * `SeparableForced`: H = p²/2 + V(t, x) with V a real trigonometric
//!   polynomial, 1-periodic in both t and x. Each mode contributes
//!   a·cos θ + b·sin θ with θ = 2π(k_x x + k_t t), so products like
//!   cos(2πx)cos(2πt) enter as pairs of travelling modes.
//! * `PureMomentum`: H = H(p), an even-degree convex polynomial. The
//!   x-independent case exercises the general Legendre solver.
//!
//! The Hamiltonian vector field is X = (∂_p H, −∂_x H); trajectories are
//! integrated with fixed-step classical Runge–Kutta, which is deterministic
//! and reversible to well below the tolerances used downstream.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::circle_diff;

pub const TAU: f64 = std::f64::consts::TAU;

/// Trajectories that leave |p| ≤ P_MAX are treated as blown up; on this
/// band the completeness guard |∂H/∂t| ≤ C(1 + H) is vacuous for the
/// trigonometric family, so hitting the bound signals bad data, not a
/// solver failure.
pub const P_MAX: f64 = 50.0;

const LEGENDRE_TOL: f64 = 1e-12;
const LEGENDRE_MAX_ITER: usize = 200;

/// One travelling Fourier mode of the potential:
/// a·cos(2π(k_x x + k_t t)) + b·sin(2π(k_x x + k_t t)).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialMode {
    pub k_x: i32,
    pub k_t: i32,
    #[serde(default)]
    pub amp_cos: f64,
    #[serde(default)]
    pub amp_sin: f64,
}

/// Trigonometric factor selector for building product potentials.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trig {
    Cos,
    Sin,
}

/// Parametric description of the Hamiltonian.
///
/// Constructors canonicalize mode lists (k_x ≥ 0, modes merged and sorted),
/// so structural equality compares the functions, not the bookkeeping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HamiltonianSpec {
    SeparableForced { potential_coeffs: Vec<PotentialMode> },
    PureMomentum { momentum_poly: Vec<f64> },
}

impl HamiltonianSpec {
    /// H = p²/2, V ≡ 0.
    pub fn free() -> Self {
        Self::SeparableForced { potential_coeffs: Vec::new() }
    }

    /// Canonicalizing constructor for the separable family.
    pub fn from_modes(modes: Vec<PotentialMode>) -> Self {
        Self::SeparableForced { potential_coeffs: canonicalize(modes) }
    }

    /// Autonomous pendulum-type potential V(x) = amp·cos(2πx).
    pub fn cosine_potential(amp: f64) -> Self {
        Self::from_modes(vec![PotentialMode { k_x: 1, k_t: 0, amp_cos: amp, amp_sin: 0.0 }])
    }

    /// Product potential amp·trig(2π k_x x)·trig(2π k_t t) expanded into
    /// travelling modes.
    pub fn separable_product(amp: f64, k_x: i32, x_trig: Trig, k_t: i32, t_trig: Trig) -> Self {
        let h = amp / 2.0;
        // Product-to-sum with a = 2π k_x x, b = 2π k_t t; the (a − b) term
        // is the mode (k_x, −k_t).
        let modes = match (x_trig, t_trig) {
            (Trig::Cos, Trig::Cos) => vec![(k_x, k_t, h, 0.0), (k_x, -k_t, h, 0.0)],
            (Trig::Sin, Trig::Sin) => vec![(k_x, -k_t, h, 0.0), (k_x, k_t, -h, 0.0)],
            (Trig::Sin, Trig::Cos) => vec![(k_x, k_t, 0.0, h), (k_x, -k_t, 0.0, h)],
            (Trig::Cos, Trig::Sin) => vec![(k_x, k_t, 0.0, h), (k_x, -k_t, 0.0, -h)],
        };
        Self::from_modes(
            modes
                .into_iter()
                .map(|(k_x, k_t, amp_cos, amp_sin)| PotentialMode { k_x, k_t, amp_cos, amp_sin })
                .collect(),
        )
    }

    /// Standard forced pendulum V(t, x) = amp·cos(2πx)·cos(2πt).
    pub fn forced_pendulum(amp: f64) -> Self {
        Self::separable_product(amp, 1, Trig::Cos, 1, Trig::Cos)
    }

    /// H(p) = Σ coeffs[k] p^k. Requires even degree ≥ 2, positive leading
    /// coefficient, and H'' ≥ 0 with H' strictly increasing on |p| ≤ P_MAX.
    pub fn pure_momentum(coeffs: Vec<f64>) -> Result<Self> {
        let spec = Self::PureMomentum { momentum_poly: coeffs };
        spec.validate()?;
        Ok(spec)
    }

    /// H(p) = p²/2 as a pure-momentum spec.
    pub fn quadratic_momentum() -> Self {
        Self::PureMomentum { momentum_poly: vec![0.0, 0.0, 0.5] }
    }

    /// Structural validation; deserialized specs should pass through this.
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::SeparableForced { potential_coeffs } => {
                for m in potential_coeffs {
                    if !(m.amp_cos.is_finite() && m.amp_sin.is_finite()) {
                        return Err(Error::InvalidSpec("non-finite mode amplitude".into()));
                    }
                }
                Ok(())
            }
            Self::PureMomentum { momentum_poly } => {
                let deg = momentum_poly.len().saturating_sub(1);
                if deg < 2 {
                    return Err(Error::InvalidSpec(
                        "momentum polynomial must have degree >= 2".into(),
                    ));
                }
                if deg % 2 != 0 {
                    return Err(Error::InvalidSpec(
                        "momentum polynomial must have even degree".into(),
                    ));
                }
                if !momentum_poly.iter().all(|a| a.is_finite()) {
                    return Err(Error::InvalidSpec("non-finite momentum coefficient".into()));
                }
                if *momentum_poly.last().unwrap() <= 0.0 {
                    return Err(Error::InvalidSpec(
                        "leading momentum coefficient must be positive".into(),
                    ));
                }
                // Convexity is checked on a sample of the evaluation band;
                // isolated flat points of H'' (e.g. p⁴/4 at p = 0) are fine
                // as long as H' stays strictly increasing.
                let samples = 2001;
                let mut prev_dp = f64::NEG_INFINITY;
                for i in 0..samples {
                    let p = -P_MAX + 2.0 * P_MAX * i as f64 / (samples - 1) as f64;
                    if poly_eval(momentum_poly, p, 2) < -1e-12 {
                        return Err(Error::InvalidSpec(format!("H''({p}) < 0")));
                    }
                    let dp = poly_eval(momentum_poly, p, 1);
                    if dp <= prev_dp {
                        return Err(Error::InvalidSpec("H' is not strictly increasing".into()));
                    }
                    prev_dp = dp;
                }
                Ok(())
            }
        }
    }

    /// Travelling modes of the potential (empty for pure-momentum specs).
    pub fn potential_modes(&self) -> &[PotentialMode] {
        match self {
            Self::SeparableForced { potential_coeffs } => potential_coeffs,
            Self::PureMomentum { .. } => &[],
        }
    }

    pub fn is_separable(&self) -> bool {
        matches!(self, Self::SeparableForced { .. })
    }

    /// V(t, x); zero for pure-momentum specs.
    pub fn potential(&self, t: f64, x: f64) -> f64 {
        match self {
            Self::SeparableForced { potential_coeffs } => potential_coeffs
                .iter()
                .map(|m| {
                    let th = TAU * (m.k_x as f64 * x + m.k_t as f64 * t);
                    m.amp_cos * th.cos() + m.amp_sin * th.sin()
                })
                .sum(),
            Self::PureMomentum { .. } => 0.0,
        }
    }

    /// ∂V/∂x(t, x), analytic.
    pub fn potential_dx(&self, t: f64, x: f64) -> f64 {
        match self {
            Self::SeparableForced { potential_coeffs } => potential_coeffs
                .iter()
                .map(|m| {
                    let th = TAU * (m.k_x as f64 * x + m.k_t as f64 * t);
                    TAU * m.k_x as f64 * (-m.amp_cos * th.sin() + m.amp_sin * th.cos())
                })
                .sum(),
            Self::PureMomentum { .. } => 0.0,
        }
    }

    /// H(t, x, p).
    pub fn hamiltonian(&self, t: f64, x: f64, p: f64) -> f64 {
        match self {
            Self::SeparableForced { .. } => 0.5 * p * p + self.potential(t, x),
            Self::PureMomentum { momentum_poly } => poly_eval(momentum_poly, p, 0),
        }
    }

    /// ∂H/∂p(t, x, p).
    pub fn dp_hamiltonian(&self, p: f64) -> f64 {
        match self {
            Self::SeparableForced { .. } => p,
            Self::PureMomentum { momentum_poly } => poly_eval(momentum_poly, p, 1),
        }
    }

    /// Hamiltonian vector field X = (∂_p H, −∂_x H) at (t, point).
    pub fn vector_field(&self, t: f64, point: &PhasePoint) -> (f64, f64) {
        (self.dp_hamiltonian(point.p()), -self.potential_dx(t, point.x()))
    }

    /// Legendre transform L(t, x, v) = sup_p [p v − H(t, x, p)] together
    /// with the maximizing momentum p* = ∂_v L.
    ///
    /// Separable specs use the closed form L = v²/2 − V, p* = v; the
    /// pure-momentum family solves H'(p) = v by safeguarded Newton.
    pub fn lagrangian(&self, t: f64, x: f64, v: f64) -> Result<Lagrangian> {
        match self {
            Self::SeparableForced { .. } => {
                Ok(Lagrangian { value: 0.5 * v * v - self.potential(t, x), p_star: v })
            }
            Self::PureMomentum { momentum_poly } => {
                let p = solve_dp_equals(momentum_poly, v)?;
                Ok(Lagrangian { value: p * v - poly_eval(momentum_poly, p, 0), p_star: p })
            }
        }
    }

    /// Integrates the flow of X from (t0, start) to t1 with fixed step dt
    /// (a shorter final step absorbs any remainder). t1 < t0 integrates
    /// backwards. Fails with [`Error::BlowUp`] if |p| leaves [−P_MAX, P_MAX].
    pub fn flow(&self, t0: f64, t1: f64, start: &PhasePoint, dt: f64) -> Result<Trajectory> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidConfig(format!("flow step dt = {dt} must be positive")));
        }
        let span = t1 - t0;
        let dir = if span < 0.0 { -1.0 } else { 1.0 };
        let n_full = (span.abs() / dt + 1e-12).floor() as usize;
        let mut points = Vec::with_capacity(n_full + 2);
        points.push(PhasePoint::new(start.x(), start.p()));

        let mut x = start.x();
        let mut p = start.p();
        let mut step = 0usize;
        loop {
            let t = t0 + dir * dt * step as f64;
            let remaining = (t1 - t) * dir;
            if remaining <= 1e-12 {
                break;
            }
            let h = dir * dt.min(remaining);
            (x, p) = self.rk4_step(t, x, p, h);
            if p.abs() > P_MAX {
                return Err(Error::BlowUp { t: t + h, p_abs: p.abs(), bound: P_MAX });
            }
            points.push(PhasePoint::new(x, p));
            step += 1;
        }
        Ok(Trajectory { t0, dt: dir * dt, points })
    }

    /// Phase-space map over one forcing period, φ = φ_{0,1}.
    pub fn time_one_map(&self, start: &PhasePoint, dt: f64) -> Result<PhasePoint> {
        Ok(*self.flow(0.0, 1.0, start, dt)?.points.last().unwrap())
    }

    fn rk4_step(&self, t: f64, x: f64, p: f64, h: f64) -> (f64, f64) {
        let f = |t: f64, x: f64, p: f64| (self.dp_hamiltonian(p), -self.potential_dx(t, x));
        let (k1x, k1p) = f(t, x, p);
        let (k2x, k2p) = f(t + 0.5 * h, x + 0.5 * h * k1x, p + 0.5 * h * k1p);
        let (k3x, k3p) = f(t + 0.5 * h, x + 0.5 * h * k2x, p + 0.5 * h * k2p);
        let (k4x, k4p) = f(t + h, x + h * k3x, p + h * k3p);
        (
            x + h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x),
            p + h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p),
        )
    }
}

/// Value and maximizer of the Legendre transform at one (t, x, v).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lagrangian {
    pub value: f64,
    /// p* = ∂_v L(t, x, v), the momentum dual to v.
    pub p_star: f64,
}

/// Point of T*𝕋 with the base coordinate reduced to [0, 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhasePoint {
    x: f64,
    p: f64,
}

impl PhasePoint {
    pub fn new(x: f64, p: f64) -> Self {
        let mut r = x.rem_euclid(1.0);
        // rem_euclid can round up to exactly 1.0 for tiny negative inputs.
        if r >= 1.0 {
            r = 0.0;
        }
        Self { x: r, p }
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Euclidean distance on the cylinder (circle metric in x).
    pub fn cylinder_distance(&self, other: &PhasePoint) -> f64 {
        let dx = circle_diff(self.x, other.x);
        let dp = self.p - other.p;
        (dx * dx + dp * dp).sqrt()
    }
}

/// Discrete trajectory; consecutive points are one integration step apart
/// (the final step may be fractional). `dt` is signed by direction.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub t0: f64,
    pub dt: f64,
    pub points: Vec<PhasePoint>,
}

impl Trajectory {
    pub fn end(&self) -> &PhasePoint {
        self.points.last().unwrap()
    }
}

/// Evaluates the d-th derivative of Σ c_k p^k by Horner's rule.
fn poly_eval(coeffs: &[f64], p: f64, d: usize) -> f64 {
    let mut acc = 0.0;
    for k in (d..coeffs.len()).rev() {
        let mut factor = 1.0;
        for j in 0..d {
            factor *= (k - j) as f64;
        }
        acc = acc * p + coeffs[k] * factor;
    }
    acc
}

/// Solves H'(p) = v by Newton iteration safeguarded with a sign-change
/// bracket; superlinearity guarantees the bracket exists.
fn solve_dp_equals(coeffs: &[f64], v: f64) -> Result<f64> {
    let g = |p: f64| poly_eval(coeffs, p, 1) - v;
    let mut a = -(1.0 + v.abs());
    let mut b = 1.0 + v.abs();
    let mut grow = 0;
    while g(a) > 0.0 || g(b) < 0.0 {
        a *= 2.0;
        b *= 2.0;
        grow += 1;
        if grow > 60 {
            return Err(Error::NoConvergence { iterations: grow, residual: g(0.0).abs() });
        }
    }
    let mut p = 0.5 * (a + b);
    for it in 0..LEGENDRE_MAX_ITER {
        let r = g(p);
        if r.abs() <= LEGENDRE_TOL {
            return Ok(p);
        }
        if r > 0.0 {
            b = p;
        } else {
            a = p;
        }
        let dg = poly_eval(coeffs, p, 2);
        let newton = p - r / dg;
        p = if dg > 0.0 && newton > a && newton < b { newton } else { 0.5 * (a + b) };
        if it == LEGENDRE_MAX_ITER - 1 {
            return Err(Error::NoConvergence { iterations: LEGENDRE_MAX_ITER, residual: r.abs() });
        }
    }
    unreachable!()
}

/// Canonical form: representative modes with k_x ≥ 0 (k_t ≥ 0 when k_x = 0),
/// merged, pruned, and sorted.
fn canonicalize(modes: Vec<PotentialMode>) -> Vec<PotentialMode> {
    let mut out: Vec<PotentialMode> = Vec::with_capacity(modes.len());
    for mut m in modes {
        if m.k_x < 0 || (m.k_x == 0 && m.k_t < 0) {
            // cos is even and sin odd under (k_x, k_t) → (−k_x, −k_t).
            m = PotentialMode { k_x: -m.k_x, k_t: -m.k_t, amp_cos: m.amp_cos, amp_sin: -m.amp_sin };
        }
        if m.k_x == 0 && m.k_t == 0 {
            m.amp_sin = 0.0;
        }
        match out.iter_mut().find(|o| o.k_x == m.k_x && o.k_t == m.k_t) {
            Some(o) => {
                o.amp_cos += m.amp_cos;
                o.amp_sin += m.amp_sin;
            }
            None => out.push(m),
        }
    }
    out.retain(|m| m.amp_cos.abs() > 1e-15 || m.amp_sin.abs() > 1e-15);
    out.sort_by_key(|m| (m.k_x, m.k_t));
    out
}
