//! Long-time behaviour: the effective Hamiltonian α(c), rotation number
//! ρ(c) = α′(c), the subharmonic period T(c), detection of the attracting
//! T-periodic limit state, and the jump-free/constant-distance mechanism
//! behind orbits whose graphs stay graphs.
//!
//! α is read off the linear escape rate of the value function (u + tα
//! stays bounded at exactly one α); ρ is measured two independent ways,
//! by integrating a weak characteristic ẋ = y(t, x) and by centered
//! finite differences of α. Their agreement is a cross-check of the
//! implementation, not an assumption.

use serde::Serialize;

use crate::entropy::{entropy_step, entropy_value_chain, extract_graph, hausdorff_distance};
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::hamiltonian::HamiltonianSpec;
use crate::lax_oleinik::{lax_oleinik_period, LaxOleinikConfig};

/// Escape-rate estimate of the effective Hamiltonian at one drive c.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AlphaEstimate {
    pub alpha: f64,
    /// Standard error of the fitted escape rate.
    pub stderr: f64,
}

/// α(c): iterate the variational operator from u ≡ 0 for `n_periods`
/// periods, record min_x u after each, and fit a line through the second
/// half of the series; α is the negated slope. The fit's standard error
/// must come in under `stderr_bound`.
pub fn estimate_alpha(
    spec: &HamiltonianSpec,
    cfg: &LaxOleinikConfig,
    c: f64,
    n_periods: usize,
    stderr_bound: f64,
) -> Result<AlphaEstimate> {
    if n_periods < 16 {
        return Err(Error::InvalidConfig(format!(
            "alpha regression needs >= 16 periods, got {n_periods}"
        )));
    }
    let cfg = cfg.with_c(c);
    let mut u = GridFunction::constant(cfg.n(), 0.0);
    let mut minima = Vec::with_capacity(n_periods);
    for _ in 0..n_periods {
        // The forcing has unit period, so every period starts at phase 0.
        let chain = lax_oleinik_period(spec, &cfg, &u, 0.0)?;
        u = chain.final_layer().clone();
        minima.push(u.min_value());
    }
    let start = n_periods / 2;
    let (slope, stderr) = fit_line(&minima[start..], start);
    if !(stderr <= stderr_bound) {
        return Err(Error::NotConverged { stderr, bound: stderr_bound });
    }
    Ok(AlphaEstimate { alpha: -slope, stderr })
}

/// Least-squares slope of points (offset + i, values[i]) and its
/// standard error.
fn fit_line(values: &[f64], offset: usize) -> (f64, f64) {
    let n = values.len();
    assert!(n >= 3);
    let xbar = offset as f64 + (n as f64 - 1.0) / 2.0;
    let ybar = values.iter().sum::<f64>() / n as f64;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (i, y) in values.iter().enumerate() {
        let dx = (offset + i) as f64 - xbar;
        sxx += dx * dx;
        sxy += dx * (y - ybar);
    }
    let slope = sxy / sxx;
    let mut ss_res = 0.0;
    for (i, y) in values.iter().enumerate() {
        let dx = (offset + i) as f64 - xbar;
        let r = (y - ybar) - slope * dx;
        ss_res += r * r;
    }
    let stderr = (ss_res / (n as f64 - 2.0) / sxx).sqrt();
    (slope, stderr)
}

/// Rotation numbers of weak characteristics ẋ = y(t, x) started at the
/// given positions, all riding one entropy orbit of y0 ≡ c. Explicit
/// Euler at the DP layer step; y is interpolated linearly between
/// half-node samples, which keeps ẋ inside [y⁻, y⁺] across a jump cell
/// (the Filippov selection).
///
/// The average drift is measured over the second half of the run; the
/// first half is the transient spent falling onto the attractor.
pub fn weak_rotation_numbers(
    spec: &HamiltonianSpec,
    cfg: &LaxOleinikConfig,
    c: f64,
    n_periods: usize,
    starts: &[f64],
) -> Result<Vec<f64>> {
    if n_periods < 32 {
        return Err(Error::InvalidConfig(format!(
            "rotation number needs >= 32 periods, got {n_periods}"
        )));
    }
    let dt = cfg.dt();
    let mut y = GridFunction::constant(cfg.n(), c);
    let mut xs: Vec<f64> = starts.to_vec();
    let mut disp = vec![0.0f64; starts.len()];
    let half = n_periods / 2;
    for period in 0..n_periods {
        let chain = entropy_value_chain(spec, cfg, &y, 0.0)?;
        for k in 0..cfg.m() {
            let layer = chain.y_layer(k);
            for (x, d) in xs.iter_mut().zip(disp.iter_mut()) {
                let v = interp_half_nodes(&layer, *x);
                let step = dt * v;
                *x = (*x + step).rem_euclid(1.0);
                if period >= half {
                    *d += step;
                }
            }
        }
        y = chain.y_layer(cfg.m());
    }
    let elapsed = (n_periods - half) as f64;
    Ok(disp.into_iter().map(|d| d / elapsed).collect())
}

/// Weak-characteristic rotation number from a single start at x = 0.
pub fn estimate_rho(
    spec: &HamiltonianSpec,
    cfg: &LaxOleinikConfig,
    c: f64,
    n_periods: usize,
) -> Result<f64> {
    Ok(weak_rotation_numbers(spec, cfg, c, n_periods, &[0.0])?[0])
}

/// Centered finite difference (α(c+h) − α(c−h)) / 2h; the independent
/// route to ρ(c).
pub fn rho_from_alpha_fd(
    spec: &HamiltonianSpec,
    cfg: &LaxOleinikConfig,
    c: f64,
    n_periods: usize,
    h: f64,
) -> Result<f64> {
    let plus = estimate_alpha(spec, cfg, c + h, n_periods, f64::INFINITY)?;
    let minus = estimate_alpha(spec, cfg, c - h, n_periods, f64::INFINITY)?;
    Ok((plus.alpha - minus.alpha) / (2.0 * h))
}

/// Smallest q ≤ q_max with |ρ − p/q| ≤ tol for p/q in lowest terms;
/// 1 when no rational of bounded denominator fits (the numerically
/// irrational convention).
pub fn rational_period(rho: f64, q_max: usize, tol: f64) -> usize {
    for q in 1..=q_max {
        let p = (rho * q as f64).round();
        let coprime = if p == 0.0 { q == 1 } else { gcd(p.abs() as u64, q as u64) == 1 };
        if coprime && (rho - p / q as f64).abs() <= tol {
            return q;
        }
    }
    1
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Linear interpolation of a layer whose sample i lives at (i + 1/2)/n.
fn interp_half_nodes(layer: &GridFunction, x: f64) -> f64 {
    let n = layer.n() as f64;
    let s = x * n - 0.5;
    let i = s.floor();
    let frac = s - i;
    let a = layer.value(i as isize);
    let b = layer.value(i as isize + 1);
    a + frac * (b - a)
}

/// Outcome of the limit-state search for one initial datum.
#[derive(Debug, Clone, Serialize)]
pub struct AsymptoticsReport {
    pub c: f64,
    pub alpha: f64,
    pub alpha_stderr: f64,
    pub rho: f64,
    /// Period predicted from ρ by rational approximation.
    pub t_of_c: usize,
    /// Smallest T ≤ 12 whose subsequence closed up within tol.
    pub detected_t: usize,
    /// ‖E^T(ω₀) − ω₀‖₁ for the declared limit cycle.
    pub residual: f64,
    /// Hausdorff distance between the graphs of successive limit
    /// snapshots one period apart.
    pub graph_residual: f64,
    /// The limit cycle: ω at the last detected_t integer phases.
    pub limit_snapshots: Vec<GridFunction>,
    /// (n, ‖y_{n+T} − y_n‖₁) for the detected T, all n.
    pub convergence_series: Vec<(usize, f64)>,
}

impl AsymptoticsReport {
    /// Largest increase along the convergence series; the L¹ contraction
    /// of E^T keeps this at grid-roundoff scale.
    pub fn contraction_violation(&self) -> f64 {
        self.convergence_series.windows(2).map(|w| w[1].1 - w[0].1).fold(0.0f64, f64::max)
    }
}

const T_CAP: usize = 12;
const SNAPSHOT_WINDOW: usize = 16;

/// Iterates the entropy operator from y0 for n_max periods and looks for
/// the smallest integer period T ≤ 12 along which the tail closes up in
/// L¹ within tol. On success the report carries the limit cycle, its
/// fixed-point residual, and the full distance series for the winning T.
pub fn detect_asymptotic_period(
    spec: &HamiltonianSpec,
    cfg: &LaxOleinikConfig,
    y0: &GridFunction,
    n_max: usize,
    tol: f64,
) -> Result<AsymptoticsReport> {
    if n_max < 32 {
        return Err(Error::InvalidConfig(format!(
            "period detection needs >= 32 periods, got {n_max}"
        )));
    }
    let mut window: Vec<GridFunction> = Vec::with_capacity(SNAPSHOT_WINDOW + 1);
    window.push(y0.clone());
    let mut series: Vec<Vec<(usize, f64)>> = vec![Vec::new(); T_CAP];
    let mut y = y0.clone();
    for k in 1..=n_max {
        y = entropy_step(spec, cfg, &y)?;
        window.push(y.clone());
        if window.len() > SNAPSHOT_WINDOW + 1 {
            window.remove(0);
        }
        for t in 1..=T_CAP.min(k).min(window.len() - 1) {
            let prev = &window[window.len() - 1 - t];
            series[t - 1].push((k - t, y.l1_distance(prev)?));
        }
    }
    let mut best = (0usize, f64::INFINITY);
    let mut detected = None;
    for t in 1..=T_CAP {
        let last = series[t - 1].last().map(|e| e.1).unwrap_or(f64::INFINITY);
        if last < best.1 {
            best = (t, last);
        }
        if detected.is_none() && last <= tol {
            detected = Some(t);
        }
    }
    let Some(detected_t) = detected else {
        return Err(Error::NoPeriodDetected {
            n_max,
            t_max: T_CAP,
            best_t: best.0,
            best_distance: best.1,
        });
    };

    // window holds y_{n_max - W} ..= y_{n_max}; the cycle is the detected_t
    // iterates before the last, and the last closes it.
    let len = window.len();
    let limit_snapshots: Vec<GridFunction> = window[len - 1 - detected_t..len - 1].to_vec();
    let residual = series[detected_t - 1].last().unwrap().1;
    let graph_residual = hausdorff_distance(
        &extract_graph(&window[len - 1]),
        &extract_graph(&window[len - 1 - detected_t]),
    );

    let c = y0.mean();
    let alpha = estimate_alpha(spec, cfg, c, n_max.max(16), f64::INFINITY)?;
    let rho = estimate_rho(spec, cfg, c, n_max.max(32))?;
    let t_of_c = rational_period(rho, T_CAP, 2e-3);

    Ok(AsymptoticsReport {
        c,
        alpha: alpha.alpha,
        alpha_stderr: alpha.stderr,
        rho,
        t_of_c,
        detected_t,
        residual,
        graph_residual,
        limit_snapshots,
        convergence_series: series.swap_remove(detected_t - 1),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CorollaryEntry {
    pub n: usize,
    pub jump_count: usize,
    /// L¹ distance to the final iterate.
    pub l1_to_final: f64,
    /// Hausdorff distance to the previous recorded graph.
    pub dh_prev: Option<f64>,
}

/// Diagnostics for the graphs-stay-graphs mechanism: if every iterate is
/// jump-free, the orbit distances to the final state must be constant
/// (the evolution restricted to graph states is an L¹ isometry).
#[derive(Debug, Clone, Serialize)]
pub struct CorollaryReport {
    pub entries: Vec<CorollaryEntry>,
    pub all_jump_free: bool,
    /// Spread of l1_to_final over the non-final entries.
    pub distance_spread: f64,
    pub distances_constant: bool,
    /// The conditional claim itself: jump-free ⇒ constant distances.
    pub mechanism_consistent: bool,
}

pub fn corollary_check(
    spec: &HamiltonianSpec,
    cfg: &LaxOleinikConfig,
    y0: &GridFunction,
    n_list: &[usize],
    tol: f64,
) -> Result<CorollaryReport> {
    let mut wanted: Vec<usize> = n_list.to_vec();
    wanted.sort_unstable();
    wanted.dedup();
    let n_max = *wanted.last().unwrap_or(&0);
    let mut recorded: Vec<(usize, GridFunction)> = Vec::new();
    let mut y = y0.clone();
    if wanted.first() == Some(&0) {
        recorded.push((0, y.clone()));
    }
    for k in 1..=n_max {
        y = entropy_step(spec, cfg, &y)?;
        if wanted.binary_search(&k).is_ok() {
            recorded.push((k, y.clone()));
        }
    }
    let z = &y;
    let mut entries = Vec::with_capacity(recorded.len());
    let mut prev_graph: Option<crate::entropy::GraphCurve> = None;
    for (n, state) in &recorded {
        let graph = extract_graph(state);
        let dh_prev = prev_graph.as_ref().map(|g| hausdorff_distance(g, &graph));
        entries.push(CorollaryEntry {
            n: *n,
            jump_count: graph.jump_count(),
            l1_to_final: state.l1_distance(z)?,
            dh_prev,
        });
        prev_graph = Some(graph);
    }
    let all_jump_free = entries.iter().all(|e| e.jump_count == 0);
    let non_final: Vec<f64> =
        entries.iter().filter(|e| e.n != n_max).map(|e| e.l1_to_final).collect();
    let distance_spread = if non_final.len() < 2 {
        0.0
    } else {
        non_final.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            - non_final.iter().cloned().fold(f64::INFINITY, f64::min)
    };
    let distances_constant = distance_spread <= tol;
    Ok(CorollaryReport {
        entries,
        all_jump_free,
        distance_spread,
        distances_constant,
        mechanism_consistent: !all_jump_free || distances_constant,
    })
}
