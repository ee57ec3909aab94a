//! Uniform periodic grids on the circle 𝕋 = ℝ/ℤ.
//!
//! A [`GridFunction`] stores samples f(i/n) of a 1-periodic function at the
//! n equispaced nodes x_i = i/n. All quadrature is the uniform Riemann sum
//! Σ f_i / n (compensated), which is exact for trigonometric polynomials of
//! degree < n, and the discrete primitive
//!
//!   U(y)(x_k) = Σ_{i<k} (y_i − ȳ)/n,     ȳ = mean of y,
//!
//! is an exact periodic inverse of the staggered forward difference
//! (u_{i+1} − u_i)·n. That exactness is what lets conservation-form
//! evolution preserve means to rounding instead of to truncation order.

use std::io::{self, Write};

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// Compensated (Kahan) sum; error is O(ε Σ|x|) independently of length.
fn kahan_sum<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let mut sum = 0.0;
    let mut carry = 0.0;
    for x in xs {
        let y = x - carry;
        let t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    sum
}

/// Samples of a 1-periodic function at the nodes i/n, n a power of two.
///
/// Indexing is modulo n throughout, so neighbour access never branches on
/// the seam at x = 0 ≡ 1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridFunction {
    values: Vec<f64>,
}

impl GridFunction {
    /// Wraps raw node values. The length must be a power of two (≥ 2) so
    /// refinement studies can halve and double without resampling.
    pub fn from_values(values: Vec<f64>) -> Self {
        assert!(
            values.len() >= 2 && values.len().is_power_of_two(),
            "grid size must be a power of two >= 2, got {}",
            values.len()
        );
        Self { values }
    }

    /// Constant function.
    pub fn constant(n: usize, value: f64) -> Self {
        Self::from_values(vec![value; n])
    }

    /// Samples `f` at the n grid nodes.
    pub fn sample(n: usize, f: impl Fn(f64) -> f64) -> Self {
        Self::from_values((0..n).map(|i| f(i as f64 / n as f64)).collect())
    }

    /// Random real trigonometric polynomial with the given mean: modes
    /// 1..=max_mode with coefficients drawn uniformly from ±amp/k, so the
    /// samples are smooth (spectrally decaying) and reproducible from the
    /// caller's RNG.
    pub fn random_trig(n: usize, mean: f64, max_mode: usize, amp: f64, rng: &mut impl Rng) -> Self {
        let coeffs: Vec<(f64, f64)> = (1..=max_mode)
            .map(|k| {
                let scale = amp / k as f64;
                (rng.gen_range(-scale..scale), rng.gen_range(-scale..scale))
            })
            .collect();
        Self::sample(n, |x| {
            let mut y = mean;
            for (k, (a, b)) in coeffs.iter().enumerate() {
                let th = std::f64::consts::TAU * (k + 1) as f64 * x;
                y += a * th.cos() + b * th.sin();
            }
            y
        })
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Node value with modulo-n index wrap.
    pub fn value(&self, i: isize) -> f64 {
        let n = self.values.len() as isize;
        self.values[i.rem_euclid(n) as usize]
    }

    /// Position of node i.
    pub fn node(&self, i: usize) -> f64 {
        i as f64 / self.values.len() as f64
    }

    /// Average Σ f_i / n; the discrete invariant of conservation form.
    pub fn mean(&self) -> f64 {
        // Constant grids return the constant itself, so that mean-driven
        // identities (primitive of a constant, drift of a flat state) hold
        // bit-exactly.
        let first = self.values[0];
        if self.values.iter().all(|v| *v == first) {
            return first;
        }
        kahan_sum(self.values.iter().copied()) / self.values.len() as f64
    }

    /// L¹(𝕋) distance Σ |f_i − g_i| / n.
    pub fn l1_distance(&self, other: &Self) -> Result<f64> {
        if self.n() != other.n() {
            return Err(Error::SizeMismatch { left: self.n(), right: other.n() });
        }
        Ok(kahan_sum(self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()))
            / self.n() as f64)
    }

    /// Sup-norm distance max |f_i − g_i|.
    pub fn linf_distance(&self, other: &Self) -> Result<f64> {
        if self.n() != other.n() {
            return Err(Error::SizeMismatch { left: self.n(), right: other.n() });
        }
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// Mean-free primitive u(x_k) = Σ_{i<k} (y_i − ȳ)/n with u(0) = 0.
    ///
    /// Subtracting the mean first makes the cumulative sum return to zero
    /// after a full turn, so u is an honest function on the circle.
    pub fn primitive(&self) -> GridFunction {
        let n = self.values.len();
        let m = self.mean();
        let mut u = Vec::with_capacity(n);
        let mut acc = 0.0;
        let mut carry = 0.0;
        for i in 0..n {
            u.push(acc);
            // Kahan-compensated running sum of (y_i − ȳ)/n.
            let x = (self.values[i] - m) / n as f64 - carry;
            let t = acc + x;
            carry = (t - acc) - x;
            acc = t;
        }
        GridFunction::from_values(u)
    }

    /// Staggered forward difference (u_{i+1} − u_i)·n, cyclic in i.
    ///
    /// Exact discrete inverse of [`GridFunction::primitive`]: applying it to
    /// primitive(y) recovers y − mean(y) to rounding.
    pub fn staggered_derivative(&self) -> GridFunction {
        let n = self.values.len();
        let d = (0..n).map(|i| (self.values[(i + 1) % n] - self.values[i]) * n as f64).collect();
        GridFunction::from_values(d)
    }

    /// max_i (f_{i+1} − f_i)·n, the discrete one-sided (Oleinik) slope.
    pub fn max_oneside_slope(&self) -> f64 {
        let n = self.values.len();
        (0..n)
            .map(|i| (self.values[(i + 1) % n] - self.values[i]) * n as f64)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Applies `f` to every node value.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> GridFunction {
        GridFunction::from_values(self.values.iter().map(|v| f(*v)).collect())
    }

    /// Writes `x,value` rows (header included, 17 significant digits, LF).
    pub fn write_csv<W: Write>(&self, w: &mut W) -> io::Result<()> {
        writeln!(w, "x,value")?;
        for (i, v) in self.values.iter().enumerate() {
            writeln!(w, "{},{}", fmt_g17(self.node(i)), fmt_g17(*v))?;
        }
        Ok(())
    }
}

/// Formats with 17 significant digits, enough to round-trip any f64.
pub fn fmt_g17(x: f64) -> String {
    format!("{:.16e}", x)
}

/// Signed representative of a − b on the circle, in (−1/2, 1/2].
pub fn circle_diff(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    if d > 0.5 {
        d - 1.0
    } else {
        d
    }
}

/// Distance on the circle ℝ/ℤ.
pub fn circle_dist(a: f64, b: f64) -> f64 {
    circle_diff(a, b).abs()
}
