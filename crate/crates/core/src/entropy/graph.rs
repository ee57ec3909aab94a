//! Multivalued graphs of functions with bounded one-sided slope, the
//! Hausdorff metric on their filled curves, and the characteristic
//! transport check Ḡ(E(y)) ⊂ φ(G(y)).
//!
//! Such a function is a continuous part plus a decreasing jump part; the
//! closed graph Ḡ keeps both limits f⁻ ≤ f⁺ at a jump and the filled
//! curve H(f) joins them with a vertical segment, winding once around
//! the circle.

use crate::error::Result;
use crate::grid::{circle_diff, fmt_g17, GridFunction};
use crate::hamiltonian::{HamiltonianSpec, PhasePoint};

/// Vertex of the filled polyline H(f). Consecutive vertices (cyclically)
/// are joined by segments; a vertical segment shows up as two vertices
/// sharing an x. `segment_id` numbers the continuous branches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilledVertex {
    pub x: f64,
    pub p: f64,
    pub segment_id: usize,
}

/// Closed graph data of a grid function: lower/upper limits per node and
/// the filled curve. Jumps only go downward (entropy shocks).
#[derive(Debug, Clone)]
pub struct GraphCurve {
    minus: Vec<(f64, f64)>,
    plus: Vec<(f64, f64)>,
    filled: Vec<FilledVertex>,
    jump_count: usize,
}

impl GraphCurve {
    /// (x, f⁻(x)) per node; f⁻ is the right limit.
    pub fn points_minus(&self) -> &[(f64, f64)] {
        &self.minus
    }

    /// (x, f⁺(x)) per node; f⁺ is the left limit.
    pub fn points_plus(&self) -> &[(f64, f64)] {
        &self.plus
    }

    pub fn filled(&self) -> &[FilledVertex] {
        &self.filled
    }

    pub fn jump_count(&self) -> usize {
        self.jump_count
    }

    pub fn has_jumps(&self) -> bool {
        self.jump_count > 0
    }

    /// One-sided limit points of the essential graph. A discrete shock
    /// can smear over several cells; a node strictly inside such a
    /// staircase carries a vertical-interior value, not a graph point,
    /// so its value is dropped and only the outer limits survive.
    pub fn essential_points(&self) -> Vec<(f64, f64)> {
        let n = self.minus.len();
        let jump = |i: usize| self.minus[i].1 != self.plus[i].1;
        let interior = |i: usize| jump(i) && jump((i + 1) % n);
        let mut pts = Vec::with_capacity(n + 2 * self.jump_count);
        for i in 0..n {
            if !interior(i) {
                pts.push(self.minus[i]);
            }
            if jump(i) && !interior((i + n - 1) % n) {
                pts.push(self.plus[i]);
            }
        }
        pts
    }

    /// Polyline export, one row per filled vertex: `x,p,segment_id`.
    pub fn write_csv<W: std::io::Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "x,p,segment_id")?;
        for v in &self.filled {
            writeln!(w, "{},{},{}", fmt_g17(v.x), fmt_g17(v.p), v.segment_id)?;
        }
        Ok(())
    }
}

/// Default shock detector scale: 5 cells of slope, with the slope floor 1
/// so nearly flat data does not flag noise as shocks.
pub fn jump_threshold(y: &GridFunction) -> f64 {
    let k_est = y.max_oneside_slope().max(1.0);
    5.0 * k_est / y.n() as f64
}

pub fn extract_graph(y: &GridFunction) -> GraphCurve {
    extract_graph_with_threshold(y, jump_threshold(y))
}

/// Node i is a jump when the drop from its left neighbour exceeds the
/// threshold; the vertical segment [f⁻, f⁺] then sits at node i.
pub fn extract_graph_with_threshold(y: &GridFunction, threshold: f64) -> GraphCurve {
    let n = y.n();
    let mut minus = Vec::with_capacity(n);
    let mut plus = Vec::with_capacity(n);
    let mut filled = Vec::with_capacity(n + 8);
    let mut segment = 0usize;
    let mut jump_count = 0usize;
    for i in 0..n {
        let x = y.node(i);
        let own = y.values()[i];
        let left = y.value(i as isize - 1);
        minus.push((x, own));
        if left - own > threshold {
            jump_count += 1;
            plus.push((x, left));
            filled.push(FilledVertex { x, p: left, segment_id: segment });
            segment += 1;
            filled.push(FilledVertex { x, p: own, segment_id: segment });
        } else {
            plus.push((x, own));
            filled.push(FilledVertex { x, p: own, segment_id: segment });
        }
    }
    GraphCurve { minus, plus, filled, jump_count }
}

/// Hausdorff distance between filled curves, on the cylinder (circle in
/// x, line in p). Vertices of one curve against full segments of the
/// other, maximized both ways.
pub fn hausdorff_distance(a: &GraphCurve, b: &GraphCurve) -> f64 {
    directed_hausdorff(a, b).max(directed_hausdorff(b, a))
}

fn directed_hausdorff(a: &GraphCurve, b: &GraphCurve) -> f64 {
    let mut worst = 0.0f64;
    for v in &a.filled {
        let mut best = f64::INFINITY;
        for k in 0..b.filled.len() {
            let s0 = &b.filled[k];
            let s1 = &b.filled[(k + 1) % b.filled.len()];
            best = best.min(point_segment_distance(v.x, v.p, s0.x, s0.p, s1.x, s1.p));
            if best == 0.0 {
                break;
            }
        }
        worst = worst.max(best);
    }
    worst
}

/// Euclidean distance from (px, pp) to the segment (ax, ap)–(bx, bp),
/// with segment x-coordinates unwrapped next to the point. Segments are
/// at most a cell wide, so the unwrap is unambiguous.
fn point_segment_distance(px: f64, pp: f64, ax: f64, ap: f64, bx: f64, bp: f64) -> f64 {
    let ax = circle_diff(ax, px);
    let bx = circle_diff(bx, px);
    let dx = bx - ax;
    let dp = bp - ap;
    let denom = dx * dx + dp * dp;
    let t = if denom > 0.0 { ((-ax) * dx + (pp - ap) * dp) / denom } else { 0.0 };
    let t = t.clamp(0.0, 1.0);
    let qx = ax + t * dx;
    let qp = ap + t * dp;
    (qx * qx + (pp - qp) * (pp - qp)).sqrt()
}

fn cylinder_point_distance(x0: f64, p0: f64, x1: f64, p1: f64) -> f64 {
    let dx = circle_diff(x0, x1);
    let dp = p0 - p1;
    (dx * dx + dp * dp).sqrt()
}

/// Inclusion defect of Ḡ(y_next) in the characteristic image of G(y)
/// over [t0, t1]: continuity nodes of G(y) are flowed as phase points and
/// the defect is the farthest any point of Ḡ(y_next) sits from that
/// image cloud. Vanishes with grid refinement when y_next is the entropy
/// image of y.
pub fn graph_inclusion_defect(
    spec: &HamiltonianSpec,
    y: &GridFunction,
    y_next: &GridFunction,
    t0: f64,
    t1: f64,
    dt_flow: f64,
) -> Result<f64> {
    let g = extract_graph(y);
    let mut images = Vec::with_capacity(y.n());
    for i in 0..y.n() {
        if g.minus[i].1 == g.plus[i].1 {
            let start = PhasePoint::new(g.minus[i].0, g.minus[i].1);
            let traj = spec.flow(t0, t1, &start, dt_flow)?;
            let end = traj.end();
            images.push((end.x(), end.p()));
        }
    }
    let target = extract_graph(y_next);
    let mut defect = 0.0f64;
    for (x, p) in target.essential_points() {
        let mut best = f64::INFINITY;
        for (ix, ip) in &images {
            best = best.min(cylinder_point_distance(x, p, *ix, *ip));
        }
        defect = defect.max(best);
    }
    Ok(defect)
}

/// The one-period inclusion check: y_next should be entropy_step(y);
/// the flow runs over [0, 1] with integrator step dt_flow.
pub fn graph_inclusion_check(
    spec: &HamiltonianSpec,
    y: &GridFunction,
    y_next: &GridFunction,
    dt_flow: f64,
) -> Result<f64> {
    graph_inclusion_defect(spec, y, y_next, 0.0, 1.0, dt_flow)
}
