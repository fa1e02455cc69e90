//! Lorenz curves of density pairs and the Markov ordering between them.
//!
//! The horizontal axis carries cumulative Q-mass and the vertical axis
//! cumulative P-mass, so segment slopes are likelihood ratios `p/q` in
//! ascending order. P-mass on the Q-singular set would be a vertical jump at
//! `u = 1`; it is stored as a scalar so that every slope stays finite.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{DensityPair, DivergenceResult, Order};
use crate::renyi::{log_sum_exp, nonneg, NEAR_ONE};

/// Slopes closer than this (relative to their magnitude) are one segment.
pub const SLOPE_TOL: f64 = 1e-12;

/// Height tolerance for curve comparisons.
pub const HEIGHT_TOL: f64 = 1e-12;

/// Segments narrower than this are dropped when building from vertices.
const WIDTH_EPS: f64 = 1e-15;

const SUM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    /// Q-mass covered by the segment.
    pub width: f64,
    /// Likelihood ratio on the segment.
    pub slope: f64,
}

/// Ratio equality up to [`SLOPE_TOL`], relative to the larger magnitude.
pub(crate) fn same_slope(a: f64, b: f64) -> bool {
    (a - b).abs() <= SLOPE_TOL * a.abs().max(b.abs()).max(1.0)
}

/// Canonical piecewise-linear convex curve plus the singular P-mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCurve")]
pub struct LorenzCurve {
    segments: Vec<Segment>,
    singular_p: f64,
}

#[derive(Deserialize)]
struct RawCurve {
    segments: Vec<Segment>,
    #[serde(default)]
    singular_p: f64,
}

impl TryFrom<RawCurve> for LorenzCurve {
    type Error = Error;

    fn try_from(raw: RawCurve) -> Result<Self> {
        LorenzCurve::new(raw.segments, raw.singular_p)
    }
}

/// Result of comparing two Lorenz curves drawn against the same reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum OrderingRelation {
    Equal,
    /// The first curve lies on or above the second: first ⪯ second.
    Less,
    Greater,
    Incomparable,
}

impl LorenzCurve {
    /// Validates segments given in nondecreasing slope order and canonicalises them.
    pub fn new(segments: Vec<Segment>, singular_p: f64) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidCurve("no segments".into()));
        }
        if !(0.0..=1.0).contains(&singular_p) {
            return Err(Error::InvalidCurve(format!("singular mass {singular_p} outside [0, 1]")));
        }
        for (i, s) in segments.iter().enumerate() {
            if !(s.width.is_finite() && s.width > 0.0 && s.width <= 1.0 + SUM_TOL) {
                return Err(Error::InvalidCurve(format!("segment {i} has width {}", s.width)));
            }
            if !(s.slope.is_finite() && s.slope >= 0.0) {
                return Err(Error::InvalidCurve(format!("segment {i} has slope {}", s.slope)));
            }
        }
        if let Some(i) = segments.windows(2).position(|w| w[1].slope < w[0].slope && !same_slope(w[0].slope, w[1].slope)) {
            return Err(Error::InvalidCurve(format!("slope decreases at segment {}", i + 1)));
        }
        let width: f64 = segments.iter().map(|s| s.width).sum();
        if (width - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidCurve(format!("widths sum to {width}")));
        }
        let mass: f64 = segments.iter().map(|s| s.width * s.slope).sum::<f64>() + singular_p;
        if (mass - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidCurve(format!("P-mass sums to {mass}")));
        }
        Ok(Self { segments: merge_segments(segments), singular_p: nonneg(singular_p) })
    }

    /// Curve through `(0, 0)` and the given vertices, ordered by `u`, ending at `u = 1`.
    ///
    /// Callers guarantee convexity up to rounding; slopes that dip below
    /// their predecessor by less than [`SLOPE_TOL`] are merged into it.
    pub(crate) fn from_vertices(vertices: &[(f64, f64)], singular_p: f64) -> Self {
        let mut segments = Vec::with_capacity(vertices.len());
        let (mut u0, mut h0) = (0.0, 0.0);
        for &(u, h) in vertices {
            let width = u - u0;
            if width <= WIDTH_EPS {
                continue;
            }
            segments.push(Segment { width, slope: ((h - h0) / width).max(0.0) });
            u0 = u;
            h0 = h;
        }
        Self { segments: merge_segments(segments), singular_p: nonneg(singular_p) }
    }

    /// The diagonal `L(u) = u`, the curve of `P = Q`.
    pub fn diagonal() -> Self {
        Self { segments: vec![Segment { width: 1.0, slope: 1.0 }], singular_p: 0.0 }
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn singular_p(&self) -> f64 {
        self.singular_p
    }

    /// Breakpoints `(u, L(u))` starting at `(0, 0)` and ending at `u = 1`.
    pub fn vertices(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(self.segments.len() + 1);
        let (mut u, mut h) = (0.0, 0.0);
        out.push((u, h));
        for s in &self.segments {
            u += s.width;
            h += s.width * s.slope;
            out.push((u, h));
        }
        // absorb width rounding so the last breakpoint is exactly u = 1
        if let Some(last) = out.last_mut() {
            last.0 = 1.0;
        }
        out
    }

    /// `L(u)` by segment accumulation.
    pub fn evaluate(&self, u: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::OutOfRange(u));
        }
        Ok(self.eval_unchecked(u))
    }

    pub(crate) fn eval_unchecked(&self, u: f64) -> f64 {
        let (mut u0, mut h0) = (0.0, 0.0);
        let last = self.segments.len() - 1;
        for (i, s) in self.segments.iter().enumerate() {
            if u <= u0 + s.width || i == last {
                return h0 + (u - u0).min(s.width) * s.slope;
            }
            u0 += s.width;
            h0 += s.width * s.slope;
        }
        h0
    }

    /// Upper bounding curve `F(u) = 1 − L(1 − u)`.
    pub fn evaluate_upper(&self, u: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::OutOfRange(u));
        }
        Ok(1.0 - self.eval_unchecked(1.0 - u))
    }

    /// Rows `u,L(u)` at every breakpoint, with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("u,L(u)\n");
        for (u, h) in self.vertices() {
            let _ = writeln!(out, "{u},{h}");
        }
        out
    }
}

fn merge_segments(segments: Vec<Segment>) -> Vec<Segment> {
    let mut out: Vec<Segment> = Vec::with_capacity(segments.len());
    for s in segments {
        match out.last_mut() {
            Some(prev) if s.slope <= prev.slope || same_slope(prev.slope, s.slope) => {
                let width = prev.width + s.width;
                let rise = prev.width * prev.slope + s.width * s.slope;
                *prev = Segment { width, slope: rise / width };
            }
            _ => out.push(s),
        }
    }
    out
}

/// Lorenz curve of a pair: atoms with `q > 0` sorted by ascending `p/q`.
pub fn build_curve(pair: &DensityPair) -> LorenzCurve {
    let mut cells: Vec<(f64, f64, f64)> = pair
        .atoms()
        .iter()
        .filter(|a| a.q > 0.0)
        .map(|a| (a.p / a.q, a.p, a.q))
        .collect();
    cells.sort_by(|a, b| a.0.total_cmp(&b.0));

    // merge tied ratios, keeping the exact Σp/Σq of each group
    let mut segments: Vec<Segment> = Vec::with_capacity(cells.len());
    let mut group: Option<(f64, f64, f64)> = None;
    for (ratio, p, q) in cells {
        group = match group {
            Some((r0, gp, gq)) if same_slope(r0, ratio) => Some((r0, gp + p, gq + q)),
            Some((_, gp, gq)) => {
                segments.push(Segment { width: gq, slope: gp / gq });
                Some((ratio, p, q))
            }
            None => Some((ratio, p, q)),
        };
    }
    if let Some((_, gp, gq)) = group {
        segments.push(Segment { width: gq, slope: gp / gq });
    }
    LorenzCurve { segments, singular_p: pair.singular_mass() }
}

/// Segments of the concave upper curve, in descending slope order.
pub fn upper_curve_slopes(curve: &LorenzCurve) -> Vec<Segment> {
    curve.segments.iter().rev().copied().collect()
}

/// Union of both curves' breakpoint abscissae, sorted.
pub(crate) fn merged_breakpoints(a: &LorenzCurve, b: &LorenzCurve) -> Vec<f64> {
    let mut us: Vec<f64> = a.vertices().into_iter().chain(b.vertices()).map(|(u, _)| u).collect();
    us.sort_by(f64::total_cmp);
    us.dedup_by(|x, y| (*x - *y).abs() <= WIDTH_EPS);
    us
}

/// Markov ordering of `a` relative to `b`.
///
/// Both curves are piecewise linear, so their difference is linear between
/// consecutive points of the merged breakpoint set; its sign everywhere on
/// `[0, 1]` is therefore decided by its sign at those points. The endpoint
/// `u = 1` carries `1 − singular_p`, the left limit of the curve there.
pub fn compare(a: &LorenzCurve, b: &LorenzCurve) -> OrderingRelation {
    let (mut above, mut below) = (false, false);
    for u in merged_breakpoints(a, b) {
        let diff = a.eval_unchecked(u) - b.eval_unchecked(u);
        if diff > HEIGHT_TOL {
            above = true;
        } else if diff < -HEIGHT_TOL {
            below = true;
        }
    }
    let singular = a.singular_p - b.singular_p;
    if singular > HEIGHT_TOL {
        below = true;
    } else if singular < -HEIGHT_TOL {
        above = true;
    }
    match (above, below) {
        (false, false) => OrderingRelation::Equal,
        (true, false) => OrderingRelation::Less,
        (false, true) => OrderingRelation::Greater,
        (true, true) => OrderingRelation::Incomparable,
    }
}

/// True iff the two pairs have the same Lorenz curve.
pub fn is_rearrangement(x: &DensityPair, y: &DensityPair) -> bool {
    compare(&build_curve(x), &build_curve(y)) == OrderingRelation::Equal
}

/// `D_α` computed from the curve's slopes: `(1/(α−1)) ln Σ width·slope^α`.
pub fn divergence_from_curve(curve: &LorenzCurve, alpha: Order) -> DivergenceResult {
    let singular = curve.singular_p > 0.0;
    let segs = &curve.segments;
    let value = match alpha {
        Order::Infinity => {
            if singular {
                f64::INFINITY
            } else {
                nonneg(segs.iter().map(|s| s.slope).fold(0.0, f64::max).ln())
            }
        }
        Order::Finite(a) if a == 0.0 => {
            let charged: f64 = segs.iter().filter(|s| s.slope > 0.0).map(|s| s.width).sum();
            nonneg(-charged.ln())
        }
        Order::Finite(a) if (a - 1.0).abs() < NEAR_ONE => {
            if singular {
                f64::INFINITY
            } else {
                nonneg(segs.iter().filter(|s| s.slope > 0.0).map(|s| s.width * s.slope * s.slope.ln()).sum())
            }
        }
        Order::Finite(a) => {
            if a > 1.0 && singular {
                f64::INFINITY
            } else {
                let factors: Vec<(f64, f64)> =
                    segs.iter().filter(|s| s.slope > 0.0).map(|s| (s.width.ln(), a * s.slope.ln())).collect();
                let log_sum = if factors.iter().any(|(x, y)| x.abs().max(y.abs()) > 500.0) {
                    log_sum_exp(&factors.iter().map(|(x, y)| x + y).collect::<Vec<_>>())
                } else {
                    segs.iter().map(|s| s.width * s.slope.powf(a)).sum::<f64>().ln()
                };
                nonneg(log_sum / (a - 1.0))
            }
        }
    };
    DivergenceResult { order: alpha, value }
}
