//! Meet and join of Lorenz curves, representatives of curve classes, and
//! Markov-operator synthesis for uniform reference measures.
//!
//! A higher curve is a smaller element: the meet is the pointwise maximum of
//! the two curves and the join is the convex envelope of their pointwise
//! minimum.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lorenz::{merged_breakpoints, LorenzCurve, HEIGHT_TOL};
use crate::measures::{atom_label, exponential_weights, Atom, DensityPair, FiniteDistribution};
use crate::transforms::Channel;

/// Coordinate differences below this are treated as settled by the T-transform chain.
const SETTLE_TOL: f64 = 1e-14;

/// Breakpoints of both curves plus every crossing strictly between them,
/// each with the heights of `a` and `b`.
fn sample_with_crossings(a: &LorenzCurve, b: &LorenzCurve) -> Vec<(f64, f64, f64)> {
    let us = merged_breakpoints(a, b);
    let mut out = Vec::with_capacity(2 * us.len());
    let mut prev: Option<(f64, f64, f64)> = None;
    for u in us {
        let cur = (u, a.eval_unchecked(u), b.eval_unchecked(u));
        if let Some((u0, a0, b0)) = prev {
            let (d0, d1) = (a0 - b0, cur.1 - cur.2);
            if (d0 > HEIGHT_TOL && d1 < -HEIGHT_TOL) || (d0 < -HEIGHT_TOL && d1 > HEIGHT_TOL) {
                let x = u0 + (u - u0) * d0 / (d0 - d1);
                out.push((x, a.eval_unchecked(x), b.eval_unchecked(x)));
            }
        }
        out.push(cur);
        prev = Some(cur);
    }
    out
}

/// Greatest lower bound: the pointwise maximum of the two curves.
pub fn meet(a: &LorenzCurve, b: &LorenzCurve) -> LorenzCurve {
    let vertices: Vec<(f64, f64)> =
        sample_with_crossings(a, b).into_iter().skip(1).map(|(u, ha, hb)| (u, ha.max(hb))).collect();
    LorenzCurve::from_vertices(&vertices, a.singular_p().min(b.singular_p()))
}

/// Least upper bound: lower convex envelope of the pointwise minimum.
pub fn join(a: &LorenzCurve, b: &LorenzCurve) -> LorenzCurve {
    let points: Vec<(f64, f64)> =
        sample_with_crossings(a, b).into_iter().map(|(u, ha, hb)| (u, ha.min(hb))).collect();
    let hull = lower_hull(&points);
    LorenzCurve::from_vertices(&hull[1..], a.singular_p().max(b.singular_p()))
}

/// Monotone-chain lower hull of points sorted by abscissa; collinear points are dropped.
pub fn lower_hull(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(points.len());
    for &p in points {
        while hull.len() >= 2 {
            let (o, a) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (a.0 - o.0) * (p.1 - o.1) - (a.1 - o.1) * (p.0 - o.0);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull
}

/// A pair whose Lorenz curve is `curve`: one atom per segment, plus one
/// Q-null atom for the singular mass.
pub fn representative(curve: &LorenzCurve) -> DensityPair {
    let n = curve.segments().len() + usize::from(curve.singular_p() > 0.0);
    let mut atoms: Vec<Atom> = curve
        .segments()
        .iter()
        .enumerate()
        .map(|(i, s)| Atom::new(atom_label(i, n), s.width * s.slope, s.width))
        .collect();
    if curve.singular_p() > 0.0 {
        atoms.push(Atom::new(atom_label(n - 1, n), curve.singular_p(), 0.0));
    }
    DensityPair::from_atoms_unchecked(atoms)
}

/// A pair against the uniform distribution on `n` atoms whose Lorenz curve is
/// `curve`; every breakpoint must lie on the `1/n` grid.
pub fn representative_on_grid(curve: &LorenzCurve, n: usize) -> Result<DensityPair> {
    if n == 0 {
        return Err(Error::ZeroAtoms);
    }
    let total = n + usize::from(curve.singular_p() > 0.0);
    let mut atoms = Vec::with_capacity(total);
    for s in curve.segments() {
        let cells = s.width * n as f64;
        let k = cells.round();
        if (cells - k).abs() > 1e-9 || k < 1.0 {
            return Err(Error::NotRealizable(n));
        }
        for _ in 0..k as usize {
            let i = atoms.len();
            atoms.push(Atom::new(atom_label(i, total), s.slope / n as f64, 1.0 / n as f64));
        }
    }
    if atoms.len() != n {
        return Err(Error::NotRealizable(n));
    }
    if curve.singular_p() > 0.0 {
        atoms.push(Atom::new(atom_label(n, total), curve.singular_p(), 0.0));
    }
    DensityPair::from_atoms(atoms)
}

/// `x ↦ (1−t)x + t·x∘(i j)`: mixes coordinates `i` and `j` with weight `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TTransform {
    pub i: usize,
    pub j: usize,
    pub t: f64,
}

fn sorted_desc(v: &[f64]) -> (Vec<usize>, Vec<f64>) {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[b].total_cmp(&v[a]).then(a.cmp(&b)));
    let vals = idx.iter().map(|&i| v[i]).collect();
    (idx, vals)
}

/// Whether `p2` majorizes `p1` (both probability vectors of equal length).
pub fn majorizes(p2: &[f64], p1: &[f64]) -> bool {
    if p2.len() != p1.len() {
        return false;
    }
    let (_, x) = sorted_desc(p2);
    let (_, y) = sorted_desc(p1);
    let (mut sx, mut sy) = (0.0, 0.0);
    for (a, b) in x.iter().zip(&y) {
        sx += a;
        sy += b;
        if sx < sy - 1e-12 {
            return false;
        }
    }
    true
}

/// T-transforms carrying the decreasing rearrangement of `p2` to that of `p1`.
///
/// Each step takes the largest index `j` still above its target and the
/// first index `k > j` below its target, then moves `min` of the two gaps
/// from `j` to `k`; every step settles at least one coordinate, so at most
/// `n − 1` steps are needed.
pub fn t_transform_chain(p2: &[f64], p1: &[f64]) -> Result<Vec<TTransform>> {
    if p2.len() != p1.len() {
        return Err(Error::DimensionMismatch { expected: p2.len(), found: p1.len() });
    }
    if !majorizes(p2, p1) {
        return Err(Error::NotMajorized);
    }
    let (_, mut z) = sorted_desc(p2);
    let (_, y) = sorted_desc(p1);
    let n = z.len();
    let mut steps = Vec::new();
    while steps.len() < n {
        let Some(j) = (0..n).rev().find(|&j| z[j] > y[j] + SETTLE_TOL) else { break };
        let Some(k) = (j + 1..n).find(|&k| z[k] < y[k] - SETTLE_TOL) else { break };
        let (over, under) = (z[j] - y[j], y[k] - z[k]);
        let delta = over.min(under);
        steps.push(TTransform { i: j, j: k, t: delta / (z[j] - z[k]) });
        if over <= under {
            z[j] = y[j];
            z[k] += delta;
        } else {
            z[j] -= delta;
            z[k] = y[k];
        }
    }
    Ok(steps)
}

/// Doubly stochastic channel mapping `p2` to `p1` while fixing the uniform measure.
///
/// The returned channel acts on row vectors, so `apply` sends `(p2, U)` to
/// `(p1, U)`; equivalently its transpose `M` satisfies `M·p2 = p1`.
pub fn construct_markov_operator(p2: &FiniteDistribution, p1: &FiniteDistribution) -> Result<Channel> {
    if p2.labels() != p1.labels() {
        return Err(Error::LabelMismatch);
    }
    let steps = t_transform_chain(p2.weights(), p1.weights())?;
    let n = p2.len();

    // A acts on column vectors in sorted coordinates.
    let mut a: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect()).collect();
    for s in &steps {
        let (ri, rj) = (a[s.i].clone(), a[s.j].clone());
        for c in 0..n {
            a[s.i][c] = (1.0 - s.t) * ri[c] + s.t * rj[c];
            a[s.j][c] = (1.0 - s.t) * rj[c] + s.t * ri[c];
        }
    }
    let (from, _) = sorted_desc(p2.weights());
    let (to, _) = sorted_desc(p1.weights());
    // M[to[r]][from[c]] = A[r][c]; the channel stores Mᵀ.
    let mut k = vec![vec![0.0; n]; n];
    for r in 0..n {
        for c in 0..n {
            k[from[c]][to[r]] = a[r][c];
        }
    }
    Channel::new(p2.labels().to_vec(), p1.labels().to_vec(), k)
}

/// Random `(p2, p1)` with `p2` majorizing `p1`: `p1` is `p2` pushed through
/// a product of random T-transforms.
pub fn random_majorized_pair<R: Rng + ?Sized>(rng: &mut R, n: usize) -> (Vec<f64>, Vec<f64>) {
    let p2 = exponential_weights(rng, n);
    let mut p1 = p2.clone();
    if n >= 2 {
        for _ in 0..rng.random_range(1..=2 * n) {
            let i = rng.random_range(0..n);
            let j = (i + rng.random_range(1..n)) % n;
            let t: f64 = rng.random();
            let (a, b) = (p1[i], p1[j]);
            p1[i] = (1.0 - t) * a + t * b;
            p1[j] = (1.0 - t) * b + t * a;
        }
    }
    (p2, p1)
}
