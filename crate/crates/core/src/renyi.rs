//! The Rényi divergence family and its relatives.
//!
//! All values are in nats. `+∞` is an ordinary result; no operation returns NaN.
//! Orders 1 and ∞ use their closed forms, never a numerical limit.

use crate::error::{Error, Result};
use crate::measures::{DensityPair, DivergenceResult, Order};

/// Orders within this distance of 1 are evaluated as KL divergence.
pub const NEAR_ONE: f64 = 1e-9;

/// Log-terms beyond this magnitude switch power sums to max-shifted summation.
const LOG_RANGE: f64 = 500.0;

/// `ln Σ exp(xs)` with max shift; `-∞` for an empty input.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// `ln Σ p^α q^{1−α}` over atoms with `p > 0` and `q > 0`, for finite `α > 0`.
///
/// Atoms with `p = 0` contribute nothing, and neither do Q-singular atoms
/// (their term is `0` for `α < 1`; for `α > 1` callers must handle them first).
pub(crate) fn log_power_sum(pair: &DensityPair, alpha: f64) -> f64 {
    let factors: Vec<(f64, f64)> = pair
        .atoms()
        .iter()
        .filter(|a| a.p > 0.0 && a.q > 0.0)
        .map(|a| (alpha * a.p.ln(), (1.0 - alpha) * a.q.ln()))
        .collect();
    // either factor alone can overflow or underflow even when the product is tame
    if factors.iter().any(|(x, y)| x.abs().max(y.abs()) > LOG_RANGE) {
        let logs: Vec<f64> = factors.iter().map(|(x, y)| x + y).collect();
        return log_sum_exp(&logs);
    }
    pair.atoms()
        .iter()
        .filter(|a| a.p > 0.0 && a.q > 0.0)
        .map(|a| a.p.powf(alpha) * a.q.powf(1.0 - alpha))
        .sum::<f64>()
        .ln()
}

/// Clamps rounding below zero, including `-0.0`, to `0.0`.
pub(crate) fn nonneg(v: f64) -> f64 {
    if v <= 0.0 {
        0.0
    } else {
        v
    }
}

/// Kullback–Leibler divergence `Σ p ln(p/q)` with `0 ln(0/x) = 0` and `x ln(x/0) = ∞`.
pub fn kl(pair: &DensityPair) -> f64 {
    if pair.has_singular() {
        return f64::INFINITY;
    }
    nonneg(
        pair.atoms()
            .iter()
            .filter(|a| a.p > 0.0)
            .map(|a| a.p * (a.p.ln() - a.q.ln()))
            .sum(),
    )
}

fn renyi_value(pair: &DensityPair, alpha: Order) -> f64 {
    match alpha {
        Order::Infinity => {
            if pair.has_singular() {
                return f64::INFINITY;
            }
            let max = pair
                .atoms()
                .iter()
                .filter(|a| a.p > 0.0)
                .map(|a| a.p.ln() - a.q.ln())
                .fold(f64::NEG_INFINITY, f64::max);
            nonneg(max)
        }
        Order::Finite(a) if a == 0.0 => {
            let mass: f64 = pair.atoms().iter().filter(|x| x.p > 0.0).map(|x| x.q).sum();
            // Q(p > 0) = 0 gives -ln 0 = +∞
            nonneg(-mass.ln())
        }
        Order::Finite(a) if (a - 1.0).abs() < NEAR_ONE => kl(pair),
        Order::Finite(a) => {
            if a > 1.0 && pair.has_singular() {
                return f64::INFINITY;
            }
            let log_sum = log_power_sum(pair, a);
            // for a < 1 an empty sum means mutually singular measures
            nonneg(log_sum / (a - 1.0))
        }
    }
}

/// Rényi divergence `D_α(P‖Q)` for any `α ∈ [0, ∞]`.
pub fn renyi_divergence(pair: &DensityPair, alpha: Order) -> DivergenceResult {
    DivergenceResult { order: alpha, value: renyi_value(pair, alpha) }
}

/// Power divergence `d_α = (Σ p^α q^{1−α} − 1)/(α − 1)` for finite `α > 0`, `α ≠ 1`.
pub fn power_divergence(pair: &DensityPair, alpha: Order) -> Result<f64> {
    let a = match alpha {
        Order::Finite(a) if a > 0.0 && a != 1.0 => a,
        other => return Err(Error::UnsupportedOrder(other.to_string())),
    };
    if a > 1.0 && pair.has_singular() {
        return Ok(f64::INFINITY);
    }
    let sum = log_power_sum(pair, a).exp();
    Ok(nonneg((sum - 1.0) / (a - 1.0)))
}

/// Maps `D_α` to the power divergence `d_α` (and `D_1` to itself).
pub fn power_from_renyi(divergence: f64, alpha: f64) -> f64 {
    if (alpha - 1.0).abs() < NEAR_ONE {
        return divergence;
    }
    if divergence == f64::INFINITY {
        return if alpha > 1.0 { f64::INFINITY } else { 1.0 / (1.0 - alpha) };
    }
    ((alpha - 1.0) * divergence).exp_m1() / (alpha - 1.0)
}

/// Squared Hellinger distance `Σ (√p − √q)²`, in `[0, 2]`.
pub fn hellinger_sq(pair: &DensityPair) -> f64 {
    let h: f64 = pair.atoms().iter().map(|a| (a.p.sqrt() - a.q.sqrt()).powi(2)).sum();
    h.clamp(0.0, 2.0)
}

/// `χ²(P, Q) = Σ_{q>0} (p − q)²/q`, `+∞` when P has Q-singular mass.
pub fn chi_sq(pair: &DensityPair) -> f64 {
    if pair.has_singular() {
        return f64::INFINITY;
    }
    pair.atoms().iter().map(|a| (a.p - a.q).powi(2) / a.q).sum()
}

/// Total variation `½ Σ |p − q|`, in `[0, 1]`.
pub fn total_variation(pair: &DensityPair) -> f64 {
    (0.5 * pair.atoms().iter().map(|a| (a.p - a.q).abs()).sum::<f64>()).clamp(0.0, 1.0)
}

/// Separation distance `s(P, Q) = max_x (1 − p/q)`.
///
/// Only defined when Q charges every atom that P charges.
pub fn separation_distance(pair: &DensityPair) -> Result<f64> {
    if let Some(label) = pair.singular_set().first() {
        return Err(Error::SingularReference(label.to_string()));
    }
    let s = pair
        .atoms()
        .iter()
        .map(|a| 1.0 - a.p / a.q)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(s.clamp(0.0, 1.0))
}

/// Divergences at each order of an ascending grid.
pub fn alpha_sweep(pair: &DensityPair, grid: &[Order]) -> Result<Vec<DivergenceResult>> {
    if let Some(i) = grid.windows(2).position(|w| w[0].value() > w[1].value()) {
        return Err(Error::UnsortedGrid(i + 1));
    }
    Ok(grid.iter().map(|&a| renyi_divergence(pair, a)).collect())
}
