//! Ranking functions, guessing functions and their moments, and the i.i.d.
//! guessing experiment evaluated exactly through type classes.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lorenz::same_slope;
use crate::measures::{DensityPair, FiniteDistribution, Order};
use crate::renyi::{log_sum_exp, renyi_divergence};

/// Default cap on the number of type classes enumerated for one block length.
pub const DEFAULT_CLASS_BUDGET: u128 = 2_000_000;

/// Largest support accepted by [`compare_ranking_vs_permutations`].
pub const MAX_PERMUTATION_ATOMS: usize = 7;

/// Moment exponent `ρ ∈ (−1, 0) ∪ (0, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct Rho(f64);

impl Rho {
    pub fn new(rho: f64) -> Result<Self> {
        if rho.is_finite() && rho > -1.0 && rho != 0.0 {
            Ok(Self(rho))
        } else {
            Err(Error::InvalidRho(rho))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// The matching order `α = 1/(1 + ρ)`.
    pub fn alpha(self) -> Order {
        Order::Finite(1.0 / (1.0 + self.0))
    }
}

/// One likelihood-ratio level of a ranking function.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Level {
    pub ratio: f64,
    pub q_mass: f64,
    /// Q-mass of this level and every higher one.
    pub cumulative: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankingProfile {
    /// Levels in descending ratio order.
    pub levels: Vec<Level>,
    /// `(label, r(label))` in the pair's atom order.
    pub ranks: Vec<(String, f64)>,
}

impl RankingProfile {
    pub fn guess_values(&self) -> GuessValues {
        GuessValues(self.ranks.iter().cloned().collect())
    }
}

/// Candidate guessing function, one value per atom label.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GuessValues(pub BTreeMap<String, f64>);

impl GuessValues {
    pub fn constant(labels: &[String], value: f64) -> Self {
        Self(labels.iter().map(|l| (l.clone(), value)).collect())
    }

    pub fn get(&self, label: &str) -> Option<f64> {
        self.0.get(label).copied()
    }
}

fn reject_singular(pair: &DensityPair) -> Result<()> {
    match pair.singular_set().first() {
        Some(label) => Err(Error::SingularReference(label.to_string())),
        None => Ok(()),
    }
}

/// `r(x) = Q({y : p/q(y) ≥ p/q(x)})`; tied atoms share the mass of their whole level.
pub fn ranking_function(pair: &DensityPair) -> Result<RankingProfile> {
    reject_singular(pair)?;
    let mut order: Vec<usize> = (0..pair.len()).collect();
    let atoms = pair.atoms();
    order.sort_by(|&a, &b| atoms[b].ratio().total_cmp(&atoms[a].ratio()));

    let mut levels: Vec<Level> = Vec::new();
    let mut level_of = vec![0usize; atoms.len()];
    for &i in &order {
        let ratio = atoms[i].ratio();
        match levels.last_mut() {
            Some(level) if same_slope(level.ratio, ratio) => level.q_mass += atoms[i].q,
            _ => levels.push(Level { ratio, q_mass: atoms[i].q, cumulative: 0.0 }),
        }
        level_of[i] = levels.len() - 1;
    }
    let mut acc = 0.0;
    for level in &mut levels {
        acc += level.q_mass;
        level.cumulative = acc.min(1.0);
    }
    let ranks = atoms
        .iter()
        .zip(&level_of)
        .map(|(a, &l)| (a.label.clone(), levels[l].cumulative))
        .collect();
    Ok(RankingProfile { levels, ranks })
}

/// Whether `Q({g ≤ t}) ≤ t` for every `t ∈ [0, 1]`.
///
/// `Q({g ≤ t})` only jumps at values of `g`, so checking `t = 0` and each
/// value of `g` inside `[0, 1]` suffices. A label of Q without a value makes
/// `g` undefined there and the check fails.
pub fn is_guessing_function(g: &GuessValues, q: &FiniteDistribution) -> bool {
    let mut cells = Vec::with_capacity(q.len());
    for (label, mass) in q.iter() {
        match g.get(label) {
            Some(v) if !v.is_nan() => cells.push((v, mass)),
            _ => return false,
        }
    }
    let mut ts: Vec<f64> = cells.iter().map(|c| c.0).filter(|t| (0.0..=1.0).contains(t)).collect();
    ts.push(0.0);
    ts.iter().all(|&t| {
        let mass: f64 = cells.iter().filter(|c| c.0 <= t).map(|c| c.1).sum();
        mass <= t + 1e-12
    })
}

/// `‖g‖_ρ = (Σ p(x) g(x)^ρ)^{1/ρ}` over atoms with `p > 0`.
pub fn moment(g: &GuessValues, pair: &DensityPair, rho: Rho) -> Result<f64> {
    let r = rho.value();
    let mut sum = 0.0;
    for atom in pair.atoms().iter().filter(|a| a.p > 0.0) {
        let v = g.get(&atom.label).ok_or_else(|| Error::MissingGuess(atom.label.clone()))?;
        if r < 0.0 && v == 0.0 {
            return Err(Error::ZeroGuess(atom.label.clone()));
        }
        sum += atom.p * v.powf(r);
    }
    Ok(sum.powf(1.0 / r))
}

/// The ranking-moment lower bound and its slack.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GuessingBound {
    /// `−ln ‖r‖_ρ`.
    pub neg_log_moment: f64,
    /// `D_α(P‖Q)` at `α = 1/(1+ρ)`.
    pub divergence: f64,
    pub gap: f64,
}

pub fn guessing_bound(pair: &DensityPair, rho: Rho) -> Result<GuessingBound> {
    let ranking = ranking_function(pair)?;
    let neg_log_moment = -moment(&ranking.guess_values(), pair, rho)?.ln();
    let divergence = renyi_divergence(pair, rho.alpha()).value;
    Ok(GuessingBound { neg_log_moment, divergence, gap: neg_log_moment - divergence })
}

/// One row of the i.i.d. experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IidRow {
    pub n: usize,
    /// `a_n / n` with `a_n = −ln ‖r‖_ρ` over the n-fold product pair.
    pub a_n_over_n: f64,
    /// `a_n − a_{n−1}`, with `a_0 = 0`.
    pub first_difference: f64,
    pub divergence: f64,
    /// `a_n/n − D_α`.
    pub gap: f64,
}

/// `C(n + k − 1, k − 1)`, saturating.
pub fn type_class_count(n: usize, k: usize) -> u128 {
    if k == 0 {
        return u128::from(n == 0);
    }
    let mut c: u128 = 1;
    for i in 1..k as u128 {
        c = match c.checked_mul(n as u128 + i) {
            Some(v) => v / i,
            None => return u128::MAX,
        };
    }
    c
}

/// Count vectors of length `k` summing to `n`, in lexicographic order.
fn compositions(n: usize, k: usize) -> Vec<Vec<u32>> {
    fn rec(rest: usize, slots: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if slots == 1 {
            cur.push(rest as u32);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for c in 0..=rest {
            cur.push(c as u32);
            rec(rest - c, slots - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

/// `a_n = −ln ‖r‖_ρ` for the `n`-fold product, by type-class aggregation.
///
/// All sequences with the same symbol counts share their P-mass, Q-mass and
/// likelihood ratio, so one class stands in for a multinomial number of
/// sequences. Classes with equal ratio form one ranking level.
fn iid_log_norm(symbols: &[(f64, f64)], n: usize, rho: f64, ln_fact: &[f64]) -> f64 {
    struct Class {
        log_count: f64,
        log_p: f64,
        log_q: f64,
        log_ratio: f64,
    }
    let mut classes: Vec<Class> = compositions(n, symbols.len())
        .into_iter()
        .map(|c| {
            let mut class = Class { log_count: ln_fact[n], log_p: 0.0, log_q: 0.0, log_ratio: 0.0 };
            for (&ci, &(p, q)) in c.iter().zip(symbols) {
                let ci_f = f64::from(ci);
                class.log_count -= ln_fact[ci as usize];
                class.log_p += ci_f * p.ln();
                class.log_q += ci_f * q.ln();
            }
            class.log_ratio = class.log_p - class.log_q;
            class
        })
        .collect();
    classes.sort_by(|a, b| b.log_ratio.total_cmp(&a.log_ratio));

    let mut terms = Vec::with_capacity(classes.len());
    let mut log_cumulative = f64::NEG_INFINITY;
    let mut start = 0;
    while start < classes.len() {
        let head = classes[start].log_ratio;
        let end = classes[start..]
            .iter()
            .position(|c| (c.log_ratio - head).abs() > 1e-9 * head.abs().max(1.0))
            .map_or(classes.len(), |off| start + off);
        let level = &classes[start..end];
        let level_q: Vec<f64> = level.iter().map(|c| c.log_count + c.log_q).collect();
        log_cumulative = log_sum_exp(&[log_cumulative, log_sum_exp(&level_q)]).min(0.0);
        terms.extend(level.iter().map(|c| c.log_count + c.log_p + rho * log_cumulative));
        start = end;
    }
    -log_sum_exp(&terms) / rho
}

/// Exact `a_n/n` for `n = 1..=n_max`, with the default class budget.
pub fn iid_experiment(pair: &DensityPair, rho: Rho, n_max: usize) -> Result<Vec<IidRow>> {
    iid_experiment_with_budget(pair, rho, n_max, DEFAULT_CLASS_BUDGET)
}

pub fn iid_experiment_with_budget(pair: &DensityPair, rho: Rho, n_max: usize, budget: u128) -> Result<Vec<IidRow>> {
    reject_singular(pair)?;
    // sequences containing a P-null symbol have ratio 0: they add nothing to
    // the moment and never raise the rank of a P-charged sequence
    let symbols: Vec<(f64, f64)> = pair.atoms().iter().filter(|a| a.p > 0.0).map(|a| (a.p, a.q)).collect();
    let needed = type_class_count(n_max, symbols.len());
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let mut ln_fact = vec![0.0; n_max + 1];
    for i in 1..=n_max {
        ln_fact[i] = ln_fact[i - 1] + (i as f64).ln();
    }
    let divergence = renyi_divergence(pair, rho.alpha()).value;
    let mut rows = Vec::with_capacity(n_max);
    let mut prev = 0.0;
    for n in 1..=n_max {
        let a_n = iid_log_norm(&symbols, n, rho.value(), &ln_fact);
        let a_n_over_n = a_n / n as f64;
        rows.push(IidRow { n, a_n_over_n, first_difference: a_n - prev, divergence, gap: a_n_over_n - divergence });
        prev = a_n;
    }
    Ok(rows)
}

/// Rows `n,a_n_over_n,first_difference,divergence,gap`, with a header line.
pub fn experiment_csv(rows: &[IidRow], precision: usize) -> String {
    let mut out = String::from("n,a_n_over_n,first_difference,divergence,gap\n");
    for r in rows {
        out.push_str(&format!(
            "{},{:.p$},{:.p$},{:.p$},{:.p$}\n",
            r.n,
            r.a_n_over_n,
            r.first_difference,
            r.divergence,
            r.gap,
            p = precision
        ));
    }
    out
}

/// Moments of the ranking function against every assignment of `{1/n, …, 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PermutationComparison {
    pub ranking_moment: f64,
    pub min: f64,
    pub max: f64,
    /// Whether all likelihood ratios are distinct, the case where the
    /// ranking function is itself one of the enumerated assignments.
    pub distinct_levels: bool,
}

fn for_each_permutation(items: &mut [usize], k: usize, f: &mut impl FnMut(&[usize])) {
    if k == items.len() {
        f(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        for_each_permutation(items, k + 1, f);
        items.swap(k, i);
    }
}

pub fn compare_ranking_vs_permutations(pair: &DensityPair, rho: Rho) -> Result<PermutationComparison> {
    reject_singular(pair)?;
    let n = pair.len();
    if n > MAX_PERMUTATION_ATOMS {
        return Err(Error::PermutationLimit(n));
    }
    let q0 = pair.atoms()[0].q;
    if pair.q().any(|q| (q - q0).abs() > 1e-12) {
        return Err(Error::NonUniformReference);
    }
    let ranking = ranking_function(pair)?;
    let ranking_moment = moment(&ranking.guess_values(), pair, rho)?;

    let p: Vec<f64> = pair.p().collect();
    let r = rho.value();
    let (mut min, mut max) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut perm: Vec<usize> = (0..n).collect();
    for_each_permutation(&mut perm, 0, &mut |perm| {
        // atom i receives guess value (perm[i] + 1)/n
        let s: f64 = p.iter().zip(perm).map(|(&pi, &k)| pi * ((k + 1) as f64 / n as f64).powf(r)).sum();
        let m = s.powf(1.0 / r);
        min = min.min(m);
        max = max.max(m);
    });
    Ok(PermutationComparison { ranking_moment, min, max, distinct_levels: ranking.levels.len() == n })
}
