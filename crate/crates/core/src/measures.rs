//! Finite distributions, density pairs and the order type.
//!
//! The dominating measure is counting measure on the union of both supports,
//! so the densities of a pair are simply its atom masses. Atoms are kept in
//! label order; every downstream result inherits that canonical ordering.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Tolerance on `|Σ w − 1|` accepted at construction.
pub const NORMALIZATION_TOL: f64 = 1e-9;

fn check_mass(label: &str, value: f64) -> Result<()> {
    if !value.is_finite() || value < 0.0 {
        return Err(Error::InvalidWeight { label: label.to_string(), value });
    }
    Ok(())
}

fn check_sum(which: &'static str, sum: f64) -> Result<()> {
    if (sum - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::NotNormalized { which, sum });
    }
    Ok(())
}

/// A probability vector over labelled atoms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDistribution")]
pub struct FiniteDistribution {
    labels: Vec<String>,
    weights: Vec<f64>,
}

#[derive(Deserialize)]
struct RawDistribution {
    labels: Vec<String>,
    weights: Vec<f64>,
}

impl TryFrom<RawDistribution> for FiniteDistribution {
    type Error = Error;

    fn try_from(raw: RawDistribution) -> Result<Self> {
        FiniteDistribution::new(raw.labels, raw.weights)
    }
}

impl FiniteDistribution {
    /// Validates and stores the atoms sorted by label.
    pub fn new<S: Into<String>>(labels: Vec<S>, weights: Vec<f64>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.len() != weights.len() {
            return Err(Error::LengthMismatch { labels: labels.len(), weights: weights.len() });
        }
        if labels.is_empty() {
            return Err(Error::Empty);
        }
        let mut seen = BTreeSet::new();
        for (label, &w) in labels.iter().zip(&weights) {
            if !seen.insert(label.as_str()) {
                return Err(Error::DuplicateLabel(label.clone()));
            }
            check_mass(label, w)?;
        }
        check_sum("distribution", weights.iter().sum())?;

        let mut atoms: Vec<(String, f64)> = labels.into_iter().zip(weights).collect();
        atoms.sort_by(|a, b| a.0.cmp(&b.0));
        let (labels, weights) = atoms.into_iter().unzip();
        Ok(Self { labels, weights })
    }

    /// Weights labelled `x0, x1, …` in the given order.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        let n = weights.len();
        Self::new((0..n).map(|i| atom_label(i, n)).collect(), weights)
    }

    /// Uniform distribution on `n` atoms labelled `x0, x1, …`.
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Empty);
        }
        Self::from_weights(vec![1.0 / n as f64; n])
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn get(&self, label: &str) -> Option<f64> {
        self.labels
            .binary_search_by(|l| l.as_str().cmp(label))
            .ok()
            .map(|i| self.weights[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.labels.iter().map(String::as_str).zip(self.weights.iter().copied())
    }
}

/// Label for atom `i` of `n`, zero padded so lexical and numeric order agree.
pub fn atom_label(i: usize, n: usize) -> String {
    let width = n.saturating_sub(1).to_string().len();
    format!("x{i:0width$}")
}

/// One atom of a density pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub label: String,
    pub p: f64,
    pub q: f64,
}

impl Atom {
    pub fn new(label: impl Into<String>, p: f64, q: f64) -> Self {
        Self { label: label.into(), p, q }
    }

    /// Likelihood ratio `p/q`, `+∞` on the Q-singular part.
    pub fn ratio(&self) -> f64 {
        if self.q > 0.0 {
            self.p / self.q
        } else {
            f64::INFINITY
        }
    }

    pub fn is_singular(&self) -> bool {
        self.q == 0.0 && self.p > 0.0
    }
}

/// Two distributions `(P, Q)` on a shared finite support.
///
/// Atoms with `p = q = 0` are pruned at construction, so every atom carries
/// mass under at least one of the two measures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPair")]
pub struct DensityPair {
    atoms: Vec<Atom>,
}

#[derive(Deserialize)]
struct RawPair {
    atoms: Vec<Atom>,
}

impl TryFrom<RawPair> for DensityPair {
    type Error = Error;

    fn try_from(raw: RawPair) -> Result<Self> {
        DensityPair::from_atoms(raw.atoms)
    }
}

impl DensityPair {
    /// Validates masses and normalisation, prunes `(0, 0)` atoms, sorts by label.
    pub fn from_atoms(atoms: Vec<Atom>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for atom in &atoms {
            if !seen.insert(atom.label.as_str()) {
                return Err(Error::DuplicateLabel(atom.label.clone()));
            }
            check_mass(&atom.label, atom.p)?;
            check_mass(&atom.label, atom.q)?;
        }
        if atoms.is_empty() {
            return Err(Error::Empty);
        }
        check_sum("P", atoms.iter().map(|a| a.p).sum())?;
        check_sum("Q", atoms.iter().map(|a| a.q).sum())?;

        let mut atoms: Vec<Atom> =
            atoms.into_iter().filter(|a| a.p > 0.0 || a.q > 0.0).collect();
        atoms.sort_by(|a, b| a.label.cmp(&b.label));
        Ok(Self { atoms })
    }

    /// Atoms already known to be valid, labelled in sorted order.
    pub(crate) fn from_atoms_unchecked(atoms: Vec<Atom>) -> Self {
        debug_assert!(atoms.windows(2).all(|w| w[0].label < w[1].label));
        Self { atoms }
    }

    /// Pair from two aligned mass vectors labelled `x0, x1, …`.
    pub fn from_vectors(p: &[f64], q: &[f64]) -> Result<Self> {
        if p.len() != q.len() {
            return Err(Error::DimensionMismatch { expected: p.len(), found: q.len() });
        }
        let n = p.len();
        Self::from_atoms(
            p.iter().zip(q).enumerate().map(|(i, (&p, &q))| Atom::new(atom_label(i, n), p, q)).collect(),
        )
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn p(&self) -> impl Iterator<Item = f64> + '_ {
        self.atoms.iter().map(|a| a.p)
    }

    pub fn q(&self) -> impl Iterator<Item = f64> + '_ {
        self.atoms.iter().map(|a| a.q)
    }

    /// Labels of atoms with `p > 0` and `q = 0`.
    pub fn singular_set(&self) -> Vec<&str> {
        self.atoms.iter().filter(|a| a.is_singular()).map(|a| a.label.as_str()).collect()
    }

    pub fn has_singular(&self) -> bool {
        self.atoms.iter().any(Atom::is_singular)
    }

    /// P-mass on the Q-singular set.
    pub fn singular_mass(&self) -> f64 {
        self.atoms.iter().filter(|a| a.is_singular()).map(|a| a.p).sum()
    }

    /// The pair `(Q, P)`.
    pub fn swapped(&self) -> Self {
        Self {
            atoms: self.atoms.iter().map(|a| Atom::new(a.label.clone(), a.q, a.p)).collect(),
        }
    }

    pub fn p_distribution(&self) -> FiniteDistribution {
        FiniteDistribution {
            labels: self.atoms.iter().map(|a| a.label.clone()).collect(),
            weights: self.p().collect(),
        }
    }

    pub fn q_distribution(&self) -> FiniteDistribution {
        FiniteDistribution {
            labels: self.atoms.iter().map(|a| a.label.clone()).collect(),
            weights: self.q().collect(),
        }
    }
}

/// Pairs `p` and `q` on the union of their supports, zero filling missing atoms.
pub fn make_pair(p: &FiniteDistribution, q: &FiniteDistribution) -> Result<DensityPair> {
    let mut merged: BTreeMap<&str, (f64, f64)> = BTreeMap::new();
    for (label, w) in p.iter() {
        merged.entry(label).or_default().0 = w;
    }
    for (label, w) in q.iter() {
        merged.entry(label).or_default().1 = w;
    }
    DensityPair::from_atoms(merged.into_iter().map(|(l, (p, q))| Atom::new(l, p, q)).collect())
}

/// Product pair `(P_x × P_y, Q_x × Q_y)`; atom labels are `(a,b)`.
pub fn product(x: &DensityPair, y: &DensityPair) -> DensityPair {
    let mut atoms = Vec::with_capacity(x.len() * y.len());
    for a in x.atoms() {
        for b in y.atoms() {
            let (p, q) = (a.p * b.p, a.q * b.q);
            if p > 0.0 || q > 0.0 {
                atoms.push(Atom::new(format!("({},{})", a.label, b.label), p, q));
            }
        }
    }
    atoms.sort_by(|a, b| a.label.cmp(&b.label));
    DensityPair { atoms }
}

/// Normalised independent standard-exponential draws.
pub fn exponential_weights<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let draws: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = draws.iter().sum();
    draws.into_iter().map(|d| d / total).collect()
}

/// Full-support pair on `n_atoms` atoms, deterministic in `seed`.
pub fn random_pair(n_atoms: usize, seed: u64) -> Result<DensityPair> {
    if n_atoms == 0 {
        return Err(Error::ZeroAtoms);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(random_pair_with(&mut rng, n_atoms))
}

/// Full-support pair drawn from an existing generator.
pub fn random_pair_with<R: Rng + ?Sized>(rng: &mut R, n_atoms: usize) -> DensityPair {
    let p = exponential_weights(rng, n_atoms);
    let q = exponential_weights(rng, n_atoms);
    pair_unchecked(&p, &q)
}

/// Aligned vectors that are already normalised by construction.
pub(crate) fn pair_unchecked(p: &[f64], q: &[f64]) -> DensityPair {
    let n = p.len();
    DensityPair {
        atoms: p
            .iter()
            .zip(q)
            .enumerate()
            .filter(|(_, (&p, &q))| p > 0.0 || q > 0.0)
            .map(|(i, (&p, &q))| Atom::new(atom_label(i, n), p, q))
            .collect(),
    }
}

/// Order `α ∈ [0, ∞]` of a divergence.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub enum Order {
    Finite(f64),
    Infinity,
}

impl Order {
    /// Accepts any `α ≥ 0`; `f64::INFINITY` maps to [`Order::Infinity`].
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha == f64::INFINITY {
            Ok(Order::Infinity)
        } else if alpha.is_finite() && alpha >= 0.0 {
            Ok(Order::Finite(alpha))
        } else {
            Err(Error::InvalidOrder(alpha))
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Order::Finite(a) => a,
            Order::Infinity => f64::INFINITY,
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(a) => write!(f, "{a}"),
            Order::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for Order {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(Order::Infinity),
            other => {
                let a: f64 = other.parse().map_err(|_| Error::InvalidOrder(f64::NAN))?;
                Order::new(a)
            }
        }
    }
}

impl Serialize for Order {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Order::Finite(a) => s.serialize_f64(*a),
            Order::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Order {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(a) => Order::new(a),
            Repr::Str(s) => s.parse(),
        }
        .map_err(serde::de::Error::custom)
    }
}

/// Extended nonnegative divergence value in nats together with its order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergenceResult {
    pub order: Order,
    pub value: f64,
}

impl DivergenceResult {
    pub fn is_infinite(&self) -> bool {
        self.value == f64::INFINITY
    }
}

impl Serialize for DivergenceResult {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("DivergenceResult", 2)?;
        st.serialize_field("order", &self.order)?;
        if self.is_infinite() {
            st.serialize_field("value", "inf")?;
        } else {
            st.serialize_field("value", &self.value)?;
        }
        st.end()
    }
}
