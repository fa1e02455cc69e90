//! Channels, partitions, and the data-processing and additivity machinery.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{atom_label, exponential_weights, product, Atom, DensityPair, DivergenceResult, Order};
use crate::renyi::renyi_divergence;

const ROW_TOL: f64 = 1e-9;

/// Default bound on the number of factors accepted by [`additivity_check`].
pub const MAX_FACTORS: usize = 6;

/// Row-stochastic matrix from labelled inputs to labelled outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawChannel")]
pub struct Channel {
    inputs: Vec<String>,
    outputs: Vec<String>,
    matrix: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
struct RawChannel {
    inputs: Vec<String>,
    outputs: Vec<String>,
    matrix: Vec<Vec<f64>>,
}

impl TryFrom<RawChannel> for Channel {
    type Error = Error;

    fn try_from(raw: RawChannel) -> Result<Self> {
        Channel::new(raw.inputs, raw.outputs, raw.matrix)
    }
}

fn unique(labels: &[String], what: &str) -> Result<()> {
    let mut seen = BTreeSet::new();
    for l in labels {
        if !seen.insert(l) {
            return Err(Error::InvalidChannel(format!("duplicate {what} label '{l}'")));
        }
    }
    Ok(())
}

impl Channel {
    pub fn new(inputs: Vec<String>, outputs: Vec<String>, matrix: Vec<Vec<f64>>) -> Result<Self> {
        unique(&inputs, "input")?;
        unique(&outputs, "output")?;
        if matrix.len() != inputs.len() {
            return Err(Error::DimensionMismatch { expected: inputs.len(), found: matrix.len() });
        }
        for (label, row) in inputs.iter().zip(&matrix) {
            if row.len() != outputs.len() {
                return Err(Error::DimensionMismatch { expected: outputs.len(), found: row.len() });
            }
            if let Some(&v) = row.iter().find(|v| !v.is_finite() || **v < 0.0) {
                return Err(Error::InvalidChannel(format!("row '{label}' has entry {v}")));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_TOL {
                return Err(Error::InvalidChannel(format!("row '{label}' sums to {sum}")));
            }
        }
        Ok(Self { inputs, outputs, matrix })
    }

    pub fn identity(labels: &[String]) -> Self {
        let n = labels.len();
        let matrix = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        Self { inputs: labels.to_vec(), outputs: labels.to_vec(), matrix }
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[String] {
        &self.outputs
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.matrix
    }

    /// Kernel of running `self` then `next`.
    pub fn compose(&self, next: &Channel) -> Result<Channel> {
        if self.outputs != next.inputs {
            return Err(Error::DimensionMismatch { expected: self.outputs.len(), found: next.inputs.len() });
        }
        let matrix = self
            .matrix
            .iter()
            .map(|row| {
                (0..next.outputs.len())
                    .map(|j| row.iter().zip(&next.matrix).map(|(a, r)| a * r[j]).sum())
                    .collect()
            })
            .collect();
        Ok(Channel { inputs: self.inputs.clone(), outputs: next.outputs.clone(), matrix })
    }

    /// Pushes a mass vector aligned with the inputs through the channel.
    pub fn push(&self, masses: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.outputs.len()];
        for (m, row) in masses.iter().zip(&self.matrix) {
            for (o, k) in out.iter_mut().zip(row) {
                *o += m * k;
            }
        }
        out
    }
}

/// Random channel on `inputs` with `n_outputs` outputs labelled `y0, y1, …`.
pub fn random_channel<R: Rng + ?Sized>(rng: &mut R, inputs: &[String], n_outputs: usize) -> Channel {
    Channel {
        inputs: inputs.to_vec(),
        outputs: (0..n_outputs).map(|i| atom_label(i, n_outputs).replacen('x', "y", 1)).collect(),
        matrix: inputs.iter().map(|_| exponential_weights(rng, n_outputs)).collect(),
    }
}

/// `(Pᵀ K, Qᵀ K)` over the channel's outputs.
///
/// Rows for input labels absent from the pair carry zero mass; pair atoms the
/// channel has no row for are an error.
pub fn apply(channel: &Channel, pair: &DensityPair) -> Result<DensityPair> {
    let rows: BTreeMap<&str, &Vec<f64>> =
        channel.inputs.iter().map(String::as_str).zip(&channel.matrix).collect();
    let mut p = vec![0.0; channel.outputs.len()];
    let mut q = vec![0.0; channel.outputs.len()];
    for atom in pair.atoms() {
        let row = rows.get(atom.label.as_str()).ok_or_else(|| {
            Error::InvalidChannel(format!("no row for atom '{}'", atom.label))
        })?;
        for (j, k) in row.iter().enumerate() {
            p[j] += atom.p * k;
            q[j] += atom.q * k;
        }
    }
    DensityPair::from_atoms(
        channel.outputs.iter().zip(p.into_iter().zip(q)).map(|(l, (p, q))| Atom::new(l.clone(), p, q)).collect(),
    )
}

/// Disjoint nonempty blocks of labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawPartition")]
pub struct Partition {
    blocks: Vec<Vec<String>>,
}

#[derive(Deserialize)]
struct RawPartition {
    blocks: Vec<Vec<String>>,
}

impl TryFrom<RawPartition> for Partition {
    type Error = Error;

    fn try_from(raw: RawPartition) -> Result<Self> {
        Partition::new(raw.blocks)
    }
}

impl Partition {
    pub fn new<S: Into<String>>(blocks: Vec<Vec<S>>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::with_capacity(blocks.len());
        for block in blocks {
            let mut block: Vec<String> = block.into_iter().map(Into::into).collect();
            if block.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            for l in &block {
                if !seen.insert(l.clone()) {
                    return Err(Error::InvalidPartition(format!("label '{l}' in two blocks")));
                }
            }
            block.sort();
            out.push(block);
        }
        Ok(Self { blocks: out })
    }

    /// One block per label.
    pub fn singletons(pair: &DensityPair) -> Self {
        Self { blocks: pair.atoms().iter().map(|a| vec![a.label.clone()]).collect() }
    }

    /// A single block holding every label.
    pub fn trivial(pair: &DensityPair) -> Self {
        Self { blocks: vec![pair.atoms().iter().map(|a| a.label.clone()).collect()] }
    }

    pub fn blocks(&self) -> &[Vec<String>] {
        &self.blocks
    }

    fn labels(&self) -> BTreeSet<&str> {
        self.blocks.iter().flatten().map(String::as_str).collect()
    }

    /// Whether every block of `self` sits inside a block of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> bool {
        let owner: BTreeMap<&str, usize> = coarser
            .blocks
            .iter()
            .enumerate()
            .flat_map(|(i, b)| b.iter().map(move |l| (l.as_str(), i)))
            .collect();
        self.labels() == coarser.labels()
            && self.blocks.iter().all(|b| {
                let first = owner.get(b[0].as_str());
                b.iter().all(|l| owner.get(l.as_str()) == first)
            })
    }

    /// Deterministic 0/1 channel sending each label to its block `a+b+…`.
    pub fn channel(&self) -> Channel {
        let outputs: Vec<String> = self.blocks.iter().map(|b| b.join("+")).collect();
        let mut inputs = Vec::new();
        let mut matrix = Vec::new();
        for (j, block) in self.blocks.iter().enumerate() {
            for label in block {
                inputs.push(label.clone());
                let mut row = vec![0.0; outputs.len()];
                row[j] = 1.0;
                matrix.push(row);
            }
        }
        Channel { inputs, outputs, matrix }
    }

    fn check_cover(&self, pair: &DensityPair) -> Result<()> {
        let support: BTreeSet<&str> = pair.atoms().iter().map(|a| a.label.as_str()).collect();
        let labels = self.labels();
        if let Some(l) = support.difference(&labels).next() {
            return Err(Error::InvalidPartition(format!("atom '{l}' not covered")));
        }
        if let Some(l) = labels.difference(&support).next() {
            return Err(Error::InvalidPartition(format!("label '{l}' not in the pair")));
        }
        Ok(())
    }
}

/// Restriction of the pair to the algebra generated by `partition`.
pub fn coarsen(pair: &DensityPair, partition: &Partition) -> Result<DensityPair> {
    partition.check_cover(pair)?;
    apply(&partition.channel(), pair)
}

/// Divergence after each partition of a refining chain.
pub fn partition_sweep(pair: &DensityPair, chain: &[Partition], alpha: Order) -> Result<Vec<DivergenceResult>> {
    for (i, w) in chain.windows(2).enumerate() {
        if !w[1].refines(&w[0]) {
            return Err(Error::NonRefiningChain(i + 1));
        }
    }
    chain.iter().map(|part| Ok(renyi_divergence(&coarsen(pair, part)?, alpha))).collect()
}

/// `(Σ D_α(P_i‖Q_i), D_α(∏P_i ‖ ∏Q_i))` for at most [`MAX_FACTORS`] pairs.
pub fn additivity_check(pairs: &[DensityPair], alpha: Order) -> Result<(f64, f64)> {
    additivity_check_bounded(pairs, alpha, MAX_FACTORS)
}

pub fn additivity_check_bounded(pairs: &[DensityPair], alpha: Order, bound: usize) -> Result<(f64, f64)> {
    let (first, rest) = pairs.split_first().ok_or(Error::EmptyList)?;
    if pairs.len() > bound {
        return Err(Error::TooManyFactors { count: pairs.len(), bound });
    }
    let sum = pairs.iter().map(|p| renyi_divergence(p, alpha).value).sum();
    let joint = rest.iter().fold(first.clone(), |acc, p| product(&acc, p));
    Ok((sum, renyi_divergence(&joint, alpha).value))
}
