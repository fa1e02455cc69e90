//! Rényi divergences between finite measure pairs, their Lorenz-curve
//! ordering, and guessing-moment bounds.

pub mod cli;
pub mod error;
pub mod guessing;
pub mod lattice;
pub mod lorenz;
pub mod measures;
pub mod properties;
pub mod renyi;
pub mod transforms;

pub use error::{Error, Result};
pub use lorenz::{LorenzCurve, OrderingRelation, Segment};
pub use measures::{Atom, DensityPair, DivergenceResult, FiniteDistribution, Order};
pub use transforms::{Channel, Partition};
