//! Minimax factorization of Markov chain families on product state spaces.
//!
//! Given `pi`-stationary kernels `P_1, ..., P_n` on `X = X^(1) x ... x X^(d)`
//! and a partition of the coordinates, find the factorizable kernel that
//! minimizes the worst-case `pi`-weighted KL divergence to the family. The
//! problem is solved through its dual over the simplex; see [`optimizer`].

mod error;

pub mod chain;
pub mod experiment;
pub mod info;
pub mod models;
pub mod optimizer;
pub mod partition;
pub mod random;
pub mod space;
pub mod weights;

pub use chain::{tensor_product, ChainFamily, Distribution, StochasticMatrix};
pub use error::{Error, Result};
pub use info::{DualObjectiveContext, ExtendedReal};
pub use partition::{GreedyContext, PartialTuple};
pub use space::{CoordinateSubset, Partition, ProductSpace};
pub use weights::SimplexWeights;
