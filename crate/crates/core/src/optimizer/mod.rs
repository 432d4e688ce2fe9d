//! Simplex projection, projected subgradient descent on `h`, the two-layer
//! subgradient/greedy scheme and equilibrium diagnostics.

pub mod diagnostics;
pub mod projection;
pub mod subgradient;
pub mod two_layer;

pub use diagnostics::{equilibrium_diagnostics, EquilibriumReport};
pub use projection::project_to_simplex;
pub use subgradient::{
    bound_at, estimate_b, run_projected_subgradient, subgradient_h, BoundSource, StepSize, SubgradientConfig,
    SubgradientTrace,
};
pub use two_layer::{run_two_layer, GreedyRound, GreedyTrace, TwoLayerConfig};
