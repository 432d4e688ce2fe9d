//! Config-driven experiment commands behind the `markov-minimax` binary.

pub mod cli;
pub mod commands;
pub mod config;

pub use commands::{evaluate, format_weights, run_subgradient, run_two_layer_cmd, validate, SummaryRow};
pub use config::{AlgorithmParams, ExperimentConfig, FamilySpec, ModelSpec, OutputSpec, Setting};
