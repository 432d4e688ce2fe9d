use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::info::{weighted_sum, DualObjectiveContext};
use crate::weights::SimplexWeights;

/// Game-theoretic diagnostics of a weight vector against `Q*(w)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumReport {
    pub weights: SimplexWeights,
    pub dual_value: f64,
    /// `D(P_i || Q*(w))`, `+inf` on support violations.
    pub divergences: Vec<f64>,
    pub max_divergence: f64,
    /// `w_i (max_j D_j - D_i)`.
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    /// `max_i D_i - dual_value`.
    pub gap: f64,
}

pub fn equilibrium_diagnostics(ctx: &DualObjectiveContext, w: &SimplexWeights) -> Result<EquilibriumReport> {
    let d = ctx.member_divergences(w)?;
    let dual_value = weighted_sum(&d, w).to_f64();
    let divergences: Vec<f64> = d.iter().map(|v| v.to_f64()).collect();
    let max_divergence = divergences.iter().cloned().fold(0.0, f64::max);
    let residuals: Vec<f64> = divergences
        .iter()
        .zip(w.iter())
        .map(|(&di, wi)| if wi == 0.0 || di == max_divergence { 0.0 } else { wi * (max_divergence - di) })
        .collect();
    let max_residual = residuals.iter().cloned().fold(0.0, f64::max);
    Ok(EquilibriumReport {
        weights: w.clone(),
        dual_value,
        gap: max_divergence - dual_value,
        divergences,
        max_divergence,
        residuals,
        max_residual,
    })
}
