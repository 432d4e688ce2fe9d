use serde::{Deserialize, Serialize};

use crate::chain::{Distribution, StochasticMatrix};
use crate::error::{Error, Result};
use crate::space::ProductSpace;

/// Default cap on `2^d`.
pub const DEFAULT_STATE_CAP: usize = 1 << 12;

/// Largest `max |H| / T` accepted before exponentiation.
pub const MAX_EXPONENT: f64 = 700.0;

/// Glauber dynamics for a Curie-Weiss type spin system on `{-1, +1}^d`
/// with pair interactions decaying as `2^-|i-j|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurieWeissParams {
    pub d: usize,
    pub temperature: f64,
    pub h_field: f64,
    #[serde(default = "default_cap")]
    pub state_cap: usize,
}

fn default_cap() -> usize {
    DEFAULT_STATE_CAP
}

impl CurieWeissParams {
    pub fn new(d: usize, temperature: f64, h_field: f64) -> Self {
        Self {
            d,
            temperature,
            h_field,
            state_cap: DEFAULT_STATE_CAP,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::InvalidParameter("d must be >= 1".into()));
        }
        if self.temperature <= 0.0 || !self.temperature.is_finite() {
            return Err(Error::InvalidParameter(format!("temperature {} must be positive", self.temperature)));
        }
        if !self.h_field.is_finite() {
            return Err(Error::InvalidParameter("field must be finite".into()));
        }
        let states = 1usize.checked_shl(self.d as u32).filter(|_| self.d < usize::BITS as usize);
        match states {
            Some(s) if s <= self.state_cap => Ok(()),
            _ => Err(Error::StateSpaceTooLarge {
                states: states.unwrap_or(usize::MAX),
                cap: self.state_cap,
            }),
        }
    }

    /// `H(x) = -sum_i sum_j 2^-|j-i| x_i x_j - h sum_i x_i`, diagonal terms
    /// included; bit 0 encodes spin -1.
    pub fn hamiltonian(&self, space: &ProductSpace, index: usize) -> f64 {
        let spins: Vec<f64> = (1..=self.d)
            .map(|c| if space.value_at(index, c) == 1 { 1.0 } else { -1.0 })
            .collect();
        let mut pair = 0.0;
        for (i, si) in spins.iter().enumerate() {
            for (j, sj) in spins.iter().enumerate() {
                pair += si * sj / 2f64.powi(i.abs_diff(j) as i32);
            }
        }
        -pair - self.h_field * spins.iter().sum::<f64>()
    }
}

/// The Glauber kernel and its Gibbs law `pi ~ exp(-H / T)`.
///
/// Each step proposes one of the `d` coordinates uniformly and flips it with
/// probability `exp(-(H(y) - H(x))_+ / T)`.
pub fn curie_weiss_chain(params: &CurieWeissParams) -> Result<(StochasticMatrix, Distribution)> {
    params.validate()?;
    let space = ProductSpace::binary(params.d)?;
    let n = space.size();
    let t = params.temperature;
    let energy: Vec<f64> = (0..n).map(|x| params.hamiltonian(&space, x)).collect();
    let ratio = energy.iter().fold(0.0f64, |m, e| m.max(e.abs())) / t;
    if ratio > MAX_EXPONENT {
        return Err(Error::TemperatureTooLow { ratio });
    }

    let logw: Vec<f64> = energy.iter().map(|e| -e / t).collect();
    let top = logw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let log_z = top + logw.iter().map(|l| (l - top).exp()).sum::<f64>().ln();
    let pi = Distribution::new(space.clone(), logw.iter().map(|l| (l - log_z).exp()).collect())?;

    let mut entries = vec![0.0; n * n];
    let dinv = 1.0 / params.d as f64;
    for x in 0..n {
        let mut off = 0.0;
        for bit in 0..params.d {
            let y = x ^ (1 << bit);
            let p = dinv * (-(energy[y] - energy[x]).max(0.0) / t).exp();
            entries[x * n + y] = p;
            off += p;
        }
        entries[x * n + x] = 1.0 - off;
    }
    let p = StochasticMatrix::new(space, entries)?.with_stationary(pi.clone())?;
    Ok((p, pi))
}
