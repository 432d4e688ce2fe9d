use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::chain::ChainFamily;
use crate::error::{Error, Result};
use crate::models::{build_family, curie_weiss_chain, load_chain_file, CurieWeissParams, Transform};
use crate::optimizer::{BoundSource, StepSize};
use crate::space::{CoordinateSubset, Partition};
use crate::weights::SimplexWeights;

/// A TOML experiment description.
///
/// ```toml
/// partition = [[1, 2], [3, 5], [4]]
///
/// [model]
/// name = "curie-weiss"
/// d = 5
/// temperature = 10.0
/// h_field = 1.0
///
/// [family]
/// transforms = ["power:1", "power:2", "power:4", "power:8", "power:16"]
///
/// [algorithm]
/// iterations = 300
/// bound = "initial"
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Covering partition for the subgradient run and evaluation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<Vec<Vec<usize>>>,
    /// Ground partition `V` for the two-layer run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ground: Option<Vec<Vec<usize>>>,
    #[serde(default)]
    pub seed: u64,
    pub model: ModelSpec,
    #[serde(default)]
    pub family: FamilySpec,
    #[serde(default)]
    pub algorithm: AlgorithmParams,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModelSpec {
    CurieWeiss {
        d: usize,
        temperature: f64,
        h_field: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        state_cap: Option<usize>,
    },
    /// Without transforms, every matrix in the file is a member; with
    /// transforms, they apply to `base` (default: the first matrix).
    File {
        path: PathBuf,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        base: Option<String>,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    #[serde(default)]
    pub transforms: Vec<Transform>,
}

/// `"auto"`, `"rigorous"`, `"initial"` or a number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Setting {
    Number(f64),
    Word(String),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmParams {
    /// Subgradient iterations `t`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    /// Inner steps `K` of the two-layer run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inner_iterations: Option<usize>,
    /// Cardinality limit `l`; defaults to `|supp V|`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limit: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<Setting>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<Setting>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<Vec<f64>>,
    /// Weights for `evaluate`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub json: Option<PathBuf>,
}

pub const DEFAULT_ITERATIONS: usize = 300;
pub const DEFAULT_INNER_ITERATIONS: usize = 30;

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Relative model paths are resolved against the config file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        let mut cfg = Self::from_toml(&text)?;
        if let ModelSpec::File { path: model, .. } = &mut cfg.model {
            if model.is_relative() {
                if let Some(dir) = path.parent() {
                    *model = dir.join(&*model);
                }
            }
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn build_family(&self) -> Result<ChainFamily> {
        match &self.model {
            ModelSpec::CurieWeiss {
                d,
                temperature,
                h_field,
                state_cap,
            } => {
                let mut params = CurieWeissParams::new(*d, *temperature, *h_field);
                if let Some(cap) = state_cap {
                    params.state_cap = *cap;
                }
                let (p, _) = curie_weiss_chain(&params)?;
                let transforms = if self.family.transforms.is_empty() {
                    vec![Transform::Power(1)]
                } else {
                    self.family.transforms.clone()
                };
                build_family(&p, &transforms)
            }
            ModelSpec::File { path, base } => {
                let file = load_chain_file(path)?;
                if self.family.transforms.is_empty() {
                    return file.family();
                }
                let p = match base {
                    Some(name) => file
                        .get(name)
                        .ok_or_else(|| Error::Config(format!("no matrix named '{name}' in {}", path.display())))?,
                    None => &file.matrices[0].1,
                };
                build_family(p, &self.family.transforms)
            }
        }
    }

    fn blocks(lists: &[Vec<usize>]) -> Result<Vec<CoordinateSubset>> {
        lists.iter().map(|b| CoordinateSubset::new(b.iter().copied())).collect()
    }

    pub fn partition(&self) -> Result<Partition> {
        let lists = self
            .partition
            .as_ref()
            .ok_or_else(|| Error::Config("missing 'partition'".into()))?;
        Partition::new(Self::blocks(lists)?)
    }

    pub fn ground(&self) -> Result<Partition> {
        let lists = self.ground.as_ref().ok_or_else(|| Error::Config("missing 'ground'".into()))?;
        Partition::new(Self::blocks(lists)?)
    }

    pub fn step(&self) -> Result<StepSize> {
        match &self.algorithm.step {
            None => Ok(StepSize::Auto),
            Some(Setting::Word(w)) if w == "auto" => Ok(StepSize::Auto),
            Some(Setting::Number(x)) if *x > 0.0 && x.is_finite() => Ok(StepSize::Fixed(*x)),
            Some(other) => Err(Error::Config(format!("step {other:?}: expected \"auto\" or a positive number"))),
        }
    }

    /// Defaults to `"rigorous"` for subgradient runs and `"initial"` for
    /// two-layer runs.
    pub fn bound(&self, default: BoundSource) -> Result<BoundSource> {
        match &self.algorithm.bound {
            None => Ok(default),
            Some(Setting::Word(w)) if w == "rigorous" => Ok(BoundSource::Rigorous),
            Some(Setting::Word(w)) if w == "initial" => Ok(BoundSource::Initial),
            Some(Setting::Number(x)) if *x > 0.0 && x.is_finite() => Ok(BoundSource::Fixed(*x)),
            Some(other) => Err(Error::Config(format!(
                "bound {other:?}: expected \"rigorous\", \"initial\" or a positive number"
            ))),
        }
    }

    pub fn initial(&self) -> Result<Option<SimplexWeights>> {
        self.algorithm.initial.clone().map(SimplexWeights::new).transpose()
    }

    pub fn weights(&self) -> Result<SimplexWeights> {
        let w = self
            .algorithm
            .weights
            .clone()
            .ok_or_else(|| Error::Config("missing 'algorithm.weights'".into()))?;
        SimplexWeights::new(w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const PRESET: &str = r#"
partition = [[1, 2], [3, 5], [4]]

[model]
name = "curie-weiss"
d = 5
temperature = 10.0
h_field = 1.0

[family]
transforms = ["power:1", "power:2", "lazy:0.5"]

[algorithm]
iterations = 10
bound = "initial"
step = 0.1
"#;

    #[test]
    fn parses_and_round_trips() {
        let cfg = ExperimentConfig::from_toml(PRESET).unwrap();
        assert_eq!(cfg.partition().unwrap().len(), 3);
        assert_eq!(cfg.family.transforms[2], Transform::Lazy(0.5));
        assert_eq!(cfg.bound(BoundSource::Rigorous).unwrap(), BoundSource::Initial);
        assert_eq!(cfg.step().unwrap(), StepSize::Fixed(0.1));
        assert_eq!(ExperimentConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
        assert_eq!(cfg.build_family().unwrap().len(), 3);
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(matches!(ExperimentConfig::from_toml("[model]\nname = \"ising\""), Err(Error::Config(_))));
        let mut cfg = ExperimentConfig::from_toml(PRESET).unwrap();
        cfg.algorithm.bound = Some(Setting::Word("huge".into()));
        assert!(cfg.bound(BoundSource::Rigorous).is_err());
        cfg.algorithm.weights = Some(vec![0.5, 0.6]);
        assert!(cfg.weights().is_err());
        assert!(cfg.ground().is_err());
        assert!(matches!(ExperimentConfig::load("/nonexistent/x.toml"), Err(Error::Io { .. })));
    }
}
