use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::experiment::commands::{evaluate, run_subgradient, run_two_layer_cmd, validate};
use crate::experiment::config::{ExperimentConfig, ModelSpec, Setting};
use crate::models::Transform;
use crate::space::{CoordinateSubset, Partition};

#[derive(Debug, Parser)]
#[command(name = "markov-minimax", version, about = "Minimax factorization of Markov chain families")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Projected subgradient descent on h over the simplex.
    RunSubgradient(ExperimentArgs),
    /// Joint partition/weight optimization by subgradient and distorted greedy steps.
    RunTwoLayer(ExperimentArgs),
    /// Print h(w), member divergences and slackness residuals at given weights.
    Evaluate(ExperimentArgs),
    /// Load a chain file and check stochasticity and stationarity.
    Validate {
        path: PathBuf,
        /// Also report each matrix's distance to this partition, e.g. "1,2;3".
        #[arg(long)]
        partition: Option<String>,
    },
}

/// Flags override the values in `--config`.
#[derive(Debug, Args, Default)]
pub struct ExperimentArgs {
    /// TOML experiment file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// "curie-weiss" or "file".
    #[arg(long)]
    pub model: Option<String>,
    /// Number of spins
    #[arg(long)]
    pub d: Option<usize>,
    /// Temperature.
    #[arg(long = "T")]
    pub temperature: Option<f64>,
    /// External field, default 0
    #[arg(long)]
    pub h_field: Option<f64>,
    /// Chain file for the "file" model.
    #[arg(long)]
    pub path: Option<PathBuf>,
    /// Comma-separated transforms, e.g. "power:1,power:2,lazy:0.5".
    #[arg(long)]
    pub family: Option<String>,
    /// Blocks separated by ';', coordinates by ',', e.g. "1,2;3,5;4".
    #[arg(long)]
    pub partition: Option<String>,
    /// Ground partition for run-two-layer, same syntax as --partition.
    #[arg(long)]
    pub ground: Option<String>,
    /// Subgradient iterations
    #[arg(long, short = 't')]
    pub iterations: Option<usize>,
    /// Inner subgradient iterations per greedy round
    #[arg(long = "inner-iterations", short = 'K')]
    pub inner_iterations: Option<usize>,
    /// Greedy rounds, default |supp V|
    #[arg(long, short = 'l')]
    pub limit: Option<usize>,
    /// "auto" or a positive number.
    #[arg(long)]
    pub step: Option<String>,
    /// "rigorous", "initial" or a positive number.
    #[arg(long)]
    pub bound: Option<String>,
    /// Initial weights, comma-separated.
    #[arg(long)]
    pub initial: Option<String>,
    /// Weights for evaluate, comma-separated.
    #[arg(long)]
    pub weights: Option<String>,
    /// Write the trace as CSV
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Write the trace and summary as JSON
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Recorded in JSON output; runs are deterministic
    #[arg(long)]
    pub seed: Option<u64>,
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

pub fn parse_blocks(s: &str) -> Result<Vec<Vec<usize>>> {
    s.split(';')
        .map(|b| {
            b.split(',')
                .filter(|x| !x.trim().is_empty())
                .map(|x| x.trim().parse::<usize>().map_err(|_| config_err(format!("bad coordinate '{x}'"))))
                .collect()
        })
        .collect()
}

fn parse_floats(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| config_err(format!("bad number '{x}'"))))
        .collect()
}

fn parse_setting(s: &str) -> Setting {
    s.parse::<f64>().map(Setting::Number).unwrap_or_else(|_| Setting::Word(s.to_string()))
}

impl ExperimentArgs {
    fn model_from_flags(&self) -> Result<ModelSpec> {
        match self.model.as_deref() {
            Some("curie-weiss") => Ok(ModelSpec::CurieWeiss {
                d: self.d.ok_or_else(|| config_err("curie-weiss needs --d"))?,
                temperature: self.temperature.ok_or_else(|| config_err("curie-weiss needs --T"))?,
                h_field: self.h_field.unwrap_or(0.0),
                state_cap: None,
            }),
            Some("file") => Ok(ModelSpec::File {
                path: self.path.clone().ok_or_else(|| config_err("file model needs --path"))?,
                base: None,
            }),
            Some(other) => Err(config_err(format!("unknown model '{other}'"))),
            None => Err(config_err("give --config or --model")),
        }
    }

    /// The config file (if any) with every given flag applied on top.
    pub fn resolve(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig {
                partition: None,
                ground: None,
                seed: 0,
                model: self.model_from_flags()?,
                family: Default::default(),
                algorithm: Default::default(),
                output: Default::default(),
            },
        };
        if self.config.is_some() && self.model.is_some() {
            cfg.model = self.model_from_flags()?;
        }
        if let ModelSpec::CurieWeiss {
            d,
            temperature,
            h_field,
            ..
        } = &mut cfg.model
        {
            if let Some(v) = self.d {
                *d = v;
            }
            if let Some(v) = self.temperature {
                *temperature = v;
            }
            if let Some(v) = self.h_field {
                *h_field = v;
            }
        }
        if let (ModelSpec::File { path, .. }, Some(p)) = (&mut cfg.model, &self.path) {
            *path = p.clone();
        }
        if let Some(f) = &self.family {
            cfg.family.transforms = f.split(',').map(str::parse::<Transform>).collect::<Result<_>>()?;
        }
        if let Some(p) = &self.partition {
            cfg.partition = Some(parse_blocks(p)?);
        }
        if let Some(g) = &self.ground {
            cfg.ground = Some(parse_blocks(g)?);
        }
        let alg = &mut cfg.algorithm;
        alg.iterations = self.iterations.or(alg.iterations);
        alg.inner_iterations = self.inner_iterations.or(alg.inner_iterations);
        alg.limit = self.limit.or(alg.limit);
        if let Some(s) = &self.step {
            alg.step = Some(parse_setting(s));
        }
        if let Some(b) = &self.bound {
            alg.bound = Some(parse_setting(b));
        }
        if let Some(w) = &self.initial {
            alg.initial = Some(parse_floats(w)?);
        }
        if let Some(w) = &self.weights {
            alg.weights = Some(parse_floats(w)?);
        }
        if self.csv.is_some() {
            cfg.output.csv = self.csv.clone();
        }
        if self.json.is_some() {
            cfg.output.json = self.json.clone();
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        Ok(cfg)
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::RunSubgradient(args) => run_subgradient(&args.resolve()?, out).map(|_| ()),
        Command::RunTwoLayer(args) => run_two_layer_cmd(&args.resolve()?, out).map(|_| ()),
        Command::Evaluate(args) => evaluate(&args.resolve()?, out).map(|_| ()),
        Command::Validate { path, partition } => {
            let partition = partition
                .map(|p| {
                    let blocks = parse_blocks(&p)?
                        .into_iter()
                        .map(CoordinateSubset::new)
                        .collect::<Result<Vec<_>>>()?;
                    Partition::new(blocks)
                })
                .transpose()?;
            validate(&path, partition.as_ref(), out)
        }
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{rendered}")
            } else {
                write!(err, "{rendered}")
            };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
