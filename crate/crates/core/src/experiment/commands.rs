use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::experiment::config::{ExperimentConfig, DEFAULT_INNER_ITERATIONS, DEFAULT_ITERATIONS};
use crate::info::{distance_to_factorizability, DualObjectiveContext};
use crate::models::load_chain_file;
use crate::optimizer::{
    equilibrium_diagnostics, run_projected_subgradient, run_two_layer, BoundSource, GreedyTrace, SubgradientConfig,
    SubgradientTrace, TwoLayerConfig,
};
use crate::partition::GreedyContext;
use crate::weights::SimplexWeights;

fn out_err(e: std::io::Error) -> Error {
    Error::Io {
        path: "<stdout>".into(),
        message: e.to_string(),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)
        .map_err(|e| Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
    w.flush().map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Weights at two decimals, e.g. `(0.73, 0.00, 0.27)`.
pub fn format_weights(w: &SimplexWeights) -> String {
    let parts: Vec<String> = w.iter().map(|x| format!("{x:.2}")).collect();
    format!("({})", parts.join(", "))
}

#[derive(Debug, Clone, Serialize)]
pub struct SummaryRow {
    pub label: &'static str,
    pub weights: SimplexWeights,
    pub h: f64,
}

#[derive(Serialize)]
struct SubgradientOutput<'a> {
    experiment: &'a ExperimentConfig,
    summary: &'a [SummaryRow],
    trace: &'a SubgradientTrace,
}

/// Runs projected subgradient descent, writes the configured traces and
/// prints the argmin / average / initial / extreme / final comparison.
pub fn run_subgradient(cfg: &ExperimentConfig, out: &mut dyn Write) -> Result<(SubgradientTrace, Vec<SummaryRow>)> {
    let family = cfg.build_family()?;
    let n = family.len();
    let ctx = DualObjectiveContext::new(family, cfg.partition()?)?;
    let sg = SubgradientConfig {
        iterations: cfg.algorithm.iterations.unwrap_or(DEFAULT_ITERATIONS),
        step: cfg.step()?,
        bound: cfg.bound(BoundSource::Rigorous)?,
        initial: cfg.initial()?,
    };
    let trace = run_projected_subgradient(&ctx, &sg)?;
    let w_ex = SimplexWeights::vertex(n, 0);
    let h_ex = ctx.h(&w_ex)?;
    let rows = vec![
        SummaryRow {
            label: "argmin_i h(w^(i))",
            weights: trace.argmin_weights().clone(),
            h: trace.min_value,
        },
        SummaryRow {
            label: "w-bar^t",
            weights: trace.average.clone(),
            h: ctx.h(&trace.average)?,
        },
        SummaryRow {
            label: "w^(0)",
            weights: trace.initial().clone(),
            h: trace.objective[0],
        },
        SummaryRow {
            label: "w_ex",
            weights: w_ex,
            h: h_ex,
        },
        SummaryRow {
            label: "w^(t)",
            weights: trace.last().clone(),
            h: *trace.objective.last().expect("non-empty"),
        },
    ];

    writeln!(
        out,
        "partition {}  n = {n}  t = {}  B = {:.6}  eta = {:.6}",
        ctx.partition(),
        sg.iterations,
        trace.bound,
        trace.step
    )
    .map_err(out_err)?;
    writeln!(out, "{:<18} {:<width$} h(w)", "", "w", width = 7 * n).map_err(out_err)?;
    for r in &rows {
        writeln!(out, "{:<18} {:<width$} {:.2}", r.label, format_weights(&r.weights), r.h, width = 7 * n)
            .map_err(out_err)?;
    }

    if let Some(path) = &cfg.output.csv {
        let mut w = create(path)?;
        trace.write_csv(&mut w)?;
    }
    if let Some(path) = &cfg.output.json {
        write_json(
            path,
            &SubgradientOutput {
                experiment: cfg,
                summary: &rows,
                trace: &trace,
            },
        )?;
    }
    Ok((trace, rows))
}

#[derive(Serialize)]
struct TwoLayerOutput<'a> {
    experiment: &'a ExperimentConfig,
    trace: &'a GreedyTrace,
}

/// Runs the two-layer subgradient/greedy scheme on the configured ground
/// partition.
pub fn run_two_layer_cmd(cfg: &ExperimentConfig, out: &mut dyn Write) -> Result<GreedyTrace> {
    let family = cfg.build_family()?;
    let ground = cfg.ground()?;
    let limit = cfg.algorithm.limit.unwrap_or_else(|| ground.support().len());
    let ctx = GreedyContext::new(family, ground, limit)?;
    let tl = TwoLayerConfig {
        inner_iterations: cfg.algorithm.inner_iterations.unwrap_or(DEFAULT_INNER_ITERATIONS),
        step: cfg.step()?,
        bound: cfg.bound(BoundSource::Initial)?,
        initial: cfg.initial()?,
    };
    let trace = run_two_layer(&ctx, &tl)?;

    writeln!(
        out,
        "ground {}  l = {limit}  K = {}  B = {:.6}  eta = {:.6}",
        ctx.ground(),
        tl.inner_iterations,
        trace.bound,
        trace.step
    )
    .map_err(out_err)?;
    for r in &trace.rounds {
        let pick = match r.best {
            Some((j, e, g)) if r.inserted => format!("add {e} to S{} (gain {g:.4})", j + 1),
            Some((j, e, g)) => format!("skip {e} -> S{} (gain {g:.4})", j + 1),
            None => "no candidate".into(),
        };
        writeln!(
            out,
            "round {}  f = {:.4} -> {:.4}  {pick}  S = {}  w-bar = {}",
            r.round + 1,
            r.f_before,
            r.f_after,
            r.tuple_after,
            format_weights(&r.weights)
        )
        .map_err(out_err)?;
    }
    writeln!(
        out,
        "final S = {}  w-bar = {}",
        trace.final_tuple,
        format_weights(&trace.final_weights)
    )
    .map_err(out_err)?;

    if let Some(path) = &cfg.output.csv {
        let mut w = create(path)?;
        trace.write_csv(&mut w)?;
    }
    if let Some(path) = &cfg.output.json {
        write_json(
            path,
            &TwoLayerOutput {
                experiment: cfg,
                trace: &trace,
            },
        )?;
    }
    Ok(trace)
}

/// Prints `h(w)`, the member divergences against `Q*(w)` and the
/// complementary-slackness residuals.
pub fn evaluate(cfg: &ExperimentConfig, out: &mut dyn Write) -> Result<crate::optimizer::EquilibriumReport> {
    let family = cfg.build_family()?;
    let ctx = DualObjectiveContext::new(family, cfg.partition()?)?;
    let w = cfg.weights()?;
    let report = equilibrium_diagnostics(&ctx, &w)?;
    writeln!(out, "w = {}", format_weights(&w)).map_err(out_err)?;
    writeln!(out, "h(w) = {:.6}", -report.dual_value).map_err(out_err)?;
    writeln!(out, "dual value = {:.6}", report.dual_value).map_err(out_err)?;
    for (i, (d, r)) in report.divergences.iter().zip(&report.residuals).enumerate() {
        writeln!(out, "member {}: D = {d:.6}  residual = {r:.3e}", i + 1).map_err(out_err)?;
    }
    writeln!(
        out,
        "max D = {:.6}  gap = {:.3e}  max residual = {:.3e}",
        report.max_divergence, report.gap, report.max_residual
    )
    .map_err(out_err)?;
    if let Some(path) = &cfg.output.json {
        write_json(path, &report)?;
    }
    Ok(report)
}

/// Loads a chain file (which validates it) and prints per-matrix invariants.
pub fn validate(path: &Path, partition: Option<&crate::Partition>, out: &mut dyn Write) -> Result<()> {
    let file = load_chain_file(path)?;
    writeln!(
        out,
        "{}: space {} ({} states), {} matrices",
        path.display(),
        file.space,
        file.space.size(),
        file.matrices.len()
    )
    .map_err(out_err)?;
    for (name, m) in &file.matrices {
        let row_dev = m
            .rows()
            .map(|r| (r.iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max);
        let stat = m.stationarity_residual(&file.pi);
        let mut line = format!("  {name}: max |row sum - 1| = {row_dev:.3e}  |pi P - pi| = {stat:.3e}");
        if let Some(p) = partition {
            let d = distance_to_factorizability(m, p)?;
            line.push_str(&format!("  D(P || factorized) = {d}"));
        }
        writeln!(out, "{line}").map_err(out_err)?;
    }
    writeln!(out, "ok").map_err(out_err)
}
