use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::info::DualObjectiveContext;
use crate::optimizer::subgradient::{
    resolve_bound, resolve_step, run_projected_subgradient, BoundSource, StepSize, SubgradientConfig,
    SubgradientTrace,
};
use crate::partition::{GreedyContext, PartialTuple};
use crate::weights::SimplexWeights;

/// Minimum distorted gain for an insertion.
pub const GAIN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoLayerConfig {
    /// Inner subgradient steps per round (`K`).
    pub inner_iterations: usize,
    pub step: StepSize,
    /// Resolved once, on the complement-only partition at the initial weights.
    pub bound: BoundSource,
    /// Uniform when absent.
    pub initial: Option<SimplexWeights>,
}

impl TwoLayerConfig {
    pub fn new(inner_iterations: usize) -> Self {
        Self {
            inner_iterations,
            step: StepSize::Auto,
            bound: BoundSource::Initial,
            initial: None,
        }
    }

    pub fn with_bound(mut self, bound: BoundSource) -> Self {
        self.bound = bound;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreedyRound {
    pub round: usize,
    /// Distortion `(1 - 1/l)^(l - round - 1)`.
    pub alpha: f64,
    pub tuple_before: PartialTuple,
    /// Mean of the round's inner iterates.
    pub weights: SimplexWeights,
    pub f_before: f64,
    /// Best `(block, coord)` candidate and its distorted gain.
    pub best: Option<(usize, usize, f64)>,
    pub inserted: bool,
    pub tuple_after: PartialTuple,
    pub f_after: f64,
    pub inner: SubgradientTrace,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreedyTrace {
    pub config: TwoLayerConfig,
    pub limit: usize,
    pub bound: f64,
    pub step: f64,
    pub rounds: Vec<GreedyRound>,
    pub final_tuple: PartialTuple,
    pub final_weights: SimplexWeights,
    /// The single inner run performed when `l = 0`.
    pub inner_only: Option<SubgradientTrace>,
}

impl GreedyTrace {
    /// One row per round (numbered from 1): `round,f_before,f_after,selection,inserted,tuple,w1..wn`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let io = |e: csv::Error| Error::Io {
            path: "<csv>".into(),
            message: e.to_string(),
        };
        let mut wtr = csv::Writer::from_writer(out);
        let n = self.final_weights.len();
        let mut header: Vec<String> = ["round", "f_before", "f_after", "selection", "inserted", "tuple"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        header.extend((1..=n).map(|i| format!("w{i}")));
        wtr.write_record(&header).map_err(io)?;
        for r in &self.rounds {
            let selection = match r.best {
                Some((j, e, _)) => format!("{e}->S{}", j + 1),
                None => "none".into(),
            };
            let mut row = vec![
                (r.round + 1).to_string(),
                r.f_before.to_string(),
                r.f_after.to_string(),
                selection,
                r.inserted.to_string(),
                r.tuple_after.to_string(),
            ];
            row.extend(r.weights.iter().map(|x| x.to_string()));
            wtr.write_record(&row).map_err(io)?;
        }
        wtr.flush().map_err(|e| Error::Io {
            path: "<csv>".into(),
            message: e.to_string(),
        })
    }
}

fn inner_context(ctx: &GreedyContext, s: &PartialTuple) -> Result<DualObjectiveContext> {
    DualObjectiveContext::new(ctx.family().clone(), s.induced_partition(ctx.d())?)
}

/// Alternates `K` projected subgradient steps on the partition induced by the
/// current tuple with one distorted-greedy insertion, for `l` rounds.
///
/// Round `i` warm-starts from the previous round's last iterate, averages its
/// `K` inner iterates into `w-bar`, and scores each admissible `(j, e)` by
/// `alpha_i * (f(S + e) - f(S) + a_e) - a_e` at `w-bar`, where `a_e` is the
/// element's modular weight. The best candidate (first in `(j, e)` order on
/// ties) is inserted when its score exceeds [`GAIN_TOL`]. With `l = 0` a
/// single inner run on the empty tuple is reported.
pub fn run_two_layer(ctx: &GreedyContext, cfg: &TwoLayerConfig) -> Result<GreedyTrace> {
    if cfg.inner_iterations == 0 {
        return Err(Error::InvalidParameter("inner iterations must be >= 1".into()));
    }
    let n = ctx.family().len();
    let l = ctx.limit();
    let w0 = cfg.initial.clone().unwrap_or_else(|| SimplexWeights::uniform(n));
    let mut tuple = PartialTuple::empty(ctx.ground().len());
    let bound = resolve_bound(&inner_context(ctx, &tuple)?, cfg.bound, &w0)?;
    let step = resolve_step(cfg.step, n, bound, cfg.inner_iterations)?;
    let inner_cfg = |w: SimplexWeights| SubgradientConfig {
        iterations: cfg.inner_iterations,
        step: StepSize::Fixed(step),
        bound: BoundSource::Fixed(bound),
        initial: Some(w),
    };

    let mut rounds = Vec::with_capacity(l);
    let mut w = w0;
    if l == 0 {
        let inner = run_projected_subgradient(&inner_context(ctx, &tuple)?, &inner_cfg(w))?;
        return Ok(GreedyTrace {
            config: cfg.clone(),
            limit: 0,
            bound,
            step,
            rounds,
            final_tuple: tuple,
            final_weights: inner.average.clone(),
            inner_only: Some(inner),
        });
    }

    for i in 0..l {
        let inner = run_projected_subgradient(&inner_context(ctx, &tuple)?, &inner_cfg(w.clone()))?;
        w = inner.last().clone();
        let w_bar = inner.average.clone();
        let alpha = (1.0 - 1.0 / l as f64).powi((l - i - 1) as i32);
        let ev = ctx.at(&w_bar)?;
        let f_before = ev.f(&tuple)?;

        let mut best: Option<(usize, usize, f64)> = None;
        for (j, e) in ctx.candidates(&tuple) {
            let a_e = ev.element_cost(e)?;
            let gain = alpha * (ev.marginal_gain(&tuple, e, j)? + a_e) - a_e;
            if best.is_none_or(|(_, _, b)| gain > b) {
                best = Some((j, e, gain));
            }
        }
        let before = tuple.clone();
        let inserted = matches!(best, Some((_, _, g)) if g > GAIN_TOL);
        if let (true, Some((j, e, _))) = (inserted, best) {
            tuple = tuple.with_element(e, j)?;
        }
        let f_after = ev.f(&tuple)?;
        rounds.push(GreedyRound {
            round: i,
            alpha,
            tuple_before: before,
            weights: w_bar,
            f_before,
            best,
            inserted,
            tuple_after: tuple.clone(),
            f_after,
            inner,
        });
    }
    let final_weights = rounds.last().expect("l >= 1").weights.clone();
    Ok(GreedyTrace {
        config: cfg.clone(),
        limit: l,
        bound,
        step,
        rounds,
        final_tuple: tuple,
        final_weights,
        inner_only: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::ChainFamily;
    use crate::random;
    use crate::space::{Partition, ProductSpace};

    fn family(seed: u64, n: usize) -> ChainFamily {
        random::family(&mut random::rng(seed), &ProductSpace::binary(4).unwrap(), n).unwrap()
    }

    #[test]
    fn zero_limit_runs_one_inner_pass() {
        let ctx = GreedyContext::new(family(1, 2), Partition::from_lists(&[&[1, 2], &[3]]).unwrap(), 0).unwrap();
        let trace = run_two_layer(&ctx, &TwoLayerConfig::new(5)).unwrap();
        assert!(trace.rounds.is_empty());
        assert_eq!(trace.inner_only.as_ref().unwrap().iterates.len(), 6);
        assert_eq!(trace.final_tuple, PartialTuple::empty(2));
    }

    #[test]
    fn support_never_exceeds_limit() {
        let ground = Partition::from_lists(&[&[1, 2], &[3, 4]]).unwrap();
        for l in 1..=4 {
            let ctx = GreedyContext::new(family(3, 3), ground.clone(), l).unwrap();
            let trace = run_two_layer(&ctx, &TwoLayerConfig::new(5)).unwrap();
            assert_eq!(trace.rounds.len(), l);
            assert!(trace.final_tuple.support().len() <= l);
            assert!(trace.final_tuple.precedes(ctx.ground()));
            let mut buf = Vec::new();
            trace.write_csv(&mut buf).unwrap();
            assert_eq!(String::from_utf8(buf).unwrap().lines().count(), l + 1);
        }
    }

    #[test]
    fn identical_factorizable_members_add_nothing() {
        let space = ProductSpace::binary(2).unwrap();
        let mut rng = random::rng(8);
        let pi = random::distribution(&mut rng, &space.subspace(&crate::CoordinateSubset::full(1)).unwrap())
            .unwrap();
        let q = random::reversible_chain(&mut rng, &pi, 0.0).unwrap();
        let one = crate::CoordinateSubset::singleton(1).unwrap();
        let two = crate::CoordinateSubset::singleton(2).unwrap();
        let p = crate::tensor_product(&[(&q, &one), (&q, &two)], &space).unwrap();
        let fam = ChainFamily::new(p.stationary().unwrap().clone(), vec![p.clone(), p]).unwrap();
        let ctx = GreedyContext::new(fam, Partition::from_lists(&[&[1]]).unwrap(), 1).unwrap();
        let trace = run_two_layer(&ctx, &TwoLayerConfig::new(3).with_bound(BoundSource::Fixed(1.0))).unwrap();
        assert!(!trace.rounds[0].inserted);
        assert!(trace.rounds[0].f_after.abs() < 1e-12);
    }
}
