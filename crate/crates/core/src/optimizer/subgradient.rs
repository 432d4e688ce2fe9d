use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::info::{DualObjectiveContext, ExtendedReal};
use crate::optimizer::projection::project_to_simplex;
use crate::weights::SimplexWeights;

/// Step size of the projected subgradient iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepSize {
    /// `eta = sqrt(n / (B t))`.
    Auto,
    Fixed(f64),
}

/// How the subgradient norm bound `B` is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundSource {
    /// [`estimate_b`]: valid for every `w`, infinite for sparse families.
    Rigorous,
    /// `n * max_i D_i(w0)^2`, evaluated once at the initial weights.
    Initial,
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubgradientConfig {
    pub iterations: usize,
    pub step: StepSize,
    pub bound: BoundSource,
    /// Uniform when absent.
    pub initial: Option<SimplexWeights>,
}

impl SubgradientConfig {
    pub fn new(iterations: usize) -> Self {
        Self {
            iterations,
            step: StepSize::Auto,
            bound: BoundSource::Rigorous,
            initial: None,
        }
    }

    pub fn with_bound(mut self, bound: BoundSource) -> Self {
        self.bound = bound;
        self
    }

    pub fn with_step(mut self, step: StepSize) -> Self {
        self.step = step;
        self
    }

    pub fn with_initial(mut self, w: SimplexWeights) -> Self {
        self.initial = Some(w);
        self
    }
}

/// Output of [`run_projected_subgradient`]. Index 0 holds `w^(0)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubgradientTrace {
    pub config: SubgradientConfig,
    pub bound: f64,
    pub step: f64,
    pub iterates: Vec<SimplexWeights>,
    pub objective: Vec<f64>,
    /// Mean of `w^(1), ..., w^(t)`.
    pub average: SimplexWeights,
    /// Index in `1..=t` minimizing `h`.
    pub argmin: usize,
    pub min_value: f64,
}

impl SubgradientTrace {
    pub fn initial(&self) -> &SimplexWeights {
        &self.iterates[0]
    }

    pub fn last(&self) -> &SimplexWeights {
        self.iterates.last().expect("trace holds w^(0)")
    }

    pub fn argmin_weights(&self) -> &SimplexWeights {
        &self.iterates[self.argmin]
    }

    /// One row per iterate: `iter,h,w1..wn`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(out);
        let n = self.iterates[0].len();
        let mut header = vec!["iter".to_string(), "h".to_string()];
        header.extend((1..=n).map(|i| format!("w{i}")));
        let io = |e: csv::Error| Error::Io {
            path: "<csv>".into(),
            message: e.to_string(),
        };
        wtr.write_record(&header).map_err(io)?;
        for (i, (w, h)) in self.iterates.iter().zip(&self.objective).enumerate() {
            let mut row = vec![i.to_string(), h.to_string()];
            row.extend(w.iter().map(|x| x.to_string()));
            wtr.write_record(&row).map_err(io)?;
        }
        wtr.flush().map_err(|e| Error::Io {
            path: "<csv>".into(),
            message: e.to_string(),
        })
    }
}

fn finite_divergences(d: &[ExtendedReal]) -> Result<Vec<f64>> {
    d.iter()
        .enumerate()
        .map(|(i, v)| v.finite().ok_or(Error::InfiniteDivergence { member: i }))
        .collect()
}

/// `g_i = D_n - D_i` with `D_i = D(P_i || Q*(v))`, so `g_n = 0`.
pub fn subgradient_h(ctx: &DualObjectiveContext, v: &SimplexWeights) -> Result<Vec<f64>> {
    let d = finite_divergences(&ctx.member_divergences(v)?)?;
    Ok(gradient_from(&d))
}

fn gradient_from(d: &[f64]) -> Vec<f64> {
    let last = d[d.len() - 1];
    d.iter().map(|di| last - di).collect()
}

/// `n (|X| s)^2` with `s` bounding `P_i(x,y) ln(P_i(x,y) / Q(x,y))` over every
/// factorized average `Q`: each entry of `Q` is at least the product of
/// blockwise member minima.
pub fn estimate_b(ctx: &DualObjectiveContext) -> Result<f64> {
    let space = ctx.family().space();
    let blocks = ctx.partition().blocks();
    let projs: Vec<Vec<usize>> = blocks.iter().map(|b| space.projector(b)).collect::<Result<_>>()?;
    let mins: Vec<(Vec<f64>, usize)> = (0..blocks.len())
        .map(|j| {
            let first = ctx.projection(j, 0);
            let m = (1..ctx.n()).fold(first.entries().to_vec(), |acc, i| {
                acc.iter()
                    .zip(ctx.projection(j, i).entries())
                    .map(|(a, b)| a.min(*b))
                    .collect()
            });
            (m, first.size())
        })
        .collect();
    let n = space.size();
    let mut sup: f64 = 0.0;
    for x in 0..n {
        for y in 0..n {
            let q_min: f64 = mins
                .iter()
                .zip(&projs)
                .map(|((m, k), p)| m[p[x] * k + p[y]])
                .product();
            for p in ctx.family().members() {
                let pxy = p.get(x, y);
                if pxy > 0.0 {
                    if q_min <= 0.0 {
                        return Err(Error::InfiniteBound);
                    }
                    sup = sup.max(pxy * (pxy / q_min).ln());
                }
            }
        }
    }
    Ok(ctx.n() as f64 * (n as f64 * sup).powi(2))
}

/// `n * max_i D_i(w)^2`.
pub fn bound_at(ctx: &DualObjectiveContext, w: &SimplexWeights) -> Result<f64> {
    let d = finite_divergences(&ctx.member_divergences(w)?)?;
    let max = d.iter().fold(0.0f64, |a, &b| a.max(b));
    Ok(ctx.n() as f64 * max * max)
}

pub(crate) fn resolve_bound(ctx: &DualObjectiveContext, source: BoundSource, w0: &SimplexWeights) -> Result<f64> {
    let b = match source {
        BoundSource::Rigorous => estimate_b(ctx)?,
        BoundSource::Initial => bound_at(ctx, w0)?,
        BoundSource::Fixed(b) => b,
    };
    if !b.is_finite() || b < 0.0 {
        return Err(Error::InvalidParameter(format!("bound B = {b}")));
    }
    Ok(b)
}

pub(crate) fn resolve_step(step: StepSize, n: usize, bound: f64, iterations: usize) -> Result<f64> {
    let eta = match step {
        StepSize::Fixed(eta) => eta,
        StepSize::Auto => (n as f64 / (bound * iterations as f64)).sqrt(),
    };
    if !eta.is_finite() || eta <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "step size {eta} (B = {bound}); supply an explicit step"
        )));
    }
    Ok(eta)
}

/// Projected subgradient descent on `h`:
/// `w^(i) = proj(w^(i-1) - eta g(w^(i-1)))` for `i = 1..=t`.
pub fn run_projected_subgradient(ctx: &DualObjectiveContext, cfg: &SubgradientConfig) -> Result<SubgradientTrace> {
    if cfg.iterations == 0 {
        return Err(Error::InvalidParameter("iterations must be >= 1".into()));
    }
    let n = ctx.n();
    let w0 = cfg.initial.clone().unwrap_or_else(|| SimplexWeights::uniform(n));
    if w0.len() != n {
        return Err(Error::DimensionMismatch(format!("{} initial weights for {n} members", w0.len())));
    }
    let bound = resolve_bound(ctx, cfg.bound, &w0)?;
    let step = resolve_step(cfg.step, n, bound, cfg.iterations)?;

    let mut iterates = Vec::with_capacity(cfg.iterations + 1);
    let mut objective = Vec::with_capacity(cfg.iterations + 1);
    let mut w = w0;
    for _ in 0..cfg.iterations {
        let d = ctx.member_divergences(&w)?;
        objective.push(-crate::info::weighted_sum(&d, &w).to_f64());
        let g = gradient_from(&finite_divergences(&d)?);
        let v: Vec<f64> = w.iter().zip(&g).map(|(wi, gi)| wi - step * gi).collect();
        let next = project_to_simplex(&v)?;
        iterates.push(std::mem::replace(&mut w, next));
    }
    objective.push(ctx.h(&w)?);
    iterates.push(w);

    let average = SimplexWeights::mean(&iterates[1..])?;
    let (argmin, min_value) = objective
        .iter()
        .enumerate()
        .skip(1)
        .fold((1, f64::INFINITY), |best, (i, &h)| if h < best.1 { (i, h) } else { best });
    Ok(SubgradientTrace {
        config: cfg.clone(),
        bound,
        step,
        iterates,
        objective,
        average,
        argmin,
        min_value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::ChainFamily;
    use crate::random;
    use crate::space::{Partition, ProductSpace};

    fn ctx(seed: u64, n: usize) -> DualObjectiveContext {
        let mut rng = random::rng(seed);
        let space = ProductSpace::binary(2).unwrap();
        let fam = random::family(&mut rng, &space, n).unwrap();
        DualObjectiveContext::new(fam, Partition::from_lists(&[&[1], &[2]]).unwrap()).unwrap()
    }

    #[test]
    fn single_member_has_zero_subgradient() {
        let c = ctx(3, 1);
        assert_eq!(subgradient_h(&c, &SimplexWeights::uniform(1)).unwrap(), vec![0.0]);
    }

    #[test]
    fn identical_members_give_constant_trajectory() {
        let c = ctx(3, 1);
        let p = c.family().members()[0].clone();
        let fam = ChainFamily::new(c.family().pi().clone(), vec![p.clone(), p]).unwrap();
        let c = DualObjectiveContext::new(fam, c.partition().clone()).unwrap();
        let w0 = SimplexWeights::new(vec![0.3, 0.7]).unwrap();
        assert_eq!(subgradient_h(&c, &w0).unwrap(), vec![0.0, 0.0]);
        let cfg = SubgradientConfig::new(5).with_initial(w0.clone());
        let trace = run_projected_subgradient(&c, &cfg).unwrap();
        assert!(trace.iterates.iter().all(|w| w.distance_inf(w0.as_slice()) < 1e-15));
        assert!(trace.objective.windows(2).all(|h| h[0] == h[1]));
    }

    #[test]
    fn norm_bounded_by_estimate() {
        let c = ctx(9, 3);
        let b = estimate_b(&c).unwrap();
        let mut rng = random::rng(1);
        for _ in 0..100 {
            let g = subgradient_h(&c, &random::weights(&mut rng, 3)).unwrap();
            assert!(g.iter().map(|x| x * x).sum::<f64>() <= b);
        }
    }

    #[test]
    fn trace_shape_and_csv() {
        let c = ctx(4, 2);
        let trace = run_projected_subgradient(&c, &SubgradientConfig::new(10)).unwrap();
        assert_eq!(trace.iterates.len(), 11);
        assert_eq!(trace.objective.len(), 11);
        assert!((1..=10).contains(&trace.argmin));
        let min = trace.objective[1..].iter().cloned().fold(f64::INFINITY, f64::min);
        assert_eq!(trace.min_value, min);
        let mut buf = Vec::new();
        trace.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("iter,h,w1,w2\n0,"));
        assert_eq!(text.lines().count(), 12);
    }

    #[test]
    fn rejects_bad_config() {
        let c = ctx(4, 2);
        assert!(run_projected_subgradient(&c, &SubgradientConfig::new(0)).is_err());
        let cfg = SubgradientConfig::new(3).with_step(StepSize::Fixed(-1.0));
        assert!(run_projected_subgradient(&c, &cfg).is_err());
        let cfg = SubgradientConfig::new(3).with_initial(SimplexWeights::uniform(3));
        assert!(run_projected_subgradient(&c, &cfg).is_err());
    }
}
