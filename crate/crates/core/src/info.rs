//! Entropy, KL and TV divergences, and the dual objective over a fixed
//! covering partition.

use std::fmt;

use crate::chain::{tensor_product, ChainFamily, Distribution, StochasticMatrix};
use crate::error::{Error, Result};
use crate::space::Partition;
use crate::weights::SimplexWeights;

/// A real number or `+inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedReal {
    Finite(f64),
    Infinite,
}

impl ExtendedReal {
    pub const ZERO: ExtendedReal = ExtendedReal::Finite(0.0);

    pub fn is_finite(self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(v) => Some(v),
            ExtendedReal::Infinite => None,
        }
    }

    /// `+inf` maps to `f64::INFINITY`.
    pub fn to_f64(self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }

    /// Multiplication by a non-negative weight with `0 * inf = 0`.
    pub fn scale(self, w: f64) -> ExtendedReal {
        match self {
            _ if w == 0.0 => ExtendedReal::ZERO,
            ExtendedReal::Finite(v) => ExtendedReal::Finite(w * v),
            ExtendedReal::Infinite => ExtendedReal::Infinite,
        }
    }

    /// Difference; `inf - inf` is indeterminate.
    pub fn minus(self, other: ExtendedReal) -> Result<f64> {
        match (self, other) {
            (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => Ok(a - b),
            (ExtendedReal::Infinite, ExtendedReal::Finite(_)) => Ok(f64::INFINITY),
            (ExtendedReal::Finite(_), ExtendedReal::Infinite) => Ok(f64::NEG_INFINITY),
            (ExtendedReal::Infinite, ExtendedReal::Infinite) => Err(Error::Indeterminate),
        }
    }
}

impl std::ops::Add for ExtendedReal {
    type Output = ExtendedReal;
    fn add(self, rhs: ExtendedReal) -> ExtendedReal {
        match (self, rhs) {
            (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => ExtendedReal::Finite(a + b),
            _ => ExtendedReal::Infinite,
        }
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::Finite(v) => fmt::Display::fmt(v, f),
            ExtendedReal::Infinite => f.write_str("inf"),
        }
    }
}

#[inline]
fn xlnx(p: f64) -> f64 {
    if p > 0.0 {
        p * p.ln()
    } else {
        0.0
    }
}

/// Shannon entropy in nats.
pub fn shannon_entropy(pi: &Distribution) -> f64 {
    -pi.values().iter().map(|&p| xlnx(p)).sum::<f64>()
}

/// Entropy rate `-sum_x pi(x) sum_y P(x,y) ln P(x,y)` in nats.
pub fn entropy_rate(p: &StochasticMatrix) -> Result<f64> {
    let pi = p.require_stationary()?;
    Ok(-p
        .rows()
        .zip(pi.values())
        .map(|(row, &px)| px * row.iter().map(|&v| xlnx(v)).sum::<f64>())
        .sum::<f64>())
}

fn check_same_space(m: &StochasticMatrix, l: &StochasticMatrix, pi: &Distribution) -> Result<()> {
    if m.space() != l.space() || m.space() != pi.space() {
        return Err(Error::DimensionMismatch(format!(
            "divergence between matrices on {} and {} with pi on {}",
            m.space(),
            l.space(),
            pi.space()
        )));
    }
    Ok(())
}

/// `D^pi(M || L) = sum_x pi(x) sum_y M(x,y) ln(M(x,y) / L(x,y))`.
pub fn kl_divergence(m: &StochasticMatrix, l: &StochasticMatrix, pi: &Distribution) -> Result<ExtendedReal> {
    check_same_space(m, l, pi)?;
    let mut total = 0.0;
    for ((mrow, lrow), &px) in m.rows().zip(l.rows()).zip(pi.values()) {
        let mut acc = 0.0;
        for (&a, &b) in mrow.iter().zip(lrow) {
            if a > 0.0 {
                if b <= 0.0 {
                    return Ok(ExtendedReal::Infinite);
                }
                acc += a * (a / b).ln();
            }
        }
        total += px * acc;
    }
    Ok(ExtendedReal::Finite(total))
}

/// `1/2 sum_x pi(x) sum_y |P(x,y) - Q(x,y)|`.
pub fn tv_distance(p: &StochasticMatrix, q: &StochasticMatrix, pi: &Distribution) -> Result<f64> {
    check_same_space(p, q, pi)?;
    Ok(0.5
        * p.rows()
            .zip(q.rows())
            .zip(pi.values())
            .map(|((a, b), &px)| px * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>())
            .sum::<f64>())
}

/// Entrywise convex combination of matrices on one space, attaching `pi`.
pub(crate) fn combine(mats: &[&StochasticMatrix], w: &SimplexWeights, pi: &Distribution) -> Result<StochasticMatrix> {
    let mut entries = vec![0.0; mats[0].entries().len()];
    for (m, wi) in mats.iter().zip(w.iter()) {
        if wi == 0.0 {
            continue;
        }
        for (e, &p) in entries.iter_mut().zip(m.entries()) {
            *e += wi * p;
        }
    }
    StochasticMatrix::new(pi.space().clone(), entries)?.with_stationary(pi.clone())
}

/// A family and a covering partition with every `P_i^(S_j)` precomputed.
#[derive(Debug, Clone)]
pub struct DualObjectiveContext {
    family: ChainFamily,
    partition: Partition,
    /// `projections[j][i] = P_i^(S_j)`.
    projections: Vec<Vec<StochasticMatrix>>,
}

impl DualObjectiveContext {
    pub fn new(family: ChainFamily, partition: Partition) -> Result<Self> {
        partition.require_cover(family.space().d())?;
        let projections = partition
            .blocks()
            .iter()
            .map(|s| family.members().iter().map(|p| p.keep_in(s)).collect())
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            family,
            partition,
            projections,
        })
    }

    pub fn family(&self) -> &ChainFamily {
        &self.family
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn n(&self) -> usize {
        self.family.len()
    }

    /// Cached `P_i^(S_j)`.
    pub fn projection(&self, block: usize, member: usize) -> &StochasticMatrix {
        &self.projections[block][member]
    }

    /// `P-bar(w)^(S_j)` for every block, as `sum_i w_i P_i^(S_j)`.
    pub fn projected_averages(&self, w: &SimplexWeights) -> Result<Vec<StochasticMatrix>> {
        self.family.check_weights(w)?;
        self.projections
            .iter()
            .map(|members| {
                let pi = members[0].require_stationary()?;
                combine(&members.iter().collect::<Vec<_>>(), w, pi)
            })
            .collect()
    }

    /// `Q*(w) = (x)_j P-bar(w)^(S_j)`.
    pub fn factorized_average(&self, w: &SimplexWeights) -> Result<StochasticMatrix> {
        let factors = self.projected_averages(w)?;
        let pairs: Vec<_> = factors.iter().zip(self.partition.blocks()).collect();
        tensor_product(&pairs, self.family.space())
    }

    /// `D_i(w) = D^pi(P_i || Q*(w))` for every member.
    pub fn member_divergences(&self, w: &SimplexWeights) -> Result<Vec<ExtendedReal>> {
        let q = self.factorized_average(w)?;
        self.divergences_against(&q)
    }

    pub(crate) fn divergences_against(&self, q: &StochasticMatrix) -> Result<Vec<ExtendedReal>> {
        let pi = self.family.pi();
        self.family
            .members()
            .iter()
            .map(|p| kl_divergence(p, q, pi))
            .collect()
    }

    /// `sum_i w_i D_i(w)`, with `0 * inf = 0`.
    pub fn dual_value(&self, w: &SimplexWeights) -> Result<ExtendedReal> {
        let d = self.member_divergences(w)?;
        Ok(weighted_sum(&d, w))
    }

    /// `h(w) = -dual_value(w)`.
    pub fn h(&self, w: &SimplexWeights) -> Result<f64> {
        match self.dual_value(w)? {
            ExtendedReal::Finite(v) => Ok(-v),
            ExtendedReal::Infinite => Err(Error::NonFinite("dual value is +inf".into())),
        }
    }
}

pub(crate) fn weighted_sum(d: &[ExtendedReal], w: &SimplexWeights) -> ExtendedReal {
    d.iter()
        .zip(w.iter())
        .fold(ExtendedReal::ZERO, |acc, (di, wi)| acc + di.scale(wi))
}

/// Distance to factorizability `D^pi(P || (x)_j P^(S_j))`.
pub fn distance_to_factorizability(p: &StochasticMatrix, partition: &Partition) -> Result<ExtendedReal> {
    let pi = p.require_stationary()?;
    partition.require_cover(p.space().d())?;
    let factors = partition
        .blocks()
        .iter()
        .map(|s| p.keep_in(s))
        .collect::<Result<Vec<_>>>()?;
    let pairs: Vec<_> = factors.iter().zip(partition.blocks()).collect();
    let q = tensor_product(&pairs, p.space())?;
    kl_divergence(p, &q, pi)
}

/// LHS minus RHS of
/// `sum_i w_i D(P_i || (x) Q_j) = sum_i w_i D(P_i || (x) P-bar^(S_j)) + sum_j D(P-bar^(S_j) || Q_j)`,
/// the last divergences taken with respect to `pi^(S_j)`.
pub fn pythagorean_gap(
    family: &ChainFamily,
    partition: &Partition,
    q_factors: &[StochasticMatrix],
    w: &SimplexWeights,
) -> Result<f64> {
    if q_factors.len() != partition.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} factors for {} blocks",
            q_factors.len(),
            partition.len()
        )));
    }
    let ctx = DualObjectiveContext::new(family.clone(), partition.clone())?;
    let pairs: Vec<_> = q_factors.iter().zip(partition.blocks()).collect();
    let q = tensor_product(&pairs, family.space())?;
    let lhs = weighted_sum(&ctx.divergences_against(&q)?, w);

    let mut rhs = ctx.dual_value(w)?;
    for (avg, qj) in ctx.projected_averages(w)?.iter().zip(q_factors) {
        rhs = rhs + kl_divergence(avg, qj, avg.require_stationary()?)?;
    }
    lhs.minus(rhs)
}
