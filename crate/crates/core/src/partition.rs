//! Partial tuples below a ground partition and the decomposition `f = g - c`
//! of the weighted distance to factorizability.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::chain::{ChainFamily, StochasticMatrix};
use crate::error::{Error, Result};
use crate::info::entropy_rate;
use crate::space::{CoordinateSubset, Partition};
use crate::weights::SimplexWeights;

/// Absolute slack allowed before a modular cost counts as negative.
pub const COST_TOL: f64 = 1e-9;

/// A tuple `(S_1, ..., S_k)` of pairwise disjoint subsets. The implicit final
/// block is the complement of the support.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<CoordinateSubset>", into = "Vec<CoordinateSubset>")]
pub struct PartialTuple {
    blocks: Vec<CoordinateSubset>,
}

impl PartialTuple {
    pub fn new(blocks: Vec<CoordinateSubset>) -> Result<Self> {
        for (i, a) in blocks.iter().enumerate() {
            for b in &blocks[i + 1..] {
                if !a.is_disjoint(b) {
                    return Err(Error::InvalidPartition(format!("blocks {a} and {b} overlap")));
                }
            }
        }
        Ok(Self { blocks })
    }

    /// The all-empty tuple with `k` blocks.
    pub fn empty(k: usize) -> Self {
        Self {
            blocks: vec![CoordinateSubset::empty(); k],
        }
    }

    pub fn from_lists(lists: &[&[usize]]) -> Result<Self> {
        Self::new(
            lists
                .iter()
                .map(|l| CoordinateSubset::new(l.iter().copied()))
                .collect::<Result<_>>()?,
        )
    }

    pub fn blocks(&self) -> &[CoordinateSubset] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn support(&self) -> CoordinateSubset {
        self.blocks
            .iter()
            .fold(CoordinateSubset::empty(), |acc, b| acc.union(b))
    }

    /// The tuple with `coord` added to block `block` (0-based).
    pub fn with_element(&self, coord: usize, block: usize) -> Result<Self> {
        let invalid = |reason: &str| Error::InvalidElement {
            coord,
            block,
            reason: reason.into(),
        };
        if block >= self.blocks.len() {
            return Err(invalid("no such block"));
        }
        if self.blocks.iter().any(|b| b.contains(coord)) {
            return Err(invalid("already in the support"));
        }
        let mut blocks = self.blocks.clone();
        blocks[block] = blocks[block].with(coord)?;
        Ok(Self { blocks })
    }

    /// Blockwise inclusion `self <= other`.
    pub fn precedes(&self, other: &PartialTuple) -> bool {
        self.len() == other.len()
            && self
                .blocks
                .iter()
                .zip(&other.blocks)
                .all(|(a, b)| a.is_subset_of(b))
    }

    /// Blockwise intersection.
    pub fn meet(&self, other: &PartialTuple) -> Result<PartialTuple> {
        self.check_len(other)?;
        Ok(Self {
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(a, b)| a.intersection(b))
                .collect(),
        })
    }

    /// Block `i` is `(S_i u T_i)` minus every `S_j u T_j`, `j != i`.
    pub fn join(&self, other: &PartialTuple) -> Result<PartialTuple> {
        self.check_len(other)?;
        let unions: Vec<CoordinateSubset> = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a.union(b))
            .collect();
        let blocks = (0..unions.len())
            .map(|i| {
                unions
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .fold(unions[i].clone(), |acc, (_, u)| acc.difference(u))
            })
            .collect();
        Ok(Self { blocks })
    }

    fn check_len(&self, other: &PartialTuple) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch(format!(
                "tuples with {} and {} blocks",
                self.len(),
                other.len()
            )));
        }
        Ok(())
    }

    /// The non-empty blocks followed by the complement of the support, if
    /// non-empty: the partition on which `f` is a distance to factorizability.
    pub fn induced_partition(&self, d: usize) -> Result<Partition> {
        let mut blocks: Vec<CoordinateSubset> = self.blocks.iter().filter(|b| !b.is_empty()).cloned().collect();
        let rest = self.support().complement(d);
        if !rest.is_empty() {
            blocks.push(rest);
        }
        Partition::new(blocks)
    }

    /// Every tuple `S <= self`: each coordinate of block `j` is either left
    /// out or kept in block `j`.
    pub fn sub_tuples(&self) -> Vec<PartialTuple> {
        let elems: Vec<(usize, usize)> = self
            .blocks
            .iter()
            .enumerate()
            .flat_map(|(j, b)| b.iter().map(move |e| (j, e)))
            .collect();
        (0u64..1 << elems.len())
            .map(|mask| {
                let mut blocks = vec![Vec::new(); self.len()];
                for (k, &(j, e)) in elems.iter().enumerate() {
                    if mask >> k & 1 == 1 {
                        blocks[j].push(e);
                    }
                }
                PartialTuple {
                    blocks: blocks
                        .into_iter()
                        .map(|b| CoordinateSubset::new(b).expect("sorted subset of a block"))
                        .collect(),
                }
            })
            .collect()
    }
}

impl TryFrom<Vec<CoordinateSubset>> for PartialTuple {
    type Error = Error;
    fn try_from(v: Vec<CoordinateSubset>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<PartialTuple> for Vec<CoordinateSubset> {
    fn from(t: PartialTuple) -> Self {
        t.blocks
    }
}

impl From<Partition> for PartialTuple {
    fn from(p: Partition) -> Self {
        Self {
            blocks: p.blocks().to_vec(),
        }
    }
}

impl fmt::Display for PartialTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{b}")?;
        }
        f.write_str(")")
    }
}

/// A family, a ground partition `V` and a cardinality limit `l`.
#[derive(Debug, Clone)]
pub struct GreedyContext {
    family: ChainFamily,
    ground: PartialTuple,
    limit: usize,
    member_entropies: Vec<f64>,
}

impl GreedyContext {
    pub fn new(family: ChainFamily, ground: Partition, limit: usize) -> Result<Self> {
        let d = family.space().d();
        if ground.is_empty() || ground.blocks().iter().any(|b| b.is_empty()) {
            return Err(Error::InvalidPartition("ground blocks must be non-empty".into()));
        }
        if ground.blocks().iter().any(|b| b.max().is_some_and(|m| m > d)) {
            return Err(Error::InvalidPartition(format!("ground {ground} exceeds d = {d}")));
        }
        let ground = PartialTuple::from(ground);
        if limit > ground.support().len() {
            return Err(Error::InvalidParameter(format!(
                "limit {limit} exceeds |supp V| = {}",
                ground.support().len()
            )));
        }
        let member_entropies = family
            .members()
            .iter()
            .map(entropy_rate)
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            family,
            ground,
            limit,
            member_entropies,
        })
    }

    pub fn family(&self) -> &ChainFamily {
        &self.family
    }

    pub fn ground(&self) -> &PartialTuple {
        &self.ground
    }

    pub fn limit(&self) -> usize {
        self.limit
    }

    pub fn d(&self) -> usize {
        self.family.space().d()
    }

    /// Admissible `(block, coord)` additions to `s`, in lexicographic order.
    pub fn candidates(&self, s: &PartialTuple) -> Vec<(usize, usize)> {
        let supp = s.support();
        self.ground
            .blocks()
            .iter()
            .enumerate()
            .flat_map(|(j, v)| v.iter().map(move |e| (j, e)))
            .filter(|&(_, e)| !supp.contains(e))
            .collect()
    }

    pub fn check_tuple(&self, s: &PartialTuple) -> Result<()> {
        if !s.precedes(&self.ground) {
            return Err(Error::InvalidPartition(format!("{s} is not below the ground {}", self.ground)));
        }
        Ok(())
    }

    /// Fixes the weights; entropies of projections are cached per subset.
    pub fn at(&self, w: &SimplexWeights) -> Result<Evaluator<'_>> {
        let average = self.family.average(w)?;
        Ok(Evaluator {
            ctx: self,
            weighted_member_entropy: w.dot(&self.member_entropies),
            average,
            cache: RefCell::new(HashMap::new()),
        })
    }
}

/// `f`, `g`, `c` and `beta` at fixed weights.
#[derive(Debug)]
pub struct Evaluator<'a> {
    ctx: &'a GreedyContext,
    average: StochasticMatrix,
    weighted_member_entropy: f64,
    cache: RefCell<HashMap<u64, f64>>,
}

impl Evaluator<'_> {
    pub fn average(&self) -> &StochasticMatrix {
        &self.average
    }

    /// `H(P-bar^(S))`, zero for the empty set.
    pub fn entropy(&self, subset: &CoordinateSubset) -> Result<f64> {
        if subset.is_empty() {
            return Ok(0.0);
        }
        let key = subset.mask();
        if let Some(&h) = self.cache.borrow().get(&key) {
            return Ok(h);
        }
        let h = entropy_rate(&self.average.keep_in(subset)?)?;
        self.cache.borrow_mut().insert(key, h);
        Ok(h)
    }

    /// `sum_j H(P-bar^(S_j)) + H(P-bar^(-supp S)) - sum_i w_i H(P_i)`.
    pub fn f(&self, s: &PartialTuple) -> Result<f64> {
        self.ctx.check_tuple(s)?;
        let mut total = 0.0;
        for b in s.blocks() {
            total += self.entropy(b)?;
        }
        total += self.entropy(&s.support().complement(self.ctx.d()))?;
        Ok(total - self.weighted_member_entropy)
    }

    /// `f(S + e in block j) - f(S)`.
    pub fn marginal_gain(&self, s: &PartialTuple, coord: usize, block: usize) -> Result<f64> {
        let next = self.extend(s, coord, block)?;
        Ok(self.f(&next)? - self.f(s)?)
    }

    fn extend(&self, s: &PartialTuple, coord: usize, block: usize) -> Result<PartialTuple> {
        let v = self.ctx.ground.blocks().get(block).ok_or_else(|| Error::InvalidElement {
            coord,
            block,
            reason: "no such ground block".into(),
        })?;
        if !v.contains(coord) {
            return Err(Error::InvalidElement {
                coord,
                block,
                reason: format!("not in ground block {v}"),
            });
        }
        s.with_element(coord, block)
    }

    fn rest(&self) -> CoordinateSubset {
        self.ctx.ground.support().complement(self.ctx.d())
    }

    fn block_of(&self, coord: usize) -> Result<usize> {
        self.ctx
            .ground
            .blocks()
            .iter()
            .position(|b| b.contains(coord))
            .ok_or_else(|| Error::InvalidElement {
                coord,
                block: usize::MAX,
                reason: "not in the ground support".into(),
            })
    }

    /// `-sum_{e in supp V} [H(P-bar^(R u e)) + H(P-bar^(e))]`, `R = -supp V`.
    pub fn beta(&self) -> Result<f64> {
        let rest = self.rest();
        let mut total = 0.0;
        for e in self.ctx.ground.support().iter() {
            total += self.entropy(&rest.with(e)?)? + self.entropy(&CoordinateSubset::singleton(e)?)?;
        }
        Ok(-total)
    }

    /// Per-element modular weight
    /// `D(P-bar^(V_j) || P-bar^(V_j - e) (x) P-bar^(e)) - D(P-bar^(R u e) || P-bar^(R) (x) P-bar^(e))`,
    /// which equals `f(V - e) - f(V)`.
    pub fn element_cost(&self, coord: usize) -> Result<f64> {
        let vj = &self.ctx.ground.blocks()[self.block_of(coord)?];
        let rest = self.rest();
        let e = CoordinateSubset::singleton(coord)?;
        let inner = self.entropy(&vj.without(coord))? + self.entropy(&e)? - self.entropy(vj)?;
        let outer = self.entropy(&rest)? + self.entropy(&e)? - self.entropy(&rest.with(coord)?)?;
        Ok(inner - outer)
    }

    /// `c(S) = -beta + sum_{e in supp S} a_e`; errors when negative.
    pub fn c(&self, s: &PartialTuple) -> Result<f64> {
        self.ctx.check_tuple(s)?;
        let mut total = -self.beta()?;
        for e in s.support().iter() {
            total += self.element_cost(e)?;
        }
        if total < -COST_TOL {
            return Err(Error::NegativeCost { value: total });
        }
        Ok(total)
    }

    /// `g = f + c`.
    pub fn g(&self, s: &PartialTuple) -> Result<f64> {
        Ok(self.f(s)? + self.c(s)?)
    }

    /// `C = max_{S <= V} c(S) = -beta + sum_e max(a_e, 0)`. Element weights
    /// may be negative, so this can exceed `c(V)`.
    pub fn max_cost(&self) -> Result<f64> {
        let mut total = -self.beta()?;
        for e in self.ctx.ground.support().iter() {
            total += self.element_cost(e)?.max(0.0);
        }
        Ok(total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::tests::fixed_chain;
    use crate::chain::{tensor_product, Distribution};
    use crate::info::kl_divergence;
    use crate::random;
    use crate::space::ProductSpace;

    fn t(lists: &[&[usize]]) -> PartialTuple {
        PartialTuple::from_lists(lists).unwrap()
    }

    #[test]
    fn tuple_lattice() {
        let s = t(&[&[1], &[3]]);
        let u = t(&[&[1, 2], &[3]]);
        assert!(s.precedes(&u) && !u.precedes(&s));
        assert_eq!(s.with_element(2, 0).unwrap(), u);
        assert!(s.with_element(3, 0).is_err());
        let a = t(&[&[1, 2], &[]]);
        let b = t(&[&[1], &[2]]);
        assert_eq!(a.meet(&b).unwrap(), t(&[&[1], &[]]));
        assert_eq!(a.join(&b).unwrap(), t(&[&[1], &[]]));
        assert_eq!(u.sub_tuples().len(), 8);
        assert_eq!(
            s.induced_partition(4).unwrap(),
            Partition::from_lists(&[&[1], &[3], &[2, 4]]).unwrap()
        );
        assert_eq!(t(&[&[], &[]]).induced_partition(2).unwrap().len(), 1);
        assert_eq!(u.to_string(), "({1,2}, {3})");
    }

    #[test]
    fn f_of_empty_tuple_is_mixing_divergence() {
        let p = fixed_chain();
        let pi = p.stationary().unwrap().clone();
        let id = StochasticMatrix::identity(p.space().clone()).with_stationary(pi.clone()).unwrap();
        let fam = ChainFamily::new(pi, vec![p, id]).unwrap();
        let ctx = GreedyContext::new(fam.clone(), Partition::from_lists(&[&[1], &[2]]).unwrap(), 2).unwrap();
        let w = SimplexWeights::uniform(2);
        let ev = ctx.at(&w).unwrap();
        let f0 = ev.f(&PartialTuple::empty(2)).unwrap();
        let avg = fam.average(&w).unwrap();
        let direct: f64 = fam
            .members()
            .iter()
            .map(|m| 0.5 * kl_divergence(m, &avg, fam.pi()).unwrap().finite().unwrap())
            .sum();
        assert!((f0 - direct).abs() < 1e-12);
        assert!(f0 >= 0.0);
    }

    #[test]
    fn f_matches_direct_kl_on_three_coordinates() {
        let mut rng = random::rng(11);
        let space = ProductSpace::binary(3).unwrap();
        let fam = random::family(&mut rng, &space, 2).unwrap();
        let ctx = GreedyContext::new(fam.clone(), Partition::from_lists(&[&[1], &[3]]).unwrap(), 2).unwrap();
        let w = SimplexWeights::uniform(2);
        let ev = ctx.at(&w).unwrap();
        let s = t(&[&[1], &[3]]);
        let avg = fam.average(&w).unwrap();
        let blocks = s.induced_partition(3).unwrap();
        let factors: Vec<_> = blocks.blocks().iter().map(|b| avg.keep_in(b).unwrap()).collect();
        let pairs: Vec<_> = factors.iter().zip(blocks.blocks()).collect();
        let q = tensor_product(&pairs, &space).unwrap();
        let direct: f64 = fam
            .members()
            .iter()
            .map(|m| 0.5 * kl_divergence(m, &q, fam.pi()).unwrap().finite().unwrap())
            .sum();
        assert!((ev.f(&s).unwrap() - direct).abs() < 1e-12);
    }

    #[test]
    fn deterministic_chain_has_zero_beta() {
        let space = ProductSpace::binary(2).unwrap();
        let id = StochasticMatrix::identity(space.clone())
            .with_stationary(Distribution::uniform(space))
            .unwrap();
        let fam = ChainFamily::new(id.stationary().unwrap().clone(), vec![id]).unwrap();
        let ctx = GreedyContext::new(fam, Partition::from_lists(&[&[1]]).unwrap(), 1).unwrap();
        let ev = ctx.at(&SimplexWeights::uniform(1)).unwrap();
        assert_eq!(ev.beta().unwrap(), 0.0);
        assert_eq!(ev.c(&PartialTuple::empty(1)).unwrap(), 0.0);
    }

    #[test]
    fn element_cost_is_top_marginal() {
        let mut rng = random::rng(5);
        let space = ProductSpace::binary(4).unwrap();
        let fam = random::family(&mut rng, &space, 2).unwrap();
        let ground = Partition::from_lists(&[&[1, 2], &[3]]).unwrap();
        let ctx = GreedyContext::new(fam, ground, 3).unwrap();
        let ev = ctx.at(&random::weights(&mut rng, 2)).unwrap();
        let v = ctx.ground().clone();
        for (j, e) in [(0, 1), (0, 2), (1, 3)] {
            let mut blocks = v.blocks().to_vec();
            blocks[j] = blocks[j].without(e);
            let below = PartialTuple::new(blocks).unwrap();
            let want = ev.f(&below).unwrap() - ev.f(&v).unwrap();
            assert!((ev.element_cost(e).unwrap() - want).abs() < 1e-12);
        }
        let s = t(&[&[2], &[]]);
        assert_eq!(ev.g(&s).unwrap(), ev.f(&s).unwrap() + ev.c(&s).unwrap());
        assert!(ev.marginal_gain(&s, 3, 0).is_err());
        assert!(ev.marginal_gain(&s, 2, 0).is_err());
    }

    #[test]
    fn rejects_bad_contexts() {
        let p = fixed_chain();
        let fam = ChainFamily::new(p.stationary().unwrap().clone(), vec![p]).unwrap();
        assert!(GreedyContext::new(fam.clone(), Partition::from_lists(&[&[1]]).unwrap(), 2).is_err());
        assert!(GreedyContext::new(fam.clone(), Partition::from_lists(&[&[3]]).unwrap(), 0).is_err());
        let ctx = GreedyContext::new(fam, Partition::from_lists(&[&[1]]).unwrap(), 1).unwrap();
        let ev = ctx.at(&SimplexWeights::uniform(1)).unwrap();
        assert!(ev.f(&t(&[&[2]])).is_err());
    }
}
