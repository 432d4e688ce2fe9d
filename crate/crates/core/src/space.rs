//! Product state spaces, coordinate subsets and partitions.
//!
//! States of `X = X^(1) x ... x X^(d)` are addressed by a flat index using a
//! lexicographic mixed-radix codec where coordinate 1 is the most significant
//! digit. The same codec is used for every sub-space `X^(S)`, with the
//! coordinates of `S` taken in increasing order.
//!
//! Coordinates are labelled `1..=d` throughout the crate.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper bound on the number of states of a product space.
pub const MAX_STATES: usize = 1 << 16;

/// The state space `X^(1) x ... x X^(d)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProductSpace {
    dims: Vec<usize>,
    strides: Vec<usize>,
    size: usize,
}

impl ProductSpace {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidSpace("at least one coordinate required".into()));
        }
        if let Some(pos) = dims.iter().position(|&k| k < 2) {
            return Err(Error::InvalidSpace(format!(
                "coordinate {} has cardinality {}, must be >= 2",
                pos + 1,
                dims[pos]
            )));
        }
        let mut size: usize = 1;
        for &k in &dims {
            size = size
                .checked_mul(k)
                .filter(|&s| s <= MAX_STATES)
                .ok_or(Error::StateSpaceTooLarge {
                    states: usize::MAX,
                    cap: MAX_STATES,
                })?;
        }
        let mut strides = vec![1; dims.len()];
        for i in (0..dims.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * dims[i + 1];
        }
        Ok(Self {
            dims,
            strides,
            size,
        })
    }

    /// `{0,1}^d`.
    pub fn binary(d: usize) -> Result<Self> {
        Self::new(vec![2; d])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Number of coordinates `d`.
    pub fn d(&self) -> usize {
        self.dims.len()
    }

    /// Number of states `|X|`.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn encode(&self, coords: &[usize]) -> Result<usize> {
        if coords.len() != self.d() {
            return Err(Error::DimensionMismatch(format!(
                "expected {} coordinates, got {}",
                self.d(),
                coords.len()
            )));
        }
        let mut idx = 0;
        for (i, (&v, &k)) in coords.iter().zip(&self.dims).enumerate() {
            if v >= k {
                return Err(Error::CoordinateOutOfRange {
                    coord: i + 1,
                    value: v,
                    dim: k,
                });
            }
            idx += v * self.strides[i];
        }
        Ok(idx)
    }

    pub fn decode(&self, index: usize) -> Result<Vec<usize>> {
        if index >= self.size {
            return Err(Error::IndexOutOfRange {
                index,
                size: self.size,
            });
        }
        Ok((0..self.d()).map(|i| self.value_at(index, i + 1)).collect())
    }

    /// Value of coordinate `coord` (1-based) in the state with flat index `index`.
    #[inline]
    pub fn value_at(&self, index: usize, coord: usize) -> usize {
        (index / self.strides[coord - 1]) % self.dims[coord - 1]
    }

    /// The space `X^(S)`.
    pub fn subspace(&self, subset: &CoordinateSubset) -> Result<ProductSpace> {
        self.check_subset(subset)?;
        if subset.is_empty() {
            return Err(Error::EmptySubset);
        }
        ProductSpace::new(subset.iter().map(|c| self.dims[c - 1]).collect())
    }

    /// Map from flat indices of `X` to flat indices of `X^(S)`, i.e. `x -> x^(S)`.
    pub fn projector(&self, subset: &CoordinateSubset) -> Result<Vec<usize>> {
        let sub = self.subspace(subset)?;
        Ok((0..self.size)
            .map(|x| {
                subset
                    .iter()
                    .enumerate()
                    .map(|(k, c)| self.value_at(x, c) * sub.strides[k])
                    .sum()
            })
            .collect())
    }

    pub(crate) fn check_subset(&self, subset: &CoordinateSubset) -> Result<()> {
        match subset.max() {
            Some(c) if c > self.d() => Err(Error::InvalidSubset(format!(
                "coordinate {c} outside 1..={}",
                self.d()
            ))),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for ProductSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dims: Vec<String> = self.dims.iter().map(ToString::to_string).collect();
        write!(f, "{}", dims.join("x"))
    }
}

/// A sorted set of distinct coordinates, each at least 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct CoordinateSubset(Vec<usize>);

impl CoordinateSubset {
    pub fn new<I: IntoIterator<Item = usize>>(coords: I) -> Result<Self> {
        let mut v: Vec<usize> = coords.into_iter().collect();
        if v.contains(&0) {
            return Err(Error::InvalidSubset("coordinates are labelled from 1".into()));
        }
        v.sort_unstable();
        if v.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidSubset(format!("duplicate coordinate in {v:?}")));
        }
        Ok(Self(v))
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    /// `{1, ..., d}`.
    pub fn full(d: usize) -> Self {
        Self((1..=d).collect())
    }

    pub fn singleton(coord: usize) -> Result<Self> {
        Self::new([coord])
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn contains(&self, coord: usize) -> bool {
        self.0.binary_search(&coord).is_ok()
    }

    pub fn max(&self) -> Option<usize> {
        self.0.last().copied()
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.iter().all(|c| other.contains(c))
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.iter().all(|c| !other.contains(c))
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut v = self.0.clone();
        v.extend(other.iter().filter(|&c| !self.contains(c)));
        v.sort_unstable();
        Self(v)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        Self(self.iter().filter(|&c| other.contains(c)).collect())
    }

    pub fn difference(&self, other: &Self) -> Self {
        Self(self.iter().filter(|&c| !other.contains(c)).collect())
    }

    /// `{1..=d} \ self`.
    pub fn complement(&self, d: usize) -> Self {
        Self((1..=d).filter(|&c| !self.contains(c)).collect())
    }

    pub fn with(&self, coord: usize) -> Result<Self> {
        if self.contains(coord) {
            return Err(Error::InvalidSubset(format!("{coord} already present")));
        }
        let mut v = self.0.clone();
        v.push(coord);
        Self::new(v)
    }

    pub fn without(&self, coord: usize) -> Self {
        Self(self.iter().filter(|&c| c != coord).collect())
    }

    /// Bit mask with bit `c - 1` set for each coordinate `c`.
    pub fn mask(&self) -> u64 {
        self.iter().fold(0u64, |m, c| m | (1u64 << (c - 1)))
    }

    pub fn from_mask(mask: u64) -> Self {
        Self((0..64).filter(|b| mask >> b & 1 == 1).map(|b| b + 1).collect())
    }

    /// All subsets of `{1..=d}`, ordered by bit mask.
    pub fn all_subsets(d: usize) -> impl Iterator<Item = CoordinateSubset> {
        (0..(1u64 << d)).map(Self::from_mask)
    }
}

impl TryFrom<Vec<usize>> for CoordinateSubset {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<CoordinateSubset> for Vec<usize> {
    fn from(s: CoordinateSubset) -> Self {
        s.0
    }
}

impl fmt::Display for CoordinateSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|c| c.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// An ordered tuple of pairwise-disjoint coordinate subsets.
///
/// The support need not cover `{1..=d}`; see [`Partition::covers`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<CoordinateSubset>", into = "Vec<CoordinateSubset>")]
pub struct Partition {
    blocks: Vec<CoordinateSubset>,
}

impl Partition {
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

    /// Convenience constructor from nested coordinate lists.
    pub fn from_lists(lists: &[&[usize]]) -> Result<Self> {
        let blocks = lists
            .iter()
            .map(|l| CoordinateSubset::new(l.iter().copied()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(blocks)
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

    /// True when the blocks are non-empty and their union is `{1..=d}`.
    pub fn covers(&self, d: usize) -> bool {
        self.blocks.iter().all(|b| !b.is_empty()) && self.support() == CoordinateSubset::full(d)
    }

    pub(crate) fn require_cover(&self, d: usize) -> Result<()> {
        if self.covers(d) {
            Ok(())
        } else {
            Err(Error::InvalidPartition(format!(
                "{self} does not partition {{1..{d}}} into non-empty blocks"
            )))
        }
    }
}

impl TryFrom<Vec<CoordinateSubset>> for Partition {
    type Error = Error;
    fn try_from(v: Vec<CoordinateSubset>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<Partition> for Vec<CoordinateSubset> {
    fn from(p: Partition) -> Self {
        p.blocks
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.blocks.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(", "))
    }
}
