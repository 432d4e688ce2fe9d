//! Distributions, transition matrices and the projection / tensor / averaging
//! operations on them.

use crate::error::{Error, Result};
use crate::space::{CoordinateSubset, Partition, ProductSpace};
use crate::weights::SimplexWeights;

/// Tolerance on row sums of a transition matrix.
pub const STOCHASTIC_TOL: f64 = 1e-10;
/// Tolerance on `|pi P - pi|_inf`.
pub const STATIONARY_TOL: f64 = 1e-10;
/// Tolerance on `|sum(pi) - 1|`.
pub const DISTRIBUTION_TOL: f64 = 1e-12;

/// A probability mass with full support on a product space.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    space: ProductSpace,
    values: Vec<f64>,
}

impl Distribution {
    pub fn new(space: ProductSpace, values: Vec<f64>) -> Result<Self> {
        if values.len() != space.size() {
            return Err(Error::DimensionMismatch(format!(
                "distribution has {} entries, space has {} states",
                values.len(),
                space.size()
            )));
        }
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v <= 0.0)
        {
            return Err(Error::InvalidDistribution(format!(
                "entry {i} is {v}; full support required"
            )));
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > DISTRIBUTION_TOL {
            return Err(Error::InvalidDistribution(format!("entries sum to {sum}")));
        }
        Ok(Self { space, values })
    }

    pub fn uniform(space: ProductSpace) -> Self {
        let n = space.size();
        Self {
            space,
            values: vec![1.0 / n as f64; n],
        }
    }

    pub fn space(&self) -> &ProductSpace {
        &self.space
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// The marginal `pi^(S)` on `X^(S)`.
    pub fn marginal(&self, subset: &CoordinateSubset) -> Result<Distribution> {
        let sub = self.space.subspace(subset)?;
        let proj = self.space.projector(subset)?;
        let mut values = vec![0.0; sub.size()];
        for (x, &p) in self.values.iter().enumerate() {
            values[proj[x]] += p;
        }
        Ok(Distribution { space: sub, values })
    }

    /// Product measure of per-block factors; the blocks must partition the space.
    pub fn tensor(factors: &[(&Distribution, &CoordinateSubset)], space: &ProductSpace) -> Result<Self> {
        let projs = block_projectors(factors.iter().map(|(d, s)| (d.space(), *s)), space)?;
        let values = (0..space.size())
            .map(|x| {
                factors
                    .iter()
                    .zip(&projs)
                    .map(|((d, _), p)| d.values[p[x]])
                    .product()
            })
            .collect();
        Distribution::new(space.clone(), values)
    }
}

impl std::ops::Index<usize> for Distribution {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.values[i]
    }
}

/// A dense row-stochastic matrix on a product space, optionally carrying a
/// stationary distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticMatrix {
    space: ProductSpace,
    entries: Vec<f64>,
    pi: Option<Distribution>,
}

impl StochasticMatrix {
    /// Validates non-negativity and unit row sums.
    pub fn new(space: ProductSpace, entries: Vec<f64>) -> Result<Self> {
        let n = space.size();
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch(format!(
                "matrix has {} entries, expected {}",
                entries.len(),
                n * n
            )));
        }
        for (x, row) in entries.chunks_exact(n).enumerate() {
            if let Some((y, &v)) = row
                .iter()
                .enumerate()
                .find(|(_, v)| !v.is_finite() || **v < 0.0)
            {
                return Err(Error::InvalidEntry {
                    row: x,
                    col: y,
                    value: v,
                });
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > STOCHASTIC_TOL {
                return Err(Error::RowSum { row: x, sum });
            }
        }
        Ok(Self {
            space,
            entries,
            pi: None,
        })
    }

    pub fn from_rows(space: ProductSpace, rows: &[Vec<f64>]) -> Result<Self> {
        let n = space.size();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch(format!("expected a {n}x{n} matrix")));
        }
        Self::new(space, rows.concat())
    }

    pub fn identity(space: ProductSpace) -> Self {
        let n = space.size();
        let mut entries = vec![0.0; n * n];
        for x in 0..n {
            entries[x * n + x] = 1.0;
        }
        Self {
            space,
            entries,
            pi: None,
        }
    }

    /// Attaches `pi` after checking `|pi P - pi|_inf <= 1e-10`.
    pub fn with_stationary(mut self, pi: Distribution) -> Result<Self> {
        if pi.space() != &self.space {
            return Err(Error::DimensionMismatch(
                "distribution and matrix live on different spaces".into(),
            ));
        }
        let residual = self.stationarity_residual(&pi);
        if residual > STATIONARY_TOL {
            return Err(Error::NotStationary { residual });
        }
        self.pi = Some(pi);
        Ok(self)
    }

    /// `|pi P - pi|_inf`.
    pub fn stationarity_residual(&self, pi: &Distribution) -> f64 {
        let n = self.size();
        let mut acc = vec![0.0; n];
        for (x, row) in self.entries.chunks_exact(n).enumerate() {
            let px = pi[x];
            for (a, &p) in acc.iter_mut().zip(row) {
                *a += px * p;
            }
        }
        acc.iter()
            .zip(pi.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn space(&self) -> &ProductSpace {
        &self.space
    }

    pub fn size(&self) -> usize {
        self.space.size()
    }

    pub fn stationary(&self) -> Option<&Distribution> {
        self.pi.as_ref()
    }

    pub(crate) fn require_stationary(&self) -> Result<&Distribution> {
        self.pi.as_ref().ok_or(Error::MissingStationary)
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.entries[x * self.size() + y]
    }

    pub fn row(&self, x: usize) -> &[f64] {
        let n = self.size();
        &self.entries[x * n..(x + 1) * n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.entries.chunks_exact(self.size())
    }

    pub fn max_abs_diff(&self, other: &StochasticMatrix) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Matrix product `self * other`; keeps `pi` if both share it.
    pub fn matmul(&self, other: &StochasticMatrix) -> Result<StochasticMatrix> {
        if self.space != other.space {
            return Err(Error::DimensionMismatch("matrices on different spaces".into()));
        }
        let n = self.size();
        let mut out = vec![0.0; n * n];
        for x in 0..n {
            let dst = &mut out[x * n..(x + 1) * n];
            for (z, &a) in self.row(x).iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                for (d, &b) in dst.iter_mut().zip(other.row(z)) {
                    *d += a * b;
                }
            }
        }
        let pi = match (&self.pi, &other.pi) {
            (Some(a), Some(b)) if a == b => Some(a.clone()),
            _ => None,
        };
        Ok(StochasticMatrix {
            space: self.space.clone(),
            entries: out,
            pi,
        })
    }

    /// `P^k` by repeated squaring, `k >= 1`.
    pub fn power(&self, k: u32) -> Result<StochasticMatrix> {
        if k == 0 {
            return Err(Error::InvalidParameter("power must be >= 1".into()));
        }
        let mut base = self.clone();
        let mut acc: Option<StochasticMatrix> = None;
        let mut e = k;
        loop {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.matmul(&base)?,
                });
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            base = base.matmul(&base)?;
        }
        let out = acc.expect("k >= 1");
        out.revalidated()
    }

    /// `a I + (1 - a) P`.
    pub fn lazy(&self, a: f64) -> Result<StochasticMatrix> {
        if !(0.0..1.0).contains(&a) {
            return Err(Error::InvalidParameter(format!("laziness {a} outside [0, 1)")));
        }
        let n = self.size();
        let mut entries: Vec<f64> = self.entries.iter().map(|p| (1.0 - a) * p).collect();
        for x in 0..n {
            entries[x * n + x] += a;
        }
        StochasticMatrix {
            space: self.space.clone(),
            entries,
            pi: self.pi.clone(),
        }
        .revalidated()
    }

    fn revalidated(self) -> Result<StochasticMatrix> {
        let pi = self.pi.clone();
        let m = StochasticMatrix::new(self.space, self.entries)?;
        match pi {
            Some(pi) => m.with_stationary(pi),
            None => Ok(m),
        }
    }

    /// The keep-S-in matrix `P^(S)` on `X^(S)` with respect to the attached
    /// stationary law; carries `pi^(S)`.
    ///
    /// Entry `(a, b)` is `sum pi(x) P(x, y) / sum pi(x)`, the numerator over all
    /// `x, y` with `x^(S) = a`, `y^(S) = b` and the denominator over `x^(S) = a`.
    pub fn keep_in(&self, subset: &CoordinateSubset) -> Result<StochasticMatrix> {
        let pi = self.require_stationary()?;
        self.space.check_subset(subset)?;
        if subset.is_empty() {
            return Err(Error::EmptySubset);
        }
        if subset.len() == self.space.d() {
            return Ok(self.clone());
        }
        let sub = self.space.subspace(subset)?;
        let proj = self.space.projector(subset)?;
        let (n, k) = (self.size(), sub.size());
        let mut num = vec![0.0; k * k];
        let mut den = vec![0.0; k];
        for (x, row) in self.entries.chunks_exact(n).enumerate() {
            let px = pi[x];
            let a = proj[x];
            den[a] += px;
            let dst = &mut num[a * k..(a + 1) * k];
            for (&p, &b) in row.iter().zip(&proj) {
                dst[b] += px * p;
            }
        }
        for (a, &d) in den.iter().enumerate() {
            for v in &mut num[a * k..(a + 1) * k] {
                *v /= d;
            }
        }
        let marginal = Distribution::new(sub.clone(), den)?;
        StochasticMatrix::new(sub, num)?.with_stationary(marginal)
    }

    /// The leave-S-out matrix `P^(-S)`, i.e. the keep-in matrix of the complement.
    pub fn leave_out(&self, subset: &CoordinateSubset) -> Result<StochasticMatrix> {
        self.space.check_subset(subset)?;
        let rest = subset.complement(self.space.d());
        if rest.is_empty() {
            return Err(Error::InvalidSubset(
                "leaving out every coordinate gives an empty space".into(),
            ));
        }
        self.keep_in(&rest)
    }
}

fn block_projectors<'a, I>(factors: I, space: &ProductSpace) -> Result<Vec<Vec<usize>>>
where
    I: Iterator<Item = (&'a ProductSpace, &'a CoordinateSubset)>,
{
    let mut blocks = Vec::new();
    let mut projs = Vec::new();
    for (fspace, subset) in factors {
        if subset.is_empty() {
            return Err(Error::InvalidPartition("empty block in tensor product".into()));
        }
        let expected = space.subspace(subset)?;
        if fspace != &expected {
            return Err(Error::DimensionMismatch(format!(
                "factor on {fspace} does not match X^{subset} = {expected}"
            )));
        }
        projs.push(space.projector(subset)?);
        blocks.push(subset.clone());
    }
    Partition::new(blocks)?.require_cover(space.d())?;
    Ok(projs)
}

/// Tensor product `Q^(S_1) (x) ... (x) Q^(S_m)` over a re-indexed product.
///
/// The blocks must be non-empty, pairwise disjoint and cover every coordinate.
/// Blocks need not be contiguous: each state's block coordinates are extracted
/// through the global codec. The result carries the product of the factors'
/// stationary laws when every factor has one.
pub fn tensor_product(
    factors: &[(&StochasticMatrix, &CoordinateSubset)],
    space: &ProductSpace,
) -> Result<StochasticMatrix> {
    let projs = block_projectors(factors.iter().map(|(q, s)| (q.space(), *s)), space)?;
    let n = space.size();
    let mut entries = vec![1.0; n * n];
    for ((q, _), proj) in factors.iter().zip(&projs) {
        let k = q.size();
        for x in 0..n {
            let qrow = &q.entries[proj[x] * k..(proj[x] + 1) * k];
            for (e, &b) in entries[x * n..(x + 1) * n].iter_mut().zip(proj) {
                *e *= qrow[b];
            }
        }
    }
    let m = StochasticMatrix::new(space.clone(), entries)?;
    let pis: Option<Vec<(&Distribution, &CoordinateSubset)>> = factors
        .iter()
        .map(|(q, s)| q.stationary().map(|p| (p, *s)))
        .collect();
    match pis {
        Some(pis) => {
            let pi = Distribution::tensor(&pis, space)?;
            m.with_stationary(pi)
        }
        None => Ok(m),
    }
}

/// An ordered family `{P_1, ..., P_n}` of transition matrices sharing one
/// stationary law.
#[derive(Debug, Clone)]
pub struct ChainFamily {
    members: Vec<StochasticMatrix>,
    pi: Distribution,
}

impl ChainFamily {
    /// Checks every member against `pi` and attaches it.
    pub fn new(pi: Distribution, members: Vec<StochasticMatrix>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidParameter("a chain family needs at least one member".into()));
        }
        let members = members
            .into_iter()
            .map(|m| m.with_stationary(pi.clone()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { members, pi })
    }

    pub fn members(&self) -> &[StochasticMatrix] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn pi(&self) -> &Distribution {
        &self.pi
    }

    pub fn space(&self) -> &ProductSpace {
        self.pi.space()
    }

    pub(crate) fn check_weights(&self, w: &SimplexWeights) -> Result<()> {
        if w.len() != self.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} weights for a family of {}",
                w.len(),
                self.len()
            )));
        }
        Ok(())
    }

    /// The weighted average `sum_i w_i P_i`, which is again `pi`-stationary.
    pub fn average(&self, w: &SimplexWeights) -> Result<StochasticMatrix> {
        self.check_weights(w)?;
        let mut entries = vec![0.0; self.members[0].entries.len()];
        for (m, wi) in self.members.iter().zip(w.iter()) {
            if wi == 0.0 {
                continue;
            }
            for (e, &p) in entries.iter_mut().zip(&m.entries) {
                *e += wi * p;
            }
        }
        StochasticMatrix::new(self.space().clone(), entries)?.with_stationary(self.pi.clone())
    }
}
