//! Seeded generators for test instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chain::{ChainFamily, Distribution, StochasticMatrix};
use crate::error::Result;
use crate::space::{CoordinateSubset, Partition, ProductSpace};
use crate::weights::SimplexWeights;

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn normalized(mut v: Vec<f64>) -> Vec<f64> {
    let s: f64 = v.iter().sum();
    for x in &mut v {
        *x /= s;
    }
    v
}

/// Full-support distribution with entries drawn from `[0.05, 1)` and normalized.
pub fn distribution<R: Rng>(rng: &mut R, space: &ProductSpace) -> Result<Distribution> {
    let v = (0..space.size()).map(|_| rng.gen_range(0.05..1.0)).collect();
    Distribution::new(space.clone(), normalized(v))
}

/// Row-stochastic matrix with strictly positive random rows and no attached law.
pub fn stochastic<R: Rng>(rng: &mut R, space: &ProductSpace) -> Result<StochasticMatrix> {
    let n = space.size();
    let entries = (0..n)
        .flat_map(|_| normalized((0..n).map(|_| rng.gen_range(0.05..1.0)).collect()))
        .collect();
    StochasticMatrix::new(space.clone(), entries)
}

/// A `pi`-reversible chain from a random symmetric flow matrix.
///
/// Off-diagonal flows `A(x,y) = u * min(pi(x), pi(y)) / |X|` keep every row's
/// outflow below `pi(x)`; the diagonal absorbs the remainder. With
/// `sparsity > 0`, each off-diagonal flow is zeroed with that probability.
pub fn reversible_chain<R: Rng>(rng: &mut R, pi: &Distribution, sparsity: f64) -> Result<StochasticMatrix> {
    let n = pi.space().size();
    let mut entries = vec![0.0; n * n];
    for x in 0..n {
        for y in x + 1..n {
            if sparsity > 0.0 && rng.gen_bool(sparsity) {
                continue;
            }
            let flow = rng.gen_range(0.0..1.0) * pi[x].min(pi[y]) / n as f64;
            entries[x * n + y] = flow / pi[x];
            entries[y * n + x] = flow / pi[y];
        }
    }
    for x in 0..n {
        let off: f64 = entries[x * n..(x + 1) * n].iter().sum();
        entries[x * n + x] = 1.0 - off;
    }
    StochasticMatrix::new(pi.space().clone(), entries)?.with_stationary(pi.clone())
}

/// `n` reversible chains sharing a random stationary law.
pub fn family<R: Rng>(rng: &mut R, space: &ProductSpace, n: usize) -> Result<ChainFamily> {
    let pi = distribution(rng, space)?;
    let members = (0..n)
        .map(|_| reversible_chain(rng, &pi, 0.0))
        .collect::<Result<Vec<_>>>()?;
    ChainFamily::new(pi, members)
}

/// Flat Dirichlet(1) sample.
pub fn weights<R: Rng>(rng: &mut R, n: usize) -> SimplexWeights {
    let v = (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    SimplexWeights::from_raw(normalized(v))
}

/// A random covering partition of `[d]` into non-empty blocks, block order by
/// smallest element.
pub fn covering_partition<R: Rng>(rng: &mut R, d: usize) -> Partition {
    let labels: Vec<usize> = (0..d).map(|_| rng.gen_range(0..d)).collect();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut seen: Vec<usize> = Vec::new();
    for (i, &l) in labels.iter().enumerate() {
        match seen.iter().position(|&s| s == l) {
            Some(b) => blocks[b].push(i + 1),
            None => {
                seen.push(l);
                blocks.push(vec![i + 1]);
            }
        }
    }
    Partition::new(
        blocks
            .into_iter()
            .map(|b| CoordinateSubset::new(b).expect("distinct coordinates"))
            .collect(),
    )
    .expect("disjoint blocks")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_valid_and_seeded() {
        let space = ProductSpace::new(vec![2, 3]).unwrap();
        let fam = family(&mut rng(7), &space, 3).unwrap();
        let again = family(&mut rng(7), &space, 3).unwrap();
        assert_eq!(fam.members(), again.members());
        let mut r = rng(1);
        for _ in 0..20 {
            let p = covering_partition(&mut r, 4);
            assert!(p.covers(4));
            let w = weights(&mut r, 3);
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        let pi = distribution(&mut r, &space).unwrap();
        let sparse = reversible_chain(&mut r, &pi, 0.5).unwrap();
        assert!(sparse.entries().contains(&0.0));
    }
}
