//! Projections of a random reversible chain onto coordinate blocks, the
//! distance to factorizability, and the Pythagorean decomposition for an
//! arbitrary product kernel.

use markov_minimax::info::{distance_to_factorizability, pythagorean_gap};
use markov_minimax::random;
use markov_minimax::{tensor_product, Partition, ProductSpace};

fn main() -> markov_minimax::Result<()> {
    let mut rng = random::rng(7);
    let space = ProductSpace::new(vec![2, 3, 2])?;
    let family = random::family(&mut rng, &space, 3)?;
    let partition = Partition::from_lists(&[&[1, 3], &[2]])?;

    for (i, p) in family.members().iter().enumerate() {
        let d = distance_to_factorizability(p, &partition)?;
        println!("P{}: D(P || factorized) = {:.6}", i + 1, d.to_f64());
    }

    let w = random::weights(&mut rng, family.len());
    let avg = family.average(&w)?;
    for block in partition.blocks() {
        let proj = avg.keep_in(block)?;
        println!("block {block}: {}x{} projection, stationarity residual {:.1e}",
            proj.size(), proj.size(), proj.stationarity_residual(proj.stationary().unwrap()));
    }

    // Any product of stationary block kernels satisfies the identity.
    let q: Vec<_> = partition
        .blocks()
        .iter()
        .map(|b| {
            let pi = family.pi().marginal(b)?;
            random::reversible_chain(&mut rng, &pi, 0.0)
        })
        .collect::<markov_minimax::Result<_>>()?;
    let gap = pythagorean_gap(&family, &partition, &q, &w)?;
    println!("Pythagorean gap = {gap:.2e}");

    let pairs: Vec<_> = q.iter().zip(partition.blocks()).collect();
    let product = tensor_product(&pairs, &space)?;
    let zero = distance_to_factorizability(&product, &partition)?;
    println!("D(Q || factorized) = {:.1e} for the product kernel Q", zero.to_f64());
    Ok(())
}
