//! The objective `f` over every sub-tuple of a small ground partition, split
//! into the submodular part `g` and the modular cost `c`.

use markov_minimax::random;
use markov_minimax::{GreedyContext, Partition, ProductSpace, SimplexWeights};

fn main() -> markov_minimax::Result<()> {
    let mut rng = random::rng(5);
    let family = random::family(&mut rng, &ProductSpace::binary(4)?, 3)?;
    let ctx = GreedyContext::new(family, Partition::from_lists(&[&[1, 2], &[3]])?, 3)?;
    let ev = ctx.at(&SimplexWeights::uniform(3))?;

    println!("beta = {:.5}, max cost = {:.5}", ev.beta()?, ev.max_cost()?);
    for e in ctx.ground().support().iter() {
        println!("a_{e} = {:+.5}", ev.element_cost(e)?);
    }
    println!("{:>16}  {:>9}  {:>9}  {:>9}", "S", "f", "g", "c");
    for s in ctx.ground().sub_tuples() {
        println!("{:>16}  {:>9.5}  {:>9.5}  {:>9.5}", s.to_string(), ev.f(&s)?, ev.g(&s)?, ev.c(&s)?);
    }
    Ok(())
}
