//! Game-theoretic diagnostics along a subgradient run: the gap between the
//! worst member divergence and the dual value shrinks as `w-bar` settles.

use markov_minimax::optimizer::{equilibrium_diagnostics, run_projected_subgradient, SubgradientConfig};
use markov_minimax::random;
use markov_minimax::{DualObjectiveContext, Partition, ProductSpace};

fn main() -> markov_minimax::Result<()> {
    let mut rng = random::rng(311);
    let family = random::family(&mut rng, &ProductSpace::binary(2)?, 2)?;
    let ctx = DualObjectiveContext::new(family, Partition::from_lists(&[&[1], &[2]])?)?;

    println!("{:>6}  {:>18}  {:>10}  {:>10}", "t", "w-bar", "dual", "gap");
    for t in [10, 100, 1000, 10_000] {
        let trace = run_projected_subgradient(&ctx, &SubgradientConfig::new(t))?;
        let r = equilibrium_diagnostics(&ctx, &trace.average)?;
        let w: Vec<String> = r.weights.iter().map(|x| format!("{x:.4}")).collect();
        println!("{t:>6}  {:>18}  {:>10.6}  {:>10.2e}", w.join(", "), r.dual_value, r.gap);
    }
    Ok(())
}
