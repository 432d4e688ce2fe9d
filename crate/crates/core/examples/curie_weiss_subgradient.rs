//! Projected subgradient descent on a Curie-Weiss family: d = 5, T = 10,
//! h = 1, members P, P^2, P^4, P^8, P^16, partition ({1,2}, {3,5}, {4}).

use markov_minimax::models::{build_family, curie_weiss_chain, dyadic_powers, CurieWeissParams};
use markov_minimax::optimizer::{run_projected_subgradient, BoundSource, SubgradientConfig};
use markov_minimax::{DualObjectiveContext, Partition, SimplexWeights};

fn fmt(w: &SimplexWeights) -> String {
    let parts: Vec<String> = w.iter().map(|x| format!("{x:.2}")).collect();
    format!("({})", parts.join(", "))
}

fn main() -> markov_minimax::Result<()> {
    let (p, _) = curie_weiss_chain(&CurieWeissParams::new(5, 10.0, 1.0))?;
    let family = build_family(&p, &dyadic_powers(5))?;
    let partition = Partition::from_lists(&[&[1, 2], &[3, 5], &[4]])?;
    let ctx = DualObjectiveContext::new(family, partition)?;

    let cfg = SubgradientConfig::new(300).with_bound(BoundSource::Initial);
    let trace = run_projected_subgradient(&ctx, &cfg)?;
    println!("B = {:.4}, eta = {:.4}", trace.bound, trace.step);

    let w_ex = SimplexWeights::vertex(5, 0);
    let rows = [
        ("argmin", trace.argmin_weights().clone()),
        ("average", trace.average.clone()),
        ("initial", trace.initial().clone()),
        ("extreme", w_ex),
        ("final", trace.last().clone()),
    ];
    for (label, w) in &rows {
        println!("{label:>8}  w = {}  h = {:.2}", fmt(w), ctx.h(w)?);
    }
    Ok(())
}
