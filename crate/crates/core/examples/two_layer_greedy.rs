//! Joint partition and weight optimization on the Curie-Weiss family with
//! ground partition V = ({1,2}, {3,5}) and K = 30 inner steps per round.

use markov_minimax::models::{build_family, curie_weiss_chain, dyadic_powers, CurieWeissParams};
use markov_minimax::optimizer::{run_two_layer, TwoLayerConfig};
use markov_minimax::{GreedyContext, Partition};

fn main() -> markov_minimax::Result<()> {
    let (p, _) = curie_weiss_chain(&CurieWeissParams::new(5, 10.0, 1.0))?;
    let family = build_family(&p, &dyadic_powers(5))?;
    let ground = Partition::from_lists(&[&[1, 2], &[3, 5]])?;
    let limit = ground.support().len();
    let ctx = GreedyContext::new(family, ground, limit)?;

    let trace = run_two_layer(&ctx, &TwoLayerConfig::new(30))?;
    for r in &trace.rounds {
        let pick = match r.best {
            Some((j, e, g)) => format!("best {e} -> S{} (gain {g:+.4})", j + 1),
            None => "no candidate".into(),
        };
        println!(
            "round {}: f {:.4} -> {:.4}  {pick}{}  S = {}",
            r.round + 1,
            r.f_before,
            r.f_after,
            if r.inserted { "" } else { ", skipped" },
            r.tuple_after
        );
    }
    let w: Vec<String> = trace.final_weights.iter().map(|x| format!("{x:.2}")).collect();
    println!("final S = {}  w = ({})", trace.final_tuple, w.join(", "));
    Ok(())
}
