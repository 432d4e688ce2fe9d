//! Writing a family to JSON and a single kernel to CSV, reading both back,
//! and checking them the way `markov-minimax validate` does.

use markov_minimax::info::distance_to_factorizability;
use markov_minimax::models::{build_family, curie_weiss_chain, dyadic_powers, load_chain_file, save_csv, save_json};
use markov_minimax::models::CurieWeissParams;
use markov_minimax::Partition;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("markov-minimax-example");
    std::fs::create_dir_all(&dir)?;
    let (p, pi) = curie_weiss_chain(&CurieWeissParams::new(3, 10.0, 1.0))?;
    let family = build_family(&p, &dyadic_powers(3))?;

    let json = dir.join("cw3.json");
    let names = ["P", "P2", "P4"];
    let named: Vec<_> = names.iter().copied().zip(family.members()).collect();
    save_json(&json, &pi, &named)?;
    let csv = dir.join("cw3.csv");
    save_csv(&csv, "P", &pi, &p)?;

    let partition = Partition::from_lists(&[&[1], &[2, 3]])?;
    for path in [&json, &csv] {
        let file = load_chain_file(path)?;
        println!("{}", path.display());
        for m in file.family()?.members() {
            let d = distance_to_factorizability(m, &partition)?;
            println!("  residual {:.1e}  D(P || factorized) = {:.6}", m.stationarity_residual(&pi), d.to_f64());
        }
    }
    Ok(())
}
