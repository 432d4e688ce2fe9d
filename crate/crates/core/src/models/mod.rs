//! Experiment chains: Curie-Weiss Glauber dynamics, families of powers and
//! lazy versions of a base kernel, and chain files.

pub mod curie_weiss;
pub mod family;
pub mod io;

pub use curie_weiss::{curie_weiss_chain, CurieWeissParams};
pub use family::{build_family, dyadic_powers, Transform};
pub use io::{load_chain_file, save_csv, save_json, ChainFile};
