//! Write a KIBA-shaped synthetic dataset with a planted motif signal.
//!
//! `cargo run --example synthetic_dataset -- <dir> [n_drugs] [n_proteins] [seed]`
//! then `resdta prepare --data-dir <dir> ...`.

use resdta::dataset::{load_kiba, DatasetSummary};
use resdta::synthetic::{generate, write_kiba_files, SyntheticSpec};

fn run(dir: &str, spec: &SyntheticSpec) -> resdta::Result<()> {
    let raw = generate(spec)?;
    let paths = write_kiba_files(&raw, dir)?;
    let back = load_kiba(&paths.drugs, &paths.proteins, &paths.affinity)?;
    let s = DatasetSummary::of(&back, 100, 1000);
    println!("wrote {}, {}, {}", paths.drugs.display(), paths.proteins.display(), paths.affinity.display());
    println!(
        "{} drugs, {} proteins, {} interactions, affinity {:.2}..{:.2}",
        s.drugs, s.proteins, s.interactions, s.affinity_min, s.affinity_max
    );
    Ok(())
}

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let Some(dir) = args.first() else {
        eprintln!("usage: synthetic_dataset <dir> [n_drugs] [n_proteins] [seed]");
        std::process::exit(1);
    };
    let num = |i: usize| args.get(i).and_then(|s| s.parse::<usize>().ok());
    let spec = SyntheticSpec {
        n_drugs: num(1).unwrap_or(24),
        n_proteins: num(2).unwrap_or(12),
        seed: num(3).unwrap_or(0) as u64,
        ..SyntheticSpec::default()
    };
    if let Err(e) = run(dir, &spec) {
        eprintln!("error: {e}");
        std::process::exit(2);
    }
}
