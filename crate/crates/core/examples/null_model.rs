//! An untrained network ranks pairs at chance: CI near 0.5 on every seed.
//!
//! Uses the full-size architecture on synthetic data with many distinct
//! drugs and proteins, so the scored pairs are close to independent.
//! `cargo run --release --example null_model -- [max_pairs]`

use resdta::dataset::{make_folds, EncodedDataset};
use resdta::metrics::concordance_index;
use resdta::model::{init_params, ModelConfig};
use resdta::synthetic::{generate, SyntheticSpec};
use resdta::training::predict;
use resdta::vocab::{protein_vocabulary, smiles_vocabulary, UnknownPolicy};

fn run(n: usize) -> resdta::Result<()> {
    let cfg = ModelConfig::default();
    let raw = generate(&SyntheticSpec {
        n_drugs: 300,
        n_proteins: 200,
        missing_fraction: 0.97,
        seed: 6,
        ..SyntheticSpec::default()
    })?;
    let data = EncodedDataset::encode(
        &raw,
        &smiles_vocabulary(),
        &protein_vocabulary(),
        cfg.smiles_len,
        cfg.protein_len,
        UnknownPolicy::Strict,
    )?;
    let split = make_folds(data.len(), 0)?;
    let fold = split.validation_indices(0);
    let idx = &fold[..fold.len().min(n)];
    let actual = data.targets(idx);
    for seed in 0..3 {
        let params = init_params(&cfg, seed)?;
        let pred = predict(&params, &data, idx)?;
        println!("seed {seed}: CI {:.4} over {} pairs", concordance_index(&actual, &pred)?, idx.len());
    }
    Ok(())
}

fn main() {
    let n = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(120);
    if let Err(e) = run(n) {
        eprintln!("error: {e}");
        std::process::exit(3);
    }
}
