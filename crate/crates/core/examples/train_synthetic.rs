//! Train the compact model on synthetic data and score the held-out part.
//!
//! `cargo run --release --example train_synthetic -- [epochs]`

use resdta::dataset::{make_folds, EncodedDataset};
use resdta::metrics::FoldMetrics;
use resdta::model::{init_params, ModelConfig};
use resdta::synthetic::{generate, SyntheticSpec};
use resdta::training::{fit_with_observer, predict, ProgressLog, TrainConfig};
use resdta::vocab::{protein_vocabulary, smiles_vocabulary, UnknownPolicy};

fn run(epochs: usize) -> resdta::Result<()> {
    let raw = generate(&SyntheticSpec { n_drugs: 30, n_proteins: 16, ..SyntheticSpec::default() })?;
    let model = ModelConfig::compact();
    let data = EncodedDataset::encode(
        &raw,
        &smiles_vocabulary(),
        &protein_vocabulary(),
        model.smiles_len,
        model.protein_len,
        UnknownPolicy::Strict,
    )?;
    let split = make_folds(data.len(), 0)?;
    let train = split.train_indices(0);
    let val = split.validation_indices(0);

    let cfg = TrainConfig {
        lr_initial: 2e-3,
        batch_size: 32,
        epochs,
        lr_drop_period: epochs.div_ceil(2),
        restart_period: epochs.div_ceil(3).max(1),
        ..TrainConfig::default()
    };
    let params = init_params(&model, 0)?;
    let mut log = ProgressLog(std::io::stderr());
    let out = fit_with_observer(params, &data, &train, val, &cfg, &mut log)?;
    println!("best epoch {} with validation MSE {:.4}", out.history.best_epoch, out.history.best_val_mse);

    let pred = predict(&out.best, &data, &split.test)?;
    let m = FoldMetrics::evaluate(&data.targets(&split.test), &pred)?;
    println!("test: CI {:.3}  MSE {:.4}  rm2 {:.3}", m.ci, m.mse, m.rm2);
    Ok(())
}

fn main() {
    let epochs = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(60);
    if let Err(e) = run(epochs) {
        eprintln!("error: {e}");
        std::process::exit(3);
    }
}
