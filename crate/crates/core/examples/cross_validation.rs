//! The full prepare, train, evaluate, report pipeline through the library API,
//! on synthetic data with the compact model.
//!
//! `cargo run --release --example cross_validation -- [out_dir] [epochs]`

use std::path::{Path, PathBuf};

use resdta::model::ModelConfig;
use resdta::pipeline::{cmd_evaluate, cmd_prepare, cmd_report, cmd_train, EvalSource, FoldSelector, RunConfig};
use resdta::synthetic::{generate, write_kiba_files, SyntheticSpec};
use resdta::training::TrainConfig;

fn run(out: &Path, epochs: usize) -> resdta::Result<()> {
    let raw = generate(&SyntheticSpec { n_drugs: 20, n_proteins: 10, ..SyntheticSpec::default() })?;
    write_kiba_files(&raw, out.join("data"))?;
    let cfg = RunConfig {
        data_dir: Some(out.join("data")),
        out_dir: out.join("run"),
        folds: FoldSelector::All,
        model: ModelConfig::compact(),
        train: TrainConfig {
            lr_initial: 2e-3,
            batch_size: 32,
            epochs,
            lr_drop_period: epochs,
            restart_period: epochs,
            ..TrainConfig::default()
        },
        ..RunConfig::default()
    };
    let mut log = std::io::stderr();
    cmd_prepare(&cfg, &mut log)?;
    let trained = cmd_train(&cfg, &mut log)?;
    for t in &trained {
        println!("fold {}: best epoch {}  val MSE {:.4}", t.fold, t.best_epoch, t.best_val_mse);
    }
    let report = cmd_evaluate(&cfg, &EvalSource::BestPerFold, &mut log)?;
    println!(
        "test over {} folds: CI {:.3} ± {:.3}  MSE {:.4} ± {:.4}  rm2 {:.3} ± {:.3}",
        report.n_folds, report.mean.ci, report.std.ci, report.mean.mse, report.std.mse, report.mean.rm2, report.std.rm2
    );
    let summary = cmd_report(&cfg.out_dir.join("eval").join("predictions_fold0.csv"), &cfg.out_dir, true, &mut log)?;
    if let Some(line) = summary.line {
        println!("fold 0 regression: predicted = {:.3} + {:.3} * measured", line.intercept, line.slope);
    }
    println!("artifacts under {}", cfg.out_dir.display());
    Ok(())
}

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let out = args
        .first()
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("resdta-cv"));
    let epochs = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(20);
    if let Err(e) = run(&out, epochs) {
        eprintln!("error: {e}");
        std::process::exit(resdta::pipeline::exit_code(&e));
    }
}
