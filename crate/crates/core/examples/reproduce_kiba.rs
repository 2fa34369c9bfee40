//! Full KIBA protocol: five CV folds, 400 epochs, batch 256, scored on the
//! held-out sixth. Published targets: CI 0.885 and r_m² 0.671.
//!
//! Needs the KIBA files (drugs, proteins, affinity grid) in `$RESDTA_DATA_DIR`
//! and a lot of compute. Pass `--epochs N` and `--limit N` for a shorter run.
//!
//! `RESDTA_DATA_DIR=/data/kiba cargo run --release --example reproduce_kiba -- [out_dir] [--epochs N] [--limit N]`

use std::path::PathBuf;

use resdta::pipeline::{cmd_evaluate, cmd_prepare, cmd_train, EvalSource, RunConfig, DATA_DIR_ENV};

const TARGET_CI: (f64, f64) = (0.885, 0.01);
const TARGET_RM2: (f64, f64) = (0.671, 0.03);

fn run(cfg: &RunConfig) -> resdta::Result<bool> {
    let mut log = std::io::stderr();
    let prepared = cmd_prepare(cfg, &mut log)?;
    println!(
        "{} drugs, {} proteins, {} interactions",
        prepared.summary.drugs, prepared.summary.proteins, prepared.summary.interactions
    );
    cmd_train(cfg, &mut log)?;
    let r = cmd_evaluate(cfg, &EvalSource::BestPerFold, &mut log)?;
    println!("CI   {:.4} ± {:.4}   target {} ± {}", r.mean.ci, r.std.ci, TARGET_CI.0, TARGET_CI.1);
    println!("MSE  {:.4} ± {:.4}", r.mean.mse, r.std.mse);
    println!("rm2  {:.4} ± {:.4}   target {} ± {}", r.mean.rm2, r.std.rm2, TARGET_RM2.0, TARGET_RM2.1);
    let ok = (r.mean.ci - TARGET_CI.0).abs() <= TARGET_CI.1 && (r.mean.rm2 - TARGET_RM2.0).abs() <= TARGET_RM2.1;
    println!("{}", if ok { "within published ranges" } else { "outside published ranges" });
    Ok(ok)
}

fn main() {
    if std::env::var_os(DATA_DIR_ENV).is_none() {
        eprintln!("set {DATA_DIR_ENV} to a directory with the KIBA files");
        std::process::exit(1);
    }
    let mut cfg = RunConfig { out_dir: PathBuf::from("resdta-kiba"), ..RunConfig::default() };
    let mut args = std::env::args().skip(1);
    while let Some(a) = args.next() {
        let mut num = || args.next().and_then(|v| v.parse::<usize>().ok());
        match a.as_str() {
            "--epochs" => {
                cfg.train.epochs = num().unwrap_or(cfg.train.epochs);
                cfg.train.restart_period = cfg.train.restart_period.min(cfg.train.epochs);
            }
            "--limit" => cfg.limit = num(),
            other => cfg.out_dir = PathBuf::from(other),
        }
    }
    match run(&cfg) {
        Ok(_) => {}
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(resdta::pipeline::exit_code(&e));
        }
    }
}
