use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use resdta::pipeline::{self, EvalSource, FoldSelector, RunConfig};
use resdta::Error;

/// Drug–target affinity prediction with a three-stream 1-D CNN.
#[derive(Parser, Debug)]
#[command(name = "resdta", version)]
struct Cli {
    #[command(flatten)]
    shared: Shared,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Shared {
    /// JSON run configuration; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for every artifact.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// 0..4, all, or test (evaluate only).
    #[arg(long, global = true)]
    folds: Option<FoldSelector>,
    /// Cap every index list at N records.
    #[arg(long, global = true)]
    limit: Option<usize>,
    /// Redo work even if outputs look current.
    #[arg(long, global = true)]
    force: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Encode the raw data and write folds. Data dir defaults to $RESDTA_DATA_DIR.
    Prepare {
        #[arg(long)]
        data_dir: Option<PathBuf>,
        #[arg(long)]
        drugs: Option<PathBuf>,
        #[arg(long)]
        proteins: Option<PathBuf>,
        #[arg(long)]
        affinity: Option<PathBuf>,
        /// External test-fold file (needs --fold-cv).
        #[arg(long)]
        fold_test: Option<PathBuf>,
        #[arg(long)]
        fold_cv: Option<PathBuf>,
        /// Negate and shift raw KIBA scores.
        #[arg(long)]
        kiba_transform: bool,
    },
    /// Train the selected CV folds.
    Train {
        #[arg(long)]
        epochs: Option<usize>,
        #[arg(long)]
        batch_size: Option<usize>,
        #[arg(long)]
        lr: Option<f64>,
        #[arg(long)]
        accumulation_steps: Option<usize>,
        #[arg(long)]
        restart_period: Option<usize>,
        /// Ablation: only the last conv layer feeds each stream representation.
        #[arg(long)]
        no_skip: bool,
    },
    /// Score checkpoints on the held-out test part.
    Evaluate {
        /// A single checkpoint instead of each fold's best.
        #[arg(long, conflicts_with = "random_init")]
        checkpoint: Option<PathBuf>,
        /// Score untrained weights (null model).
        #[arg(long)]
        random_init: bool,
    },
    /// Predict affinities for a TSV of drug_id, smiles, protein_id, sequence.
    Predict {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        input: PathBuf,
        /// Defaults to <out>/predictions.csv.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Scatter data, regression line and metric table from a predictions CSV.
    Report {
        #[arg(long)]
        predictions: PathBuf,
        /// Also render scatter.svg.
        #[arg(long)]
        svg: bool,
    },
}

fn build_config(shared: &Shared, command: &Command) -> resdta::Result<RunConfig> {
    let mut cfg = match &shared.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    if let Some(out) = &shared.out {
        cfg.out_dir = out.clone();
    }
    if let Some(seed) = shared.seed {
        cfg.seed = seed;
    }
    if let Some(folds) = shared.folds {
        cfg.folds = folds;
    }
    if shared.limit.is_some() {
        cfg.limit = shared.limit;
    }
    cfg.force |= shared.force;
    match command {
        Command::Prepare {
            data_dir,
            drugs,
            proteins,
            affinity,
            fold_test,
            fold_cv,
            kiba_transform,
        } => {
            let set = |slot: &mut Option<PathBuf>, v: &Option<PathBuf>| {
                if v.is_some() {
                    *slot = v.clone();
                }
            };
            set(&mut cfg.data_dir, data_dir);
            set(&mut cfg.drug_file, drugs);
            set(&mut cfg.protein_file, proteins);
            set(&mut cfg.affinity_file, affinity);
            set(&mut cfg.fold_test_file, fold_test);
            set(&mut cfg.fold_cv_file, fold_cv);
            cfg.kiba_transform |= kiba_transform;
        }
        Command::Train {
            epochs,
            batch_size,
            lr,
            accumulation_steps,
            restart_period,
            no_skip,
        } => {
            let t = &mut cfg.train;
            if let Some(e) = *epochs {
                t.epochs = e;
                // A short run without an explicit period simply never restarts.
                if restart_period.is_none() && t.restart_period > e {
                    t.restart_period = e.max(1);
                }
            }
            if let Some(b) = *batch_size {
                t.batch_size = b;
            }
            if let Some(lr) = *lr {
                t.lr_initial = lr;
            }
            if let Some(a) = *accumulation_steps {
                t.accumulation_steps = a;
            }
            if let Some(r) = *restart_period {
                t.restart_period = r;
            }
            if *no_skip {
                cfg.model.use_skip = false;
            }
            if cfg.folds == FoldSelector::Test {
                return Err(Error::InvalidConfig("--folds test is only valid for evaluate".into()));
            }
        }
        _ => {}
    }
    Ok(cfg)
}

fn run(cli: Cli) -> resdta::Result<()> {
    let cfg = build_config(&cli.shared, &cli.command)?;
    let mut err = std::io::stderr().lock();
    let log: &mut dyn Write = &mut err;
    match &cli.command {
        Command::Prepare { .. } => {
            pipeline::cmd_prepare(&cfg, log)?;
        }
        Command::Train { .. } => {
            for f in pipeline::cmd_train(&cfg, log)? {
                writeln!(
                    log,
                    "fold {}: best epoch {} val_mse {:.5} -> {}",
                    f.fold,
                    f.best_epoch,
                    f.best_val_mse,
                    f.checkpoint.display()
                )?;
            }
        }
        Command::Evaluate {
            checkpoint,
            random_init,
        } => {
            let source = match (checkpoint, random_init) {
                (Some(p), _) => EvalSource::Checkpoint(p.clone()),
                (None, true) => EvalSource::RandomInit,
                (None, false) => EvalSource::BestPerFold,
            };
            let r = pipeline::cmd_evaluate(&cfg, &source, log)?;
            writeln!(
                log,
                "mean over {}: CI {:.4} ± {:.4}  MSE {:.4} ± {:.4}  rm2 {:.4} ± {:.4}",
                r.n_folds, r.mean.ci, r.std.ci, r.mean.mse, r.std.mse, r.mean.rm2, r.std.rm2
            )?;
        }
        Command::Predict {
            checkpoint,
            input,
            output,
        } => {
            let output = output
                .clone()
                .unwrap_or_else(|| cfg.out_dir.join("predictions.csv"));
            pipeline::cmd_predict(&cfg, checkpoint, input, &output, log)?;
        }
        Command::Report { predictions, svg } => {
            pipeline::cmd_report(predictions, &cfg.out_dir, *svg, log)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(pipeline::exit_code(&e) as u8)
        }
    }
}
