//! Six-part split of the KIBA interaction count: one test part, five CV folds.
//!
//! `cargo run --example kfold_splits -- [n_interactions] [seed]`

use resdta::dataset::{load_fold_files, make_folds, CV_FOLDS};

fn run(n: usize, seed: u64) -> resdta::Result<()> {
    let split = make_folds(n, seed)?;
    split.validate(n)?;
    let sizes: Vec<usize> = split.parts().map(<[usize]>::len).collect();
    println!("{n} interactions, seed {seed}: part sizes {sizes:?}");
    for fold in 0..CV_FOLDS {
        println!(
            "  fold {fold}: train {}  validation {}",
            split.train_indices(fold).len(),
            split.validation_indices(fold).len()
        );
    }
    println!("  test: {}", split.test.len());

    let dir = std::env::temp_dir().join(format!("resdta-folds-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let (test, cv) = (dir.join("test.json"), dir.join("cv.json"));
    split.write_files(&test, &cv)?;
    let back = load_fold_files(&test, &cv, n)?;
    println!("reloaded from {}: identical = {}", dir.display(), back.test == split.test && back.cv_folds == split.cv_folds);
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n = args.first().and_then(|s| s.parse().ok()).unwrap_or(118_254);
    let seed = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    if let Err(e) = run(n, seed) {
        eprintln!("error: {e}");
        std::process::exit(2);
    }
}
