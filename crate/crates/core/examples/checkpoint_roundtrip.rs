//! Save weights, reload them, and check predictions are unchanged.

use resdta::model::{init_params, load_checkpoint, load_checkpoint_expecting, predict_one, save_checkpoint, ModelConfig};
use resdta::vocab::{protein_vocabulary, smiles_vocabulary};

fn run() -> resdta::Result<()> {
    let cfg = ModelConfig::compact();
    let params = init_params(&cfg, 7)?;
    let drug = smiles_vocabulary().encode("CC(=O)Nc1ccc(O)cc1", cfg.smiles_len)?;
    let protein = protein_vocabulary().encode("MSGRPRTTSFAESCKPVQQPSAFGSMKVSRDKDGSKVTTVVATPGQGPDRPQEVSYTDTKVIGNGSFGVVYQAKL", cfg.protein_len)?;
    let before = predict_one(&params, &drug.tokens, &protein.tokens)?;

    let dir = std::env::temp_dir().join(format!("resdta-ckpt-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("model.ckpt");
    save_checkpoint(&params, 12, &path)?;
    let bytes = std::fs::metadata(&path)?.len();
    let ck = load_checkpoint(&path)?;
    let after = predict_one(&ck.params, &drug.tokens, &protein.tokens)?;
    println!("{} parameters, {bytes} bytes, epoch {}", ck.params.num_parameters(), ck.epoch);
    println!("prediction before {before:.12}  after {after:.12}  identical: {}", before == after);

    let other = ModelConfig { use_skip: false, ..cfg };
    match load_checkpoint_expecting(&path, &other) {
        Err(e) => println!("loading into the ablation config: {e}"),
        Ok(_) => unreachable!(),
    }
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(2);
    }
}
