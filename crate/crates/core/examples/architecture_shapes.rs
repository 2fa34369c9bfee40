//! Print the length and width chain of the default network and the ablation.

use resdta::model::{conv_output_length, init_params, ModelConfig};

fn describe(name: &str, cfg: &ModelConfig) -> resdta::Result<()> {
    let s = cfg.shapes()?;
    println!("{name}");
    println!("  drug conv lengths     {:?}", s.drug);
    println!("  protein conv lengths  {:?}", s.protein);
    println!("  combined input        {} channels x {}", s.combined_channels, s.combined_input);
    println!("  combined conv lengths {:?}", s.combined);
    println!("  pooled widths         stream {}  combined {}", s.stream_pool_width, s.combined_pool_width);
    println!("  FC input              {}", s.fc_input);
    println!("  FC layers             {:?}", cfg.fc_dims);
    Ok(())
}

fn run() -> resdta::Result<()> {
    println!("L_out(100; k=8, s=1, p=0, d=1) = {}", conv_output_length(100, 8, 1, 0, 1)?);
    let full = ModelConfig::default();
    describe("with skip pooling", &full)?;
    describe("without skip pooling", &ModelConfig { use_skip: false, ..full.clone() })?;
    let params = init_params(&full, 0)?;
    println!("parameters: {}", params.num_parameters());
    for t in params.tensors().iter().take(4) {
        println!("  {:<28} {:?}", t.name, t.shape);
    }
    // A kernel longer than the input has no valid output.
    if let Err(e) = conv_output_length(5, 8, 1, 0, 1) {
        println!("L_in=5, k=8: {e}");
    }
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(3);
    }
}
