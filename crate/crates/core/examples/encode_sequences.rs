//! Label-encode a SMILES string and a protein sequence.
//!
//! `cargo run --example encode_sequences -- "CN=C=O" MKTAYIAKQR`

use resdta::vocab::{encode, protein_vocabulary, smiles_vocabulary, UnknownPolicy};

fn run(smiles: &str, protein: &str) -> resdta::Result<()> {
    let sv = smiles_vocabulary();
    let pv = protein_vocabulary();
    println!("SMILES vocabulary: {} symbols, pad label {}", sv.size(), sv.pad_label());
    println!("protein vocabulary: {} symbols", pv.size());

    let d = encode(smiles, &sv, 100)?;
    println!("{smiles} -> {:?} (+{} pad)", &d.tokens[..d.true_length], d.max_len() - d.true_length);
    let p = encode(protein, &pv, 1000)?;
    println!("{protein} -> {:?} (+{} pad)", &p.tokens[..p.true_length], p.max_len() - p.true_length);

    // Strict mode names the offending character; a fallback label maps it instead.
    match sv.encode("CC[Xe]", 100) {
        Err(e) => println!("strict: {e}"),
        Ok(_) => unreachable!("'X' is not a SMILES symbol"),
    }
    let lenient = sv.encode_with("CC[Xe]", 8, UnknownPolicy::Fallback(1))?;
    println!("fallback: {:?}", lenient.tokens);
    Ok(())
}

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let smiles = args.first().map_or("CN=C=O", String::as_str);
    let protein = args.get(1).map_or("MKTAYIAKQRQISFVKSHFSRQ", String::as_str);
    if let Err(e) = run(smiles, protein) {
        eprintln!("error: {e}");
        std::process::exit(2);
    }
}
