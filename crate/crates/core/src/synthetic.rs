//! Small KIBA-shaped datasets with a planted, learnable signal.
//!
//! Drugs may carry an amide motif and proteins a short kinase-like motif;
//! the affinity is a baseline near typical KIBA magnitudes plus bonuses for
//! each motif and their co-occurrence, plus Gaussian noise. Because the
//! motifs are local, a conv + global-max-pool model can pick them up.

use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::dataset::{KibaPaths, NamedSequence, RawDataset};
use crate::error::{Error, Result};

const DRUG_ALPHABET: &[u8] = b"CCCCCCcccNNOOSFl()=123";
const PROTEIN_ALPHABET: &[u8] = b"ACDEFGHIKLMNPQRSTVWY";
const DRUG_MOTIF: &str = "C(=O)N";
const PROTEIN_MOTIF: &str = "HRDLKP";

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub n_drugs: usize,
    pub n_proteins: usize,
    pub smiles_len: (usize, usize),
    pub protein_len: (usize, usize),
    pub missing_fraction: f64,
    pub noise_std: f64,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            n_drugs: 24,
            n_proteins: 12,
            smiles_len: (20, 60),
            protein_len: (60, 140),
            missing_fraction: 0.2,
            noise_std: 0.05,
            seed: 0,
        }
    }
}

fn random_text(rng: &mut ChaCha8Rng, alphabet: &[u8], len: usize) -> String {
    (0..len)
        .map(|_| alphabet[rng.gen_range(0..alphabet.len())] as char)
        .collect()
}

fn with_motif(rng: &mut ChaCha8Rng, text: String, motif: &str) -> String {
    if text.len() < motif.len() {
        return motif.to_string();
    }
    let at = rng.gen_range(0..=text.len() - motif.len());
    let mut out = text[..at].to_string();
    out.push_str(motif);
    out.push_str(&text[at + motif.len()..]);
    out
}

pub fn generate(spec: &SyntheticSpec) -> Result<RawDataset> {
    if spec.n_drugs == 0 || spec.n_proteins == 0 {
        return Err(Error::InvalidConfig("synthetic dataset needs drugs and proteins".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let noise = Normal::new(0.0, spec.noise_std.max(0.0))
        .map_err(|e| Error::InvalidConfig(e.to_string()))?;

    let mut drugs = Vec::with_capacity(spec.n_drugs);
    let mut drug_flags = Vec::with_capacity(spec.n_drugs);
    for i in 0..spec.n_drugs {
        let len = rng.gen_range(spec.smiles_len.0..=spec.smiles_len.1);
        let mut s = random_text(&mut rng, DRUG_ALPHABET, len);
        let flag = rng.gen_bool(0.5);
        if flag {
            s = with_motif(&mut rng, s, DRUG_MOTIF);
        }
        drug_flags.push(flag || s.contains(DRUG_MOTIF));
        drugs.push(NamedSequence {
            id: format!("D{i:04}"),
            sequence: s,
        });
    }
    let mut proteins = Vec::with_capacity(spec.n_proteins);
    let mut protein_flags = Vec::with_capacity(spec.n_proteins);
    for i in 0..spec.n_proteins {
        let len = rng.gen_range(spec.protein_len.0..=spec.protein_len.1);
        let mut s = random_text(&mut rng, PROTEIN_ALPHABET, len);
        let flag = rng.gen_bool(0.5);
        if flag {
            s = with_motif(&mut rng, s, PROTEIN_MOTIF);
        }
        protein_flags.push(flag || s.contains(PROTEIN_MOTIF));
        proteins.push(NamedSequence {
            id: format!("P{i:03}"),
            sequence: s,
        });
    }

    let mut affinity = Vec::with_capacity(spec.n_drugs * spec.n_proteins);
    for &d in &drug_flags {
        for &p in &protein_flags {
            if rng.gen_bool(spec.missing_fraction.clamp(0.0, 1.0)) {
                affinity.push(None);
                continue;
            }
            let mut v = 11.0;
            if d {
                v += 0.6;
            }
            if p {
                v += 0.4;
            }
            if d && p {
                v += 0.8;
            }
            affinity.push(Some(v + noise.sample(&mut rng)));
        }
    }
    RawDataset::new(drugs, proteins, affinity)
}

/// Writes `drugs.tsv`, `proteins.tsv` and `affinity.txt` into `dir`.
pub fn write_kiba_files(raw: &RawDataset, dir: impl AsRef<Path>) -> Result<KibaPaths> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::file(dir, e))?;
    let paths = KibaPaths {
        drugs: dir.join("drugs.tsv"),
        proteins: dir.join("proteins.tsv"),
        affinity: dir.join("affinity.txt"),
    };
    let table = |items: &[NamedSequence]| {
        items
            .iter()
            .map(|s| format!("{}\t{}\n", s.id, s.sequence))
            .collect::<String>()
    };
    let mut grid = String::new();
    for d in 0..raw.n_drugs() {
        let row: Vec<String> = (0..raw.n_proteins())
            .map(|p| match raw.get(d, p) {
                Some(v) => format!("{v}"),
                None => "NaN".to_string(),
            })
            .collect();
        grid.push_str(&row.join(" "));
        grid.push('\n');
    }
    for (path, body) in [
        (&paths.drugs, table(&raw.drugs)),
        (&paths.proteins, table(&raw.proteins)),
        (&paths.affinity, grid),
    ] {
        fs::write(path, body).map_err(|e| Error::file(path, e))?;
    }
    Ok(paths)
}
