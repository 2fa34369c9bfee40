//! KIBA loading, score transform, flattening and fold construction.
//!
//! Input formats:
//!
//! * sequence files (drugs and proteins): either a JSON object mapping
//!   id to string (key order preserved) or two-column TSV `id<TAB>string`.
//!   `.json` selects JSON, `.tsv` selects TSV; any other extension is
//!   sniffed (a leading `{` means JSON).
//! * affinity file: one row per drug, one column per protein, separated by
//!   whitespace or commas. `NaN` (any case) marks an unmeasured pair.
//! * fold files: a JSON array of 0-based flattened interaction indices for
//!   the test part and an array of five such arrays for the CV folds.
//!
//! Flattening is row-major (drug-major) over present cells, so index `k`
//! in a fold file always names the same (drug, protein) pair.
//!
//! The encoded cache written by `prepare` is the JSON form of
//! [`EncodedDataset`] wrapped in [`EncodedCache`].

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vocab::{EncodedSequence, UnknownPolicy, Vocabulary};

/// Number of equal parts the interactions are cut into (1 test + CV folds).
pub const PARTS: usize = 6;
pub const CV_FOLDS: usize = PARTS - 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedSequence {
    pub id: String,
    pub sequence: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawDataset {
    pub drugs: Vec<NamedSequence>,
    pub proteins: Vec<NamedSequence>,
    /// Row-major `drugs x proteins`; `None` = not measured.
    pub affinity: Vec<Option<f64>>,
}

impl RawDataset {
    pub fn new(
        drugs: Vec<NamedSequence>,
        proteins: Vec<NamedSequence>,
        affinity: Vec<Option<f64>>,
    ) -> Result<Self> {
        if affinity.len() != drugs.len() * proteins.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} affinity cells for {} drugs x {} proteins",
                affinity.len(),
                drugs.len(),
                proteins.len()
            )));
        }
        check_unique(&drugs, "drug")?;
        check_unique(&proteins, "protein")?;
        Ok(RawDataset {
            drugs,
            proteins,
            affinity,
        })
    }

    pub fn n_drugs(&self) -> usize {
        self.drugs.len()
    }

    pub fn n_proteins(&self) -> usize {
        self.proteins.len()
    }

    pub fn get(&self, drug: usize, protein: usize) -> Option<f64> {
        self.affinity[drug * self.proteins.len() + protein]
    }

    pub fn present_count(&self) -> usize {
        self.affinity.iter().filter(|v| v.is_some()).count()
    }

    /// Applies [`kiba_transform`] jointly to every measured cell.
    pub fn apply_kiba_transform(&mut self) -> Result<()> {
        let present: Vec<f64> = self.affinity.iter().flatten().copied().collect();
        let transformed = kiba_transform(&present)?;
        let mut it = transformed.into_iter();
        for cell in self.affinity.iter_mut().filter(|c| c.is_some()) {
            *cell = it.next();
        }
        Ok(())
    }
}

fn check_unique(items: &[NamedSequence], what: &str) -> Result<()> {
    let mut seen = HashSet::with_capacity(items.len());
    for item in items {
        if !seen.insert(item.id.as_str()) {
            return Err(Error::InvalidConfig(format!(
                "duplicate {what} id {:?}",
                item.id
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InteractionRecord {
    pub drug_index: usize,
    pub protein_index: usize,
    pub affinity: f64,
}

pub fn load_kiba(
    drug_file: impl AsRef<Path>,
    protein_file: impl AsRef<Path>,
    affinity_file: impl AsRef<Path>,
) -> Result<RawDataset> {
    let drugs = load_sequences(drug_file)?;
    let proteins = load_sequences(protein_file)?;
    let (rows, cols, affinity) = load_affinity_matrix(affinity_file)?;
    if rows != drugs.len() || cols != proteins.len() {
        return Err(Error::DimensionMismatch {
            rows,
            cols,
            drugs: drugs.len(),
            proteins: proteins.len(),
        });
    }
    RawDataset::new(drugs, proteins, affinity)
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::file(path, e))
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

/// Loads an id → sequence table, TSV or JSON.
pub fn load_sequences(path: impl AsRef<Path>) -> Result<Vec<NamedSequence>> {
    let path = path.as_ref();
    let text = read_file(path)?;
    let is_json = match path.extension().and_then(|e| e.to_str()) {
        Some("json") => true,
        Some("tsv") => false,
        _ => text.trim_start().starts_with('{'),
    };
    let items = if is_json {
        parse_sequence_json(path, &text)?
    } else {
        parse_sequence_tsv(path, &text)?
    };
    let mut seen = HashSet::with_capacity(items.len());
    for (i, item) in items.iter().enumerate() {
        if !seen.insert(item.id.clone()) {
            return Err(parse_err(path, i + 1, format!("duplicate id {:?}", item.id)));
        }
    }
    Ok(items)
}

fn parse_sequence_json(path: &Path, text: &str) -> Result<Vec<NamedSequence>> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| {
        parse_err(path, e.line(), e.to_string())
    })?;
    let map = value
        .as_object()
        .ok_or_else(|| parse_err(path, 1, "expected a JSON object of id -> sequence"))?;
    map.iter()
        .enumerate()
        .map(|(i, (id, seq))| match seq.as_str() {
            Some(s) => Ok(NamedSequence {
                id: id.clone(),
                sequence: s.to_string(),
            }),
            None => Err(parse_err(path, i + 1, format!("value for {id:?} is not a string"))),
        })
        .collect()
}

fn parse_sequence_tsv(path: &Path, text: &str) -> Result<Vec<NamedSequence>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split('\t');
        match (fields.next(), fields.next(), fields.next()) {
            (Some(id), Some(seq), None) if !id.is_empty() => out.push(NamedSequence {
                id: id.to_string(),
                sequence: seq.trim().to_string(),
            }),
            _ => return Err(parse_err(path, i + 1, "expected `id<TAB>sequence`")),
        }
    }
    Ok(out)
}

/// Returns `(rows, cols, row-major cells)`.
pub fn load_affinity_matrix(path: impl AsRef<Path>) -> Result<(usize, usize, Vec<Option<f64>>)> {
    let path = path.as_ref();
    let text = read_file(path)?;
    let mut cells = Vec::new();
    let mut rows = 0;
    let mut cols = None;
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut n = 0;
        for field in line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|f| !f.is_empty())
        {
            let cell = if field.eq_ignore_ascii_case("nan") {
                None
            } else {
                let v: f64 = field
                    .parse()
                    .map_err(|_| parse_err(path, i + 1, format!("bad number {field:?}")))?;
                if !v.is_finite() {
                    return Err(parse_err(path, i + 1, format!("non-finite value {field:?}")));
                }
                Some(v)
            };
            cells.push(cell);
            n += 1;
        }
        match cols {
            None => cols = Some(n),
            Some(c) if c != n => {
                return Err(parse_err(
                    path,
                    i + 1,
                    format!("row has {n} columns, expected {c}"),
                ))
            }
            _ => {}
        }
        rows += 1;
    }
    Ok((rows, cols.unwrap_or(0), cells))
}

/// Negates every score and shifts so the smallest result is exactly zero.
/// Larger raw KIBA (weaker binding) maps to a smaller output.
pub fn kiba_transform(scores: &[f64]) -> Result<Vec<f64>> {
    if scores.is_empty() {
        return Err(Error::EmptyInput);
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::NonFiniteInput);
    }
    let min_neg = scores.iter().map(|s| -s).fold(f64::INFINITY, f64::min);
    Ok(scores.iter().map(|s| -s - min_neg).collect())
}

/// One record per present cell, drug-major.
pub fn flatten(raw: &RawDataset) -> Vec<InteractionRecord> {
    let n_proteins = raw.n_proteins();
    raw.affinity
        .iter()
        .enumerate()
        .filter_map(|(k, cell)| {
            cell.map(|affinity| InteractionRecord {
                drug_index: k / n_proteins,
                protein_index: k % n_proteins,
                affinity,
            })
        })
        .collect()
}

/// Held-out test part plus five cross-validation folds over flattened
/// interaction positions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldSplit {
    pub test: Vec<usize>,
    pub cv_folds: Vec<Vec<usize>>,
    /// `None` when the split came from external files.
    pub seed: Option<u64>,
}

impl FoldSplit {
    pub fn parts(&self) -> impl Iterator<Item = &[usize]> {
        std::iter::once(self.test.as_slice()).chain(self.cv_folds.iter().map(Vec::as_slice))
    }

    pub fn total_len(&self) -> usize {
        self.parts().map(<[usize]>::len).sum()
    }

    /// Checks that the six parts partition `0..n`.
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.cv_folds.len() != CV_FOLDS {
            return Err(Error::InvalidConfig(format!(
                "expected {CV_FOLDS} CV folds, found {}",
                self.cv_folds.len()
            )));
        }
        let mut seen = vec![false; n];
        for part in self.parts() {
            for &index in part {
                if index >= n {
                    return Err(Error::IndexOutOfRange { index, n });
                }
                if std::mem::replace(&mut seen[index], true) {
                    return Err(Error::OverlappingFolds { index });
                }
            }
        }
        let missing = seen.iter().filter(|s| !**s).count();
        if missing > 0 {
            return Err(Error::IncompletePartition { missing });
        }
        Ok(())
    }

    /// Training indices for CV fold `fold`: the other four folds, in fold order.
    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        self.cv_folds
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != fold)
            .flat_map(|(_, f)| f.iter().copied())
            .collect()
    }

    pub fn validation_indices(&self, fold: usize) -> &[usize] {
        &self.cv_folds[fold]
    }

    pub fn write_files(&self, test_file: impl AsRef<Path>, cv_file: impl AsRef<Path>) -> Result<()> {
        let (test_file, cv_file) = (test_file.as_ref(), cv_file.as_ref());
        fs::write(test_file, serde_json::to_string(&self.test)?)
            .map_err(|e| Error::file(test_file, e))?;
        fs::write(cv_file, serde_json::to_string(&self.cv_folds)?)
            .map_err(|e| Error::file(cv_file, e))?;
        Ok(())
    }
}

/// Seeded random permutation cut into six parts whose sizes differ by at
/// most one. Part 0 is the test set.
pub fn make_folds(n_interactions: usize, seed: u64) -> Result<FoldSplit> {
    if n_interactions < PARTS {
        return Err(Error::TooFewInteractions(n_interactions));
    }
    let mut order: Vec<usize> = (0..n_interactions).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let base = n_interactions / PARTS;
    let extra = n_interactions % PARTS;
    let mut parts = Vec::with_capacity(PARTS);
    let mut start = 0;
    for p in 0..PARTS {
        let len = base + usize::from(p < extra);
        parts.push(order[start..start + len].to_vec());
        start += len;
    }
    let test = parts.remove(0);
    Ok(FoldSplit {
        test,
        cv_folds: parts,
        seed: Some(seed),
    })
}

pub fn load_fold_files(
    test_file: impl AsRef<Path>,
    cv_file: impl AsRef<Path>,
    n_interactions: usize,
) -> Result<FoldSplit> {
    let test: Vec<usize> = read_json(test_file.as_ref())?;
    let cv_folds: Vec<Vec<usize>> = read_json(cv_file.as_ref())?;
    let split = FoldSplit {
        test,
        cv_folds,
        seed: None,
    };
    split.validate(n_interactions)?;
    Ok(split)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = read_file(path)?;
    serde_json::from_str(&text).map_err(|e| parse_err(path, e.line(), e.to_string()))
}

/// Token-encoded view of a [`RawDataset`], ready for training.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodedDataset {
    pub drug_ids: Vec<String>,
    pub protein_ids: Vec<String>,
    pub drugs: Vec<EncodedSequence>,
    pub proteins: Vec<EncodedSequence>,
    pub records: Vec<InteractionRecord>,
}

impl EncodedDataset {
    pub fn encode(
        raw: &RawDataset,
        smiles_vocab: &Vocabulary,
        protein_vocab: &Vocabulary,
        smiles_len: usize,
        protein_len: usize,
        policy: UnknownPolicy,
    ) -> Result<Self> {
        let encode_all = |items: &[NamedSequence], vocab: &Vocabulary, len: usize, what: &str| {
            items
                .iter()
                .map(|s| {
                    vocab
                        .encode_with(&s.sequence, len, policy)
                        .map_err(|e| e.context(format!("{what} {:?}", s.id)))
                })
                .collect::<Result<Vec<_>>>()
        };
        Ok(EncodedDataset {
            drug_ids: raw.drugs.iter().map(|d| d.id.clone()).collect(),
            protein_ids: raw.proteins.iter().map(|p| p.id.clone()).collect(),
            drugs: encode_all(&raw.drugs, smiles_vocab, smiles_len, "drug")?,
            proteins: encode_all(&raw.proteins, protein_vocab, protein_len, "protein")?,
            records: flatten(raw),
        })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn smiles_len(&self) -> usize {
        self.drugs.first().map_or(0, EncodedSequence::max_len)
    }

    pub fn protein_len(&self) -> usize {
        self.proteins.first().map_or(0, EncodedSequence::max_len)
    }

    pub fn drug_tokens(&self, record: usize) -> &[u8] {
        &self.drugs[self.records[record].drug_index].tokens
    }

    pub fn protein_tokens(&self, record: usize) -> &[u8] {
        &self.proteins[self.records[record].protein_index].tokens
    }

    pub fn affinity(&self, record: usize) -> f64 {
        self.records[record].affinity
    }

    pub fn targets(&self, indices: &[usize]) -> Vec<f64> {
        indices.iter().map(|&i| self.records[i].affinity).collect()
    }
}

/// On-disk wrapper of the encoded dataset with the fingerprint of the
/// inputs it was built from.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EncodedCache {
    pub fingerprint: String,
    pub dataset: EncodedDataset,
}

impl EncodedCache {
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = fs::File::create(path).map_err(|e| Error::file(path, e))?;
        serde_json::to_writer(std::io::BufWriter::new(file), self)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = fs::File::open(path).map_err(|e| Error::file(path, e))?;
        serde_json::from_reader(std::io::BufReader::new(file))
            .map_err(|e| parse_err(path, e.line(), e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LengthStats {
    pub count: usize,
    pub max: usize,
    pub mean: f64,
    /// Share of sequences no longer than `cap`.
    pub covered_by_cap: f64,
    pub cap: usize,
    /// `(bin_start, count)` with fixed bin width.
    pub histogram: Vec<(usize, usize)>,
}

impl LengthStats {
    pub fn of(items: &[NamedSequence], cap: usize, bin_width: usize) -> Self {
        let lengths: Vec<usize> = items.iter().map(|s| s.sequence.chars().count()).collect();
        let count = lengths.len();
        let max = lengths.iter().copied().max().unwrap_or(0);
        let mean = if count == 0 {
            0.0
        } else {
            lengths.iter().sum::<usize>() as f64 / count as f64
        };
        let covered = lengths.iter().filter(|&&l| l <= cap).count();
        let mut bins = vec![0usize; max / bin_width + 1];
        for l in &lengths {
            bins[l / bin_width] += 1;
        }
        LengthStats {
            count,
            max,
            mean,
            covered_by_cap: if count == 0 { 1.0 } else { covered as f64 / count as f64 },
            cap,
            histogram: bins
                .into_iter()
                .enumerate()
                .map(|(i, c)| (i * bin_width, c))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub drugs: usize,
    pub proteins: usize,
    pub interactions: usize,
    pub affinity_min: f64,
    pub affinity_max: f64,
    pub affinity_mean: f64,
    pub smiles_lengths: LengthStats,
    pub protein_lengths: LengthStats,
}

impl DatasetSummary {
    pub fn of(raw: &RawDataset, smiles_len: usize, protein_len: usize) -> Self {
        let values: Vec<f64> = raw.affinity.iter().flatten().copied().collect();
        let n = values.len().max(1) as f64;
        DatasetSummary {
            drugs: raw.n_drugs(),
            proteins: raw.n_proteins(),
            interactions: values.len(),
            affinity_min: values.iter().copied().fold(f64::INFINITY, f64::min),
            affinity_max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            affinity_mean: values.iter().sum::<f64>() / n,
            smiles_lengths: LengthStats::of(&raw.drugs, smiles_len, 10),
            protein_lengths: LengthStats::of(&raw.proteins, protein_len, 100),
        }
    }
}

/// Default file names looked up inside a data directory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KibaPaths {
    pub drugs: PathBuf,
    pub proteins: PathBuf,
    pub affinity: PathBuf,
}

impl KibaPaths {
    /// Picks `drugs.{tsv,json,txt}`, `proteins.{tsv,json,txt}` and
    /// `affinity.{txt,csv,tsv}` from `dir`, falling back to the `.tsv` /
    /// `.txt` name when none exists.
    pub fn in_dir(dir: impl AsRef<Path>) -> Self {
        let dir = dir.as_ref();
        let pick = |stem: &str, exts: &[&str]| {
            exts.iter()
                .map(|e| dir.join(format!("{stem}.{e}")))
                .find(|p| p.exists())
                .unwrap_or_else(|| dir.join(format!("{stem}.{}", exts[0])))
        };
        KibaPaths {
            drugs: pick("drugs", &["tsv", "json", "txt"]),
            proteins: pick("proteins", &["tsv", "json", "txt"]),
            affinity: pick("affinity", &["txt", "csv", "tsv"]),
        }
    }
}
