//! The end-to-end commands behind the `resdta` binary.
//!
//! Everything a command produces lives under [`RunConfig::out_dir`]:
//!
//! ```text
//! <out>/prepare.config.json        config snapshot (one per command)
//! <out>/cache/encoded.json         EncodedCache
//! <out>/cache/summary.json         DatasetSummary
//! <out>/folds/test.json            held-out test indices
//! <out>/folds/cv.json              five CV folds
//! <out>/train/fold<k>/history.csv  per-epoch history
//! <out>/train/fold<k>/summary.json best epoch and validation MSE
//! <out>/checkpoints/fold<k>_epoch<e>.ckpt   latest improvement
//! <out>/checkpoints/fold<k>_best.ckpt       best weights
//! <out>/eval/metrics.json          MetricsReport over the test set
//! <out>/eval/predictions_fold<k>.csv
//! <out>/eval/random_init/...     same, for untrained weights
//! <out>/report/{scatter.csv,regression.json,table.txt,scatter.svg}
//! ```
//!
//! The master `seed` drives the fold permutation; fold `k` initializes and
//! trains with `mix_seed(seed, k)`.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dataset::{
    load_fold_files, load_kiba, make_folds, DatasetSummary, EncodedCache, EncodedDataset, FoldSplit,
    KibaPaths, CV_FOLDS,
};
use crate::error::{Error, Result};
use crate::metrics::{aggregate, FoldMetrics, MetricsReport};
use crate::mix_seed;
use crate::model::{
    init_params, load_checkpoint, save_checkpoint, ModelConfig, ModelParams,
};
use crate::report::{self, PredictionRow, ReportSummary};
use crate::training::{fit_with_observer, predict, EpochRecord, ProgressLog, TrainConfig, TrainObserver};
use crate::vocab::{UnknownPolicy, Vocabulary};

/// Environment variable naming the default raw-data directory.
pub const DATA_DIR_ENV: &str = "RESDTA_DATA_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FoldSelector {
    #[default]
    All,
    Fold(usize),
    Test,
}

impl FromStr for FoldSelector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(FoldSelector::All),
            "test" => Ok(FoldSelector::Test),
            k => match k.parse::<usize>() {
                Ok(k) if k < CV_FOLDS => Ok(FoldSelector::Fold(k)),
                _ => Err(Error::InvalidConfig(format!(
                    "fold selector must be 0..{}, all or test, got {s:?}",
                    CV_FOLDS - 1
                ))),
            },
        }
    }
}

impl fmt::Display for FoldSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FoldSelector::All => f.write_str("all"),
            FoldSelector::Test => f.write_str("test"),
            FoldSelector::Fold(k) => write!(f, "{k}"),
        }
    }
}

impl Serialize for FoldSelector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FoldSelector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl FoldSelector {
    fn cv_folds(self) -> Result<Vec<usize>> {
        match self {
            FoldSelector::All => Ok((0..CV_FOLDS).collect()),
            FoldSelector::Fold(k) => Ok(vec![k]),
            FoldSelector::Test => Err(Error::InvalidConfig(
                "`test` selects the held-out set and is not a training fold".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub data_dir: Option<PathBuf>,
    pub drug_file: Option<PathBuf>,
    pub protein_file: Option<PathBuf>,
    pub affinity_file: Option<PathBuf>,
    /// External fold files; both or neither.
    pub fold_test_file: Option<PathBuf>,
    pub fold_cv_file: Option<PathBuf>,
    /// Apply the negate-and-shift KIBA transform on load. Off by default:
    /// the common KIBA release is already transformed.
    pub kiba_transform: bool,
    pub unknown_policy: UnknownPolicy,
    pub out_dir: PathBuf,
    pub seed: u64,
    pub folds: FoldSelector,
    /// Caps every train/validation/test index list (smoke runs).
    pub limit: Option<usize>,
    pub force: bool,
    pub model: ModelConfig,
    pub train: TrainConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            data_dir: None,
            drug_file: None,
            protein_file: None,
            affinity_file: None,
            fold_test_file: None,
            fold_cv_file: None,
            kiba_transform: false,
            unknown_policy: UnknownPolicy::Strict,
            out_dir: PathBuf::from("resdta-out"),
            seed: 0,
            folds: FoldSelector::All,
            limit: None,
            force: false,
            model: ModelConfig::default(),
            train: TrainConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))
    }

    /// Resolves raw input paths: explicit files win, then `data_dir`, then
    /// the `RESDTA_DATA_DIR` environment variable.
    pub fn kiba_paths(&self) -> Result<KibaPaths> {
        let dir = self
            .data_dir
            .clone()
            .or_else(|| std::env::var_os(DATA_DIR_ENV).map(PathBuf::from));
        let defaults = dir.as_ref().map(KibaPaths::in_dir);
        let pick = |explicit: &Option<PathBuf>, default: Option<&PathBuf>, what: &str| {
            explicit
                .clone()
                .or_else(|| default.cloned())
                .ok_or_else(|| Error::InvalidConfig(format!("no {what} file or data directory given")))
        };
        Ok(KibaPaths {
            drugs: pick(&self.drug_file, defaults.as_ref().map(|d| &d.drugs), "drug")?,
            proteins: pick(&self.protein_file, defaults.as_ref().map(|d| &d.proteins), "protein")?,
            affinity: pick(&self.affinity_file, defaults.as_ref().map(|d| &d.affinity), "affinity")?,
        })
    }

    pub fn cache_path(&self) -> PathBuf {
        self.out_dir.join("cache").join("encoded.json")
    }

    pub fn fold_paths(&self) -> (PathBuf, PathBuf) {
        let d = self.out_dir.join("folds");
        (d.join("test.json"), d.join("cv.json"))
    }

    pub fn checkpoint_dir(&self) -> PathBuf {
        self.out_dir.join("checkpoints")
    }

    pub fn best_checkpoint(&self, fold: usize) -> PathBuf {
        self.checkpoint_dir().join(format!("fold{fold}_best.ckpt"))
    }

    fn snapshot(&self, command: &str) -> Result<()> {
        ensure_dir(&self.out_dir)?;
        let path = self.out_dir.join(format!("{command}.config.json"));
        write_file(&path, serde_json::to_string_pretty(self)?)
    }

    fn capped<'a>(&self, indices: &'a [usize]) -> &'a [usize] {
        match self.limit {
            Some(n) => &indices[..n.min(indices.len())],
            None => indices,
        }
    }
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::file(dir, e))
}

fn write_file(path: &Path, body: impl AsRef<[u8]>) -> Result<()> {
    if let Some(parent) = path.parent() {
        ensure_dir(parent)?;
    }
    fs::write(path, body).map_err(|e| Error::file(path, e))
}

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::file(path, e))
}

/// Process exit code for an error: 1 usage, 2 data, 3 runtime/numeric.
pub fn exit_code(err: &Error) -> i32 {
    match err.root() {
        Error::InvalidConfig(_) => 1,
        Error::NonFiniteLoss { .. } | Error::DegenerateOutput(_) | Error::NonFiniteInput => 3,
        Error::UnknownSymbol { .. }
        | Error::InvalidMaxLen
        | Error::InvalidVocabulary(_)
        | Error::Parse { .. }
        | Error::DimensionMismatch { .. }
        | Error::EmptyInput
        | Error::TooFewInteractions(_)
        | Error::IndexOutOfRange { .. }
        | Error::OverlappingFolds { .. }
        | Error::IncompletePartition { .. }
        | Error::TokenOutOfRange { .. }
        | Error::VersionMismatch { .. }
        | Error::ConfigMismatch(_)
        | Error::InvalidCheckpoint(_)
        | Error::EmptySplit(_)
        | Error::File { .. }
        | Error::Json(_)
        | Error::Csv(_) => 2,
        _ => 3,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrepareOutcome {
    pub up_to_date: bool,
    pub summary: DatasetSummary,
}

fn fingerprint(cfg: &RunConfig, paths: &KibaPaths) -> Result<String> {
    let mut h = Sha256::new();
    for p in [&paths.drugs, &paths.proteins, &paths.affinity] {
        h.update(read_bytes(p)?);
        h.update([0xff]);
    }
    if let (Some(t), Some(c)) = (&cfg.fold_test_file, &cfg.fold_cv_file) {
        h.update(read_bytes(t)?);
        h.update(read_bytes(c)?);
    }
    h.update(Vocabulary::smiles().to_table());
    h.update(Vocabulary::protein().to_table());
    h.update(
        serde_json::json!({
            "smiles_len": cfg.model.smiles_len,
            "protein_len": cfg.model.protein_len,
            "kiba_transform": cfg.kiba_transform,
            "unknown_policy": cfg.unknown_policy,
            "seed": cfg.seed,
        })
        .to_string(),
    );
    Ok(h.finalize().iter().map(|b| format!("{b:02x}")).collect())
}

/// Loads and encodes the raw data, writes the cache, the folds and a summary.
pub fn cmd_prepare(cfg: &RunConfig, log: &mut dyn Write) -> Result<PrepareOutcome> {
    let paths = cfg.kiba_paths()?;
    if cfg.fold_test_file.is_some() != cfg.fold_cv_file.is_some() {
        return Err(Error::InvalidConfig(
            "fold_test_file and fold_cv_file must be given together".into(),
        ));
    }
    let fp = fingerprint(cfg, &paths)?;
    let cache_path = cfg.cache_path();
    let summary_path = cfg.out_dir.join("cache").join("summary.json");
    let (test_path, cv_path) = cfg.fold_paths();

    if !cfg.force && cache_path.exists() && test_path.exists() && cv_path.exists() {
        if let Ok(existing) = EncodedCache::load(&cache_path) {
            if existing.fingerprint == fp {
                if let Ok(summary) = fs::read_to_string(&summary_path)
                    .map_err(Error::from)
                    .and_then(|s| serde_json::from_str::<DatasetSummary>(&s).map_err(Error::from))
                {
                    writeln!(log, "cache up to date")?;
                    return Ok(PrepareOutcome {
                        up_to_date: true,
                        summary,
                    });
                }
            }
        }
    }

    let mut raw = load_kiba(&paths.drugs, &paths.proteins, &paths.affinity)?;
    if cfg.kiba_transform {
        raw.apply_kiba_transform()?;
    }
    let dataset = EncodedDataset::encode(
        &raw,
        &Vocabulary::smiles(),
        &Vocabulary::protein(),
        cfg.model.smiles_len,
        cfg.model.protein_len,
        cfg.unknown_policy,
    )
    .map_err(|e| match e {
        Error::Context { context, source } if context.starts_with("drug") => Error::Context {
            context: format!("{} ({context})", paths.drugs.display()),
            source,
        },
        Error::Context { context, source } => Error::Context {
            context: format!("{} ({context})", paths.proteins.display()),
            source,
        },
        other => other,
    })?;
    let n = dataset.len();
    let split = match (&cfg.fold_test_file, &cfg.fold_cv_file) {
        (Some(t), Some(c)) => load_fold_files(t, c, n)?,
        _ => make_folds(n, cfg.seed)?,
    };
    let summary = DatasetSummary::of(&raw, cfg.model.smiles_len, cfg.model.protein_len);

    cfg.snapshot("prepare")?;
    ensure_dir(cache_path.parent().expect("cache path has a parent"))?;
    ensure_dir(test_path.parent().expect("fold path has a parent"))?;
    EncodedCache {
        fingerprint: fp,
        dataset,
    }
    .save(&cache_path)?;
    split.write_files(&test_path, &cv_path)?;
    write_file(&summary_path, serde_json::to_string_pretty(&summary)?)?;
    writeln!(
        log,
        "prepared {} drugs, {} proteins, {} interactions",
        summary.drugs, summary.proteins, summary.interactions
    )?;
    Ok(PrepareOutcome {
        up_to_date: false,
        summary,
    })
}

fn load_cache(cfg: &RunConfig) -> Result<(EncodedDataset, FoldSplit)> {
    let cache_path = cfg.cache_path();
    if !cache_path.exists() {
        return Err(Error::File {
            path: cache_path,
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "run `prepare` first"),
        });
    }
    let dataset = EncodedCache::load(&cache_path)?.dataset;
    let (test, cv) = cfg.fold_paths();
    let split = load_fold_files(&test, &cv, dataset.len())?;
    Ok((dataset, split))
}

fn load_prepared(cfg: &RunConfig) -> Result<(EncodedDataset, FoldSplit)> {
    let (dataset, split) = load_cache(cfg)?;
    if dataset.smiles_len() != cfg.model.smiles_len || dataset.protein_len() != cfg.model.protein_len {
        return Err(Error::ConfigMismatch(format!(
            "cache encodes lengths {}/{}, model expects {}/{}",
            dataset.smiles_len(),
            dataset.protein_len(),
            cfg.model.smiles_len,
            cfg.model.protein_len
        )));
    }
    Ok((dataset, split))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainedFold {
    pub fold: usize,
    pub best_epoch: usize,
    pub best_val_mse: f64,
    pub checkpoint: PathBuf,
}

struct FoldObserver<'a> {
    fold: usize,
    dir: PathBuf,
    last_written: Option<PathBuf>,
    log: ProgressLog<&'a mut dyn Write>,
}

impl TrainObserver for FoldObserver<'_> {
    fn on_epoch(&mut self, record: &EpochRecord) -> Result<()> {
        write!(self.log.0, "[fold {}] ", self.fold)?;
        self.log.on_epoch(record)
    }

    fn on_improved(&mut self, epoch: usize, params: &ModelParams) -> Result<()> {
        let path = self.dir.join(format!("fold{}_epoch{epoch:04}.ckpt", self.fold));
        save_checkpoint(params, epoch as u64, &path)?;
        if let Some(prev) = self.last_written.replace(path) {
            let _ = fs::remove_file(prev);
        }
        Ok(())
    }
}

/// Trains every selected CV fold on the other four folds.
pub fn cmd_train(cfg: &RunConfig, log: &mut dyn Write) -> Result<Vec<TrainedFold>> {
    let folds = cfg.folds.cv_folds()?;
    cfg.model.validate()?;
    cfg.train.validate()?;
    let (dataset, split) = load_prepared(cfg)?;
    cfg.snapshot("train")?;
    let ckpt_dir = cfg.checkpoint_dir();
    ensure_dir(&ckpt_dir)?;

    let mut out = Vec::with_capacity(folds.len());
    for fold in folds {
        let train_idx = split.train_indices(fold);
        let train_idx = cfg.capped(&train_idx);
        let val_idx = cfg.capped(split.validation_indices(fold));
        let fold_seed = mix_seed(cfg.seed, fold as u64);
        let train_cfg = TrainConfig {
            seed: fold_seed,
            ..cfg.train.clone()
        };
        writeln!(
            log,
            "[fold {fold}] training on {} records, validating on {}",
            train_idx.len(),
            val_idx.len()
        )?;
        let params = init_params(&cfg.model, fold_seed)?;
        let mut observer = FoldObserver {
            fold,
            dir: ckpt_dir.clone(),
            last_written: None,
            log: ProgressLog(&mut *log),
        };
        let outcome = fit_with_observer(params, &dataset, train_idx, val_idx, &train_cfg, &mut observer)?;
        let fold_dir = cfg.out_dir.join("train").join(format!("fold{fold}"));
        ensure_dir(&fold_dir)?;
        outcome
            .history
            .write(fold_dir.join("history.csv"), fold_dir.join("summary.json"))?;
        let best_path = cfg.best_checkpoint(fold);
        save_checkpoint(&outcome.best, outcome.history.best_epoch as u64, &best_path)?;
        out.push(TrainedFold {
            fold,
            best_epoch: outcome.history.best_epoch,
            best_val_mse: outcome.history.best_val_mse,
            checkpoint: best_path,
        });
    }
    Ok(out)
}

fn check_against_cache(params: &ModelParams, dataset: &EncodedDataset) -> Result<()> {
    let c = &params.config;
    if c.smiles_len != dataset.smiles_len() || c.protein_len != dataset.protein_len() {
        return Err(Error::ConfigMismatch(format!(
            "checkpoint expects lengths {}/{}, dataset is encoded at {}/{}",
            c.smiles_len,
            c.protein_len,
            dataset.smiles_len(),
            dataset.protein_len()
        )));
    }
    Ok(())
}

fn prediction_rows(dataset: &EncodedDataset, indices: &[usize], predicted: &[f64]) -> Vec<PredictionRow> {
    indices
        .iter()
        .zip(predicted)
        .map(|(&i, &p)| {
            let r = dataset.records[i];
            PredictionRow {
                drug_id: dataset.drug_ids[r.drug_index].clone(),
                protein_id: dataset.protein_ids[r.protein_index].clone(),
                measured: r.affinity,
                predicted: p,
            }
        })
        .collect()
}

/// Which weights `cmd_evaluate` scores.
#[derive(Debug, Clone, PartialEq)]
pub enum EvalSource {
    /// One checkpoint file.
    Checkpoint(PathBuf),
    /// The best checkpoint of each selected fold (`test` means all five).
    BestPerFold,
    /// Fresh initialization per selected fold, seeded like training. A
    /// null-model baseline.
    RandomInit,
}

/// Scores weights on the independent test part and writes
/// `eval/metrics.json` plus one predictions CSV per model.
pub fn cmd_evaluate(cfg: &RunConfig, source: &EvalSource, log: &mut dyn Write) -> Result<MetricsReport> {
    let (dataset, split) = load_cache(cfg)?;
    let test_idx = cfg.capped(&split.test);
    cfg.snapshot("evaluate")?;
    let eval_dir = match source {
        EvalSource::RandomInit => cfg.out_dir.join("eval").join("random_init"),
        _ => cfg.out_dir.join("eval"),
    };
    ensure_dir(&eval_dir)?;

    let folds = || match cfg.folds {
        FoldSelector::Test => FoldSelector::All.cv_folds(),
        other => other.cv_folds(),
    };
    let models: Vec<(String, String, ModelParams)> = match source {
        EvalSource::Checkpoint(p) => vec![(
            String::new(),
            p.display().to_string(),
            load_checkpoint(p)?.params,
        )],
        EvalSource::BestPerFold => folds()?
            .into_iter()
            .map(|f| {
                let path = cfg.best_checkpoint(f);
                Ok((format!("_fold{f}"), path.display().to_string(), load_checkpoint(&path)?.params))
            })
            .collect::<Result<_>>()?,
        EvalSource::RandomInit => folds()?
            .into_iter()
            .map(|f| {
                let params = init_params(&cfg.model, mix_seed(cfg.seed, f as u64))?;
                Ok((format!("_fold{f}"), format!("random init, fold {f}"), params))
            })
            .collect::<Result<_>>()?,
    };
    let actual = dataset.targets(test_idx);
    let mut per_fold = Vec::with_capacity(models.len());
    for (suffix, label, params) in models {
        check_against_cache(&params, &dataset)?;
        let predicted = predict(&params, &dataset, test_idx)?;
        let metrics = FoldMetrics::evaluate(&actual, &predicted)?;
        writeln!(
            log,
            "{label}: CI {:.4}  MSE {:.4}  rm2 {:.4}",
            metrics.ci,
            metrics.mse,
            metrics.rm2
        )?;
        report::write_predictions(
            eval_dir.join(format!("predictions{suffix}.csv")),
            &prediction_rows(&dataset, test_idx, &predicted),
        )?;
        per_fold.push(metrics);
    }
    let report = aggregate(&per_fold)?;
    write_file(&eval_dir.join("metrics.json"), serde_json::to_string_pretty(&report)?)?;
    Ok(report)
}

/// One pair to score: `drug_id<TAB>smiles<TAB>protein_id<TAB>sequence`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairInput {
    pub drug_id: String,
    pub smiles: String,
    pub protein_id: String,
    pub sequence: String,
}

pub fn read_pairs(path: &Path) -> Result<Vec<PairInput>> {
    let text = fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.trim_end_matches('\r').split('\t').collect();
        if f.len() != 4 {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                message: "expected drug_id, smiles, protein_id, sequence".into(),
            });
        }
        out.push(PairInput {
            drug_id: f[0].into(),
            smiles: f[1].into(),
            protein_id: f[2].into(),
            sequence: f[3].into(),
        });
    }
    Ok(out)
}

/// Scores arbitrary pairs with a checkpoint and writes
/// `drug_id,protein_id,predicted`.
pub fn cmd_predict(
    cfg: &RunConfig,
    checkpoint: &Path,
    input: &Path,
    output: &Path,
    log: &mut dyn Write,
) -> Result<Vec<f64>> {
    let params = load_checkpoint(checkpoint)?.params;
    let pairs = read_pairs(input)?;
    let (sv, pv) = (Vocabulary::smiles(), Vocabulary::protein());
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["drug_id", "protein_id", "predicted"])?;
    let mut preds = Vec::with_capacity(pairs.len());
    for (i, pair) in pairs.iter().enumerate() {
        let ctx = |e: Error| e.context(format!("{}:{}", input.display(), i + 1));
        let d = sv
            .encode_with(&pair.smiles, params.config.smiles_len, cfg.unknown_policy)
            .map_err(ctx)?;
        let p = pv
            .encode_with(&pair.sequence, params.config.protein_len, cfg.unknown_policy)
            .map_err(ctx)?;
        let y = crate::model::predict_one(&params, &d.tokens, &p.tokens)?;
        w.write_record([pair.drug_id.as_str(), pair.protein_id.as_str(), &y.to_string()])?;
        preds.push(y);
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    write_file(output, bytes)?;
    writeln!(log, "wrote {} predictions to {}", preds.len(), output.display())?;
    Ok(preds)
}

/// Scatter data, regression line and metric table from a predictions CSV.
pub fn cmd_report(predictions: &Path, out_dir: &Path, svg: bool, log: &mut dyn Write) -> Result<ReportSummary> {
    let rows = report::read_predictions(predictions)?;
    if rows.is_empty() {
        return Err(Error::Parse {
            path: predictions.to_path_buf(),
            line: 1,
            message: "no prediction rows".into(),
        });
    }
    let summary = report::summarize(&rows)?;
    let dir = out_dir.join("report");
    write_file(&dir.join("scatter.csv"), report::scatter_csv(&rows))?;
    write_file(&dir.join("regression.json"), serde_json::to_string_pretty(&summary)?)?;
    let table = report::render_table(&summary);
    write_file(&dir.join("table.txt"), &table)?;
    if svg {
        write_file(&dir.join("scatter.svg"), report::render_svg(&rows, summary.line))?;
    }
    write!(log, "{table}")?;
    Ok(summary)
}
