//! Shared fixtures and independent oracles for the integration tests.
#![allow(dead_code)]

use resdta::dataset::EncodedDataset;
use resdta::model::{accumulate_squared_error, ModelConfig, ModelParams, SampleForward};
use resdta::synthetic::{generate, SyntheticSpec};
use resdta::vocab::{protein_vocabulary, smiles_vocabulary, UnknownPolicy};

/// A network small enough for exhaustive finite differences.
pub fn tiny_config() -> ModelConfig {
    ModelConfig {
        smiles_len: 12,
        protein_len: 20,
        embed_dim: 4,
        stream_filters: [2, 3, 4],
        combined_filters: [3, 2, 4],
        kernel_size: 3,
        stream_repr_dim: 5,
        combined_repr_dim: 6,
        fc_dims: vec![8, 1],
        ..ModelConfig::default()
    }
}

pub fn synthetic_data(cfg: &ModelConfig, spec: &SyntheticSpec) -> EncodedDataset {
    let raw = generate(spec).unwrap();
    EncodedDataset::encode(
        &raw,
        &smiles_vocabulary(),
        &protein_vocabulary(),
        cfg.smiles_len,
        cfg.protein_len,
        UnknownPolicy::Strict,
    )
    .unwrap()
}

/// O(n²) concordance index straight from the pair definition.
pub fn brute_force_ci(actual: &[f64], predicted: &[f64]) -> Option<f64> {
    let (mut num, mut z) = (0.0, 0.0);
    for i in 0..actual.len() {
        for j in 0..actual.len() {
            if actual[i] > actual[j] {
                z += 1.0;
                num += if predicted[i] > predicted[j] {
                    1.0
                } else if predicted[i] == predicted[j] {
                    0.5
                } else {
                    0.0
                };
            }
        }
    }
    (z > 0.0).then(|| num / z)
}

pub fn oracle_mse(y: &[f64], p: &[f64]) -> f64 {
    y.iter().zip(p).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / y.len() as f64
}

/// r² of the least-squares fit `y ≈ a + b·p`, solved from the 2×2 normal
/// equations on raw sums.
pub fn oracle_r2(y: &[f64], p: &[f64]) -> f64 {
    let n = y.len() as f64;
    let (sp, sy) = (p.iter().sum::<f64>(), y.iter().sum::<f64>());
    let spp: f64 = p.iter().map(|v| v * v).sum();
    let spy: f64 = p.iter().zip(y).map(|(a, b)| a * b).sum();
    let det = n * spp - sp * sp;
    let b = (n * spy - sp * sy) / det;
    let a = (sy - b * sp) / n;
    let ss_res: f64 = y.iter().zip(p).map(|(yi, pi)| (yi - a - b * pi).powi(2)).sum();
    let mean = sy / n;
    let ss_tot: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    1.0 - ss_res / ss_tot
}

/// Through-origin r₀² with the residual sum written as
/// `Σy² − (Σyp)² / Σp²`.
pub fn oracle_r2_origin(y: &[f64], p: &[f64]) -> f64 {
    let n = y.len() as f64;
    let syy: f64 = y.iter().map(|v| v * v).sum();
    let spy: f64 = p.iter().zip(y).map(|(a, b)| a * b).sum();
    let spp: f64 = p.iter().map(|v| v * v).sum();
    let ss_res = syy - spy * spy / spp;
    let mean = y.iter().sum::<f64>() / n;
    let ss_tot = syy - n * mean * mean;
    1.0 - ss_res / ss_tot
}

/// `r_m²` from two explicit fits. `r² − r₀²` is summed as
/// `Σ (res₀ − res₁)(res₀ + res₁) / S_yy` so it keeps its precision when the
/// fits nearly coincide.
pub fn oracle_rm2(y: &[f64], p: &[f64]) -> f64 {
    let n = y.len() as f64;
    let (sp, sy) = (p.iter().sum::<f64>(), y.iter().sum::<f64>());
    let spp: f64 = p.iter().map(|v| v * v).sum();
    let spy: f64 = p.iter().zip(y).map(|(a, b)| a * b).sum();
    let b = (n * spy - sp * sy) / (n * spp - sp * sp);
    let a = (sy - b * sp) / n;
    let k = spy / spp;
    let mean = sy / n;
    let ss_tot: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    let extra: f64 = y
        .iter()
        .zip(p)
        .map(|(yi, pi)| {
            // res₀ − res₁ = a + (b − k)·p exactly, without cancellation.
            let (r0, r1) = (yi - k * pi, yi - a - b * pi);
            (a + (b - k) * pi) * (r0 + r1)
        })
        .sum();
    let r2 = oracle_r2(y, p);
    r2 * (1.0 - (extra / ss_tot).abs().sqrt())
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

/// Per-tensor relative error `‖g_a − g_n‖ / max(‖g_a‖, ‖g_n‖)` between the
/// analytic gradient of `(pred − target)²` and central differences.
pub fn gradient_check(
    params: &ModelParams,
    drug: &[u8],
    protein: &[u8],
    target: f64,
    dropout: Option<u64>,
    h: f64,
) -> Vec<(String, f64)> {
    let mut analytic = params.zeros_like();
    accumulate_squared_error(params, drug, protein, target, dropout, &mut analytic).unwrap();
    let loss = |p: &ModelParams| {
        let e = SampleForward::run(p, drug, protein, dropout).unwrap().prediction() - target;
        e * e
    };
    let mut probe = params.clone();
    let n_tensors = params.tensors().len();
    let mut out = Vec::with_capacity(n_tensors);
    for t in 0..n_tensors {
        let len = params.tensors()[t].data.len();
        let mut numeric = vec![0.0; len];
        for (i, slot) in numeric.iter_mut().enumerate() {
            let orig = params.tensors()[t].data[i];
            probe.tensors_mut()[t].data[i] = orig + h;
            let up = loss(&probe);
            probe.tensors_mut()[t].data[i] = orig - h;
            let down = loss(&probe);
            probe.tensors_mut()[t].data[i] = orig;
            *slot = (up - down) / (2.0 * h);
        }
        let a = analytic.tensors()[t].data;
        let diff = a.iter().zip(&numeric).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
        let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        let nn = numeric.iter().map(|x| x * x).sum::<f64>().sqrt();
        let denom = na.max(nn);
        let rel = if denom == 0.0 { 0.0 } else { diff / denom };
        out.push((params.tensors()[t].name.clone(), rel));
    }
    out
}

/// Writes a small synthetic KIBA-style dataset under `dir/data`.
pub fn write_dataset(dir: &std::path::Path) -> std::path::PathBuf {
    let raw = generate(&SyntheticSpec { n_drugs: 10, n_proteins: 6, seed: 2, ..SyntheticSpec::default() }).unwrap();
    let data = dir.join("data");
    resdta::synthetic::write_kiba_files(&raw, &data).unwrap();
    data
}

pub fn tiny_run_config(data: &std::path::Path, out: &std::path::Path) -> resdta::pipeline::RunConfig {
    resdta::pipeline::RunConfig {
        data_dir: Some(data.to_path_buf()),
        out_dir: out.to_path_buf(),
        model: tiny_config(),
        train: resdta::training::TrainConfig {
            lr_initial: 1e-2,
            batch_size: 8,
            epochs: 2,
            restart_period: 2,
            ..Default::default()
        },
        ..Default::default()
    }
}
