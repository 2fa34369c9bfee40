//! Concordance index, MSE, r², r₀² and r_m², plus per-fold aggregation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn check_pair(actual: &[f64], predicted: &[f64]) -> Result<()> {
    if actual.len() != predicted.len() {
        return Err(Error::LengthMismatch {
            left: actual.len(),
            right: predicted.len(),
        });
    }
    if actual.is_empty() {
        return Err(Error::EmptyInput);
    }
    if actual.iter().chain(predicted).any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput);
    }
    Ok(())
}

struct Fenwick(Vec<u64>);

impl Fenwick {
    fn new(n: usize) -> Self {
        Fenwick(vec![0; n + 1])
    }

    fn add(&mut self, i: usize) {
        let mut i = i + 1;
        while i < self.0.len() {
            self.0[i] += 1;
            i += i & i.wrapping_neg();
        }
    }

    /// Count of inserted ranks `< i`.
    fn prefix(&self, i: usize) -> u64 {
        let mut i = i;
        let mut s = 0;
        while i > 0 {
            s += self.0[i];
            i -= i & i.wrapping_neg();
        }
        s
    }
}

/// `CI = (1/Z) Σ_{δ_i > δ_j} h(b_i − b_j)` with `h` = 1, ½, 0 for a
/// positive, zero, negative argument and `Z` the number of pairs with
/// `δ_i > δ_j`. Runs in O(n log n).
pub fn concordance_index(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    check_pair(actual, predicted)?;
    let n = actual.len();

    let mut sorted_pred: Vec<f64> = predicted.to_vec();
    sorted_pred.sort_by(f64::total_cmp);
    sorted_pred.dedup();
    let rank = |v: f64| sorted_pred.partition_point(|&x| x < v);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| actual[a].total_cmp(&actual[b]));

    let mut tree = Fenwick::new(sorted_pred.len());
    let (mut concordant, mut tied, mut pairs) = (0u64, 0u64, 0u64);
    let mut inserted = 0u64;
    let mut start = 0;
    while start < n {
        let mut end = start;
        while end < n && actual[order[end]] == actual[order[start]] {
            end += 1;
        }
        for &i in &order[start..end] {
            let r = rank(predicted[i]);
            let below = tree.prefix(r);
            concordant += below;
            tied += tree.prefix(r + 1) - below;
            pairs += inserted;
        }
        for &i in &order[start..end] {
            tree.add(rank(predicted[i]));
            inserted += 1;
        }
        start = end;
    }
    if pairs == 0 {
        return Err(Error::NoComparablePairs);
    }
    Ok((concordant as f64 + 0.5 * tied as f64) / pairs as f64)
}

pub fn mse(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    check_pair(actual, predicted)?;
    let sum: f64 = actual
        .iter()
        .zip(predicted)
        .map(|(y, p)| (p - y) * (p - y))
        .sum();
    Ok(sum / actual.len() as f64)
}

/// Squared Pearson correlation `r²` and the through-origin coefficient of
/// determination `r₀² = 1 − Σ(y − k·p)² / Σ(y − ȳ)²`, `k = Σyp / Σp²`.
pub fn r_squared_pair(actual: &[f64], predicted: &[f64]) -> Result<(f64, f64)> {
    let (r2, gap) = r2_and_gap(actual, predicted)?;
    Ok((r2, r2 - gap))
}

/// `r²` and `r² − r₀² ≥ 0`. The gap is the extra residual of the
/// through-origin fit, `n·a²·S_pp / Σp²` with `a` the intercept of the
/// least-squares line, divided by `S_yy`. Computing it this way keeps full
/// relative precision when the two fits nearly coincide, where subtracting
/// `r₀²` from `r²` would leave only rounding noise for the square root in
/// `r_m²` to amplify.
fn r2_and_gap(actual: &[f64], predicted: &[f64]) -> Result<(f64, f64)> {
    check_pair(actual, predicted)?;
    if actual.len() < 3 {
        return Err(Error::DegenerateInput("at least three points are required"));
    }
    let n = actual.len() as f64;
    let y_mean = actual.iter().sum::<f64>() / n;
    let p_mean = predicted.iter().sum::<f64>() / n;
    let (mut syy, mut spp, mut syp) = (0.0, 0.0, 0.0);
    for (&y, &p) in actual.iter().zip(predicted) {
        let (dy, dp) = (y - y_mean, p - p_mean);
        syy += dy * dy;
        spp += dp * dp;
        syp += dy * dp;
    }
    if syy == 0.0 {
        return Err(Error::DegenerateInput("actual values are constant"));
    }
    if spp == 0.0 {
        return Err(Error::DegenerateInput("predicted values are constant"));
    }
    let r2 = syp * syp / (syy * spp);
    let intercept = y_mean - syp / spp * p_mean;
    let p_sq: f64 = predicted.iter().map(|p| p * p).sum();
    let gap = n * intercept * intercept * spp / (p_sq * syy);
    Ok((r2, gap))
}

/// `r_m² = r² · (1 − √|r² − r₀²|)`.
pub fn rm2(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    let (r2, gap) = r2_and_gap(actual, predicted)?;
    Ok(r2 * (1.0 - gap.sqrt()))
}

/// Models with `r_m² > 0.5` are conventionally considered acceptable.
pub const RM2_ACCEPTABLE: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FoldMetrics {
    pub ci: f64,
    pub mse: f64,
    pub rm2: f64,
}

impl FoldMetrics {
    pub fn evaluate(actual: &[f64], predicted: &[f64]) -> Result<Self> {
        Ok(FoldMetrics {
            ci: concordance_index(actual, predicted)?,
            mse: mse(actual, predicted)?,
            rm2: rm2(actual, predicted)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub folds: Vec<FoldMetrics>,
    pub mean: FoldMetrics,
    /// Population standard deviation.
    pub std: FoldMetrics,
    pub n_folds: usize,
}

fn mean_std(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / n;
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

pub fn aggregate(per_fold: &[FoldMetrics]) -> Result<MetricsReport> {
    if per_fold.is_empty() {
        return Err(Error::EmptyInput);
    }
    // sorted copies make the summary independent of fold order
    let column = |f: fn(&FoldMetrics) -> f64| {
        let mut v: Vec<f64> = per_fold.iter().map(f).collect();
        v.sort_by(f64::total_cmp);
        mean_std(v.into_iter())
    };
    let (ci, ci_s) = column(|m| m.ci);
    let (ms, ms_s) = column(|m| m.mse);
    let (rm, rm_s) = column(|m| m.rm2);
    Ok(MetricsReport {
        folds: per_fold.to_vec(),
        mean: FoldMetrics { ci, mse: ms, rm2: rm },
        std: FoldMetrics {
            ci: ci_s,
            mse: ms_s,
            rm2: rm_s,
        },
        n_folds: per_fold.len(),
    })
}
