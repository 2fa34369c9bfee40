//! Prediction tables and the measured-vs-predicted summary.
//!
//! Predictions CSV columns: `drug_id,protein_id,measured,predicted`.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRow {
    pub drug_id: String,
    pub protein_id: String,
    pub measured: f64,
    pub predicted: f64,
}

pub fn write_predictions(path: impl AsRef<Path>, rows: &[PredictionRow]) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path).map_err(|e| e.context_path(path))?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| Error::file(path, e))?;
    Ok(())
}

pub fn read_predictions(path: impl AsRef<Path>) -> Result<Vec<PredictionRow>> {
    let path = path.as_ref();
    let mut r = csv::Reader::from_path(path).map_err(|e| e.context_path(path))?;
    let mut rows = Vec::new();
    for (i, rec) in r.deserialize().enumerate() {
        let row: PredictionRow = rec.map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: i + 2,
            message: e.to_string(),
        })?;
        if !row.measured.is_finite() || !row.predicted.is_finite() {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: i + 2,
                message: "non-finite value".into(),
            });
        }
        rows.push(row);
    }
    Ok(rows)
}

trait CsvPathContext {
    fn context_path(self, path: &Path) -> Error;
}

impl CsvPathContext for csv::Error {
    fn context_path(self, path: &Path) -> Error {
        match self.into_kind() {
            csv::ErrorKind::Io(io) => Error::file(path, io),
            other => Error::Parse {
                path: path.to_path_buf(),
                line: 0,
                message: format!("{other:?}"),
            },
        }
    }
}

/// Least-squares line `predicted = intercept + slope · measured`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegressionLine {
    pub slope: f64,
    pub intercept: f64,
}

pub fn regression_line(measured: &[f64], predicted: &[f64]) -> Result<RegressionLine> {
    if measured.len() != predicted.len() {
        return Err(Error::LengthMismatch {
            left: measured.len(),
            right: predicted.len(),
        });
    }
    if measured.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = measured.len() as f64;
    let mx = measured.iter().sum::<f64>() / n;
    let my = predicted.iter().sum::<f64>() / n;
    let sxx: f64 = measured.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateInput("measured values are constant"));
    }
    let sxy: f64 = measured
        .iter()
        .zip(predicted)
        .map(|(x, y)| (x - mx) * (y - my))
        .sum();
    let slope = sxy / sxx;
    Ok(RegressionLine {
        slope,
        intercept: my - slope * mx,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportSummary {
    pub n: usize,
    pub line: Option<RegressionLine>,
    pub ci: Option<f64>,
    pub mse: f64,
    pub r2: Option<f64>,
    pub r2_origin: Option<f64>,
    pub rm2: Option<f64>,
    /// Human-readable notes for every metric that could not be computed.
    pub degenerate: Vec<String>,
}

pub fn summarize(rows: &[PredictionRow]) -> Result<ReportSummary> {
    let measured: Vec<f64> = rows.iter().map(|r| r.measured).collect();
    let predicted: Vec<f64> = rows.iter().map(|r| r.predicted).collect();
    let mse = metrics::mse(&measured, &predicted)?;
    let mut degenerate = Vec::new();
    let mut note = |what: &str, e: Error| degenerate.push(format!("{what}: {e}"));
    let line = regression_line(&measured, &predicted)
        .map_err(|e| note("regression line", e))
        .ok();
    let ci = metrics::concordance_index(&measured, &predicted)
        .map_err(|e| note("ci", e))
        .ok();
    let (r2, r2_origin, rm2) = match metrics::r_squared_pair(&measured, &predicted) {
        Ok((r2, r0)) => (Some(r2), Some(r0), metrics::rm2(&measured, &predicted).ok()),
        Err(e) => {
            note("r2", e);
            (None, None, None)
        }
    };
    Ok(ReportSummary {
        n: rows.len(),
        line,
        ci,
        mse,
        r2,
        r2_origin,
        rm2,
        degenerate,
    })
}

pub fn render_table(s: &ReportSummary) -> String {
    let fmt = |v: Option<f64>| v.map_or_else(|| "degenerate".to_string(), |v| format!("{v:.4}"));
    let mut out = String::new();
    let _ = writeln!(out, "{:<12} {:>12}", "metric", "value");
    let _ = writeln!(out, "{:<12} {:>12}", "n", s.n);
    let _ = writeln!(out, "{:<12} {:>12}", "CI", fmt(s.ci));
    let _ = writeln!(out, "{:<12} {:>12.4}", "MSE", s.mse);
    let _ = writeln!(out, "{:<12} {:>12}", "r2", fmt(s.r2));
    let _ = writeln!(out, "{:<12} {:>12}", "r2_origin", fmt(s.r2_origin));
    let _ = writeln!(out, "{:<12} {:>12}", "rm2", fmt(s.rm2));
    let _ = writeln!(out, "{:<12} {:>12}", "slope", fmt(s.line.map(|l| l.slope)));
    let _ = writeln!(out, "{:<12} {:>12}", "intercept", fmt(s.line.map(|l| l.intercept)));
    for d in &s.degenerate {
        let _ = writeln!(out, "note: {d}");
    }
    out
}

pub fn scatter_csv(rows: &[PredictionRow]) -> String {
    let mut out = String::from("measured,predicted\n");
    for r in rows {
        let _ = writeln!(out, "{},{}", r.measured, r.predicted);
    }
    out
}

/// Minimal SVG scatter plot with the identity line and the fitted line.
pub fn render_svg(rows: &[PredictionRow], line: Option<RegressionLine>) -> String {
    const SIZE: f64 = 480.0;
    const PAD: f64 = 40.0;
    let values = rows.iter().flat_map(|r| [r.measured, r.predicted]);
    let lo = values.clone().fold(f64::INFINITY, f64::min);
    let hi = values.fold(f64::NEG_INFINITY, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };
    let px = |v: f64| PAD + (v - lo) / span * (SIZE - 2.0 * PAD);
    let py = |v: f64| SIZE - px(v);
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
         <line x1=\"{:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"#999\" stroke-dasharray=\"4\"/>\n",
        px(lo),
        py(lo),
        px(hi),
        py(hi)
    );
    for r in rows {
        let _ = writeln!(
            svg,
            "<circle cx=\"{:.1}\" cy=\"{:.1}\" r=\"1.5\" fill=\"#1f77b4\" fill-opacity=\"0.5\"/>",
            px(r.measured),
            py(r.predicted)
        );
    }
    if let Some(l) = line {
        let _ = writeln!(
            svg,
            "<line x1=\"{:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"red\"/>",
            px(lo),
            py(l.intercept + l.slope * lo),
            px(hi),
            py(l.intercept + l.slope * hi)
        );
    }
    let _ = writeln!(
        svg,
        "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"12\">measured</text>\n\
         <text x=\"6\" y=\"{:.1}\" font-size=\"12\">predicted</text>\n</svg>",
        SIZE / 2.0 - 25.0,
        SIZE - 8.0,
        PAD - 10.0
    );
    svg
}
