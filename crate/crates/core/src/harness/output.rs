//! Result rows and their CSV and JSON encodings.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::{Experiment, ExperimentConfig, OutputFormat};
use super::fit::FitResult;
use crate::error::{domain, Result, SleError};

/// Significant digits kept for every real in a row.
pub const SIGNIFICANT_DIGITS: usize = 12;

/// Rounds to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .expect("scientific notation round-trips")
}

/// One `(point, eps)` cell. Field order is the CSV header.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub experiment: Experiment,
    pub kappa: f64,
    pub z_re: f64,
    pub z_im: f64,
    pub w_re: Option<f64>,
    pub w_im: Option<f64>,
    pub eps: Option<f64>,
    pub mean: f64,
    pub stderr: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n_hits: Option<usize>,
    pub n_paths: usize,
    pub target: Option<f64>,
    pub ratio: Option<f64>,
    pub dt: f64,
    pub horizon: f64,
    pub seed: u64,
    /// `;`-separated markers such as `truncation-suspect` or `trivial`.
    pub flag: String,
}

pub const CSV_HEADER: [&str; 19] = [
    "experiment", "kappa", "z_re", "z_im", "w_re", "w_im", "eps", "mean", "stderr", "ci_low", "ci_high", "n_hits",
    "n_paths", "target", "ratio", "dt", "horizon", "seed", "flag",
];

impl Row {
    /// Rounds every real to the serialized precision, so that encoding and
    /// decoding are exact inverses.
    pub fn rounded(mut self) -> Self {
        for v in [
            &mut self.kappa,
            &mut self.z_re,
            &mut self.z_im,
            &mut self.mean,
            &mut self.stderr,
            &mut self.ci_low,
            &mut self.ci_high,
            &mut self.dt,
            &mut self.horizon,
        ] {
            *v = round_sig(*v);
        }
        for v in [&mut self.w_re, &mut self.w_im, &mut self.eps, &mut self.target, &mut self.ratio]
            .into_iter()
            .flatten()
        {
            *v = round_sig(*v);
        }
        self
    }
}

/// Everything one run produces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub config: ExperimentConfig,
    pub rows: Vec<Row>,
    /// Log-log fit of `mean` against `eps` over the rows of a sweep.
    pub fit: Option<FitResult>,
    /// Convergence runs only: every cell drifted by less than its half-width.
    pub converged: Option<bool>,
}

impl Report {
    pub fn truncation_suspect(&self) -> bool {
        self.rows.iter().any(|r| r.flag.split(';').any(|f| f == "truncation-suspect"))
    }
}

/// The config is echoed at full precision so that a run can be repeated
/// from the file alone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub software: String,
    pub version: String,
    pub seed: u64,
    pub config: ExperimentConfig,
    pub fit: Option<FitResult>,
    pub converged: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonDocument {
    pub metadata: Metadata,
    pub rows: Vec<Row>,
}

/// Encodes the report in `format`.
pub fn render(report: &Report, format: OutputFormat) -> Result<String> {
    if report.rows.is_empty() {
        return domain("no rows to write");
    }
    match format {
        OutputFormat::Csv => {
            let mut writer = csv::Writer::from_writer(Vec::new());
            for row in &report.rows {
                writer.serialize(row).map_err(|e| SleError::Io(e.to_string()))?;
            }
            let bytes = writer.into_inner().map_err(|e| SleError::Io(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| SleError::Io(e.to_string()))
        }
        OutputFormat::Json => {
            let doc = JsonDocument {
                metadata: Metadata {
                    software: env!("CARGO_PKG_NAME").into(),
                    version: env!("CARGO_PKG_VERSION").into(),
                    seed: report.config.seed,
                    config: report.config.clone(),
                    fit: report.fit.map(|f| FitResult {
                        slope: round_sig(f.slope),
                        intercept: round_sig(f.intercept),
                        r_squared: round_sig(f.r_squared),
                        n_points: f.n_points,
                    }),
                    converged: report.converged,
                },
                rows: report.rows.clone(),
            };
            let mut text = serde_json::to_string_pretty(&doc).map_err(|e| SleError::Io(e.to_string()))?;
            text.push('\n');
            Ok(text)
        }
    }
}

/// Writes the report to `path`, or to standard output for `-`.
pub fn write_output(report: &Report, format: OutputFormat, path: &Path) -> Result<()> {
    let text = render(report, format)?;
    if path == Path::new("-") {
        print!("{text}");
        return Ok(());
    }
    fs::write(path, text).map_err(|e| SleError::Io(format!("cannot write {}: {e}", path.display())))
}

pub fn parse_csv(text: &str) -> Result<Vec<Row>> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| SleError::Io(e.to_string()))
}

pub fn parse_json(text: &str) -> Result<JsonDocument> {
    serde_json::from_str(text).map_err(|e| SleError::Io(e.to_string()))
}
