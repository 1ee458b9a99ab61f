use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use sle_lab::harness::{run_experiment, write_output, Settings};
use sle_lab::SleError;

/// Monte Carlo experiments for chordal SLE.
///
/// Settings come from an optional `key = value` file; flags override it.
#[derive(Debug, Parser)]
#[command(name = "sle-lab", version)]
struct Cli {
    /// one-point, two-point, boundary, martingale, phi-tail, multi-point or convergence.
    #[arg(long)]
    experiment: Option<String>,
    #[arg(long)]
    kappa: Option<String>,
    /// First point, as `re,im`.
    #[arg(long, allow_hyphen_values = true)]
    z: Option<String>,
    /// Second point, as `re,im`.
    #[arg(long, allow_hyphen_values = true)]
    w: Option<String>,
    /// Full point list, as `re,im;re,im;…`.
    #[arg(long, allow_hyphen_values = true)]
    points: Option<String>,
    /// Comma-separated radii (the y grid for `boundary`).
    #[arg(long)]
    eps: Option<String>,
    #[arg(long)]
    dt: Option<String>,
    #[arg(long)]
    horizon: Option<String>,
    #[arg(long)]
    n_paths: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
    /// Output file; `-` for standard output.
    #[arg(long)]
    out: Option<String>,
    /// Config file of `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl Cli {
    fn settings(&self) -> Result<Settings, SleError> {
        let base = match &self.config {
            Some(path) => Settings::from_file(path)?,
            None => Settings::default(),
        };
        let mut overrides = Settings::default();
        for (key, value) in [
            ("experiment", &self.experiment),
            ("kappa", &self.kappa),
            ("z", &self.z),
            ("w", &self.w),
            ("points", &self.points),
            ("eps", &self.eps),
            ("dt", &self.dt),
            ("horizon", &self.horizon),
            ("n_paths", &self.n_paths),
            ("seed", &self.seed),
            ("format", &self.format),
            ("out", &self.out),
        ] {
            if let Some(v) = value {
                overrides.set(key, v)?;
            }
        }
        Ok(base.merged(overrides))
    }
}

fn exit_code(err: &SleError) -> ExitCode {
    match err {
        SleError::Io(_) => ExitCode::from(2),
        _ => ExitCode::from(1),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match cli.settings().and_then(|s| s.resolve()) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("sle-lab: {e}");
            return ExitCode::from(1);
        }
    };
    let started = Instant::now();
    let report = match run_experiment(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("sle-lab: {e}");
            return exit_code(&e);
        }
    };
    let elapsed = started.elapsed().as_secs_f64();
    if let Err(e) = write_output(&report, cfg.output_format, &cfg.output_path) {
        eprintln!("sle-lab: {e}");
        return exit_code(&e);
    }
    eprintln!("{}: {} rows in {elapsed:.2}s", cfg.experiment, report.rows.len());
    if let Some(fit) = report.fit {
        eprintln!(
            "log-log slope {:.4} (intercept {:.4}, r² {:.4}, {} points)",
            fit.slope, fit.intercept, fit.r_squared, fit.n_points
        );
    }
    if let Some(converged) = report.converged {
        eprintln!("{}", if converged { "converged" } else { "not converged: drift exceeds CI half-width" });
    }
    if report.truncation_suspect() {
        eprintln!("warning: some rows are truncation-suspect; consider a longer horizon");
    }
    ExitCode::SUCCESS
}
