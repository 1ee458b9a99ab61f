//! Experiment runner behind the `sle-lab` binary.
//!
//! A run resolves an [`ExperimentConfig`], dispatches to one estimator and
//! emits one [`Row`] per `(point, eps)` cell. Rows carry their own run
//! metadata, and all randomness comes from the estimators' seeded streams,
//! so identical configs give byte-identical output.

mod config;
mod fit;
mod output;

pub use config::{parse_list, parse_point, Experiment, ExperimentConfig, OutputFormat, Settings};
pub use fit::{fit_loglog_slope, FitResult};
pub use output::{
    parse_csv, parse_json, render, round_sig, write_output, JsonDocument, Metadata, Report, Row, CSV_HEADER,
    SIGNIFICANT_DIGITS,
};

use crate::error::Result;
use crate::estimators::{
    estimate_boundary_hits, estimate_martingale, estimate_one_point, estimate_ordered_multipoint, estimate_phi_tail,
    estimate_two_point, Estimate, RunConfig,
};
use crate::green::{green_one_point, HPoint};
use crate::params::SleParams;

/// Refinement factor of the convergence experiment's fine run.
pub const CONVERGENCE_REFINEMENT: usize = 10;

struct Cell {
    z: HPoint,
    w: Option<HPoint>,
    eps: Option<f64>,
    target: Option<f64>,
    ratio: Option<f64>,
    flags: Vec<&'static str>,
}

impl Cell {
    fn at(z: HPoint, eps: f64) -> Self {
        Self {
            z,
            w: None,
            eps: Some(eps),
            target: None,
            ratio: None,
            flags: Vec::new(),
        }
    }

    /// Sets the target and the ratio `mean / target`.
    fn against(mut self, target: f64, mean: f64) -> Self {
        self.target = Some(target);
        self.ratio = (target > 0.0).then(|| mean / target);
        self
    }

    fn flag_if(mut self, cond: bool, flag: &'static str) -> Self {
        if cond {
            self.flags.push(flag);
        }
        self
    }

    fn row(self, cfg: &ExperimentConfig, e: &Estimate) -> Row {
        let mut flags = self.flags;
        if e.truncation_suspect() {
            flags.push("truncation-suspect");
        }
        Row {
            experiment: cfg.experiment,
            kappa: cfg.kappa,
            z_re: self.z.re,
            z_im: self.z.im,
            w_re: self.w.map(|w| w.re),
            w_im: self.w.map(|w| w.im),
            eps: self.eps,
            mean: e.mean,
            stderr: e.stderr,
            ci_low: e.ci_low,
            ci_high: e.ci_high,
            n_hits: e.n_hits,
            n_paths: e.n_samples,
            target: self.target,
            ratio: self.ratio,
            dt: cfg.dt,
            horizon: cfg.horizon,
            seed: cfg.seed,
            flag: flags.join(";"),
        }
        .rounded()
    }
}

/// `c_* ε^{2−d} G(z)`, the small-ε asymptote of the one-point probability.
pub fn one_point_target(z: HPoint, eps: f64, p: &SleParams) -> f64 {
    p.c_star * eps.powf(p.interior_exponent()) * green_one_point(z, p)
}

/// Runs the configured experiment. Output is not written.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let run = RunConfig::new(cfg.kappa, cfg.dt, cfg.horizon, cfg.n_paths, cfg.seed)?;
    let p = run.params;
    let mut rows = Vec::new();
    let mut converged = None;
    match cfg.experiment {
        Experiment::OnePoint => {
            for &z in &cfg.points {
                for &eps in &cfg.eps_grid {
                    let e = estimate_one_point(z, eps, &run)?;
                    let cell = Cell::at(z, eps)
                        .against(one_point_target(z, eps, &p), e.mean)
                        .flag_if(eps >= z.im, "trivial");
                    rows.push(cell.row(cfg, &e));
                }
            }
        }
        Experiment::Convergence => {
            let fine_run = run.clone().refined(CONVERGENCE_REFINEMENT);
            let mut all = true;
            for &z in &cfg.points {
                for &eps in &cfg.eps_grid {
                    let coarse = estimate_one_point(z, eps, &run)?;
                    let fine = estimate_one_point(z, eps, &fine_run)?;
                    let drift = (fine.mean - coarse.mean).abs();
                    let ok = drift == 0.0 || drift < fine.half_width();
                    all &= ok;
                    let mut cell = Cell::at(z, eps).flag_if(eps >= z.im, "trivial");
                    cell.target = Some(coarse.mean);
                    cell.ratio = (fine.half_width() > 0.0).then(|| drift / fine.half_width());
                    rows.push(cell.flag_if(ok, "converged").flag_if(!ok, "drift").row(cfg, &fine));
                }
            }
            converged = Some(all);
        }
        Experiment::TwoPoint => {
            let (z, w) = (cfg.points[0], cfg.points[1]);
            let eps_z = cfg.eps_grid[0];
            let eps_w = *cfg.eps_grid.last().expect("validated nonempty");
            let r = estimate_two_point(z, w, eps_z, eps_w, &run)?;
            let mut cell = Cell::at(z, eps_z).flag_if(eps_z >= z.im && eps_w >= w.im, "trivial");
            cell.w = Some(w);
            cell.target = Some(r.envelope);
            cell.ratio = r.ratio;
            rows.push(cell.row(cfg, &r.joint));
        }
        Experiment::Boundary => {
            for hit in estimate_boundary_hits(&cfg.eps_grid, &run)? {
                let z = HPoint { re: 1.0, im: hit.y };
                let target = hit.y.powf(p.boundary_exponent());
                rows.push(Cell::at(z, hit.y).against(target, hit.unconditional.mean).row(cfg, &hit.unconditional));
                let cell = Cell::at(z, hit.y)
                    .against(target, hit.conditional.mean)
                    .flag_if(true, "conditional");
                rows.push(cell.row(cfg, &hit.conditional));
            }
        }
        Experiment::Martingale => {
            let floor = cfg.eps_grid[0];
            for &z in &cfg.points {
                let e = estimate_martingale(z, cfg.horizon, floor, &run)?;
                rows.push(Cell::at(z, floor).against(green_one_point(z, &p), e.mean).row(cfg, &e));
            }
        }
        Experiment::PhiTail => {
            for &z in &cfg.points {
                let estimates = estimate_phi_tail(z, &cfg.eps_grid, &run)?;
                for (&eps, e) in cfg.eps_grid.iter().zip(&estimates) {
                    rows.push(Cell::at(z, eps).against(eps, e.mean).row(cfg, e));
                }
            }
        }
        Experiment::MultiPoint => {
            let eps: Vec<f64> = if cfg.eps_grid.len() == cfg.points.len() {
                cfg.eps_grid.clone()
            } else {
                vec![cfg.eps_grid[0]; cfg.points.len()]
            };
            let e = estimate_ordered_multipoint(&cfg.points, &eps, &run)?;
            let mut cell = Cell::at(cfg.points[0], eps[0]);
            cell.w = cfg.points.get(1).copied();
            rows.push(cell.row(cfg, &e));
        }
    }
    let fit = sweep_fit(cfg, &rows);
    Ok(Report {
        config: cfg.clone(),
        rows,
        fit,
        converged,
    })
}

/// Log-log fit of mean against eps when the rows form a single-point sweep
/// with positive means.
fn sweep_fit(cfg: &ExperimentConfig, rows: &[Row]) -> Option<FitResult> {
    let sweeps = matches!(
        cfg.experiment,
        Experiment::OnePoint | Experiment::Boundary | Experiment::PhiTail
    );
    if !sweeps || cfg.points.len() > 1 {
        return None;
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter(|r| !r.flag.contains("conditional"))
        .filter_map(|r| Some((r.eps?, r.mean)))
        .unzip();
    fit_loglog_slope(&xs, &ys).ok()
}
