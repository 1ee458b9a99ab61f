//! Experiment configuration: a flat `key = value` file merged with overrides.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SleError};
use crate::green::HPoint;
use crate::params::SleParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    OnePoint,
    TwoPoint,
    Boundary,
    Martingale,
    PhiTail,
    MultiPoint,
    Convergence,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Self::OnePoint,
        Self::TwoPoint,
        Self::Boundary,
        Self::Martingale,
        Self::PhiTail,
        Self::MultiPoint,
        Self::Convergence,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::OnePoint => "one-point",
            Self::TwoPoint => "two-point",
            Self::Boundary => "boundary",
            Self::Martingale => "martingale",
            Self::PhiTail => "phi-tail",
            Self::MultiPoint => "multi-point",
            Self::Convergence => "convergence",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = SleError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| SleError::Config(format!("unknown experiment '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = SleError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            _ => Err(SleError::Config(format!("unknown output format '{s}'"))),
        }
    }
}

/// A fully resolved experiment.
///
/// `eps_grid` is read per experiment: closeness radii for one-point, phi-tail
/// and convergence; `[eps_z, eps_w]` (or one shared value) for two-point; the
/// `y` grid for boundary; the stopping floor for martingale, which stops at
/// `horizon`; one radius per point (or one shared value) for multi-point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub kappa: f64,
    pub points: Vec<HPoint>,
    pub eps_grid: Vec<f64>,
    pub dt: f64,
    pub horizon: f64,
    pub n_paths: usize,
    pub seed: u64,
    pub output_format: OutputFormat,
    /// `-` writes to standard output.
    pub output_path: PathBuf,
}

/// Unresolved settings, keyed as in the config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings(BTreeMap<String, String>);

const KEYS: [&str; 12] = [
    "experiment", "kappa", "points", "z", "w", "eps", "dt", "horizon", "n_paths", "seed", "format", "out",
];

impl Settings {
    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut settings = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| SleError::Config(format!("line {}: expected key = value", lineno + 1)))?;
            settings.set(key.trim(), value.trim())?;
        }
        Ok(settings)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| SleError::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.replace('-', "_");
        if !KEYS.contains(&key.as_str()) {
            return Err(SleError::Config(format!("unknown config key '{key}'")));
        }
        self.0.insert(key, value.to_string());
        Ok(())
    }

    /// Applies `overrides` on top of `self`.
    pub fn merged(mut self, overrides: Settings) -> Self {
        self.0.extend(overrides.0);
        self
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.0
            .get(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| SleError::Config(format!("invalid value '{v}' for {key}")))
            })
            .transpose()
    }

    pub fn resolve(&self) -> Result<ExperimentConfig> {
        let experiment: Experiment = self
            .get("experiment")?
            .ok_or_else(|| SleError::Config("missing experiment".into()))?;
        let mut points = match self.0.get("points") {
            Some(list) => list
                .split(';')
                .filter(|s| !s.trim().is_empty())
                .map(parse_point)
                .collect::<Result<Vec<_>>>()?,
            None => Vec::new(),
        };
        for (slot, key) in ["z", "w"].into_iter().enumerate() {
            if let Some(v) = self.0.get(key) {
                let point = parse_point(v)?;
                match slot.cmp(&points.len()) {
                    std::cmp::Ordering::Less => points[slot] = point,
                    std::cmp::Ordering::Equal => points.push(point),
                    std::cmp::Ordering::Greater => {
                        return Err(SleError::Config("w given without z".into()));
                    }
                }
            }
        }
        if points.is_empty() && experiment != Experiment::Boundary {
            points.push(HPoint { re: 0.0, im: 1.0 });
        }
        let eps_grid = match self.0.get("eps") {
            Some(list) => parse_list(list)?,
            None => vec![0.1],
        };
        let cfg = ExperimentConfig {
            experiment,
            kappa: self.get("kappa")?.unwrap_or(8.0 / 3.0),
            points,
            eps_grid,
            dt: self.get("dt")?.unwrap_or(1e-3),
            horizon: self.get("horizon")?.unwrap_or(16.0),
            n_paths: self.get("n_paths")?.unwrap_or(10_000),
            seed: self.get("seed")?.unwrap_or(0),
            output_format: self.get("format")?.unwrap_or(OutputFormat::Csv),
            output_path: self.get("out")?.unwrap_or_else(|| PathBuf::from("-")),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Parses `re,im`.
pub fn parse_point(s: &str) -> Result<HPoint> {
    let bad = || SleError::Config(format!("expected a point 're,im', got '{s}'"));
    let (re, im) = s.split_once(',').ok_or_else(bad)?;
    let re: f64 = re.trim().parse().map_err(|_| bad())?;
    let im: f64 = im.trim().parse().map_err(|_| bad())?;
    HPoint::new(re, im).map_err(|e| SleError::Config(e.to_string()))
}

/// Parses a comma-separated list of reals.
pub fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|v| {
            v.trim()
                .parse()
                .map_err(|_| SleError::Config(format!("invalid number '{}' in list", v.trim())))
        })
        .collect()
}

fn config_err(msg: String) -> SleError {
    SleError::Config(msg)
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        SleParams::from_kappa(self.kappa).map_err(|e| config_err(e.to_string()))?;
        for (name, v) in [("dt", self.dt), ("horizon", self.horizon)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(config_err(format!("{name} must be positive, got {v}")));
            }
        }
        if self.horizon < self.dt {
            return Err(config_err("horizon must be at least dt".into()));
        }
        if self.n_paths == 0 {
            return Err(config_err("n_paths must be positive".into()));
        }
        if self.eps_grid.is_empty() {
            return Err(config_err("eps list is empty".into()));
        }
        if let Some(e) = self.eps_grid.iter().find(|&&e| !(e > 0.0 && e.is_finite())) {
            return Err(config_err(format!("eps values must be positive, got {e}")));
        }
        let (n_points, n_eps) = (self.points.len(), self.eps_grid.len());
        match self.experiment {
            Experiment::TwoPoint => {
                if n_points != 2 {
                    return Err(config_err(format!("two-point needs exactly 2 points, got {n_points}")));
                }
                if self.points[0] == self.points[1] {
                    return Err(config_err("two-point needs distinct points".into()));
                }
                if n_eps > 2 {
                    return Err(config_err("two-point takes eps_z[,eps_w]".into()));
                }
            }
            Experiment::Boundary => {
                if let Some(y) = self.eps_grid.iter().find(|&&y| y > 0.25) {
                    return Err(config_err(format!("boundary y values must be in (0, 1/4], got {y}")));
                }
            }
            Experiment::PhiTail => {
                if let Some(e) = self.eps_grid.iter().find(|&&e| e > 1.0) {
                    return Err(config_err(format!("phi-tail eps values must be in (0, 1], got {e}")));
                }
            }
            Experiment::Martingale => {
                if n_eps != 1 {
                    return Err(config_err("martingale takes a single eps floor".into()));
                }
            }
            Experiment::MultiPoint => {
                if n_eps != 1 && n_eps != n_points {
                    return Err(config_err(format!("{n_points} points but {n_eps} eps values")));
                }
                if (1..n_points).any(|i| self.points[..i].contains(&self.points[i])) {
                    return Err(config_err("multi-point needs distinct points".into()));
                }
            }
            Experiment::OnePoint | Experiment::Convergence => {}
        }
        Ok(())
    }
}
