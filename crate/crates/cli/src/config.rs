//! `key=value` run configuration for `tune` and `grid`.
//!
//! Values from a file are applied first; command-line flags override them.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use spectune::bayes_opt::{ScheduleKind, DEFAULT_BUDGET, DEFAULT_LAMBDA};
use spectune::objective::{
    InitPreset, DEFAULT_GRID_SIZE, DESK_ANGLES, DESK_PEAK_COUNTS, DESK_SEED, DESK_SIZE, DESK_SLICES,
};
use spectune::pique::PiqueConfig;
use spectune::tomo::MIN_PHANTOM_SIZE;
use spectune::volume_io::parse_key_values;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhantomKind {
    SheppLogan,
    Spheres,
}

impl PhantomKind {
    pub fn name(&self) -> &'static str {
        match self {
            PhantomKind::SheppLogan => "shepp-logan",
            PhantomKind::Spheres => "spheres",
        }
    }
}

impl FromStr for PhantomKind {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "shepp-logan" => Ok(PhantomKind::SheppLogan),
            "spheres" => Ok(PhantomKind::Spheres),
            other => Err(CliError::usage(format!(
                "unknown phantom kind '{other}' (expected shepp-logan or spheres)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub schedule: ScheduleKind,
    pub lambda: f64,
    pub init: InitPreset,
    pub budget: usize,
    pub grid: usize,
    pub oracle: Option<usize>,
    /// Reconstruction size; read from the sinogram sidecar when absent.
    pub size: Option<usize>,
    pub out_dir: Option<PathBuf>,
    /// Synthetic data used when no sinogram file is given.
    pub phantom: PhantomKind,
    pub phantom_size: usize,
    pub slices: usize,
    pub angles: usize,
    /// Peak expected counts for Poisson noise; 0 disables noise.
    pub noise_counts: f64,
    pub seed: u64,
    pub pique: PiqueConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            schedule: ScheduleKind::Constant,
            lambda: DEFAULT_LAMBDA,
            init: InitPreset::Nine,
            budget: DEFAULT_BUDGET,
            grid: DEFAULT_GRID_SIZE,
            oracle: None,
            size: None,
            out_dir: None,
            phantom: PhantomKind::Spheres,
            phantom_size: DESK_SIZE,
            slices: DESK_SLICES,
            angles: DESK_ANGLES,
            noise_counts: DESK_PEAK_COUNTS,
            seed: DESK_SEED,
            pique: PiqueConfig::default(),
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| CliError::usage(format!("invalid value '{value}' for key '{key}'")))
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut config = Self::default();
        for (key, value) in parse_key_values(&text)? {
            config.apply(&key, &value)?;
        }
        Ok(config)
    }

    pub fn apply(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        match key {
            "schedule" => self.schedule = value.parse()?,
            "lambda" => self.lambda = parse(key, value)?,
            "init" => self.init = value.parse()?,
            "budget" => self.budget = parse(key, value)?,
            "grid" => self.grid = parse(key, value)?,
            "oracle" => self.oracle = Some(parse(key, value)?),
            "size" => self.size = Some(parse(key, value)?),
            "out_dir" => self.out_dir = Some(PathBuf::from(value)),
            "phantom" => self.phantom = value.parse()?,
            "phantom_size" => self.phantom_size = parse(key, value)?,
            "slices" => self.slices = parse(key, value)?,
            "angles" => self.angles = parse(key, value)?,
            "noise_counts" => self.noise_counts = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "pique.block_size" => self.pique.block_size = parse(key, value)?,
            "pique.segment_length" => self.pique.segment_length = parse(key, value)?,
            "pique.uniform_threshold" => self.pique.uniform_threshold = parse(key, value)?,
            "pique.segment_std_threshold" => self.pique.segment_std_threshold = parse(key, value)?,
            "pique.mscn_stability" => self.pique.mscn_stability = parse(key, value)?,
            "pique.score_stability" => self.pique.score_stability = parse(key, value)?,
            "pique.window_half_extent" => self.pique.window_half_extent = parse(key, value)?,
            other => {
                return Err(CliError::usage(format!(
                    "unknown configuration key '{other}'"
                )))
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.lambda > 0.0 && self.lambda < 1.0) {
            return Err(CliError::usage(format!(
                "lambda must lie in (0, 1), got {}",
                self.lambda
            )));
        }
        if self.grid < 2 {
            return Err(CliError::usage(format!(
                "grid must be at least 2, got {}",
                self.grid
            )));
        }
        if matches!(self.oracle, Some(m) if m < 2) {
            return Err(CliError::usage("oracle grid must be at least 2"));
        }
        if self.size == Some(0) {
            return Err(CliError::usage("size must be positive"));
        }
        if self.phantom_size < MIN_PHANTOM_SIZE {
            return Err(CliError::usage(format!(
                "phantom size {} is below the minimum {MIN_PHANTOM_SIZE}",
                self.phantom_size
            )));
        }
        if self.slices == 0 || self.angles == 0 {
            return Err(CliError::usage("slices and angles must be positive"));
        }
        if !(self.noise_counts >= 0.0 && self.noise_counts.is_finite()) {
            return Err(CliError::usage("noise_counts must be a nonnegative number"));
        }
        self.pique.validate()?;
        Ok(())
    }
}
