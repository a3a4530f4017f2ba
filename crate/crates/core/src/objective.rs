//! The tuning objective: negated mean slice PIQUE of a filtered back-projection.
//!
//! Parameters live on the square `[1, 10] × [0.1, 1]` of (order ρ, critical
//! frequency ω₀). [`GridDomain`] discretizes it, [`ObjectiveContext`] evaluates
//! and memoizes the objective, [`grid_oracle`] sweeps a coarse grid and
//! [`tune`] runs Bayesian optimization against it.

use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::bayes_opt::{regrets, run_bo, BoConfig, Regrets, ScheduleKind};
use crate::error::{Error, Result};
use crate::pique::{pique_score, PiqueConfig};
use crate::points::PointSet;
use crate::tomo::{
    add_poisson_noise, fbp_volume, jaszczak_spheres, radon, sphere_phantom, FilterParams, Sinogram,
    Volume,
};

pub const RHO_MIN: f64 = 1.0;
pub const RHO_MAX: f64 = 10.0;
pub const OMEGA_MIN: f64 = 0.1;
pub const OMEGA_MAX: f64 = 1.0;
/// Nodes per axis of the search grid used for tuning.
pub const DEFAULT_GRID_SIZE: usize = 1000;

/// Sphere-phantom dataset used for quick end-to-end runs.
pub const DESK_SIZE: usize = 64;
pub const DESK_SLICES: usize = 8;
pub const DESK_ANGLES: usize = 90;
pub const DESK_PEAK_COUNTS: f64 = 1.0e4;
pub const DESK_SEED: u64 = 2;

// Parameters are matched in the cache after rounding to this resolution.
const CACHE_RESOLUTION: f64 = 1e-9;

/// Equispaced `M × M` grid over the parameter square, ρ-major.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridDomain {
    m: usize,
}

impl GridDomain {
    pub fn new(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::input(format!(
                "grid needs at least 2 nodes per axis, got {m}"
            )));
        }
        Ok(Self { m })
    }

    pub fn nodes_per_axis(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.m * self.m
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn rho(&self, i: usize) -> f64 {
        axis_value(self.m, RHO_MIN, RHO_MAX, i)
    }

    pub fn omega(&self, j: usize) -> f64 {
        axis_value(self.m, OMEGA_MIN, OMEGA_MAX, j)
    }

    pub fn rho_axis(&self) -> Vec<f64> {
        (0..self.m).map(|i| self.rho(i)).collect()
    }

    pub fn omega_axis(&self) -> Vec<f64> {
        (0..self.m).map(|j| self.omega(j)).collect()
    }

    /// Flat index of node `(i, j)`.
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.m + j
    }

    /// `(i, j)` of a flat index.
    pub fn coords(&self, index: usize) -> (usize, usize) {
        (index / self.m, index % self.m)
    }

    pub fn point(&self, index: usize) -> [f64; 2] {
        let (i, j) = self.coords(index);
        [self.rho(i), self.omega(j)]
    }

    pub fn params(&self, index: usize) -> FilterParams {
        let [rho, omega] = self.point(index);
        FilterParams::new(rho, omega).expect("grid nodes lie inside the parameter square")
    }

    /// All nodes as a point set, in flat-index order.
    pub fn candidate_grid(&self) -> PointSet {
        let mut grid = PointSet::with_capacity(2, self.len());
        for i in 0..self.m {
            let rho = self.rho(i);
            for j in 0..self.m {
                grid.push(&[rho, self.omega(j)]).expect("two coordinates");
            }
        }
        grid
    }
}

fn axis_value(m: usize, lo: f64, hi: f64, i: usize) -> f64 {
    assert!(i < m, "axis index {i} out of range for {m} nodes");
    if i == m - 1 {
        hi
    } else {
        lo + (hi - lo) * i as f64 / (m - 1) as f64
    }
}

/// Named initialization sets for the optimizer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitPreset {
    /// `{(5, 0.5)}`
    Single,
    /// `{4, 8} × {0.4, 0.8}`
    Four,
    /// `{3, 6, 9} × {0.3, 0.6, 0.9}`
    Nine,
}

impl InitPreset {
    pub const ALL: [InitPreset; 3] = [InitPreset::Single, InitPreset::Four, InitPreset::Nine];

    pub fn name(&self) -> &'static str {
        match self {
            InitPreset::Single => "single",
            InitPreset::Four => "four",
            InitPreset::Nine => "nine",
        }
    }

    pub fn points(&self) -> PointSet {
        let (rhos, omegas): (&[f64], &[f64]) = match self {
            InitPreset::Single => (&[5.0], &[0.5]),
            InitPreset::Four => (&[4.0, 8.0], &[0.4, 0.8]),
            InitPreset::Nine => (&[3.0, 6.0, 9.0], &[0.3, 0.6, 0.9]),
        };
        let mut set = PointSet::with_capacity(2, rhos.len() * omegas.len());
        for &r in rhos {
            for &w in omegas {
                set.push(&[r, w]).expect("two coordinates");
            }
        }
        set
    }
}

impl std::str::FromStr for InitPreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "single" => Ok(InitPreset::Single),
            "four" => Ok(InitPreset::Four),
            "nine" => Ok(InitPreset::Nine),
            other => Err(Error::input(format!(
                "unknown init preset '{other}' (expected single, four or nine)"
            ))),
        }
    }
}

/// Projection data plus everything needed to score a reconstruction.
#[derive(Debug)]
pub struct ObjectiveContext {
    sinograms: Vec<Sinogram>,
    size: usize,
    pique: PiqueConfig,
    cache: Mutex<HashMap<(i64, i64), f64>>,
    reconstructions: AtomicUsize,
}

impl ObjectiveContext {
    pub fn new(sinograms: Vec<Sinogram>, size: usize, pique: PiqueConfig) -> Result<Self> {
        let first = sinograms
            .first()
            .ok_or_else(|| Error::input("objective needs at least one sinogram slice"))?;
        if let Some(z) = sinograms.iter().position(|s| !s.same_geometry(first)) {
            return Err(Error::input(format!(
                "sinogram {z} has a different geometry from sinogram 0"
            )));
        }
        if size == 0 {
            return Err(Error::input("reconstruction size must be positive"));
        }
        pique.validate()?;
        Ok(Self {
            sinograms,
            size,
            pique,
            cache: Mutex::new(HashMap::new()),
            reconstructions: AtomicUsize::new(0),
        })
    }

    pub fn sinograms(&self) -> &[Sinogram] {
        &self.sinograms
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn pique_config(&self) -> &PiqueConfig {
        &self.pique
    }

    /// Number of volume reconstructions performed so far (cache hits excluded).
    pub fn reconstructions(&self) -> usize {
        self.reconstructions.load(Ordering::Relaxed)
    }

    pub fn cached_len(&self) -> usize {
        self.cache.lock().expect("cache lock").len()
    }

    /// Reconstructs every slice with the given filter, bypassing the cache.
    pub fn reconstruct(&self, params: FilterParams) -> Result<Volume> {
        self.reconstructions.fetch_add(1, Ordering::Relaxed);
        fbp_volume(&self.sinograms, params, self.size)
    }

    /// `f(ρ, ω₀) = −mean_z PIQUE(slice z)`, memoized per parameter pair.
    pub fn value(&self, params: FilterParams) -> Result<f64> {
        let key = cache_key(params);
        if let Some(&v) = self.cache.lock().expect("cache lock").get(&key) {
            return Ok(v);
        }
        let volume = self.reconstruct(params)?;
        let v = -mean(&slice_scores(&volume, &self.pique)?);
        self.cache
            .lock()
            .expect("cache lock")
            .entry(key)
            .or_insert(v);
        Ok(v)
    }

    /// Objective at a point `[ρ, ω₀]`, as passed by the optimizer.
    pub fn value_at(&self, point: &[f64]) -> Result<f64> {
        match point {
            [rho, omega] => self.value(FilterParams::new(*rho, *omega)?),
            _ => Err(Error::input(format!(
                "objective takes (rho, omega0), got {} coordinates",
                point.len()
            ))),
        }
    }
}

fn cache_key(params: FilterParams) -> (i64, i64) {
    (
        (params.order() / CACHE_RESOLUTION).round() as i64,
        (params.critical_frequency() / CACHE_RESOLUTION).round() as i64,
    )
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// PIQUE of every slice of a volume; failures name the offending slice.
pub fn slice_scores(volume: &Volume, config: &PiqueConfig) -> Result<Vec<f64>> {
    (0..volume.num_slices())
        .into_par_iter()
        .map(|z| {
            pique_score(&volume.slice(z), config).map_err(|e| Error::Slice {
                slice: z,
                source: Box::new(e),
            })
        })
        .collect()
}

/// Mean slice PIQUE of a volume (smaller is better).
pub fn mean_pique(volume: &Volume, config: &PiqueConfig) -> Result<f64> {
    Ok(mean(&slice_scores(volume, config)?))
}

/// Exhaustive evaluation of the objective on a coarse grid.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleTable {
    pub domain: GridDomain,
    /// Mean slice PIQUE at each node, in flat-index order.
    pub pique: Vec<f64>,
    /// Flat index of the best node (lowest PIQUE, lowest index on ties).
    pub best_index: usize,
}

impl OracleTable {
    pub fn best_params(&self) -> FilterParams {
        self.domain.params(self.best_index)
    }

    pub fn best_pique(&self) -> f64 {
        self.pique[self.best_index]
    }

    pub fn worst_pique(&self) -> f64 {
        self.pique.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Spread between the worst and best PIQUE on the grid.
    pub fn range(&self) -> f64 {
        self.worst_pique() - self.best_pique()
    }

    /// PIQUE of the node ranked `⌈fraction·|grid|⌉` from the top; nodes at or
    /// below it form the best `fraction` of configurations.
    pub fn top_fraction_threshold(&self, fraction: f64) -> f64 {
        let mut sorted = self.pique.clone();
        sorted.sort_by(f64::total_cmp);
        let k = ((fraction * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
        sorted[k - 1]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.pique[self.domain.index(i, j)]
    }
}

/// Evaluates the objective on every node of a `coarse_m × coarse_m` grid.
///
/// On failure the error is [`Error::Sweep`] carrying the PIQUE values obtained.
pub fn grid_oracle(ctx: &ObjectiveContext, coarse_m: usize) -> Result<OracleTable> {
    let domain = GridDomain::new(coarse_m)?;
    let results: Vec<Result<f64>> = (0..domain.len())
        .into_par_iter()
        .map(|k| ctx.value(domain.params(k)).map(|v| -v))
        .collect();
    if let Some(pos) = results.iter().position(|r| r.is_err()) {
        let partial = results.iter().map(|r| r.as_ref().ok().copied()).collect();
        let source = results
            .into_iter()
            .nth(pos)
            .expect("position in range")
            .unwrap_err();
        return Err(Error::Sweep {
            partial,
            source: Box::new(source),
        });
    }
    let pique: Vec<f64> = results.into_iter().map(|r| r.expect("checked")).collect();
    let mut best_index = 0;
    for (k, &p) in pique.iter().enumerate() {
        if p < pique[best_index] {
            best_index = k;
        }
    }
    Ok(OracleTable {
        domain,
        pique,
        best_index,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceEntry {
    /// 0 for initialization points, otherwise the acquisition step.
    pub step: usize,
    pub rho: f64,
    pub omega0: f64,
    pub pique: f64,
    pub beta: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct TuningReport {
    pub best_params: FilterParams,
    pub best_pique: f64,
    pub trace: Vec<TraceEntry>,
    pub schedule: ScheduleKind,
    pub init_count: usize,
    pub wall_time: Duration,
    /// Regrets in objective units, present when an oracle table was supplied.
    pub regrets: Option<Regrets>,
}

impl TuningReport {
    /// Best PIQUE after each trace entry.
    pub fn running_best(&self) -> Vec<f64> {
        self.trace
            .iter()
            .scan(f64::INFINITY, |best, e| {
                *best = best.min(e.pique);
                Some(*best)
            })
            .collect()
    }

    /// Final simple regret on the PIQUE scale.
    pub fn final_simple_regret(&self) -> Option<f64> {
        self.regrets
            .as_ref()
            .and_then(|r| r.simple_curve.last().copied())
    }
}

/// Runs Bayesian optimization of the objective.
///
/// With an oracle table the regrets use the better of the oracle optimum and
/// the best traced value, since the optimizer may evaluate off the oracle grid.
pub fn tune(
    ctx: &ObjectiveContext,
    config: &BoConfig,
    oracle: Option<&OracleTable>,
) -> Result<TuningReport> {
    let start = Instant::now();
    let report = run_bo(config, |p| ctx.value_at(p))?;
    let wall_time = start.elapsed();

    let trace: Vec<TraceEntry> = report
        .history
        .iter()
        .map(|o| TraceEntry {
            step: o.step,
            rho: o.site[0],
            omega0: o.site[1],
            pique: -o.value,
            beta: o.beta,
        })
        .collect();
    let regrets = match oracle {
        Some(table) => {
            let values: Vec<f64> = report.history.iter().map(|o| o.value).collect();
            Some(regrets(
                &values,
                report.best_value.max(-table.best_pique()),
            )?)
        }
        None => None,
    };
    Ok(TuningReport {
        best_params: FilterParams::new(report.best_site[0], report.best_site[1])?,
        best_pique: -report.best_value,
        trace,
        schedule: config.schedule().kind(),
        init_count: config.init_indices().len(),
        wall_time,
        regrets,
    })
}

/// Forward-projects every slice of a volume, optionally adding Poisson noise.
///
/// Slice `z` is noised with seed `seed·1000 + z`.
pub fn project_volume(
    volume: &Volume,
    num_angles: usize,
    noise: Option<(f64, u64)>,
) -> Result<Vec<Sinogram>> {
    (0..volume.num_slices())
        .into_par_iter()
        .map(|z| {
            let sino = radon(&volume.slice(z), num_angles)?;
            match noise {
                Some((peak, seed)) => {
                    add_poisson_noise(&sino, peak, seed.wrapping_mul(1000).wrapping_add(z as u64))
                }
                None => Ok(sino),
            }
        })
        .collect()
}

/// Noisy projections of the sphere phantom at the desk-scale settings.
pub fn desk_sphere_sinograms(seed: u64) -> Result<Vec<Sinogram>> {
    let volume = sphere_phantom(
        DESK_SIZE,
        DESK_SLICES,
        &jaszczak_spheres(DESK_SIZE, DESK_SLICES),
        1.0,
    )?;
    project_volume(&volume, DESK_ANGLES, Some((DESK_PEAK_COUNTS, seed)))
}
