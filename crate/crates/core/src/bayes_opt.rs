//! Kernel-based Bayesian optimization over a finite candidate grid.
//!
//! The next query maximizes `η(x) = f̂(x) + β_m P²(x)` over the grid nodes not
//! observed yet, where `f̂` interpolates every observation so far and `P` is
//! the power function of the observed sites. The weight `β_m` follows one of
//! three schedules; the constant and decreasing ones scale with the RKHS norm
//! of the current interpolant, which is refreshed after every observation.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernel::{clamp_radicand, Interpolant, Kernel, KernelSystem};
use crate::points::PointSet;

/// Decay factor used by the decreasing schedule unless overridden.
pub const DEFAULT_LAMBDA: f64 = 0.9;
/// Total number of objective evaluations per run unless overridden.
pub const DEFAULT_BUDGET: usize = 20;

// Candidates per rayon task in the acquisition scan.
const SCAN_CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScheduleKind {
    Constant,
    Increasing,
    Decreasing,
}

impl ScheduleKind {
    pub fn name(&self) -> &'static str {
        match self {
            ScheduleKind::Constant => "constant",
            ScheduleKind::Increasing => "increasing",
            ScheduleKind::Decreasing => "decreasing",
        }
    }
}

impl std::str::FromStr for ScheduleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "constant" => Ok(ScheduleKind::Constant),
            "increasing" => Ok(ScheduleKind::Increasing),
            "decreasing" => Ok(ScheduleKind::Decreasing),
            other => Err(Error::input(format!(
                "unknown schedule '{other}' (expected constant, increasing or decreasing)"
            ))),
        }
    }
}

/// Exploration weight schedule `β_m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaSchedule {
    kind: ScheduleKind,
    lambda: f64,
    norm_estimate: f64,
}

impl BetaSchedule {
    /// `β_m = ‖f‖`.
    pub fn constant() -> Self {
        Self {
            kind: ScheduleKind::Constant,
            lambda: DEFAULT_LAMBDA,
            norm_estimate: 0.0,
        }
    }

    /// `β_m = √(ln((10/3) m² π²))`.
    pub fn increasing() -> Self {
        Self {
            kind: ScheduleKind::Increasing,
            lambda: DEFAULT_LAMBDA,
            norm_estimate: 0.0,
        }
    }

    /// `β_m = λ^{m−1} ‖f‖` with `0 < λ < 1`.
    pub fn decreasing(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda < 1.0) {
            return Err(Error::input(format!(
                "lambda must lie in (0,1), got {lambda}"
            )));
        }
        Ok(Self {
            kind: ScheduleKind::Decreasing,
            lambda,
            norm_estimate: 0.0,
        })
    }

    pub fn from_kind(kind: ScheduleKind, lambda: f64) -> Result<Self> {
        match kind {
            ScheduleKind::Constant => Ok(Self::constant()),
            ScheduleKind::Increasing => Ok(Self::increasing()),
            ScheduleKind::Decreasing => Self::decreasing(lambda),
        }
    }

    pub fn kind(&self) -> ScheduleKind {
        self.kind
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn norm_estimate(&self) -> f64 {
        self.norm_estimate
    }

    /// Whether the schedule needs an RKHS norm estimate (and therefore observations).
    pub fn uses_norm(&self) -> bool {
        self.kind != ScheduleKind::Increasing
    }

    pub fn with_norm_estimate(mut self, norm: f64) -> Result<Self> {
        if !(norm >= 0.0 && norm.is_finite()) {
            return Err(Error::input(format!(
                "norm estimate must be nonnegative, got {norm}"
            )));
        }
        self.norm_estimate = norm;
        Ok(self)
    }

    /// `β_m` for the m-th acquisition step, `m ≥ 1`.
    pub fn beta(&self, m: usize) -> Result<f64> {
        if m == 0 {
            return Err(Error::input("beta schedule is indexed from m = 1"));
        }
        Ok(match self.kind {
            ScheduleKind::Constant => self.norm_estimate,
            ScheduleKind::Increasing => {
                let m = m as f64;
                (10.0 / 3.0 * m * m * std::f64::consts::PI * std::f64::consts::PI)
                    .ln()
                    .sqrt()
            }
            ScheduleKind::Decreasing => self.lambda.powi((m - 1) as i32) * self.norm_estimate,
        })
    }
}

/// One objective evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub site: Vec<f64>,
    pub value: f64,
    /// Index of the site in the candidate grid.
    pub grid_index: usize,
    /// 0 for initialization points, otherwise the acquisition step m.
    pub step: usize,
    /// `β_m` used to select the site (absent for initialization points).
    pub beta: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct BoConfig {
    kernel: Kernel,
    schedule: BetaSchedule,
    init_indices: Vec<usize>,
    budget: usize,
    candidate_grid: PointSet,
}

impl BoConfig {
    /// Validates the configuration and snaps each initialization point to its grid node.
    ///
    /// A point snaps when it lies within half a grid step of a node along every axis.
    pub fn new(
        kernel: Kernel,
        schedule: BetaSchedule,
        init_set: &PointSet,
        budget: usize,
        candidate_grid: PointSet,
    ) -> Result<Self> {
        if candidate_grid.is_empty() {
            return Err(Error::input("candidate grid is empty"));
        }
        if init_set.dim() != candidate_grid.dim() {
            return Err(Error::input(
                "initialization set and grid differ in dimension",
            ));
        }
        if budget == 0 {
            return Err(Error::input("budget must be positive"));
        }
        if init_set.len() >= budget {
            return Err(Error::input(format!(
                "initialization set has {} points but the budget is {budget}; it must be strictly smaller",
                init_set.len()
            )));
        }
        if budget > candidate_grid.len() {
            return Err(Error::input(format!(
                "budget {budget} exceeds the {} grid points",
                candidate_grid.len()
            )));
        }
        if schedule.uses_norm() && init_set.is_empty() {
            return Err(Error::input(format!(
                "the {} schedule needs a nonempty initialization set",
                schedule.kind().name()
            )));
        }
        let half_steps: Vec<f64> = axis_steps(&candidate_grid)
            .iter()
            .map(|h| 0.5 * h)
            .collect();
        let mut init_indices = Vec::with_capacity(init_set.len());
        for p in init_set.iter() {
            let idx = snap(&candidate_grid, p, &half_steps).ok_or_else(|| {
                Error::input(format!(
                    "initialization point {p:?} is not within half a step of a grid node"
                ))
            })?;
            if init_indices.contains(&idx) {
                return Err(Error::input(format!(
                    "initialization points snap to the same grid node {idx}"
                )));
            }
            init_indices.push(idx);
        }
        Ok(Self {
            kernel,
            schedule,
            init_indices,
            budget,
            candidate_grid,
        })
    }

    pub fn kernel(&self) -> Kernel {
        self.kernel
    }

    pub fn schedule(&self) -> BetaSchedule {
        self.schedule
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn candidate_grid(&self) -> &PointSet {
        &self.candidate_grid
    }

    /// Grid indices of the snapped initialization set.
    pub fn init_indices(&self) -> &[usize] {
        &self.init_indices
    }
}

/// Largest gap between consecutive distinct coordinate values, per axis.
fn axis_steps(grid: &PointSet) -> Vec<f64> {
    (0..grid.dim())
        .map(|a| {
            let mut vals: Vec<f64> = grid.iter().map(|p| p[a]).collect();
            vals.sort_by(f64::total_cmp);
            vals.dedup();
            vals.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
        })
        .collect()
}

fn snap(grid: &PointSet, p: &[f64], half_steps: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, g) in grid.iter().enumerate() {
        let within = g
            .iter()
            .zip(p)
            .zip(half_steps)
            .all(|((a, b), h)| (a - b).abs() <= h * (1.0 + 1e-9) + 1e-12);
        if within {
            let d: f64 = g.iter().zip(p).map(|(a, b)| (a - b) * (a - b)).sum();
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((i, d));
            }
        }
    }
    best.map(|(i, _)| i)
}

/// Observations gathered so far plus the surrogate built on them.
#[derive(Debug, Clone)]
pub struct BoState {
    observations: Vec<Observation>,
    observed_mask: Vec<bool>,
    init_len: usize,
    norm_estimate: f64,
    dim: usize,
    model: Option<Surrogate>,
}

#[derive(Debug, Clone)]
struct Surrogate {
    system: KernelSystem,
    interpolant: Interpolant,
}

impl BoState {
    /// An empty state for a grid of `grid_len` points in `dim` dimensions.
    pub fn empty(dim: usize, grid_len: usize) -> Self {
        Self {
            observations: Vec::new(),
            observed_mask: vec![false; grid_len],
            init_len: 0,
            norm_estimate: 0.0,
            dim,
            model: None,
        }
    }

    /// Evaluates the objective on every initialization point of `config`.
    pub fn initialize<F>(config: &BoConfig, objective: &mut F) -> Result<Self>
    where
        F: FnMut(&[f64]) -> Result<f64>,
    {
        let grid = config.candidate_grid();
        let mut state = Self::empty(grid.dim(), grid.len());
        for &idx in config.init_indices() {
            let site = grid.get(idx).to_vec();
            let value = match checked_eval(objective, &site) {
                Ok(v) => v,
                Err(e) => return Err(state.abort(e)),
            };
            state.record(Observation {
                site,
                value,
                grid_index: idx,
                step: 0,
                beta: None,
            });
        }
        state.init_len = state.observations.len();
        if let Err(e) = state.refit(config.kernel()) {
            return Err(state.abort(e));
        }
        Ok(state)
    }

    pub fn observations(&self) -> &[Observation] {
        &self.observations
    }

    pub fn observed_sites(&self) -> PointSet {
        let mut set = PointSet::with_capacity(self.dim, self.observations.len());
        for o in &self.observations {
            set.push(&o.site)
                .expect("observation dimension is fixed by the grid");
        }
        set
    }

    pub fn observed_values(&self) -> Vec<f64> {
        self.observations.iter().map(|o| o.value).collect()
    }

    /// Completed acquisition steps, `|Xₘ| − |X₀|`.
    pub fn step(&self) -> usize {
        self.observations.len() - self.init_len
    }

    pub fn norm_estimate(&self) -> f64 {
        self.norm_estimate
    }

    pub fn interpolant(&self) -> Option<&Interpolant> {
        self.model.as_ref().map(|m| &m.interpolant)
    }

    pub fn is_observed(&self, grid_index: usize) -> bool {
        self.observed_mask[grid_index]
    }

    fn record(&mut self, obs: Observation) {
        self.observed_mask[obs.grid_index] = true;
        self.observations.push(obs);
    }

    fn refit(&mut self, kernel: Kernel) -> Result<()> {
        if self.observations.is_empty() {
            self.model = None;
            self.norm_estimate = 0.0;
            return Ok(());
        }
        let system = KernelSystem::new(kernel, self.observed_sites(), 0.0)?;
        let interpolant = system.interpolant(&self.observed_values())?;
        self.norm_estimate = interpolant.rkhs_norm()?;
        self.model = Some(Surrogate {
            system,
            interpolant,
        });
        Ok(())
    }

    fn abort(&self, source: Error) -> Error {
        Error::Aborted {
            partial: self.observations.clone(),
            source: Box::new(source),
        }
    }
}

fn checked_eval<F>(objective: &mut F, site: &[f64]) -> Result<f64>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let v = objective(site)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::input(format!(
            "objective returned non-finite value {v} at {site:?}"
        )))
    }
}

/// Acquisition value `f̂(x) + β_m P²(x)` for the current state.
pub fn acquisition(kernel: Kernel, state: &BoState, beta_m: f64, candidate: &[f64]) -> Result<f64> {
    if candidate.len() != state.dim {
        return Err(Error::input(format!(
            "candidate has dimension {}, expected {}",
            candidate.len(),
            state.dim
        )));
    }
    match &state.model {
        None => Ok(beta_m * kernel.eval_unchecked(candidate, candidate)),
        Some(model) => {
            let mut scratch = vec![0.0; model.system.len()];
            let (fhat, radicand) = surrogate_terms(model, candidate, &mut scratch);
            let p2 = clamp_radicand(radicand, model.system.condition_estimate())?;
            Ok(fhat + beta_m * p2)
        }
    }
}

fn surrogate_terms(model: &Surrogate, x: &[f64], scratch: &mut [f64]) -> (f64, f64) {
    model
        .system
        .value_and_radicand_with(model.interpolant.coefficients(), x, scratch)
}

/// Grid index of the unobserved candidate maximizing the acquisition; ties go to the lowest index.
pub fn next_candidate(
    kernel: Kernel,
    state: &BoState,
    beta_m: f64,
    grid: &PointSet,
) -> Result<usize> {
    if grid.len() != state.observed_mask.len() || grid.dim() != state.dim {
        return Err(Error::State(
            "state was built for a different candidate grid".into(),
        ));
    }
    let n_centers = state.model.as_ref().map_or(0, |m| m.system.len());
    let cond = state
        .model
        .as_ref()
        .map_or(1.0, |m| m.system.condition_estimate());

    let best = (0..grid.len())
        .into_par_iter()
        .with_min_len(SCAN_CHUNK)
        .fold(
            || {
                (
                    Vec::<f64>::with_capacity(n_centers),
                    Ok(None::<(usize, f64)>),
                )
            },
            |(mut scratch, acc): (Vec<f64>, Result<Option<(usize, f64)>>), i| {
                let acc = match acc {
                    Err(e) => return (scratch, Err(e)),
                    Ok(a) => a,
                };
                if state.observed_mask[i] {
                    return (scratch, Ok(acc));
                }
                let x = grid.get(i);
                let eta = match &state.model {
                    None => beta_m * kernel.eval_unchecked(x, x),
                    Some(model) => {
                        scratch.resize(n_centers, 0.0);
                        let (fhat, r) = surrogate_terms(model, x, &mut scratch);
                        match clamp_radicand(r, cond) {
                            Ok(p2) => fhat + beta_m * p2,
                            Err(e) => return (scratch, Err(e)),
                        }
                    }
                };
                (scratch, Ok(Some(pick_better(acc, (i, eta)))))
            },
        )
        .map(|(_, acc)| acc)
        .reduce(
            || Ok(None),
            |a, b| match (a, b) {
                (Err(e), _) | (_, Err(e)) => Err(e),
                (Ok(None), Ok(x)) | (Ok(x), Ok(None)) => Ok(x),
                (Ok(Some(x)), Ok(Some(y))) => Ok(Some(pick_better(Some(x), y))),
            },
        )?;
    best.map(|(i, _)| i)
        .ok_or_else(|| Error::State("candidate grid exhausted".into()))
}

// Larger value wins; equal values go to the lower index. NaN never wins.
fn pick_better(current: Option<(usize, f64)>, cand: (usize, f64)) -> (usize, f64) {
    match current {
        None => cand,
        Some(cur) => {
            if cand.1 > cur.1 || (cand.1 == cur.1 && cand.0 < cur.0) || cur.1.is_nan() {
                cand
            } else {
                cur
            }
        }
    }
}

/// Performs one acquisition step: select, evaluate once, refit.
pub fn bo_step<F>(config: &BoConfig, mut state: BoState, objective: &mut F) -> Result<BoState>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    if state.observations.len() >= config.budget() {
        return Err(Error::State("evaluation budget already spent".into()));
    }
    let m = state.step() + 1;
    let beta = config
        .schedule()
        .with_norm_estimate(state.norm_estimate)?
        .beta(m)?;
    let idx = next_candidate(config.kernel(), &state, beta, config.candidate_grid())?;
    let site = config.candidate_grid().get(idx).to_vec();
    let value = match checked_eval(objective, &site) {
        Ok(v) => v,
        Err(e) => return Err(state.abort(e)),
    };
    state.record(Observation {
        site,
        value,
        grid_index: idx,
        step: m,
        beta: Some(beta),
    });
    if let Err(e) = state.refit(config.kernel()) {
        return Err(state.abort(e));
    }
    Ok(state)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Regrets {
    pub cumulative: f64,
    /// Gap between the optimum and the running maximum after each observation.
    pub simple_curve: Vec<f64>,
}

/// Cumulative and simple regret of a trace of observed values.
pub fn regrets(values: &[f64], true_optimum: f64) -> Result<Regrets> {
    let mut cumulative = 0.0;
    let mut running = f64::NEG_INFINITY;
    let mut simple_curve = Vec::with_capacity(values.len());
    for &v in values {
        if v > true_optimum + 1e-9 {
            return Err(Error::input(format!(
                "observed value {v} exceeds the declared optimum {true_optimum}"
            )));
        }
        cumulative += (true_optimum - v).max(0.0);
        running = running.max(v);
        simple_curve.push((true_optimum - running).max(0.0));
    }
    Ok(Regrets {
        cumulative,
        simple_curve,
    })
}

#[derive(Debug, Clone)]
pub struct BoReport {
    pub best_site: Vec<f64>,
    pub best_value: f64,
    pub history: Vec<Observation>,
    pub regrets: Option<Regrets>,
}

impl BoReport {
    fn from_history(history: Vec<Observation>) -> Self {
        let best = history
            .iter()
            .fold(None::<&Observation>, |best, o| match best {
                Some(b) if b.value >= o.value => Some(b),
                _ => Some(o),
            })
            .expect("a run makes at least one observation");
        Self {
            best_site: best.site.clone(),
            best_value: best.value,
            history,
            regrets: None,
        }
    }

    /// Attaches regrets against a known optimum value.
    pub fn with_regrets(mut self, true_optimum: f64) -> Result<Self> {
        let values: Vec<f64> = self.history.iter().map(|o| o.value).collect();
        self.regrets = Some(regrets(&values, true_optimum)?);
        Ok(self)
    }

    pub fn simple_regret_curve(&self) -> Option<&[f64]> {
        self.regrets.as_ref().map(|r| r.simple_curve.as_slice())
    }

    pub fn cumulative_regret(&self) -> Option<f64> {
        self.regrets.as_ref().map(|r| r.cumulative)
    }
}

/// Evaluates the initialization set, then performs `budget − |X₀|` acquisition steps.
pub fn run_bo<F>(config: &BoConfig, mut objective: F) -> Result<BoReport>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let mut state = BoState::initialize(config, &mut objective)?;
    while state.observations.len() < config.budget() {
        let snapshot = state.observations.clone();
        state = match bo_step(config, state, &mut objective) {
            Ok(s) => s,
            Err(e @ Error::Aborted { .. }) => return Err(e),
            Err(e) => {
                return Err(Error::Aborted {
                    partial: snapshot,
                    source: Box::new(e),
                })
            }
        };
    }
    Ok(BoReport::from_history(state.observations))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_2d(nx: usize, ny: usize) -> PointSet {
        let mut g = PointSet::new(2);
        for i in 0..nx {
            for j in 0..ny {
                g.push(&[i as f64, j as f64]).unwrap();
            }
        }
        g
    }

    #[test]
    fn beta_values() {
        let dec = BetaSchedule::decreasing(0.9)
            .unwrap()
            .with_norm_estimate(3.0)
            .unwrap();
        assert_eq!(dec.beta(1).unwrap(), 3.0);
        assert_eq!(dec.beta(3).unwrap(), 0.9 * 0.9 * 3.0);
        let inc = BetaSchedule::increasing();
        assert!((inc.beta(1).unwrap() - 1.86908).abs() < 1e-5);
        assert!((inc.beta(2).unwrap() - 2.20902).abs() < 1e-5);
        let c = BetaSchedule::constant().with_norm_estimate(7.5).unwrap();
        assert_eq!(c.beta(11).unwrap(), 7.5);
        assert!(matches!(inc.beta(0), Err(Error::Input(_))));
        assert!(BetaSchedule::decreasing(1.0).is_err());
        assert!(BetaSchedule::decreasing(0.0).is_err());
    }

    #[test]
    fn config_validation() {
        let g = grid_2d(4, 4);
        let init = PointSet::from_rows(&[[1.0, 1.0], [2.0, 2.0]]).unwrap();
        let k = Kernel::default();
        assert!(BoConfig::new(k, BetaSchedule::constant(), &init, 2, g.clone()).is_err());
        assert!(BoConfig::new(k, BetaSchedule::constant(), &init, 3, g.clone()).is_ok());
        assert!(
            BoConfig::new(k, BetaSchedule::constant(), &PointSet::new(2), 3, g.clone()).is_err()
        );
        assert!(BoConfig::new(
            k,
            BetaSchedule::increasing(),
            &PointSet::new(2),
            3,
            g.clone()
        )
        .is_ok());
        assert!(BoConfig::new(k, BetaSchedule::increasing(), &init, 17, g.clone()).is_err());
        let far = PointSet::from_rows(&[[1.0, 7.0]]).unwrap();
        assert!(BoConfig::new(k, BetaSchedule::increasing(), &far, 3, g.clone()).is_err());
        let close = PointSet::from_rows(&[[1.4, 2.45]]).unwrap();
        let cfg = BoConfig::new(k, BetaSchedule::increasing(), &close, 3, g).unwrap();
        assert_eq!(cfg.init_indices(), &[4 + 2]);
    }

    #[test]
    fn forced_choice_when_one_point_left() {
        let g = grid_2d(2, 2);
        let init = PointSet::from_rows(&[[0.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap();
        let cfg = BoConfig::new(Kernel::default(), BetaSchedule::constant(), &init, 4, g).unwrap();
        let report = run_bo(&cfg, |x: &[f64]| Ok(x[0] + x[1])).unwrap();
        assert_eq!(report.history.len(), 4);
        assert_eq!(report.history[3].site, vec![1.0, 0.0]);
    }

    #[test]
    fn far_candidate_acquisition() {
        let g = PointSet::from_rows(&[[0.0], [1000.0]]).unwrap();
        let init = PointSet::from_rows(&[[0.0]]).unwrap();
        let cfg =
            BoConfig::new(Kernel::default(), BetaSchedule::increasing(), &init, 2, g).unwrap();
        let state = BoState::initialize(&cfg, &mut |_: &[f64]| Ok(4.0)).unwrap();
        let a = acquisition(Kernel::default(), &state, 2.0, &[1000.0]).unwrap();
        assert!((a - 2.0).abs() < 1e-12);
        let at_node = acquisition(Kernel::default(), &state, 2.0, &[0.0]).unwrap();
        assert!((at_node - 4.0).abs() < 1e-9);
    }

    #[test]
    fn grid_exhaustion_is_a_state_error() {
        let g = grid_2d(1, 2);
        let mut state = BoState::empty(2, 2);
        state.record(Observation {
            site: vec![0.0, 0.0],
            value: 1.0,
            grid_index: 0,
            step: 0,
            beta: None,
        });
        state.record(Observation {
            site: vec![0.0, 1.0],
            value: 1.0,
            grid_index: 1,
            step: 0,
            beta: None,
        });
        state.refit(Kernel::default()).unwrap();
        assert!(matches!(
            next_candidate(Kernel::default(), &state, 1.0, &g),
            Err(Error::State(_))
        ));
    }

    #[test]
    fn objective_failure_keeps_partial_history() {
        let g = grid_2d(5, 5);
        let init = PointSet::from_rows(&[[2.0, 2.0]]).unwrap();
        let cfg = BoConfig::new(Kernel::default(), BetaSchedule::constant(), &init, 6, g).unwrap();
        let mut calls = 0;
        let err = run_bo(&cfg, |_: &[f64]| {
            calls += 1;
            if calls == 4 {
                Err(Error::input("boom"))
            } else {
                Ok(calls as f64)
            }
        })
        .unwrap_err();
        match err {
            Error::Aborted { partial, .. } => assert_eq!(partial.len(), 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn regret_closed_forms() {
        let r = regrets(&[1.0, 1.0, 1.0], 3.0).unwrap();
        assert_eq!(r.cumulative, 6.0);
        assert_eq!(r.simple_curve, vec![2.0, 2.0, 2.0]);
        let r = regrets(&[5.0, 2.0, 4.0], 5.0).unwrap();
        assert_eq!(r.simple_curve, vec![0.0, 0.0, 0.0]);
        assert_eq!(r.cumulative, 4.0);
        assert!(regrets(&[5.1], 5.0).is_err());
    }

    #[test]
    fn schedule_parsing() {
        assert_eq!(
            "decreasing".parse::<ScheduleKind>().unwrap(),
            ScheduleKind::Decreasing
        );
        assert!("linear".parse::<ScheduleKind>().is_err());
    }
}
