//! Greedy selection of interpolation sites (P-greedy and f-greedy).
//!
//! Starting from `X₀` (empty by default), each step appends the unselected
//! candidate with the largest error indicator. Ties go to the lowest index.

use crate::error::{Error, Result};
use crate::kernel::{clamp_radicand, Interpolant, Kernel, KernelSystem, SampleSet};
use crate::points::PointSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GreedyCriterion {
    /// Power function `P_{κ,Xₘ}(x)`.
    PGreedy,
    /// Residual magnitude `|f(x) − f̂⁽ᵐ⁾(x)|`.
    FGreedy,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GreedyHistory {
    /// Indices into the candidate set, in selection order (warm-start indices excluded).
    pub selected: Vec<usize>,
    /// Indicator value of each selected candidate at the moment it was chosen.
    pub indicator_values: Vec<f64>,
    /// f-greedy only: max residual over all candidates after each selection.
    pub residual_max: Option<Vec<f64>>,
}

impl GreedyHistory {
    pub fn len(&self) -> usize {
        self.selected.len()
    }

    pub fn is_empty(&self) -> bool {
        self.selected.is_empty()
    }

    pub fn points(&self, data: &SampleSet) -> PointSet {
        data.sites().select(&self.selected)
    }
}

/// Current approximation state after selecting a subset of the candidates.
struct Stage {
    system: Option<KernelSystem>,
    interpolant: Interpolant,
}

impl Stage {
    fn build(
        kernel: Kernel,
        data: &SampleSet,
        selected: &[usize],
        needs_fit: bool,
    ) -> Result<Self> {
        let dim = data.sites().dim();
        if selected.is_empty() {
            return Ok(Self {
                system: None,
                interpolant: Interpolant::zero(kernel, dim),
            });
        }
        let sub = data.subset(selected);
        let system = KernelSystem::new(kernel, sub.sites().clone(), 0.0)?;
        let interpolant = if needs_fit {
            system.interpolant(sub.values())?
        } else {
            Interpolant::zero(kernel, dim)
        };
        Ok(Self {
            system: Some(system),
            interpolant,
        })
    }

    fn power(&self, kernel: Kernel, x: &[f64], scratch: &mut Vec<f64>) -> Result<f64> {
        match &self.system {
            None => Ok(kernel.eval_unchecked(x, x).sqrt()),
            Some(sys) => {
                scratch.resize(sys.len(), 0.0);
                let r = sys.power_radicand_with(x, scratch);
                clamp_radicand(r, sys.condition_estimate()).map(f64::sqrt)
            }
        }
    }
}

/// Indicator `η⁽ᵐ⁾(candidate)` for the given selected set.
///
/// For f-greedy the candidate must be one of `data`'s sites, since the residual needs its value.
pub fn greedy_indicator(
    criterion: GreedyCriterion,
    kernel: Kernel,
    selected: &PointSet,
    data: &SampleSet,
    candidate: &[f64],
) -> Result<f64> {
    if candidate.len() != data.sites().dim() || selected.dim() != data.sites().dim() {
        return Err(Error::input(
            "candidate, selected set and data differ in dimension",
        ));
    }
    match criterion {
        GreedyCriterion::PGreedy => crate::kernel::power_function(kernel, selected, candidate),
        GreedyCriterion::FGreedy => {
            let idx = data
                .sites()
                .position(candidate, 0.0)
                .ok_or_else(|| Error::input("f-greedy candidate must be one of the data sites"))?;
            let mut selected_idx = Vec::with_capacity(selected.len());
            for p in selected.iter() {
                selected_idx.push(
                    data.sites().position(p, 0.0).ok_or_else(|| {
                        Error::input("f-greedy selected points must be data sites")
                    })?,
                );
            }
            let stage = Stage::build(kernel, data, &selected_idx, true)?;
            Ok((data.values()[idx] - stage.interpolant.eval_unchecked(candidate)).abs())
        }
    }
}

/// Runs `budget` greedy steps from an empty start.
pub fn run_greedy(
    criterion: GreedyCriterion,
    kernel: Kernel,
    data: &SampleSet,
    budget: usize,
) -> Result<GreedyHistory> {
    run_greedy_from(criterion, kernel, data, &[], budget)
}

/// Runs `budget` greedy steps after the warm-start sites `initial` (indices into `data`).
pub fn run_greedy_from(
    criterion: GreedyCriterion,
    kernel: Kernel,
    data: &SampleSet,
    initial: &[usize],
    budget: usize,
) -> Result<GreedyHistory> {
    let n = data.len();
    let mut taken = vec![false; n];
    for &i in initial {
        if i >= n {
            return Err(Error::input(format!("warm-start index {i} out of range")));
        }
        if std::mem::replace(&mut taken[i], true) {
            return Err(Error::input(format!("warm-start index {i} repeated")));
        }
    }
    if budget > n - initial.len() {
        return Err(Error::input(format!(
            "budget {budget} exceeds the {} unselected candidates",
            n - initial.len()
        )));
    }

    let needs_fit = criterion == GreedyCriterion::FGreedy;
    let mut current: Vec<usize> = initial.to_vec();
    let mut history = GreedyHistory {
        selected: Vec::with_capacity(budget),
        indicator_values: Vec::with_capacity(budget),
        residual_max: needs_fit.then(Vec::new),
    };
    let mut stage = Stage::build(kernel, data, &current, needs_fit)?;
    let mut scratch = Vec::new();

    for _ in 0..budget {
        let mut best: Option<(usize, f64)> = None;
        for i in (0..n).filter(|&i| !taken[i]) {
            let x = data.sites().get(i);
            let eta = match criterion {
                GreedyCriterion::PGreedy => stage.power(kernel, x, &mut scratch)?,
                GreedyCriterion::FGreedy => {
                    (data.values()[i] - stage.interpolant.eval_unchecked(x)).abs()
                }
            };
            if best.is_none_or(|(_, b)| eta > b) {
                best = Some((i, eta));
            }
        }
        let (pick, eta) = best.expect("budget check guarantees a remaining candidate");
        taken[pick] = true;
        current.push(pick);
        history.selected.push(pick);
        history.indicator_values.push(eta);

        stage = Stage::build(kernel, data, &current, needs_fit)?;
        if let Some(res) = history.residual_max.as_mut() {
            let worst = (0..n)
                .map(|i| {
                    (data.values()[i] - stage.interpolant.eval_unchecked(data.sites().get(i))).abs()
                })
                .fold(0.0, f64::max);
            res.push(worst);
        }
    }
    Ok(history)
}
