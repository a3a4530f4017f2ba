//! Bayesian-optimization mechanics: call counts, no repeats, schedules, regrets.

use std::cell::Cell;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spectune::bayes_opt::{run_bo, BetaSchedule, BoConfig, ScheduleKind};
use spectune::greedy::{run_greedy_from, GreedyCriterion};
use spectune::kernel::{Kernel, SampleSet};
use spectune::PointSet;

fn grid(n: usize) -> PointSet {
    let mut g = PointSet::new(2);
    for i in 0..n {
        for j in 0..n {
            g.push(&[
                i as f64 / (n - 1) as f64 * 4.0,
                j as f64 / (n - 1) as f64 * 4.0,
            ])
            .unwrap();
        }
    }
    g
}

/// Random smooth objective: a sum of a few Gaussian bumps.
fn bumps(seed: u64) -> impl Fn(&[f64]) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b: Vec<(f64, f64, f64, f64)> = (0..4)
        .map(|_| {
            (
                rng.random_range(0.0..4.0),
                rng.random_range(0.0..4.0),
                rng.random_range(-1.0..2.0),
                rng.random_range(0.3..1.5),
            )
        })
        .collect();
    move |x: &[f64]| {
        b.iter()
            .map(|&(cx, cy, a, w)| {
                a * (-((x[0] - cx).powi(2) + (x[1] - cy).powi(2)) / (w * w)).exp()
            })
            .sum()
    }
}

fn schedules() -> [BetaSchedule; 3] {
    [
        BetaSchedule::constant(),
        BetaSchedule::increasing(),
        BetaSchedule::decreasing(0.9).unwrap(),
    ]
}

fn init_points() -> PointSet {
    PointSet::from_rows(&[[1.0, 1.0], [3.0, 3.0], [1.0, 3.0]]).unwrap()
}

#[test]
fn budget_calls_and_no_repeats() {
    let g = grid(15);
    for sched in schedules() {
        for seed in 0..3 {
            let f = bumps(seed);
            let calls = Cell::new(0usize);
            let cfg = BoConfig::new(
                Kernel::matern(1.0).unwrap(),
                sched,
                &init_points(),
                12,
                g.clone(),
            )
            .unwrap();
            let report = run_bo(&cfg, |x| {
                calls.set(calls.get() + 1);
                Ok(f(x))
            })
            .unwrap();
            assert_eq!(calls.get(), 12);
            assert_eq!(report.history.len(), 12);
            let mut idx: Vec<usize> = report.history.iter().map(|o| o.grid_index).collect();
            idx.sort_unstable();
            idx.dedup();
            assert_eq!(idx.len(), 12);
        }
    }
}

#[test]
fn increasing_schedule_on_zero_objective_is_p_greedy() {
    let g = grid(12);
    let init = init_points();
    let cfg = BoConfig::new(
        Kernel::default(),
        BetaSchedule::increasing(),
        &init,
        15,
        g.clone(),
    )
    .unwrap();
    let report = run_bo(&cfg, |_| Ok(0.0)).unwrap();
    let data = SampleSet::new(g.clone(), vec![0.0; g.len()]).unwrap();
    let greedy = run_greedy_from(
        GreedyCriterion::PGreedy,
        Kernel::default(),
        &data,
        cfg.init_indices(),
        15 - init.len(),
    )
    .unwrap();
    let bo_steps: Vec<usize> = report.history[init.len()..]
        .iter()
        .map(|o| o.grid_index)
        .collect();
    assert_eq!(bo_steps, greedy.selected);
}

#[test]
fn increasing_schedule_from_empty_start_is_p_greedy() {
    let g = grid(8);
    let cfg = BoConfig::new(
        Kernel::matern(0.5).unwrap(),
        BetaSchedule::increasing(),
        &PointSet::new(2),
        10,
        g.clone(),
    )
    .unwrap();
    let report = run_bo(&cfg, |_| Ok(0.0)).unwrap();
    let data = SampleSet::new(g.clone(), vec![0.0; g.len()]).unwrap();
    let greedy = run_greedy_from(
        GreedyCriterion::PGreedy,
        Kernel::matern(0.5).unwrap(),
        &data,
        &[],
        10,
    )
    .unwrap();
    let bo: Vec<usize> = report.history.iter().map(|o| o.grid_index).collect();
    assert_eq!(bo, greedy.selected);
}

#[test]
fn simple_regret_is_non_increasing_on_ten_seeds() {
    let g = grid(20);
    for seed in 0..10 {
        let f = bumps(100 + seed);
        let optimum = g.iter().map(&f).fold(f64::NEG_INFINITY, f64::max);
        for sched in schedules() {
            let cfg = BoConfig::new(
                Kernel::matern(1.0).unwrap(),
                sched,
                &init_points(),
                20,
                g.clone(),
            )
            .unwrap();
            let report = run_bo(&cfg, |x| Ok(f(x)))
                .unwrap()
                .with_regrets(optimum)
                .unwrap();
            let curve = report.simple_regret_curve().unwrap();
            assert_eq!(curve.len(), 20);
            for w in curve.windows(2) {
                assert!(w[1] <= w[0], "seed {seed} {:?}: {w:?}", sched.kind());
            }
            assert!(curve.iter().all(|&r| r >= 0.0));
        }
    }
}

#[test]
fn increasing_beta_matches_high_precision_values() {
    // √(ln((10/3)·m²·π²)) evaluated with 40-digit arithmetic (mpmath).
    let oracle = [
        1.869_072_651_350_058_2,
        2.209_010_397_699_528,
        2.385_509_830_908_47,
    ];
    let s = BetaSchedule::increasing();
    for (m, want) in (1..=3).zip(oracle) {
        assert!((s.beta(m).unwrap() - want).abs() <= 1e-12);
    }
}

#[test]
fn decreasing_beta_is_exact_power() {
    let norm = 3.75;
    let s = BetaSchedule::decreasing(0.9)
        .unwrap()
        .with_norm_estimate(norm)
        .unwrap();
    for m in 1..=20usize {
        assert_eq!(s.beta(m).unwrap(), 0.9f64.powi(m as i32 - 1) * norm);
    }
    let c = BetaSchedule::constant().with_norm_estimate(norm).unwrap();
    assert_eq!(c.beta(7).unwrap(), norm);
    assert!(s.beta(0).is_err());
    assert_eq!(s.kind(), ScheduleKind::Decreasing);
}

#[test]
fn best_value_is_the_trace_maximum() {
    let g = grid(10);
    let f = bumps(7);
    let cfg = BoConfig::new(
        Kernel::matern(1.0).unwrap(),
        BetaSchedule::constant(),
        &init_points(),
        10,
        g,
    )
    .unwrap();
    let r = run_bo(&cfg, |x| Ok(f(x))).unwrap();
    let max = r
        .history
        .iter()
        .map(|o| o.value)
        .fold(f64::NEG_INFINITY, f64::max);
    assert_eq!(r.best_value, max);
    assert_eq!(f(&r.best_site), max);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn steps_and_betas_are_recorded(seed in 0u64..500, budget in 4usize..12) {
        let g = grid(9);
        let f = bumps(seed);
        let cfg = BoConfig::new(Kernel::matern(1.0).unwrap(), BetaSchedule::decreasing(0.9).unwrap(), &init_points(), budget, g).unwrap();
        let r = run_bo(&cfg, |x| Ok(f(x))).unwrap();
        for (k, o) in r.history.iter().enumerate() {
            if k < 3 {
                prop_assert_eq!(o.step, 0);
                prop_assert!(o.beta.is_none());
            } else {
                prop_assert_eq!(o.step, k - 2);
                prop_assert!(o.beta.unwrap() >= 0.0);
            }
        }
    }
}
