//! PIQUE: MSCN oracle, score range and invariances, block bookkeeping.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spectune::pique::{
    analyze, block_origins, block_score, mscn, noise_criterion, noticeable_distortion, pique_score,
    BlockLabel, PiqueConfig,
};
use spectune::tomo::{add_poisson_noise, fbp, radon, shepp_logan, FilterParams};
use spectune::GrayImage;

fn mirror(i: isize, n: usize) -> usize {
    // Half-sample symmetric extension, written out for offsets up to one period.
    let n = n as isize;
    let j = if i < 0 {
        -i - 1
    } else if i >= n {
        2 * n - 1 - i
    } else {
        i
    };
    j as usize
}

/// MSCN at one pixel, computed directly from its 7×7 neighbourhood.
fn mscn_at(img: &GrayImage, r: usize, c: usize) -> f64 {
    let mut wsum = 0.0;
    let mut weights = [[0.0; 7]; 7];
    for (a, row) in weights.iter_mut().enumerate() {
        for (b, w) in row.iter_mut().enumerate() {
            let (dy, dx) = (a as f64 - 3.0, b as f64 - 3.0);
            *w = (-(dx * dx + dy * dy) / 2.0).exp();
            wsum += *w;
        }
    }
    let px = |a: usize, b: usize| {
        img.get(
            mirror(r as isize + a as isize - 3, img.height()),
            mirror(c as isize + b as isize - 3, img.width()),
        )
    };
    let taps = || (0..7).flat_map(|a| (0..7).map(move |b| (a, b)));
    let mu: f64 = taps().map(|(a, b)| weights[a][b] / wsum * px(a, b)).sum();
    let var: f64 = taps()
        .map(|(a, b)| weights[a][b] / wsum * (px(a, b) - mu).powi(2))
        .sum();
    (img.get(r, c) - mu) / (var.sqrt() + 1.0)
}

fn random_image(rng: &mut ChaCha8Rng, w: usize, h: usize) -> GrayImage {
    let smooth = rng.random_range(0.0..1.0);
    GrayImage::from_fn(w, h, |r, c| {
        smooth * ((r as f64 * 0.3).sin() + (c as f64 * 0.2).cos()) + rng.random_range(0.0..1.0)
    })
}

#[test]
fn mscn_matches_pixel_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let img = random_image(&mut rng, 40, 33).rescaled(255.0);
    let field = mscn(&img, &PiqueConfig::default()).unwrap();
    for &(r, c) in &[
        (0, 0),
        (0, 39),
        (32, 0),
        (1, 2),
        (16, 20),
        (32, 39),
        (5, 37),
    ] {
        let want = mscn_at(&img, r, c);
        assert!((field.get(r, c) - want).abs() < 1e-12, "({r},{c})");
    }
}

#[test]
fn constant_image_scores_exactly_100() {
    for v in [0.0, 1.0, 42.0, -3.5] {
        let img = GrayImage::from_fn(64, 48, |_, _| v);
        assert_eq!(pique_score(&img, &PiqueConfig::default()).unwrap(), 100.0);
    }
}

#[test]
fn score_stays_in_range_on_random_images() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..200 {
        let w = rng.random_range(30..80);
        let h = rng.random_range(30..80);
        let s = pique_score(&random_image(&mut rng, w, h), &PiqueConfig::default()).unwrap();
        assert!((0.0..=100.0).contains(&s), "{s}");
    }
}

#[test]
fn block_count_and_labels_are_consistent() {
    let cfg = PiqueConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (w, h) in [(30, 30), (64, 64), (77, 50), (128, 96)] {
        let report = analyze(&random_image(&mut rng, w, h), &cfg).unwrap();
        let expected = ((w - 14) / 16) * ((h - 14) / 16);
        assert_eq!(report.blocks.len(), expected);
        assert_eq!(block_origins(w, h, &cfg).len(), expected);
        let uniform = report
            .blocks
            .iter()
            .filter(|b| b.label == BlockLabel::Uniform)
            .count();
        assert_eq!(uniform + report.active_count(), expected);
        let total: f64 = report.blocks.iter().map(|b| b.score).sum();
        let n_sa = report.active_count() as f64;
        assert!((report.score - 100.0 * (total + 1.0) / (n_sa + 1.0)).abs() < 1e-12);
        for b in &report.blocks {
            assert!((0.0..=1.0).contains(&b.score));
            if b.label == BlockLabel::Uniform {
                assert_eq!(b.score, 0.0);
            }
        }
    }
    assert!(analyze(&GrayImage::zeros(29, 64), &cfg).is_err());
}

#[test]
fn block_score_cases() {
    assert_eq!(block_score(true, true, 0.3), 1.0);
    assert_eq!(block_score(false, true, 0.3), 0.3);
    assert_eq!(block_score(true, false, 0.3), 0.7);
    assert_eq!(block_score(false, false, 0.3), 0.0);
    assert_eq!(block_score(false, true, 1.7), 1.0);
    assert_eq!(block_score(true, false, 1.7), 0.0);
}

#[test]
fn flat_edge_segment_is_a_distortion() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut block = GrayImage::from_fn(16, 16, |_, _| rng.random_range(-2.0..2.0));
    assert!(!noticeable_distortion(&block, 6, 0.1));
    for c in 4..10 {
        block.set(15, c, 0.5);
    }
    assert!(noticeable_distortion(&block, 6, 0.1));
}

#[test]
fn noise_criterion_guards() {
    assert!(!noise_criterion(&GrayImage::zeros(16, 16)).unwrap());
    // Only the centre columns vary: the surround deviation is zero.
    let centre_only =
        GrayImage::from_fn(16, 16, |r, c| if c == 7 || c == 8 { r as f64 } else { 0.0 });
    assert!(!noise_criterion(&centre_only).unwrap());
    assert!(noise_criterion(&GrayImage::zeros(3, 3)).is_err());
}

#[test]
fn noisy_reconstruction_scores_worse_than_clean() {
    let cfg = PiqueConfig::default();
    let phantom = shepp_logan(128).unwrap();
    let sino = radon(&phantom, 180).unwrap();
    let params = FilterParams::new(4.0, 0.8).unwrap();
    let clean = pique_score(&fbp(&sino, params, 128).unwrap(), &cfg).unwrap();
    for seed in 0..5 {
        let noisy_sino = add_poisson_noise(&sino, 200.0, seed).unwrap();
        let noisy = pique_score(&fbp(&noisy_sino, params, 128).unwrap(), &cfg).unwrap();
        assert!(noisy > clean, "seed {seed}: noisy {noisy} vs clean {clean}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn offset_invariance(seed in 0u64..10_000, offset in -500.0..500.0f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let img = random_image(&mut rng, 48, 48);
        let shifted = img.map(|v| v + offset);
        let cfg = PiqueConfig::default();
        let a = pique_score(&img, &cfg).unwrap();
        let b = pique_score(&shifted, &cfg).unwrap();
        prop_assert!((a - b).abs() <= 1e-6, "{a} vs {b}");
    }

    #[test]
    fn positive_scaling_invariance(seed in 0u64..10_000, scale in 0.01..100.0f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let img = random_image(&mut rng, 40, 40);
        let cfg = PiqueConfig::default();
        let a = pique_score(&img, &cfg).unwrap();
        let b = pique_score(&img.map(|v| v * scale), &cfg).unwrap();
        prop_assert!((a - b).abs() <= 1e-6);
    }
}
