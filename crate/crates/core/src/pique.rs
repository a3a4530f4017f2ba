//! PIQUE: a block-based no-reference image quality score.
//!
//! The image is rescaled to `[0,255]` and whitened into MSCN coefficients
//! `(I − μ)/(σ + C)` using a unit-volume Gaussian window. Interior `n×n`
//! blocks whose MSCN variance reaches `T_U` are spatially active; each active
//! block is tested for low-activity edge segments (noticeable distortion) and
//! for a centre/surround deviation mismatch (white noise), and scored `D_k`.
//! The score is `100·(ΣD_k + C)/(N_SA + C)`; lower means better quality.

use crate::error::{Error, Result};
use crate::image::GrayImage;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PiqueConfig {
    /// Side `n` of the square analysis blocks.
    pub block_size: usize,
    /// Length of the edge segments checked for low activity.
    pub segment_length: usize,
    /// MSCN variance threshold `T_U` separating uniform from active blocks.
    pub uniform_threshold: f64,
    /// Segment deviation threshold `T_STD`.
    pub segment_std_threshold: f64,
    /// Stabilizer added to the local deviation (on the `[0,255]` scale).
    pub mscn_stability: f64,
    /// Stabilizer in the final ratio.
    pub score_stability: f64,
    /// Half extent `K = L` of the Gaussian window.
    pub window_half_extent: usize,
}

impl Default for PiqueConfig {
    fn default() -> Self {
        Self {
            block_size: 16,
            segment_length: 6,
            uniform_threshold: 0.1,
            segment_std_threshold: 0.1,
            mscn_stability: 1.0,
            score_stability: 1.0,
            window_half_extent: 3,
        }
    }
}

impl PiqueConfig {
    pub fn validate(&self) -> Result<()> {
        if self.block_size < 4 {
            return Err(Error::input(format!(
                "block size {} is below 4",
                self.block_size
            )));
        }
        if self.segment_length == 0 || self.segment_length >= self.block_size {
            return Err(Error::input(format!(
                "segment length {} must lie in [1, block size)",
                self.segment_length
            )));
        }
        if self.window_half_extent == 0 {
            return Err(Error::input("window half extent must be at least 1"));
        }
        for (name, v) in [
            ("uniform threshold", self.uniform_threshold),
            ("segment std threshold", self.segment_std_threshold),
            ("MSCN stability constant", self.mscn_stability),
            ("score stability constant", self.score_stability),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::input(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    /// Width of the excluded boundary frame, `2K+1` pixels.
    pub fn boundary_frame(&self) -> usize {
        2 * self.window_half_extent + 1
    }
}

/// Circularly symmetric Gaussian weights on a `(2K+1)²` stencil.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianWindow {
    half_extent: usize,
    weights: Vec<f64>,
}

impl GaussianWindow {
    pub fn half_extent(&self) -> usize {
        self.half_extent
    }

    pub fn side(&self) -> usize {
        2 * self.half_extent + 1
    }

    /// Weight at offset `(k, l)`, each in `[-K, K]`.
    pub fn weight(&self, k: isize, l: isize) -> f64 {
        let h = self.half_extent as isize;
        let side = self.side();
        self.weights[(k + h) as usize * side + (l + h) as usize]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Gaussian window reaching three standard deviations at its edge (`σ = K/3`), normalized to unit sum.
pub fn gaussian_window(half_extent: usize) -> GaussianWindow {
    let half = half_extent.max(1);
    let sigma = half as f64 / 3.0;
    let side = 2 * half + 1;
    let h = half as f64;
    let mut weights = Vec::with_capacity(side * side);
    for i in 0..side {
        for j in 0..side {
            let (y, x) = (i as f64 - h, j as f64 - h);
            weights.push((-(x * x + y * y) / (2.0 * sigma * sigma)).exp());
        }
    }
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    GaussianWindow {
        half_extent: half,
        weights,
    }
}

// Half-sample symmetric reflection: -1 -> 0, len -> len-1.
#[inline]
fn reflect(i: isize, len: usize) -> usize {
    let n = len as isize;
    let mut i = i;
    loop {
        if i < 0 {
            i = -i - 1;
        } else if i >= n {
            i = 2 * n - i - 1;
        } else {
            return i as usize;
        }
    }
}

/// MSCN coefficients of `image` (no rescaling is applied here).
pub fn mscn(image: &GrayImage, config: &PiqueConfig) -> Result<GrayImage> {
    config.validate()?;
    let window = gaussian_window(config.window_half_extent);
    let side = window.side();
    if image.width() < side || image.height() < side {
        return Err(Error::input(format!(
            "image {}x{} is smaller than the {side}x{side} window",
            image.width(),
            image.height()
        )));
    }
    let (w, h) = (image.width(), image.height());
    let k = window.half_extent() as isize;
    let mut out = GrayImage::zeros(w, h);
    let mut patch = vec![0.0; side * side];
    for r in 0..h {
        for c in 0..w {
            for (pi, dr) in (-k..=k).enumerate() {
                let rr = reflect(r as isize + dr, h);
                for (pj, dc) in (-k..=k).enumerate() {
                    patch[pi * side + pj] = image.get(rr, reflect(c as isize + dc, w));
                }
            }
            let mu: f64 = patch.iter().zip(window.weights()).map(|(v, w)| v * w).sum();
            let var: f64 = patch
                .iter()
                .zip(window.weights())
                .map(|(v, w)| w * (v - mu) * (v - mu))
                .sum();
            let sigma = var.max(0.0).sqrt();
            out.set(
                r,
                c,
                (image.get(r, c) - mu) / (sigma + config.mscn_stability),
            );
        }
    }
    Ok(out)
}

// Two-pass population variance.
fn variance(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let (count, sum) = values
        .clone()
        .fold((0usize, 0.0), |(n, s), v| (n + 1, s + v));
    if count == 0 {
        return 0.0;
    }
    let mean = sum / count as f64;
    values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / count as f64
}

fn std_dev(values: impl Iterator<Item = f64> + Clone) -> f64 {
    variance(values).sqrt()
}

/// Population variance (divide by `n²`) of a block of MSCN coefficients.
pub fn block_variance(block: &GrayImage) -> f64 {
    variance(block.as_slice().iter().copied())
}

/// True when some length-`segment_length` run on one of the four block edges has deviation below `std_threshold`.
///
/// Each edge contributes `n − m` segments starting at offsets `0 … n−m−1`.
pub fn noticeable_distortion(block: &GrayImage, segment_length: usize, std_threshold: f64) -> bool {
    let n = block.width();
    debug_assert_eq!(n, block.height());
    if segment_length == 0 || segment_length > n {
        return false;
    }
    let edges: [Vec<f64>; 4] = [
        (0..n).map(|c| block.get(0, c)).collect(),
        (0..n).map(|c| block.get(n - 1, c)).collect(),
        (0..n).map(|r| block.get(r, 0)).collect(),
        (0..n).map(|r| block.get(r, n - 1)).collect(),
    ];
    edges.iter().any(|edge| {
        (0..n - segment_length)
            .any(|q| std_dev(edge[q..q + segment_length].iter().copied()) < std_threshold)
    })
}

/// Centre/surround white-noise test `σ_k > 2β`.
///
/// The centre is the two middle columns, the surround every other column.
/// Undefined ratios (zero surround or zero denominator) count as not noisy.
pub fn noise_criterion(block: &GrayImage) -> Result<bool> {
    let n = block.width();
    if n < 4 || block.height() != n {
        return Err(Error::input(format!(
            "noise criterion needs a square block of side at least 4, got {}x{}",
            block.width(),
            block.height()
        )));
    }
    let (c0, c1) = (n / 2 - 1, n / 2);
    let data = block.as_slice();
    let col = |i: usize| i % n;
    let sigma_k = std_dev(data.iter().copied());
    let sigma_cen = std_dev(
        data.iter()
            .enumerate()
            .filter(move |(i, _)| col(*i) == c0 || col(*i) == c1)
            .map(|(_, &v)| v),
    );
    let sigma_sur = std_dev(
        data.iter()
            .enumerate()
            .filter(move |(i, _)| col(*i) != c0 && col(*i) != c1)
            .map(|(_, &v)| v),
    );
    if sigma_sur == 0.0 {
        return Ok(false);
    }
    let ratio = sigma_cen / sigma_sur;
    let denom = ratio.max(sigma_k);
    if denom == 0.0 {
        return Ok(false);
    }
    let beta = (ratio - sigma_k).abs() / denom;
    Ok(sigma_k > 2.0 * beta)
}

/// Block distortion score `D_k`; `nu_k` is clamped to `[0,1]`.
pub fn block_score(distorted: bool, noisy: bool, nu_k: f64) -> f64 {
    let nu = nu_k.clamp(0.0, 1.0);
    match (distorted, noisy) {
        (true, true) => 1.0,
        (false, true) => nu,
        (true, false) => 1.0 - nu,
        (false, false) => 0.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockLabel {
    Uniform,
    SpatiallyActive,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockAnalysis {
    /// Top-left pixel of the block.
    pub row: usize,
    pub col: usize,
    pub label: BlockLabel,
    pub mscn_variance: f64,
    pub distorted: bool,
    pub noisy: bool,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PiqueReport {
    pub blocks: Vec<BlockAnalysis>,
    /// Score on the 0–100 scale.
    pub score: f64,
}

impl PiqueReport {
    pub fn active_count(&self) -> usize {
        self.blocks
            .iter()
            .filter(|b| b.label == BlockLabel::SpatiallyActive)
            .count()
    }
}

/// Top-left corners of the analyzed blocks: full `n×n` tiles inside the `2K+1` boundary frame.
pub fn block_origins(width: usize, height: usize, config: &PiqueConfig) -> Vec<(usize, usize)> {
    let f = config.boundary_frame();
    let n = config.block_size;
    let rows = height.saturating_sub(2 * f) / n;
    let cols = width.saturating_sub(2 * f) / n;
    (0..rows)
        .flat_map(|br| (0..cols).map(move |bc| (f + br * n, f + bc * n)))
        .collect()
}

/// Full per-block analysis and score.
pub fn analyze(image: &GrayImage, config: &PiqueConfig) -> Result<PiqueReport> {
    config.validate()?;
    let origins = block_origins(image.width(), image.height(), config);
    if origins.is_empty() {
        return Err(Error::input(format!(
            "image {}x{} holds no complete {n}x{n} block inside its {f}-pixel boundary frame",
            image.width(),
            image.height(),
            n = config.block_size,
            f = config.boundary_frame()
        )));
    }
    let field = mscn(&image.rescaled(255.0), config)?;
    let n = config.block_size;
    let mut blocks = Vec::with_capacity(origins.len());
    for (row, col) in origins {
        let block = field.crop_square(row, col, n);
        let nu = block_variance(&block);
        let analysis = if nu < config.uniform_threshold {
            BlockAnalysis {
                row,
                col,
                label: BlockLabel::Uniform,
                mscn_variance: nu,
                distorted: false,
                noisy: false,
                score: 0.0,
            }
        } else {
            let distorted =
                noticeable_distortion(&block, config.segment_length, config.segment_std_threshold);
            let noisy = noise_criterion(&block)?;
            BlockAnalysis {
                row,
                col,
                label: BlockLabel::SpatiallyActive,
                mscn_variance: nu,
                distorted,
                noisy,
                score: block_score(distorted, noisy, nu),
            }
        };
        blocks.push(analysis);
    }
    let n_sa = blocks
        .iter()
        .filter(|b| b.label == BlockLabel::SpatiallyActive)
        .count() as f64;
    let total: f64 = blocks.iter().map(|b| b.score).sum();
    let c = config.score_stability;
    Ok(PiqueReport {
        blocks,
        score: 100.0 * (total + c) / (n_sa + c),
    })
}

/// PIQUE score on the 0–100 scale.
pub fn pique_score(image: &GrayImage, config: &PiqueConfig) -> Result<f64> {
    analyze(image, config).map(|r| r.score)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_properties() {
        let w = gaussian_window(3);
        assert_eq!(w.side(), 7);
        let sum: f64 = w.weights().iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
        for k in -3..=3isize {
            for l in -3..=3isize {
                assert_eq!(w.weight(k, l), w.weight(-k, -l));
                assert_eq!(w.weight(k, l), w.weight(l, k));
                assert!(w.weight(k, l) > 0.0);
                if (k, l) != (0, 0) {
                    assert!(w.weight(0, 0) > w.weight(k, l));
                }
            }
        }
        // σ = K/3: the edge weight sits three deviations out.
        let ratio = w.weight(0, 3) / w.weight(0, 0);
        assert!((ratio - (-4.5f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn reflect_indices() {
        assert_eq!(reflect(-1, 5), 0);
        assert_eq!(reflect(-3, 5), 2);
        assert_eq!(reflect(5, 5), 4);
        assert_eq!(reflect(7, 5), 2);
    }

    #[test]
    fn constant_image_mscn_is_zero() {
        let img = GrayImage::from_fn(20, 20, |_, _| 42.0);
        let f = mscn(&img, &PiqueConfig::default()).unwrap();
        assert!(f.as_slice().iter().all(|&v| v.abs() < 1e-12));
        let zero = mscn(&GrayImage::zeros(20, 20), &PiqueConfig::default()).unwrap();
        assert!(zero.as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn mscn_rejects_tiny_images() {
        let img = GrayImage::zeros(6, 10);
        assert!(mscn(&img, &PiqueConfig::default()).is_err());
    }

    #[test]
    fn block_variance_cases() {
        assert_eq!(block_variance(&GrayImage::zeros(16, 16)), 0.0);
        let checker = GrayImage::from_fn(16, 16, |r, c| if (r + c) % 2 == 0 { 1.0 } else { -1.0 });
        assert_eq!(block_variance(&checker), 1.0);
    }

    #[test]
    fn distortion_on_flat_block() {
        assert!(noticeable_distortion(&GrayImage::zeros(16, 16), 6, 0.1));
        // Alternating ±1 edges: every segment has deviation ≈ 1.
        let busy = GrayImage::from_fn(16, 16, |r, c| if (r + c) % 2 == 0 { 1.0 } else { -1.0 });
        assert!(!noticeable_distortion(&busy, 6, 0.1));
    }

    #[test]
    fn noise_criterion_cases() {
        assert!(!noise_criterion(&GrayImage::zeros(16, 16)).unwrap());
        assert!(noise_criterion(&GrayImage::zeros(3, 3)).is_err());
    }

    #[test]
    fn block_score_cases() {
        assert_eq!(block_score(true, true, 0.4), 1.0);
        assert_eq!(block_score(false, false, 0.4), 0.0);
        assert!((block_score(true, false, 0.3) - 0.7).abs() < 1e-15);
        assert_eq!(block_score(false, true, 0.3), 0.3);
        assert_eq!(block_score(true, false, 1.7), 0.0);
        assert_eq!(block_score(false, true, 1.7), 1.0);
    }

    #[test]
    fn uniform_image_scores_100() {
        let img = GrayImage::from_fn(64, 64, |_, _| 3.0);
        assert_eq!(pique_score(&img, &PiqueConfig::default()).unwrap(), 100.0);
    }

    #[test]
    fn block_bookkeeping() {
        let img = GrayImage::from_fn(100, 70, |r, c| ((r * 7 + c * 13) % 11) as f64);
        let cfg = PiqueConfig::default();
        let report = analyze(&img, &cfg).unwrap();
        // (70 − 14)/16 = 3 rows, (100 − 14)/16 = 5 columns.
        assert_eq!(report.blocks.len(), 15);
        assert!(report.blocks.iter().all(|b| b.row >= 7 && b.col >= 7));
        assert!(report
            .blocks
            .iter()
            .all(|b| b.row + 16 <= 63 && b.col + 16 <= 93));
    }

    #[test]
    fn too_small_for_a_block() {
        let img = GrayImage::zeros(29, 29);
        assert!(matches!(
            pique_score(&img, &PiqueConfig::default()),
            Err(Error::Input(_))
        ));
        assert!(pique_score(&GrayImage::zeros(30, 30), &PiqueConfig::default()).is_ok());
    }

    #[test]
    fn config_validation() {
        let bad = PiqueConfig {
            segment_length: 16,
            ..PiqueConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = PiqueConfig {
            uniform_threshold: 0.0,
            ..PiqueConfig::default()
        };
        assert!(bad.validate().is_err());
    }
}
