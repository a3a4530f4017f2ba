//! Parallel-beam tomography: phantoms, the discrete Radon transform and
//! filtered back-projection with a Butterworth-windowed ramp filter.
//!
//! Geometry: pixel `(row, col)` of a `size×size` image sits at
//! `x = col − c`, `y = c − row` with `c = (size − 1)/2`. The ray at angle `θ`
//! and offset `s` is `(s cosθ − t sinθ, s sinθ + t cosθ)`. Detector offsets
//! are integers centred on zero and cover the image diagonal.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::image::GrayImage;

/// Smallest accepted phantom side.
pub const MIN_PHANTOM_SIZE: usize = 32;
/// Radius of the sphere phantom's cylinder as a fraction of half the image side.
pub const CYLINDER_FRACTION: f64 = 0.9;

/// Projection data indexed by (angle, detector offset).
#[derive(Debug, Clone, PartialEq)]
pub struct Sinogram {
    angles: Vec<f64>,
    offsets: Vec<f64>,
    data: Vec<f64>,
}

impl Sinogram {
    pub fn new(angles: Vec<f64>, offsets: Vec<f64>, data: Vec<f64>) -> Result<Self> {
        if angles.is_empty() || offsets.is_empty() {
            return Err(Error::input(
                "sinogram needs at least one angle and one offset",
            ));
        }
        if data.len() != angles.len() * offsets.len() {
            return Err(Error::input(format!(
                "{} samples for {} angles x {} offsets",
                data.len(),
                angles.len(),
                offsets.len()
            )));
        }
        if angles.iter().any(|a| !(0.0..PI).contains(a)) {
            return Err(Error::input("projection angles must lie in [0, pi)"));
        }
        if angles.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::input(
                "projection angles must be strictly increasing",
            ));
        }
        if offsets.windows(2).any(|w| (w[1] - w[0] - 1.0).abs() > 1e-9) {
            return Err(Error::input("detector offsets must have unit spacing"));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::input(format!(
                "non-finite sinogram sample at index {i}"
            )));
        }
        Ok(Self {
            angles,
            offsets,
            data,
        })
    }

    /// All-zero sinogram with the standard geometry for a `size×size` image.
    pub fn zeros(num_angles: usize, size: usize) -> Self {
        let angles = equispaced_angles(num_angles);
        let offsets = detector_offsets(size);
        let data = vec![0.0; angles.len() * offsets.len()];
        Self {
            angles,
            offsets,
            data,
        }
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn num_angles(&self) -> usize {
        self.angles.len()
    }

    pub fn num_offsets(&self) -> usize {
        self.offsets.len()
    }

    pub fn row(&self, angle: usize) -> &[f64] {
        let s = self.num_offsets();
        &self.data[angle * s..(angle + 1) * s]
    }

    pub fn row_mut(&mut self, angle: usize) -> &mut [f64] {
        let s = self.num_offsets();
        &mut self.data[angle * s..(angle + 1) * s]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn same_geometry(&self, other: &Sinogram) -> bool {
        self.angles == other.angles && self.offsets == other.offsets
    }

    fn with_data(&self, data: Vec<f64>) -> Self {
        Self {
            angles: self.angles.clone(),
            offsets: self.offsets.clone(),
            data,
        }
    }
}

/// `n` angles `kπ/n`, `k = 0…n−1`.
pub fn equispaced_angles(n: usize) -> Vec<f64> {
    (0..n).map(|k| k as f64 * PI / n as f64).collect()
}

/// Integer detector offsets centred on 0 spanning at least `⌈size·√2⌉` bins (always an odd count).
pub fn detector_offsets(size: usize) -> Vec<f64> {
    let mut count = (size as f64 * std::f64::consts::SQRT_2).ceil() as usize;
    if count.is_multiple_of(2) {
        count += 1;
    }
    let half = (count / 2) as f64;
    (0..count).map(|k| k as f64 - half).collect()
}

/// Butterworth order `ρ` and critical frequency `ω₀` (fraction of Nyquist).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterParams {
    order: f64,
    critical_frequency: f64,
}

impl FilterParams {
    pub const ORDER_RANGE: (f64, f64) = (1.0, 10.0);

    pub fn new(order: f64, critical_frequency: f64) -> Result<Self> {
        let (lo, hi) = Self::ORDER_RANGE;
        if !(lo..=hi).contains(&order) {
            return Err(Error::input(format!(
                "filter order {order} outside [{lo}, {hi}]"
            )));
        }
        if !(critical_frequency > 0.0 && critical_frequency <= 1.0) {
            return Err(Error::input(format!(
                "critical frequency {critical_frequency} outside (0, 1]"
            )));
        }
        Ok(Self {
            order,
            critical_frequency,
        })
    }

    pub fn order(&self) -> f64 {
        self.order
    }

    pub fn critical_frequency(&self) -> f64 {
        self.critical_frequency
    }
}

/// Ramp × Butterworth response `|ω| / √(1 + (ω/ω₀)^{2ρ})` at one normalized frequency.
#[inline]
pub fn butterworth_ramp_at(params: FilterParams, omega: f64) -> f64 {
    let ratio = omega.abs() / params.critical_frequency;
    omega.abs() / (1.0 + ratio.powf(2.0 * params.order)).sqrt()
}

/// Pointwise filter response at frequencies normalized to Nyquist.
pub fn butterworth_ramp(params: FilterParams, frequencies: &[f64]) -> Vec<f64> {
    frequencies
        .iter()
        .map(|&w| butterworth_ramp_at(params, w))
        .collect()
}

/// Zero-padded transform length for `s` detector bins: next power of two `≥ 2s`.
pub fn padded_length(s: usize) -> usize {
    (2 * s).next_power_of_two()
}

/// Per-bin gains applied in the frequency domain to a length-`len` transform.
///
/// Bin `k` has normalized frequency `ω = 2 min(k, len−k)/len`. The gain is
/// `½·τ(ω)`, the ramp measured in cycles per detector bin.
pub fn filter_gains(params: FilterParams, len: usize) -> Vec<f64> {
    (0..len)
        .map(|k| {
            let omega = 2.0 * k.min(len - k) as f64 / len as f64;
            0.5 * butterworth_ramp_at(params, omega)
        })
        .collect()
}

struct RowFilter {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    gains: Vec<f64>,
}

impl RowFilter {
    fn new(params: FilterParams, s: usize) -> Self {
        let len = padded_length(s);
        let mut planner = FftPlanner::new();
        Self {
            forward: planner.plan_fft_forward(len),
            inverse: planner.plan_fft_inverse(len),
            gains: filter_gains(params, len),
        }
    }

    fn apply(&self, input: &[f64], output: &mut [f64], buf: &mut Vec<Complex<f64>>) {
        let len = self.gains.len();
        buf.clear();
        buf.extend(input.iter().map(|&v| Complex::new(v, 0.0)));
        buf.resize(len, Complex::new(0.0, 0.0));
        self.forward.process(buf);
        for (b, g) in buf.iter_mut().zip(&self.gains) {
            *b *= *g;
        }
        self.inverse.process(buf);
        let scale = 1.0 / len as f64;
        for (o, b) in output.iter_mut().zip(buf.iter()) {
            *o = b.re * scale;
        }
    }
}

/// Filters every projection row in the frequency domain.
pub fn filter_sinogram(sino: &Sinogram, params: FilterParams) -> Sinogram {
    let s = sino.num_offsets();
    let filter = RowFilter::new(params, s);
    let mut data = vec![0.0; sino.data.len()];
    data.par_chunks_mut(s)
        .zip(sino.data.par_chunks(s))
        .for_each_init(Vec::new, |buf, (out, row)| filter.apply(row, out, buf));
    sino.with_data(data)
}

#[inline]
fn bilinear(image: &GrayImage, row: f64, col: f64) -> f64 {
    let (h, w) = (image.height() as isize, image.width() as isize);
    let r0 = row.floor();
    let c0 = col.floor();
    let (fr, fc) = (row - r0, col - c0);
    let (r0, c0) = (r0 as isize, c0 as isize);
    if r0 < -1 || c0 < -1 || r0 >= h || c0 >= w {
        return 0.0;
    }
    let px = |r: isize, c: isize| {
        if r >= 0 && c >= 0 && r < h && c < w {
            image.get(r as usize, c as usize)
        } else {
            0.0
        }
    };
    (1.0 - fr) * ((1.0 - fc) * px(r0, c0) + fc * px(r0, c0 + 1))
        + fr * ((1.0 - fc) * px(r0 + 1, c0) + fc * px(r0 + 1, c0 + 1))
}

/// Line integrals over `num_angles` equispaced angles, unit-step sampling along each ray.
pub fn radon(image: &GrayImage, num_angles: usize) -> Result<Sinogram> {
    if image.width() != image.height() {
        return Err(Error::input(format!(
            "radon needs a square image, got {}x{}",
            image.width(),
            image.height()
        )));
    }
    if num_angles == 0 {
        return Err(Error::input("radon needs at least one angle"));
    }
    let size = image.width();
    let mut sino = Sinogram::zeros(num_angles, size);
    let c = (size as f64 - 1.0) / 2.0;
    let s_count = sino.num_offsets();
    let half = (s_count / 2) as isize;
    let angles = sino.angles.clone();
    let offsets = sino.offsets.clone();
    sino.data
        .par_chunks_mut(s_count)
        .zip(angles.par_iter())
        .for_each(|(row, &theta)| {
            let (sin, cos) = theta.sin_cos();
            for (out, &s) in row.iter_mut().zip(&offsets) {
                let mut acc = 0.0;
                for ti in -half..=half {
                    let t = ti as f64;
                    let x = s * cos - t * sin;
                    let y = s * sin + t * cos;
                    acc += bilinear(image, c - y, x + c);
                }
                *out = acc;
            }
        });
    Ok(sino)
}

/// Back-projection `(π/A) Σ_θ p(θ, x cosθ + y sinθ)` with linear interpolation in the offset.
pub fn back_project(sino: &Sinogram, size: usize) -> Result<GrayImage> {
    if size == 0 {
        return Err(Error::input("reconstruction size must be positive"));
    }
    let s_count = sino.num_offsets();
    let first = sino.offsets[0];
    let last = sino.offsets[s_count - 1];
    let c = (size as f64 - 1.0) / 2.0;
    if first > -c * std::f64::consts::SQRT_2 - 1e-9 || last < c * std::f64::consts::SQRT_2 + 1e-9 {
        return Err(Error::input(format!(
            "detector offsets [{first}, {last}] do not cover the diagonal of a {size}x{size} image"
        )));
    }
    let trig: Vec<(f64, f64)> = sino.angles.iter().map(|a| a.sin_cos()).collect();
    let scale = PI / sino.num_angles() as f64;
    let mut data = vec![0.0; size * size];
    data.par_chunks_mut(size)
        .enumerate()
        .for_each(|(r, out_row)| {
            let y = c - r as f64;
            for (col, out) in out_row.iter_mut().enumerate() {
                let x = col as f64 - c;
                let mut acc = 0.0;
                for (a, &(sin, cos)) in trig.iter().enumerate() {
                    let u = x * cos + y * sin - first;
                    let u0 = u.floor();
                    let frac = u - u0;
                    let i0 = u0 as isize;
                    let row = sino.row(a);
                    let at = |i: isize| {
                        if i >= 0 && (i as usize) < s_count {
                            row[i as usize]
                        } else {
                            0.0
                        }
                    };
                    acc += (1.0 - frac) * at(i0) + frac * at(i0 + 1);
                }
                *out = acc * scale;
            }
        });
    GrayImage::new(size, size, data)
}

/// Filtered back-projection: [`back_project`] of [`filter_sinogram`].
pub fn fbp(sino: &Sinogram, params: FilterParams, size: usize) -> Result<GrayImage> {
    back_project(&filter_sinogram(sino, params), size)
}

/// Stack of `z` slices, each `x×y`, stored as 32-bit floats (x fastest, then y, then z).
#[derive(Debug, Clone, PartialEq)]
pub struct Volume {
    dims: (usize, usize, usize),
    voxels: Vec<f32>,
}

impl Volume {
    pub fn new(dims: (usize, usize, usize), voxels: Vec<f32>) -> Result<Self> {
        let (x, y, z) = dims;
        if x == 0 || y == 0 || z == 0 {
            return Err(Error::input(format!(
                "volume dimensions {x}x{y}x{z} must be positive"
            )));
        }
        if voxels.len() != x * y * z {
            return Err(Error::input(format!(
                "{} voxels for a {x}x{y}x{z} volume",
                voxels.len()
            )));
        }
        if let Some(i) = voxels.iter().position(|v| !v.is_finite()) {
            return Err(Error::input(format!("non-finite voxel at index {i}")));
        }
        Ok(Self { dims, voxels })
    }

    /// Stacks equally sized images, rounding to 32-bit floats.
    pub fn from_slices(slices: &[GrayImage]) -> Result<Self> {
        let first = slices
            .first()
            .ok_or_else(|| Error::input("a volume needs at least one slice"))?;
        let (w, h) = (first.width(), first.height());
        let mut voxels = Vec::with_capacity(w * h * slices.len());
        for (z, s) in slices.iter().enumerate() {
            if s.width() != w || s.height() != h {
                return Err(Error::input(format!(
                    "slice {z} differs in size from slice 0"
                )));
            }
            voxels.extend(s.as_slice().iter().map(|&v| v as f32));
        }
        Self::new((w, h, slices.len()), voxels)
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        self.dims
    }

    pub fn num_slices(&self) -> usize {
        self.dims.2
    }

    pub fn voxels(&self) -> &[f32] {
        &self.voxels
    }

    pub fn slice_f32(&self, z: usize) -> &[f32] {
        let n = self.dims.0 * self.dims.1;
        &self.voxels[z * n..(z + 1) * n]
    }

    pub fn slice(&self, z: usize) -> GrayImage {
        let (w, h, _) = self.dims;
        GrayImage::new(w, h, self.slice_f32(z).iter().map(|&v| v as f64).collect())
            .expect("volume voxels are finite")
    }

    pub fn get(&self, x: usize, y: usize, z: usize) -> f32 {
        let (w, h, _) = self.dims;
        self.voxels[(z * h + y) * w + x]
    }

    pub fn total(&self) -> f64 {
        self.voxels.iter().map(|&v| v as f64).sum()
    }
}

/// Slice-wise [`fbp`] of a stack of sinograms sharing one geometry.
pub fn fbp_volume(sinos: &[Sinogram], params: FilterParams, size: usize) -> Result<Volume> {
    let first = sinos
        .first()
        .ok_or_else(|| Error::input("fbp_volume needs at least one sinogram"))?;
    if let Some(z) = sinos.iter().position(|s| !s.same_geometry(first)) {
        return Err(Error::input(format!(
            "sinogram {z} has a different angle/offset geometry from sinogram 0"
        )));
    }
    let slices = sinos
        .par_iter()
        .map(|s| fbp(s, params, size))
        .collect::<Result<Vec<_>>>()?;
    Volume::from_slices(&slices)
}

/// `(x0, y0, a, b, φ°, intensity)` on `[-1,1]²`; the modified (higher-contrast) table.
const SHEPP_LOGAN: [(f64, f64, f64, f64, f64, f64); 10] = [
    (0.0, 0.0, 0.69, 0.92, 0.0, 1.0),
    (0.0, -0.0184, 0.6624, 0.874, 0.0, -0.8),
    (0.22, 0.0, 0.11, 0.31, -18.0, -0.2),
    (-0.22, 0.0, 0.16, 0.41, 18.0, -0.2),
    (0.0, 0.35, 0.21, 0.25, 0.0, 0.1),
    (0.0, 0.1, 0.046, 0.046, 0.0, 0.1),
    (0.0, -0.1, 0.046, 0.046, 0.0, 0.1),
    (-0.08, -0.605, 0.046, 0.023, 0.0, 0.1),
    (0.0, -0.605, 0.023, 0.023, 0.0, 0.1),
    (0.06, -0.605, 0.023, 0.046, 0.0, 0.1),
];

/// Ellipse table of the phantom: `(x0, y0, a, b, angle in degrees, intensity)`.
pub fn shepp_logan_ellipses() -> &'static [(f64, f64, f64, f64, f64, f64)] {
    &SHEPP_LOGAN
}

/// Ten-ellipse Shepp–Logan head phantom sampled at pixel centres.
pub fn shepp_logan(size: usize) -> Result<GrayImage> {
    if size < MIN_PHANTOM_SIZE {
        return Err(Error::input(format!(
            "phantom size {size} is below the minimum {MIN_PHANTOM_SIZE}"
        )));
    }
    let n = size as f64;
    Ok(GrayImage::from_fn(size, size, |r, c| {
        let x = (2.0 * c as f64 + 1.0) / n - 1.0;
        let y = 1.0 - (2.0 * r as f64 + 1.0) / n;
        let v: f64 = SHEPP_LOGAN
            .iter()
            .filter(|&&(x0, y0, a, b, phi, _)| {
                let (s, co) = phi.to_radians().sin_cos();
                let (dx, dy) = (x - x0, y - y0);
                let u = dx * co + dy * s;
                let w = -dx * s + dy * co;
                (u / a).powi(2) + (w / b).powi(2) <= 1.0
            })
            .map(|e| e.5)
            .sum();
        v.clamp(0.0, 1.0)
    }))
}

/// A spherical insert in voxel coordinates `(x = column, y = row, z = slice)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sphere {
    pub center: [f64; 3],
    pub radius: f64,
    pub intensity: f64,
}

/// Radius of the phantom cylinder for a given image side.
pub fn cylinder_radius(size: usize) -> f64 {
    CYLINDER_FRACTION * size as f64 / 2.0
}

/// Cylinder at `background` with spherical inserts overriding it.
pub fn sphere_phantom(
    size: usize,
    z_slices: usize,
    spheres: &[Sphere],
    background: f64,
) -> Result<Volume> {
    if size < MIN_PHANTOM_SIZE {
        return Err(Error::input(format!(
            "phantom size {size} is below the minimum {MIN_PHANTOM_SIZE}"
        )));
    }
    if z_slices == 0 {
        return Err(Error::input("phantom needs at least one slice"));
    }
    if !(background >= 0.0 && background.is_finite()) {
        return Err(Error::input(format!(
            "background {background} must be nonnegative"
        )));
    }
    let c = (size as f64 - 1.0) / 2.0;
    let r_cyl = cylinder_radius(size);
    for (i, s) in spheres.iter().enumerate() {
        let radial = ((s.center[0] - c).powi(2) + (s.center[1] - c).powi(2)).sqrt();
        if s.radius.is_nan() || s.radius <= 0.0 || radial + s.radius > r_cyl {
            return Err(Error::input(format!(
                "sphere {i} is not inside the cylinder"
            )));
        }
        if !(0.0..=(z_slices - 1) as f64).contains(&s.center[2]) {
            return Err(Error::input(format!(
                "sphere {i} centre lies outside the slice range"
            )));
        }
        for (j, t) in spheres[..i].iter().enumerate() {
            let d = (0..3)
                .map(|k| (s.center[k] - t.center[k]).powi(2))
                .sum::<f64>()
                .sqrt();
            if d < s.radius + t.radius {
                return Err(Error::input(format!("spheres {j} and {i} overlap")));
            }
        }
    }
    let mut voxels = Vec::with_capacity(size * size * z_slices);
    for z in 0..z_slices {
        for y in 0..size {
            for x in 0..size {
                let (xf, yf, zf) = (x as f64, y as f64, z as f64);
                let inside_cyl = (xf - c).powi(2) + (yf - c).powi(2) <= r_cyl * r_cyl;
                let mut v = if inside_cyl { background } else { 0.0 };
                for s in spheres {
                    let d2 = (xf - s.center[0]).powi(2)
                        + (yf - s.center[1]).powi(2)
                        + (zf - s.center[2]).powi(2);
                    if d2 <= s.radius * s.radius {
                        v = s.intensity;
                    }
                }
                voxels.push(v as f32);
            }
        }
    }
    Volume::new((size, size, z_slices), voxels)
}

/// Hot and cold spheres on a unit background, hot-to-background ratio 5:1.
///
/// Six inserts of decreasing radius sit on a ring in the middle slice; odd
/// positions are cold (intensity 0).
pub fn jaszczak_spheres(size: usize, z_slices: usize) -> Vec<Sphere> {
    let c = (size as f64 - 1.0) / 2.0;
    let ring = 0.45 * cylinder_radius(size);
    let zc = (z_slices as f64 - 1.0) / 2.0;
    let base = size as f64 / 64.0;
    let radii = [5.5, 4.5, 3.75, 3.0, 2.5, 2.0];
    radii
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            let phi = i as f64 * PI / 3.0;
            Sphere {
                center: [c + ring * phi.cos(), c + ring * phi.sin(), zc],
                radius: r * base,
                intensity: if i % 2 == 0 { 5.0 } else { 0.0 },
            }
        })
        .collect()
}

/// Replaces each sample by Poisson counts at a scale where the largest sample expects `peak_counts`.
pub fn add_poisson_noise(sino: &Sinogram, peak_counts: f64, seed: u64) -> Result<Sinogram> {
    if !(peak_counts > 0.0 && peak_counts.is_finite()) {
        return Err(Error::input(format!(
            "peak counts must be positive, got {peak_counts}"
        )));
    }
    let peak = sino.data.iter().fold(0.0_f64, |m, &v| m.max(v));
    if peak == 0.0 {
        return Ok(sino.clone());
    }
    let scale = peak_counts / peak;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = sino
        .data
        .iter()
        .map(|&v| {
            let lambda = v.max(0.0) * scale;
            if lambda > 0.0 {
                let d = Poisson::new(lambda).expect("positive finite rate");
                d.sample(&mut rng) / scale
            } else {
                0.0
            }
        })
        .collect();
    Ok(sino.with_data(data))
}
