//! Positive definite kernels, kernel interpolation and the power function.
//!
//! Interpolants are fitted by Cholesky factorization of the kernel matrix.
//! The same factor is reused for power-function evaluation through a
//! triangular solve, so `P(x)² = κ(x,x) − ‖L⁻¹ k(x)‖²` never forms `K⁻¹`.

use crate::error::{Error, Result};
use crate::linalg::Cholesky;
use crate::points::{euclidean, PointSet};

/// Radicands above this (negative) floor are treated as rounding noise and clamped to zero.
pub const RADICAND_FLOOR: f64 = -1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelFamily {
    /// `exp(-(ε r)²)`
    Gaussian,
    /// `exp(-ε r)`
    Matern,
}

/// A radial kernel with shape parameter `epsilon`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kernel {
    family: KernelFamily,
    epsilon: f64,
}

impl Default for Kernel {
    /// Matérn kernel with `ε = 0.1`, the tuning default.
    fn default() -> Self {
        Self {
            family: KernelFamily::Matern,
            epsilon: 0.1,
        }
    }
}

impl Kernel {
    pub fn new(family: KernelFamily, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::input(format!(
                "kernel shape parameter must be positive and finite, got {epsilon}"
            )));
        }
        Ok(Self { family, epsilon })
    }

    pub fn gaussian(epsilon: f64) -> Result<Self> {
        Self::new(KernelFamily::Gaussian, epsilon)
    }

    pub fn matern(epsilon: f64) -> Result<Self> {
        Self::new(KernelFamily::Matern, epsilon)
    }

    pub fn family(&self) -> KernelFamily {
        self.family
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Kernel profile as a function of the distance `r ≥ 0`.
    #[inline]
    pub fn of_distance(&self, r: f64) -> f64 {
        match self.family {
            KernelFamily::Gaussian => {
                let er = self.epsilon * r;
                (-(er * er)).exp()
            }
            KernelFamily::Matern => (-self.epsilon * r).exp(),
        }
    }

    pub fn eval(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        if x.len() != y.len() {
            return Err(Error::input(format!(
                "kernel arguments have dimensions {} and {}",
                x.len(),
                y.len()
            )));
        }
        Ok(self.eval_unchecked(x, y))
    }

    #[inline]
    pub(crate) fn eval_unchecked(&self, x: &[f64], y: &[f64]) -> f64 {
        self.of_distance(euclidean(x, y))
    }

    /// Kernel column `(κ(x, x₁), …, κ(x, xₙ))` against a set of centers.
    pub fn column(&self, centers: &PointSet, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(centers, x)?;
        Ok(centers.iter().map(|c| self.eval_unchecked(x, c)).collect())
    }

    pub(crate) fn column_into(&self, centers: &PointSet, x: &[f64], out: &mut [f64]) {
        for (o, c) in out.iter_mut().zip(centers.iter()) {
            *o = self.eval_unchecked(x, c);
        }
    }

    pub fn matrix(&self, sites: &PointSet) -> Result<KernelMatrix> {
        ensure_distinct(sites)?;
        Ok(self.matrix_unchecked(sites))
    }

    fn matrix_unchecked(&self, sites: &PointSet) -> KernelMatrix {
        let n = sites.len();
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
            for j in 0..i {
                let v = self.eval_unchecked(sites.get(i), sites.get(j));
                data[i * n + j] = v;
                data[j * n + i] = v;
            }
        }
        KernelMatrix { n, data }
    }
}

/// Symmetric kernel matrix `K_ij = κ(x_i, x_j)` in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix {
    n: usize,
    data: Vec<f64>,
}

impl KernelMatrix {
    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Quadratic form `vᵀ K v`.
    pub fn quadratic_form(&self, v: &[f64]) -> f64 {
        let n = self.n;
        (0..n)
            .map(|i| {
                let row = &self.data[i * n..(i + 1) * n];
                v[i] * row.iter().zip(v).map(|(k, x)| k * x).sum::<f64>()
            })
            .sum()
    }
}

/// Data sites paired with function values.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    sites: PointSet,
    values: Vec<f64>,
}

impl SampleSet {
    pub fn new(sites: PointSet, values: Vec<f64>) -> Result<Self> {
        if sites.len() != values.len() {
            return Err(Error::input(format!(
                "{} sites but {} values",
                sites.len(),
                values.len()
            )));
        }
        ensure_distinct(&sites)?;
        Ok(Self { sites, values })
    }

    pub fn sites(&self) -> &PointSet {
        &self.sites
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Restriction to the given site indices.
    pub fn subset(&self, indices: &[usize]) -> Self {
        Self {
            sites: self.sites.select(indices),
            values: indices.iter().map(|&i| self.values[i]).collect(),
        }
    }
}

/// Factorized kernel matrix on a fixed set of centers.
///
/// Shared by interpolation and power-function evaluation.
#[derive(Debug, Clone)]
pub struct KernelSystem {
    kernel: Kernel,
    centers: PointSet,
    factor: Cholesky,
}

impl KernelSystem {
    /// Factorizes `K + jitter·I`, escalating the diagonal shift if needed.
    pub fn new(kernel: Kernel, centers: PointSet, jitter: f64) -> Result<Self> {
        if !(jitter >= 0.0 && jitter.is_finite()) {
            return Err(Error::input(format!(
                "jitter must be nonnegative, got {jitter}"
            )));
        }
        let k = kernel.matrix(&centers)?;
        let factor = Cholesky::factor_with_ladder(k.as_slice(), k.size(), jitter)?;
        Ok(Self {
            kernel,
            centers,
            factor,
        })
    }

    pub fn kernel(&self) -> Kernel {
        self.kernel
    }

    pub fn centers(&self) -> &PointSet {
        &self.centers
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    /// Total diagonal shift actually applied (requested jitter plus any ladder rung).
    pub fn applied_jitter(&self) -> f64 {
        self.factor.jitter()
    }

    pub fn condition_estimate(&self) -> f64 {
        self.factor.condition_estimate()
    }

    /// Coefficients `c` solving `(K + jitter·I) c = values`.
    pub fn solve(&self, values: &[f64]) -> Result<Vec<f64>> {
        if values.len() != self.len() {
            return Err(Error::input(format!(
                "{} values for {} centers",
                values.len(),
                self.len()
            )));
        }
        let c = self.factor.solve(values);
        if c.iter().any(|v| !v.is_finite()) {
            return Err(Error::Conditioning {
                condition_estimate: self.condition_estimate(),
                detail: "non-finite interpolation coefficients".into(),
            });
        }
        Ok(c)
    }

    pub fn interpolant(&self, values: &[f64]) -> Result<Interpolant> {
        Ok(Interpolant {
            kernel: self.kernel,
            centers: self.centers.clone(),
            coefficients: self.solve(values)?,
        })
    }

    /// Unclamped radicand `κ(x,x) − k(x)ᵀ K⁻¹ k(x)`.
    ///
    /// `scratch` must have length `self.len()`; it receives `L⁻¹ k(x)`.
    pub(crate) fn power_radicand_with(&self, x: &[f64], scratch: &mut [f64]) -> f64 {
        self.kernel.column_into(&self.centers, x, scratch);
        self.factor.forward_in_place(scratch);
        let explained: f64 = scratch.iter().map(|v| v * v).sum();
        self.kernel.eval_unchecked(x, x) - explained
    }

    /// Interpolant value `cᵀk(x)` and unclamped power radicand from a single kernel column.
    pub(crate) fn value_and_radicand_with(
        &self,
        coefficients: &[f64],
        x: &[f64],
        scratch: &mut [f64],
    ) -> (f64, f64) {
        self.kernel.column_into(&self.centers, x, scratch);
        let value = scratch.iter().zip(coefficients).map(|(k, c)| k * c).sum();
        self.factor.forward_in_place(scratch);
        let explained: f64 = scratch.iter().map(|v| v * v).sum();
        (value, self.kernel.eval_unchecked(x, x) - explained)
    }

    /// Squared power function, clamped at zero; exactly zero at a center.
    pub fn power_squared(&self, x: &[f64]) -> Result<f64> {
        check_dim(&self.centers, x)?;
        if self.centers.iter().any(|c| c == x) {
            return Ok(0.0);
        }
        let mut scratch = vec![0.0; self.len()];
        clamp_radicand(
            self.power_radicand_with(x, &mut scratch),
            self.condition_estimate(),
        )
    }

    pub fn power(&self, x: &[f64]) -> Result<f64> {
        self.power_squared(x).map(f64::sqrt)
    }
}

pub(crate) fn clamp_radicand(r: f64, condition_estimate: f64) -> Result<f64> {
    if r >= 0.0 {
        Ok(r)
    } else if r >= RADICAND_FLOOR {
        Ok(0.0)
    } else {
        Err(Error::Conditioning {
            condition_estimate,
            detail: format!("negative power-function radicand {r:.3e}"),
        })
    }
}

/// Kernel interpolant `x ↦ Σ cᵢ κ(x, xᵢ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Interpolant {
    kernel: Kernel,
    centers: PointSet,
    coefficients: Vec<f64>,
}

impl Interpolant {
    pub fn new(kernel: Kernel, centers: PointSet, coefficients: Vec<f64>) -> Result<Self> {
        if centers.len() != coefficients.len() {
            return Err(Error::input(format!(
                "{} centers but {} coefficients",
                centers.len(),
                coefficients.len()
            )));
        }
        Ok(Self {
            kernel,
            centers,
            coefficients,
        })
    }

    /// The identically zero function on `dim`-dimensional inputs.
    pub fn zero(kernel: Kernel, dim: usize) -> Self {
        Self {
            kernel,
            centers: PointSet::new(dim),
            coefficients: Vec::new(),
        }
    }

    pub fn kernel(&self) -> Kernel {
        self.kernel
    }

    pub fn centers(&self) -> &PointSet {
        &self.centers
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        check_dim(&self.centers, x)?;
        Ok(self.eval_unchecked(x))
    }

    #[inline]
    pub(crate) fn eval_unchecked(&self, x: &[f64]) -> f64 {
        self.centers
            .iter()
            .zip(&self.coefficients)
            .map(|(c, w)| w * self.kernel.eval_unchecked(x, c))
            .sum()
    }

    /// Native-space norm `√(cᵀ K c)` of the interpolant.
    pub fn rkhs_norm(&self) -> Result<f64> {
        if self.coefficients.is_empty() {
            return Ok(0.0);
        }
        let k = self.kernel.matrix(&self.centers)?;
        Ok(k.quadratic_form(&self.coefficients).max(0.0).sqrt())
    }
}

/// Solves `(K + jitter·I) c = f(Xₙ)`; `jitter = 0` is exact interpolation.
pub fn fit_interpolant(kernel: Kernel, data: &SampleSet, jitter: f64) -> Result<Interpolant> {
    KernelSystem::new(kernel, data.sites.clone(), jitter)?.interpolant(&data.values)
}

/// RKHS norm estimate of the function represented by `model`.
pub fn rkhs_norm_estimate(model: &Interpolant) -> Result<f64> {
    model.rkhs_norm()
}

/// Power function `P_{κ,X}(x)`; equals `√κ(x,x)` for an empty site set.
pub fn power_function(kernel: Kernel, sites: &PointSet, query: &[f64]) -> Result<f64> {
    check_dim(sites, query)?;
    if sites.is_empty() {
        return Ok(kernel.eval_unchecked(query, query).sqrt());
    }
    KernelSystem::new(kernel, sites.clone(), 0.0)?.power(query)
}

/// `max_{x ∈ domain} min_i ‖x − xᵢ‖` over a discrete sample of the domain.
pub fn fill_distance(sites: &PointSet, domain_samples: &PointSet) -> Result<f64> {
    if sites.is_empty() {
        return Err(Error::input("fill distance needs at least one site"));
    }
    if domain_samples.is_empty() {
        return Err(Error::input(
            "fill distance needs at least one domain sample",
        ));
    }
    if sites.dim() != domain_samples.dim() {
        return Err(Error::input("sites and domain samples differ in dimension"));
    }
    Ok(domain_samples
        .iter()
        .map(|x| {
            sites
                .iter()
                .map(|s| euclidean(x, s))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max))
}

/// Half the minimum pairwise distance.
pub fn separation_distance(sites: &PointSet) -> Result<f64> {
    if sites.len() < 2 {
        return Err(Error::input("separation distance needs at least two sites"));
    }
    Ok(0.5 * min_pairwise_distance(sites))
}

fn min_pairwise_distance(sites: &PointSet) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..sites.len() {
        for j in 0..i {
            best = best.min(euclidean(sites.get(i), sites.get(j)));
        }
    }
    best
}

fn ensure_distinct(sites: &PointSet) -> Result<()> {
    if sites.len() >= 2 && min_pairwise_distance(sites) <= 0.0 {
        return Err(Error::input("data sites must be pairwise distinct"));
    }
    Ok(())
}

fn check_dim(centers: &PointSet, x: &[f64]) -> Result<()> {
    if centers.dim() != x.len() {
        return Err(Error::input(format!(
            "query has dimension {}, centers have dimension {}",
            x.len(),
            centers.dim()
        )));
    }
    Ok(())
}
