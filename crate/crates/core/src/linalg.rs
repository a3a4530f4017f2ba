//! Dense Cholesky factorization for the small symmetric systems used by kernel models.

use crate::error::{Error, Result};

/// Diagonal shifts tried in order when a factorization breaks down.
pub(crate) const JITTER_LADDER: [f64; 4] = [0.0, 1e-12, 1e-10, 1e-8];

// Pivots below this fraction of the largest diagonal entry count as breakdown.
const PIVOT_FLOOR: f64 = 1e-15;

/// Lower-triangular factor `L` with `A + jitter·I = L·Lᵀ`.
#[derive(Debug, Clone)]
pub(crate) struct Cholesky {
    n: usize,
    l: Vec<f64>,
    jitter: f64,
}

impl Cholesky {
    /// Factorizes the row-major `n×n` matrix `a` with `jitter` added to its diagonal.
    /// On breakdown returns the condition estimate implied by the failing pivot.
    pub(crate) fn factor(a: &[f64], n: usize, jitter: f64) -> std::result::Result<Self, f64> {
        debug_assert_eq!(a.len(), n * n);
        let max_diag = (0..n).map(|i| a[i * n + i]).fold(0.0_f64, f64::max) + jitter;
        let mut l = vec![0.0; n * n];
        for j in 0..n {
            let row_j = j * n;
            let mut d = a[row_j + j] + jitter;
            for k in 0..j {
                d -= l[row_j + k] * l[row_j + k];
            }
            if !(d.is_finite() && d > PIVOT_FLOOR * max_diag) {
                return Err(if d > 0.0 { max_diag / d } else { f64::INFINITY });
            }
            let djj = d.sqrt();
            l[row_j + j] = djj;
            for i in j + 1..n {
                let row_i = i * n;
                let mut s = a[row_i + j];
                for k in 0..j {
                    s -= l[row_i + k] * l[row_j + k];
                }
                l[row_i + j] = s / djj;
            }
        }
        Ok(Self { n, l, jitter })
    }

    /// Tries `base_jitter` plus each rung of [`JITTER_LADDER`] in turn.
    pub(crate) fn factor_with_ladder(a: &[f64], n: usize, base_jitter: f64) -> Result<Self> {
        let mut condition_estimate = f64::INFINITY;
        for extra in JITTER_LADDER {
            match Self::factor(a, n, base_jitter + extra) {
                Ok(f) => return Ok(f),
                Err(c) => condition_estimate = c,
            }
        }
        Err(Error::Conditioning {
            condition_estimate,
            detail: format!(
                "Cholesky breakdown on a {n}x{n} system with diagonal shifts up to {:.0e}",
                base_jitter + JITTER_LADDER[JITTER_LADDER.len() - 1]
            ),
        })
    }

    #[cfg(test)]
    pub(crate) fn size(&self) -> usize {
        self.n
    }

    pub(crate) fn jitter(&self) -> f64 {
        self.jitter
    }

    /// Solves `L·y = b` in place.
    pub(crate) fn forward_in_place(&self, b: &mut [f64]) {
        let n = self.n;
        for i in 0..n {
            let row = &self.l[i * n..i * n + i];
            let s: f64 = row.iter().zip(&b[..i]).map(|(l, y)| l * y).sum();
            b[i] = (b[i] - s) / self.l[i * n + i];
        }
    }

    /// Solves `Lᵀ·x = y` in place.
    pub(crate) fn backward_in_place(&self, y: &mut [f64]) {
        let n = self.n;
        for i in (0..n).rev() {
            let mut s = y[i];
            for (k, yk) in y.iter().enumerate().skip(i + 1) {
                s -= self.l[k * n + i] * yk;
            }
            y[i] = s / self.l[i * n + i];
        }
    }

    pub(crate) fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.forward_in_place(&mut x);
        self.backward_in_place(&mut x);
        x
    }

    /// Squared ratio of extreme pivots; a cheap lower bound on the 2-norm condition number.
    pub(crate) fn condition_estimate(&self) -> f64 {
        let n = self.n;
        let (lo, hi) = (0..n)
            .map(|i| self.l[i * n + i])
            .fold((f64::INFINITY, 0.0_f64), |(lo, hi), d| {
                (lo.min(d), hi.max(d))
            });
        if n == 0 {
            1.0
        } else {
            (hi / lo).powi(2)
        }
    }
}
