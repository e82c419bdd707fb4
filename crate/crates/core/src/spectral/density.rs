use std::f64::consts::PI;
use std::io::Write;

use crate::error::{Error, Result};
use crate::fmt::fmt_f64;

/// McKay's law for the adjacency spectrum of a random k-regular graph,
/// evaluated at `lambda - shift`. With `shift = k` it is the bulk density of
/// the combinatorial Laplacian `kI - A`.
pub fn mckay_density(lambda: f64, k: usize, shift: f64) -> f64 {
    let k = k as f64;
    let x = lambda - shift;
    let edge2 = 4.0 * (k - 1.0);
    if x * x >= edge2 {
        return 0.0;
    }
    k * (edge2 - x * x).sqrt() / (2.0 * PI * (k * k - x * x))
}

#[derive(Debug, Clone, PartialEq)]
pub enum DensityKind {
    McKay {
        k: usize,
        shift: f64,
    },
    /// Normalized histogram heights at bin centers, linearly interpolated
    /// between centers and flat over the outer half-bins.
    Empirical {
        centers: Vec<f64>,
        heights: Vec<f64>,
        bin_width: f64,
    },
}

/// A bulk spectral density `rho(lambda)` on a compact support.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDensity {
    kind: DensityKind,
    support: (f64, f64),
}

impl SpectralDensity {
    pub fn mckay(k: usize, shift: f64) -> Self {
        let half = 2.0 * ((k as f64) - 1.0).max(0.0).sqrt();
        Self {
            kind: DensityKind::McKay { k, shift },
            support: (shift - half, shift + half),
        }
    }

    /// McKay's law shifted onto the Laplacian bulk (`shift = k`).
    pub fn laplacian_mckay(k: usize) -> Self {
        Self::mckay(k, k as f64)
    }

    pub fn kind(&self) -> &DensityKind {
        &self.kind
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    pub fn eval(&self, lambda: f64) -> f64 {
        let (lo, hi) = self.support;
        if !(lo..=hi).contains(&lambda) {
            return 0.0;
        }
        match &self.kind {
            DensityKind::McKay { k, shift } => mckay_density(lambda, *k, *shift),
            DensityKind::Empirical {
                centers, heights, ..
            } => {
                let last = centers.len() - 1;
                if lambda <= centers[0] {
                    return heights[0];
                }
                if lambda >= centers[last] {
                    return heights[last];
                }
                let j = centers.partition_point(|&c| c <= lambda) - 1;
                let t = (lambda - centers[j]) / (centers[j + 1] - centers[j]);
                heights[j] + t * (heights[j + 1] - heights[j])
            }
        }
    }

    /// `n` uniformly spaced `(lambda, rho)` samples across the support.
    pub fn grid(&self, n: usize) -> Vec<(f64, f64)> {
        let (lo, hi) = self.support;
        let n = n.max(2);
        (0..n)
            .map(|i| {
                let l = lo + (hi - lo) * i as f64 / (n - 1) as f64;
                (l, self.eval(l))
            })
            .collect()
    }

    /// CSV `lambda,rho` on a uniform grid of `n` points.
    pub fn write_csv<W: Write>(&self, mut w: W, n: usize) -> Result<()> {
        writeln!(w, "lambda,rho")?;
        for (l, r) in self.grid(n) {
            writeln!(w, "{},{}", fmt_f64(l), fmt_f64(r))?;
        }
        Ok(())
    }
}

// Nearest-rank quantile of a sorted sample.
fn nearest_rank(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    let rank = ((q * n as f64).ceil() as usize).clamp(1, n);
    sorted[rank - 1]
}

/// Freedman–Diaconis bin width `2 IQR / N^(1/3)` with nearest-rank quartiles.
/// Falls back to the range (or 1) when the IQR vanishes.
pub fn freedman_diaconis_width(sample: &[f64]) -> f64 {
    if sample.is_empty() {
        return 1.0;
    }
    let mut sorted = sample.to_vec();
    sorted.sort_by(f64::total_cmp);
    let iqr = nearest_rank(&sorted, 0.75) - nearest_rank(&sorted, 0.25);
    let n = sorted.len() as f64;
    if iqr > 0.0 {
        2.0 * iqr / n.cbrt()
    } else {
        let range = sorted[sorted.len() - 1] - sorted[0];
        if range > 0.0 {
            range / n.cbrt().ceil()
        } else {
            1.0
        }
    }
}

/// Ensemble-averaged normalized histogram of several eigenvalue pools.
///
/// Each pool is histogrammed on a common grid of width `bin_width`
/// (Freedman–Diaconis on the pooled sample when `None`), normalized, and the
/// per-pool densities are averaged with equal weight.
pub fn estimate_density<P: AsRef<[f64]>>(pools: &[P], bin_width: Option<f64>) -> Result<SpectralDensity> {
    let pooled: Vec<f64> = pools
        .iter()
        .filter(|p| !p.as_ref().is_empty())
        .flat_map(|p| p.as_ref().iter().copied())
        .collect();
    if pooled.is_empty() {
        return Err(Error::EmptyPool);
    }
    if pooled.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("non-finite eigenvalue in pool".into()));
    }
    let width = bin_width.unwrap_or_else(|| freedman_diaconis_width(&pooled));
    if !(width > 0.0 && width.is_finite()) {
        return Err(Error::InvalidArgument(format!("bin width must be positive (got {width})")));
    }
    let lo = pooled.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = pooled.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let bins = (((hi - lo) / width).ceil() as usize).max(1);

    let mut heights = vec![0.0; bins];
    let mut used = 0usize;
    for pool in pools.iter().map(AsRef::as_ref).filter(|p| !p.is_empty()) {
        let mut counts = vec![0usize; bins];
        for &v in pool {
            let b = (((v - lo) / width).floor() as usize).min(bins - 1);
            counts[b] += 1;
        }
        let scale = 1.0 / (pool.len() as f64 * width);
        for (h, c) in heights.iter_mut().zip(counts) {
            *h += c as f64 * scale;
        }
        used += 1;
    }
    for h in &mut heights {
        *h /= used as f64;
    }
    let centers = (0..bins).map(|j| lo + (j as f64 + 0.5) * width).collect();
    Ok(SpectralDensity {
        kind: DensityKind::Empirical {
            centers,
            heights,
            bin_width: width,
        },
        support: (lo, lo + bins as f64 * width),
    })
}
