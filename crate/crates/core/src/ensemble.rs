//! Seeded ensembles of random k-regular graph Laplacians.
//!
//! Member `m` of an ensemble with master seed `s` is built from the child
//! seed `(s, m)`, so members are independent of how many are drawn and of
//! the thread count.

use rayon::prelude::*;

use crate::error::Result;
use crate::graph::{laplacian, laplacian_matrix, sample_regular_graph, PopulationMatrix};
use crate::rng::child_seed;
use crate::spectral::eigenvalues_sym;

/// Eigenvalues below `ZERO_RTOL * max` are treated as kernel modes.
pub const ZERO_RTOL: f64 = 1e-9;

pub fn member_seed(seed: u64, m: usize) -> u64 {
    child_seed(seed, &[m as u64])
}

/// `count` Laplacians with full eigendecompositions, in member order.
pub fn laplacian_ensemble(p: usize, k: usize, count: usize, seed: u64) -> Result<Vec<PopulationMatrix>> {
    (0..count)
        .into_par_iter()
        .map(|m| laplacian(&sample_regular_graph(p, k, member_seed(seed, m))?))
        .collect()
}

/// Ascending Laplacian spectra of `count` members, in member order.
pub fn laplacian_spectra(p: usize, k: usize, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    (0..count)
        .into_par_iter()
        .map(|m| {
            let g = sample_regular_graph(p, k, member_seed(seed, m))?;
            eigenvalues_sym(&laplacian_matrix(&g))
        })
        .collect()
}

/// Number of leading kernel modes of an ascending nonnegative spectrum.
pub fn zero_modes(eigenvalues: &[f64]) -> usize {
    let top = eigenvalues.last().copied().unwrap_or(0.0).abs();
    eigenvalues.iter().take_while(|&&l| l.abs() <= ZERO_RTOL * top).count()
}

/// The spectrum with its kernel modes removed.
pub fn bulk(eigenvalues: &[f64]) -> &[f64] {
    &eigenvalues[zero_modes(eigenvalues)..]
}
