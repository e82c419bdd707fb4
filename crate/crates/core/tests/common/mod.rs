//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use std::f64::consts::PI;

use evecerr::hdensity::HDensityParams;
use evecerr::quad::{gk15, Quadrature};
use evecerr::rng::rng_from_seed;
use rand::Rng as _;

/// Draws `count` gap pairs from the joint surmise at local density `a` by
/// rejection from independent Rayleigh proposals with rate `c²/2`.
///
/// With `c² = 9a²/4pi`, the target-to-proposal ratio is proportional to
/// `r exp(-c² r² / 2)` with `r = s⁻ + s⁺`, whose maximum is known in closed
/// form, so the envelope is exact.
pub fn sample_joint_gaps(a: f64, count: usize, seed: u64) -> Vec<(f64, f64)> {
    let c2 = 9.0 * a * a / (4.0 * PI);
    let beta = 0.5 * c2;
    let gamma = 0.5 * c2;
    let peak = (-0.5f64).exp() / (2.0 * gamma).sqrt();
    let mut rng = rng_from_seed(seed);
    let rayleigh = |rng: &mut evecerr::rng::Rng| {
        let u: f64 = 1.0 - rng.random::<f64>();
        (-u.ln() / beta).sqrt()
    };
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let x = rayleigh(&mut rng);
        let y = rayleigh(&mut rng);
        let r = x + y;
        let ratio = r * (-gamma * r * r).exp() / peak;
        debug_assert!(ratio <= 1.0 + 1e-12);
        if rng.random::<f64>() < ratio {
            out.push((x, y));
        }
    }
    out
}

/// Log-spaced bin edges.
pub fn log_edges(lo: f64, hi: f64, bins: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..=bins).map(|i| (a + (b - a) * i as f64 / bins as f64).exp()).collect()
}

/// Fractions of `sample` below `edges[0]`, in each bin, and above the last
/// edge.
pub fn binned_fractions(sample: &[f64], edges: &[f64]) -> Vec<f64> {
    let mut counts = vec![0usize; edges.len() + 1];
    for &x in sample {
        let slot = edges.partition_point(|&e| e <= x);
        counts[slot] += 1;
    }
    counts.iter().map(|&c| c as f64 / sample.len() as f64).collect()
}

/// Model masses matching [`binned_fractions`]: `F(e0)`, `∫ f` per bin,
/// `1 - F(e_last)`.
pub fn model_fractions(params: &HDensityParams, edges: &[f64]) -> Vec<f64> {
    let q = Quadrature::new(1e-10, 1e-9);
    let mut out = vec![params.cdf_h(edges[0]).unwrap()];
    for w in edges.windows(2) {
        let mass = q
            .integrate(|t| params.f_h(t.exp()).unwrap() * t.exp(), &[w[0].ln(), w[1].ln()])
            .unwrap();
        out.push(mass.value);
    }
    out.push(1.0 - params.cdf_h(*edges.last().unwrap()).unwrap());
    out
}

pub fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// Product-Kronrod integral of `f(x, y)` over a rectangle.
pub fn integrate_rect<F: Fn(f64, f64) -> f64>(f: &F, x: (f64, f64), y: (f64, f64)) -> f64 {
    gk15(&|u| gk15(&|v| f(u, v), y.0, y.1).value, x.0, x.1).value
}
