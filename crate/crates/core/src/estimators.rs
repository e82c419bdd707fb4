//! Eigenvector error predictors and their Monte-Carlo validation.
//!
//! `h_exact` is the asymptotic (`n -> inf`) value of `E[n ||u_i - ũ_i||²]`;
//! `h_hat` approximates it from the eigenvalue, its two neighboring gaps and
//! the local bulk density only.

use std::io::Write;

use nalgebra::DVectorView;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fmt::fmt_f64;
use crate::graph::PopulationMatrix;
use crate::rng::child_seed;
use crate::spectral::{check_simple, eig_sym, SpectralDensity};
use crate::wishart::{sample_wishart_scaled, sqrt_psd};

const UNIT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HValue {
    pub index: usize,
    pub lambda: f64,
    pub h_exact: Option<f64>,
    pub h_hat: Option<f64>,
    pub with_correction: bool,
}

/// One residual `||u_i - ũ_i||²` after sign alignment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorSample {
    pub index: usize,
    pub residual: f64,
    pub n: u64,
    pub replicate: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BootstrapConfig {
    pub replicates: usize,
    pub n: u64,
    pub seed: u64,
}

impl BootstrapConfig {
    pub fn validate(&self, p: usize) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::InvalidArgument("need at least one replicate".into()));
        }
        if self.n < p as u64 {
            return Err(Error::TooFewSamples { n: self.n, p });
        }
        Ok(())
    }
}

/// `sum_{j != i} lambda_i lambda_j / (lambda_i - lambda_j)²` over an
/// ascending spectrum.
pub fn h_exact(eigenvalues: &[f64], i: usize) -> Result<f64> {
    if i >= eigenvalues.len() {
        return Err(Error::InvalidArgument(format!(
            "index {i} out of range for {} eigenvalues",
            eigenvalues.len()
        )));
    }
    check_simple(eigenvalues, i)?;
    let li = eigenvalues[i];
    let mut sum = 0.0;
    for (j, &lj) in eigenvalues.iter().enumerate() {
        if j == i {
            continue;
        }
        let d = li - lj;
        if d == 0.0 {
            return Err(Error::TiedEigenvalues(i.min(j)));
        }
        sum += li * lj / (d * d);
    }
    Ok(sum)
}

/// `h_exact` for every index (O(p²) in total).
pub fn h_exact_all(eigenvalues: &[f64]) -> Result<Vec<f64>> {
    (0..eigenvalues.len())
        .into_par_iter()
        .map(|i| h_exact(eigenvalues, i))
        .collect()
}

/// Large-p estimate of `h_i`:
/// `lambda² [(1/s⁻² + 1/s⁺²) + p rho (1/s⁻ + 1/s⁺)]`, or only the first
/// bracket when `include_correction` is false.
pub fn h_hat(lambda: f64, s_minus: f64, s_plus: f64, p: f64, rho: f64, include_correction: bool) -> Result<f64> {
    for s in [s_minus, s_plus] {
        if !(s > 0.0) {
            return Err(Error::NonPositiveGap(s));
        }
    }
    let near = 1.0 / (s_minus * s_minus) + 1.0 / (s_plus * s_plus);
    let far = if include_correction {
        p * rho * (1.0 / s_minus + 1.0 / s_plus)
    } else {
        0.0
    };
    Ok(lambda * lambda * (near + far))
}

/// `h_hat` at interior index `i` of a full ascending spectrum, with the
/// density read from the ensemble `density` at `lambda_i`.
pub fn h_hat_at(eigenvalues: &[f64], i: usize, density: &SpectralDensity, include_correction: bool) -> Result<f64> {
    if i == 0 || i + 1 >= eigenvalues.len() {
        return Err(Error::InvalidArgument(format!("index {i} has no two-sided gap")));
    }
    check_simple(eigenvalues, i)?;
    let lambda = eigenvalues[i];
    h_hat(
        lambda,
        lambda - eigenvalues[i - 1],
        eigenvalues[i + 1] - lambda,
        eigenvalues.len() as f64,
        density.eval(lambda),
        include_correction,
    )
}

/// `2 (1 - |<u, ũ>|)`: the squared distance after flipping `ũ` onto the
/// half-space of `u`.
pub fn aligned_residual(u: DVectorView<'_, f64>, u_tilde: DVectorView<'_, f64>) -> Result<f64> {
    if u.len() != u_tilde.len() {
        return Err(Error::InvalidArgument("vectors differ in length".into()));
    }
    for norm in [u.norm(), u_tilde.norm()] {
        if (norm - 1.0).abs() > UNIT_TOL {
            return Err(Error::NotUnitNorm(norm));
        }
    }
    Ok((2.0 * (1.0 - u.dot(&u_tilde).abs())).clamp(0.0, 2.0))
}

/// Smallest `n` for which `h / n <= 2` can hold.
pub fn sample_size_bound(h: f64) -> f64 {
    h / 2.0
}

pub fn regime_violation(n: u64, h: f64) -> bool {
    (n as f64) < sample_size_bound(h)
}

/// Residuals of one Wishart replicate, eigenvectors paired by sorted index.
#[derive(Debug, Clone)]
pub struct Replicate {
    pub residuals: Vec<f64>,
    /// Indices whose population eigenvector has a larger overlap with some
    /// other sample eigenvector than with its index partner.
    pub mismatched: Vec<usize>,
}

fn run_replicate(c: &PopulationMatrix, c_sqrt: &nalgebra::DMatrix<f64>, n: u64, seed: u64) -> Result<Replicate> {
    let draw = sample_wishart_scaled(c_sqrt, n, seed)?;
    let (_, vectors) = eig_sym(&draw.matrix)?;
    let u = c.eigenvectors();
    let residuals = (0..c.dim())
        .map(|i| aligned_residual(u.column(i), vectors.column(i)))
        .collect::<Result<Vec<_>>>()?;
    let overlap = u.transpose() * &vectors;
    let mismatched = (0..c.dim())
        .filter(|&i| {
            let row = overlap.row(i);
            let best = (0..row.len())
                .max_by(|&a, &b| row[a].abs().total_cmp(&row[b].abs()))
                .unwrap_or(i);
            best != i && row[best].abs() > row[i].abs()
        })
        .collect();
    Ok(Replicate {
        residuals,
        mismatched,
    })
}

/// Draws `cfg.replicates` sample covariances around `c` and returns the
/// per-replicate residuals in replicate order. Replicate `r` uses the child
/// seed `(cfg.seed, r)`.
pub fn replicates(c: &PopulationMatrix, cfg: &BootstrapConfig) -> Result<Vec<Replicate>> {
    cfg.validate(c.dim())?;
    let c_sqrt = sqrt_psd(c)?;
    (0..cfg.replicates)
        .into_par_iter()
        .map(|r| run_replicate(c, &c_sqrt, cfg.n, child_seed(cfg.seed, &[r as u64])))
        .collect()
}

/// Flattens replicates into individual error samples.
pub fn error_samples(reps: &[Replicate], n: u64) -> Vec<ErrorSample> {
    reps.iter()
        .enumerate()
        .flat_map(|(r, rep)| {
            rep.residuals.iter().enumerate().map(move |(i, &residual)| ErrorSample {
                index: i,
                residual,
                n,
                replicate: r,
            })
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct BootstrapSummary {
    /// `n * mean(residual)` per index.
    pub n_mean: Vec<f64>,
    /// Standard deviation of `n * residual` per index (0 for one replicate).
    pub n_std: Vec<f64>,
    /// Total count of index pairings a greedy overlap match would change.
    pub pairing_mismatches: usize,
}

pub fn summarize(reps: &[Replicate], n: u64) -> BootstrapSummary {
    let p = reps.first().map_or(0, |r| r.residuals.len());
    let scale = n as f64;
    let count = reps.len() as f64;
    let mut n_mean = vec![0.0; p];
    let mut n_std = vec![0.0; p];
    for i in 0..p {
        let mean = reps.iter().map(|r| r.residuals[i] * scale).sum::<f64>() / count;
        n_mean[i] = mean;
        if reps.len() > 1 {
            let ss = reps
                .iter()
                .map(|r| (r.residuals[i] * scale - mean).powi(2))
                .sum::<f64>();
            n_std[i] = (ss / (count - 1.0)).sqrt();
        }
    }
    BootstrapSummary {
        n_mean,
        n_std,
        pairing_mismatches: reps.iter().map(|r| r.mismatched.len()).sum(),
    }
}

/// Bootstrap estimate of `E[n ||u_i - ũ_i||²]` for every index of `c`.
pub fn bootstrap_error(c: &PopulationMatrix, cfg: &BootstrapConfig) -> Result<BootstrapSummary> {
    Ok(summarize(&replicates(c, cfg)?, cfg.n))
}

/// One row of the estimator CSV.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EstimateRow {
    pub index: usize,
    pub lambda: f64,
    pub h_exact: Option<f64>,
    pub h_hat: Option<f64>,
    pub h_hat_uncorrected: Option<f64>,
    pub n_mean_error: Option<f64>,
    pub n_std_error: Option<f64>,
    pub regime_violation: Option<bool>,
}

pub const ESTIMATE_CSV_HEADER: &str =
    "index,lambda,h_exact,h_hat,h_hat_uncorrected,n_mean_error,n_std_error,regime_violation";

fn opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

pub fn write_estimates_csv<W: Write>(mut w: W, rows: &[EstimateRow]) -> Result<()> {
    writeln!(w, "{ESTIMATE_CSV_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            r.index,
            fmt_f64(r.lambda),
            opt(r.h_exact),
            opt(r.h_hat),
            opt(r.h_hat_uncorrected),
            opt(r.n_mean_error),
            opt(r.n_std_error),
            r.regime_violation.map(|b| b.to_string()).unwrap_or_default()
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};
    use proptest::prelude::*;

    #[test]
    fn h_exact_small_cases() {
        assert_eq!(h_exact(&[1.0, 2.0], 0).unwrap(), 2.0);
        assert_eq!(h_exact(&[1.0, 2.0, 3.0], 1).unwrap(), 8.0);
        let oracle = 1.0 * 2.0 / 1.0 + 1.0 * 4.0 / 9.0;
        assert!((h_exact(&[1.0, 2.0, 4.0], 0).unwrap() - oracle).abs() < 1e-15);
        assert!((oracle - 2.4444).abs() < 1e-4);
    }

    #[test]
    fn h_exact_errors() {
        assert!(matches!(h_exact(&[1.0, 1.0, 2.0], 0), Err(Error::TiedEigenvalues(0))));
        assert!(h_exact(&[1.0, 2.0], 5).is_err());
        assert_eq!(h_exact_all(&[1.0, 2.0, 3.0]).unwrap(), vec![
            h_exact(&[1.0, 2.0, 3.0], 0).unwrap(),
            8.0,
            h_exact(&[1.0, 2.0, 3.0], 2).unwrap()
        ]);
    }

    #[test]
    fn h_hat_examples() {
        let plain = h_hat(2.0, 1.0, 1.0, 1.0, 0.0, true).unwrap();
        assert_eq!(plain, 8.0);
        assert_eq!(plain, h_exact(&[1.0, 2.0, 3.0], 1).unwrap());
        assert_eq!(h_hat(2.0, 1.0, 1.0, 1.0, 1.0, true).unwrap(), 16.0);
        assert_eq!(h_hat(2.0, 1.0, 1.0, 1.0, 1.0, false).unwrap(), 8.0);
        assert!(matches!(h_hat(2.0, 0.0, 1.0, 1.0, 1.0, true), Err(Error::NonPositiveGap(_))));
        assert!(h_hat(2.0, 1.0, -1.0, 1.0, 1.0, true).is_err());
    }

    #[test]
    fn h_hat_diverges_as_gap_closes() {
        for s in [1e-3, 1e-5, 1e-7] {
            let h = h_hat(2.0, 1.0, s, 10.0, 0.1, true).unwrap();
            assert!((h * s * s / 4.0 - 1.0).abs() < 2.0 * s);
        }
    }

    proptest! {
        #[test]
        fn h_hat_symmetric_monotone_dominant(
            lambda in 0.1f64..50.0,
            a in 1e-3f64..2.0,
            b in 1e-3f64..2.0,
            prho in 0.0f64..500.0,
        ) {
            let hab = h_hat(lambda, a, b, prho, 1.0, true).unwrap();
            let hba = h_hat(lambda, b, a, prho, 1.0, true).unwrap();
            prop_assert!((hab - hba).abs() <= 1e-12 * hab);
            let wider = h_hat(lambda, a * 1.01, b, prho, 1.0, true).unwrap();
            prop_assert!(wider < hab);
            let bare = h_hat(lambda, a, b, prho, 1.0, false).unwrap();
            if prho > 0.0 { prop_assert!(hab > bare); } else { prop_assert_eq!(hab, bare); }
        }

        #[test]
        fn aligned_residual_bounds(v in proptest::collection::vec(-1.0f64..1.0, 6), w in proptest::collection::vec(-1.0f64..1.0, 6)) {
            let u = DVector::from_vec(v);
            let t = DVector::from_vec(w);
            prop_assume!(u.norm() > 1e-3 && t.norm() > 1e-3);
            let u = u.normalize();
            let t = t.normalize();
            let r = aligned_residual(u.as_view(), t.as_view()).unwrap();
            prop_assert!((0.0..=2.0).contains(&r));
            let flipped = aligned_residual((-&u).as_view(), (-&t).as_view()).unwrap();
            prop_assert!((r - flipped).abs() < 1e-15);
            let one_flip = aligned_residual(u.as_view(), (-&t).as_view()).unwrap();
            prop_assert!((r - one_flip).abs() < 1e-15);
        }
    }

    #[test]
    fn aligned_residual_examples() {
        let e1 = DVector::from_vec(vec![1.0, 0.0]);
        let e2 = DVector::from_vec(vec![0.0, 1.0]);
        assert_eq!(aligned_residual(e1.as_view(), e1.as_view()).unwrap(), 0.0);
        assert_eq!(aligned_residual(e1.as_view(), (-&e1).as_view()).unwrap(), 0.0);
        assert_eq!(aligned_residual(e1.as_view(), e2.as_view()).unwrap(), 2.0);
        let long = DVector::from_vec(vec![2.0, 0.0]);
        assert!(matches!(aligned_residual(e1.as_view(), long.as_view()), Err(Error::NotUnitNorm(_))));
    }

    #[test]
    fn bound_arithmetic() {
        assert_eq!(sample_size_bound(2.0), 1.0);
        assert_eq!(sample_size_bound(1e6), 5e5);
        assert!(regime_violation(10_000, 1e6));
        assert!(!regime_violation(500_000, 1e6));
    }

    fn diagonal_population() -> PopulationMatrix {
        PopulationMatrix::new(DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 2.0, 4.0, 7.0]))).unwrap()
    }

    #[test]
    fn single_replicate_has_no_spread() {
        let c = diagonal_population();
        let cfg = BootstrapConfig { replicates: 1, n: 1000, seed: 4 };
        let reps = replicates(&c, &cfg).unwrap();
        let summary = summarize(&reps, cfg.n);
        for i in 0..4 {
            assert_eq!(summary.n_mean[i], reps[0].residuals[i] * 1000.0);
            assert_eq!(summary.n_std[i], 0.0);
        }
    }

    #[test]
    fn bootstrap_validates_config() {
        let c = diagonal_population();
        assert!(bootstrap_error(&c, &BootstrapConfig { replicates: 0, n: 10, seed: 0 }).is_err());
        assert!(bootstrap_error(&c, &BootstrapConfig { replicates: 2, n: 3, seed: 0 }).is_err());
    }

    #[test]
    fn bootstrap_matches_exact_law_for_separated_spectrum() {
        let c = diagonal_population();
        let eig: Vec<f64> = c.eigenvalues().iter().copied().collect();
        let cfg = BootstrapConfig { replicates: 400, n: 1_000_000, seed: 11 };
        let summary = bootstrap_error(&c, &cfg).unwrap();
        for i in 0..4 {
            let h = h_exact(&eig, i).unwrap();
            let se = summary.n_std[i] / (cfg.replicates as f64).sqrt();
            assert!((summary.n_mean[i] - h).abs() <= 3.0 * se, "i={i}: {} vs {h} (se {se})", summary.n_mean[i]);
            assert!(summary.n_mean[i] <= 2.0 * cfg.n as f64);
        }
        assert_eq!(summary.pairing_mismatches, 0);
    }

    #[test]
    fn csv_schema() {
        let rows = [EstimateRow {
            index: 3,
            lambda: 1.5,
            h_exact: Some(2.0),
            regime_violation: Some(false),
            ..Default::default()
        }];
        let mut buf = Vec::new();
        write_estimates_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, format!("{ESTIMATE_CSV_HEADER}\n3,1.5,2.0,,,,,false\n"));
    }
}
