//! Pre-flight checks that never fail, only warn.

use evecerr::estimators::sample_size_bound;
use evecerr::quad::Quadrature;
use evecerr::spectral::mckay_density;
use serde::Serialize;

use crate::config::ExperimentConfig;

/// Relative change in records per unit window width that triggers a warning.
const DELTA_SHIFT_LIMIT: f64 = 0.2;

#[derive(Debug, Serialize, PartialEq)]
pub struct Warning {
    pub kind: &'static str,
    pub message: String,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub pilot_h_hat: f64,
    pub n_bound: f64,
    /// Expected records per unit window width at `delta / 2`, `delta`, `2 delta`.
    pub records_per_unit_width: [f64; 3],
    pub warnings: Vec<Warning>,
}

/// Expected number of eigenvalues of a `p`-vertex Laplacian within `delta`
/// of `lambda0`, from McKay's law.
fn expected_records(cfg: &ExperimentConfig, delta: f64) -> f64 {
    let k = cfg.k as f64;
    let edge = 2.0 * (k - 1.0).max(0.0).sqrt();
    let lo = (cfg.lambda0 - delta).max(k - edge);
    let hi = (cfg.lambda0 + delta).min(k + edge);
    if hi <= lo {
        return 0.0;
    }
    let points = if (lo..hi).contains(&k) { vec![lo, k, hi] } else { vec![lo, hi] };
    Quadrature::new(1e-12, 1e-10)
        .integrate(|l| mckay_density(l, cfg.k, k), &points)
        .map(|e| cfg.p as f64 * e.value)
        .unwrap_or(0.0)
}

pub fn validate(cfg: &ExperimentConfig) -> Report {
    let mut warnings: Vec<Warning> = cfg
        .problems()
        .into_iter()
        .map(|message| Warning {
            kind: "invalid_config",
            message,
        })
        .collect();

    // h_hat with both gaps at the mean spacing 1/(p rho).
    let a = cfg.p as f64 * mckay_density(cfg.lambda0, cfg.k, cfg.k as f64);
    let pilot = 4.0 * (cfg.lambda0 * a).powi(2);
    let n_bound = sample_size_bound(pilot);
    if a == 0.0 {
        warnings.push(Warning {
            kind: "outside_bulk",
            message: format!("lambda0 = {} lies outside the bulk spectrum for k = {}", cfg.lambda0, cfg.k),
        });
    } else if (cfg.n as f64) < n_bound {
        warnings.push(Warning {
            kind: "regime_violation",
            message: format!("n = {} is below h/2 = {n_bound:.4e} for the pilot h_hat = {pilot:.4e}", cfg.n),
        });
    }

    let widths = [0.5 * cfg.delta, cfg.delta, 2.0 * cfg.delta];
    let per_unit = widths.map(|d| expected_records(cfg, d) / (2.0 * d));
    let base = per_unit[1];
    for (d, v) in [(widths[0], per_unit[0]), (widths[2], per_unit[2])] {
        let shift = if base > 0.0 { (v / base - 1.0).abs() } else { f64::INFINITY };
        if shift > DELTA_SHIFT_LIMIT {
            warnings.push(Warning {
                kind: "delta_sensitivity",
                message: format!(
                    "records per unit width change by {:.1}% between delta = {} and delta = {d}",
                    100.0 * shift,
                    cfg.delta
                ),
            });
        }
    }

    Report {
        pilot_h_hat: pilot,
        n_bound,
        records_per_unit_width: per_unit,
        warnings,
    }
}
