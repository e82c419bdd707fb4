use std::path::PathBuf;

use clap::Args;
use serde::Serialize;

/// Parses a sample count written as an integer or in exponent form (`1e10`).
pub fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(n) = s.parse::<u64>() {
        return Ok(n);
    }
    let x: f64 = s.parse().map_err(|_| format!("`{s}` is not a count"))?;
    if !(x >= 0.0 && x.fract() == 0.0 && x < u64::MAX as f64) {
        return Err(format!("`{s}` is not a nonnegative integer"));
    }
    Ok(x as u64)
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ExperimentConfig {
    /// Matrix size (graph vertices).
    #[arg(long, env = "EVECERR_P", default_value_t = 100)]
    pub p: usize,

    /// Graph degree.
    #[arg(long, env = "EVECERR_K", default_value_t = 20)]
    pub k: usize,

    /// Wishart sample count; exponent notation such as 1e10 is accepted.
    #[arg(long, env = "EVECERR_N", default_value = "10000000", value_parser = parse_count)]
    pub n: u64,

    /// Wishart replicates per population matrix.
    #[arg(long = "R", env = "EVECERR_R", default_value_t = 100)]
    #[serde(rename = "R")]
    pub r: usize,

    /// Population matrices per ensemble.
    #[arg(long = "M", env = "EVECERR_M", default_value_t = 50)]
    #[serde(rename = "M")]
    pub m: usize,

    /// Center of the eigenvalue window.
    #[arg(long, env = "EVECERR_LAMBDA0", default_value_t = 20.0)]
    pub lambda0: f64,

    /// Half-width of the eigenvalue window.
    #[arg(long, env = "EVECERR_DELTA", default_value_t = 1.0)]
    pub delta: f64,

    #[arg(long, env = "EVECERR_SEED", default_value_t = 0)]
    pub seed: u64,

    /// Output directory.
    #[arg(long, env = "EVECERR_OUT", default_value = "evecerr-out")]
    pub out: PathBuf,

    /// Worker threads; 0 uses all cores. Outputs do not depend on it.
    #[arg(long, env = "EVECERR_THREADS", default_value_t = 0)]
    #[serde(skip)]
    pub threads: usize,
}

impl ExperimentConfig {
    /// Every violated constraint, in a fixed order.
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.p == 0 || self.k == 0 || self.r == 0 || self.m == 0 {
            out.push("p, k, R and M must all be at least 1".to_string());
        }
        if self.k >= self.p {
            out.push(format!("k = {} must be below p = {}", self.k, self.p));
        }
        if !(self.p * self.k).is_multiple_of(2) {
            out.push(format!("p * k = {} must be even", self.p * self.k));
        }
        if self.n < self.p as u64 {
            out.push(format!("n = {} must be at least p = {}", self.n, self.p));
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            out.push(format!("delta = {} must be positive", self.delta));
        }
        if !self.lambda0.is_finite() {
            out.push("lambda0 must be finite".to_string());
        }
        out
    }

    pub fn validate(&self) -> Result<(), String> {
        let problems = self.problems();
        if problems.is_empty() {
            Ok(())
        } else {
            Err(problems.join("; "))
        }
    }
}
