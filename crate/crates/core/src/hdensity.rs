//! Ensemble density `f_H` of the error predictor `h_hat` at a fixed
//! eigenvalue, its cumulative `F_H`, and a numeric check of the `h⁻²` tail.
//!
//! With gaps drawn from the joint surmise, `h_hat / (lambda a)²` (where
//! `a = p rho`) has a universal law, so every tolerance below is expressed in
//! those scale-free units.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fmt::fmt_f64;
use crate::quad::{Estimate, Quadrature};
use crate::spectral::joint_gap_ln_pdf;
use crate::stats::least_squares_slope;

// Gaussian factor of J beyond this many 1/c is below e^-64.
const GAUSS_CUTOFF: f64 = 8.0;
const ASYMPTOTE_RTOL: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HDensityParams {
    lambda: f64,
    p: f64,
    rho: f64,
    a: f64,
}

impl HDensityParams {
    pub fn new(lambda: f64, p: f64, rho: f64) -> Result<Self> {
        let a = p * rho;
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidArgument(format!("lambda must be positive (got {lambda})")));
        }
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidArgument(format!("p * rho must be positive (got {a})")));
        }
        Ok(Self { lambda, p, rho, a })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Local eigenvalue density in counts per unit length, `p rho`.
    pub fn a(&self) -> f64 {
        self.a
    }

    /// `(lambda a)²`, the natural unit of `h`.
    pub fn h_unit(&self) -> f64 {
        (self.lambda * self.a).powi(2)
    }

    /// Minimum of `phi`, `(27 / 2pi) (lambda a)²`.
    pub fn h_min_scale(&self) -> f64 {
        27.0 / (2.0 * PI) * self.h_unit()
    }

    // Gaussian rate of J: exp(-c² (s⁻² + s⁺² + s⁻s⁺)).
    fn c2(&self) -> f64 {
        (3.0 * self.a).powi(2) / (4.0 * PI)
    }

    fn cutoff(&self) -> f64 {
        GAUSS_CUTOFF / self.c2().sqrt()
    }

    fn b(&self) -> f64 {
        self.a * self.lambda * self.lambda
    }

    /// Positive root of `lambda²/s² + a lambda²/s = h`.
    pub fn s0(&self, h: f64) -> Result<f64> {
        check_h(h)?;
        let l2 = self.lambda * self.lambda;
        let b = self.b();
        Ok((b + (b * b + 4.0 * h * l2).sqrt()) / (2.0 * h))
    }

    /// Gap at which a symmetric pair `s⁻ = s⁺` gives `h_hat = h`.
    pub fn s_sym(&self, h: f64) -> Result<f64> {
        check_h(h)?;
        let l2 = self.lambda * self.lambda;
        let b = self.b();
        Ok((b + (b * b + 2.0 * h * l2).sqrt()) / h)
    }

    /// The `s⁻ > 0` solving `h_hat(s⁻, s_plus) = h`; requires `s_plus > s0(h)`.
    pub fn s_star(&self, h: f64, s_plus: f64) -> Result<f64> {
        check_h(h)?;
        let l2 = self.lambda * self.lambda;
        let b = self.b();
        let d = h - l2 / (s_plus * s_plus) - b / s_plus;
        if !(s_plus > 0.0 && d > 0.0) {
            return Err(Error::NoPositiveRoot {
                s_plus,
                s0: self.s0(h)?,
            });
        }
        Ok((b + (b * b + 4.0 * d * l2).sqrt()) / (2.0 * d))
    }

    /// `d s_star / d h = -s*³ / (lambda² (2 + a s*))`.
    pub fn ds_star_dh(&self, h: f64, s_plus: f64) -> Result<f64> {
        let s = self.s_star(h, s_plus)?;
        Ok(-s.powi(3) / (self.lambda * self.lambda * (2.0 + self.a * s)))
    }

    fn ln_j(&self, s_minus: f64, s_plus: f64) -> f64 {
        joint_gap_ln_pdf(s_minus, s_plus, self.p, self.rho)
    }

    // J(s*, s⁺) |ds*/dh|, taking s* as given.
    fn pushforward_integrand(&self, s_star: f64, s_plus: f64) -> f64 {
        let ln_jac = 3.0 * s_star.ln() - (self.lambda * self.lambda * (2.0 + self.a * s_star)).ln();
        (self.ln_j(s_star, s_plus) + ln_jac).exp()
    }

    /// Breakpoints `s, 2s, 4s, ...` up to `s + cutoff`.
    fn geometric_points(&self, s: f64) -> Vec<f64> {
        let end = s + self.cutoff();
        let mut points = vec![s];
        let mut x = 2.0 * s;
        while x < end {
            points.push(x);
            x *= 2.0;
        }
        points.push(end);
        points
    }

    /// Density of `h_hat` at `h`. Uses the swap symmetry of J to integrate
    /// only the branch `s⁺ >= s_sym(h)`, where `s*` stays bounded.
    pub fn f_h(&self, h: f64) -> Result<f64> {
        let s_sym = self.s_sym(h)?;
        let q = Quadrature::new(1e-8 / self.h_unit(), 1e-10);
        let est = q.integrate(
            |t| match self.s_star(h, t) {
                Ok(s) => self.pushforward_integrand(s.min(s_sym), t),
                Err(_) => 0.0,
            },
            &self.geometric_points(s_sym),
        )?;
        Ok(2.0 * est.value)
    }

    /// `P(h_hat <= h)`: the mass of J over `{s⁻ >= s*(h, s⁺)}`, split into the
    /// square `[s_sym, inf)²` and two mirror-image strips.
    pub fn cdf_h(&self, h: f64) -> Result<f64> {
        let s_sym = self.s_sym(h)?;
        let inner_tol = 1e-13 * self.a;
        let j = |u: f64, t: f64| self.ln_j(u, t).exp();

        let tail = |t: f64, lo: f64| -> Result<Estimate> {
            Quadrature::new(inner_tol, 1e-12).integrate(|u| j(u, t), &self.geometric_points(lo))
        };
        let strip = |t: f64| -> Result<Estimate> {
            let lo = self.s_star(h, t)?.min(s_sym);
            Quadrature::new(inner_tol, 1e-12).integrate(|u| j(u, t), &[lo, s_sym])
        };

        let outer = |inner: &dyn Fn(f64) -> Result<Estimate>| -> Result<f64> {
            let failure = RefCell::new(None);
            let est = Quadrature::new(1e-12, 1e-11).integrate(
                |t| match inner(t) {
                    Ok(e) => e.value,
                    Err(e) => {
                        failure.borrow_mut().get_or_insert(e);
                        0.0
                    }
                },
                &self.geometric_points(s_sym),
            )?;
            match failure.into_inner() {
                Some(e) => Err(e),
                None => Ok(est.value),
            }
        };
        let square = outer(&|t| tail(t, s_sym))?;
        let strips = outer(&strip)?;
        Ok((square + 2.0 * strips).clamp(0.0, 1.0))
    }

    /// `phi(u) = c² (u + lambda²)(1 + lambda/sqrt(u) + lambda²/u)`, the
    /// exponent of the large-h representation `f_H ∝ h^{-7/2} I(h)`.
    pub fn phi(&self, u: f64) -> f64 {
        let l = self.lambda;
        self.c2() * (u + l * l) * (1.0 + l / u.sqrt() + l * l / u)
    }

    /// Small-u root of `phi(u) = h` for `h -> inf`.
    pub fn u1_asymptote(&self, h: f64) -> f64 {
        self.c2() * self.lambda.powi(4) / h
    }

    /// Large-u root of `phi(u) = h` for `h -> inf`.
    pub fn u2_asymptote(&self, h: f64) -> f64 {
        h / self.c2()
    }

    /// `I(h) = ∫₀^∞ (1 + lambda²/u)^{5/2} (sqrt(u) + lambda) exp(-phi(u)/h) du`,
    /// integrated in `ln u`.
    pub fn i_integral(&self, h: f64) -> Result<f64> {
        check_h(h)?;
        let l2 = self.lambda * self.lambda;
        let u1 = self.u1_asymptote(h).min(l2);
        let u2 = self.u2_asymptote(h).max(l2);
        let points = [(u1 / 100.0).ln(), u1.ln(), l2.ln(), u2.ln(), (u2 * 100.0).ln()];
        let integrand = |t: f64| {
            let u = t.exp();
            let ln_f = 2.5 * (l2 / u).ln_1p() + (u.sqrt() + self.lambda).ln() - self.phi(u) / h + t;
            ln_f.exp()
        };
        // I grows like h^{3/2}; the tolerance is relative.
        let est = Quadrature::new(0.0, 1e-10).integrate(integrand, &points)?;
        Ok(est.value)
    }
}

fn check_h(h: f64) -> Result<()> {
    if h > 0.0 && h.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("h must be positive (got {h})")))
    }
}

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn geometric_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailReport {
    #[serde(rename = "slope")]
    pub fitted_slope: f64,
    pub window: (f64, f64),
    #[serde(rename = "plateau_spread")]
    pub plateau_ratio_spread: f64,
    /// Largest relative miss of `phi(u1) = h` and `phi(u2) = h` at the top of
    /// the window.
    #[serde(skip)]
    pub asymptote_rel_error: f64,
}

impl TailReport {
    pub fn asymptotes_ok(&self) -> bool {
        self.asymptote_rel_error <= ASYMPTOTE_RTOL
    }
}

/// Default window `[1e2, 1e4] * h_min_scale`, 21 points.
pub fn default_tail_grid(params: &HDensityParams) -> Vec<f64> {
    let s = params.h_min_scale();
    geometric_grid(1e2 * s, 1e4 * s, 21)
}

/// Log-log slope of `f_H`, spread of `I(h) p³ / h^{3/2}` (as `max/min - 1`)
/// and the `u1`, `u2` asymptote check, all over `h_grid`.
pub fn tail_report(params: &HDensityParams, h_grid: &[f64]) -> Result<TailReport> {
    if h_grid.len() < 2 {
        return Err(Error::GridTooNarrow("need at least two points".into()));
    }
    let lo = h_grid.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = h_grid.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    // Slack for grids built by exponentiating logs.
    let slack = 1.0 - 1e-9;
    if hi / lo < 100.0 * slack {
        return Err(Error::GridTooNarrow(format!("[{lo}, {hi}] spans under two decades")));
    }
    let floor = 100.0 * params.h_min_scale();
    if lo < floor * slack {
        return Err(Error::GridTooNarrow(format!("h_lo = {lo} is below 100 h_min_scale = {floor}")));
    }

    let f = h_grid.par_iter().map(|&h| params.f_h(h)).collect::<Result<Vec<_>>>()?;
    let xs: Vec<f64> = h_grid.iter().map(|h| h.ln()).collect();
    let ys: Vec<f64> = f.iter().map(|v| v.ln()).collect();
    let fitted_slope = least_squares_slope(&xs, &ys)?;

    let p3 = params.p.powi(3);
    let plateau = h_grid
        .par_iter()
        .map(|&h| Ok(params.i_integral(h)? * p3 / h.powf(1.5)))
        .collect::<Result<Vec<f64>>>()?;
    let pmax = plateau.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let pmin = plateau.iter().copied().fold(f64::INFINITY, f64::min);

    let u1 = params.u1_asymptote(hi);
    let u2 = params.u2_asymptote(hi);
    let asymptote_rel_error = (params.phi(u1) / hi - 1.0).abs().max((params.phi(u2) / hi - 1.0).abs());

    Ok(TailReport {
        fitted_slope,
        window: (lo, hi),
        plateau_ratio_spread: pmax / pmin - 1.0,
        asymptote_rel_error,
    })
}

/// CSV `h,f_H,F_H` over `h_grid`.
pub fn write_fh_csv<W: Write>(mut w: W, params: &HDensityParams, h_grid: &[f64]) -> Result<()> {
    let rows = h_grid
        .par_iter()
        .map(|&h| Ok((h, params.f_h(h)?, params.cdf_h(h)?)))
        .collect::<Result<Vec<_>>>()?;
    writeln!(w, "h,f_H,F_H")?;
    for (h, f, cdf) in rows {
        writeln!(w, "{},{},{}", fmt_f64(h), fmt_f64(f), fmt_f64(cdf))?;
    }
    Ok(())
}
