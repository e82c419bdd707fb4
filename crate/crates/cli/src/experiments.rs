//! The experiment catalogue. Each experiment writes its CSVs through an
//! [`OutputDir`]; rows are always assembled in matrix, replicate and index
//! order so outputs do not depend on the thread count.

use clap::ValueEnum;
use evecerr::ensemble::{bulk, laplacian_spectra, member_seed, zero_modes};
use evecerr::estimators::{
    h_exact, h_exact_all, h_hat_at, regime_violation, replicates, summarize, write_estimates_csv, BootstrapConfig,
    EstimateRow,
};
use evecerr::fmt::fmt_f64;
use evecerr::graph::{laplacian, sample_regular_graph, PopulationMatrix};
use evecerr::hdensity::{default_tail_grid, geometric_grid, tail_report, write_fh_csv, HDensityParams};
use evecerr::rng::child_seed;
use evecerr::spectral::{
    estimate_density, extract_gap_records, joint_gap_pdf, mckay_density, wigner_surmise_pdf, DensityKind, GapRecord,
    SpectralDensity,
};
use evecerr::Result;

use crate::config::ExperimentConfig;
use crate::output::OutputDir;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Experiment {
    Density,
    Spacing,
    JointGaps,
    HhatVsH,
    BootstrapVsHhat,
    FhDensity,
    Tail,
    BoundScatter,
    BootstrapDiscrepancy,
}

impl Experiment {
    pub fn name(self) -> String {
        self.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default()
    }

    pub fn run(self, cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<()> {
        match self {
            Self::Density => density(cfg, out),
            Self::Spacing => spacing(cfg, out),
            Self::JointGaps => joint_gaps(cfg, out),
            Self::HhatVsH => hhat_vs_h(cfg, out, false),
            Self::BootstrapVsHhat => hhat_vs_h(cfg, out, true),
            Self::FhDensity => fh_density(cfg, out),
            Self::Tail => tail(cfg, out),
            Self::BoundScatter => bound_scatter(cfg, out),
            Self::BootstrapDiscrepancy => bootstrap_discrepancy(cfg, out),
        }
    }
}

// Bootstrap streams live under a path prefix no ensemble member uses.
const BOOTSTRAP_STREAM: u64 = 1 << 40;

fn bootstrap_seed(cfg: &ExperimentConfig, m: usize, n: u64) -> u64 {
    child_seed(cfg.seed, &[BOOTSTRAP_STREAM, m as u64, n])
}

fn population(cfg: &ExperimentConfig, m: usize) -> Result<PopulationMatrix> {
    laplacian(&sample_regular_graph(cfg.p, cfg.k, member_seed(cfg.seed, m))?)
}

struct Ensemble {
    spectra: Vec<Vec<f64>>,
    density: SpectralDensity,
}

impl Ensemble {
    fn build(cfg: &ExperimentConfig) -> Result<Self> {
        let spectra = laplacian_spectra(cfg.p, cfg.k, cfg.m, cfg.seed)?;
        let bulks: Vec<&[f64]> = spectra.iter().map(|s| bulk(s)).collect();
        let density = estimate_density(&bulks, None)?;
        Ok(Self { spectra, density })
    }

    /// Window records of every member, tagged with the member index.
    fn records(&self, cfg: &ExperimentConfig) -> Result<Vec<(usize, GapRecord)>> {
        let mut out = Vec::new();
        for (m, s) in self.spectra.iter().enumerate() {
            out.extend(extract_gap_records(s, cfg.lambda0, cfg.delta)?.into_iter().map(|r| (m, r)));
        }
        Ok(out)
    }
}

/// `f_H` parameters at `lambda0` with McKay's density for the configured `k`.
fn mckay_params(cfg: &ExperimentConfig) -> Result<HDensityParams> {
    let rho = mckay_density(cfg.lambda0, cfg.k, cfg.k as f64);
    HDensityParams::new(cfg.lambda0, cfg.p as f64, rho)
}

fn fh_grid(params: &HDensityParams, top: f64) -> Vec<f64> {
    geometric_grid(0.3 * params.h_unit(), top, 160)
}

fn density(cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<()> {
    let ens = Ensemble::build(cfg)?;
    let DensityKind::Empirical { centers, heights, .. } = ens.density.kind() else {
        unreachable!("estimate_density returns an empirical density")
    };
    out.write("density.csv", |w| {
        writeln!(w, "lambda,rho_empirical,rho_mckay")?;
        for (&l, &r) in centers.iter().zip(heights) {
            let mckay = mckay_density(l, cfg.k, cfg.k as f64);
            writeln!(w, "{},{},{}", fmt_f64(l), fmt_f64(r), fmt_f64(mckay))?;
        }
        Ok(())
    })
}

fn unit_grid(n: usize, top: f64) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| top * i as f64 / (n - 1) as f64)
}

fn spacing(cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<()> {
    let ens = Ensemble::build(cfg)?;
    let records = ens.records(cfg)?;
    out.write("spacing.csv", |w| {
        writeln!(w, "matrix,index,lambda,rho,s_plus,normalized_s_plus")?;
        for (m, r) in &records {
            let rho = ens.density.eval(r.lambda);
            let x = cfg.p as f64 * rho * r.s_plus;
            writeln!(w, "{m},{},{},{},{},{}", r.index, fmt_f64(r.lambda), fmt_f64(rho), fmt_f64(r.s_plus), fmt_f64(x))?;
        }
        Ok(())
    })?;
    out.write("surmise.csv", |w| {
        writeln!(w, "x,pdf")?;
        for x in unit_grid(201, 4.0) {
            writeln!(w, "{},{}", fmt_f64(x), fmt_f64(wigner_surmise_pdf(x, 1.0, 1.0)))?;
        }
        Ok(())
    })
}

fn joint_gaps(cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<()> {
    let ens = Ensemble::build(cfg)?;
    let records = ens.records(cfg)?;
    out.write("joint_gaps.csv", |w| {
        writeln!(w, "matrix,index,lambda,rho,s_minus,s_plus,normalized_s_minus,normalized_s_plus")?;
        for (m, r) in &records {
            let rho = ens.density.eval(r.lambda);
            let a = cfg.p as f64 * rho;
            writeln!(
                w,
                "{m},{},{},{},{},{},{},{}",
                r.index,
                fmt_f64(r.lambda),
                fmt_f64(rho),
                fmt_f64(r.s_minus),
                fmt_f64(r.s_plus),
                fmt_f64(a * r.s_minus),
                fmt_f64(a * r.s_plus)
            )?;
        }
        Ok(())
    })?;
    out.write("joint_surmise.csv", |w| {
        writeln!(w, "x_minus,x_plus,pdf")?;
        for x in unit_grid(41, 4.0) {
            for y in unit_grid(41, 4.0) {
                writeln!(w, "{},{},{}", fmt_f64(x), fmt_f64(y), fmt_f64(joint_gap_pdf(x, y, 1.0, 1.0)))?;
            }
        }
        Ok(())
    })
}

/// Interior bulk indices: the kernel and both bulk edges are skipped.
fn bulk_indices(eigenvalues: &[f64]) -> std::ops::Range<usize> {
    zero_modes(eigenvalues) + 1..eigenvalues.len().saturating_sub(1)
}

fn hhat_vs_h(cfg: &ExperimentConfig, out: &mut OutputDir, with_bootstrap: bool) -> Result<()> {
    let ens = Ensemble::build(cfg)?;
    let c = population(cfg, 0)?;
    let eig: Vec<f64> = c.eigenvalues().iter().copied().collect();
    let h = h_exact_all(&eig)?;
    let summary = if with_bootstrap {
        let boot = BootstrapConfig {
            replicates: cfg.r,
            n: cfg.n,
            seed: bootstrap_seed(cfg, 0, cfg.n),
        };
        Some(summarize(&replicates(&c, &boot)?, cfg.n))
    } else {
        None
    };
    let mut rows = Vec::new();
    for i in bulk_indices(&eig) {
        rows.push(EstimateRow {
            index: i,
            lambda: eig[i],
            h_exact: Some(h[i]),
            h_hat: Some(h_hat_at(&eig, i, &ens.density, true)?),
            h_hat_uncorrected: Some(h_hat_at(&eig, i, &ens.density, false)?),
            n_mean_error: summary.as_ref().map(|s| s.n_mean[i]),
            n_std_error: summary.as_ref().map(|s| s.n_std[i]),
            regime_violation: summary.as_ref().map(|_| regime_violation(cfg.n, h[i])),
        });
    }
    let name = if with_bootstrap { "bootstrap_vs_hhat.csv" } else { "hhat_vs_h.csv" };
    out.write(name, |w| write_estimates_csv(w, &rows))
}

fn write_h_empirical(cfg: &ExperimentConfig, ens: &Ensemble, out: &mut OutputDir) -> Result<()> {
    let records = ens.records(cfg)?;
    let mut rows = Vec::with_capacity(records.len());
    for (m, r) in &records {
        let s = &ens.spectra[*m];
        rows.push((*m, r.index, r.lambda, h_exact(s, r.index)?, h_hat_at(s, r.index, &ens.density, true)?));
    }
    out.write("h_empirical.csv", |w| {
        writeln!(w, "matrix,index,lambda,h_exact,h_hat")?;
        for (m, i, l, h, hat) in &rows {
            writeln!(w, "{m},{i},{},{},{}", fmt_f64(*l), fmt_f64(*h), fmt_f64(*hat))?;
        }
        Ok(())
    })
}

/// Bootstrap means for the window indices of every ensemble member, one
/// member at a time to bound memory.
/// Matrix index, window record, its h_hat and the bootstrap residuals.
type WindowRow = (usize, GapRecord, f64, Vec<f64>);

fn window_bootstrap(cfg: &ExperimentConfig, n: u64) -> Result<Vec<WindowRow>> {
    let mut rows = Vec::new();
    for m in 0..cfg.m {
        let c = population(cfg, m)?;
        let eig: Vec<f64> = c.eigenvalues().iter().copied().collect();
        let records = extract_gap_records(&eig, cfg.lambda0, cfg.delta)?;
        if records.is_empty() {
            continue;
        }
        let boot = BootstrapConfig {
            replicates: cfg.r,
            n,
            seed: bootstrap_seed(cfg, m, n),
        };
        let reps = replicates(&c, &boot)?;
        for r in records {
            let per_rep = reps.iter().map(|rep| rep.residuals[r.index] * n as f64).collect();
            rows.push((m, r, h_exact(&eig, r.index)?, per_rep));
        }
    }
    Ok(rows)
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn std_dev(v: &[f64]) -> f64 {
    if v.len() < 2 {
        return 0.0;
    }
    let mu = mean(v);
    (v.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
}

fn fh_density(cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<()> {
    let params = mckay_params(cfg)?;
    out.write("fh.csv", |w| write_fh_csv(w, &params, &fh_grid(&params, 1e4 * params.h_unit())))?;
    let ens = Ensemble::build(cfg)?;
    write_h_empirical(cfg, &ens, out)?;
    let rows = window_bootstrap(cfg, cfg.n)?;
    out.write("bootstrap.csv", |w| {
        writeln!(w, "matrix,index,lambda,h_exact,n_mean_error,n_std_error,regime_violation")?;
        for (m, r, h, per_rep) in &rows {
            writeln!(
                w,
                "{m},{},{},{},{},{},{}",
                r.index,
                fmt_f64(r.lambda),
                fmt_f64(*h),
                fmt_f64(mean(per_rep)),
                fmt_f64(std_dev(per_rep)),
                regime_violation(cfg.n, *h)
            )?;
        }
        Ok(())
    })
}

fn tail(cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<()> {
    let params = mckay_params(cfg)?;
    let grid = default_tail_grid(&params);
    let top = *grid.last().expect("tail grid is nonempty");
    out.write("tail.csv", |w| write_fh_csv(w, &params, &fh_grid(&params, top)))?;
    let report = tail_report(&params, &grid)?;
    out.write("tail_report.json", |w| {
        serde_json::to_writer_pretty(&mut *w, &report).map_err(std::io::Error::from)?;
        writeln!(w)?;
        Ok(())
    })?;
    let ens = Ensemble::build(cfg)?;
    write_h_empirical(cfg, &ens, out)
}

/// Decade ladder `n/100, n/10, n`, keeping only counts of at least `p`.
fn n_ladder(cfg: &ExperimentConfig) -> Vec<u64> {
    let mut ns: Vec<u64> = [cfg.n / 100, cfg.n / 10, cfg.n]
        .into_iter()
        .filter(|&n| n >= cfg.p as u64)
        .collect();
    ns.dedup();
    ns
}

fn bound_scatter(cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<()> {
    let c = population(cfg, 0)?;
    let eig: Vec<f64> = c.eigenvalues().iter().copied().collect();
    let h = h_exact_all(&eig)?;
    let mut blocks = Vec::new();
    for n in n_ladder(cfg) {
        let boot = BootstrapConfig {
            replicates: cfg.r,
            n,
            seed: bootstrap_seed(cfg, 0, n),
        };
        blocks.push((n, replicates(&c, &boot)?));
    }
    out.write("bound_scatter.csv", |w| {
        writeln!(w, "n,replicate,index,lambda,h_exact,residual,n_residual,regime_violation")?;
        for (n, reps) in &blocks {
            for (r, rep) in reps.iter().enumerate() {
                for (i, &res) in rep.residuals.iter().enumerate() {
                    writeln!(
                        w,
                        "{n},{r},{i},{},{},{},{},{}",
                        fmt_f64(eig[i]),
                        fmt_f64(h[i]),
                        fmt_f64(res),
                        fmt_f64(res * *n as f64),
                        regime_violation(*n, h[i])
                    )?;
                }
            }
        }
        Ok(())
    })
}

/// A sample count that violates `n >= h/2` for a typical eigenvalue at
/// `lambda0`: a twentieth of the pilot `h_hat = 4 (lambda0 p rho)²`.
fn undersized_n(cfg: &ExperimentConfig, params: &HDensityParams) -> u64 {
    ((4.0 * params.h_unit() / 20.0).round() as u64).max(cfg.p as u64)
}

fn bootstrap_discrepancy(cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<()> {
    let params = mckay_params(cfg)?;
    out.write("fh.csv", |w| write_fh_csv(w, &params, &fh_grid(&params, 1e4 * params.h_unit())))?;
    let small_n = undersized_n(cfg, &params);
    let reference = window_bootstrap(cfg, cfg.n)?;
    let small = window_bootstrap(cfg, small_n)?;
    out.write("bootstrap_discrepancy.csv", |w| {
        writeln!(w, "variant,n,replicates,matrix,index,lambda,h_exact,n_mean_error")?;
        let mut emit = |variant: &str, n: u64, reps: usize, rows: &[WindowRow]| -> Result<()> {
            for (m, r, h, per_rep) in rows {
                writeln!(
                    w,
                    "{variant},{n},{reps},{m},{},{},{},{}",
                    r.index,
                    fmt_f64(r.lambda),
                    fmt_f64(*h),
                    fmt_f64(mean(&per_rep[..reps]))
                )?;
            }
            Ok(())
        };
        emit("reference", cfg.n, cfg.r, &reference)?;
        emit("single_draw", cfg.n, 1, &reference)?;
        emit("small_n", small_n, cfg.r, &small)?;
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_kebab_case() {
        assert_eq!(Experiment::HhatVsH.name(), "hhat-vs-h");
        assert_eq!(Experiment::JointGaps.name(), "joint-gaps");
        assert_eq!(Experiment::BootstrapDiscrepancy.name(), "bootstrap-discrepancy");
        assert_eq!(Experiment::FhDensity.name(), "fh-density");
    }
}
