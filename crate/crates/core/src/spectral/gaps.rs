use std::io::Write;

use crate::error::{Error, Result};
use crate::fmt::fmt_f64;

/// Two eigenvalues closer than `TIE_RTOL * max|lambda|` count as tied.
pub const TIE_RTOL: f64 = 1e-12;

/// An interior eigenvalue with its left and right eigengaps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapRecord {
    /// 0-based position in the ascending spectrum.
    pub index: usize,
    pub lambda: f64,
    pub s_minus: f64,
    pub s_plus: f64,
}

fn tie_tolerance(eigenvalues: &[f64]) -> f64 {
    TIE_RTOL * eigenvalues.iter().fold(0.0_f64, |m, l| m.max(l.abs()))
}

/// Checks that `eigenvalues[i]` is separated from both neighbors.
pub fn check_simple(eigenvalues: &[f64], i: usize) -> Result<()> {
    let tol = tie_tolerance(eigenvalues);
    for j in [i.wrapping_sub(1), i + 1] {
        if j >= eigenvalues.len() {
            continue;
        }
        let (lo, hi) = if j < i { (j, i) } else { (i, j) };
        let gap = eigenvalues[hi] - eigenvalues[lo];
        if gap < 0.0 {
            return Err(Error::NotAscending(hi));
        }
        if gap <= tol {
            return Err(Error::TiedEigenvalues(lo));
        }
    }
    Ok(())
}

/// Gap records for every interior index whose eigenvalue lies strictly within
/// `delta` of `lambda0`. The first and last eigenvalues have no two-sided gap
/// and are never reported.
pub fn extract_gap_records(eigenvalues: &[f64], lambda0: f64, delta: f64) -> Result<Vec<GapRecord>> {
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument(format!("delta must be positive (got {delta})")));
    }
    if let Some(w) = eigenvalues.windows(2).position(|w| w[1] < w[0]) {
        return Err(Error::NotAscending(w + 1));
    }
    let mut out = Vec::new();
    for i in 1..eigenvalues.len().saturating_sub(1) {
        let lambda = eigenvalues[i];
        if (lambda - lambda0).abs() >= delta {
            continue;
        }
        check_simple(eigenvalues, i)?;
        out.push(GapRecord {
            index: i,
            lambda,
            s_minus: lambda - eigenvalues[i - 1],
            s_plus: eigenvalues[i + 1] - lambda,
        });
    }
    Ok(out)
}

/// CSV `index,lambda,s_minus,s_plus`.
pub fn write_gap_csv<W: Write>(mut w: W, records: &[GapRecord]) -> Result<()> {
    writeln!(w, "index,lambda,s_minus,s_plus")?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{}",
            r.index,
            fmt_f64(r.lambda),
            fmt_f64(r.s_minus),
            fmt_f64(r.s_plus)
        )?;
    }
    Ok(())
}
