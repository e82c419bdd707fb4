//! Sample covariance matrices `W(C, n) / n` around a PSD population matrix.
//!
//! Draws use the Bartlett construction, so the cost depends on `p` only and
//! `n` can be as large as 10¹⁰.

use std::io::{Read, Write};

use nalgebra::{DMatrix, DVector};
use rand_distr::{ChiSquared, Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::graph::PopulationMatrix;
use crate::rng::rng_from_seed;

const CLAMP_RTOL: f64 = 1e-8;
const DUMP_MAGIC: [u8; 4] = *b"WSH1";

/// Symmetric square root `U diag(sqrt(lambda)) Uᵀ`. Slightly negative
/// eigenvalues (down to `-1e-8 ||C||`) are treated as zero.
pub fn sqrt_psd(c: &PopulationMatrix) -> Result<DMatrix<f64>> {
    let floor = -CLAMP_RTOL * c.norm();
    let roots = c
        .eigenvalues()
        .iter()
        .map(|&l| {
            if l < floor {
                Err(Error::NotPositiveSemiDefinite(l))
            } else {
                Ok(l.max(0.0).sqrt())
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    let u = c.eigenvectors();
    let scaled = u * DMatrix::from_diagonal(&DVector::from_vec(roots));
    Ok(symmetrize(scaled * u.transpose()))
}

fn symmetrize(m: DMatrix<f64>) -> DMatrix<f64> {
    (&m + m.transpose()) * 0.5
}

#[derive(Debug, Clone)]
pub struct SampleCovariance {
    pub matrix: DMatrix<f64>,
    pub n: u64,
    pub parent_seed: u64,
}

fn check_dims(c_sqrt: &DMatrix<f64>, n: u64) -> Result<usize> {
    if !c_sqrt.is_square() {
        return Err(Error::InvalidArgument("square root factor must be square".into()));
    }
    let p = c_sqrt.nrows();
    if n < p as u64 || n == 0 {
        return Err(Error::TooFewSamples { n, p });
    }
    Ok(p)
}

/// Draws `C̃ = S (A Aᵀ / n) Sᵀ` where `S = C^{1/2}` and `A` is the Bartlett
/// factor of a `W(I, n)` matrix: `A[i][i] = sqrt(chi2(n - i))` (0-based) and
/// standard normals below the diagonal.
pub fn sample_wishart_scaled(c_sqrt: &DMatrix<f64>, n: u64, seed: u64) -> Result<SampleCovariance> {
    let p = check_dims(c_sqrt, n)?;
    let mut rng = rng_from_seed(seed);
    let mut a = DMatrix::<f64>::zeros(p, p);
    for i in 0..p {
        let dof = (n - i as u64) as f64;
        let chi = ChiSquared::new(dof).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        a[(i, i)] = chi.sample(&mut rng).sqrt();
        for j in 0..i {
            a[(i, j)] = StandardNormal.sample(&mut rng);
        }
    }
    let b = (c_sqrt * a) / (n as f64).sqrt();
    Ok(SampleCovariance {
        matrix: symmetrize(&b * b.transpose()),
        n,
        parent_seed: seed,
    })
}

/// Reference sampler: the average of `n` outer products `(S z)(S z)ᵀ` with
/// standard normal `z`. Costs `O(n p²)`; meant for cross-checking small `n`.
pub fn sample_wishart_direct(c_sqrt: &DMatrix<f64>, n: u64, seed: u64) -> Result<SampleCovariance> {
    let p = check_dims(c_sqrt, n)?;
    let mut rng = rng_from_seed(seed);
    let mut acc = DMatrix::<f64>::zeros(p, p);
    for _ in 0..n {
        let z = DVector::from_fn(p, |_, _| StandardNormal.sample(&mut rng));
        let x = c_sqrt * z;
        acc.ger(1.0, &x, &x, 1.0);
    }
    Ok(SampleCovariance {
        matrix: symmetrize(acc / n as f64),
        n,
        parent_seed: seed,
    })
}

impl SampleCovariance {
    /// Debug dump: 16-byte header (magic `WSH1`, `p` as u32 LE, `n` as u64
    /// LE) followed by the matrix in row-major little-endian f64.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        let p = self.matrix.nrows();
        w.write_all(&DUMP_MAGIC)?;
        w.write_all(&(p as u32).to_le_bytes())?;
        w.write_all(&self.n.to_le_bytes())?;
        for i in 0..p {
            for j in 0..p {
                w.write_all(&self.matrix[(i, j)].to_le_bytes())?;
            }
        }
        Ok(())
    }

    /// Reads a dump written by [`SampleCovariance::write_binary`], returning
    /// the matrix and `n`.
    pub fn read_binary<R: Read>(mut r: R) -> Result<(DMatrix<f64>, u64)> {
        let mut header = [0u8; 16];
        r.read_exact(&mut header)?;
        if header[..4] != DUMP_MAGIC {
            return Err(Error::Parse("bad magic in covariance dump".into()));
        }
        let p = u32::from_le_bytes(header[4..8].try_into().unwrap()) as usize;
        let n = u64::from_le_bytes(header[8..16].try_into().unwrap());
        let mut buf = [0u8; 8];
        let mut m = DMatrix::zeros(p, p);
        for i in 0..p {
            for j in 0..p {
                r.read_exact(&mut buf)?;
                m[(i, j)] = f64::from_le_bytes(buf);
            }
        }
        Ok((m, n))
    }
}
