//! Symmetric eigensolves, bulk spectral densities, eigengaps and the GOE
//! spacing surmises.

mod density;
mod eig;
mod gaps;
mod surmise;

pub use density::{estimate_density, freedman_diaconis_width, mckay_density, DensityKind, SpectralDensity};
pub use eig::{eig_sym, eigenvalues_sym};
pub use gaps::{check_simple, extract_gap_records, write_gap_csv, GapRecord, TIE_RTOL};
pub use surmise::{joint_gap_ln_pdf, joint_gap_pdf, wigner_surmise_cdf, wigner_surmise_pdf};
