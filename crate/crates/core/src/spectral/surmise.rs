use std::f64::consts::PI;

/// Wigner surmise for a nearest-neighbor gap `s` at local density `p * rho`.
pub fn wigner_surmise_pdf(s: f64, p: f64, rho: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    let a2 = (p * rho).powi(2);
    0.5 * PI * a2 * s * (-0.25 * PI * a2 * s * s).exp()
}

pub fn wigner_surmise_cdf(s: f64, p: f64, rho: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    -(-0.25 * PI * (p * rho).powi(2) * s * s).exp_m1()
}

/// Natural log of the joint left/right gap surmise; `-inf` when either gap
/// is nonpositive.
pub fn joint_gap_ln_pdf(s_minus: f64, s_plus: f64, p: f64, rho: f64) -> f64 {
    if s_minus <= 0.0 || s_plus <= 0.0 {
        return f64::NEG_INFINITY;
    }
    let a = p * rho;
    let ln_norm = 7.0 * 3f64.ln() + 5.0 * a.ln() - 32f64.ln() - 3.0 * PI.ln();
    let quad = (3.0 * a).powi(2) / (4.0 * PI)
        * (s_plus * s_plus + s_minus * s_minus + s_plus * s_minus);
    ln_norm + s_minus.ln() + s_plus.ln() + (s_minus + s_plus).ln() - quad
}

/// Joint density of the (left, right) eigengaps around one eigenvalue, the
/// 3x3 GOE generalization of the Wigner surmise.
pub fn joint_gap_pdf(s_minus: f64, s_plus: f64, p: f64, rho: f64) -> f64 {
    joint_gap_ln_pdf(s_minus, s_plus, p, rho).exp()
}
