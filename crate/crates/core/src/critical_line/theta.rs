use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Below this ordinate the asymptotic series is replaced by a shifted
/// Stirling evaluation of the complex log-Gamma function.
const SERIES_CUTOFF: f64 = 10.0;

// Coefficients of t^{-(2k-1)} in the asymptotic expansion of theta(t).
const THETA_SERIES: [f64; 6] = [
    1.0 / 48.0,
    7.0 / 5760.0,
    31.0 / 80640.0,
    127.0 / 430080.0,
    511.0 / 1216512.0,
    1414477.0 / 1476034560.0,
];

// B_{2k} / (2k (2k-1)) for the Stirling series of log Gamma.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
];

/// Riemann–Siegel theta function, θ(t) = Im log Γ(1/4 + it/2) − (t/2) log π.
pub fn rs_theta(t: f64) -> Result<f64> {
    if !(t >= 2.0) || !t.is_finite() {
        return Err(Error::Domain {
            what: "rs_theta",
            value: t,
            requirement: "t >= 2",
        });
    }
    Ok(theta_unchecked(t))
}

pub(crate) fn theta_unchecked(t: f64) -> f64 {
    if t >= SERIES_CUTOFF {
        theta_series(t)
    } else {
        theta_loggamma(t)
    }
}

fn theta_series(t: f64) -> f64 {
    let inv = 1.0 / t;
    let inv2 = inv * inv;
    let mut corr = 0.0;
    for &c in THETA_SERIES.iter().rev() {
        corr = corr * inv2 + c;
    }
    0.5 * t * (t / (2.0 * PI)).ln() - 0.5 * t - PI / 8.0 + corr * inv
}

fn theta_loggamma(t: f64) -> f64 {
    let z = Complex64::new(0.25, 0.5 * t);
    ln_gamma(z).im - 0.5 * t * PI.ln()
}

/// Continuous-branch complex log-Gamma for Re z > 0.
pub(crate) fn ln_gamma(z: Complex64) -> Complex64 {
    let mut shift = Complex64::new(0.0, 0.0);
    let mut w = z;
    while w.norm() < 20.0 {
        shift += w.ln();
        w += 1.0;
    }
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    for &c in STIRLING.iter().rev() {
        series = series * inv2 + c;
    }
    (w - 0.5) * w.ln() - w + 0.5 * (2.0 * PI).ln() + series * inv - shift
}

/// θ'(t), from the leading terms of the asymptotic series.
pub fn rs_theta_derivative(t: f64) -> f64 {
    0.5 * (t / (2.0 * PI)).ln() - 1.0 / (48.0 * t * t)
}
