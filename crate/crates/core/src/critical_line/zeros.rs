//! Sign-change scanning for zeros of Z on the critical line.
//!
//! The scan step is an eighth of the mean zero spacing 2π/ln(t/2π), capped
//! at π/ln t. This does not rule out a missed close pair; the zero count
//! against the Riemann–von Mangoldt estimate is the check on that.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::z_fast;
use crate::error::{Error, Result};

/// Residual target for refined zeros.
pub const ZERO_RESIDUAL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroPair {
    pub gamma: f64,
    pub gamma_prime: f64,
    /// Largest |Z| over the two refined endpoints.
    pub refinement_residual: f64,
}

impl ZeroPair {
    pub fn gap(&self) -> f64 {
        self.gamma_prime - self.gamma
    }
}

/// Scanner settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroScan {
    /// Largest distance scanned past the start before giving up.
    pub max_span: f64,
    /// Fraction of the mean spacing used as the step.
    pub step_fraction: f64,
}

impl Default for ZeroScan {
    fn default() -> Self {
        Self {
            max_span: 1000.0,
            step_fraction: 0.125,
        }
    }
}

impl ZeroScan {
    fn step(&self, t: f64) -> f64 {
        let t = t.max(10.0);
        let mean = 2.0 * PI / (t / (2.0 * PI)).ln().max(0.5);
        (self.step_fraction * mean).min(PI / t.ln())
    }
}

/// N(T) ≈ (T/2π) ln(T/2π) − T/2π + 7/8.
pub fn riemann_von_mangoldt(t: f64) -> f64 {
    let x = t / (2.0 * PI);
    x * x.ln() - x + 0.875
}

/// Refines a sign change of Z inside [a, b] (Illinois false position with a
/// bisection safeguard).
fn refine(mut a: f64, mut b: f64, mut fa: f64, mut fb: f64) -> (f64, f64) {
    let mut side = 0i8;
    for _ in 0..200 {
        let width = b - a;
        let mut c = (a * fb - b * fa) / (fb - fa);
        if !(c > a && c < b) || width < 1e-3 * (b - a).abs() {
            c = 0.5 * (a + b);
        }
        let fc = z_fast(c);
        if fc.abs() <= ZERO_RESIDUAL * 1e-2 || width <= 4.0 * f64::EPSILON * b.abs() {
            return (c, fc.abs());
        }
        if (fc > 0.0) == (fa > 0.0) {
            a = c;
            fa = fc;
            if side == -1 {
                fb *= 0.5;
            }
            side = -1;
        } else {
            b = c;
            fb = fc;
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        }
    }
    let c = 0.5 * (a + b);
    (c, z_fast(c).abs())
}

/// Returns up to `count` refined zeros of Z in [from, to], ascending.
pub fn find_zeros(from: f64, to: f64, count: usize, scan: &ZeroScan) -> Result<Vec<(f64, f64)>> {
    if !(from >= 10.0) {
        return Err(Error::Domain {
            what: "find_zeros",
            value: from,
            requirement: "t_start >= 10",
        });
    }
    let mut out = Vec::new();
    let mut t = from;
    let mut z = z_fast(t);
    while out.len() < count && t < to {
        let next = (t + scan.step(t)).min(to);
        let zn = z_fast(next);
        if z == 0.0 {
            out.push((t, 0.0));
        } else if (z > 0.0) != (zn > 0.0) && zn != 0.0 {
            out.push(refine(t, next, z, zn));
        }
        t = next;
        z = zn;
    }
    Ok(out)
}

/// Number of sign changes of Z in [from, to].
pub fn count_zeros(from: f64, to: f64) -> Result<usize> {
    Ok(find_zeros(from, to, usize::MAX, &ZeroScan::default())?.len())
}

/// First pair of consecutive zeros of Z at or after `t_start`.
pub fn find_zero_pair(t_start: f64, scan: &ZeroScan) -> Result<ZeroPair> {
    let to = t_start + scan.max_span;
    let zeros = find_zeros(t_start, to, 2, scan)?;
    match zeros.as_slice() {
        [(g, rg), (gp, rgp)] => Ok(ZeroPair {
            gamma: *g,
            gamma_prime: *gp,
            refinement_residual: rg.max(*rgp),
        }),
        _ => Err(Error::SearchExhausted { from: t_start, to }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_pair() {
        let pair = find_zero_pair(14.0, &ZeroScan::default()).unwrap();
        assert!((pair.gamma - 14.134725141734693).abs() < 1e-8);
        assert!((pair.gamma_prime - 21.022039638771555).abs() < 1e-8);
        assert!(pair.refinement_residual <= ZERO_RESIDUAL);
    }

    #[test]
    fn pair_after_first_zero() {
        let pair = find_zero_pair(14.134725141734693 + 1e-6, &ZeroScan::default()).unwrap();
        assert!((pair.gamma - 21.022039638771555).abs() < 1e-8);
        assert!(pair.gap() > 0.0);
    }

    #[test]
    fn exhausted_span() {
        let scan = ZeroScan {
            max_span: 1.0,
            ..ZeroScan::default()
        };
        assert!(matches!(
            find_zero_pair(15.0, &scan),
            Err(Error::SearchExhausted { .. })
        ));
    }
}
