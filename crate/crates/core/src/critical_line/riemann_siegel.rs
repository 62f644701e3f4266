//! Riemann–Siegel evaluation of Hardy's Z function.
//!
//! The correction terms C₀..C₄ are expressed through derivatives of
//! Ψ(p) = cos(2π(p² − p − 1/16)) / cos(2πp). Ψ is entire and even about
//! p = 1/2, so its Taylor coefficients in x = p − 1/2 are obtained once
//! from a Cauchy integral on |x| = 1 and the Cₖ are stored as polynomials.

use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::OnceLock;

use super::theta::theta_unchecked;

const PSI_DEGREE: usize = 44;
const CAUCHY_NODES: usize = 160;
const TERM_TABLE: usize = 16384;

struct Tables {
    /// Cₖ(x) polynomial coefficients, k = 0..=4, ascending powers of x.
    corrections: [Vec<f64>; 5],
    ln_n: Vec<f64>,
    inv_sqrt_n: Vec<f64>,
    /// Smallest prime factor of n (n itself for primes) and the cofactor n / spf(n).
    spf: Vec<u32>,
    cofactor: Vec<u32>,
}

fn tables() -> &'static Tables {
    static TABLES: OnceLock<Tables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let psi = psi_taylor();
        let d = |m: usize| derivative(&psi, m);
        let pi2 = PI * PI;
        let pi4 = pi2 * pi2;
        let pi6 = pi4 * pi2;
        let pi8 = pi4 * pi4;
        let c0 = psi.clone();
        let c1 = combine(&[(-1.0 / (96.0 * pi2), d(3))]);
        let c2 = combine(&[(1.0 / (18432.0 * pi4), d(6)), (1.0 / (64.0 * pi2), d(2))]);
        let c3 = combine(&[
            (-1.0 / (5308416.0 * pi6), d(9)),
            (-1.0 / (3840.0 * pi4), d(5)),
            (-1.0 / (64.0 * pi2), d(1)),
        ]);
        let c4 = combine(&[
            (1.0 / (2038431744.0 * pi8), d(12)),
            (11.0 / (5898240.0 * pi6), d(8)),
            (19.0 / (24576.0 * pi4), d(4)),
            (1.0 / (128.0 * pi2), d(0)),
        ]);
        let ln_n = (0..TERM_TABLE).map(|n| (n.max(1) as f64).ln()).collect();
        let inv_sqrt_n = (0..TERM_TABLE)
            .map(|n| 1.0 / (n.max(1) as f64).sqrt())
            .collect();
        let mut spf: Vec<u32> = (0..TERM_TABLE as u32).collect();
        let mut p = 2;
        while p * p < TERM_TABLE {
            if spf[p] == p as u32 {
                for m in (p * p..TERM_TABLE).step_by(p) {
                    if spf[m] == m as u32 {
                        spf[m] = p as u32;
                    }
                }
            }
            p += 1;
        }
        let cofactor = (0..TERM_TABLE)
            .map(|n| if n < 2 { 1 } else { n as u32 / spf[n] })
            .collect();
        Tables {
            corrections: [c0, c1, c2, c3, c4],
            ln_n,
            inv_sqrt_n,
            spf,
            cofactor,
        }
    })
}

fn psi_complex(x: Complex64) -> Complex64 {
    let two_pi = 2.0 * PI;
    -(two_pi * x * x - 5.0 * PI / 8.0).cos() / (two_pi * x).cos()
}

/// Taylor coefficients of Ψ(1/2 + x) about x = 0.
fn psi_taylor() -> Vec<f64> {
    let k_nodes = CAUCHY_NODES;
    let samples: Vec<(Complex64, Complex64)> = (0..k_nodes)
        .map(|j| {
            let angle = 2.0 * PI * (j as f64 + 0.5) / k_nodes as f64;
            let w = Complex64::from_polar(1.0, angle);
            (w, psi_complex(w))
        })
        .collect();
    (0..=PSI_DEGREE)
        .map(|k| {
            let acc: Complex64 = samples
                .iter()
                .map(|&(w, f)| f * w.powi(-(k as i32)))
                .sum();
            let c = acc.re / k_nodes as f64;
            // Ψ is even about p = 1/2.
            if k % 2 == 1 { 0.0 } else { c }
        })
        .collect()
}

fn derivative(coeffs: &[f64], m: usize) -> Vec<f64> {
    (m..coeffs.len())
        .map(|k| {
            let falling: f64 = ((k - m + 1)..=k).map(|j| j as f64).product();
            coeffs[k] * falling
        })
        .collect()
}

fn combine(parts: &[(f64, Vec<f64>)]) -> Vec<f64> {
    let len = parts.iter().map(|(_, p)| p.len()).max().unwrap_or(0);
    let mut out = vec![0.0; len];
    for (scale, poly) in parts {
        for (o, c) in out.iter_mut().zip(poly) {
            *o += scale * c;
        }
    }
    out
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// Value of the correction coefficient Cₖ at fractional part `p`.
pub fn correction_coefficient(k: usize, p: f64) -> f64 {
    horner(&tables().corrections[k], p - 0.5)
}

/// Result of a Riemann–Siegel evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RsValue {
    pub z: f64,
    /// Magnitude of the last correction term included; a proxy for the
    /// truncation error.
    pub remainder_estimate: f64,
}

pub(crate) fn rs_z(t: f64) -> RsValue {
    let tab = tables();
    let tau = (t / (2.0 * PI)).sqrt();
    let n_main = tau.floor() as usize;
    let p = tau - n_main as f64;
    let theta = theta_unchecked(t);

    let mut sum = 0.0;
    if n_main < TERM_TABLE {
        sum = main_sum_multiplicative(tab, t, theta, n_main);
    } else {
        for n in 1..=n_main {
            let nf = n as f64;
            sum += (theta - t * nf.ln()).cos() / nf.sqrt();
        }
    }

    let a = 1.0 / tau;
    let x = p - 0.5;
    let mut rem = 0.0;
    let mut power = 1.0;
    let mut last = 0.0;
    for poly in &tab.corrections {
        last = horner(poly, x) * power;
        rem += last;
        power *= a;
    }
    let sign = if n_main % 2 == 1 { 1.0 } else { -1.0 };
    let scale = a.sqrt();
    RsValue {
        z: 2.0 * sum + sign * scale * rem,
        remainder_estimate: (scale * last * a).abs(),
    }
}

thread_local! {
    static POWERS: std::cell::RefCell<Vec<Complex64>> = const { std::cell::RefCell::new(Vec::new()) };
}

/// Σ n^{-1/2} cos(θ − t ln n) using complete multiplicativity of n^{-it}:
/// only prime n need a sin/cos evaluation.
fn main_sum_multiplicative(tab: &Tables, t: f64, theta: f64, n_main: usize) -> f64 {
    POWERS.with(|cell| {
        let mut powers = cell.borrow_mut();
        powers.clear();
        powers.resize(n_main + 1, Complex64::new(1.0, 0.0));
        let mut acc = Complex64::new(0.0, 0.0);
        for n in 2..=n_main {
            let p = tab.spf[n] as usize;
            let u = if p == n {
                let (s, c) = (t * tab.ln_n[n]).sin_cos();
                Complex64::new(c, -s)
            } else {
                powers[p] * powers[tab.cofactor[n] as usize]
            };
            powers[n] = u;
            acc += u * tab.inv_sqrt_n[n];
        }
        acc += 1.0;
        let (s, c) = theta.sin_cos();
        (Complex64::new(c, s) * acc).re
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_correction_constants() {
        // Values of the Cₖ at p = 1/2 (Gabcke's tables).
        assert!((correction_coefficient(0, 0.5) - 0.38268343236508977).abs() < 1e-14);
        assert!(correction_coefficient(1, 0.5).abs() < 1e-14);
        assert!((correction_coefficient(2, 0.5) - 0.00518854283029316).abs() < 1e-12);
        assert!(correction_coefficient(3, 0.5).abs() < 1e-14);
        assert!((correction_coefficient(4, 0.5) - 0.00046483389361763).abs() < 1e-12);
    }

    #[test]
    fn psi_series_matches_closed_form() {
        for &p in &[0.0, 0.1, 0.3, 0.6, 0.9, 0.999] {
            let direct = (2.0 * PI * (p * p - p - 1.0 / 16.0)).cos() / (2.0 * PI * p).cos();
            let series = correction_coefficient(0, p);
            assert!((direct - series).abs() < 1e-12, "p={p}: {direct} vs {series}");
        }
    }
}
