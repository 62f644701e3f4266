//! Slow reference evaluation of ζ(1/2 + it) by Euler–Maclaurin summation.

use num_complex::Complex64;

use super::theta::theta_unchecked;
use crate::error::{Error, Result};

// B_{2k} / (2k)! for k = 1..=15.
const BERNOULLI_OVER_FACT: [f64; 15] = [
    1.0 / 6.0 / 2.0,
    -1.0 / 30.0 / 24.0,
    1.0 / 42.0 / 720.0,
    -1.0 / 30.0 / 40320.0,
    5.0 / 66.0 / 3628800.0,
    -691.0 / 2730.0 / 479001600.0,
    7.0 / 6.0 / 87178291200.0,
    -3617.0 / 510.0 / 20922789888000.0,
    43867.0 / 798.0 / 6402373705728000.0,
    -174611.0 / 330.0 / 2432902008176640000.0,
    854513.0 / 138.0 / 1.1240007277776077e21,
    -236364091.0 / 2730.0 / 6.204484017332394e23,
    8553103.0 / 6.0 / 4.0329146112660565e26,
    -23749461029.0 / 870.0 / 3.0488834461171384e29,
    8615841276005.0 / 14322.0 / 2.652528598121911e32,
];

/// Neumaier-compensated accumulator.
#[derive(Default, Clone, Copy)]
struct Compensated {
    sum: f64,
    carry: f64,
}

impl Compensated {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(self) -> f64 {
        self.sum + self.carry
    }
}

/// ζ(1/2 + it) for any real t (no domain check).
pub(crate) fn zeta_half_line(t: f64) -> Complex64 {
    let s = Complex64::new(0.5, t);
    let n_cut = (0.5 * t.abs()).ceil() as u64 + 20;

    let mut re = Compensated::default();
    let mut im = Compensated::default();
    for n in 1..n_cut {
        let nf = n as f64;
        let ln_n = nf.ln();
        let mag = 1.0 / nf.sqrt();
        let (sin, cos) = (t * ln_n).sin_cos();
        re.add(mag * cos);
        im.add(-mag * sin);
    }

    let nf = n_cut as f64;
    let ln_n = nf.ln();
    let (sin, cos) = (t * ln_n).sin_cos();
    // N^{-s}
    let n_pow = Complex64::new(cos, -sin) / nf.sqrt();
    let tail = n_pow * nf / (s - 1.0) + 0.5 * n_pow;
    re.add(tail.re);
    im.add(tail.im);

    let mut poch = s;
    let mut n_neg = n_pow / nf;
    for (k, &b) in BERNOULLI_OVER_FACT.iter().enumerate() {
        let term = b * poch * n_neg;
        re.add(term.re);
        im.add(term.im);
        if term.norm() < 1e-20 {
            break;
        }
        let j = 2.0 * (k as f64 + 1.0);
        poch = poch * (s + (j - 1.0)) * (s + j);
        n_neg /= nf * nf;
    }
    Complex64::new(re.value(), im.value())
}

/// |ζ(1/2 + it)|² by Euler–Maclaurin summation; cost grows linearly in t.
pub fn euler_maclaurin_zeta_sq(t: f64) -> Result<f64> {
    if !(t >= 2.0) || !t.is_finite() {
        return Err(Error::Domain {
            what: "euler_maclaurin_zeta_sq",
            value: t,
            requirement: "t >= 2",
        });
    }
    Ok(zeta_half_line(t).norm_sqr())
}

/// Hardy Z(t) = Re(e^{iθ(t)} ζ(1/2 + it)) from the Euler–Maclaurin sum.
pub fn euler_maclaurin_z(t: f64) -> Result<f64> {
    if !(t >= 2.0) || !t.is_finite() {
        return Err(Error::Domain {
            what: "euler_maclaurin_z",
            value: t,
            requirement: "t >= 2",
        });
    }
    Ok(z_unchecked(t))
}

pub(crate) fn z_unchecked(t: f64) -> f64 {
    let zeta = zeta_half_line(t);
    let (s, c) = theta_unchecked(t.max(0.0)).sin_cos();
    (Complex64::new(c, s) * zeta).re
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_at_half() {
        // ζ(1/2) = -1.4603545088095868...
        let z = zeta_half_line(0.0);
        assert!((z.re + 1.4603545088095868).abs() < 1e-13);
        assert!(z.im.abs() < 1e-14);
    }

    #[test]
    fn z_is_real_rotation() {
        for &t in &[17.3, 101.2, 523.7] {
            let zeta = zeta_half_line(t);
            let (s, c) = theta_unchecked(t).sin_cos();
            let rot = Complex64::new(c, s) * zeta;
            assert!(rot.im.abs() < 1e-11 * (1.0 + rot.re.abs()), "t={t} {rot}");
        }
    }

    #[test]
    fn positive_at_two() {
        assert!(euler_maclaurin_zeta_sq(2.0).unwrap() > 0.0);
        assert!(euler_maclaurin_zeta_sq(1.0).is_err());
    }
}
