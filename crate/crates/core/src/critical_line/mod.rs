//! Hardy's Z function and |ζ(1/2 + it)|² on the critical line.

mod euler_maclaurin;
mod riemann_siegel;
mod theta;
mod zeros;

pub use euler_maclaurin::{euler_maclaurin_z, euler_maclaurin_zeta_sq};
pub use riemann_siegel::{correction_coefficient, RsValue};
pub use theta::{rs_theta, rs_theta_derivative};
pub use zeros::{ZERO_RESIDUAL, count_zeros, find_zero_pair, find_zeros, riemann_von_mangoldt, ZeroPair, ZeroScan};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordinates below this use the Euler–Maclaurin backend.
pub const RS_MIN_T: f64 = 1000.0;

/// Tolerance used for the precision-loss flag of [`hardy_z_checked`].
pub const RS_TOLERANCE: f64 = 1e-8;

/// One evaluation point on the critical line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub t: f64,
    pub z: f64,
    pub zeta_sq: f64,
}

impl CriticalPoint {
    pub fn at(t: f64) -> Result<Self> {
        let z = hardy_z(t)?;
        Ok(Self { t, z, zeta_sq: z * z })
    }
}

/// Z value with the backend diagnostics attached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZEvaluation {
    pub z: f64,
    pub remainder_estimate: f64,
    pub precision_warning: bool,
}

fn check_domain(t: f64) -> Result<()> {
    if !(t >= 2.0) || !t.is_finite() {
        return Err(Error::Domain {
            what: "hardy_z",
            value: t,
            requirement: "t >= 2",
        });
    }
    Ok(())
}

/// Hardy's Z(t), real with Z(t)² = |ζ(1/2 + it)|².
pub fn hardy_z(t: f64) -> Result<f64> {
    check_domain(t)?;
    Ok(z_fast(t))
}

pub fn hardy_z_checked(t: f64) -> Result<ZEvaluation> {
    check_domain(t)?;
    if t < RS_MIN_T {
        return Ok(ZEvaluation {
            z: euler_maclaurin::z_unchecked(t),
            remainder_estimate: 0.0,
            precision_warning: false,
        });
    }
    let v = riemann_siegel::rs_z(t);
    Ok(ZEvaluation {
        z: v.z,
        remainder_estimate: v.remainder_estimate,
        precision_warning: v.remainder_estimate > RS_TOLERANCE * v.z.abs().max(1.0),
    })
}

/// |ζ(1/2 + it)|².
pub fn zeta_sq(t: f64) -> Result<f64> {
    hardy_z(t).map(|z| z * z)
}

/// Z(t) without the domain check; valid for every t ≥ 0.
#[inline]
pub(crate) fn z_fast(t: f64) -> f64 {
    if t < RS_MIN_T {
        euler_maclaurin::z_unchecked(t)
    } else {
        riemann_siegel::rs_z(t).z
    }
}

#[inline]
pub(crate) fn z_sq_fast(t: f64) -> f64 {
    let z = z_fast(t);
    z * z
}
