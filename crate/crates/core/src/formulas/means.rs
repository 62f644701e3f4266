//! External mean values and the geometric-mean inequalities derived from them.

use serde::{Deserialize, Serialize};

use super::{chain_integrand, image_length, product_integral, ChainFactors};
use crate::critical_line::hardy_z;
use crate::error::{Error, Result};
use crate::ladder::{check_window, LadderModel};
use crate::quadrature::QuadratureConfig;

/// Where the sampled values live relative to the integral they represent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeanValueSide {
    /// The mean over [T, T+U] is represented by |ζ|² sampled on the
    /// components k = l..2l−1.
    Far,
    /// The mean over [φ₁ˡ(T), φ₁ˡ(T+U)] is represented by |ζ|² sampled on
    /// the components k = 0..l−1.
    Near,
}

/// τ_k together with its host interval (φ₁ᵏ(T), φ₁ᵏ(T+U)).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TauHost {
    pub k: usize,
    pub tau: f64,
    pub lo: f64,
    pub hi: f64,
}

impl TauHost {
    pub fn strictly_inside(&self) -> bool {
        self.lo < self.tau && self.tau < self.hi
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanValueWitness {
    pub l: usize,
    pub side: MeanValueSide,
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(rename = "U")]
    pub u: f64,
    /// Point t_l ∈ (T, T+U) with τ_k = φ₁ᵏ(t_l).
    pub t_l: f64,
    pub taus: Vec<TauHost>,
    /// Mean value on the left-hand side.
    pub mean: f64,
    /// Coefficient multiplying the product of sampled values.
    pub coefficient: f64,
    /// |coefficient·∏|ζ(½+iτ_k)|² − mean| / mean.
    pub residual: f64,
}

impl MeanValueWitness {
    /// Recomputes coefficient·∏|ζ(½+iτ_k)|² from the stored τ's.
    pub fn replay(&self) -> Result<f64> {
        let mut prod = self.coefficient;
        for h in &self.taus {
            let z = hardy_z(h.tau)?;
            prod *= z * z;
        }
        Ok(prod)
    }

    pub fn all_inside(&self) -> bool {
        self.taus.iter().all(TauHost::strictly_inside)
    }
}

const PROFILE_POINTS: usize = 512;
const MAX_PROFILE_POINTS: usize = 1 << 16;

/// Finds t_l ∈ (T, T+U) at which the sampled product reproduces the mean
/// exactly, by scanning a profile and refining the first sign change.
pub fn external_mean_value(model: &LadderModel, t: f64, u: f64, l: usize, side: MeanValueSide, quad: &QuadratureConfig) -> Result<MeanValueWitness> {
    if l == 0 {
        return Err(Error::Inadmissible("l must be at least 1".into()));
    }
    check_window(t, u)?;
    model.iterate(t + u, 2 * l)?;
    let len_l = image_length(model, t, u, l)?;
    let len_2l = image_length(model, t, u, 2 * l)?;
    let far_coef = len_l * len_l / (len_2l * u);
    let (mean, coefficient, shift) = match side {
        MeanValueSide::Far => {
            let q = product_integral(model, t, t + u, l, quad)?;
            (q.value / u, far_coef, l)
        }
        MeanValueSide::Near => {
            let ends = model.iterates(&[t, t + u], l)?;
            let q = product_integral(model, ends[0], ends[1], l, quad)?;
            (q.value / len_l, 1.0 / far_coef, 0)
        }
    };
    let target = mean / coefficient;
    let factors = ChainFactors {
        plain: shift..shift + l,
        tilde: 0..0,
    };
    let f = |x: f64| -> Result<f64> { Ok(chain_integrand(model, &[x], &factors)?[0] - target) };

    let mut points = PROFILE_POINTS;
    let (mut a, mut b) = loop {
        let ts: Vec<f64> = (0..points)
            .map(|i| t + u * (i as f64 + 0.5) / points as f64)
            .collect();
        let g = chain_integrand(model, &ts, &factors)?;
        if let Some(i) = (0..points - 1).find(|&i| (g[i] - target) * (g[i + 1] - target) <= 0.0) {
            break ((ts[i], g[i] - target), (ts[i + 1], g[i + 1] - target));
        }
        if points >= MAX_PROFILE_POINTS {
            let min = g.iter().copied().fold(f64::INFINITY, f64::min);
            let max = g.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            return Err(Error::RootNotBracketed { target, min, max });
        }
        points *= 2;
    };

    // Illinois false position; falls back to bisection when it stalls.
    let mut side_kept = 0i8;
    for _ in 0..200 {
        if a.1 == 0.0 {
            b = a;
            break;
        }
        if b.1 == 0.0 || (b.0 - a.0).abs() <= 4.0 * f64::EPSILON * b.0.abs() {
            break;
        }
        let mut x = (a.0 * b.1 - b.0 * a.1) / (b.1 - a.1);
        if !(x > a.0.min(b.0) && x < a.0.max(b.0)) {
            x = 0.5 * (a.0 + b.0);
        }
        let fx = f(x)?;
        if fx.abs() <= 1e-13 * target {
            a = (x, fx);
            b = a;
            break;
        }
        if (fx < 0.0) == (a.1 < 0.0) {
            a = (x, fx);
            if side_kept == 1 {
                b.1 *= 0.5;
            }
            side_kept = 1;
        } else {
            b = (x, fx);
            if side_kept == -1 {
                a.1 *= 0.5;
            }
            side_kept = -1;
        }
    }
    let fa = f(a.0)?.abs();
    let fb = f(b.0)?.abs();
    let t_l = if fa <= fb { a.0 } else { b.0 };
    let chain = model.iterate_chain(&[t_l, t, t + u], shift + l - 1)?;
    let taus = (shift..shift + l)
        .map(|k| TauHost {
            k,
            tau: chain[k][0],
            lo: chain[k][1],
            hi: chain[k][2],
        })
        .collect();
    let mut w = MeanValueWitness {
        l,
        side,
        t,
        u,
        t_l,
        taus,
        mean,
        coefficient,
        residual: 0.0,
    };
    w.residual = (w.replay()? - mean).abs() / mean;
    Ok(w)
}

/// τ_k at the midpoints of the host intervals, k = 0..2l−1.
pub fn midpoint_taus(model: &LadderModel, t: f64, u: f64, l: usize) -> Result<Vec<f64>> {
    let chain = model.iterate_chain(&[t, t + u], 2 * l - 1)?;
    Ok(chain.iter().map(|e| 0.5 * (e[0] + e[1])).collect())
}

/// One ordering of the ratio sequence |ζ(½+iτ_{σ(k)})| / |ζ(½+iτ_{l+π(k)})|.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmGmCheck {
    pub low_order: Vec<usize>,
    pub high_order: Vec<usize>,
    pub arithmetic_mean: f64,
    /// (AM − GM)/GM; never negative beyond rounding.
    pub am_gm_margin: f64,
    /// AM − (1 − ε)Ω_l.
    pub conditional_margin: f64,
    pub conditional_holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeoMeanReport {
    pub l: usize,
    /// Geometric mean of |ζ(½+iτ_k)| over k = 0..l−1.
    pub g_low: f64,
    /// Geometric mean of |ζ(½+iτ_k)| over k = l..2l−1.
    pub g_high: f64,
    pub omega: f64,
    pub epsilon: f64,
    pub inequalities: Vec<AmGmCheck>,
}

impl GeoMeanReport {
    /// Geometric mean of the ratio sequence, g_low / g_high.
    pub fn ratio_mean(&self) -> f64 {
        self.g_low / self.g_high
    }

    pub fn min_am_gm_margin(&self) -> f64 {
        self.inequalities
            .iter()
            .map(|c| c.am_gm_margin)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn conditional_all(&self) -> bool {
        self.inequalities.iter().all(|c| c.conditional_holds)
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let Some(i) = (0..n - 1).rev().find(|&i| p[i] < p[i + 1]) else {
        return false;
    };
    let j = (i + 1..n).rev().find(|&j| p[j] > p[i]).expect("successor");
    p.swap(i, j);
    p[i + 1..].reverse();
    true
}

fn permutations(l: usize) -> Vec<Vec<usize>> {
    let mut p: Vec<usize> = (0..l).collect();
    let mut out = vec![p.clone()];
    while next_permutation(&mut p) {
        out.push(p.clone());
    }
    out
}

/// Geometric means of |ζ| over the two halves of `taus` (length 2l), the
/// scale Ω_l, and all (l!)² orderings of the ratio sequence.
pub fn geometric_mean_report(model: &LadderModel, t: f64, u: f64, l: usize, taus: &[f64], epsilon: f64) -> Result<GeoMeanReport> {
    if l == 0 || taus.len() != 2 * l {
        return Err(Error::Inadmissible(format!(
            "need 2l = {} sample points, got {}",
            2 * l,
            taus.len()
        )));
    }
    let abs_z = taus
        .iter()
        .map(|&x| hardy_z(x).map(f64::abs))
        .collect::<Result<Vec<_>>>()?;
    if let Some(i) = (0..2 * l).find(|&i| abs_z[i] == 0.0) {
        return Err(Error::ZeroDivide { tau: taus[i] });
    }
    let (low, high) = abs_z.split_at(l);
    let geo = |v: &[f64]| (v.iter().map(|x| x.ln()).sum::<f64>() / v.len() as f64).exp();
    let (g_low, g_high) = (geo(low), geo(high));
    let len_l = image_length(model, t, u, l)?;
    let len_2l = image_length(model, t, u, 2 * l)?;
    let omega = (len_l / (len_2l * u).sqrt()).powf(1.0 / l as f64);
    let gm = (low.iter().zip(high).map(|(a, b)| (a / b).ln()).sum::<f64>() / l as f64).exp();
    let orders = permutations(l);
    let mut inequalities = Vec::with_capacity(orders.len() * orders.len());
    for sigma in &orders {
        for pi in &orders {
            let am = sigma
                .iter()
                .zip(pi)
                .map(|(&i, &j)| low[i] / high[j])
                .sum::<f64>()
                / l as f64;
            let conditional_margin = am - (1.0 - epsilon) * omega;
            inequalities.push(AmGmCheck {
                low_order: sigma.clone(),
                high_order: pi.clone(),
                arithmetic_mean: am,
                am_gm_margin: (am - gm) / gm,
                conditional_margin,
                conditional_holds: conditional_margin > 0.0,
            });
        }
    }
    Ok(GeoMeanReport {
        l,
        g_low,
        g_high,
        omega,
        epsilon,
        inequalities,
    })
}

#[cfg(test)]
mod tests {
    use super::super::tests::model;
    use super::*;

    #[test]
    fn permutation_counts() {
        assert_eq!(permutations(1).len(), 1);
        assert_eq!(permutations(3).len(), 6);
        assert_eq!(permutations(4).len(), 24);
    }

    #[test]
    fn witness_far_and_near() {
        let m = model();
        let cfg = QuadratureConfig::default();
        let (t, u) = (5000.0, 30.0);
        for side in [MeanValueSide::Far, MeanValueSide::Near] {
            let w = external_mean_value(m, t, u, 2, side, &cfg).unwrap();
            assert!(w.all_inside(), "{w:?}");
            assert!(w.residual <= 1e-9, "{w:?}");
            assert!(w.t_l > t && w.t_l < t + u);
        }
    }

    #[test]
    fn am_gm_margins_non_negative() {
        let m = model();
        let taus = midpoint_taus(m, 5000.0, 30.0, 3).unwrap();
        let r = geometric_mean_report(m, 5000.0, 30.0, 3, &taus, 0.1).unwrap();
        assert_eq!(r.inequalities.len(), 36);
        assert!(r.min_am_gm_margin() >= -1e-12);
        let one = geometric_mean_report(m, 5000.0, 30.0, 1, &taus[2..4], 0.1).unwrap();
        assert!(one.min_am_gm_margin().abs() < 1e-12);
    }
}
