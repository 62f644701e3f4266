//! Asymptotic relations between conjugate integrals, checked at finite T.

use serde::{Deserialize, Serialize};

use super::{
    chain_integral, image_length, product_integral, rel_err, verify_identity, ChainFactors, RatioRecord, SHORT_IMAGE,
};
use crate::critical_line::{find_zero_pair, ZeroPair, ZeroScan};
use crate::error::{Error, Result};
use crate::ladder::{check_window, LadderModel};
use crate::quadrature::{QuadResult, QuadratureConfig};

/// ∫ over [φ₁ˡ(T), φ₁ˡ(T+U)] of ∏_{k<count} |ζ(½ + iφ₁ᵏ(u))|².
///
/// Short images are integrated after substituting u = φ₁ˡ(t).
fn shifted_product(model: &LadderModel, t: f64, u: f64, l: usize, count: usize, quad: &QuadratureConfig) -> Result<QuadResult> {
    let ends = model.iterates(&[t, t + u], l)?;
    if count == 0 {
        return Ok(QuadResult {
            value: image_length(model, t, u, l)?,
            est_error: 0.0,
            panels: 0,
        });
    }
    if (ends[1] - ends[0]).abs() < SHORT_IMAGE * ends[1].abs() {
        let factors = ChainFactors {
            plain: l..l + count,
            tilde: 0..l,
        };
        return chain_integral(model, t, t + u, &factors, quad);
    }
    product_integral(model, ends[0], ends[1], count, quad)
}

/// Conjugate integrals with l factors:
///
/// ∫_{φ₁ˡ(T)}^{φ₁ˡ(T+U)} ∏_{k<l} |ζ(½+iφ₁ᵏ(u))|² du  versus
/// (φ₁²ˡ(T+U) − φ₁²ˡ(T)) / (φ₁ˡ(T+U) − φ₁ˡ(T)) · ∫_T^{T+U} ∏_{k<l} |ζ(½+iφ₁ᵏ(t))|² dt.
pub fn conjugate_ratio(model: &LadderModel, t: f64, u: f64, l: usize, quad: &QuadratureConfig) -> Result<RatioRecord> {
    check_window(t, u)?;
    conjugate_unchecked("conjugate", model, t, u, l, quad)
}

fn conjugate_unchecked(label: &str, model: &LadderModel, t: f64, u: f64, l: usize, quad: &QuadratureConfig) -> Result<RatioRecord> {
    if l == 0 {
        return Err(Error::Inadmissible("l must be at least 1".into()));
    }
    model.iterate(t + u, 2 * l)?;
    let lhs = shifted_product(model, t, u, l, l, quad)?;
    let base = product_integral(model, t, t + u, l, quad)?;
    let coef = image_length(model, t, u, 2 * l)? / image_length(model, t, u, l)?;
    Ok(RatioRecord::from_sides(
        label,
        t,
        u,
        l,
        2 * l - 1,
        lhs.value,
        coef * base.value,
        rel_err(&lhs),
        rel_err(&base),
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroGapResult {
    pub pair: ZeroPair,
    pub record: RatioRecord,
    /// The change-of-variables identity on the same window, n = 2l − 1.
    pub identity: RatioRecord,
}

/// Conjugate ratio on the window between two consecutive zeros of Z at or
/// after `gamma_seed`.
pub fn zero_gap_experiment(model: &LadderModel, gamma_seed: f64, l: usize, quad: &QuadratureConfig) -> Result<ZeroGapResult> {
    let pair = find_zero_pair(gamma_seed, &ZeroScan::default())?;
    let (t, u) = (pair.gamma, pair.gap());
    check_window(t, u)?;
    let record = conjugate_unchecked("zero-gap", model, t, u, l, quad)?;
    let identity = verify_identity(model, t, u, 2 * l - 1, l, quad)?;
    Ok(ZeroGapResult { pair, record, identity })
}

/// Weight g_a = U / (φ₁ᵃ(T+U) − φ₁ᵃ(T)).
fn g_weight(model: &LadderModel, t: f64, u: f64, a: usize) -> Result<f64> {
    Ok(u / image_length(model, t, u, a)?)
}

/// Factorization of the (n+1)-fold product mean into the means of the parts:
///
/// g_{n+1}·(1/U)∫_T^{T+U} ∏_{k≤n}  versus  ∏_parts g_a·(1/U)∫_T^{T+U} ∏_{k<a}.
///
/// `partition` must split n+1 into at least two positive parts.
pub fn factorization_ratio(model: &LadderModel, t: f64, u: f64, n: usize, partition: &[usize], quad: &QuadratureConfig) -> Result<RatioRecord> {
    let invalid = || Error::InvalidPartition {
        parts: partition.to_vec(),
        total: n + 1,
    };
    if partition.iter().sum::<usize>() != n + 1 || partition.iter().any(|&a| a == 0 || a > n) {
        return Err(invalid());
    }
    check_window(t, u)?;
    let mut parts = partition.to_vec();
    parts.sort_unstable();
    let full = product_integral(model, t, t + u, n + 1, quad)?;
    let lhs = g_weight(model, t, u, n + 1)? * full.value / u;
    let mut rhs = 1.0;
    let mut rel_r = 0.0;
    let mut cache: Vec<(usize, f64, f64)> = Vec::new();
    for &a in &parts {
        let (mean, rel) = match cache.iter().find(|c| c.0 == a) {
            Some(&(_, m, r)) => (m, r),
            None => {
                let q = product_integral(model, t, t + u, a, quad)?;
                let m = g_weight(model, t, u, a)? * q.value / u;
                cache.push((a, m, rel_err(&q)));
                (m, rel_err(&q))
            }
        };
        rhs *= mean;
        rel_r += rel;
    }
    Ok(RatioRecord::from_sides(
        "factorization",
        t,
        u,
        parts.len(),
        n,
        lhs,
        rhs,
        rel_err(&full),
        rel_r,
    ))
}

/// Records for each step of the chain that turns the exact identity into
/// the conjugate relation:
///
/// * `chain-shift`: ∫_T^{T+U} ∏_{k≤n} ~ lnˡT · ∫_{φ₁ˡ(T)}^{φ₁ˡ(T+U)} ∏_{k≤n−l}
///   (l = n+1 leaves an empty product, so the right side is a length);
/// * `chain-moment`: ∫_T^{T+U} ∏_{k≤n} ~ (φ₁ⁿ⁺¹(T+U) − φ₁ⁿ⁺¹(T))·lnⁿ⁺¹T;
/// * `chain-split`: (φ₁ⁿ⁺¹(T+U) − φ₁ⁿ⁺¹(T))·∫_T^{T+U} ∏_{k≤n} ~
///   ∫_{φ₁ˡ} ∏_{k≤n−l} · ∫_{φ₁ⁿ⁺¹⁻ˡ} ∏_{k<l};
/// * `chain-square` (only when n = 2l − 1): ∫_{φ₁ˡ} ∏_{k<l} ~ (φ₁²ˡ(T+U) − φ₁²ˡ(T))·lnˡT.
pub fn proof_chain_check(model: &LadderModel, t: f64, u: f64, n: usize, l: usize, quad: &QuadratureConfig) -> Result<Vec<RatioRecord>> {
    if l == 0 || l > n + 1 {
        return Err(Error::Inadmissible(format!("need 1 <= l <= n + 1, got l = {l}, n = {n}")));
    }
    check_window(t, u)?;
    let ln_t = t.ln();
    let full = product_integral(model, t, t + u, n + 1, quad)?;
    let shifted = shifted_product(model, t, u, l, n + 1 - l, quad)?;
    let len_n1 = image_length(model, t, u, n + 1)?;
    let mut out = vec![
        RatioRecord::from_sides(
            "chain-shift",
            t,
            u,
            l,
            n,
            full.value,
            ln_t.powi(l as i32) * shifted.value,
            rel_err(&full),
            rel_err(&shifted),
        ),
        RatioRecord::from_sides(
            "chain-moment",
            t,
            u,
            l,
            n,
            full.value,
            len_n1 * ln_t.powi(n as i32 + 1),
            rel_err(&full),
            0.0,
        ),
    ];
    if l <= n {
        let other = shifted_product(model, t, u, n + 1 - l, l, quad)?;
        out.push(RatioRecord::from_sides(
            "chain-split",
            t,
            u,
            l,
            n,
            len_n1 * full.value,
            shifted.value * other.value,
            rel_err(&full),
            rel_err(&shifted) + rel_err(&other),
        ));
    }
    if n + 1 == 2 * l {
        let lhs = shifted_product(model, t, u, l, l, quad)?;
        out.push(RatioRecord::from_sides(
            "chain-square",
            t,
            u,
            l,
            n,
            lhs.value,
            image_length(model, t, u, 2 * l)? * ln_t.powi(l as i32),
            rel_err(&lhs),
            0.0,
        ));
    }
    Ok(out)
}

/// Values of the free constant A tabulated in the per-level column.
pub const RH_A_VALUES: [f64; 3] = [0.5, 1.0, 2.0];

/// One level k of the conditional gap table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RhGapRow {
    pub t: f64,
    pub u: f64,
    pub k: usize,
    /// φ₁ᵏ(T+U) − φ₁ᵏ(T).
    pub gap: f64,
    /// U·T^{1/√(ln ln T)}.
    pub envelope: f64,
    /// (U/lnᵏT)·T^{2kA/ln ln T} for each entry of [`RH_A_VALUES`].
    pub level: Vec<f64>,
}

impl RhGapRow {
    /// Rows as ratio records: the envelope and one record per value of A.
    pub fn records(&self) -> Vec<RatioRecord> {
        let mut out = vec![RatioRecord::new(
            "rh-envelope",
            self.t,
            self.u,
            self.k,
            0,
            self.gap,
            self.envelope,
            0.0,
        )];
        for (a, &v) in RH_A_VALUES.iter().zip(&self.level) {
            out.push(RatioRecord::new(
                &format!("rh-level-a{a}"),
                self.t,
                self.u,
                self.k,
                0,
                self.gap,
                v,
                0.0,
            ));
        }
        out
    }
}

/// Iterated gaps φ₁ᵏ(T+U) − φ₁ᵏ(T), k = 1..=levels, next to the envelopes
/// that hold under the Riemann hypothesis. `u_exponent_slack` is ε₀ in the
/// admissible range U ≤ T^{1/3 − ε₀}.
pub fn rh_gap_table(model: &LadderModel, ts: &[f64], u: f64, levels: usize, u_exponent_slack: f64) -> Result<Vec<RhGapRow>> {
    let mut rows = Vec::new();
    for &t in ts {
        let limit = t.powf(1.0 / 3.0 - u_exponent_slack);
        if !(u > 0.0 && u <= limit) {
            return Err(Error::Inadmissible(format!(
                "U = {u} outside (0, T^(1/3 - {u_exponent_slack})] = (0, {limit}] for T = {t}"
            )));
        }
        model.iterate(t + u, levels)?;
        let lnln = t.ln().ln();
        for k in 1..=levels {
            let level = RH_A_VALUES
                .iter()
                .map(|&a| u / t.ln().powi(k as i32) * t.powf(2.0 * k as f64 * a / lnln))
                .collect();
            rows.push(RhGapRow {
                t,
                u,
                k,
                gap: image_length(model, t, u, k)?,
                envelope: u * t.powf(1.0 / lnln.sqrt()),
                level,
            });
        }
    }
    Ok(rows)
}
