//! Checkpointed cumulative integral ∫₀^t Z(u)² du.
//!
//! Checkpoints sit on a uniform grid t_j = j·step. Each step is integrated
//! with a Gauss–Legendre rule sized from the local bandwidth of Z², which is
//! at most ln(t/2π); the value between checkpoints is completed by a short
//! rule from the nearest anchor.

use crate::critical_line::z_sq_fast;
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::quadrature::{gauss_legendre, points_for_band};

/// Upper bound on the angular frequency content of Z(t)² near t.
pub(crate) fn z_sq_band(t: f64) -> f64 {
    (t.max(20.0) / (2.0 * std::f64::consts::PI)).ln() + 2.0
}

fn gl_z_sq(a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let m = points_for_band(z_sq_band(a.max(b)), b - a);
    gauss_legendre(m).integrate(a, b, z_sq_fast)
}

#[derive(Debug, Clone, PartialEq)]
pub struct HlTable {
    step: f64,
    first: usize,
    values: Vec<f64>,
}

impl HlTable {
    /// Integrates Z² from 0 and keeps the checkpoints covering [t_lo, t_hi].
    pub fn build(t_lo: f64, t_hi: f64, step: f64, exec: Execution) -> Result<Self> {
        if !(step > 0.0 && step <= 2.0) || !(t_lo >= 0.0 && t_hi > t_lo) {
            return Err(Error::Inadmissible(format!(
                "checkpoint table over [{t_lo}, {t_hi}] with step {step}"
            )));
        }
        let first = ((t_lo / step).floor() as usize).saturating_sub(1);
        let last = (t_hi / step).ceil() as usize + 1;
        let increments = exec::map_range(exec, last, |j| {
            let a = j as f64 * step;
            gl_z_sq(a, a + step)
        });
        let mut values = Vec::with_capacity(last + 1 - first);
        let (mut sum, mut carry) = (0.0f64, 0.0f64);
        if first == 0 {
            values.push(0.0);
        }
        for (j, inc) in increments.into_iter().enumerate() {
            let t = sum + inc;
            if sum.abs() >= inc.abs() {
                carry += (sum - t) + inc;
            } else {
                carry += (inc - t) + sum;
            }
            sum = t;
            if j + 1 >= first {
                values.push(sum + carry);
            }
        }
        Ok(Self { step, first, values })
    }

    pub(crate) fn from_parts(step: f64, first: usize, values: Vec<f64>) -> Self {
        Self { step, first, values }
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub(crate) fn first(&self) -> usize {
        self.first
    }

    /// (t_j, I(t_j)) pairs stored in the table.
    pub fn checkpoints(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &v)| ((self.first + i) as f64 * self.step, v))
    }

    pub fn covers(&self, t: f64) -> bool {
        let lo = self.first as f64 * self.step;
        let hi = (self.first + self.values.len() - 1) as f64 * self.step;
        t >= lo && t <= hi
    }

    fn nearest(&self, t: f64) -> (f64, f64) {
        let j = (t / self.step).round() as usize;
        let i = j.clamp(self.first, self.first + self.values.len() - 1) - self.first;
        ((self.first + i) as f64 * self.step, self.values[i])
    }

    /// ∫₀^t Z² for t inside the table.
    pub fn value(&self, t: f64) -> Result<f64> {
        if !self.covers(t) {
            return Err(Error::Domain {
                what: "hl_integral",
                value: t,
                requirement: "t inside the checkpoint table",
            });
        }
        let (tj, ij) = self.nearest(t);
        Ok(ij + gl_z_sq(tj, t))
    }

    /// Values at many points. Points are visited in sorted order so each one
    /// is completed from the closer of its checkpoint and its predecessor.
    pub fn values(&self, ts: &[f64], exec: Execution) -> Result<Vec<f64>> {
        if let Some(&bad) = ts.iter().find(|&&t| !self.covers(t)) {
            return Err(Error::Domain {
                what: "hl_integral",
                value: bad,
                requirement: "t inside the checkpoint table",
            });
        }
        let mut order: Vec<usize> = (0..ts.len()).collect();
        order.sort_by(|&a, &b| ts[a].total_cmp(&ts[b]));
        const BLOCK: usize = 1024;
        let blocks: Vec<&[usize]> = order.chunks(BLOCK).collect();
        let done = exec::map(exec, &blocks, |block| {
            let mut out = Vec::with_capacity(block.len());
            let mut prev: Option<(f64, f64)> = None;
            for &idx in block.iter() {
                let t = ts[idx];
                let (tc, ic) = self.nearest(t);
                let (ta, ia) = match prev {
                    Some((tp, ip)) if (t - tp).abs() < (t - tc).abs() => (tp, ip),
                    _ => (tc, ic),
                };
                let v = ia + gl_z_sq(ta, t);
                prev = Some((t, v));
                out.push((idx, v));
            }
            out
        });
        let mut result = vec![0.0; ts.len()];
        for (idx, v) in done.into_iter().flatten() {
            result[idx] = v;
        }
        Ok(result)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate, QuadratureConfig};

    #[test]
    fn matches_adaptive_kronrod() {
        let table = HlTable::build(100.0, 400.0, 1.0, Execution::Parallel).unwrap();
        let cfg = QuadratureConfig {
            rel_tol: 1e-12,
            ..QuadratureConfig::default()
        };
        let direct = integrate(z_sq_fast, 0.0, 321.3, |_| 0.25, &cfg).unwrap();
        let v = table.value(321.3).unwrap();
        assert!((v - direct.value).abs() < 1e-9 * direct.value, "{v} vs {}", direct.value);
    }

    #[test]
    fn batch_agrees_with_single() {
        let table = HlTable::build(1000.0, 1100.0, 1.0, Execution::Parallel).unwrap();
        let ts: Vec<f64> = (0..200).map(|i| 1000.5 + 0.4937 * i as f64).rev().collect();
        let batch = table.values(&ts, Execution::Sequential).unwrap();
        for (t, b) in ts.iter().zip(&batch) {
            let s = table.value(*t).unwrap();
            assert!((s - b).abs() < 1e-11 * s);
        }
        assert!(table.value(5000.0).is_err());
    }
}
