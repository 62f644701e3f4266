//! Gauss–Legendre rules and an adaptive Gauss–Kronrod (7/15) integrator
//! that evaluates the integrand in batches.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{self, Execution};

/// Nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    /// Applies the rule to `f` on [a, b].
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut sum = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            sum += w * f(c + h * x);
        }
        sum * h
    }
}

const MAX_GL: usize = 32;

fn legendre_rule(m: usize) -> Rule {
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    let mf = m as f64;
    for i in 0..m.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (mf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=m {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let p = if m == 1 { x } else { p1 };
            let pm1 = if m == 1 { 1.0 } else { p0 };
            dp = mf * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    if m % 2 == 1 {
        nodes[m / 2] = 0.0;
    }
    Rule { nodes, weights }
}

/// Cached m-point Gauss–Legendre rule, 1 ≤ m ≤ 32.
pub fn gauss_legendre(m: usize) -> &'static Rule {
    static RULES: OnceLock<Vec<Rule>> = OnceLock::new();
    assert!((1..=MAX_GL).contains(&m), "unsupported rule size {m}");
    &RULES.get_or_init(|| (1..=MAX_GL).map(legendre_rule).collect())[m - 1]
}

/// Smallest Gauss–Legendre size that integrates a band-limited integrand of
/// angular frequency `omega` over a width `h` to about 1e-16 relative, from
/// the classical remainder 2^{2m+1}(m!)^4 / ((2m+1)((2m)!)^3) · f^{(2m)}.
pub fn points_for_band(omega: f64, h: f64) -> usize {
    static LN_CONST: OnceLock<Vec<f64>> = OnceLock::new();
    let consts = LN_CONST.get_or_init(|| {
        let ln_fact = |n: usize| (1..=n).map(|k| (k as f64).ln()).sum::<f64>();
        (0..=MAX_GL)
            .map(|m| {
                let mf = m as f64;
                (2.0 * mf + 1.0) * 2f64.ln() + 4.0 * ln_fact(m)
                    - (2.0 * mf + 1.0).ln()
                    - 3.0 * ln_fact(2 * m)
            })
            .collect()
    });
    let x = 0.5 * (omega * h).abs();
    if x == 0.0 {
        return 2;
    }
    let ln_x = x.ln();
    (2..=MAX_GL)
        .find(|&m| consts[m] + 2.0 * m as f64 * ln_x < -37.0)
        .unwrap_or(MAX_GL)
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Nodes of the 15-point Kronrod rule on [a, b], in ascending order.
fn kronrod_nodes(a: f64, b: f64, out: &mut Vec<f64>) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    for x in XGK.iter().take(7) {
        out.push(c - h * x);
    }
    out.push(c);
    for x in XGK.iter().take(7).rev() {
        out.push(c + h * x);
    }
}

/// (Kronrod value, QUADPACK-style error estimate) from the 15 samples.
fn kronrod_combine(a: f64, b: f64, f: &[f64]) -> (f64, f64) {
    let h = 0.5 * (b - a);
    let fc = f[7];
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = fc.abs() * WGK[7];
    for j in 0..7 {
        let (lo, hi) = (f[j], f[14 - j]);
        res_k += WGK[j] * (lo + hi);
        res_abs += WGK[j] * (lo.abs() + hi.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (lo + hi);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((f[j] - mean).abs() + (f[14 - j] - mean).abs());
    }
    let (res_k, res_g, res_abs, res_asc) = (res_k * h, res_g * h, res_abs * h.abs(), res_asc * h.abs());
    let mut err = (res_k - res_g).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (res_k, err)
}

/// Settings of the adaptive integrator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_panels: usize,
    /// Minimum panels per local zero spacing 2π/ln t.
    pub oscillation_density: f64,
    pub exec: Execution,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-6,
            abs_tol: 0.0,
            max_panels: 2_000_000,
            oscillation_density: 4.0,
            exec: Execution::Parallel,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol <= 1e-2) {
            return Err(Error::Inadmissible(format!(
                "rel_tol {} outside (0, 1e-2]",
                self.rel_tol
            )));
        }
        if !(self.oscillation_density >= 4.0) {
            return Err(Error::Inadmissible(format!(
                "oscillation_density {} below 4",
                self.oscillation_density
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub est_error: f64,
    pub panels: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

/// Splits [a, b] into panels no wider than `width_cap` at their left end.
pub fn initial_panels<W: Fn(f64) -> f64>(a: f64, b: f64, width_cap: W) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut t = a;
    while t < b {
        let w = width_cap(t).max((b - a) * 1e-9);
        let remaining = b - t;
        let next = if remaining <= w {
            b
        } else if remaining < 2.0 * w {
            t + 0.5 * remaining
        } else {
            t + w
        };
        out.push((t, next));
        t = next;
    }
    out
}

fn evaluate_panels<F>(f: &F, spans: &[(f64, f64)]) -> Vec<Panel>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let mut nodes = Vec::with_capacity(spans.len() * 15);
    for &(a, b) in spans {
        kronrod_nodes(a, b, &mut nodes);
    }
    let values = f(&nodes);
    spans
        .iter()
        .zip(values.chunks_exact(15))
        .map(|(&(a, b), fv)| {
            let (value, err) = kronrod_combine(a, b, fv);
            Panel { a, b, value, err }
        })
        .collect()
}

fn neumaier_sum<I: Iterator<Item = f64>>(it: I) -> f64 {
    let (mut s, mut c) = (0.0f64, 0.0f64);
    for x in it {
        let t = s + x;
        if s.abs() >= x.abs() {
            c += (s - t) + x;
        } else {
            c += (x - t) + s;
        }
        s = t;
    }
    s + c
}

/// Adaptive integration of a batch-evaluated integrand over [a, b].
///
/// `f` receives all nodes of one refinement round and returns the integrand
/// values in the same order. Panels start no wider than `width_cap(t)` and
/// are bisected while their error share exceeds the tolerance.
pub fn integrate_batched<F, W>(f: &F, a: f64, b: f64, width_cap: W, cfg: &QuadratureConfig) -> Result<QuadResult>
where
    F: Fn(&[f64]) -> Vec<f64>,
    W: Fn(f64) -> f64,
{
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            est_error: 0.0,
            panels: 0,
        });
    }
    if b < a {
        let r = integrate_batched(f, b, a, width_cap, cfg)?;
        return Ok(QuadResult {
            value: -r.value,
            ..r
        });
    }
    let mut panels = evaluate_panels(f, &initial_panels(a, b, width_cap));
    let length = b - a;
    loop {
        let total = neumaier_sum(panels.iter().map(|p| p.value));
        let err: f64 = panels.iter().map(|p| p.err).sum();
        let tol = cfg.abs_tol.max(cfg.rel_tol * total.abs());
        if err <= tol {
            return Ok(QuadResult {
                value: total,
                est_error: err,
                panels: panels.len(),
            });
        }
        let min_width = 1e-13 * b.abs().max(1.0);
        let split: Vec<bool> = panels
            .iter()
            .map(|p| p.err > tol * (p.b - p.a) / length && p.b - p.a > min_width)
            .collect();
        let n_split = split.iter().filter(|&&s| s).count();
        if n_split == 0 || panels.len() + n_split > cfg.max_panels {
            let worst = panels
                .iter()
                .max_by(|x, y| x.err.total_cmp(&y.err))
                .copied()
                .expect("nonempty");
            return Err(Error::Nonconvergence {
                a: worst.a,
                b: worst.b,
                est_error: err,
            });
        }
        let mut spans = Vec::with_capacity(2 * n_split);
        for (p, &s) in panels.iter().zip(&split) {
            if s {
                let m = 0.5 * (p.a + p.b);
                spans.push((p.a, m));
                spans.push((m, p.b));
            }
        }
        let mut fresh = evaluate_panels(f, &spans).into_iter();
        let mut next = Vec::with_capacity(panels.len() + n_split);
        for (p, s) in panels.into_iter().zip(split) {
            if s {
                next.push(fresh.next().expect("left half"));
                next.push(fresh.next().expect("right half"));
            } else {
                next.push(p);
            }
        }
        panels = next;
    }
}

/// Adaptive integration of a pointwise integrand; the batch is mapped with
/// the configured execution mode.
pub fn integrate<F, W>(f: F, a: f64, b: f64, width_cap: W, cfg: &QuadratureConfig) -> Result<QuadResult>
where
    F: Fn(f64) -> f64 + Sync + Send,
    W: Fn(f64) -> f64,
{
    let batch = |ts: &[f64]| exec::map(cfg.exec, ts, |&t| f(t));
    integrate_batched(&batch, a, b, width_cap, cfg)
}
