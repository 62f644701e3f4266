//! The ladder function φ₁ and its iterates.
//!
//! φ₁(t) is the solution y of
//!
//! ```text
//! y·ln y + (c − ln 2π)·y = ∫₀^t Z(u)² du
//! ```
//!
//! so that dφ₁/dt = Z(t)² / (ln φ₁(t) + 1 + c − ln 2π). The right-hand
//! side comes from a checkpoint table ([`HlTable`]); between checkpoints it
//! is completed by a short quadrature, which keeps φ₁ consistent with its
//! derivative to quadrature accuracy.

mod cache;
mod set;
mod table;

pub use cache::{cache_key, cache_path, resolve_cache_dir, CacheStatus, CACHE_DIR_ENV, LADDER_CACHE_VERSION};
pub use set::{
    check_set_properties, max_window, CheckKind, DisconnectedSet, Segment, SetCheck, SetPropertyReport,
    MACROSCOPIC_TOLERANCE,
};
pub use table::HlTable;
pub(crate) use set::check_window;

use log::debug;
use serde::{Deserialize, Serialize};

use crate::critical_line::z_sq_fast;
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::interp::Pchip;

/// Euler's constant c.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const LN_TWO_PI: f64 = 1.837_877_066_409_345_5;

/// Lower cutoff T₀ for the ladder's working range.
pub const T0: f64 = 100.0;

/// Constants appearing in the bounds on the disconnected sets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticConstants {
    pub one_minus_c: f64,
    /// Coefficient of T/ln T in the lower bound on gaps.
    pub gap_lower: f64,
    /// Coefficient of π(T) in the lower bound on segment distances.
    pub dist_lower: f64,
}

impl Default for AsymptoticConstants {
    fn default() -> Self {
        Self {
            one_minus_c: 1.0 - EULER_GAMMA,
            gap_lower: 0.18,
            dist_lower: 0.17,
        }
    }
}

impl AsymptoticConstants {
    /// Coefficient 1/(2n+5) of T/ln T bounding component lengths of Δ(n+1).
    pub fn len_upper_coeff(n: usize) -> f64 {
        1.0 / (2 * n + 5) as f64
    }
}

/// F(y) = y ln y + (c − ln 2π) y.
pub fn defining_f(y: f64) -> f64 {
    y * y.ln() + (EULER_GAMMA - LN_TWO_PI) * y
}

/// F'(y) = ln y + 1 + c − ln 2π.
pub fn defining_f_prime(y: f64) -> f64 {
    y.ln() + 1.0 + EULER_GAMMA - LN_TWO_PI
}

/// Zero of F; every positive right-hand side has its solution above it.
fn f_root() -> f64 {
    (LN_TWO_PI - EULER_GAMMA).exp()
}

/// Solves F(y) = target by Newton's method from `guess`, falling back to
/// bisection.
pub fn invert_defining(target: f64, guess: f64, rel_tol: f64) -> Result<f64> {
    if !(target > 0.0) || !target.is_finite() {
        return Err(Error::NewtonDivergence { target });
    }
    let lo_bound = f_root();
    let mut y = if guess > lo_bound && guess.is_finite() {
        guess
    } else {
        asymptotic_guess_from_target(target)
    };
    for _ in 0..60 {
        let r = defining_f(y) - target;
        let dy = r / defining_f_prime(y);
        let next = y - dy;
        if !(next > lo_bound) || !next.is_finite() {
            break;
        }
        y = next;
        if dy.abs() <= 1e-15 * y {
            let res = (defining_f(y) - target).abs();
            if res <= rel_tol * target {
                return Ok(y);
            }
            break;
        }
    }
    bisect_defining(target, rel_tol)
}

fn asymptotic_guess_from_target(target: f64) -> f64 {
    // y ln y ≈ target  ⇒  y ≈ target / ln(target)
    let l = target.max(10.0).ln();
    (target / (l - (LN_TWO_PI - EULER_GAMMA))).max(f_root() * 1.5)
}

fn bisect_defining(target: f64, rel_tol: f64) -> Result<f64> {
    let mut lo = f_root();
    let mut hi = lo * 2.0;
    while defining_f(hi) < target {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::NewtonDivergence { target });
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if defining_f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            break;
        }
    }
    let y = 0.5 * (lo + hi);
    if (defining_f(y) - target).abs() <= rel_tol.max(1e-14) * target {
        Ok(y)
    } else {
        Err(Error::NewtonDivergence { target })
    }
}

/// Construction settings; the cache key is derived from all but `exec`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LadderConfig {
    pub t_min: f64,
    pub t_max: f64,
    /// Checkpoint spacing of the cumulative integral.
    pub step: f64,
    /// Size of the geometric summary grid.
    pub summary_nodes: usize,
    /// Relative residual accepted for |F(φ₁) − ∫Z²|.
    pub newton_tol: f64,
    /// ε in the (1−ε)t ≤ φ₁(t) check.
    pub epsilon: f64,
    /// Number of iterations of t_max that must stay in range.
    pub depth_check: usize,
    #[serde(skip)]
    pub exec: Execution,
}

impl Default for LadderConfig {
    fn default() -> Self {
        Self {
            t_min: T0,
            t_max: 1.0e4,
            step: 1.0,
            summary_nodes: 10_000,
            newton_tol: 1e-12,
            epsilon: 0.1,
            depth_check: 0,
            exec: Execution::Parallel,
        }
    }
}

impl LadderConfig {
    pub fn new(t_min: f64, t_max: f64) -> Self {
        Self {
            t_min,
            t_max,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_min >= T0) || !(self.t_max > self.t_min) || !self.t_max.is_finite() {
            return Err(Error::Inadmissible(format!(
                "ladder range [{}, {}] (requires {T0} <= t_min < t_max)",
                self.t_min, self.t_max
            )));
        }
        if self.summary_nodes < 2 {
            return Err(Error::Inadmissible("summary grid needs two nodes".into()));
        }
        Ok(())
    }
}

/// Tabulated ladder over [t_min, t_max]; immutable once built.
#[derive(Debug, Clone)]
pub struct LadderModel {
    config: LadderConfig,
    table: HlTable,
    grid: Vec<f64>,
    phi1: Vec<f64>,
    hl_checkpoints: Vec<f64>,
    coarse: Pchip,
    calibration_residual: f64,
}

impl LadderModel {
    /// Builds the model from scratch (no cache).
    pub fn build(config: LadderConfig) -> Result<Self> {
        config.validate()?;
        let start = std::time::Instant::now();
        let table = HlTable::build(config.t_min, config.t_max, config.step, config.exec)?;
        debug!(
            "checkpoint table over [{}, {}] built in {:?}",
            config.t_min,
            config.t_max,
            start.elapsed()
        );
        Self::from_table(config, table)
    }

    pub(crate) fn from_table(config: LadderConfig, table: HlTable) -> Result<Self> {
        let n = config.summary_nodes;
        let ratio = (config.t_max / config.t_min).powf(1.0 / (n - 1) as f64);
        let mut grid: Vec<f64> = (0..n).map(|i| config.t_min * ratio.powi(i as i32)).collect();
        grid[0] = config.t_min;
        grid[n - 1] = config.t_max;
        let hl = table.values(&grid, config.exec)?;
        let phi = exec::map_range(config.exec, n, |i| {
            invert_defining(hl[i], asymptotic_guess(grid[i]), config.newton_tol)
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
        let calibration_residual = hl
            .iter()
            .zip(&phi)
            .map(|(&h, &y)| (defining_f(y) - h).abs() / h)
            .fold(0.0, f64::max);
        let coarse = Pchip::new(grid.clone(), phi.clone())?;
        let model = Self {
            config,
            table,
            grid,
            phi1: phi,
            hl_checkpoints: hl,
            coarse,
            calibration_residual,
        };
        if config.depth_check > 0 {
            model.iterate(config.t_max, config.depth_check)?;
        }
        Ok(model)
    }

    pub fn config(&self) -> &LadderConfig {
        &self.config
    }

    pub fn t_min(&self) -> f64 {
        self.config.t_min
    }

    pub fn t_max(&self) -> f64 {
        self.config.t_max
    }

    pub fn euler_c(&self) -> f64 {
        EULER_GAMMA
    }

    pub fn table(&self) -> &HlTable {
        &self.table
    }

    /// Geometric summary grid with φ₁ and ∫₀^t Z² at each node.
    pub fn grid(&self) -> (&[f64], &[f64], &[f64]) {
        (&self.grid, &self.phi1, &self.hl_checkpoints)
    }

    /// Largest relative residual |F(φ₁) − ∫Z²| / ∫Z² on the summary grid.
    pub fn calibration_residual(&self) -> f64 {
        self.calibration_residual
    }

    pub fn in_range(&self, t: f64) -> bool {
        t >= self.config.t_min && t <= self.config.t_max
    }

    fn check_range(&self, t: f64) -> Result<()> {
        if self.in_range(t) {
            Ok(())
        } else {
            Err(Error::LadderRange {
                t,
                t_min: self.config.t_min,
                t_max: self.config.t_max,
            })
        }
    }

    /// ∫₀^t Z(u)² du.
    pub fn hl_integral(&self, t: f64) -> Result<f64> {
        self.table.value(t)
    }

    /// φ₁(t).
    pub fn value(&self, t: f64) -> Result<f64> {
        self.check_range(t)?;
        let hl = self.table.value(t)?;
        invert_defining(hl, self.coarse_guess(t), self.config.newton_tol)
    }

    /// φ₁ at many points (same values as [`Self::value`] up to rounding in
    /// the local quadrature).
    pub fn values(&self, ts: &[f64]) -> Result<Vec<f64>> {
        if let Some(&bad) = ts.iter().find(|&&t| !self.in_range(t)) {
            self.check_range(bad)?;
        }
        let hl = self.table.values(ts, self.config.exec)?;
        ts.iter()
            .zip(hl)
            .map(|(&t, h)| invert_defining(h, self.coarse_guess(t), self.config.newton_tol))
            .collect()
    }

    /// Monotone cubic interpolation of the summary grid: cheap, smooth, and
    /// only accurate to the grid's resolution.
    pub fn value_coarse(&self, t: f64) -> Result<f64> {
        self.check_range(t)?;
        Ok(self.coarse.eval(t).expect("in range"))
    }

    fn coarse_guess(&self, t: f64) -> f64 {
        self.coarse.eval(t).unwrap_or_else(|| asymptotic_guess(t))
    }

    /// φ₁ᵏ(t); k = 0 returns t.
    pub fn iterate(&self, t: f64, k: usize) -> Result<f64> {
        let mut x = t;
        for depth in 1..=k {
            if !self.in_range(x) {
                return Err(Error::RangeEscape { depth, value: x });
            }
            x = self.value(x)?;
        }
        Ok(x)
    }

    /// φ₁ᵏ at many points.
    pub fn iterates(&self, ts: &[f64], k: usize) -> Result<Vec<f64>> {
        let mut xs = ts.to_vec();
        for depth in 1..=k {
            if let Some(&bad) = xs.iter().find(|&&x| !self.in_range(x)) {
                return Err(Error::RangeEscape { depth, value: bad });
            }
            xs = self.values(&xs)?;
        }
        Ok(xs)
    }

    /// All iterates φ₁⁰..φ₁ᵏ at many points: result[j][i] = φ₁ʲ(ts[i]).
    pub fn iterate_chain(&self, ts: &[f64], k: usize) -> Result<Vec<Vec<f64>>> {
        let mut chain = Vec::with_capacity(k + 1);
        chain.push(ts.to_vec());
        for depth in 1..=k {
            let prev = &chain[depth - 1];
            if let Some(&bad) = prev.iter().find(|&&x| !self.in_range(x)) {
                return Err(Error::RangeEscape { depth, value: bad });
            }
            let next = self.values(prev)?;
            chain.push(next);
        }
        Ok(chain)
    }

    /// dφ₁/dt = Z(t)² / F'(φ₁(t)).
    pub fn derivative(&self, t: f64) -> Result<f64> {
        let y = self.value(t)?;
        Ok(z_sq_fast(t) / defining_f_prime(y))
    }

    /// Largest relative residual of the defining equation at the given points.
    pub fn max_residual(&self, ts: &[f64]) -> Result<f64> {
        let hl = self.table.values(ts, self.config.exec)?;
        let phi = self.values(ts)?;
        Ok(hl
            .iter()
            .zip(&phi)
            .map(|(&h, &y)| (defining_f(y) - h).abs() / h)
            .fold(0.0, f64::max))
    }

    /// (t − φ₁(t))·ln t / ((1 − c)·t).
    pub fn deficit_ratio(&self, t: f64) -> Result<f64> {
        let y = self.value(t)?;
        Ok((t - y) * t.ln() / ((1.0 - EULER_GAMMA) * t))
    }
}

/// Deficit law t − φ₁(t) ≈ (1 − c)·t/ln t as a starting point.
fn asymptotic_guess(t: f64) -> f64 {
    let l = t.max(20.0).ln();
    (t - (1.0 - EULER_GAMMA) * t / (l - 0.26)).max(f_root() * 1.5)
}
