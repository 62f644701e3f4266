//! Disconnected sets Δ(n+1; T, U) built from ladder iterates of [T, T+U].

use serde::{Deserialize, Serialize};

use super::{AsymptoticConstants, LadderModel};
use crate::error::{Error, Result};
use crate::primes::{pi_approx, PrimeCounter};

/// [φ₁ᵏ(T), φ₁ᵏ(T+U)].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub lo: f64,
    pub hi: f64,
    pub k: usize,
}

impl Segment {
    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Largest admissible U for a given T.
pub fn max_window(t: f64) -> f64 {
    t / t.ln().powi(2)
}

pub(crate) fn check_window(t: f64, u: f64) -> Result<()> {
    if u > 0.0 && u <= max_window(t) * (1.0 + 1e-12) {
        Ok(())
    } else {
        Err(Error::Inadmissible(format!(
            "U = {u} outside (0, T/ln²T] for T = {t}"
        )))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisconnectedSet {
    pub t: f64,
    pub u: f64,
    pub n: usize,
    /// Segments for k = 0..=n+1, right to left.
    pub segments: Vec<Segment>,
}

impl DisconnectedSet {
    pub fn new(model: &LadderModel, t: f64, u: f64, n: usize) -> Result<Self> {
        check_window(t, u)?;
        let chain = model.iterate_chain(&[t, t + u], n + 1)?;
        let segments = chain
            .iter()
            .enumerate()
            .map(|(k, ends)| Segment {
                lo: ends[0],
                hi: ends[1],
                k,
            })
            .collect();
        Ok(Self { t, u, n, segments })
    }

    /// Segments with depth in `from..=to`.
    pub fn sub_union(&self, from: usize, to: usize) -> &[Segment] {
        let to = to.min(self.segments.len() - 1);
        if from > to {
            return &[];
        }
        &self.segments[from..=to]
    }

    /// Distance φ₁ᵏ(T) − φ₁ᵏ⁺¹(T+U) between segment k and segment k+1.
    pub fn gaps(&self) -> Vec<f64> {
        self.segments.windows(2).map(|w| w[0].lo - w[1].hi).collect()
    }

    /// Segments are nonempty and each lies strictly left of its predecessor.
    pub fn is_ordered(&self) -> bool {
        self.segments.iter().all(|s| s.lo < s.hi) && self.gaps().iter().all(|&g| g > 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CheckKind {
    /// Bound stated for all admissible parameters.
    Bound,
    /// Asymptotic relation; the reported ratio should approach 1.
    Asymptotic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetCheck {
    pub name: String,
    pub k: usize,
    pub kind: CheckKind,
    pub value: f64,
    pub bound: f64,
    /// Positive when the check holds.
    pub margin: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetPropertyReport {
    pub t: f64,
    pub u: f64,
    pub n: usize,
    pub pi_t: f64,
    pub pi_exact: bool,
    pub macroscopic: bool,
    pub checks: Vec<SetCheck>,
}

impl SetPropertyReport {
    pub fn bounds_hold(&self) -> bool {
        self.checks
            .iter()
            .filter(|c| c.kind == CheckKind::Bound)
            .all(|c| c.holds)
    }

    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn named<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a SetCheck> + 'a {
        self.checks.iter().filter(move |c| c.name == name)
    }
}

/// Relative tolerance used for the asymptotic ratios in the macroscopic domain.
pub const MACROSCOPIC_TOLERANCE: f64 = 0.1;

/// Checks component lengths, gaps and distances of `set`.
pub fn check_set_properties(set: &DisconnectedSet, counter: &PrimeCounter) -> SetPropertyReport {
    let consts = AsymptoticConstants::default();
    let (t, u, n) = (set.t, set.u, set.n);
    let scale = t / t.ln();
    let (pi_t, pi_exact) = match counter.pi_exact(t) {
        Ok(p) => (p as f64, true),
        Err(_) => (pi_approx(t), false),
    };
    let macroscopic = u >= t.powf(1.0 / 3.0) && u <= max_window(t) * (1.0 + 1e-12);
    let mut checks = Vec::new();
    let mut upper = |name: &str, k, kind, value: f64, bound: f64| {
        checks.push(SetCheck {
            name: name.into(),
            k,
            kind,
            value,
            bound,
            margin: bound - value,
            holds: value < bound,
        })
    };
    let len_bound = AsymptoticConstants::len_upper_coeff(n) * scale;
    for s in &set.segments[1..] {
        upper("length", s.k, CheckKind::Bound, s.length(), len_bound);
    }
    let gaps = set.gaps();
    let mut lower = |name: &str, k, kind, value: f64, bound: f64| {
        checks.push(SetCheck {
            name: name.into(),
            k,
            kind,
            value,
            bound,
            margin: value - bound,
            holds: value > bound,
        })
    };
    for (k, &g) in gaps.iter().enumerate() {
        lower("gap", k, CheckKind::Bound, g, consts.gap_lower * scale);
    }
    for (k, &g) in gaps.iter().enumerate() {
        lower("distance", k, CheckKind::Bound, g, consts.dist_lower * pi_t);
    }
    if macroscopic {
        let mut ratio = |name: &str, k, r: f64| {
            let dev = (r - 1.0).abs();
            checks.push(SetCheck {
                name: name.into(),
                k,
                kind: CheckKind::Asymptotic,
                value: r,
                bound: MACROSCOPIC_TOLERANCE,
                margin: MACROSCOPIC_TOLERANCE - dev,
                holds: dev <= MACROSCOPIC_TOLERANCE,
            })
        };
        for s in &set.segments[1..] {
            ratio("length/U", s.k, s.length() / u);
        }
        let deficit = consts.one_minus_c * scale;
        for (k, &g) in gaps.iter().enumerate() {
            ratio("gap/deficit", k, g / deficit);
        }
    }
    SetPropertyReport {
        t,
        u,
        n,
        pi_t,
        pi_exact,
        macroscopic,
        checks,
    }
}
