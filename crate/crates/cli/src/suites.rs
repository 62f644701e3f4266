//! Verification suites run by `ladder verify`.

use std::fmt;
use std::str::FromStr;

use anyhow::{bail, Result};
use clap::ValueEnum;
use ladder_core::critical_line::ZERO_RESIDUAL;
use ladder_core::formulas::{
    conjugate_ratio, external_mean_value, factorization_ratio, geometric_mean_report, midpoint_taus,
    proof_chain_check, rh_gap_table, trend_non_increasing, verify_identity, verify_identity_all,
    zero_gap_experiment, CheckKind, CheckOutcome, MeanValueSide, RatioRecord,
};
use ladder_core::ladder::{check_set_properties, max_window, DisconnectedSet, LadderModel};
use ladder_core::primes::{PrimeCounter, DEFAULT_LIMIT};
use ladder_core::quadrature::QuadratureConfig;
use ladder_core::report::ExperimentReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Identity,
    Conjugate,
    Factorization,
    MeanValues,
    GeoMeans,
    ProofChain,
    SetProperties,
    RhTable,
    ZeroGap,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Identity => "identity",
            Suite::Conjugate => "conjugate",
            Suite::Factorization => "factorization",
            Suite::MeanValues => "mean-values",
            Suite::GeoMeans => "geo-means",
            Suite::ProofChain => "proof-chain",
            Suite::SetProperties => "set-properties",
            Suite::RhTable => "rh-table",
            Suite::ZeroGap => "zero-gap",
        }
    }

    pub fn default_ts(self) -> Vec<f64> {
        match self {
            Suite::Identity => vec![1e4, 1e5],
            Suite::Conjugate | Suite::ProofChain | Suite::Factorization => vec![1e4, 1e5, 1e6],
            Suite::MeanValues | Suite::GeoMeans | Suite::SetProperties => vec![1e5],
            Suite::RhTable => vec![1e6],
            Suite::ZeroGap => vec![1e4],
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        <Suite as ValueEnum>::from_str(s, false)
    }
}

/// How U is chosen from T when not given explicitly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum UPolicy {
    /// T / ln²T
    Max,
    /// √T, capped at T / ln²T
    Sqrt,
    /// 1
    Unit,
}

impl FromStr for UPolicy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        <UPolicy as ValueEnum>::from_str(s, false)
    }
}

impl UPolicy {
    pub fn window(self, t: f64) -> f64 {
        match self {
            UPolicy::Max => max_window(t),
            UPolicy::Sqrt => t.sqrt().min(max_window(t)),
            UPolicy::Unit => 1.0,
        }
    }
}

/// Resolved parameters of one suite run.
#[derive(Debug, Clone)]
pub struct SuiteParams {
    pub ts: Vec<f64>,
    pub u: Option<f64>,
    pub policy: UPolicy,
    pub l: Option<usize>,
    pub n: Option<usize>,
    pub epsilon: f64,
    pub levels: usize,
    pub deep: bool,
    pub quad: QuadratureConfig,
}

impl SuiteParams {
    fn window(&self, t: f64) -> f64 {
        self.u.unwrap_or_else(|| self.policy.window(t))
    }

    /// Largest ordinate any suite run touches.
    pub fn reach(&self, suite: Suite) -> f64 {
        let top = self.ts.iter().copied().fold(0.0, f64::max);
        match suite {
            Suite::ZeroGap => top + 50.0,
            Suite::RhTable => top + self.u.unwrap_or(top.powf(0.25)),
            _ => top + self.window(top),
        }
    }
}

const DESK_BAND_SINGLE: (f64, f64) = (0.7, 1.3);
const DESK_BAND_MULTI: (f64, f64) = (0.5, 2.0);
const IDENTITY_GATE: f64 = 1e-5;

fn band(l: usize) -> (f64, f64) {
    if l >= 3 {
        DESK_BAND_MULTI
    } else {
        DESK_BAND_SINGLE
    }
}

fn band_check(report: &mut ExperimentReport, family: &str, r: &RatioRecord, (lo, hi): (f64, f64)) {
    report.check(CheckOutcome::new(
        family,
        CheckKind::Soft,
        r.within(lo, hi),
        format!("T={} l={} n={} ratio={:.6} in [{lo}, {hi}]", r.t, r.l, r.n, r.ratio),
    ));
}

fn trend_check(report: &mut ExperimentReport, family: &str, records: &[RatioRecord]) {
    if records.len() < 2 {
        return;
    }
    let devs: Vec<String> = records.iter().map(|r| format!("{:.3e}", r.deviation())).collect();
    report.check(CheckOutcome::new(
        family,
        CheckKind::Soft,
        trend_non_increasing(records),
        format!("|ratio-1| over T: {}", devs.join(", ")),
    ));
}

pub fn run(suite: Suite, model: &LadderModel, p: &SuiteParams, report: &mut ExperimentReport) -> Result<()> {
    match suite {
        Suite::Identity => identity(model, p, report),
        Suite::Conjugate => conjugate(model, p, report),
        Suite::Factorization => factorization(model, p, report),
        Suite::MeanValues => mean_values(model, p, report),
        Suite::GeoMeans => geo_means(model, p, report),
        Suite::ProofChain => proof_chain(model, p, report),
        Suite::SetProperties => set_properties(model, p, report),
        Suite::RhTable => rh_table(model, p, report),
        Suite::ZeroGap => zero_gap(model, p, report),
    }
}

fn identity(model: &LadderModel, p: &SuiteParams, report: &mut ExperimentReport) -> Result<()> {
    for &t in &p.ts {
        let u = p.window(t);
        let records = match (p.n, p.l) {
            (Some(n), Some(l)) => vec![verify_identity(model, t, u, n, l, &p.quad)?],
            (n, _) => {
                let mut v = Vec::new();
                for n in n.map_or(1..=4, |n| n..=n) {
                    v.extend(verify_identity_all(model, t, u, n, &p.quad)?);
                }
                v
            }
        };
        for r in records {
            report.check(CheckOutcome::new(
                "identity",
                CheckKind::Hard,
                r.deviation() <= IDENTITY_GATE,
                format!("T={t} n={} l={} |ratio-1|={:.3e}", r.n, r.l, r.deviation()),
            ));
            report.records.push(r);
        }
    }
    Ok(())
}

fn conjugate(model: &LadderModel, p: &SuiteParams, report: &mut ExperimentReport) -> Result<()> {
    for l in p.l.map_or(1..=3, |l| l..=l) {
        let mut family = Vec::new();
        for &t in &p.ts {
            let r = conjugate_ratio(model, t, p.window(t), l, &p.quad)?;
            band_check(report, &format!("conjugate-l{l}"), &r, band(l));
            family.push(r);
        }
        trend_check(report, &format!("conjugate-l{l}-trend"), &family);
        report.records.extend(family);
    }
    Ok(())
}

fn factorization(model: &LadderModel, p: &SuiteParams, report: &mut ExperimentReport) -> Result<()> {
    let partitions: Vec<Vec<usize>> = match p.n {
        Some(1) => vec![vec![1, 1]],
        Some(2) => vec![vec![1, 2], vec![1, 1, 1]],
        Some(n) => vec![vec![1; n + 1]],
        None => vec![vec![1, 1], vec![1, 2], vec![1, 1, 1]],
    };
    for parts in partitions {
        let n = parts.iter().sum::<usize>() - 1;
        let name: Vec<String> = parts.iter().map(usize::to_string).collect();
        let family_name = format!("factorization-{}", name.join("+"));
        let mut family = Vec::new();
        for &t in &p.ts {
            let r = factorization_ratio(model, t, p.window(t), n, &parts, &p.quad)?;
            band_check(report, &family_name, &r, DESK_BAND_MULTI);
            family.push(r);
        }
        trend_check(report, &format!("{family_name}-trend"), &family);
        report.records.extend(family);
    }
    Ok(())
}

fn mean_values(model: &LadderModel, p: &SuiteParams, report: &mut ExperimentReport) -> Result<()> {
    for &t in &p.ts {
        let u = p.window(t);
        for l in p.l.map_or(1..=2, |l| l..=l) {
            for side in [MeanValueSide::Far, MeanValueSide::Near] {
                let w = external_mean_value(model, t, u, l, side, &p.quad)?;
                let replay = w.replay()?;
                let label = match side {
                    MeanValueSide::Far => "mean-value-far",
                    MeanValueSide::Near => "mean-value-near",
                };
                report.check(CheckOutcome::new(
                    label,
                    CheckKind::Hard,
                    w.all_inside() && w.residual <= 1e-9,
                    format!("T={t} l={l} t_l={} residual={:.3e}", w.t_l, w.residual),
                ));
                report.records.push(RatioRecord::new(label, t, u, l, 2 * l - 1, w.mean, replay, w.residual));
                report.witnesses.push(w);
            }
        }
    }
    Ok(())
}

fn geo_means(model: &LadderModel, p: &SuiteParams, report: &mut ExperimentReport) -> Result<()> {
    for &t in &p.ts {
        let u = p.window(t);
        for l in p.l.map_or(1..=4, |l| l..=l) {
            // Witnessed τ's for small l, host-interval midpoints otherwise.
            let (taus, mode) = if l <= 2 {
                let near = external_mean_value(model, t, u, l, MeanValueSide::Near, &p.quad)?;
                let far = external_mean_value(model, t, u, l, MeanValueSide::Far, &p.quad)?;
                let taus: Vec<f64> = near.taus.iter().chain(&far.taus).map(|h| h.tau).collect();
                (taus, "witness")
            } else {
                (midpoint_taus(model, t, u, l)?, "midpoint")
            };
            let g = geometric_mean_report(model, t, u, l, &taus, p.epsilon)?;
            report.check(CheckOutcome::new(
                "am-gm",
                CheckKind::Hard,
                g.min_am_gm_margin() >= -1e-12,
                format!("T={t} l={l} {} orderings, min margin {:.3e}", g.inequalities.len(), g.min_am_gm_margin()),
            ));
            report.check(CheckOutcome::new(
                "am-gm-conditional",
                if mode == "witness" { CheckKind::Soft } else { CheckKind::Report },
                g.conditional_all(),
                format!("T={t} l={l} ({mode}) eps={} G/Omega={:.4}", p.epsilon, g.ratio_mean() / g.omega),
            ));
            report
                .records
                .push(RatioRecord::new(&format!("geo-mean-{mode}"), t, u, l, 2 * l - 1, g.ratio_mean(), g.omega, 0.0));
            report.geo_means.push(g);
        }
    }
    Ok(())
}

fn proof_chain(model: &LadderModel, p: &SuiteParams, report: &mut ExperimentReport) -> Result<()> {
    let (n, l) = (p.n.unwrap_or(1), p.l.unwrap_or(1));
    let mut moment = Vec::new();
    let mut by_label: Vec<(String, Vec<RatioRecord>)> = Vec::new();
    for &t in &p.ts {
        let u = p.window(t);
        let base = proof_chain_check(model, t, u, 0, 1, &p.quad)?;
        let m = base.into_iter().find(|r| r.label == "chain-moment").expect("moment record");
        band_check(report, "chain-moment-n0", &m, (0.9, 1.1));
        moment.push(m);
        for r in proof_chain_check(model, t, u, n, l, &p.quad)? {
            band_check(report, &r.label, &r, if n >= 3 { DESK_BAND_MULTI } else { DESK_BAND_SINGLE });
            match by_label.iter_mut().find(|(k, _)| *k == r.label) {
                Some((_, v)) => v.push(r),
                None => by_label.push((r.label.clone(), vec![r])),
            }
        }
    }
    trend_check(report, "chain-moment-n0-trend", &moment);
    report.records.extend(moment);
    for (label, family) in by_label {
        trend_check(report, &format!("{label}-trend"), &family);
        report.records.extend(family);
    }
    Ok(())
}

fn set_properties(model: &LadderModel, p: &SuiteParams, report: &mut ExperimentReport) -> Result<()> {
    let top = p.ts.iter().copied().fold(0.0, f64::max);
    let counter = PrimeCounter::new((top.ceil() as u64 + 1).min(DEFAULT_LIMIT));
    for &t in &p.ts {
        let u = p.window(t);
        let n = p.n.unwrap_or(3);
        let set = DisconnectedSet::new(model, t, u, n)?;
        report.check(CheckOutcome::new(
            "set-order",
            CheckKind::Hard,
            set.is_ordered(),
            format!("T={t} n={n}: segments disjoint, right to left"),
        ));
        let props = check_set_properties(&set, &counter);
        for c in &props.checks {
            let kind = match c.kind {
                ladder_core::ladder::CheckKind::Bound => CheckKind::Hard,
                ladder_core::ladder::CheckKind::Asymptotic => CheckKind::Soft,
            };
            report.check(CheckOutcome::new(
                &format!("set-{}", c.name),
                kind,
                c.holds,
                format!("T={t} n={n} k={} value={:.6} bound={:.6}", c.k, c.value, c.bound),
            ));
            let (lhs, rhs) = match c.kind {
                ladder_core::ladder::CheckKind::Bound => (c.value, c.bound),
                ladder_core::ladder::CheckKind::Asymptotic => (c.value, 1.0),
            };
            report
                .records
                .push(RatioRecord::new(&format!("set-{}", c.name), t, u, c.k, n, lhs, rhs, 0.0));
        }
        report.set_properties.push(props);
    }
    Ok(())
}

fn rh_table(model: &LadderModel, p: &SuiteParams, report: &mut ExperimentReport) -> Result<()> {
    for &t in &p.ts {
        let windows = match p.u {
            Some(u) => vec![u],
            None => vec![1.0, t.powf(0.25)],
        };
        for u in windows {
            let rows = rh_gap_table(model, &[t], u, p.levels, 0.01)?;
            for row in &rows {
                report.records.extend(row.records());
            }
            report.check(CheckOutcome::new(
                "rh-table",
                CheckKind::Report,
                true,
                format!("T={t} U={u}: {} levels tabulated", rows.len()),
            ));
            report.rh_rows.extend(rows);
        }
    }
    Ok(())
}

fn zero_gap(model: &LadderModel, p: &SuiteParams, report: &mut ExperimentReport) -> Result<()> {
    let levels: Vec<usize> = match p.l {
        Some(l) => vec![l],
        None if p.deep => vec![1, 2, 3, 7],
        None => vec![1, 2, 3],
    };
    for &seed in &p.ts {
        for &l in &levels {
            let res = zero_gap_experiment(model, seed, l, &p.quad)?;
            let r = &res.record;
            report.check(CheckOutcome::new(
                "zero-gap",
                CheckKind::Hard,
                r.lhs > 0.0 && r.rhs > 0.0 && r.ratio.is_finite() && res.pair.refinement_residual <= ZERO_RESIDUAL,
                format!(
                    "gamma={} gap={:.6} l={l} ratio={:.6}",
                    res.pair.gamma,
                    res.pair.gap(),
                    r.ratio
                ),
            ));
            report.check(CheckOutcome::new(
                "zero-gap-identity",
                CheckKind::Hard,
                res.identity.deviation() <= IDENTITY_GATE,
                format!("l={l} |ratio-1|={:.3e}", res.identity.deviation()),
            ));
            report.records.push(res.record);
            report.records.push(res.identity);
        }
    }
    Ok(())
}

/// Fails early on obviously unusable parameters.
pub fn validate(suite: Suite, p: &SuiteParams) -> Result<()> {
    if p.ts.is_empty() {
        bail!("no T values given");
    }
    if let Some(&bad) = p.ts.iter().find(|&&t| !(t >= 100.0) || !t.is_finite()) {
        bail!("T = {bad} is below the ladder cutoff 100");
    }
    if matches!(suite, Suite::Identity) {
        if let (Some(n), Some(l)) = (p.n, p.l) {
            if l == 0 || l > n {
                bail!("identity needs 1 <= l <= n");
            }
        }
    }
    Ok(())
}
