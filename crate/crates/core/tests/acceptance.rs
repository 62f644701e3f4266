//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.
//!
//! The shared ladder table over [100, 1.01e6] is cached under
//! `LADDER_CACHE_DIR` if set, otherwise in cargo's target tmp directory.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use ladder_core::critical_line::{
    count_zeros, euler_maclaurin_zeta_sq, find_zeros, hardy_z, riemann_von_mangoldt, ZeroScan, ZERO_RESIDUAL,
};
use ladder_core::formulas::{
    conjugate_ratio, external_mean_value, factorization_ratio, geometric_mean_report, midpoint_taus,
    proof_chain_check, rh_gap_table, trend_non_increasing, verify_identity_all, zero_gap_experiment,
    MeanValueSide, RatioRecord, RH_A_VALUES,
};
use ladder_core::ladder::{
    check_set_properties, max_window, CheckKind, resolve_cache_dir, DisconnectedSet, LadderConfig, LadderModel,
};
use ladder_core::primes::PrimeCounter;
use ladder_core::quadrature::QuadratureConfig;
use ladder_core::Result;

const MODEL_T_MAX: f64 = 1.01e6;
const TRIPLE: [f64; 3] = [1e4, 1e5, 1e6];

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Self { passed, detail: detail.into() }
    }
}

fn devs(records: &[RatioRecord]) -> String {
    records
        .iter()
        .map(|r| format!("{:.4}", r.ratio))
        .collect::<Vec<_>>()
        .join(" → ")
}

fn positive_finite(r: &RatioRecord) -> bool {
    r.lhs > 0.0 && r.rhs > 0.0 && r.ratio.is_finite() && r.ratio > 0.0
}

fn oracle_equivalence() -> Result<Outcome> {
    let mut worst: (f64, f64) = (0.0, 0.0);
    for i in 0..50 {
        // Geometric spread with an irrational offset so no point sits on a zero.
        let t = 10.0 * 1000f64.powf(i as f64 / 49.0) + 0.318_309_886 * i as f64 / 49.0;
        let t = t.min(1e4);
        let z = hardy_z(t)?;
        let em = euler_maclaurin_zeta_sq(t)?;
        let rel = (z * z - em).abs() / em.max(f64::MIN_POSITIVE);
        if rel > worst.0 {
            worst = (rel, t);
        }
    }
    Ok(Outcome::new(
        worst.0 <= 1e-8,
        format!("50 points in [10, 1e4], max rel diff {:.2e} at t = {:.3}", worst.0, worst.1),
    ))
}

fn zero_scanner() -> Result<Outcome> {
    let scan = ZeroScan::default();
    let zeros = find_zeros(10.0, 1000.0, 100, &scan)?;
    let worst = zeros.iter().map(|z| z.1).fold(0.0, f64::max);
    let count = count_zeros(10.0, 1000.0)?;
    let estimate = riemann_von_mangoldt(1000.0);
    let ok = zeros.len() == 100 && worst <= ZERO_RESIDUAL && (count as f64 - estimate).abs() <= 2.0;
    Ok(Outcome::new(
        ok,
        format!(
            "{} zeros, max |Z| {:.1e}, gamma_100 = {:.10}; N(1000) = {count} vs {estimate:.2}",
            zeros.len(),
            worst,
            zeros.last().map_or(f64::NAN, |z| z.0)
        ),
    ))
}

fn defining_equation(model: &LadderModel) -> Result<Outcome> {
    let nodes: Vec<f64> = (0..10_000)
        .map(|i| 1e2 * 1e4f64.powf(i as f64 / 9_999.0))
        .collect();
    let residual = model.max_residual(&nodes)?;
    let r: Vec<f64> = TRIPLE.iter().map(|&t| model.deficit_ratio(t)).collect::<Result<_>>()?;
    let in_band = r.iter().all(|&x| (0.8..=1.25).contains(&x));
    let closer = (r[2] - 1.0).abs() < (r[0] - 1.0).abs();
    Ok(Outcome::new(
        residual <= 1e-10 && in_band && closer,
        format!(
            "max residual {residual:.2e}; deficit ratios {:.4} {:.4} {:.4}",
            r[0], r[1], r[2]
        ),
    ))
}

fn exact_identity(model: &LadderModel, quad: &QuadratureConfig) -> Result<Outcome> {
    let start = Instant::now();
    let mut worst = (0.0, 0.0, 0, 0);
    for t in [1e4, 1e5] {
        let u = max_window(t);
        for n in 1..=4 {
            for r in verify_identity_all(model, t, u, n, quad)? {
                if r.deviation() > worst.0 {
                    worst = (r.deviation(), t, r.n, r.l);
                }
            }
        }
    }
    let elapsed = start.elapsed();
    Ok(Outcome::new(
        worst.0 <= 1e-5 && elapsed < Duration::from_secs(600),
        format!(
            "max |ratio-1| {:.2e} (T={}, n={}, l={}), {:.0?}",
            worst.0, worst.1, worst.2, worst.3, elapsed
        ),
    ))
}

fn set_geometry(model: &LadderModel) -> Result<Outcome> {
    let counter = PrimeCounter::new(1_000_001);
    let t = 1e5;
    let u = max_window(t);
    let mut failing = Vec::new();
    for n in 0..=6 {
        let set = DisconnectedSet::new(model, t, u, n)?;
        let report = check_set_properties(&set, &counter);
        if !set.is_ordered() || !report.bounds_hold() {
            let worst = report
                .checks
                .iter()
                .filter(|c| c.kind == CheckKind::Bound && !c.holds)
                .map(|c| format!("{} k={} {:.1} vs {:.1}", c.name, c.k, c.value, c.bound))
                .collect::<Vec<_>>();
            failing.push(format!("n={n}: {}", worst.join(", ")));
        }
    }
    let t_macro: f64 = 1e6;
    let set = DisconnectedSet::new(model, t_macro, t_macro.powf(0.4), 0)?;
    let report = check_set_properties(&set, &counter);
    let ratio = report.named("length/U").map(|c| c.value).next().unwrap_or(f64::NAN);
    let macro_ok = report.macroscopic && (0.9..=1.1).contains(&ratio);
    let detail = if failing.is_empty() {
        format!("bounds hold for n ≤ 6; macroscopic length/U = {ratio:.4}")
    } else {
        format!(
            "bound violations [{}]; macroscopic length/U = {ratio:.4}",
            failing.join("; ")
        )
    };
    Ok(Outcome::new(failing.is_empty() && macro_ok, detail))
}

fn conjugate_mean_values(model: &LadderModel, quad: &QuadratureConfig) -> Result<Outcome> {
    let mut ok = true;
    let mut parts = Vec::new();
    for l in 1..=3 {
        let family: Vec<RatioRecord> = TRIPLE
            .iter()
            .map(|&t| conjugate_ratio(model, t, max_window(t), l, quad))
            .collect::<Result<_>>()?;
        let (lo, hi) = if l == 3 { (0.5, 2.0) } else { (0.7, 1.3) };
        ok &= family[1].within(lo, hi) && trend_non_increasing(&family);
        parts.push(format!("l={l}: {}", devs(&family)));
    }
    Ok(Outcome::new(ok, parts.join("; ")))
}

fn proof_chain(model: &LadderModel, quad: &QuadratureConfig) -> Result<Outcome> {
    let mut moment = Vec::new();
    let mut shift = Vec::new();
    let mut split = Vec::new();
    let mut square = Vec::new();
    for &t in &TRIPLE {
        let u = max_window(t);
        for r in proof_chain_check(model, t, u, 0, 1, quad)? {
            if r.label == "chain-moment" {
                moment.push(r);
            }
        }
        for r in proof_chain_check(model, t, u, 1, 1, quad)? {
            match r.label.as_str() {
                "chain-shift" => shift.push(r),
                "chain-split" => split.push(r),
                "chain-square" => square.push(r),
                _ => {}
            }
        }
    }
    let ok = moment[1].within(0.9, 1.1)
        && [&shift, &split, &square]
            .iter()
            .all(|f| f.len() == 3 && f.iter().all(positive_finite) && trend_non_increasing(f));
    Ok(Outcome::new(
        ok,
        format!(
            "second moment {}; shift {}; split {}; square {}",
            devs(&moment),
            devs(&shift),
            devs(&split),
            devs(&square)
        ),
    ))
}

fn factorization(model: &LadderModel, quad: &QuadratureConfig) -> Result<Outcome> {
    let mut ok = true;
    let mut parts = Vec::new();
    for (n, partition) in [(1, vec![1, 1]), (2, vec![1, 2]), (2, vec![1, 1, 1])] {
        let family: Vec<RatioRecord> = TRIPLE
            .iter()
            .map(|&t| factorization_ratio(model, t, max_window(t), n, &partition, quad))
            .collect::<Result<_>>()?;
        ok &= positive_finite(&family[1]) && family[1].within(0.5, 2.0) && trend_non_increasing(&family);
        parts.push(format!("{partition:?}: {}", devs(&family)));
    }
    Ok(Outcome::new(ok, parts.join("; ")))
}

fn mean_value_witnesses(model: &LadderModel, quad: &QuadratureConfig) -> Result<Outcome> {
    let t = 1e5;
    let u = max_window(t);
    let mut ok = true;
    let mut worst: f64 = 0.0;
    for l in 1..=2 {
        for side in [MeanValueSide::Far, MeanValueSide::Near] {
            let w = external_mean_value(model, t, u, l, side, quad)?;
            let replay = (w.replay()? - w.mean).abs() / w.mean;
            worst = worst.max(replay);
            ok &= w.all_inside() && replay <= 1e-9;
        }
    }
    Ok(Outcome::new(ok, format!("l = 1, 2 both sides; max replay residual {worst:.2e}")))
}

fn am_gm(model: &LadderModel, quad: &QuadratureConfig) -> Result<Outcome> {
    let t = 1e5;
    let u = max_window(t);
    let mut exact = true;
    let mut conditional = true;
    let mut orderings = 0;
    let mut margin = f64::INFINITY;
    let mut parts = Vec::new();
    for l in 1..=4 {
        let taus = if l <= 2 {
            let near = external_mean_value(model, t, u, l, MeanValueSide::Near, quad)?;
            let far = external_mean_value(model, t, u, l, MeanValueSide::Far, quad)?;
            near.taus.iter().chain(&far.taus).map(|h| h.tau).collect()
        } else {
            midpoint_taus(model, t, u, l)?
        };
        let g = geometric_mean_report(model, t, u, l, &taus, 0.3)?;
        orderings += g.inequalities.len();
        margin = margin.min(g.min_am_gm_margin());
        exact &= g.min_am_gm_margin() >= -1e-12;
        if l <= 2 {
            conditional &= g.conditional_all();
            parts.push(format!("l={l} G/Ω = {:.4}", g.ratio_mean() / g.omega));
        }
    }
    Ok(Outcome::new(
        exact && conditional && orderings == 1 + 4 + 36 + 576,
        format!("{orderings} orderings, min margin {margin:.2e}; conditional: {}", parts.join(", ")),
    ))
}

fn zero_gap(model: &LadderModel, quad: &QuadratureConfig) -> Result<Outcome> {
    let mut ok = true;
    let mut parts = Vec::new();
    for l in 1..=3 {
        let res = zero_gap_experiment(model, 1e4, l, quad)?;
        ok &= positive_finite(&res.record) && res.identity.deviation() <= 1e-5;
        parts.push(format!(
            "l={l} ratio {:.4} identity {:.1e}",
            res.record.ratio,
            res.identity.deviation()
        ));
        if l == 1 {
            parts.insert(0, format!("gap [{:.6}, {:.6}]", res.pair.gamma, res.pair.gamma_prime));
        }
    }
    Ok(Outcome::new(ok, parts.join("; ")))
}

fn rh_table(model: &LadderModel) -> Result<Outcome> {
    let t: f64 = 1e6;
    let mut rows = 0;
    let mut complete = true;
    for u in [1.0, t.powf(0.25)] {
        for row in rh_gap_table(model, &[t], u, 5, 0.01)? {
            rows += 1;
            complete &= row.gap > 0.0 && row.envelope > 0.0 && row.level.len() == RH_A_VALUES.len();
        }
    }
    Ok(Outcome::new(complete && rows == 10, format!("{rows} rows, all columns emitted: {complete}")))
}

fn main() -> ExitCode {
    let dir = resolve_cache_dir(None).unwrap_or_else(|| PathBuf::from(env!("CARGO_TARGET_TMPDIR")));
    let start = Instant::now();
    let (model, status) = match LadderModel::build_cached(LadderConfig::new(100.0, MODEL_T_MAX), Some(&dir)) {
        Ok(m) => m,
        Err(e) => {
            println!("ladder table build failed: {e}");
            return ExitCode::FAILURE;
        }
    };
    println!("ladder table ready in {:.1?} ({status:?})", start.elapsed());
    let quad = QuadratureConfig::default();

    type Criterion<'a> = (&'a str, Box<dyn Fn() -> Result<Outcome> + 'a>);
    let criteria: Vec<Criterion> = vec![
        ("evaluator oracle equivalence", Box::new(oracle_equivalence)),
        ("zero scanner", Box::new(zero_scanner)),
        ("ladder defining equation", Box::new(|| defining_equation(&model))),
        ("exact identity", Box::new(|| exact_identity(&model, &quad))),
        ("set geometry", Box::new(|| set_geometry(&model))),
        ("conjugate mean values", Box::new(|| conjugate_mean_values(&model, &quad))),
        ("proof chain", Box::new(|| proof_chain(&model, &quad))),
        ("factorization", Box::new(|| factorization(&model, &quad))),
        ("mean-value witnesses", Box::new(|| mean_value_witnesses(&model, &quad))),
        ("AM-GM orderings", Box::new(|| am_gm(&model, &quad))),
        ("zero-gap windows", Box::new(|| zero_gap(&model, &quad))),
        ("conditional gap table", Box::new(|| rh_table(&model))),
    ];

    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let outcome = run().unwrap_or_else(|e| Outcome::new(false, format!("error: {e}")));
        let mark = if outcome.passed { "PASS" } else { "FAIL" };
        failed += usize::from(!outcome.passed);
        println!(
            "criterion {:>2} {mark} {name} [{:.1?}]: {}",
            i + 1,
            t0.elapsed(),
            outcome.detail
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
