use std::sync::OnceLock;

use ladder_core::ladder::{defining_f, LadderConfig, LadderModel};
use ladder_core::Error;
use proptest::prelude::*;

fn model() -> &'static LadderModel {
    static M: OnceLock<LadderModel> = OnceLock::new();
    M.get_or_init(|| {
        let mut cfg = LadderConfig::new(100.0, 20_000.0);
        cfg.summary_nodes = 2_000;
        LadderModel::build(cfg).unwrap()
    })
}

#[test]
fn strictly_increasing_and_below_identity() {
    let m = model();
    let ts: Vec<f64> = (0..4000).map(|i| 150.0 + 4.9 * i as f64).collect();
    let phi = m.values(&ts).unwrap();
    for (w, t) in phi.windows(2).zip(&ts) {
        assert!(w[1] > w[0], "not increasing after t={t}");
    }
    for (&y, &t) in phi.iter().zip(&ts) {
        assert!(y < t, "t={t} phi={y}");
        assert!(t < 1_000.0 || y >= 0.9 * t, "t={t} phi={y}");
    }
}

#[test]
fn defining_equation_residual() {
    let m = model();
    let ts: Vec<f64> = (0..500).map(|i| 100.0 * 200f64.powf(i as f64 / 499.0)).collect();
    assert!(m.max_residual(&ts).unwrap() <= 1e-10);
}

#[test]
fn derivative_matches_finite_difference() {
    let m = model();
    for t in [1234.56, 5000.5, 17_777.7] {
        let h = 3e-3;
        let f = |x: f64| m.value(x).unwrap();
        let fd = (8.0 * (f(t + h) - f(t - h)) - (f(t + 2.0 * h) - f(t - 2.0 * h))) / (12.0 * h);
        let d = m.derivative(t).unwrap();
        assert!((fd - d).abs() <= 2e-8, "t={t}: {fd} vs {d}");
    }
}

#[test]
fn deficit_ratio_near_one() {
    let r = model().deficit_ratio(1e4).unwrap();
    assert!((0.8..=1.25).contains(&r), "{r}");
}

#[test]
fn escapes_below_table() {
    match model().iterate(105.0, 3) {
        Err(Error::RangeEscape { .. }) | Err(Error::LadderRange { .. }) => {}
        other => panic!("expected escape, got {other:?}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn iterates_compose(t in 1_000.0f64..19_000.0) {
        let m = model();
        let two = m.iterate(t, 2).unwrap();
        let once = m.iterate(m.iterate(t, 1).unwrap(), 1).unwrap();
        prop_assert!((two - once).abs() <= 1e-9 * t);
    }

    #[test]
    fn value_solves_defining_equation(t in 200.0f64..19_900.0) {
        let m = model();
        let y = m.value(t).unwrap();
        let hl = m.hl_integral(t).unwrap();
        prop_assert!((defining_f(y) - hl).abs() <= 1e-10 * hl);
    }
}
