use bunkbed::analysis::{bbc_gap_exact, counterexample_gap};
use bunkbed::graph::{build_hollom, substitute_gadgets};
use bunkbed::hyper::EvalMode;
use bunkbed::montecarlo::{mc_gap_standard, mc_gap_with_early_stop, Model};
use bunkbed::rational::rat;
use bunkbed::verify::calibration_instance;
use num_traits::ToPrimitive;

#[test]
fn k4_estimates_near_exact() {
    let b = calibration_instance();
    let exact = bbc_gap_exact(&b).unwrap().exact_gap().unwrap().to_f64().unwrap();
    let e = mc_gap_standard(&b, 100_000, 42);
    assert!((e.gap_hat - exact).abs() < 5.0 * e.std_error);
}

#[test]
fn mean_over_seeds_is_unbiased() {
    let b = calibration_instance();
    let exact = bbc_gap_exact(&b).unwrap().exact_gap().unwrap().to_f64().unwrap();
    let runs: Vec<_> = (1000..1200).map(|s| mc_gap_standard(&b, 20_000, s)).collect();
    let mean = runs.iter().map(|e| e.gap_hat).sum::<f64>() / runs.len() as f64;
    let pooled = (runs.iter().map(|e| e.std_error.powi(2)).sum::<f64>()).sqrt() / runs.len() as f64;
    assert!((mean - exact).abs() < 4.0 * pooled, "mean {mean}, exact {exact}, pooled {pooled}");
}

#[test]
fn hollom_gadget_gap_is_invisible_to_sampling() {
    let p = rat(1, 2);
    let b = substitute_gadgets(&build_hollom(), 3, &p).unwrap();
    let exact = counterexample_gap(3, &p, EvalMode::Exact).unwrap();
    let exact = exact.exact_gap().unwrap().to_f64().unwrap();
    let e = mc_gap_standard(&b, 1_000_000, 2024);
    assert!(e.ci95_contains(exact), "{e:?} vs {exact}");
}

#[test]
fn early_stop_respects_threshold() {
    let b = calibration_instance();
    let e = mc_gap_with_early_stop(&b, Model::Alternative, 20_000, 1, 1000.0);
    assert!(!e.early_stopped);
    assert_eq!(e.samples, 20_000);
}
