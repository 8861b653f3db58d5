//! ECDF, quantile and two-sample KS checks against direct computation.

mod common;

use icd::eval::{kolmogorov_sf, ks_2sample, structural_errors, Ecdf};
use rand::Rng;

use common::*;

fn small_sample(rng: &mut rand_chacha::ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.random_range(0..6) as f64).collect()
}

#[test]
fn quantile_is_the_smallest_value_reaching_the_level() {
    let mut rng = rng(81);
    for _ in 0..300 {
        let len = rng.random_range(1..15);
        let s = small_sample(&mut rng, len);
        let e = Ecdf::new(&s).unwrap();
        for k in 1..=40 {
            let q = k as f64 / 40.0;
            let expected = s
                .iter()
                .copied()
                .filter(|&t| s.iter().filter(|&&v| v <= t).count() as f64 / len as f64 >= q)
                .fold(f64::INFINITY, f64::min);
            assert_eq!(e.quantile(q).unwrap(), expected, "q = {q}, sample {s:?}");
        }
        assert!(e.quantile(0.0).is_err());
        assert!(e.quantile(1.5).is_err());
    }
}

#[test]
fn steps_agree_with_pointwise_evaluation() {
    let mut rng = rng(82);
    for _ in 0..100 {
        let s = small_sample(&mut rng, 12);
        let e = Ecdf::new(&s).unwrap();
        let steps = e.steps();
        for w in steps.windows(2) {
            assert!(w[0].0 < w[1].0 && w[0].1 < w[1].1);
        }
        for &(t, f) in &steps {
            assert_eq!(e.eval(t), f);
        }
        assert_eq!(steps.last().unwrap().1, 1.0);
    }
}

#[test]
fn ks_statistic_is_symmetric_and_invariant_under_monotone_maps() {
    let mut rng = rng(83);
    for _ in 0..200 {
        let (m, n) = (rng.random_range(1..20), rng.random_range(1..20));
        let a = small_sample(&mut rng, m);
        let b = small_sample(&mut rng, n);
        let ab = ks_2sample(&a, &b).unwrap();
        let ba = ks_2sample(&b, &a).unwrap();
        assert_eq!(ab.statistic, ba.statistic);
        assert!((ab.p_value - ba.p_value).abs() < 1e-12);
        assert!((ab.statistic - brute_ks_statistic(&a, &b)).abs() < 1e-12);
        let warp = |v: &f64| (v * 0.7).exp() + 3.0;
        let wa: Vec<f64> = a.iter().map(warp).collect();
        let wb: Vec<f64> = b.iter().map(warp).collect();
        let w = ks_2sample(&wa, &wb).unwrap();
        assert_eq!(w.statistic, ab.statistic);
        assert!((w.p_value - ab.p_value).abs() < 1e-12);
        assert!((0.0..=1.0).contains(&ab.p_value));
    }
}

#[test]
fn identical_samples_give_zero_statistic_and_unit_p_value() {
    let s = [1.0, 2.0, 2.0, 5.0];
    let r = ks_2sample(&s, &s).unwrap();
    assert_eq!(r.statistic, 0.0);
    assert!((r.p_value - 1.0).abs() < 1e-12);
    assert!(r.exact);
}

#[test]
fn large_samples_switch_to_the_asymptotic_tail() {
    let a: Vec<f64> = (0..2500).map(|i| i as f64).collect();
    let b: Vec<f64> = (0..2000).map(|i| i as f64 + 100.0).collect();
    let r = ks_2sample(&a, &b).unwrap();
    assert!(!r.exact);
    let en = (2500.0 * 2000.0 / 4500.0f64).sqrt();
    assert!((r.p_value - kolmogorov_sf(en * r.statistic)).abs() < 1e-3);
}

#[test]
fn kolmogorov_tail_is_a_decreasing_survival_function() {
    let mut last = 1.0;
    for k in 1..60 {
        let v = kolmogorov_sf(k as f64 * 0.05);
        assert!(v <= last + 1e-15 && v >= 0.0);
        last = v;
    }
    // Known value: P(K > 1.36) is about 0.049.
    assert!((kolmogorov_sf(1.36) - 0.0494).abs() < 1e-3);
}

#[test]
fn structural_errors_of_a_graph_against_itself_are_zero() {
    let mut rng = rng(84);
    for _ in 0..50 {
        let g = random_mixed_graph(7, 0.4, &mut rng);
        assert!(structural_errors(&g, &g).unwrap().is_zero());
    }
}

#[test]
fn empty_and_nan_samples_are_rejected() {
    assert!(Ecdf::new(&[]).is_err());
    assert!(Ecdf::new(&[1.0, f64::NAN]).is_err());
    assert!(ks_2sample(&[], &[1.0]).is_err());
}
