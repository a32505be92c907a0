mod common;

use common::{dln_pmf_quadrature, hurwitz_direct};
use proptest::prelude::*;
use zicount::distributions::*;

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs()
}

// Reference values computed to 40 digits with an arbitrary-precision library.

#[test]
fn normal_cdf_reference_values() {
    assert!(close(normal_cdf(1.96), 0.975_002_104_851_779_6, 1e-15));
    assert!(close(normal_cdf(-5.0), 2.866_515_718_791_939e-7, 1e-12));
    assert!(close(normal_cdf(-30.0), 4.906_713_927_148_187e-198, 1e-10));
}

#[test]
fn dln_reference_values() {
    let std = DlnParams::new(0.0, 1.0).unwrap();
    assert!(close(dln_norm(&std), 0.755_891_404_214_417_3, 1e-14));
    assert!(close(dln_pmf(1, &std).unwrap(), 0.546_802_849_450_484_6, 1e-14));
    assert!(close(dln_ln_pmf(100_000, &std).unwrap(), -78.425_732_820_114_93, 1e-12));

    let p = DlnParams::new(2.5, 1.2).unwrap();
    let expected = [
        (1, 0.036_700_681_699_121_21),
        (10, 0.032_939_144_276_263_92),
        (100, 7.163_847_129_018_485e-4),
        (1000, 3.923_738_444_127_478e-7),
    ];
    for (n, v) in expected {
        assert!(close(dln_pmf(n, &p).unwrap(), v, 1e-12), "n={n}");
    }
    assert!(close(dln_cdf(10, &p).unwrap(), 0.448_567_097_466_913_56, 1e-13));
}

#[test]
fn hooked_reference_values() {
    let p = HookedParams::new(3.0, 2.0).unwrap();
    assert!(close(hooked_norm(&p), 12.977_422_644_780_8, 1e-13));
    assert!(close(hooked_pmf(1, &p).unwrap(), 0.480_645_283_140_029_6, 1e-13));
    let p = HookedParams::new(1.5, 0.3).unwrap();
    assert!(close(hooked_pmf(100, &p).unwrap(), 4.626_103_220_051_27e-4, 1e-12));
    let p = HookedParams::new(2.2, 5.0).unwrap();
    assert!(close(hooked_cdf(50, &p).unwrap(), 0.937_363_096_185_611_6, 1e-13));
    assert_eq!(p.b_unshifted(), 6.0);
}

#[test]
fn hurwitz_reference_values() {
    assert!(close(hurwitz_zeta(1.0001, 1.0), 10_000.577_222_946_438, 1e-12));
    assert!(close(hurwitz_zeta(2.5, 1e6), 6.666_671_666_668_75e-10, 1e-12));
    assert!(close(hurwitz_zeta(30.0, 1.5), 5.215_096_203_815_732e-6, 1e-12));
}

#[test]
fn hooked_norm_two_ways() {
    for &(alpha, b) in &[(1.05, 0.01), (1.3, 2.0), (2.0, 1e-5), (2.7, 40.0), (4.0, 1e3), (12.0, 0.5), (45.0, 3.0)] {
        let p = HookedParams::new(alpha, b).unwrap();
        let direct = 1.0 / hurwitz_direct(alpha, b + 1.0, 200_000);
        assert!(close(hooked_norm(&p), direct, 1e-9), "alpha={alpha} b={b}");
    }
}

#[test]
fn dln_closed_form_vs_summation() {
    let p = DlnParams::new(2.5, 1.2).unwrap();
    let mut acc = 0.0;
    for n in 1..=50 {
        acc += dln_pmf(n, &p).unwrap();
    }
    assert!((dln_cdf(50, &p).unwrap() - acc).abs() <= 1e-10);
    assert_eq!(dln_cdf(1, &p).unwrap(), dln_pmf(1, &p).unwrap());
}

#[test]
fn dln_matches_quadrature_on_a_grid() {
    for &(mu, sigma) in &[(0.0, 1.0), (2.5, 1.2), (-1.0, 0.4), (5.0, 2.5)] {
        let p = DlnParams::new(mu, sigma).unwrap();
        for n in [1, 2, 3, 7, 20, 150, 2000] {
            let oracle = dln_pmf_quadrature(n, mu, sigma);
            let got = dln_pmf(n, &p).unwrap();
            assert!((got - oracle).abs() <= 1e-10, "mu={mu} sigma={sigma} n={n}: {got} vs {oracle}");
        }
    }
}

#[test]
fn zero_is_outside_support() {
    let d = DlnParams::new(0.0, 1.0).unwrap();
    let h = HookedParams::new(2.0, 1.0).unwrap();
    assert!(dln_pmf(0, &d).is_err());
    assert!(dln_cdf(0, &d).is_err());
    assert!(hooked_pmf(0, &h).is_err());
    assert!(hooked_cdf(0, &h).is_err());
}

#[test]
fn invalid_parameters_rejected() {
    assert!(DlnParams::new(0.0, 0.0).is_err());
    assert!(DlnParams::new(f64::NAN, 1.0).is_err());
    assert!(HookedParams::new(1.0, 1.0).is_err());
    assert!(HookedParams::new(2.0, 0.0).is_err());
}

fn arb_hooked() -> impl Strategy<Value = HookedParams> {
    (1.01f64..20.0, -4.0f64..4.0).prop_map(|(a, lb)| HookedParams::new(a, 10f64.powf(lb)).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hooked_cdf_is_pmf_sum(p in arb_hooked()) {
        let mut acc = 0.0;
        for n in 1..=1000 {
            acc += hooked_pmf(n, &p).unwrap();
            prop_assert!((hooked_cdf(n, &p).unwrap() - acc).abs() <= 1e-10);
        }
    }

    #[test]
    fn log_pmf_is_log_of_pmf(p in arb_hooked(), n in 1u64..5000) {
        let lp = hooked_ln_pmf(n, &p).unwrap();
        prop_assert!((lp.exp() - hooked_pmf(n, &p).unwrap()).abs() <= 1e-15);
    }
}
