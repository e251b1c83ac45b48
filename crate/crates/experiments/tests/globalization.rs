use nlslab_experiments::globalization::{admissibility_threshold, globalization_calc, growth_exponent};
use proptest::prelude::*;

#[test]
fn exponent_at_one_half() {
    assert_eq!(growth_exponent(0.5), 0.75);
}

#[test]
fn exponent_blows_up_at_two_fifths() {
    assert!(growth_exponent(0.4).is_infinite());
    assert!(growth_exponent(0.35).is_infinite());
    assert!(growth_exponent(0.4 + 1e-6) > 1e4);
    assert!(growth_exponent(0.4 + 1e-8) > 100.0 * growth_exponent(0.4 + 1e-6) * 0.99);
}

#[test]
fn large_n_is_admissible() {
    let g = globalization_calc(0.5, 2f64.powi(40), 1.0, 1.0, 0.1).unwrap();
    assert!(g.admissible, "{g:?}");
    let g = globalization_calc(0.5, 2.0, 1.0, 1.0, 0.1).unwrap();
    assert!(!g.admissible);
    let g = globalization_calc(0.4, 2f64.powi(60), 1.0, 1.0, 0.1).unwrap();
    assert!(!g.admissible);
}

#[test]
fn threshold_is_admissible_and_its_half_is_not() {
    let th = admissibility_threshold(0.6, 2.0, 1.0, 0.1).unwrap().unwrap();
    assert!(globalization_calc(0.6, th, 2.0, 1.0, 0.1).unwrap().admissible);
    assert!(!globalization_calc(0.6, th / 2.0, 2.0, 1.0, 0.1).unwrap().admissible);
    assert_eq!(admissibility_threshold(0.4, 1.0, 1.0, 0.1).unwrap(), None);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exponent_decreases_in_s(a in 0.401f64..1.0, b in 0.401f64..1.0) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assume!(hi - lo > 1e-9);
        prop_assert!(growth_exponent(lo) > growth_exponent(hi));
    }

    #[test]
    fn threshold_grows_with_t0(s in 0.45f64..1.0, t in 0.5f64..16.0) {
        let a = admissibility_threshold(s, t, 1.0, 0.1).unwrap();
        let b = admissibility_threshold(s, 2.0 * t, 1.0, 0.1).unwrap();
        if let (Some(a), Some(b)) = (a, b) {
            prop_assert!(a <= b);
        }
    }
}
