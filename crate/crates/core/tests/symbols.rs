use nlslab_core::spectral::i_symbol;
use nlslab_core::symbols::*;
use proptest::prelude::*;

fn polar(r: f64, a: f64) -> [f64; 2] {
    [r * a.cos(), r * a.sin()]
}

#[test]
fn sigma_vanishes_below_the_cutoff() {
    let n = 16.0;
    let t = FrequencyTriple::unchecked([polar(3.9, 0.1), polar(2.0, 2.0), polar(1.0, -1.3)]);
    assert_eq!(sigma(&t, n, 0.45), 0.0);
    let far = FrequencyTriple::unchecked([polar(90.0, 0.1), polar(40.0, 2.0), polar(33.0, -1.3)]);
    assert_eq!(sigma(&far, n, 1.0), 0.0);
    assert!(sigma(&far, n, 0.45).abs() > 0.0);
}

#[test]
fn sigma_matches_direct_evaluation() {
    let (n, s) = (8.0_f64, 0.45);
    let xi = [polar(21.0, 0.4), polar(9.5, 2.5), polar(3.0, -0.7)];
    let t = FrequencyTriple::unchecked(xi);
    let m = |v: [f64; 2]| i_symbol(v[0].hypot(v[1]), n, s);
    let sum = [xi[0][0] + xi[1][0] + xi[2][0], xi[0][1] + xi[1][1] + xi[2][1]];
    let prod = m(xi[0]) * m(xi[1]) * m(xi[2]);
    let want = sum[0].hypot(sum[1]) * (m(sum) - prod) / prod;
    assert!((sigma(&t, n, s) - want).abs() < 1e-12 * want.abs());
    // m = 1 below N, (r/N)^(s-1) beyond 2N
    assert_eq!(m([n * 0.9, 0.0]), 1.0);
    assert!((m([3.0 * n, 0.0]) - 3f64.powf(s - 1.0)).abs() < 1e-15);
}

#[test]
fn sigma_is_exactly_zero_when_n_dominates_eight_shells() {
    let n = 64.0;
    for (k, n1) in [8.0, 4.0, 1.0, 0.25].into_iter().enumerate() {
        for j in 0..50 {
            let a = 0.3 * j as f64 + k as f64;
            let r = |f: f64| n1 * (1.0 + 0.999 * f);
            let xi = [polar(r(0.9), a), polar(r(0.5), a + 0.01), polar(r(0.1), a - 0.02)];
            let t = FrequencyTriple::new(xi, [n1, n1, n1]).unwrap();
            assert_eq!(sigma(&t, n, 0.45), 0.0);
        }
    }
}

#[test]
fn four_shell_threshold_alone_does_not_force_zero() {
    // aligned frequencies near 2 N1 add up past N when only N >= 4 N1 holds
    let n = 32.0;
    let n1 = n / 4.0;
    let xi = [polar(1.99 * n1, 0.0), polar(1.99 * n1, 0.0), polar(1.99 * n1, 0.0)];
    let t = FrequencyTriple::new(xi, [n1, n1, n1]).unwrap();
    assert!(sigma(&t, n, 0.45) < 0.0);
}

#[test]
fn normalised_symbols_vanish_for_s_one() {
    let t = FrequencyTriple::unchecked([polar(100.0, 0.2), polar(50.0, 1.0), polar(30.0, 2.0)]);
    for r in [RegionTag::Omega2, RegionTag::Omega3, RegionTag::Omega4] {
        assert_eq!(normalized_symbol(&t, 8.0, 1.0, r).unwrap(), 0.0);
    }
    assert!(normalized_symbol(&t, 8.0, 0.45, RegionTag::Omega1).is_err());
    let degenerate = FrequencyTriple::unchecked([polar(100.0, 0.2), [0.0, 0.0], [0.0, 0.0]]);
    assert!(normalized_symbol(&degenerate, 8.0, 0.45, RegionTag::Omega2).is_err());
}

#[test]
fn omega2_symbol_stays_bounded_as_low_frequencies_shrink() {
    let (n, s) = (8.0_f64, 0.45);
    let mut last: Option<f64> = None;
    for k in 1..=8 {
        let eps = 10f64.powi(-k);
        let t = FrequencyTriple::unchecked([polar(37.0, 0.3), polar(eps, 1.1), polar(eps / 2.0, -2.0)]);
        let a = normalized_symbol::<f64>(&t, n, s, RegionTag::Omega2).unwrap();
        assert!(a.abs() <= 10.0, "a2 = {a} at eps = {eps}");
        if let Some(prev) = last {
            if k > 4 {
                assert!(((a - prev) / prev).abs() < 1e-3);
            }
        }
        last = Some(a);
    }
}

#[test]
fn omega4_sample_bound() {
    let (n, s) = (16.0_f64, 0.45);
    let r = scan_bounds(RegionTag::Omega4, n, s, 20_000, 5).unwrap();
    assert!(r.sup_abs <= 10.0, "{}", r.sup_abs);
    let arg = r.argmax.unwrap();
    let [n1, n2, n3] = arg.shells;
    assert_eq!(classify(n1, n2, n3, n).unwrap(), RegionTag::Omega4);
    for (v, sh) in arg.xi.iter().zip(arg.shells) {
        let m = v[0].hypot(v[1]);
        assert!(m >= sh && m < 2.0 * sh);
    }
}

#[test]
fn omega1_scan_is_exactly_zero() {
    let r = scan_bounds(RegionTag::Omega1, 8.0_f64, 0.45, 1000, 1).unwrap();
    assert_eq!(r.sup_abs, 0.0);
    assert!(r.note.is_some());
    assert_eq!(derivative_spot_check(RegionTag::Omega1, 8.0, 0.45, 10, 1).unwrap(), 0.0);
}

#[test]
fn scans_are_seeded_and_stable() {
    for region in [RegionTag::Omega2, RegionTag::Omega3, RegionTag::Omega4] {
        let a = scan_bounds(region, 8.0_f64, 0.3, 20_000, 1).unwrap();
        let b = scan_bounds(region, 8.0_f64, 0.3, 20_000, 1).unwrap();
        assert_eq!(a, b);
        let c = scan_bounds(region, 8.0_f64, 0.3, 20_000, 2).unwrap();
        let rel = (a.sup_abs - c.sup_abs).abs() / a.sup_abs.max(c.sup_abs);
        assert!(rel <= 0.2, "{region}: {} vs {}", a.sup_abs, c.sup_abs);
    }
}

#[test]
fn scans_decrease_toward_s_one() {
    for region in [RegionTag::Omega2, RegionTag::Omega3, RegionTag::Omega4] {
        let sups: Vec<f64> = [0.3, 0.45, 0.7, 0.9, 1.0]
            .iter()
            .map(|&s| scan_bounds(region, 8.0_f64, s, 5000, 3).unwrap().sup_abs)
            .collect();
        for w in sups.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-12), "{region}: {sups:?}");
        }
        assert_eq!(*sups.last().unwrap(), 0.0);
    }
}

#[test]
fn derivative_spot_check_is_order_zero() {
    for region in [RegionTag::Omega2, RegionTag::Omega3, RegionTag::Omega4] {
        let d = derivative_spot_check(region, 8.0_f64, 0.45, 1000, 9).unwrap();
        assert!(d.is_finite() && d <= 10.0, "{region}: {d}");
    }
}

#[test]
fn shell_lattice_covers_each_region() {
    for region in [RegionTag::Omega2, RegionTag::Omega3, RegionTag::Omega4] {
        let t = shell_triples(region, 8.0);
        assert!(!t.is_empty());
        assert!(t.iter().all(|s| classify(s[0], s[1], s[2], 8.0).unwrap() == region));
    }
}

proptest! {
    #[test]
    fn classification_is_a_partition(
        a in -8i32..6, b in -8i32..6, c in -8i32..6, nexp in 0i32..6
    ) {
        let mut k = [a, b, c];
        k.sort_unstable_by(|x, y| y.cmp(x));
        let n = 2f64.powi(nexp);
        let shells = k.map(|e| n * 2f64.powi(e));
        let tag = classify(shells[0], shells[1], shells[2], n).unwrap();
        let q = n / 4.0;
        let hits = [
            shells[0] < q,
            shells[0] >= q && shells[1] < q,
            shells[1] >= q && shells[2] < q,
            shells[2] >= q,
        ];
        prop_assert_eq!(hits.iter().filter(|h| **h).count(), 1);
        prop_assert!(hits[tag.index() - 1]);
    }

    #[test]
    fn unsorted_shells_rejected(a in 0.1..10.0f64, d in 0.01..5.0f64) {
        prop_assert!(classify(a, a + d, a, 8.0).is_err());
    }
}
