use nlslab_core::data::random_band_limited;
use nlslab_core::spectral::{
    apply_multiplier, i_operator, i_symbol, lebesgue_norm, littlewood_paley, sobolev_norm,
    strichartz_norm, z_norm,
};
use nlslab_core::{
    AdmissiblePair, Complex, Error, Exponent, Field, Field32, Grid, Grid32, LpMode,
    MultiplierSpec, Spectrum, Trajectory,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TAU: f64 = std::f64::consts::TAU;

fn random_field(grid: &Grid<f64>, rng: &mut ChaCha8Rng) -> Field<f64> {
    let values = (0..grid.len())
        .map(|_| Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    Field::new(grid, values).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

#[test]
fn round_trip_and_plancherel_on_many_random_fields() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst_rt = 0.0_f64;
    let mut worst_pl = 0.0_f64;
    for k in 0..10_000 {
        let l = 0.5 + (k % 7) as f64;
        let grid = Grid::<f64>::new_2d(16, l).unwrap();
        let u = random_field(&grid, &mut rng);
        let s = u.forward().unwrap();
        let back = s.inverse().unwrap();
        let direct: f64 = u.values().iter().map(|v| v.norm_sqr()).sum::<f64>() * grid.spacing().powi(2);
        worst_rt = worst_rt.max(back.max_abs_diff(&u) / u.max_abs());
        worst_pl = worst_pl.max(rel(s.norm_sq(), direct));
    }
    assert!(worst_rt < 1e-12, "round trip {worst_rt}");
    assert!(worst_pl < 1e-12, "plancherel {worst_pl}");
}

#[test]
fn plancherel_for_band_limited_data_against_direct_sum() {
    let grid = Grid::<f64>::new_2d(64, 5.0).unwrap();
    for seed in 0..5 {
        let u = random_band_limited(&grid, 3.0, seed).unwrap();
        let direct: f64 = u.values().iter().map(|v| v.norm_sqr()).sum::<f64>() * 0.078125_f64.powi(2);
        assert!(rel(u.forward().unwrap().norm_sq(), direct) < 1e-12);
    }
}

#[test]
fn transform_rejects_non_finite_spectrum() {
    let grid = Grid::<f64>::new_2d(8, 1.0).unwrap();
    let mut c = vec![Complex::new(0.0, 0.0); 64];
    c[3] = Complex::new(f64::INFINITY, 0.0);
    assert!(matches!(Spectrum::new(&grid, c), Err(Error::NonFinite { .. })));
}

#[test]
fn i_multiplier_is_identity_below_cutoff() {
    let grid = Grid::<f64>::new_2d(32, 4.0).unwrap();
    let u = random_band_limited(&grid, 2.0, 3).unwrap();
    // grid frequencies reach at most 4 * sqrt(2) < 8
    let out = i_operator(&u, 8.0, 0.4).unwrap();
    assert!(out.max_abs_diff(&u) < 1e-14);
}

#[test]
fn single_mode_at_twice_cutoff() {
    let grid = Grid::<f64>::new_2d(32, 1.0).unwrap();
    let n = 4.0;
    let u = Field::from_fn(&grid, |[x, _]| Complex::from_polar(1.0, TAU * 2.0 * n * x)).unwrap();
    let out = i_operator(&u, n, 0.5).unwrap();
    let want = u.scale(2f64.powf(-0.5));
    assert!(out.max_abs_diff(&want) < 1e-13);
}

#[test]
fn fractional_derivative_inverts_on_zero_mean_fields() {
    let grid = Grid::<f64>::new_2d(32, 3.0).unwrap();
    let mut spec = random_band_limited(&grid, 4.0, 9).unwrap().forward().unwrap();
    spec.coeffs_mut()[0] = Complex::new(0.0, 0.0);
    let u = spec.inverse().unwrap();
    for alpha in [0.3, 1.0, 1.7] {
        let up = apply_multiplier(&u, &MultiplierSpec::FracDeriv { alpha, homogeneous: true }).unwrap();
        let back =
            apply_multiplier(&up, &MultiplierSpec::FracDeriv { alpha: -alpha, homogeneous: true }).unwrap();
        assert!(back.max_abs_diff(&u) < 1e-10 * u.max_abs());
    }
}

#[test]
fn low_projection_keeps_low_modes() {
    let grid = Grid::<f64>::new_2d(32, 8.0).unwrap();
    let u = Field::from_fn(&grid, |[x, y]| {
        Complex::from_polar(1.0, TAU * (0.5 * x + 0.625 * y))
    })
    .unwrap();
    // |xi| = 0.8 <= 1
    let low = littlewood_paley(&u, 1.0, LpMode::Low).unwrap();
    assert!(low.max_abs_diff(&u) < 1e-13);
}

#[test]
fn band_projection_passes_mode_at_scale() {
    let grid = Grid::<f64>::new_2d(32, 4.0).unwrap();
    let u = Field::from_fn(&grid, |[x, _]| Complex::from_polar(1.0, TAU * 2.0 * x)).unwrap();
    let band = littlewood_paley(&u, 2.0, LpMode::Band).unwrap();
    assert!(band.max_abs_diff(&u) < 1e-13);
    let high = littlewood_paley(&u, 2.0, LpMode::High).unwrap();
    assert!(high.max_abs() < 1e-13);
}

#[test]
fn littlewood_paley_telescopes() {
    let grid = Grid::<f64>::new_2d(64, 4.0).unwrap();
    let u = random_band_limited(&grid, 7.0, 21).unwrap();
    let m0 = 0.25;
    let mut sum = littlewood_paley(&u, m0, LpMode::Low).unwrap();
    let mut m = 2.0 * m0;
    while m <= 64.0 {
        sum = sum.add(&littlewood_paley(&u, m, LpMode::Band).unwrap()).unwrap();
        m *= 2.0;
    }
    let err = sum.sub(&u).unwrap().norm_sq().sqrt();
    assert!(err < 1e-12 * u.norm_sq().sqrt(), "{err}");
}

#[test]
fn i_symbol_is_monotone_and_smooth() {
    for (n, s) in [(4.0, 0.3), (8.0, 0.45), (32.0, 0.6)] {
        let h = n * 1e-3;
        let pts: Vec<f64> = (0..6000).map(|k| k as f64 * h).collect();
        let m: Vec<f64> = pts.iter().map(|&r| i_symbol(r, n, s)).collect();
        for w in m.windows(2) {
            assert!(w[1] - w[0] <= 1e-10);
        }
        // second differences stay bounded (no kinks) relative to the scale 1/N^2
        let worst = m
            .windows(3)
            .map(|w| (w[2] - 2.0 * w[1] + w[0]).abs() / (h * h))
            .fold(0.0_f64, f64::max);
        assert!(worst * n * n < 50.0, "second difference {worst}");
    }
}

#[test]
fn sobolev_examples() {
    let grid = Grid::<f64>::new_2d(16, 2.0).unwrap();
    let z = Field::zeros(&grid);
    assert_eq!(sobolev_norm(&z, 1.0, true).unwrap(), 0.0);
    let u = random_band_limited(&grid, 3.0, 5).unwrap();
    let l2 = lebesgue_norm(&u, 2.0).unwrap();
    assert!(rel(sobolev_norm(&u, 0.0, true).unwrap(), l2) < 1e-13);
    assert!(rel(sobolev_norm(&u, 0.0, false).unwrap(), l2) < 1e-13);
    let c = Field::from_fn(&grid, |_| Complex::new(1.0, 0.0)).unwrap();
    assert!(sobolev_norm(&c, -0.5, true).is_err());
    assert!(sobolev_norm(&c, -0.5, false).is_ok());
}

#[test]
fn plane_wave_homogeneous_sobolev_norm_matches_quadrature() {
    let l = 3.0_f64;
    let grid = Grid::<f64>::new_2d(16, l).unwrap();
    let a = 1.7;
    let k = [2.0 / l, -1.0 / l];
    let u = nlslab_core::data::plane_wave(&grid, a, k).unwrap();
    let kn = k[0].hypot(k[1]);
    for s0 in [-0.5, 0.5, 1.0, 2.0] {
        // direct quadrature of |D^s u|^2 = |k|^{2 s0} |u|^2
        let dx = l / 16.0;
        let q: f64 = u.values().iter().map(|v| kn.powf(2.0 * s0) * v.norm_sqr()).sum::<f64>() * dx * dx;
        let want = a * l * kn.powf(s0);
        assert!(rel(q.sqrt(), want) < 1e-12);
        assert!(rel(sobolev_norm(&u, s0, true).unwrap(), want) < 1e-12);
    }
}

#[test]
fn lebesgue_norm_of_constant() {
    let grid = Grid::<f64>::new_2d(8, 2.0).unwrap();
    let u = Field::from_fn(&grid, |_| Complex::new(0.0, 3.0)).unwrap();
    assert!(rel(lebesgue_norm(&u, 4.0).unwrap(), 3.0 * 4f64.powf(0.25)) < 1e-14);
    assert_eq!(lebesgue_norm(&u, f64::INFINITY).unwrap(), 3.0);
}

#[test]
fn i_operator_sandwich_constants() {
    let grid = Grid::<f64>::new_2d(256, 1.0).unwrap();
    let mut c1 = 0.0_f64;
    let mut c2 = 0.0_f64;
    for seed in 0..3 {
        let u = random_band_limited(&grid, 90.0, seed).unwrap();
        for n in [4.0, 8.0, 16.0, 32.0] {
            for s in [0.3, 0.45, 0.6] {
                let iu = i_operator(&u, n, s).unwrap();
                for s0 in [0.0, 0.5] {
                    let a = sobolev_norm(&u, s0, false).unwrap();
                    let b = sobolev_norm(&iu, s0 + 1.0 - s, false).unwrap();
                    let k1 = a / b;
                    c1 = c1.max(k1);
                    c2 = c2.max(k1 * b / (n.powf(1.0 - s) * a));
                }
            }
        }
    }
    assert!(c1 <= 4.0 && c2 <= 4.0, "C1 = {c1}, C2 = {c2}");
}

fn constant_trajectory(u: &Field<f64>, steps: usize, h: f64) -> Trajectory<f64> {
    Trajectory::from_snapshots(0.0, h, vec![u.clone(); steps + 1]).unwrap()
}

#[test]
fn strichartz_norm_of_constant_and_zero_trajectories() {
    let grid = Grid::<f64>::new_2d(16, 2.0).unwrap();
    let u = random_band_limited(&grid, 3.0, 1).unwrap();
    let tr = constant_trajectory(&u, 8, 0.25);
    for pair in AdmissiblePair::default_set() {
        let r = pair.r().to_scalar::<f64>();
        let want = match pair.q() {
            Exponent::Infinite => lebesgue_norm(&u, r).unwrap(),
            q => 2f64.powf(1.0 / q.to_scalar::<f64>()) * lebesgue_norm(&u, r).unwrap(),
        };
        assert!(rel(strichartz_norm(&tr, &pair).unwrap(), want) < 1e-12);
    }
    let zero = constant_trajectory(&Field::zeros(&grid), 4, 0.1);
    let pair = AdmissiblePair::new(Exponent::int(4), Exponent::int(4)).unwrap();
    assert_eq!(strichartz_norm(&zero, &pair).unwrap(), 0.0);
    assert_eq!(z_norm(&zero, 4.0, 0.5, &AdmissiblePair::default_set()).unwrap(), 0.0);
}

#[test]
fn strichartz_norm_grows_with_the_interval() {
    let grid = Grid::<f64>::new_2d(16, 4.0).unwrap();
    let fields: Vec<_> = (0..12)
        .map(|k| random_band_limited(&grid, 2.0, k as u64).unwrap().scale(1.0 + k as f64 * 0.1))
        .collect();
    let tr = Trajectory::from_snapshots(0.0, 0.05, fields).unwrap();
    for pair in AdmissiblePair::default_set() {
        let mut last = 0.0;
        for len in 1..=tr.len() {
            let v = strichartz_norm(&tr.prefix(len).unwrap(), &pair).unwrap();
            assert!(v >= last);
            last = v;
        }
    }
}

#[test]
fn single_precision_grid_round_trips() {
    let grid = Grid32::new_2d(16, 2.0).unwrap();
    let u = Field32::from_fn(&grid, |[x, y]| Complex::new((-(x * x + y * y)).exp(), 0.0)).unwrap();
    let back = u.forward().unwrap().inverse().unwrap();
    assert!(back.max_abs_diff(&u) < 1e-5);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn plancherel_holds(seed in any::<u64>(), l in 0.1f64..50.0, log_n in 3u32..6) {
        let grid = Grid::<f64>::new_2d(1 << log_n, l).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_field(&grid, &mut rng);
        let s = u.forward().unwrap();
        prop_assert!(rel(s.norm_sq(), u.norm_sq()) < 1e-12);
    }

    #[test]
    fn multiplier_acts_pointwise(seed in any::<u64>(), n in 0.5f64..4.0, s in 0.05f64..1.0) {
        let grid = Grid::<f64>::new_2d(16, 2.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_field(&grid, &mut rng);
        let out = i_operator(&u, n, s).unwrap().forward().unwrap();
        let inp = u.forward().unwrap();
        for i in 0..grid.len() {
            let want = inp.coeffs()[i] * i_symbol(grid.radial_frequency(i), n, s);
            prop_assert!((out.coeffs()[i] - want).norm() < 1e-12 * (1.0 + want.norm()) * 16.0);
        }
    }

    #[test]
    fn admissible_pairs_are_exact(num in 2i64..40, den in 1i64..10) {
        let q = Exponent::ratio(num, den);
        if q.reciprocal() <= num_rational::Ratio::new(1, 2) {
            let rinv = num_rational::Ratio::new(1, 2) - q.reciprocal();
            let r = if rinv == num_rational::Ratio::from_integer(0) {
                Exponent::Infinite
            } else {
                Exponent::Finite(rinv.recip())
            };
            let res = AdmissiblePair::new(q, r);
            prop_assert_eq!(res.is_ok(), q != Exponent::int(2));
        }
    }
}
