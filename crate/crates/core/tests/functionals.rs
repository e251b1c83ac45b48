use nlslab_core::data::{plane_wave, random_band_limited, Gaussian};
use nlslab_core::functionals::*;
use nlslab_core::propagator::{evolve, SolverConfig};
use nlslab_core::spectral::{gradient, i_operator, i_symbol};
use nlslab_core::weights::{BracketWeight, LinearWeight, Weight, WeightSpec};
use nlslab_core::{Complex, Error, Field, Grid, Trajectory};
use proptest::prelude::*;

const PI: f64 = std::f64::consts::PI;

fn grid(n: usize, l: f64) -> Grid<f64> {
    Grid::new_2d(n, l).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

#[test]
fn gaussian_mass_and_energy() {
    let g = grid(128, 20.0);
    for a in [0.5, 1.0, 2.0] {
        let u = Gaussian::new(a, 1.0).sample(&g).unwrap();
        assert!(rel(mass(&u), a * a * PI) < 1e-12);
        let want = PI * a * a / 2.0 + PI * a.powi(4) / 8.0;
        assert!(rel(energy(&u).unwrap(), want) < 1e-12, "{}", energy(&u).unwrap());
    }
}

#[test]
fn momentum_of_real_and_boosted_data() {
    let g = grid(128, 20.0);
    let u = Gaussian::new(1.3, 1.1).sample(&g).unwrap();
    let p = momentum(&u);
    assert!(p[0].abs() < 1e-12 && p[1].abs() < 1e-12);
    let v = [0.25, -0.5];
    let w = Gaussian::new(1.3, 1.1).with_velocity(v).sample(&g).unwrap();
    let p = momentum(&w);
    let m = mass(&w);
    for j in 0..2 {
        assert!((p[j] - 2.0 * PI * v[j] * m).abs() < 1e-10, "{p:?}");
    }
}

#[test]
fn bracket_identities() {
    let g = grid(128, 16.0);
    let u = Gaussian::new(1.2, 1.0).with_velocity([0.3, 0.1]).sample(&g).unwrap();
    assert_eq!(momentum_bracket(&u, &u).unwrap().max_abs(), 0.0);

    // {f, c} = Re(f) ... with a constant: Re(-c ∇conj(f))
    let c = Complex::new(0.7, -0.4);
    let cf = Field::from_fn(&g, |_| c).unwrap();
    let b = momentum_bracket(&u, &cf).unwrap();
    let gu = gradient(&u).unwrap();
    for j in 0..2 {
        for (i, v) in b.component(j).iter().enumerate() {
            let want = -(c * gu[j].values()[i].conj()).re;
            assert!((v - want).abs() < 1e-12);
        }
    }

    // {|u|^2 u, u} = -∇|u|^4 / 2
    let cubic = u.map(|v| v * v.norm_sqr()).unwrap();
    let b = momentum_bracket(&cubic, &u).unwrap();
    let quartic: Vec<f64> = u.density().iter().map(|r| r * r / 2.0).collect();
    let gq = gradient(&Field::from_real(&g, &quartic).unwrap()).unwrap();
    let scale = gq[0].max_abs();
    for j in 0..2 {
        for (i, v) in b.component(j).iter().enumerate() {
            assert!((v + gq[j].values()[i].re).abs() < 1e-9 * scale);
        }
    }

    // a gradient field has no curl
    let p = momentum_density(&u);
    let curl_free = VectorField::new(&g, [gq[0].values().iter().map(|z| z.re).collect(), gq[1].values().iter().map(|z| z.re).collect()]).unwrap();
    assert!(curl_free.curl().iter().fold(0.0_f64, |m, c| m.max(c.abs())) < 1e-10 * scale);
    assert!(p.l2_norm() > 0.0);
}

#[test]
fn plane_wave_momentum_density() {
    let g = grid(32, 4.0);
    let (a, k) = (1.7, [0.75, -1.25]);
    let u = plane_wave(&g, a, k).unwrap();
    let t0 = momentum_density(&u);
    for j in 0..2 {
        for v in t0.component(j) {
            assert!((v - 2.0 * a * a * 2.0 * PI * k[j]).abs() < 1e-11);
        }
    }
    // the current of a plane wave is 4 A^2 (2π)^2 k_j k_k
    let l = momentum_current(&u).unwrap();
    for j in 0..2 {
        for kk in 0..2 {
            let want = 4.0 * a * a * 4.0 * PI * PI * k[j] * k[kk];
            assert!(l.component(j, kk).iter().all(|v| (v - want).abs() < 1e-9));
        }
    }
}

fn residual_at(spacing: f64) -> f64 {
    let g = grid(64, 16.0);
    let u0 = Gaussian::new(1.0, 1.0).with_velocity([0.2, 0.0]).sample(&g).unwrap();
    let dt = 1e-4;
    let stride = (spacing / dt).round() as usize;
    let cfg = SolverConfig::new(&g, dt, 2.0 * spacing).with_stride(stride);
    let tr = evolve(&cfg, &u0).unwrap();
    local_momentum_identity_residual(&tr, 1).unwrap()
}

#[test]
fn local_momentum_identity_converges_at_second_order() {
    let r: Vec<f64> = [4e-3, 2e-3, 1e-3].iter().map(|&h| residual_at(h)).collect();
    for w in r.windows(2) {
        let ratio = w[0] / w[1];
        assert!((3.5..=4.5).contains(&ratio), "ratios from {r:?}");
    }
}

#[test]
fn linear_weight_gives_momentum() {
    let g = grid(64, 16.0);
    let u = Gaussian::new(1.0, 1.0).with_velocity([0.3, -0.2]).sample(&g).unwrap();
    let c = [0.6, 1.4];
    let m = morawetz_action(&u, &LinearWeight { direction: c }).unwrap();
    let p = momentum(&u);
    assert!(rel(m, 2.0 * (c[0] * p[0] + c[1] * p[1])) < 1e-12);
    let terms = virial_terms(&u, &LinearWeight { direction: c }).unwrap();
    assert_eq!(terms.rate(), Some(0.0));
}

#[test]
fn virial_of_zero_trajectory_vanishes() {
    let g = grid(32, 8.0);
    let z = Field::zeros(&g);
    let tr = Trajectory::from_snapshots(0.0, 0.1, vec![z.clone(), z.clone(), z]).unwrap();
    let rep = virial_residual(&tr, &BracketWeight { length: 1.0 }, 0, 2).unwrap();
    assert_eq!(rep.residual, 0.0);
    assert!(rep.positive);
}

fn bracket_trajectory(spacing: f64) -> Trajectory<f64> {
    let g = grid(128, 24.0);
    let u0 = Gaussian::new(1.2, 1.0).with_velocity([0.3, 0.1]).sample(&g).unwrap();
    let dt = 1e-3;
    let stride = (spacing / dt).round() as usize;
    evolve(&SolverConfig::new(&g, dt, 0.4).with_stride(stride), &u0).unwrap()
}

#[test]
fn virial_identity_holds_for_a_smooth_convex_weight() {
    let w = BracketWeight { length: 1.0 };
    let mut res = Vec::new();
    for h in [0.1, 0.05, 0.025] {
        let tr = bracket_trajectory(h);
        let rep = virial_residual(&tr, &w, 0, tr.len() - 1).unwrap();
        assert!(rep.positive, "{rep:?}");
        assert!(rep.action_change > 0.0);
        res.push(rep.residual);
    }
    for p in res.windows(2) {
        let ratio = p[0] / p[1];
        assert!((3.5..=4.5).contains(&ratio), "ratios from {res:?}");
    }

    let tr = bracket_trajectory(0.1);
    let rep = virial_residual(&tr, &LinearWeight { direction: [1.0, 0.5] }, 0, tr.len() - 1).unwrap();
    assert!(rep.residual < 1e-9, "{rep:?}");
}

#[test]
fn point_mass_weights_are_rejected_by_the_virial_check() {
    let g = grid(32, 16.0);
    let u = Gaussian::new(1.0, 1.0).sample(&g).unwrap();
    let tr = Trajectory::from_snapshots(0.0, 0.1, vec![u.clone(), u]).unwrap();
    let w = WeightSpec::build(4.0).unwrap();
    assert!(matches!(virial_residual(&tr, &w, 0, 1), Err(Error::PointMassWeight)));
}

fn brute_interaction(u1: &Field<f64>, u2: &Field<f64>, w: &WeightSpec<f64>) -> f64 {
    let g = u1.grid();
    let current = |u: &Field<f64>| {
        let gu = gradient(u).unwrap();
        (0..g.len())
            .map(|i| {
                let c = u.values()[i].conj();
                [(c * gu[0].values()[i]).im, (c * gu[1].values()[i]).im]
            })
            .collect::<Vec<_>>()
    };
    let (p1, p2) = (current(u1), current(u2));
    let (r1, r2) = (u1.density(), u2.density());
    let mut s = 0.0;
    for x in 0..g.len() {
        for y in 0..g.len() {
            let (a, b) = (g.position(x), g.position(y));
            let k = w.gradient([a[0] - b[0], a[1] - b[1]]);
            s += (p1[x][0] * k[0] + p1[x][1] * k[1]) * r2[y];
            s -= (p2[y][0] * k[0] + p2[y][1] * k[1]) * r1[x];
        }
    }
    2.0 * s * g.cell_measure() * g.cell_measure()
}

#[test]
fn interaction_action_matches_direct_summation() {
    let g = grid(16, 8.0);
    let w = WeightSpec::build(2.0).unwrap();
    for seed in 0..10u64 {
        let u1 = random_band_limited(&g, 0.6, seed).unwrap();
        let u2 = random_band_limited(&g, 0.6, seed + 100).unwrap();
        let fast = interaction_action(&u1, &u2, &w).unwrap();
        let slow = brute_interaction(&u1, &u2, &w);
        assert!((fast - slow).abs() < 1e-9 * slow.abs().max(1.0), "{fast} vs {slow}");
    }
}

#[test]
fn interaction_action_is_translation_invariant() {
    let g = grid(64, 32.0);
    let w = WeightSpec::build(3.0).unwrap();
    let shift = 2.0;
    let make = |c: [f64; 2]| {
        let a = Gaussian::new(1.0, 1.0).with_velocity([0.25, 0.0]).with_center([c[0] - 3.0, c[1]]).sample(&g).unwrap();
        let b = Gaussian::new(0.8, 1.2).with_velocity([-0.2, 0.1]).with_center([c[0] + 2.0, c[1] + 1.0]).sample(&g).unwrap();
        interaction_action(&a, &b, &w).unwrap()
    };
    let base = make([0.0, 0.0]);
    let moved = make([shift, -shift]);
    assert!(rel(moved, base) < 1e-8, "{base} vs {moved}");
}

#[test]
fn commutator_vanishes_for_low_frequencies() {
    let g = grid(32, 8.0);
    let u = random_band_limited(&g, 0.5, 3).unwrap().scale(4.0);
    let c = commutator(&u, 2.0, 0.5).unwrap();
    assert!(c.max_abs() < 1e-12 * u.max_abs().powi(3));
    let (a, b) = commutator_l2(&u, 2.0, 0.5).unwrap();
    assert!(a < 1e-12 && b < 1e-11);
    let hi = random_band_limited(&g, 1.9, 3).unwrap().scale(4.0);
    assert!(commutator(&hi, 0.5, 0.5).unwrap().max_abs() > 1e-3);
}

fn signed(k: usize, n: usize) -> i64 {
    if k < n / 2 { k as i64 } else { k as i64 - n as i64 }
}

fn naive_dft(values: &[Complex<f64>], n: usize, sign: f64) -> Vec<Complex<f64>> {
    let mut out = vec![Complex::new(0.0, 0.0); n * n];
    for k1 in 0..n {
        for k2 in 0..n {
            let mut s = Complex::new(0.0, 0.0);
            for j1 in 0..n {
                for j2 in 0..n {
                    let ph = sign * 2.0 * PI * ((k1 * j1 + k2 * j2) % n) as f64 / n as f64;
                    s += values[j1 * n + j2] * Complex::from_polar(1.0, ph);
                }
            }
            out[k1 * n + k2] = s;
        }
    }
    out
}

#[test]
fn commutator_matches_cyclic_triple_convolution() {
    let n = 16;
    let l = 4.0;
    let g = grid(n, l);
    let (nn, s) = (0.5, 0.5);
    let u = random_band_limited(&g, 1.5, 11).unwrap().scale(3.0);
    let a: Vec<Complex<f64>> = naive_dft(u.values(), n, -1.0)
        .into_iter()
        .map(|c| c / (n * n) as f64)
        .collect();
    let m = |k: usize| {
        let (i, j) = (signed(k / n, n) as f64, signed(k % n, n) as f64);
        i_symbol(i.hypot(j) / l, nn, s)
    };
    let ma: Vec<Complex<f64>> = (0..n * n).map(|k| a[k] * m(k)).collect();
    let idx = |i: i64, j: i64| (i.rem_euclid(n as i64) * n as i64 + j.rem_euclid(n as i64)) as usize;
    let triple = |c: &[Complex<f64>], target: usize| {
        let (ti, tj) = ((target / n) as i64, (target % n) as i64);
        let mut sum = Complex::new(0.0, 0.0);
        for k1 in 0..n * n {
            let (i1, j1) = ((k1 / n) as i64, (k1 % n) as i64);
            for k2 in 0..n * n {
                let (i2, j2) = ((k2 / n) as i64, (k2 % n) as i64);
                let k3 = idx(ti - i1 + i2, tj - j1 + j2);
                sum += c[k1] * c[k2].conj() * c[k3];
            }
        }
        sum
    };
    let keep = |k: usize| {
        let (i, j) = (signed(k / n, n).abs() as usize, signed(k % n, n).abs() as usize);
        3 * i < n && 3 * j < n
    };
    let want: Vec<Complex<f64>> = (0..n * n)
        .map(|k| {
            if keep(k) {
                triple(&a, k) * m(k) - triple(&ma, k)
            } else {
                Complex::new(0.0, 0.0)
            }
        })
        .collect();
    let want = naive_dft(&want, n, 1.0);
    let got = commutator(&u, nn, s).unwrap();
    let scale = got.max_abs();
    assert!(scale > 1e-3);
    for (x, y) in got.values().iter().zip(&want) {
        assert!((x - y).norm() < 1e-9 * scale.max(1.0));
    }
}

fn brute_error_density(u: &Field<f64>, w: &WeightSpec<f64>, nn: f64, s: f64) -> f64 {
    let g = u.grid();
    let v = i_operator(u, nn, s).unwrap();
    let c = commutator(u, nn, s).unwrap();
    let gv = gradient(&v).unwrap();
    let gc = gradient(&c).unwrap();
    let (v, c) = (v.values(), c.values());
    let mut total = 0.0;
    for x in 0..g.len() {
        for y in 0..g.len() {
            let (p, q) = (g.position(x), g.position(y));
            let k = w.gradient([p[0] - q[0], p[1] - q[1]]);
            // F = C(x) v(y) + v(x) C(y), U = v(x) v(y) on the doubled space
            let f = c[x] * v[y] + v[x] * c[y];
            let uu = v[x] * v[y];
            for j in 0..2 {
                let du_x = gv[j].values()[x] * v[y];
                let du_y = v[x] * gv[j].values()[y];
                let df_x = gc[j].values()[x] * v[y] + gv[j].values()[x] * c[y];
                let df_y = c[x] * gv[j].values()[y] + v[x] * gc[j].values()[y];
                let bx = (f * du_x.conj() - uu * df_x.conj()).re;
                let by = (f * du_y.conj() - uu * df_y.conj()).re;
                total += k[j] * bx - k[j] * by;
            }
        }
    }
    total * g.cell_measure() * g.cell_measure()
}

#[test]
fn error_density_matches_four_dimensional_sum() {
    let g = grid(16, 8.0);
    let w = WeightSpec::build(2.0).unwrap();
    let kernel = InteractionKernel::new(&g, &w).unwrap();
    let (nn, s) = (0.5, 0.5);
    for seed in [1u64, 2, 3] {
        let u = random_band_limited(&g, 0.9, seed).unwrap().scale(3.0);
        let fast = error_density(&kernel, &u, nn, s).unwrap();
        let slow = brute_error_density(&u, &w, nn, s);
        assert!(slow.abs() > 1e-8);
        assert!((fast - slow).abs() < 1e-8 * slow.abs().max(1.0), "{fast} vs {slow}");
    }
}

#[test]
fn error_term_report_is_consistent() {
    let g = grid(128, 16.0);
    let u0 = Gaussian::new(1.5, 1.0).with_velocity([0.4, 0.0]).sample(&g).unwrap();
    let tr = evolve(&SolverConfig::new(&g, 1e-2, 0.1).with_stride(5), &u0).unwrap();
    let w = WeightSpec::build(2.0).unwrap();
    let rep = error_term(&tr, 0.5, 0.5, &w).unwrap();
    assert!(rep.c0 >= 0.0 && rep.c1 >= 0.0 && rep.z > 0.0);
    assert!((rep.bound - (rep.c0 + rep.c1) * rep.z.powi(3)).abs() <= 1e-12 * rep.bound.max(1.0));
    assert!(rep.value.is_finite());
}

#[test]
fn diagnostics_columns() {
    assert_eq!(
        DiagnosticsRecord::COLUMNS.join(","),
        "t,mass,energy,e_iu,px,py,ma,ma2,l4acc,c0,c1"
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn mass_is_phase_invariant(seed in 0u64..1000, theta in 0.0..6.28f64) {
        let g = grid(16, 4.0);
        let u = random_band_limited(&g, 1.0, seed).unwrap();
        let v = u.map(|z| z * Complex::from_polar(1.0, theta)).unwrap();
        prop_assert!((mass(&u) - mass(&v)).abs() < 1e-12);
        prop_assert!((energy(&u).unwrap() - energy(&v).unwrap()).abs() < 1e-10);
        let (pu, pv) = (momentum(&u), momentum(&v));
        prop_assert!((pu[0] - pv[0]).abs() < 1e-10 && (pu[1] - pv[1]).abs() < 1e-10);
    }

    #[test]
    fn bracket_is_antisymmetric(seed in 0u64..1000) {
        let g = grid(16, 4.0);
        let f = random_band_limited(&g, 1.0, seed).unwrap();
        let h = random_band_limited(&g, 1.0, seed + 1).unwrap();
        let a = momentum_bracket(&f, &h).unwrap();
        let b = momentum_bracket(&h, &f).unwrap();
        for j in 0..2 {
            for (x, y) in a.component(j).iter().zip(b.component(j)) {
                prop_assert!((x + y).abs() < 1e-12);
            }
        }
    }
}
