#![allow(clippy::needless_range_loop)]

use magheat_core::field_forms::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Exponential integral `E1(z)` for `z > 0`: power series below 2, Lentz continued fraction above.
fn e1(z: f64) -> f64 {
    if z <= 2.0 {
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..200 {
            term *= -z / k as f64;
            sum += term / k as f64;
        }
        -0.577_215_664_901_532_9 - z.ln() - sum
    } else {
        // E1(z) = e^{-z} / (z + 1 - 1/(z + 3 - 4/(z + 5 - ...)))
        let tiny = 1e-300;
        let mut b = z + 1.0;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..500 {
            let a = -((i * i) as f64);
            b += 2.0;
            d = 1.0 / (a * d + b);
            c = b + a / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        h * (-z).exp()
    }
}

/// `∫₀^x e^{-1/w} dw`.
fn g_closed(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * (-1.0 / x).exp() - e1(1.0 / x)
    }
}

/// Partial flux of the radial bump preset from the closed form.
fn radial_flux_oracle(total: f64, radius: f64, r: f64) -> f64 {
    let e = g_closed(1.0);
    if r >= radius {
        return total;
    }
    total * (e - g_closed(1.0 - r * r / (radius * radius))) / e
}

fn random_points(rng: &mut ChaCha8Rng, n: usize, d: usize, radius: f64) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..d).map(|_| rng.random_range(-radius..radius)).collect())
        .collect()
}

#[test]
fn bump_integral_oracle() {
    assert!((bump_integral::<f64>() - g_closed(1.0)).abs() < 1e-14);
}

#[test]
fn radial_gauge_matches_flux_oracle() {
    let field = make_field(2, &FieldSpec::radial_bump(0.5f64, 1.0)).unwrap();
    let gauge = poincare_gauge(&field, 64).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for x in random_points(&mut rng, 100, 2, 1.5) {
        let r2 = x[0] * x[0] + x[1] * x[1];
        let phi = radial_flux_oracle(0.5, 1.0, r2.sqrt());
        let a = gauge.eval(&x);
        assert!((a[0] + phi * x[1] / r2).abs() < 1e-8);
        assert!((a[1] - phi * x[0] / r2).abs() < 1e-8);
    }
}

#[test]
fn flux_profile_matches_closed_form() {
    let field = make_field(2, &FieldSpec::radial_bump(0.5f64, 1.0)).unwrap();
    let p = total_flux(&field, 16).unwrap();
    assert!((p.total_flux() - 0.5).abs() < 1e-8);
    assert!((p.beta() - 0.5).abs() < 1e-8);
    for k in 0..=40 {
        let r = k as f64 * 0.03;
        assert!((p.flux_at(r) - radial_flux_oracle(0.5, 1.0, r)).abs() < 1e-9, "r = {r}");
    }
}

#[test]
fn flux_additivity_of_two_bumps() {
    let bumps = vec![
        Bump::<f64> { center: [0.5, 0.0], radius: 0.3, flux: 0.2 },
        Bump { center: [-0.4, 0.3], radius: 0.25, flux: 0.45 },
    ];
    let field = MagneticField::bumps(bumps).unwrap();
    assert!(!field.is_radial());
    let p = total_flux(&field, 16).unwrap();
    assert!((p.total_flux() - 0.65).abs() < 1e-8, "{}", p.total_flux() - 0.65);
}

#[test]
fn gauge_quadrature_self_converges() {
    let fields = [
        make_field(2, &FieldSpec::radial_bump(0.5f64, 1.0)).unwrap(),
        make_field(2, &FieldSpec::two_bump(0.8f64, 1.0)).unwrap(),
        make_field(3, &FieldSpec::exact_3d(1.0f64, 1.0)).unwrap(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for f in &fields {
        let a = poincare_gauge(f, 64).unwrap();
        let b = poincare_gauge(f, 128).unwrap();
        for x in random_points(&mut rng, 200, f.dimension(), 1.3) {
            let (ua, ub) = (a.eval(&x), b.eval(&x));
            for i in 0..3 {
                assert!((ua[i] - ub[i]).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn gauge_invariants_for_all_presets() {
    let fields = [
        make_field(2, &FieldSpec::radial_bump(0.5f64, 1.0)).unwrap(),
        make_field(2, &FieldSpec::two_bump(0.8f64, 1.0)).unwrap(),
        make_field(3, &FieldSpec::exact_3d(1.0f64, 1.0)).unwrap(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for f in &fields {
        let g = poincare_gauge(f, 64).unwrap();
        let r = f.support_radius();
        let inside: Vec<Vec<f64>> = random_points(&mut rng, 300, f.dimension(), r / (f.dimension() as f64).sqrt());
        let outside: Vec<Vec<f64>> = random_points(&mut rng, 300, f.dimension(), 4.0 * r)
            .into_iter()
            .filter(|x| x.iter().map(|v| v * v).sum::<f64>().sqrt() > r)
            .collect();
        let all: Vec<Vec<f64>> = inside.iter().chain(&outside).cloned().collect();
        let rep = gauge_report(&g, &all, 1e-4).unwrap();
        assert!(rep.transversality < 1e-10, "{rep:?}");
        assert!(rep.curl_error < 1e-6, "{rep:?}");
        assert!(rep.decay_excess <= 0.0, "{rep:?}");
    }
}

#[test]
fn exact_3d_is_closed_at_fine_step() {
    let f = make_field(3, &FieldSpec::exact_3d(1.0f64, 1.0)).unwrap();
    let n = 20;
    let pts: Vec<Vec<f64>> = (0..n * n * n)
        .map(|i| {
            let (a, b, c) = (i % n, (i / n) % n, i / (n * n));
            let s = |k: usize| -1.0 + 2.0 * (k as f64 + 0.5) / n as f64;
            vec![s(a), s(b), s(c)]
        })
        .collect();
    let res = closedness_residual(&f, &pts, 1e-3).unwrap();
    assert!(res < 1e-8, "residual {res}");
}

#[test]
fn hodge_dual_brute_force() {
    let f = make_field(3, &FieldSpec::exact_3d(0.7f64, 1.2)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for x in random_points(&mut rng, 50, 3, 0.9) {
        let b = f.components(&x);
        let mut v = [0.0; 3];
        for (l, vl) in v.iter_mut().enumerate() {
            for j in 0..3 {
                for k in 0..3 {
                    *vl += 0.5 * levi_civita(l, j, k) as f64 * b[j][k];
                }
            }
        }
        assert_eq!(hodge_dual(&f, &x), HodgeDual::Vector(v));
    }
    let single = BumpOneForm {
        amplitude: 1.0,
        center: [0.0; 3],
        width: 1.0,
        linear: [[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]],
        offset: [0.0; 3],
    };
    // a = φ(-x2, x1, 0): at the origin only B_12 = 2φ(0) survives
    let f = MagneticField::exact(single).unwrap();
    match hodge_dual(&f, &[0.0, 0.0, 0.0]) {
        HodgeDual::Vector(v) => {
            assert_eq!(v[0], 0.0);
            assert_eq!(v[1], 0.0);
            assert!((v[2] - 2.0 * (-1.0f64).exp()).abs() < 1e-15);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn pullback_saturates_beyond_support() {
    let f = make_field(3, &FieldSpec::exact_3d(1.0f64, 1.0)).unwrap();
    let sp = spherical_pullback(&poincare_gauge(&f, 64).unwrap());
    let r = f.support_radius();
    for k in 0..30 {
        let ang = [0.1 + 0.1 * k as f64, 0.37 * k as f64];
        let a2 = sp.covariant(&ang, 2.0 * r);
        let a3 = sp.covariant(&ang, 3.0 * r);
        let a10 = sp.covariant(&ang, 10.0 * r);
        for i in 0..2 {
            assert!((a2[i] - a3[i]).abs() < 1e-12);
            assert!((a2[i] - a10[i]).abs() < 1e-12);
        }
    }
}

#[test]
fn pullback_vanishes_linearly_at_origin() {
    let f = make_field(3, &FieldSpec::exact_3d(1.0f64, 1.0)).unwrap();
    let sp = spherical_pullback(&poincare_gauge(&f, 64).unwrap());
    let ang = [0.7, 1.9];
    let a1 = sp.covariant(&ang, 1e-3);
    let a2 = sp.covariant(&ang, 5e-4);
    let n1 = a1[0].hypot(a1[1]);
    let n2 = a2[0].hypot(a2[1]);
    assert!(n1 < 1e-3);
    // |𝖠| = O(r²) here since B is bounded; at least linear decay
    assert!(n2 <= 0.6 * n1);
}

#[test]
fn radial_projection_checks() {
    let f = make_field(3, &FieldSpec::exact_3d(1.0f64, 1.0)).unwrap();
    assert_eq!(radial_projection_check(&f, 1.5, 400).unwrap(), 0.0);
    let inside = radial_projection_check(&f, 0.5, 400).unwrap();
    let mut brute: f64 = 0.0;
    for s in fibonacci_sphere::<f64>(400) {
        let x = [0.5 * s[0], 0.5 * s[1], 0.5 * s[2]];
        let b = f.components(&x);
        let v = [b[1][2], b[2][0], b[0][1]];
        brute = brute.max((v[0] * x[0] + v[1] * x[1] + v[2] * x[2]).abs());
    }
    assert!((inside - brute).abs() < 1e-15);
    assert!(inside > 0.0);
    let planar = make_field(2, &FieldSpec::radial_bump(0.5f64, 1.0)).unwrap();
    assert!(radial_projection_check(&planar, 0.5, 10).is_err());
}

#[test]
fn single_precision_gauge() {
    let field = make_field(2, &FieldSpec::radial_bump(0.5f32, 1.0)).unwrap();
    let g = poincare_gauge(&field, 32).unwrap();
    let a = g.eval(&[1.5f32, 0.0]);
    assert!((a[1] - 0.5 / 1.5).abs() < 1e-5);
}

proptest! {
    #[test]
    fn transversality_holds_everywhere(x in -3.0f64..3.0, y in -3.0f64..3.0, z in -3.0f64..3.0) {
        let f = make_field(3, &FieldSpec::exact_3d(1.0f64, 1.0)).unwrap();
        let g = poincare_gauge(&f, 32).unwrap();
        let a = g.eval(&[x, y, z]);
        let r = (x * x + y * y + z * z).sqrt();
        prop_assert!((a[0] * x + a[1] * y + a[2] * z).abs() < 1e-10 * (1.0 + r) * f.sup_norm().max(1.0));
    }

    #[test]
    fn flux_is_linear_in_target(phi in -3.0f64..3.0) {
        let f = make_field(2, &FieldSpec::radial_bump(phi, 1.0)).unwrap();
        let p = total_flux(&f, 16).unwrap();
        prop_assert!((p.total_flux() - phi).abs() < 1e-9);
        prop_assert!(p.beta() >= 0.0 && p.beta() <= 0.5);
    }
}
