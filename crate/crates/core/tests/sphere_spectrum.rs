use magheat_core::field_forms::*;
use magheat_core::sphere_spectrum::*;
use nalgebra::DMatrix;
use num_complex::Complex;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn radial_potential(flux: f64) -> SphericalPotential<f64> {
    let f = make_field(2, &FieldSpec::radial_bump(flux, 1.0)).unwrap();
    spherical_pullback(&poincare_gauge(&f, 64).unwrap())
}

/// Smallest eigenvalue of the circle operator by a dense Hermitian eigensolver.
fn dense_lowest(op: &CircleOperator<f64>) -> f64 {
    let n = op.n_theta();
    let h = 2.0 * std::f64::consts::PI / n as f64;
    let k = op.matrix().to_dense();
    let m = DMatrix::from_fn(n, n, |i, j| k[i][j] / h);
    let eig = m.symmetric_eigen();
    eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
}

#[test]
fn constant_potential_matches_dense_oracle() {
    let op = CircleOperator::assemble(&SphericalPotential::constant_circle(0.5f64), 1.0, 256).unwrap();
    let it = op.lowest(1).unwrap()[0];
    assert!((it - dense_lowest(&op)).abs() < 1e-9);
    assert!((it - 0.25).abs() < 1e-3);
    assert!(op.matrix().hermiticity_defect() < 1e-14);
}

#[test]
fn integer_flux_gauges_away() {
    let nu = nu_circle_numeric(&SphericalPotential::constant_circle(1.0f64), 1.0, 256).unwrap();
    assert!(nu.abs() < 1e-6);
}

#[test]
fn circle_matches_sawtooth_at_512() {
    for &phi in &[0.0, 0.3, 0.5, 0.7, 1.0, 1.3] {
        let nu = nu_circle_numeric(&radial_potential(phi), 2.0, 512).unwrap();
        assert!((nu - nu_circle_exact(phi)).abs() < 1e-4, "Φ = {phi}: {nu}");
    }
}

#[test]
fn circle_convergence_is_second_order() {
    let p = radial_potential(0.3);
    let ns = [64usize, 128, 256, 512];
    let errs: Vec<f64> = ns
        .iter()
        .map(|&n| (nu_circle_numeric(&p, 2.0, n).unwrap() - 0.09).abs())
        .collect();
    let xs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    let mx = xs.iter().sum::<f64>() / 4.0;
    let my = ys.iter().sum::<f64>() / 4.0;
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    assert!(-slope >= 1.8, "order {}", -slope);
}

#[test]
fn gauge_shift_leaves_spectrum_unchanged() {
    let p = radial_potential(0.3);
    let shifted = p.circle_gauge_shift(|th| 0.7 * (3.0 * th).cos() - 0.2 * th.sin());
    let a = nu_circle_numeric(&p, 0.6, 512).unwrap();
    let b = nu_circle_numeric(&shifted, 0.6, 512).unwrap();
    assert!((a - b).abs() < 1e-6);
}

#[test]
fn profile_rises_to_quarter_and_saturates() {
    let f = make_field(2, &FieldSpec::radial_bump(0.5f64, 1.0)).unwrap();
    let radii: Vec<f64> = (1..=30).map(|k| 0.1 * k as f64).collect();
    let prof = nu_profile(&f, &radii, NuResolution::default()).unwrap();
    let flux = total_flux(&f, 16).unwrap();
    for (r, v) in prof.radii.iter().zip(&prof.values) {
        let oracle = (flux.flux_at(*r) - flux.flux_at(*r).round()).powi(2);
        assert!((v - oracle).abs() < 1e-14);
        if *r >= 1.0 {
            assert!((v - 0.25).abs() < 1e-8);
        }
    }
    assert!(prof.values.windows(2).all(|w| w[1] >= w[0] - 1e-15));
    assert!((prof.nu_infinity - 0.25).abs() < 1e-8);
}

#[test]
fn numeric_circle_tracks_profile_inside_support() {
    let f = make_field(2, &FieldSpec::radial_bump(0.5f64, 1.0)).unwrap();
    let p = spherical_pullback(&poincare_gauge(&f, 64).unwrap());
    let flux = total_flux(&f, 16).unwrap();
    for &r in &[0.3, 0.6, 0.9] {
        let nu = nu_circle_numeric(&p, r, 512).unwrap();
        assert!((nu - nu_circle_exact(flux.flux_at(r))).abs() < 1e-5);
        assert!(nu > 0.0);
    }
}

#[test]
fn numeric_circle_finds_the_lowest_branch() {
    // past Φ(r) = 1/2 the ground state moves to k = 1 while the constant
    // vector is still an exact eigenvector
    for flux in [1.0f64, 1.3] {
        let f = make_field(2, &FieldSpec::radial_bump(flux, 1.0)).unwrap();
        let p = spherical_pullback(&poincare_gauge(&f, 64).unwrap());
        let prof = total_flux(&f, 16).unwrap();
        for &r in &[0.3, 0.5, 0.55, 0.7, 0.9, 2.0] {
            let nu = nu_circle_numeric(&p, r, 512).unwrap();
            let exact = nu_circle_exact(prof.flux_at(r));
            assert!((nu - exact).abs() < 1e-4, "flux {flux}, r {r}: {nu} vs {exact}");
        }
    }
}

#[test]
fn free_sphere_spectrum() {
    let zero = MagneticField::<f64>::zero(3).unwrap();
    let p = spherical_pullback(&poincare_gauge(&zero, 16).unwrap());
    let op = SphereOperator::assemble(&p, 1.0, (24, 48)).unwrap();
    let vals = op.lowest(4).unwrap();
    assert!(vals[0].abs() < 1e-8);
    for v in &vals[1..4] {
        assert!((v - 2.0).abs() < 0.05, "{vals:?}");
    }
    assert!(op.matrix().hermiticity_defect() < 1e-14);
}

#[test]
fn sphere_nu_vanishes_outside_support() {
    let f = make_field(3, &FieldSpec::exact_3d(1.0f64, 1.0)).unwrap();
    let p = spherical_pullback(&poincare_gauge(&f, 64).unwrap());
    let r = 2.0 * f.support_radius();
    let nu = nu_sphere_numeric(&p, r, (24, 48)).unwrap();
    assert!(nu.abs() < 1e-3, "ν = {nu}");
    let rep = exactness_check(&p, r, 1e-3).unwrap();
    assert!(rep.residual < 1e-6);
    assert!(rep.equivalence_holds);
}

#[test]
fn sphere_eigenvalue_is_below_random_rayleigh_quotients() {
    let f = make_field(3, &FieldSpec::exact_3d(3.0f64, 1.0)).unwrap();
    let p = spherical_pullback(&poincare_gauge(&f, 64).unwrap());
    let op = SphereOperator::assemble(&p, 0.6, (16, 32)).unwrap();
    let nu = op.lowest(1).unwrap()[0];
    assert!(nu > 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let n = 16 * 32;
    let mut best = f64::INFINITY;
    for _ in 0..1000 {
        let x: Vec<Complex<f64>> = (0..n)
            .map(|_| Complex::new(1.0 + 0.3 * rng.random_range(-1.0..1.0), 0.3 * rng.random_range(-1.0..1.0)))
            .collect();
        best = best.min(op.rayleigh(&x));
    }
    assert!(best - nu >= 0.0);
    // inside the support the pulled-back form is not closed
    let rep = exactness_check(&p, 0.6, 1e-3).unwrap();
    assert!(rep.residual > 1e-3);
}

proptest! {
    #[test]
    fn integer_shift_and_reflection(phi in -5.0f64..5.0, m in -4i32..4) {
        let base = nu_circle_exact(phi);
        prop_assert_eq!(nu_circle_exact(-phi), base);
        let shifted = nu_circle_exact(phi + m as f64);
        prop_assert!((shifted - base).abs() < 1e-12);
        prop_assert!((0.0..=0.25).contains(&base));
    }

    #[test]
    fn circle_form_is_nonnegative(phases in proptest::collection::vec(-3.0f64..3.0, 32), re in proptest::collection::vec(-1.0f64..1.0, 32), im in proptest::collection::vec(-1.0f64..1.0, 32)) {
        let op = CircleOperator::from_phases(phases);
        let x: Vec<Complex<f64>> = re.iter().zip(&im).map(|(a, b)| Complex::new(*a, *b)).collect();
        prop_assert!(op.matrix().herm_form(&x) >= -1e-12);
    }
}
