//! Magnetic 2-forms, their Poincaré-gauge potentials, Hodge duals and fluxes.

mod field;
mod flux;
mod gauge;

pub use field::{
    bump_integral, make_field, pointwise_norm, Bump, BumpOneForm, Components, FieldPreset,
    FieldSpec, MagneticField,
};
pub use flux::{dist_to_integers, total_flux, FluxProfile};
pub use gauge::{
    poincare_gauge, sphere_frame, spherical_pullback, GaugePotential, SphericalPotential,
    DEFAULT_GAUGE_NODES,
};

use crate::error::{invalid, MagheatError, Result};
use crate::real::{from_usize, lit, Real};

/// Sixth-order central difference `f'(0)` with step `h`.
pub fn central_difference<T: Real, F: FnMut(T) -> T>(mut f: F, h: T) -> T {
    let mut diff = |k: f64| {
        let t = h * lit(k);
        f(t) - f(-t)
    };
    (lit::<T>(45.0) * diff(1.0) - lit::<T>(9.0) * diff(2.0) + diff(3.0)) / (h * lit(60.0))
}

/// `*B` at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HodgeDual<T> {
    /// d = 2: the scalar `B_12`.
    Scalar(T),
    /// d = 3: `(*B)^l = ½ ε^{ljk} B_jk`.
    Vector([T; 3]),
}

/// Levi-Civita symbol in three indices.
pub fn levi_civita(i: usize, j: usize, k: usize) -> i32 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1,
        _ => 0,
    }
}

pub fn hodge_dual<T: Real>(field: &MagneticField<T>, x: &[T]) -> HodgeDual<T> {
    let b = field.components(x);
    if field.dimension() == 2 {
        return HodgeDual::Scalar(b[0][1]);
    }
    let mut v = [T::zero(); 3];
    for (l, vl) in v.iter_mut().enumerate() {
        for j in 0..3 {
            for k in 0..3 {
                let e = levi_civita(l, j, k);
                if e != 0 {
                    *vl += lit::<T>(0.5 * e as f64) * b[j][k];
                }
            }
        }
    }
    HodgeDual::Vector(v)
}

fn shifted<T: Real>(x: &[T], dir: usize, t: T) -> [T; 3] {
    let mut y = [T::zero(); 3];
    y[..x.len()].copy_from_slice(x);
    y[dir] += t;
    y
}

/// `max |B_kl,j + B_lj,k + B_jk,l|` over sample points and index triples.
///
/// Derivatives use the sixth-order central stencil.
pub fn closedness_residual<T: Real>(field: &MagneticField<T>, points: &[Vec<T>], h: T) -> Result<T> {
    if points.is_empty() {
        return Err(MagheatError::EmptySamples);
    }
    if !(h > T::zero()) {
        return Err(invalid("h", "step must be positive"));
    }
    let d = field.dimension();
    let mut worst = T::zero();
    for x in points {
        // grads[j][k][l] = ∂_j B_kl
        let mut grads = [[[T::zero(); 3]; 3]; 3];
        for (j, gj) in grads.iter_mut().enumerate().take(d) {
            for k in 0..d {
                for l in 0..d {
                    gj[k][l] = central_difference(|t| field.components(&shifted(x, j, t)[..d])[k][l], h);
                }
            }
        }
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    let c = grads[j][k][l] + grads[k][l][j] + grads[l][j][k];
                    worst = worst.max(c.abs());
                }
            }
        }
    }
    Ok(worst)
}

/// Pointwise diagnostics of a gauge against its field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaugeReport<T> {
    /// `max |x·A(x)|`.
    pub transversality: T,
    /// `max |A_k,j - A_j,k - B_jk|` over points inside the support ball.
    pub curl_error: T,
    /// `max (|A(x)| - R²‖B‖∞/|x|)` over points outside the support ball; nonpositive when the bound holds.
    pub decay_excess: T,
}

/// Checks transversality, `dA = B` and the exterior decay bound at the given points.
pub fn gauge_report<T: Real>(gauge: &GaugePotential<T>, points: &[Vec<T>], h: T) -> Result<GaugeReport<T>> {
    if points.is_empty() {
        return Err(MagheatError::EmptySamples);
    }
    let field = gauge.field();
    let d = field.dimension();
    let radius = field.support_radius();
    let bound = radius * radius * field.sup_norm();
    let mut rep = GaugeReport {
        transversality: T::zero(),
        curl_error: T::zero(),
        decay_excess: -T::infinity(),
    };
    for x in points {
        let a = gauge.eval(x);
        let r = x.iter().map(|&v| v * v).sum::<T>().sqrt();
        let dot: T = (0..d).map(|i| x[i] * a[i]).sum();
        rep.transversality = rep.transversality.max(dot.abs());
        if r > radius {
            let norm = a.iter().map(|&v| v * v).sum::<T>().sqrt();
            rep.decay_excess = rep.decay_excess.max(norm - bound / r);
        } else {
            let mut grads = [[T::zero(); 3]; 3];
            for (j, gj) in grads.iter_mut().enumerate().take(d) {
                for (k, gjk) in gj.iter_mut().enumerate().take(d) {
                    *gjk = central_difference(|t| gauge.eval(&shifted(x, j, t)[..d])[k], h);
                }
            }
            let b = field.components(x);
            for j in 0..d {
                for k in 0..d {
                    let err = grads[j][k] - grads[k][j] - b[j][k];
                    rep.curl_error = rep.curl_error.max(err.abs());
                }
            }
        }
    }
    Ok(rep)
}

/// `n` quasi-uniform points on the unit sphere in ℝ³ (Fibonacci lattice).
pub fn fibonacci_sphere<T: Real>(n: usize) -> Vec<[T; 3]> {
    let golden = T::PI() * (lit::<T>(3.0) - lit::<T>(5.0).sqrt());
    (0..n)
        .map(|i| {
            let z = T::one() - (from_usize::<T>(i) + lit(0.5)) * lit::<T>(2.0) / from_usize(n);
            let rad = (T::one() - z * z).max(T::zero()).sqrt();
            let th = golden * from_usize(i);
            [rad * th.cos(), rad * th.sin(), z]
        })
        .collect()
}

/// `max |(*B)(x)·x|` over `n_samples` quasi-uniform points on the sphere of radius `r` in ℝ³.
pub fn radial_projection_check<T: Real>(field: &MagneticField<T>, r: T, n_samples: usize) -> Result<T> {
    if field.dimension() != 3 {
        return Err(MagheatError::DimensionMismatch {
            expected: 3,
            found: field.dimension(),
        });
    }
    if !(r > T::zero()) {
        return Err(invalid("r", "radius must be positive"));
    }
    if n_samples == 0 {
        return Err(MagheatError::EmptySamples);
    }
    let mut worst = T::zero();
    for s in fibonacci_sphere::<T>(n_samples) {
        let x = [s[0] * r, s[1] * r, s[2] * r];
        if let HodgeDual::Vector(v) = hodge_dual(field, &x) {
            worst = worst.max((v[0] * x[0] + v[1] * x[1] + v[2] * x[2]).abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hodge_dual_definitions() {
        let f = make_field(2, &FieldSpec::radial_bump(0.5, 1.0)).unwrap();
        let x = [0.2, 0.1];
        assert_eq!(hodge_dual(&f, &x), HodgeDual::Scalar(f.components(&x)[0][1]));
        let g = make_field(3, &FieldSpec::exact_3d(1.0, 1.0)).unwrap();
        let x = [0.1, -0.2, 0.3];
        let b = g.components(&x);
        assert_eq!(hodge_dual(&g, &x), HodgeDual::Vector([b[1][2], b[2][0], b[0][1]]));
    }

    #[test]
    fn sixth_order_difference() {
        let d = central_difference(|t: f64| (1.0 + t).sin(), 1e-2);
        assert!((d - 1f64.cos()).abs() < 1e-13);
    }

    #[test]
    fn levi_civita_is_antisymmetric() {
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    assert_eq!(levi_civita(i, j, k), -levi_civita(j, i, k));
                }
            }
        }
    }

    #[test]
    fn zero_field_checks() {
        let f = MagneticField::<f64>::zero(3).unwrap();
        let pts = vec![vec![0.1, 0.2, 0.3]];
        assert_eq!(closedness_residual(&f, &pts, 1e-3).unwrap(), 0.0);
        assert_eq!(radial_projection_check(&f, 0.5, 50).unwrap(), 0.0);
        assert!(closedness_residual(&f, &[], 1e-3).is_err());
    }
}
