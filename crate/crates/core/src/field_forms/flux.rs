//! Planar flux profiles `r ↦ Φ_B(r)`.

use crate::error::{invalid, MagheatError, Result};
use crate::field_forms::field::MagneticField;
use crate::quadrature::{periodic_trapezoid, GaussLegendre};
use crate::real::{from_usize, lit, Real};

const TABLE_PANELS: usize = 1024;
const ANGULAR_NODES: usize = 1024;

/// Partial flux `Φ_B(r) = (1/2π) ∫_{D_r} *B`, tabulated on `[0, R]` and constant beyond.
///
/// Values between table nodes use cubic Hermite interpolation with the exact
/// derivative `Φ_B'(r) = r · mean_θ *B(r, θ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FluxProfile<T> {
    radius: T,
    values: Vec<T>,
    slopes: Vec<T>,
    total: T,
}

/// Distance from `x` to the nearest integer.
pub fn dist_to_integers<T: Real>(x: T) -> T {
    (x - x.round()).abs()
}

/// Flux profile of a planar field; `n_quad` is the Gauss–Legendre order per radial panel.
pub fn total_flux<T: Real>(field: &MagneticField<T>, n_quad: usize) -> Result<FluxProfile<T>> {
    if field.dimension() != 2 {
        return Err(MagheatError::DimensionMismatch {
            expected: 2,
            found: field.dimension(),
        });
    }
    if n_quad == 0 {
        return Err(invalid("n_quad", "must be positive"));
    }
    if field.is_zero() {
        return Ok(FluxProfile::constant(T::zero()));
    }
    let radius = field.support_radius();
    let rule = GaussLegendre::<T>::new(n_quad);
    let angular = if field.is_radial() { 1 } else { ANGULAR_NODES };
    let two_pi = T::PI() * lit(2.0);
    // r · mean_θ *B(r, θ)
    let density = |r: T| -> T {
        if angular == 1 {
            return r * field.star_scalar(&[r, T::zero()]);
        }
        let mean = periodic_trapezoid(two_pi, angular, |th| {
            let (s, c) = th.sin_cos();
            field.star_scalar(&[r * c, r * s])
        }) / two_pi;
        r * mean
    };
    let h = radius / from_usize(TABLE_PANELS);
    let mut values = Vec::with_capacity(TABLE_PANELS + 1);
    let mut slopes = Vec::with_capacity(TABLE_PANELS + 1);
    let mut acc = T::zero();
    values.push(acc);
    slopes.push(density(T::zero()));
    for k in 0..TABLE_PANELS {
        let a = h * from_usize(k);
        let b = a + h;
        acc += rule.integrate(a, b, density);
        values.push(acc);
        slopes.push(density(b));
    }
    Ok(FluxProfile {
        radius,
        values,
        slopes,
        total: acc,
    })
}

impl<T: Real> FluxProfile<T> {
    /// A profile equal to `flux` at every radius (pure Aharonov–Bohm limit).
    pub fn constant(flux: T) -> Self {
        Self {
            radius: T::zero(),
            values: vec![flux],
            slopes: vec![T::zero()],
            total: flux,
        }
    }

    /// Profile with every value multiplied by `factor`.
    pub fn scaled(&self, factor: T) -> Self {
        Self {
            radius: self.radius,
            values: self.values.iter().map(|&v| v * factor).collect(),
            slopes: self.slopes.iter().map(|&v| v * factor).collect(),
            total: self.total * factor,
        }
    }

    /// Radius beyond which the profile is constant.
    pub fn saturation_radius(&self) -> T {
        self.radius
    }

    pub fn total_flux(&self) -> T {
        self.total
    }

    /// `β = dist(Φ_B, ℤ)`.
    pub fn beta(&self) -> T {
        dist_to_integers(self.total)
    }

    /// `Φ_B(r)`.
    pub fn flux_at(&self, r: T) -> T {
        if r >= self.radius || self.values.len() == 1 {
            return self.total;
        }
        if r <= T::zero() {
            return T::zero();
        }
        let panels = self.values.len() - 1;
        let h = self.radius / from_usize(panels);
        let pos = r / h;
        let k = pos.floor().to_usize().unwrap_or(0).min(panels - 1);
        let t = pos - from_usize(k);
        let (y0, y1) = (self.values[k], self.values[k + 1]);
        let (m0, m1) = (self.slopes[k] * h, self.slopes[k + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        let two: T = lit(2.0);
        let three: T = lit(3.0);
        (two * t3 - three * t2 + T::one()) * y0
            + (t3 - two * t2 + t) * m0
            + (three * t2 - two * t3) * y1
            + (t3 - t2) * m1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field_forms::field::{make_field, FieldSpec};

    #[test]
    fn dist_is_sawtooth() {
        assert_eq!(dist_to_integers(0.0f64), 0.0);
        assert!((dist_to_integers(1.3f64) - 0.3).abs() < 1e-15);
        assert!((dist_to_integers(-0.7f64) - 0.3).abs() < 1e-15);
        assert_eq!(dist_to_integers(0.5f64), 0.5);
    }

    #[test]
    fn radial_bump_hits_target_flux() {
        let f = make_field(2, &FieldSpec::radial_bump(1.3f64, 2.0)).unwrap();
        let p = total_flux(&f, 16).unwrap();
        assert!((p.total_flux() - 1.3).abs() < 1e-10);
        assert!((p.beta() - 0.3).abs() < 1e-10);
        assert_eq!(p.flux_at(5.0), p.total_flux());
        assert_eq!(p.flux_at(0.0), 0.0);
    }

    #[test]
    fn needs_planar_field() {
        let f = make_field(3, &FieldSpec::exact_3d(1.0, 1.0)).unwrap();
        assert!(total_flux(&f, 16).is_err());
    }
}
