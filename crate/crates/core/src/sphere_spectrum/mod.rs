//! `ν_B(r)`: lowest eigenvalue of `(-i∇_σ - 𝖠(σ, r))²` on the unit sphere S^{d-1}.

mod circle;
mod links;
mod sphere;

pub use circle::{nu_circle_exact, nu_circle_numeric, CircleOperator};
pub use links::{angular_links, AngularLinks, AngularMesh};
pub use sphere::{nu_sphere_numeric, SphereOperator};

use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::field_forms::{
    central_difference, poincare_gauge, spherical_pullback, total_flux, MagneticField,
    SphericalPotential, DEFAULT_GAUGE_NODES,
};
use crate::real::{from_usize, lit, Real};

/// Grid sizes used by [`nu_profile`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NuResolution {
    /// Circle nodes (d = 2 numeric path only).
    pub n_theta: usize,
    /// Latitude–longitude mesh for d = 3.
    pub sphere_grid: (usize, usize),
    pub gauge_nodes: usize,
}

impl Default for NuResolution {
    fn default() -> Self {
        Self {
            n_theta: 512,
            sphere_grid: (24, 48),
            gauge_nodes: DEFAULT_GAUGE_NODES,
        }
    }
}

/// `r ↦ ν_B(r)` sampled on a list of radii.
#[derive(Debug, Clone, PartialEq)]
pub struct NuProfile<T> {
    pub radii: Vec<T>,
    pub values: Vec<T>,
    /// `ν_B(∞)`, taken at the largest radius `≥ R` (or at `2R` when none is given).
    pub nu_infinity: T,
}

/// ν profile of a field: exact `dist(Φ_B(r), ℤ)²` in d = 2, sphere eigenvalues in d = 3.
pub fn nu_profile<T: Real>(field: &MagneticField<T>, radii: &[T], resolution: NuResolution) -> Result<NuProfile<T>> {
    if radii.iter().any(|&r| !(r > T::zero())) {
        return Err(invalid("radii", "radii must be positive"));
    }
    if radii.windows(2).any(|w| w[1] < w[0]) {
        return Err(invalid("radii", "radii must be sorted"));
    }
    let big_r = field.support_radius();
    let inf_radius = radii
        .iter()
        .rev()
        .find(|&&r| r >= big_r)
        .copied()
        .unwrap_or(big_r * lit(2.0));
    if field.dimension() == 2 {
        let flux = total_flux(field, 16)?;
        let values = radii.iter().map(|&r| nu_circle_exact(flux.flux_at(r))).collect();
        return Ok(NuProfile {
            radii: radii.to_vec(),
            values,
            nu_infinity: nu_circle_exact(flux.flux_at(inf_radius)),
        });
    }
    let potential = spherical_pullback(&poincare_gauge(field, resolution.gauge_nodes)?);
    let values = radii
        .par_iter()
        .map(|&r| nu_sphere_numeric(&potential, r, resolution.sphere_grid))
        .collect::<Result<Vec<T>>>()?;
    let nu_infinity = match radii.iter().position(|&r| r == inf_radius) {
        Some(k) => values[k],
        None => nu_sphere_numeric(&potential, inf_radius, resolution.sphere_grid)?,
    };
    Ok(NuProfile {
        radii: radii.to_vec(),
        values,
        nu_infinity,
    })
}

/// Closedness of `𝖠(·, r)` as a 1-form on the sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactnessReport<T> {
    /// `max |∂_φ 𝖠_θ - ∂_θ 𝖠_φ|` on the sample grid (identically 0 on S¹).
    pub residual: T,
    /// Whether closedness is equivalent to `ν_B(r) = 0` (true on S², false on S¹).
    pub equivalence_holds: bool,
}

/// Finite-difference closedness residual of the pulled-back potential.
pub fn exactness_check<T: Real>(potential: &SphericalPotential<T>, r: T, h: T) -> Result<ExactnessReport<T>> {
    if !(h > T::zero()) {
        return Err(invalid("h", "step must be positive"));
    }
    if potential.dimension() == 2 {
        return Ok(ExactnessReport {
            residual: T::zero(),
            equivalence_holds: false,
        });
    }
    let (n_phi, n_theta) = (16usize, 32usize);
    let mut worst = T::zero();
    for i in 0..n_phi {
        // stay clear of the coordinate singularities at the poles
        let phi = lit::<T>(0.1) + (T::PI() - lit(0.2)) * (from_usize::<T>(i) + lit(0.5)) / from_usize(n_phi);
        for j in 0..n_theta {
            let th = T::PI() * lit(2.0) * from_usize(j) / from_usize(n_theta);
            let d_phi_a_theta = central_difference(|t| potential.covariant(&[phi + t, th], r)[1], h);
            let d_theta_a_phi = central_difference(|t| potential.covariant(&[phi, th + t], r)[0], h);
            worst = worst.max((d_phi_a_theta - d_theta_a_phi).abs());
        }
    }
    Ok(ExactnessReport {
        residual: worst,
        equivalence_holds: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_values() {
        assert_eq!(nu_circle_exact(0.0f64), 0.0);
        assert_eq!(nu_circle_exact(0.5f64), 0.25);
        assert!((nu_circle_exact(1.3f64) - 0.09).abs() < 1e-15);
    }

    #[test]
    fn free_circle_is_zero() {
        let p = SphericalPotential::constant_circle(0.0f64);
        assert!(nu_circle_numeric(&p, 1.0, 128).unwrap().abs() < 1e-10);
    }

    #[test]
    fn small_circle_grid_rejected() {
        let p = SphericalPotential::constant_circle(0.0f64);
        assert!(nu_circle_numeric(&p, 1.0, 16).is_err());
    }

    #[test]
    fn d2_exactness_flags_exception() {
        let p = SphericalPotential::constant_circle(0.5f64);
        let rep = exactness_check(&p, 1.0, 1e-3).unwrap();
        assert_eq!(rep.residual, 0.0);
        assert!(!rep.equivalence_holds);
        assert!((nu_circle_numeric(&p, 1.0, 256).unwrap() - 0.25).abs() < 1e-3);
    }
}
