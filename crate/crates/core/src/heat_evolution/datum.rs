//! Self-similar variables, initial data and closed-form reference solutions.

use crate::error::{invalid, MagheatError, Result};
use crate::field_forms::FluxProfile;
use crate::real::{lit, to_f64, Real};

/// `(x, t) ↔ (y, s)` with `y = (t + 1)^{-1/2} x`, `s = log(t + 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SelfSimilarMap {
    dimension: usize,
}

impl SelfSimilarMap {
    pub fn new(dimension: usize) -> Result<Self> {
        if !(2..=3).contains(&dimension) {
            return Err(MagheatError::UnsupportedDimension(dimension));
        }
        Ok(Self { dimension })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn forward<T: Real>(&self, x: &[T], t: T) -> (Vec<T>, T) {
        let scale = (T::one() + t).sqrt().recip();
        (x.iter().map(|&v| v * scale).collect(), t.ln_1p())
    }

    pub fn inverse<T: Real>(&self, y: &[T], s: T) -> (Vec<T>, T) {
        let scale = (s * lit(0.5)).exp();
        (y.iter().map(|&v| v * scale).collect(), s.exp_m1())
    }

    /// `e^{sd/4}`, the factor in `ũ(y, s) = e^{sd/4} u(e^{s/2} y, e^s - 1)`.
    pub fn amplitude<T: Real>(&self, s: T) -> T {
        (s * lit(self.dimension as f64 / 4.0)).exp()
    }
}

/// Initial data with a single angular factor `e^{imθ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Datum<T> {
    Zero,
    /// `u₀ = ρ^p e^{-aρ²} e^{imθ}`; needs `a > 1/8` to lie in `L²_w`.
    Gaussian { a: T, power: T, mode: i64 },
    /// `u₀ = w^{-1/2} ψ₁ = e^{-ρ²/4}`, so that `ṽ(·, 0) = e^{-ρ²/8}`.
    EigenMode,
}

impl<T: Real> Datum<T> {
    /// `e^{-ρ²/4} ρ^{|m|} e^{imθ}`.
    pub fn gaussian(mode: i64) -> Self {
        Self::Gaussian {
            a: lit(0.25),
            power: lit(mode.unsigned_abs() as f64),
            mode,
        }
    }

    /// Gaussian datum in the angular mode nearest to the flux, the slowest decaying one.
    pub fn gaussian_for_flux(flux: T) -> Self {
        Self::gaussian(to_f64(flux.round()) as i64)
    }

    pub fn mode(&self) -> Option<i64> {
        match self {
            Self::Zero => None,
            Self::Gaussian { mode, .. } => Some(*mode),
            Self::EigenMode => Some(0),
        }
    }

    pub(crate) fn check(&self) -> Result<()> {
        if let Self::Gaussian { a, power, .. } = self {
            if !(*a > lit(0.125)) {
                return Err(MagheatError::NotWeighted(format!(
                    "Gaussian rate a = {} must exceed 1/8",
                    to_f64(*a)
                )));
            }
            if *power < T::zero() {
                return Err(invalid("power", "radial power must be nonnegative"));
            }
        }
        Ok(())
    }

    /// Radial profile of `ṽ(·, 0) = w^{1/2} u₀` at `ρ`.
    pub fn weighted_radial(&self, rho: T) -> T {
        match self {
            Self::Zero => T::zero(),
            Self::Gaussian { a, power, .. } => rho.powf(*power) * ((lit::<T>(0.125) - *a) * rho * rho).exp(),
            Self::EigenMode => (-rho * rho / lit(8.0)).exp(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceKind {
    /// `ṽ = e^{-s/2} e^{-ρ²/8}` for `B = 0`.
    FreeEigenmode,
    /// `ṽ = e^{-λs} ρ^β e^{-ρ²/8}` with `λ = (1 + β)/2`, valid outside `D_{R e^{-s/2}}`.
    ExteriorAbEigenmode,
}

/// Radial profile of a closed-form self-similar solution at `(ρ, s)`.
pub fn exact_reference_solution<T: Real>(kind: ReferenceKind, profile: &FluxProfile<T>, s: T, rho: T) -> Result<T> {
    let gauss = (-rho * rho / lit(8.0)).exp();
    match kind {
        ReferenceKind::FreeEigenmode => Ok((-s * lit(0.5)).exp() * gauss),
        ReferenceKind::ExteriorAbEigenmode => {
            let limit = profile.saturation_radius() * (-s * lit(0.5)).exp();
            if rho <= limit {
                return Err(MagheatError::InsideCore {
                    rho: to_f64(rho),
                    limit: to_f64(limit),
                });
            }
            let beta = profile.beta();
            let lambda = (T::one() + beta) * lit(0.5);
            Ok((-lambda * s).exp() * rho.powf(beta) * gauss)
        }
    }
}
