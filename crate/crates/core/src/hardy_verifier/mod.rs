//! Numerical Hardy constants of magnetic forms.
//!
//! In spherical coordinates and the transversal gauge the substitution
//! `ψ = r^{-(d-2)/2} g` turns `h_B[ψ] - c_d ∫|ψ|²/|x|²` into
//! `∫∫ (|∂_r g|² + r^{-2} |(∇_σ - i𝖠)g|²) r dr dσ`, the same form that defines
//! `μ_B(R)`. Everything here discretizes that form on a polar finite-volume mesh.

mod trials;

pub use trials::{
    aux_inequality_check, diamagnetic_check, diamagnetic_sides, free_hardy_quotient, free_hardy_trials, hardy_minimizing_quotient,
    AuxReport, DiamagneticReport,
};

use std::str::FromStr;

use num_complex::Complex;

use crate::error::{invalid, MagheatError, Result};
use crate::field_forms::{poincare_gauge, spherical_pullback, total_flux, MagneticField, SphericalPotential};
use crate::linalg::{CsrMatrix, EigenSettings, HermitianPencil, TripletBuilder};
use crate::quadrature::GaussLegendre;
use crate::real::{from_usize, lit, Real};
use crate::sphere_spectrum::{angular_links, AngularMesh};

/// Right-hand side weight of a Hardy inequality.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HardyWeight {
    /// Unweighted `L²(D_R)`: the local constant `μ_B(R)`.
    None,
    /// `1/(1 + |x|² log²|x|)`.
    Log,
    /// `1/(1 + |x|²)` (Laptev–Weidl).
    LaptevWeidl,
}

impl HardyWeight {
    pub fn name(self) -> &'static str {
        match self {
            Self::None => "none",
            Self::Log => "log",
            Self::LaptevWeidl => "lw",
        }
    }

    pub fn eval<T: Real>(self, r: T) -> T {
        match self {
            Self::None => T::one(),
            Self::Log => {
                let l = r * r.ln();
                (T::one() + l * l).recip()
            }
            Self::LaptevWeidl => (T::one() + r * r).recip(),
        }
    }
}

impl FromStr for HardyWeight {
    type Err = MagheatError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Self::None),
            "log" => Ok(Self::Log),
            "lw" => Ok(Self::LaptevWeidl),
            other => Err(invalid("weight", format!("unknown weight `{other}` (none, log, lw)"))),
        }
    }
}

/// Polar mesh resolution: radial cells and the angular mesh of `S^{d-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HardyMesh {
    pub radial: usize,
    pub angular: AngularMesh,
}

impl HardyMesh {
    /// 64 radial cells; 64 circle nodes in d = 2, (12, 24) sphere cells in d = 3.
    pub fn standard(d: usize) -> Self {
        match d {
            3 => Self {
                radial: 64,
                angular: AngularMesh::Sphere(12, 24),
            },
            _ => Self {
                radial: 64,
                angular: AngularMesh::Circle(64),
            },
        }
    }
}

/// Discretized form and weight Gram matrix on a polar mesh.
///
/// Unknowns sit at cell centers `(r_i, σ_a)`. Radial links carry no phase
/// because the potential is transversal; the inner face is a natural boundary
/// and the outer face is either natural or Dirichlet.
#[derive(Debug, Clone)]
pub struct FormAssembly<T> {
    faces: Vec<T>,
    centers: Vec<T>,
    angular: AngularMesh,
    pencil: HermitianPencil<T>,
}

impl<T: Real> FormAssembly<T> {
    pub fn assemble(
        potential: &SphericalPotential<T>,
        faces: Vec<T>,
        angular: AngularMesh,
        weight: HardyWeight,
        outer_dirichlet: bool,
    ) -> Result<Self> {
        let n_r = faces.len().saturating_sub(1);
        if n_r < 2 || faces.windows(2).any(|w| !(w[1] > w[0])) || faces[0] < T::zero() {
            return Err(invalid("faces", "need an increasing list of at least three radial faces"));
        }
        let centers: Vec<T> = faces
            .windows(2)
            .map(|w| if w[0] > T::zero() { (w[0] * w[1]).sqrt() } else { (w[0] + w[1]) * lit(0.5) })
            .collect();
        let na = angular.len();
        let mut b = TripletBuilder::new(n_r * na);
        let mut mass = vec![T::zero(); n_r * na];
        let rule = GaussLegendre::<T>::new(4);
        let mut areas = Vec::new();
        for i in 0..n_r {
            let (lo, hi, c) = (faces[i], faces[i + 1], centers[i]);
            let links = angular_links(potential, c, angular)?;
            // ∫ r^{-1} dr over the cell, midpoint rule on the cell touching the origin
            let ring = if lo > T::zero() { (hi / lo).ln() } else { (hi - lo) / c };
            for &(a, bb, w, alpha) in &links.links {
                b.add_link(i * na + a, i * na + bb, w * ring, alpha);
            }
            let radial_mass = rule.integrate(lo, hi, |r| weight.eval(r) * r);
            for (a, &area) in links.areas.iter().enumerate() {
                mass[i * na + a] = radial_mass * area;
            }
            areas = links.areas;
        }
        for i in 0..n_r - 1 {
            let f = faces[i + 1];
            let dr = centers[i + 1] - centers[i];
            for (a, &area) in areas.iter().enumerate() {
                b.add_link(i * na + a, (i + 1) * na + a, f * area / dr, T::zero());
            }
        }
        if outer_dirichlet {
            let f = faces[n_r];
            let dr = f - centers[n_r - 1];
            for (a, &area) in areas.iter().enumerate() {
                let k = (n_r - 1) * na + a;
                b.add(k, k, Complex::new(f * area / dr, T::zero()));
            }
        }
        Ok(Self {
            faces,
            centers,
            angular,
            pencil: HermitianPencil::new(b.build(), mass),
        })
    }

    pub fn faces(&self) -> &[T] {
        &self.faces
    }

    pub fn centers(&self) -> &[T] {
        &self.centers
    }

    pub fn angular(&self) -> AngularMesh {
        self.angular
    }

    pub fn form_matrix(&self) -> &CsrMatrix<T> {
        &self.pencil.stiffness
    }

    /// Diagonal Gram matrix of the weight.
    pub fn weight_matrix(&self) -> &[T] {
        &self.pencil.mass
    }

    pub fn rayleigh(&self, x: &[Complex<T>]) -> T {
        self.pencil.rayleigh(x)
    }

    /// Smallest generalized eigenvalue of `(form, weight)`.
    pub fn lowest(&self) -> Result<T> {
        let settings = EigenSettings {
            tol: lit::<T>(1e-9).max(T::epsilon() * lit(1e3)),
            ..EigenSettings::default()
        };
        Ok(self.pencil.lowest(1, &settings)?.values[0].max(T::zero()))
    }
}

/// Estimated Hardy constant with its mesh and truncation data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HardyEstimate<T> {
    pub constant: T,
    pub weight: HardyWeight,
    pub mesh: HardyMesh,
    /// Radius of the computational disk (`R` for `μ_B`, `r_out` otherwise).
    pub truncation: T,
    /// `|c(2 r_out) - c(r_out)| / c(r_out)`; absent for `μ_B`.
    pub sensitivity: Option<T>,
}

fn potential_of<T: Real>(field: &MagneticField<T>) -> Result<SphericalPotential<T>> {
    Ok(spherical_pullback(&poincare_gauge(field, 64)?))
}

fn check_mesh<T: Real>(field: &MagneticField<T>, mesh: &HardyMesh) -> Result<()> {
    if mesh.angular.dimension() != field.dimension() {
        return Err(MagheatError::DimensionMismatch {
            expected: field.dimension(),
            found: mesh.angular.dimension(),
        });
    }
    if mesh.radial < 8 {
        return Err(invalid("mesh", "need at least 8 radial cells"));
    }
    Ok(())
}

/// `μ_B(R)` for a given spherical potential.
pub fn mu_b_with_potential<T: Real>(potential: &SphericalPotential<T>, radius: T, mesh: HardyMesh) -> Result<HardyEstimate<T>> {
    if !(radius > T::zero()) {
        return Err(invalid("R", "radius must be positive"));
    }
    let faces = (0..=mesh.radial).map(|k| radius * from_usize(k) / from_usize(mesh.radial)).collect();
    let asm = FormAssembly::assemble(potential, faces, mesh.angular, HardyWeight::None, false)?;
    Ok(HardyEstimate {
        constant: asm.lowest()?,
        weight: HardyWeight::None,
        mesh,
        truncation: radius,
        sensitivity: None,
    })
}

/// `μ_B(R)`: lowest eigenvalue of the magnetic form on `D_R` in `L²(|x|^{-(d-2)} dx)`,
/// without boundary condition.
pub fn mu_b<T: Real>(field: &MagneticField<T>, radius: T, mesh: HardyMesh) -> Result<HardyEstimate<T>> {
    check_mesh(field, &mesh)?;
    mu_b_with_potential(&potential_of(field)?, radius, mesh)
}

/// Inner radius of the logarithmic mesh used for global constants.
pub const INNER_RADIUS: f64 = 1e-3;

fn log_faces<T: Real>(r_in: T, r_out: T, n: usize) -> Vec<T> {
    let ratio = (r_out / r_in).ln();
    (0..=n)
        .map(|k| r_in * (ratio * from_usize(k) / from_usize(n)).exp())
        .collect()
}

/// `ν_B(∞) = dist(Φ, ℤ)²` in d = 2 and 0 in d = 3.
pub fn nu_infinity<T: Real>(field: &MagneticField<T>) -> Result<T> {
    if field.dimension() != 2 {
        return Ok(T::zero());
    }
    let b = total_flux(field, 16)?.beta();
    Ok(b * b)
}

/// Global Hardy constant for `weight`, on `D_{r_out}` with a Dirichlet cut.
///
/// The form is discretized on a mesh logarithmic in `r` from `10⁻³ R` to
/// `r_out`; the estimate is repeated at `2 r_out` to report a truncation
/// sensitivity. [`HardyWeight::None`] is delegated to [`mu_b`] with `R = r_out`.
pub fn hardy_constant<T: Real>(field: &MagneticField<T>, weight: HardyWeight, r_out: T, mesh: HardyMesh) -> Result<HardyEstimate<T>> {
    check_mesh(field, &mesh)?;
    if weight == HardyWeight::None {
        return mu_b(field, r_out, mesh);
    }
    let big_r = field.support_radius();
    if r_out < big_r * lit(10.0) {
        return Err(invalid("r_out", "truncation radius must be at least 10 R"));
    }
    if weight == HardyWeight::LaptevWeidl {
        if field.dimension() != 2 {
            return Err(MagheatError::Hypothesis("the Laptev–Weidl weight needs d = 2".into()));
        }
        if nu_infinity(field)? <= lit(1e-20) {
            return Err(MagheatError::Hypothesis(
                "the Laptev–Weidl weight needs ν_B(∞) ≠ 0, but the total flux is an integer".into(),
            ));
        }
    }
    let scale = if big_r > T::zero() { big_r } else { T::one() };
    hardy_constant_with_potential(&potential_of(field)?, weight, scale * lit(INNER_RADIUS), r_out, mesh)
}

/// [`hardy_constant`] for a given potential and inner radius, without hypothesis checks.
pub fn hardy_constant_with_potential<T: Real>(
    potential: &SphericalPotential<T>,
    weight: HardyWeight,
    r_in: T,
    r_out: T,
    mesh: HardyMesh,
) -> Result<HardyEstimate<T>> {
    if !(r_in > T::zero() && r_out > r_in) {
        return Err(invalid("r_out", "need 0 < r_in < r_out"));
    }
    let estimate = |r: T, cells: usize| -> Result<T> {
        FormAssembly::assemble(potential, log_faces(r_in, r, cells), mesh.angular, weight, true)?.lowest()
    };
    // the doubled domain keeps the same radial density of cells
    let extra = ((lit::<T>(2.0)).ln() / (r_out / r_in).ln() * from_usize(mesh.radial))
        .ceil()
        .to_usize()
        .unwrap_or(1);
    let c1 = estimate(r_out, mesh.radial)?;
    let c2 = estimate(r_out * lit(2.0), mesh.radial + extra)?;
    Ok(HardyEstimate {
        constant: c1,
        weight,
        mesh,
        truncation: r_out,
        sensitivity: Some(if c1 > T::zero() { (c2 - c1).abs() / c1 } else { (c2 - c1).abs() }),
    })
}

/// `a_R = inf_{0<r<R} (1 + r²)/(1 + r² log² r)`.
pub fn lw_a_r<T: Real>(radius: T) -> T {
    let n = 20_000;
    (1..=n)
        .map(|k| {
            let r = radius * from_usize(k) / from_usize(n);
            let l = r * r.ln();
            (T::one() + r * r) / (T::one() + l * l)
        })
        .fold(T::infinity(), T::min)
}

/// `min(c_{d,B} a_R, ν_B(∞))/2`, a lower bound for the Laptev–Weidl constant.
///
/// Adding `h ≥ c a_R ∫_{D_R} |ψ|²/(1+|x|²)` and `h ≥ ν_B(∞) ∫_{D_R^c} |ψ|²/(1+|x|²)`
/// only controls the full integral with the smaller of the two constants.
pub fn lw_lower_bound<T: Real>(c_log: T, radius: T, nu_inf: T) -> T {
    (c_log * lw_a_r(radius)).min(nu_inf) * lit(0.5)
}

/// The averaged value `(c_{d,B} a_R + ν_B(∞))/2`.
///
/// Not a lower bound in general: it exceeds `ν_B(∞)` whenever `c a_R > ν_B(∞)`,
/// while the Laptev–Weidl constant never does (trial functions spread out at infinity).
pub fn lw_averaged_bound<T: Real>(c_log: T, radius: T, nu_inf: T) -> T {
    (c_log * lw_a_r(radius) + nu_inf) * lit(0.5)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_names_round_trip() {
        for w in [HardyWeight::None, HardyWeight::Log, HardyWeight::LaptevWeidl] {
            assert_eq!(w.name().parse::<HardyWeight>().unwrap(), w);
        }
        assert!("cubic".parse::<HardyWeight>().is_err());
    }

    #[test]
    fn weights_at_one() {
        assert_eq!(HardyWeight::Log.eval(1.0f64), 1.0);
        assert_eq!(HardyWeight::LaptevWeidl.eval(1.0f64), 0.5);
    }

    #[test]
    fn a_r_is_positive_and_below_one() {
        let a = lw_a_r(1.0f64);
        assert!(a > 0.0 && a <= 1.0 + 1e-12);
    }

    #[test]
    fn mesh_dimension_checked() {
        let f = MagneticField::<f64>::zero(2).unwrap();
        assert!(mu_b(&f, 1.0, HardyMesh::standard(3)).is_err());
    }
}
