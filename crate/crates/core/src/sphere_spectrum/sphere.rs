//! Magnetic Laplace–Beltrami operator on S² on a cell-centered latitude–longitude mesh.

use num_complex::Complex;

use crate::error::{invalid, Result};
use crate::field_forms::SphericalPotential;
use crate::linalg::{CsrMatrix, EigenSettings, HermitianPencil, TripletBuilder};
use crate::real::Real;

use super::links::{angular_links, AngularMesh};

/// Finite-volume discretization of `∫ |(d' - i𝖠)φ|² dσ` over S².
///
/// Unknowns sit at cell centers `φ_i = (i + ½)Δφ`, `θ_j = jΔθ`, so no node lies on
/// a pole; the polar caps close the mesh with zero-flux faces. Each link carries
/// the line integral of the covariant potential along it.
#[derive(Debug, Clone)]
pub struct SphereOperator<T> {
    n_phi: usize,
    n_theta: usize,
    pencil: HermitianPencil<T>,
}

impl<T: Real> SphereOperator<T> {
    pub fn assemble(potential: &SphericalPotential<T>, r: T, grid: (usize, usize)) -> Result<Self> {
        let (n_phi, n_theta) = grid;
        let links = angular_links(potential, r, AngularMesh::Sphere(n_phi, n_theta))?;
        let mut b = TripletBuilder::new(n_phi * n_theta);
        for &(i, j, w, alpha) in &links.links {
            b.add_link(i, j, w, alpha);
        }
        let mass = links.areas;
        Ok(Self {
            n_phi,
            n_theta,
            pencil: HermitianPencil::new(b.build(), mass),
        })
    }

    pub fn grid(&self) -> (usize, usize) {
        (self.n_phi, self.n_theta)
    }

    pub fn matrix(&self) -> &CsrMatrix<T> {
        &self.pencil.stiffness
    }

    /// Cell areas.
    pub fn metric_weights(&self) -> &[T] {
        &self.pencil.mass
    }

    pub fn pencil(&self) -> &HermitianPencil<T> {
        &self.pencil
    }

    pub fn rayleigh(&self, x: &[Complex<T>]) -> T {
        self.pencil.rayleigh(x)
    }

    pub fn lowest(&self, count: usize) -> Result<Vec<T>> {
        Ok(self.pencil.lowest(count, &EigenSettings::default())?.values)
    }
}

/// Lowest eigenvalue of the discretized magnetic Laplace–Beltrami operator on S².
pub fn nu_sphere_numeric<T: Real>(potential: &SphericalPotential<T>, r: T, grid: (usize, usize)) -> Result<T> {
    if !(r > T::zero()) {
        return Err(invalid("r", "radius must be positive"));
    }
    SphereOperator::assemble(potential, r, grid)?.lowest(1).map(|v| v[0])
}
