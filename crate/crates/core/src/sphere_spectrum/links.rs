//! Link phases and weights of the magnetic form on S¹ and S².

use crate::error::{invalid, MagheatError, Result};
use crate::field_forms::SphericalPotential;
use crate::quadrature::GaussLegendre;
use crate::real::{from_usize, lit, Real};

/// Mesh of the unit sphere `S^{d-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AngularMesh {
    /// `n_theta` uniform nodes on S¹.
    Circle(usize),
    /// `(n_phi, n_theta)` cell-centered latitude–longitude cells on S².
    Sphere(usize, usize),
}

impl AngularMesh {
    pub fn dimension(&self) -> usize {
        match self {
            Self::Circle(_) => 2,
            Self::Sphere(..) => 3,
        }
    }

    pub fn len(&self) -> usize {
        match *self {
            Self::Circle(n) => n,
            Self::Sphere(p, t) => p * t,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Discrete form `Σ w |e^{-iα} ψ_b - ψ_a|²` with cell measures.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularLinks<T> {
    /// `(a, b, weight, phase)`.
    pub links: Vec<(usize, usize, T, T)>,
    pub areas: Vec<T>,
}

/// Links of `(-i∇_σ - 𝖠(·, r))²` on `mesh`; phases are Gauss line integrals of `𝖠`.
pub fn angular_links<T: Real>(potential: &SphericalPotential<T>, r: T, mesh: AngularMesh) -> Result<AngularLinks<T>> {
    if potential.dimension() != mesh.dimension() {
        return Err(MagheatError::DimensionMismatch {
            expected: mesh.dimension(),
            found: potential.dimension(),
        });
    }
    match mesh {
        AngularMesh::Circle(n) => {
            if n < 8 {
                return Err(invalid("n_theta", format!("degenerate circle mesh {n}")));
            }
            let h = T::PI() * lit(2.0) / from_usize(n);
            let rule = GaussLegendre::<T>::new(8);
            let links = (0..n)
                .map(|j| {
                    let a = h * from_usize(j);
                    let alpha = rule.integrate(a, a + h, |th| potential.covariant(&[th], r)[0]);
                    (j, (j + 1) % n, T::one() / h, alpha)
                })
                .collect();
            Ok(AngularLinks {
                links,
                areas: vec![h; n],
            })
        }
        AngularMesh::Sphere(n_phi, n_theta) => {
            if n_phi < 4 || n_theta < 8 {
                return Err(invalid("grid", format!("degenerate latitude-longitude mesh {n_phi}x{n_theta}")));
            }
            let dphi = T::PI() / from_usize(n_phi);
            let dtheta = T::PI() * lit(2.0) / from_usize(n_theta);
            let rule = GaussLegendre::<T>::new(6);
            let idx = |i: usize, j: usize| i * n_theta + (j % n_theta);
            let mut links = Vec::with_capacity(2 * n_phi * n_theta);
            let mut areas = vec![T::zero(); n_phi * n_theta];
            for i in 0..n_phi {
                let top = dphi * from_usize(i);
                let phi = top + dphi * lit(0.5);
                let area = (top.cos() - (top + dphi).cos()) * dtheta;
                let w_theta = dphi / (phi.sin() * dtheta);
                for j in 0..n_theta {
                    areas[idx(i, j)] = area;
                    let th = dtheta * from_usize(j);
                    let alpha = rule.integrate(th, th + dtheta, |t| potential.covariant(&[phi, t], r)[1]);
                    links.push((idx(i, j), idx(i, j + 1), w_theta, alpha));
                    if i + 1 < n_phi {
                        let w_phi = (top + dphi).sin() * dtheta / dphi;
                        let alpha = rule.integrate(phi, phi + dphi, |p| potential.covariant(&[p, th], r)[0]);
                        links.push((idx(i, j), idx(i + 1, j), w_phi, alpha));
                    }
                }
            }
            Ok(AngularLinks { links, areas })
        }
    }
}
