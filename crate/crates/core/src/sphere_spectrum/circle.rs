//! Magnetic Laplacian on the unit circle.

use num_complex::Complex;

use crate::error::{invalid, Result};
use crate::field_forms::{dist_to_integers, SphericalPotential};
use crate::linalg::{CsrMatrix, EigenSettings, HermitianPencil, TripletBuilder};
use crate::real::{from_usize, lit, Real};

use super::links::{angular_links, AngularMesh};

/// `ν = dist(Φ, ℤ)²`, the lowest eigenvalue of `(-i d/dθ - Φ)²` on S¹.
pub fn nu_circle_exact<T: Real>(flux_at_r: T) -> T {
    let b = dist_to_integers(flux_at_r);
    b * b
}

/// `(-i d/dθ - 𝖠_θ)²` on a uniform periodic grid.
///
/// Each link `θ_j → θ_{j+1}` carries the parallel transport phase
/// `α_j = ∫ 𝖠_θ dθ`, and the quadratic form is `Σ_j |e^{-iα_j} ψ_{j+1} - ψ_j|² / h`
/// with mass `h` per node. Gauge shifts `𝖠_θ → 𝖠_θ + f'` change the phases by
/// `f(θ_{j+1}) - f(θ_j)`, so the discrete spectrum is exactly gauge invariant.
#[derive(Debug, Clone)]
pub struct CircleOperator<T> {
    n_theta: usize,
    phases: Vec<T>,
    pencil: HermitianPencil<T>,
}

impl<T: Real> CircleOperator<T> {
    pub fn assemble(potential: &SphericalPotential<T>, r: T, n_theta: usize) -> Result<Self> {
        if n_theta < 32 {
            return Err(invalid("n_theta", format!("need at least 32 nodes, got {n_theta}")));
        }
        let phases = angular_links(potential, r, AngularMesh::Circle(n_theta))?
            .links
            .into_iter()
            .map(|l| l.3)
            .collect();
        Ok(Self::from_phases(phases))
    }

    /// Operator from explicit link phases.
    pub fn from_phases(phases: Vec<T>) -> Self {
        let n = phases.len();
        let h = T::PI() * lit(2.0) / from_usize(n);
        let mut b = TripletBuilder::new(n);
        for (j, &alpha) in phases.iter().enumerate() {
            b.add_link(slot(j, n), slot((j + 1) % n, n), T::one() / h, alpha);
        }
        Self {
            n_theta: n,
            phases,
            pencil: HermitianPencil::new(b.build(), vec![h; n]),
        }
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn phases(&self) -> &[T] {
        &self.phases
    }

    /// Enclosed flux `Σ α_j / 2π`.
    pub fn holonomy_flux(&self) -> T {
        self.phases.iter().copied().sum::<T>() / (T::PI() * lit(2.0))
    }

    /// Stiffness matrix in the interleaved node numbering (see [`slot`]).
    pub fn matrix(&self) -> &CsrMatrix<T> {
        &self.pencil.stiffness
    }

    pub fn pencil(&self) -> &HermitianPencil<T> {
        &self.pencil
    }

    /// Rayleigh quotient of a grid function given in angular order.
    pub fn rayleigh(&self, x: &[Complex<T>]) -> T {
        let n = self.n_theta;
        let mut y = vec![Complex::new(T::zero(), T::zero()); n];
        for (j, &v) in x.iter().enumerate() {
            y[slot(j, n)] = v;
        }
        self.pencil.rayleigh(&y)
    }

    /// The `count` lowest eigenvalues.
    pub fn lowest(&self, count: usize) -> Result<Vec<T>> {
        Ok(self.pencil.lowest(count, &EigenSettings::default())?.values)
    }

    /// Closed form of the discrete spectrum for constant `𝖠_θ`: `(2/h · sin((k - Φ)h/2))²`.
    pub fn uniform_dispersion(n_theta: usize, flux: T, k: i64) -> T {
        let h = T::PI() * lit(2.0) / from_usize(n_theta);
        let kf: T = crate::real::from_i64(k);
        let s = lit::<T>(2.0) / h * ((kf - flux) * h * lit(0.5)).sin();
        s * s
    }
}

/// Matrix row of ring node `j`: nodes are numbered 0, n-1, 1, n-2, ... so the
/// periodic link stays inside a band of width 2.
pub fn slot(j: usize, n: usize) -> usize {
    if 2 * j < n {
        2 * j
    } else {
        2 * (n - 1 - j) + 1
    }
}

/// Lowest eigenvalue of the discretized circle operator at radius `r`.
pub fn nu_circle_numeric<T: Real>(potential: &SphericalPotential<T>, r: T, n_theta: usize) -> Result<T> {
    let op = CircleOperator::assemble(potential, r, n_theta)?;
    Ok(op.lowest(1)?[0])
}
