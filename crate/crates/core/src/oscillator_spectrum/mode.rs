//! One angular mode of the self-similar operator `L_s` as a P1 finite-element pencil.
//!
//! With `φ = ρ^{-(d-2)/2} g` the radial problem becomes
//! `-(1/ρ)(ρ g')' + ν_eff(ρ)/ρ² g + ρ²/16 g = λ g` in `L²(ρ dρ)` for both d = 2
//! and d = 3; the critical Hardy term `c_d/ρ²` is absorbed by the substitution.

use crate::error::{invalid, Result};
use crate::field_forms::FluxProfile;
use crate::linalg::{SymTridiag, TridiagPencil};
use crate::quadrature::GaussLegendre;
use crate::real::{from_i64, lit, Real};

use super::grid::RadialGrid;

/// `c_d = ((d - 2)/2)²`.
pub fn hardy_cd<T: Real>(d: usize) -> T {
    let h = (lit::<T>(d as f64) - lit(2.0)) * lit(0.5);
    h * h
}

/// Effective angular eigenvalue `ν_eff(ρ)` entering the mode problem.
#[derive(Debug, Clone, PartialEq)]
pub enum ModePotential<T> {
    /// Constant `ν` (model problems and the limit operator `L_∞`).
    Constant(T),
    /// `ν_eff(ρ) = (m - Φ_B(e^{s/2} ρ))²` for a radial planar field.
    ScaledFlux { profile: FluxProfile<T>, mode: i64, s: T },
}

impl<T: Real> ModePotential<T> {
    pub fn nu_eff(&self, rho: T) -> T {
        match self {
            Self::Constant(nu) => *nu,
            Self::ScaledFlux { profile, mode, s } => {
                let v = from_i64::<T>(*mode) - profile.flux_at((*s * lit(0.5)).exp() * rho);
                v * v
            }
        }
    }

    /// `ν_eff` at the origin, where the field has not yet threaded any flux.
    pub fn nu_origin(&self) -> T {
        match self {
            Self::Constant(nu) => *nu,
            Self::ScaledFlux { mode, .. } => {
                let m = from_i64::<T>(*mode);
                m * m
            }
        }
    }

    /// `(ρ_sat, ν)` with `ν_eff ≡ ν` on `[ρ_sat, ∞)`.
    pub fn saturation(&self) -> (T, T) {
        match self {
            Self::Constant(nu) => (T::zero(), *nu),
            Self::ScaledFlux { profile, mode, s } => {
                let v = from_i64::<T>(*mode) - profile.total_flux();
                (profile.saturation_radius() * (-*s * lit(0.5)).exp(), v * v)
            }
        }
    }

    /// The `s → ∞` limit: constant `(m - Φ_B)²`.
    pub fn limit(&self) -> Self {
        Self::Constant(self.saturation().1)
    }
}

/// Precomputed element data for repeated assembly on a fixed grid.
///
/// The last node carries a Dirichlet condition; the first node is closed by
/// the power-law solution `g ∝ ρ^{√ν}` on `(0, ρ_min)`, which contributes
/// `√ν |g_0|²` to the form and `ρ_min²/(2√ν + 2) |g_0|²` to the mass.
#[derive(Debug, Clone)]
pub struct ModeAssembler<T> {
    nodes: Vec<T>,
    base: SymTridiag<T>,
    mass_bulk: SymTridiag<T>,
    inv_rho: Vec<[T; 3]>,
    quad: Vec<[[T; 4]; 4]>,
}

impl<T: Real> ModeAssembler<T> {
    pub fn new(grid: &RadialGrid<T>) -> Self {
        let nodes = grid.nodes().to_vec();
        let n_free = nodes.len() - 1;
        let rule = GaussLegendre::<T>::new(4);
        let mut base = SymTridiag::zeros(n_free);
        let mut mass = SymTridiag::zeros(n_free);
        let mut inv_rho = Vec::with_capacity(n_free);
        let mut quad = Vec::with_capacity(n_free);
        let sixteenth: T = lit(1.0 / 16.0);
        for e in 0..n_free {
            let (a, b) = (nodes[e], nodes[e + 1]);
            let h = b - a;
            let mut k = [T::zero(); 3];
            let mut m = [T::zero(); 3];
            let mut ir = [T::zero(); 3];
            let mut q = [[T::zero(); 4]; 4];
            for (qi, (rho, w)) in rule.mapped(a, b).enumerate() {
                let p0 = (b - rho) / h;
                let p1 = (rho - a) / h;
                let prod = [p0 * p0, p0 * p1, p1 * p1];
                for t in 0..3 {
                    m[t] += w * rho * prod[t];
                    k[t] += w * rho * rho * rho * sixteenth * prod[t];
                    ir[t] += w / rho * prod[t];
                }
                q[qi] = [rho, w / rho * prod[0], w / rho * prod[1], w / rho * prod[2]];
            }
            // ∫ ρ g'² over the element with g' = (g1 - g0)/h
            let mid = (a + b) * lit(0.5);
            let grad = mid / h;
            k[0] += grad;
            k[1] -= grad;
            k[2] += grad;
            add_local(&mut base, e, n_free, k);
            add_local(&mut mass, e, n_free, m);
            inv_rho.push(ir);
            quad.push(q);
        }
        Self {
            nodes,
            base,
            mass_bulk: mass,
            inv_rho,
            quad,
        }
    }

    /// All grid nodes (the last one is the Dirichlet node).
    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    /// Unknowns `g(ρ_0), …, g(ρ_{n-2})`.
    pub fn free_nodes(&self) -> &[T] {
        &self.nodes[..self.nodes.len() - 1]
    }

    pub fn unknowns(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Mass matrix of `L²(ρ dρ)` with the inner closure for `potential`.
    pub fn mass(&self, potential: &ModePotential<T>) -> SymTridiag<T> {
        let mut m = self.mass_bulk.clone();
        let a = potential.nu_origin().max(T::zero()).sqrt();
        let r0 = self.nodes[0];
        m.diag[0] += r0 * r0 / (lit::<T>(2.0) * a + lit(2.0));
        m
    }

    /// Stiffness matrix of the quadratic form of one mode.
    pub fn stiffness(&self, potential: &ModePotential<T>) -> SymTridiag<T> {
        let n_free = self.unknowns();
        let mut k = self.base.clone();
        let (rho_sat, nu_sat) = potential.saturation();
        for e in 0..n_free {
            let c = if self.nodes[e] >= rho_sat {
                let ir = &self.inv_rho[e];
                [nu_sat * ir[0], nu_sat * ir[1], nu_sat * ir[2]]
            } else {
                let mut c = [T::zero(); 3];
                for q in &self.quad[e] {
                    let nu = potential.nu_eff(q[0]);
                    c[0] += nu * q[1];
                    c[1] += nu * q[2];
                    c[2] += nu * q[3];
                }
                c
            };
            add_local(&mut k, e, n_free, c);
        }
        k.diag[0] += potential.nu_eff(self.nodes[0]).max(T::zero()).sqrt();
        k
    }

    pub fn pencil(&self, potential: &ModePotential<T>) -> TridiagPencil<T> {
        TridiagPencil::new(self.stiffness(potential), self.mass(potential))
    }
}

fn add_local<T: Real>(m: &mut SymTridiag<T>, e: usize, n_free: usize, c: [T; 3]) {
    m.diag[e] += c[0];
    if e + 1 < n_free {
        m.diag[e + 1] += c[2];
        m.off[e] += c[1];
    }
}

/// Discretized radial operator for one angular mode.
#[derive(Debug, Clone)]
pub struct ModeOperator<T> {
    dimension: usize,
    potential: ModePotential<T>,
    assembler: ModeAssembler<T>,
    pencil: TridiagPencil<T>,
}

impl<T: Real> ModeOperator<T> {
    pub fn new(dimension: usize, potential: ModePotential<T>, grid: &RadialGrid<T>) -> Result<Self> {
        crate::field_forms::MagneticField::<T>::zero(dimension)?;
        if let ModePotential::Constant(nu) = potential {
            if nu < T::zero() {
                return Err(invalid("nu", "angular eigenvalue must be nonnegative"));
            }
        }
        let assembler = ModeAssembler::new(grid);
        let pencil = assembler.pencil(&potential);
        Ok(Self {
            dimension,
            potential,
            assembler,
            pencil,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn potential(&self) -> &ModePotential<T> {
        &self.potential
    }

    /// `V(ρ) = (ν_eff(ρ) - c_d)/ρ² + ρ²/16` acting on `φ = ρ^{-(d-2)/2} g`.
    pub fn mode_potential(&self, rho: T) -> T {
        (self.potential.nu_eff(rho) - hardy_cd::<T>(self.dimension)) / (rho * rho) + rho * rho / lit(16.0)
    }

    pub fn assembler(&self) -> &ModeAssembler<T> {
        &self.assembler
    }

    pub fn pencil(&self) -> &TridiagPencil<T> {
        &self.pencil
    }

    pub fn free_nodes(&self) -> &[T] {
        self.assembler.free_nodes()
    }

    /// The `k`-th smallest eigenvalue, `k ≥ 1`.
    pub fn eigenvalue(&self, k: usize) -> Result<T> {
        if k == 0 {
            return Err(invalid("k", "eigenvalue index starts at 1"));
        }
        self.pencil.eigenvalue(k - 1, T::zero(), lit(1e-14))
    }

    /// `M`-normalized eigenvector of the `k`-th eigenvalue, as samples of `g`.
    pub fn eigenvector(&self, k: usize) -> Result<Vec<T>> {
        let lam = self.eigenvalue(k)?;
        self.pencil.eigenvector(lam)
    }

    /// Rayleigh quotient of samples of `g` on the free nodes.
    pub fn rayleigh(&self, g: &[T]) -> T {
        self.pencil.rayleigh(g)
    }
}

/// `k`-th smallest eigenvalue of a mode operator, `k ≥ 1`.
pub fn mode_eigenvalue<T: Real>(op: &ModeOperator<T>, k: usize) -> Result<T> {
    op.eigenvalue(k)
}
