//! Spectra of the self-similar operators `L`, `L_∞` and `L_s`.
//!
//! In the Gaussian-weighted space these operators are unitarily equivalent to
//! the magnetic oscillators `(-i∇ - A_s)² + |y|²/16`, whose radial modes live in
//! [`ModeOperator`].

mod grid;
mod mode;

pub use grid::{RadialGrid, Spacing, DEFAULT_NODES, DEFAULT_RHO_MAX, DEFAULT_RHO_MIN};
pub use mode::{hardy_cd, mode_eigenvalue, ModeAssembler, ModeOperator, ModePotential};

use rayon::prelude::*;

use crate::error::{invalid, MagheatError, Result};
use crate::field_forms::{total_flux, FluxProfile, MagneticField};
use crate::linalg::self_adjoint_norm;
use crate::real::{from_usize, lit, to_f64, Real};

pub use crate::special::laguerre as laguerre_eval;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumMethod {
    Exact,
    Numeric,
}

/// Sorted eigenvalues labelled by `(n, ℓ)` (radial index, angular index).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult<T> {
    pub eigenvalues: Vec<T>,
    pub labels: Vec<(usize, i64)>,
    pub method: SpectrumMethod,
}

impl<T: Real> SpectrumResult<T> {
    fn sorted(mut pairs: Vec<(T, (usize, i64))>, method: SpectrumMethod) -> Self {
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal).then(a.1.cmp(&b.1)));
        let (eigenvalues, labels) = pairs.into_iter().unzip();
        Self {
            eigenvalues,
            labels,
            method,
        }
    }
}

/// `n + (1 + √ν)/2`.
pub fn oscillator_level<T: Real>(n: usize, nu: T) -> T {
    from_usize::<T>(n) + (T::one() + nu.sqrt()) * lit(0.5)
}

/// `σ(L)` with angular eigenvalues `ℓ(ℓ + d - 2)`, for `0 ≤ n ≤ n_max`, `0 ≤ ℓ ≤ l_max`.
pub fn sigma_l_exact<T: Real>(d: usize, n_max: usize, l_max: usize) -> SpectrumResult<T> {
    let mut pairs = Vec::new();
    for l in 0..=l_max {
        let nu = from_usize::<T>(l) * (from_usize::<T>(l + d) - lit(2.0));
        for n in 0..=n_max {
            pairs.push((oscillator_level(n, nu), (n, l as i64)));
        }
    }
    SpectrumResult::sorted(pairs, SpectrumMethod::Exact)
}

/// `σ(L_∞)` from the list of limiting angular eigenvalues `ν_{B,ℓ}(∞)`.
pub fn sigma_l_infinity_exact<T: Real>(nu_list: &[T], n_max: usize) -> Result<SpectrumResult<T>> {
    if nu_list.iter().any(|&v| v < T::zero()) {
        return Err(invalid("nu_list", "angular eigenvalues must be nonnegative"));
    }
    let mut pairs = Vec::new();
    for (l, &nu) in nu_list.iter().enumerate() {
        for n in 0..=n_max {
            pairs.push((oscillator_level(n, nu), (n, l as i64)));
        }
    }
    Ok(SpectrumResult::sorted(pairs, SpectrumMethod::Exact))
}

/// Planar angular eigenvalues `(m - Φ)²` for `|m| ≤ m_range`, labelled by `m`.
pub fn planar_angular_eigenvalues<T: Real>(flux: T, m_range: i64) -> Vec<(i64, T)> {
    (-m_range..=m_range)
        .map(|m| {
            let v = crate::real::from_i64::<T>(m) - flux;
            (m, v * v)
        })
        .collect()
}

/// Numeric counterpart of [`sigma_l_infinity_exact`]: the lowest `count`
/// eigenvalues of each constant-`ν` mode on `grid`, merged and sorted.
pub fn spectrum_numeric<T: Real>(
    d: usize,
    modes: &[(i64, T)],
    count: usize,
    grid: &RadialGrid<T>,
) -> Result<SpectrumResult<T>> {
    let per_mode = modes
        .par_iter()
        .map(|&(label, nu)| {
            let op = ModeOperator::new(d, ModePotential::Constant(nu), grid)?;
            (1..=count)
                .map(|k| op.eigenvalue(k).map(|v| (v, (k - 1, label))))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectrumResult::sorted(per_mode.into_iter().flatten().collect(), SpectrumMethod::Numeric))
}

/// Eigenfunction of the constant-`ν` oscillator mode:
/// `ρ^{-(d-2)/2} ρ^{√ν} e^{-ρ²/8} L_n^{(√ν)}(ρ²/4)`.
pub fn eigenfunction_radial<T: Real>(n: usize, nu: T, d: usize, rho: T) -> T {
    let a = nu.sqrt();
    let shift = (lit::<T>(d as f64) - lit(2.0)) * lit(0.5);
    rho.powf(a - shift) * (-rho * rho / lit(8.0)).exp() * laguerre_eval(n, a, rho * rho / lit(4.0))
}

/// `⌈|Φ|⌉ + 3`, the default symmetric mode window.
pub fn default_mode_range<T: Real>(flux: T) -> i64 {
    to_f64(flux.abs().ceil()) as i64 + 3
}

/// Value and minimizing angular mode of `λ_B(s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaB<T> {
    pub value: T,
    pub mode: i64,
}

fn radial_profile<T: Real>(field: &MagneticField<T>) -> Result<FluxProfile<T>> {
    if field.dimension() != 2 {
        return Err(MagheatError::DimensionMismatch {
            expected: 2,
            found: field.dimension(),
        });
    }
    if !field.is_radial() {
        return Err(MagheatError::Hypothesis("λ_B(s) requires a radially symmetric field".into()));
    }
    total_flux(field, 16)
}

fn check_range<T: Real>(profile: &FluxProfile<T>, m_range: i64) -> Result<()> {
    let need = to_f64(profile.total_flux().abs().ceil()) as i64 + 2;
    if m_range < need {
        return Err(invalid("m_range", format!("need at least {need}, got {m_range}")));
    }
    Ok(())
}

/// `λ_B(s)` for a radial planar field: the lowest mode eigenvalue over `|m| ≤ m_range`.
pub fn lambda_b_of_s<T: Real>(field: &MagneticField<T>, s: T, m_range: i64, grid: &RadialGrid<T>) -> Result<LambdaB<T>> {
    let profile = radial_profile(field)?;
    lambda_b_from_profile(&profile, s, m_range, grid)
}

/// Grid used at time `s`: the scaled support `R e^{-s/2}` must stay resolved,
/// otherwise the whole field would hide inside the inner closure.
pub fn grid_at_time<T: Real>(profile: &FluxProfile<T>, s: T, grid: &RadialGrid<T>) -> RadialGrid<T> {
    grid.resolving(profile.saturation_radius() * (-s * lit(0.5)).exp())
}

/// `λ_B(s)` from a tabulated flux profile.
pub fn lambda_b_from_profile<T: Real>(
    profile: &FluxProfile<T>,
    s: T,
    m_range: i64,
    grid: &RadialGrid<T>,
) -> Result<LambdaB<T>> {
    check_range(profile, m_range)?;
    let assembler = ModeAssembler::new(&grid_at_time(profile, s, grid));
    let values = (-m_range..=m_range)
        .into_par_iter()
        .map(|m| {
            let pot = ModePotential::ScaledFlux {
                profile: profile.clone(),
                mode: m,
                s,
            };
            assembler.pencil(&pot).eigenvalue(0, T::zero(), lit(1e-14)).map(|v| (m, v))
        })
        .collect::<Result<Vec<_>>>()?;
    let (mode, value) = values
        .into_iter()
        .fold((0, T::infinity()), |best, (m, v)| if v < best.1 { (m, v) } else { best });
    if mode.abs() == m_range {
        return Err(MagheatError::ModeRangeTooSmall { mode, range: m_range });
    }
    Ok(LambdaB { value, mode })
}

/// `λ_B(s)` along a list of times with the default mode window.
pub fn lambda_b_curve<T: Real>(field: &MagneticField<T>, s_values: &[T], grid: &RadialGrid<T>) -> Result<Vec<LambdaB<T>>> {
    let profile = radial_profile(field)?;
    let m_range = default_mode_range(profile.total_flux());
    s_values
        .par_iter()
        .map(|&s| lambda_b_from_profile(&profile, s, m_range, grid))
        .collect()
}

/// `‖L_s^{-1} - L_∞^{-1}‖` restricted to one angular mode, in `L²(ρ dρ)`.
///
/// Both inverses share the mass matrix of `L_s`, so the difference is
/// self-adjoint in the discrete inner product and its norm is found by power
/// iteration.
pub fn mode_resolvent_gap<T: Real>(assembler: &ModeAssembler<T>, potential: &ModePotential<T>) -> Result<T> {
    let mass = assembler.mass(potential);
    let ks = assembler.stiffness(potential).factor()?;
    let kinf = assembler.stiffness(&potential.limit()).factor()?;
    let n = assembler.unknowns();
    let start: Vec<T> = (0..n)
        .map(|i| T::one() + lit::<T>(0.3) * (lit::<T>(0.7) * from_usize(i)).sin())
        .collect();
    self_adjoint_norm(
        |x| {
            let mut a = mass.mul_vec(x);
            let mut b = a.clone();
            ks.solve_in_place(&mut a);
            kinf.solve_in_place(&mut b);
            Ok(a.into_iter().zip(b).map(|(u, v)| u - v).collect())
        },
        |x, y| {
            let my = mass.mul_vec(y);
            x.iter().zip(&my).map(|(&a, &b)| a * b).sum()
        },
        start,
        lit(1e-10),
        20_000,
    )
}

/// Inverse-difference norm `max_m ‖L_{s,m}^{-1} - L_{∞,m}^{-1}‖` for each `s`.
pub fn resolvent_convergence<T: Real>(
    field: &MagneticField<T>,
    s_list: &[T],
    grid: &RadialGrid<T>,
    m_range: i64,
) -> Result<Vec<T>> {
    let profile = radial_profile(field)?;
    check_range(&profile, m_range)?;
    s_list
        .iter()
        .map(|&s| {
            let assembler = ModeAssembler::new(&grid_at_time(&profile, s, grid));
            let gaps = (-m_range..=m_range)
                .into_par_iter()
                .map(|m| {
                    let pot = ModePotential::ScaledFlux {
                        profile: profile.clone(),
                        mode: m,
                        s,
                    };
                    mode_resolvent_gap(&assembler, &pot)
                })
                .collect::<Result<Vec<T>>>()?;
            Ok(gaps.into_iter().fold(T::zero(), T::max))
        })
        .collect()
}
