//! Large-time decay of the magnetic heat flow for radial planar fields.
//!
//! The flow is evolved in self-similar variables in its weighted form `ṽ`,
//! one angular mode at a time, by Crank–Nicolson with the operator frozen at
//! the midpoint time.

mod datum;

pub use datum::{exact_reference_solution, Datum, ReferenceKind, SelfSimilarMap};

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{invalid, MagheatError, Result};
use crate::field_forms::{poincare_gauge, total_flux, FluxProfile, MagneticField};
use crate::linalg::SymTridiag;
use crate::oscillator_spectrum::{ModeAssembler, ModePotential, RadialGrid};
use crate::quadrature::GaussLegendre;
use crate::real::{from_usize, lit, to_f64, Real};

/// Radial samples of one angular mode `ṽ_m(ρ, s)` on the free grid nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSamples<T> {
    pub mode: i64,
    pub values: Vec<Complex<T>>,
}

/// `ṽ(·, s)` as a list of nonzero angular modes.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionState<T> {
    pub s: T,
    pub modes: Vec<ModeSamples<T>>,
    /// `‖ṽ(s)‖²` in `L²(ℝ²)`.
    pub weight_norm: T,
}

impl<T: Real> EvolutionState<T> {
    pub fn norm_v(&self) -> T {
        self.weight_norm.sqrt()
    }
}

/// Per-mode Crank–Nicolson stepper for a fixed field and grid.
#[derive(Debug, Clone)]
pub struct Evolver<T> {
    profile: FluxProfile<T>,
    grid: RadialGrid<T>,
    assembler: ModeAssembler<T>,
    /// Mass of `L²(e^{-ρ²/4} ρ dρ)`, which turns `ṽ` into `ũ`.
    u_mass: SymTridiag<T>,
}

impl<T: Real> Evolver<T> {
    pub fn new(profile: FluxProfile<T>, grid: RadialGrid<T>) -> Self {
        let assembler = ModeAssembler::new(&grid);
        let u_mass = gaussian_mass(grid.nodes());
        Self {
            profile,
            grid,
            assembler,
            u_mass,
        }
    }

    pub fn profile(&self) -> &FluxProfile<T> {
        &self.profile
    }

    pub fn grid(&self) -> &RadialGrid<T> {
        &self.grid
    }

    pub fn free_nodes(&self) -> &[T] {
        self.assembler.free_nodes()
    }

    fn potential(&self, mode: i64, s: T) -> ModePotential<T> {
        ModePotential::ScaledFlux {
            profile: self.profile.clone(),
            mode,
            s,
        }
    }

    fn mass(&self, mode: i64) -> SymTridiag<T> {
        self.assembler.mass(&self.potential(mode, T::zero()))
    }

    fn two_pi() -> T {
        T::PI() * lit(2.0)
    }

    /// `‖ṽ‖²` recomputed from the samples.
    pub fn norm_v_sqr(&self, modes: &[ModeSamples<T>]) -> T {
        modes.iter().map(|m| self.mass(m.mode).herm_form(&m.values)).sum::<T>() * Self::two_pi()
    }

    /// `‖u(t)‖ = ‖ũ(s)‖` with `ũ = e^{-ρ²/8} ṽ`.
    pub fn norm_u(&self, state: &EvolutionState<T>) -> T {
        let r0 = self.grid.rho_min();
        let sum: T = state
            .modes
            .iter()
            .map(|m| {
                // inner closure: ṽ ∝ ρ^{|m|} on (0, ρ_min), where the Gaussian is 1
                let closure = r0 * r0 / (lit::<T>(2.0 * m.mode.unsigned_abs() as f64) + lit(2.0));
                self.u_mass.herm_form(&m.values) + closure * m.values[0].norm_sqr()
            })
            .sum();
        (sum * Self::two_pi()).sqrt()
    }

    /// Quadratic form `l_s[ṽ]`, harmonic term included.
    pub fn form(&self, state: &EvolutionState<T>, s: T) -> T {
        state
            .modes
            .iter()
            .map(|m| self.assembler.stiffness(&self.potential(m.mode, s)).herm_form(&m.values))
            .sum::<T>()
            * Self::two_pi()
    }

    /// `ṽ(·, 0) = w^{1/2} u₀` projected onto its single angular mode.
    pub fn project(&self, datum: &Datum<T>) -> Result<EvolutionState<T>> {
        datum.check()?;
        let modes = match datum.mode() {
            None => Vec::new(),
            Some(mode) => {
                let values: Vec<Complex<T>> = self
                    .free_nodes()
                    .iter()
                    .map(|&r| Complex::new(datum.weighted_radial(r), T::zero()))
                    .collect();
                if values.iter().any(|v| !v.re.is_finite()) {
                    return Err(MagheatError::NotWeighted("weighted datum overflows on the grid".into()));
                }
                vec![ModeSamples { mode, values }]
            }
        };
        let weight_norm = self.norm_v_sqr(&modes);
        if !weight_norm.is_finite() {
            return Err(MagheatError::NotWeighted("weighted norm is not finite".into()));
        }
        Ok(EvolutionState {
            s: T::zero(),
            modes,
            weight_norm,
        })
    }

    /// One Crank–Nicolson step of `∂_s ṽ_m = -L_s^{(m)} ṽ_m` with `L` frozen at `s + ds/2`.
    pub fn step(&self, state: &EvolutionState<T>, ds: T) -> Result<EvolutionState<T>> {
        if !(ds > T::zero() && ds <= lit(0.1)) {
            return Err(invalid("ds", format!("step {} outside (0, 0.1]", to_f64(ds))));
        }
        let mid = state.s + ds * lit(0.5);
        let modes = state
            .modes
            .par_iter()
            .map(|m| {
                let k = self.assembler.stiffness(&self.potential(m.mode, mid));
                let mass = self.mass(m.mode);
                let half = ds * lit(0.5);
                let mut rhs = mass.axpy(-half, &k).mul_vec_complex(&m.values);
                mass.axpy(half, &k).factor()?.solve_complex_in_place(&mut rhs);
                Ok(ModeSamples {
                    mode: m.mode,
                    values: rhs,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let weight_norm = self.norm_v_sqr(&modes);
        Ok(EvolutionState {
            s: state.s + ds,
            modes,
            weight_norm,
        })
    }

    /// `|Δ(½‖ṽ‖²)/ds + l| / l` with `l` the trapezoid of the endpoint forms.
    pub fn energy_identity_check(&self, before: &EvolutionState<T>, after: &EvolutionState<T>) -> T {
        let ds = after.s - before.s;
        let l = (self.form(before, before.s) + self.form(after, after.s)) * lit(0.5);
        if l == T::zero() {
            return T::zero();
        }
        let rate = (after.weight_norm - before.weight_norm) * lit(0.5) / ds;
        (rate + l).abs() / l
    }

    /// Energy defects of one step of size `ds` and of `ds/2` from the same state.
    pub fn energy_halving(&self, state: &EvolutionState<T>, ds: T) -> Result<(T, T)> {
        let full = self.step(state, ds)?;
        let half = self.step(state, ds * lit(0.5))?;
        Ok((self.energy_identity_check(state, &full), self.energy_identity_check(state, &half)))
    }
}

fn gaussian_mass<T: Real>(nodes: &[T]) -> SymTridiag<T> {
    let n_free = nodes.len() - 1;
    let rule = GaussLegendre::<T>::new(4);
    let mut m = SymTridiag::zeros(n_free);
    for e in 0..n_free {
        let (a, b) = (nodes[e], nodes[e + 1]);
        let h = b - a;
        let mut c = [T::zero(); 3];
        for (rho, w) in rule.mapped(a, b) {
            let p0 = (b - rho) / h;
            let p1 = (rho - a) / h;
            let wt = w * rho * (-rho * rho * lit(0.25)).exp();
            c[0] += wt * p0 * p0;
            c[1] += wt * p0 * p1;
            c[2] += wt * p1 * p1;
        }
        m.diag[e] += c[0];
        if e + 1 < n_free {
            m.diag[e + 1] += c[2];
            m.off[e] += c[1];
        }
    }
    m
}

/// Samples `ṽ(·, 0) = w^{1/2} u₀` on `grid` for `field`.
pub fn initial_mode_projection<T: Real>(datum: &Datum<T>, profile: &FluxProfile<T>, grid: &RadialGrid<T>) -> Result<EvolutionState<T>> {
    Evolver::new(profile.clone(), grid.clone()).project(datum)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveSettings<T> {
    pub s_max: T,
    pub ds: T,
    /// Defaults to `[max(s_max - 6, s_max/2), s_max]`.
    pub fit_window: Option<(T, T)>,
    pub nodes: usize,
    /// Spacing in `s` of recorded samples.
    pub record_every: T,
    /// Log-space fit residual above which the window is flagged non-asymptotic.
    pub residual_threshold: T,
}

impl<T: Real> Default for EvolveSettings<T> {
    fn default() -> Self {
        Self {
            s_max: lit(16.0),
            ds: lit(1e-3),
            fit_window: None,
            nodes: crate::oscillator_spectrum::DEFAULT_NODES,
            record_every: lit(0.05),
            residual_threshold: lit(0.02),
        }
    }
}

impl<T: Real> EvolveSettings<T> {
    pub fn window(&self) -> (T, T) {
        self.fit_window
            .unwrap_or(((self.s_max - lit(6.0)).max(self.s_max * lit(0.5)), self.s_max))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecaySample<T> {
    pub t: T,
    pub s: T,
    pub norm_u: T,
    pub norm_v: T,
    /// `‖ṽ(0)‖ e^{-s/2}`.
    pub gronwall_bound: T,
}

/// Least-squares fit `log‖u(t)‖ ≈ intercept - slope · log(1 + t)` over a window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit<T> {
    pub slope: T,
    pub intercept: T,
    /// Largest log-space deviation from the fitted line inside the window.
    pub residual: T,
    /// `(1 + dist(Φ, ℤ))/2`.
    pub gamma_theory: T,
    pub window: (T, T),
    pub asymptotic: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantReport<T> {
    /// `max_s ‖ṽ(s)‖ / (‖ṽ(0)‖ e^{-s/2}) - 1`.
    pub gronwall_excess: T,
    pub monotone: bool,
    /// Largest energy-identity defect over the recorded steps.
    pub energy_defect: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionRun<T> {
    pub samples: Vec<DecaySample<T>>,
    pub fit: DecayFit<T>,
    pub invariants: InvariantReport<T>,
    pub steps: usize,
    pub final_state: EvolutionState<T>,
}

/// Fits the decay exponent on samples with `s` inside `window`.
pub fn fit_decay<T: Real>(samples: &[DecaySample<T>], window: (T, T), threshold: T, gamma_theory: T) -> Result<DecayFit<T>> {
    let eps = lit::<T>(1e-9);
    let pts: Vec<(T, T)> = samples
        .iter()
        .filter(|p| p.s >= window.0 - eps && p.s <= window.1 + eps && p.norm_u > T::zero())
        .map(|p| (p.t.ln_1p(), p.norm_u.ln()))
        .collect();
    if pts.len() < 3 {
        return Err(MagheatError::EmptySamples);
    }
    let n = from_usize::<T>(pts.len());
    let mx = pts.iter().map(|p| p.0).sum::<T>() / n;
    let my = pts.iter().map(|p| p.1).sum::<T>() / n;
    let sxy: T = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: T = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let b = sxy / sxx;
    let intercept = my - b * mx;
    let residual = pts.iter().fold(T::zero(), |acc, p| acc.max((p.1 - intercept - b * p.0).abs()));
    Ok(DecayFit {
        slope: -b,
        intercept,
        residual,
        gamma_theory,
        window,
        asymptotic: residual <= threshold,
    })
}

fn radial_flux<T: Real>(field: &MagneticField<T>) -> Result<FluxProfile<T>> {
    if field.dimension() != 2 {
        return Err(MagheatError::DimensionMismatch {
            expected: 2,
            found: field.dimension(),
        });
    }
    if !field.is_radial() {
        return Err(MagheatError::Hypothesis("evolution requires a radially symmetric field".into()));
    }
    // the mode reduction drops i y·A_s, which needs the transversal gauge
    let gauge = poincare_gauge(field, 32)?;
    let r = field.support_radius();
    for k in 0..8 {
        let th = T::PI() * lit(0.25) * from_usize(k);
        let rho = r * lit(0.3) * from_usize(k % 4 + 1);
        let x = [rho * th.cos(), rho * th.sin()];
        let a = gauge.eval(&x);
        if (x[0] * a[0] + x[1] * a[1]).abs() > lit(1e-10) {
            return Err(MagheatError::Hypothesis("potential is not transversal".into()));
        }
    }
    total_flux(field, 16)
}

/// Evolves `datum` under `field` to `s_max`, checking the invariants and fitting the decay rate.
pub fn evolve_and_fit<T: Real>(field: &MagneticField<T>, datum: &Datum<T>, settings: &EvolveSettings<T>) -> Result<EvolutionRun<T>> {
    let profile = radial_flux(field)?;
    let (w0, w1) = settings.window();
    if settings.s_max < lit(8.0) {
        return Err(invalid("s_max", "need s_max ≥ 8"));
    }
    if !(w0 >= settings.s_max * lit(0.5) - lit(1e-12) && w1 <= settings.s_max + lit(1e-12) && w0 < w1) {
        return Err(invalid("fit_window", "window must lie in [s_max/2, s_max]"));
    }
    let steps = to_f64((settings.s_max / settings.ds).round()) as usize;
    let ds = settings.s_max / from_usize(steps);
    let record = (to_f64((settings.record_every / ds).round()) as usize).max(1);
    // keep the shrinking support resolved up to the final time
    let base = RadialGrid::with_nodes(settings.nodes);
    let grid = base.resolving(profile.saturation_radius() * (-settings.s_max * lit(0.5)).exp());
    let evolver = Evolver::new(profile.clone(), grid);

    let mut state = evolver.project(datum)?;
    let v0 = state.norm_v();
    let sample = |st: &EvolutionState<T>| DecaySample {
        t: st.s.exp_m1(),
        s: st.s,
        norm_u: evolver.norm_u(st),
        norm_v: st.norm_v(),
        gronwall_bound: v0 * (-st.s * lit(0.5)).exp(),
    };
    let mut samples = vec![sample(&state)];
    let mut excess = T::zero();
    let mut monotone = true;
    let mut energy = T::zero();
    for k in 1..=steps {
        let mut next = evolver.step(&state, ds)?;
        next.s = ds * from_usize(k);
        if next.weight_norm >= state.weight_norm && state.weight_norm > T::zero() {
            monotone = false;
        }
        if v0 > T::zero() {
            excess = excess.max(next.norm_v() / (v0 * (-next.s * lit(0.5)).exp()) - T::one());
        }
        if k % record == 0 || k == steps {
            energy = energy.max(evolver.energy_identity_check(&state, &next));
            samples.push(sample(&next));
        }
        state = next;
    }
    let gamma_theory = (T::one() + profile.beta()) * lit(0.5);
    let fit = fit_decay(&samples, (w0, w1), settings.residual_threshold, gamma_theory)?;
    Ok(EvolutionRun {
        samples,
        fit,
        invariants: InvariantReport {
            gronwall_excess: excess,
            monotone,
            energy_defect: energy,
        },
        steps,
        final_state: state,
    })
}
