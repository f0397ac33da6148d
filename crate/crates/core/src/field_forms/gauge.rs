//! Poincaré-gauge potentials and their pullback to spheres.

use std::sync::Arc;

use crate::error::{invalid, Result};
use crate::field_forms::field::MagneticField;
use crate::quadrature::GaussLegendre;
use crate::real::{lit, Real};

/// Default number of Gauss–Legendre nodes per support interval.
pub const DEFAULT_GAUGE_NODES: usize = 64;

/// `A(x) = ∫₀¹ x·B(xu) u du`, evaluated by quadrature along the ray through `x`.
#[derive(Debug, Clone)]
pub struct GaugePotential<T> {
    field: MagneticField<T>,
    rule: GaussLegendre<T>,
}

/// Builds the transversal (Poincaré) gauge of `field`.
pub fn poincare_gauge<T: Real>(field: &MagneticField<T>, n_quad: usize) -> Result<GaugePotential<T>> {
    if n_quad < 8 {
        return Err(invalid("n_quad", format!("need at least 8 nodes, got {n_quad}")));
    }
    Ok(GaugePotential {
        field: field.clone(),
        rule: GaussLegendre::new(n_quad),
    })
}

impl<T: Real> GaugePotential<T> {
    pub fn field(&self) -> &MagneticField<T> {
        &self.field
    }

    pub fn dimension(&self) -> usize {
        self.field.dimension()
    }

    pub fn quadrature_nodes(&self) -> usize {
        self.rule.len()
    }

    /// Breakpoints splitting `[0, r]` into pieces on which the integrand is smooth.
    fn ray_pieces(&self, sigma: &[T; 3], r: T) -> Vec<(T, T)> {
        let mut intervals = Vec::new();
        for (c, rho) in self.field.support_balls() {
            let sc = sigma[0] * c[0] + sigma[1] * c[1] + sigma[2] * c[2];
            let cc = c[0] * c[0] + c[1] * c[1] + c[2] * c[2];
            let disc = sc * sc - cc + rho * rho;
            if disc <= T::zero() {
                continue;
            }
            let sq = disc.sqrt();
            let lo = (sc - sq).max(T::zero());
            let hi = (sc + sq).min(r);
            if hi > lo {
                intervals.push((lo, hi));
            }
        }
        if intervals.len() <= 1 {
            return intervals;
        }
        let mut cuts: Vec<T> = intervals.iter().flat_map(|&(a, b)| [a, b]).collect();
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        cuts.dedup();
        cuts.windows(2)
            .filter_map(|w| {
                let mid = (w[0] + w[1]) * lit(0.5);
                intervals
                    .iter()
                    .any(|&(a, b)| a <= mid && mid <= b)
                    .then_some((w[0], w[1]))
            })
            .collect()
    }

    /// `P_j(σ, r) = ∫₀^r σ^l B_lj(σv) v dv` for a unit vector `σ` (third entry 0 when d = 2).
    pub fn ray_moment(&self, sigma: &[T; 3], r: T) -> [T; 3] {
        let d = self.dimension();
        let mut out = [T::zero(); 3];
        if self.field.is_zero() || r <= T::zero() {
            return out;
        }
        let mut x = [T::zero(); 3];
        for (a, b) in self.ray_pieces(sigma, r) {
            for (v, w) in self.rule.mapped(a, b) {
                for i in 0..d {
                    x[i] = sigma[i] * v;
                }
                let bm = self.field.components(&x[..d]);
                for j in 0..d {
                    let mut acc = T::zero();
                    for l in 0..d {
                        acc += sigma[l] * bm[l][j];
                    }
                    out[j] += w * v * acc;
                }
            }
        }
        out
    }

    /// Components `A_j(x)`; `x` has length `d`, the returned array is padded with zeros.
    pub fn eval(&self, x: &[T]) -> [T; 3] {
        let r = x.iter().map(|&v| v * v).sum::<T>().sqrt();
        if r == T::zero() {
            return [T::zero(); 3];
        }
        let mut sigma = [T::zero(); 3];
        for (s, &v) in sigma.iter_mut().zip(x) {
            *s = v / r;
        }
        let p = self.ray_moment(&sigma, r);
        [p[0] / r, p[1] / r, p[2] / r]
    }
}

/// Unit vector and its coordinate tangents for sphere angles.
///
/// d = 2 uses `[θ]` with `σ = (cos θ, sin θ)`; d = 3 uses `[φ, θ]` with
/// polar angle `φ` and azimuth `θ`.
pub fn sphere_frame<T: Real>(d: usize, angles: &[T]) -> ([T; 3], [[T; 3]; 2]) {
    let z = T::zero();
    if d == 2 {
        let (s, c) = angles[0].sin_cos();
        ([c, s, z], [[-s, c, z], [z; 3]])
    } else {
        let (sp, cp) = angles[0].sin_cos();
        let (st, ct) = angles[1].sin_cos();
        (
            [sp * ct, sp * st, cp],
            [[cp * ct, cp * st, -sp], [-sp * st, sp * ct, z]],
        )
    }
}

type Evaluator<T> = dyn Fn(&[T], T) -> [T; 2] + Send + Sync;

/// Covariant angular components `𝖠_μ(σ, r)` of a potential on spheres of radius `r`.
///
/// The radial component vanishes identically in the Poincaré gauge and is not stored.
#[derive(Clone)]
pub struct SphericalPotential<T> {
    dimension: usize,
    saturation_radius: T,
    eval: Arc<Evaluator<T>>,
}

impl<T: Real> std::fmt::Debug for SphericalPotential<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SphericalPotential")
            .field("dimension", &self.dimension)
            .field("saturation_radius", &self.saturation_radius)
            .finish_non_exhaustive()
    }
}

/// `𝖠_μ(σ, r) = ∫₀^r [σ·B(σv)·∂_μσ] v dv`.
pub fn spherical_pullback<T: Real>(gauge: &GaugePotential<T>) -> SphericalPotential<T> {
    let g = gauge.clone();
    let d = g.dimension();
    let saturation = g.field().support_radius();
    SphericalPotential {
        dimension: d,
        saturation_radius: saturation,
        eval: Arc::new(move |angles: &[T], r: T| {
            let (sigma, tangents) = sphere_frame(d, angles);
            let p = g.ray_moment(&sigma, r);
            let mut out = [T::zero(); 2];
            for (o, t) in out.iter_mut().zip(&tangents).take(d - 1) {
                *o = p[0] * t[0] + p[1] * t[1] + p[2] * t[2];
            }
            out
        }),
    }
}

impl<T: Real> SphericalPotential<T> {
    /// Constant `𝖠_θ` on the circle (Aharonov–Bohm type, saturated at every radius).
    pub fn constant_circle(a_theta: T) -> Self {
        Self::from_fn(2, T::zero(), move |_, _| [a_theta, T::zero()])
    }

    /// Arbitrary covariant components; `f(angles, r)` must be constant in `r` beyond `saturation_radius`.
    pub fn from_fn<F>(dimension: usize, saturation_radius: T, f: F) -> Self
    where
        F: Fn(&[T], T) -> [T; 2] + Send + Sync + 'static,
    {
        Self {
            dimension,
            saturation_radius,
            eval: Arc::new(f),
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn saturation_radius(&self) -> T {
        self.saturation_radius
    }

    /// `(𝖠_1, …, 𝖠_{d-1})` at sphere angles and radius `r`; unused slots are zero.
    pub fn covariant(&self, angles: &[T], r: T) -> [T; 2] {
        (self.eval)(angles, r)
    }

    /// `𝖠_∞(σ)`.
    pub fn limit(&self, angles: &[T]) -> [T; 2] {
        self.covariant(angles, self.saturation_radius)
    }

    /// The same potential with `𝖠_θ` replaced by `𝖠_θ + f'(θ)` (d = 2 gauge shift).
    pub fn circle_gauge_shift<F>(&self, df: F) -> Self
    where
        F: Fn(T) -> T + Send + Sync + 'static,
    {
        let base = self.eval.clone();
        Self {
            dimension: self.dimension,
            saturation_radius: self.saturation_radius,
            eval: Arc::new(move |a: &[T], r: T| {
                let v = base(a, r);
                [v[0] + df(a[0]), v[1]]
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field_forms::field::{make_field, FieldSpec};

    #[test]
    fn zero_field_gives_zero_potential() {
        let f = MagneticField::<f64>::zero(3).unwrap();
        let g = poincare_gauge(&f, 16).unwrap();
        assert_eq!(g.eval(&[0.3, -0.2, 0.5]), [0.0; 3]);
        let sp = spherical_pullback(&g);
        assert_eq!(sp.covariant(&[0.4, 1.0], 2.0), [0.0; 2]);
    }

    #[test]
    fn too_few_nodes_rejected() {
        let f = MagneticField::<f64>::zero(2).unwrap();
        assert!(poincare_gauge(&f, 4).is_err());
    }

    #[test]
    fn circle_component_is_partial_flux_beyond_support() {
        let f = make_field(2, &FieldSpec::radial_bump(0.7, 1.0)).unwrap();
        let sp = spherical_pullback(&poincare_gauge(&f, 64).unwrap());
        for k in 0..8 {
            let th = k as f64 * 0.8;
            assert!((sp.covariant(&[th], 1.5)[0] - 0.7).abs() < 1e-12);
        }
        assert!((sp.limit(&[0.3])[0] - 0.7).abs() < 1e-12);
    }
}
