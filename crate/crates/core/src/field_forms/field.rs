//! Magnetic 2-forms on ℝ² and ℝ³ built from analytic presets.

use std::str::FromStr;

use crate::error::{invalid, MagheatError, Result};
use crate::quadrature::GaussLegendre;
use crate::real::{from_usize, lit, Real};
use crate::special::{bump, bump_dt};

/// Antisymmetric component matrix; only the leading `d × d` block is used.
pub type Components<T> = [[T; 3]; 3];

/// Named analytic field families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldPreset {
    /// `B = 0` in any dimension.
    Zero,
    /// d = 2, `*B(x) = c·exp(-1/(1 - |x|²/R²))` scaled to a target flux.
    RadialBump,
    /// d = 2, sum of translated radial bumps (not radially symmetric).
    TwoBump,
    /// d = 3, `B = da` for a compactly supported bump 1-form `a`.
    Exact3d,
}

impl FieldPreset {
    pub fn name(self) -> &'static str {
        match self {
            Self::Zero => "zero",
            Self::RadialBump => "radial-bump",
            Self::TwoBump => "two-bump",
            Self::Exact3d => "exact-3d",
        }
    }
}

impl FromStr for FieldPreset {
    type Err = MagheatError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero" => Ok(Self::Zero),
            "radial-bump" => Ok(Self::RadialBump),
            "two-bump" => Ok(Self::TwoBump),
            "exact-3d" => Ok(Self::Exact3d),
            other => Err(MagheatError::UnknownPreset(other.to_string())),
        }
    }
}

/// Parameters of a preset field.
///
/// For the d = 2 presets the field is normalized to total flux `flux` and then
/// multiplied by `amplitude`. `TwoBump` places one bump of radius `radius` at
/// every entry of `centers` and splits the flux evenly. `Exact3d` uses
/// `amplitude` for the 1-form, `radius` for its support and `centers[0]` (or the
/// origin) for its center.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSpec<T> {
    pub preset: FieldPreset,
    pub flux: T,
    pub radius: T,
    pub amplitude: T,
    pub centers: Vec<[T; 3]>,
}

impl<T: Real> FieldSpec<T> {
    pub fn radial_bump(flux: T, radius: T) -> Self {
        Self {
            preset: FieldPreset::RadialBump,
            flux,
            radius,
            amplitude: T::one(),
            centers: Vec::new(),
        }
    }

    pub fn zero() -> Self {
        Self {
            preset: FieldPreset::Zero,
            flux: T::zero(),
            radius: T::one(),
            amplitude: T::one(),
            centers: Vec::new(),
        }
    }

    /// The default d = 2 two-bump configuration: bumps at `(±0.6 R, 0)` of radius `0.35 R`.
    pub fn two_bump(flux: T, radius: T) -> Self {
        let off = radius * lit(0.6);
        Self {
            preset: FieldPreset::TwoBump,
            flux,
            radius: radius * lit(0.35),
            amplitude: T::one(),
            centers: vec![[off, T::zero(), T::zero()], [-off, lit::<T>(0.1) * radius, T::zero()]],
        }
    }

    pub fn exact_3d(amplitude: T, radius: T) -> Self {
        Self {
            preset: FieldPreset::Exact3d,
            flux: T::zero(),
            radius,
            amplitude,
            centers: Vec::new(),
        }
    }
}

/// One translated radial bump in the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump<T> {
    pub center: [T; 2],
    pub radius: T,
    /// Flux carried by this bump in units of `2π`.
    pub flux: T,
}

/// The 1-form `a = φ(x) (M x + b)` with `φ = amplitude·bump(|x - center|²/width²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpOneForm<T> {
    pub amplitude: T,
    pub center: [T; 3],
    pub width: T,
    pub linear: [[T; 3]; 3],
    pub offset: [T; 3],
}

impl<T: Real> BumpOneForm<T> {
    /// A rotational-plus-shear profile whose exterior derivative has all three components.
    pub fn standard(amplitude: T, center: [T; 3], width: T) -> Self {
        let z = T::zero();
        Self {
            amplitude,
            center,
            width,
            linear: [[z, -T::one(), z], [T::one(), z, z], [lit(0.2), z, z]],
            offset: [lit(0.3), z, lit(0.5)],
        }
    }

    fn phi_and_grad(&self, x: &[T]) -> (T, [T; 3]) {
        let y = [x[0] - self.center[0], x[1] - self.center[1], x[2] - self.center[2]];
        let w2 = self.width * self.width;
        let t = (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]) / w2;
        if t >= T::one() {
            return (T::zero(), [T::zero(); 3]);
        }
        let phi = self.amplitude * bump(t);
        let g = self.amplitude * bump_dt(t) * lit(2.0) / w2;
        (phi, [g * y[0], g * y[1], g * y[2]])
    }

    fn vector(&self, x: &[T]) -> [T; 3] {
        let mut w = self.offset;
        for (k, wk) in w.iter_mut().enumerate() {
            for j in 0..3 {
                *wk += self.linear[k][j] * x[j];
            }
        }
        w
    }

    /// Components `a_k(x)`.
    pub fn eval(&self, x: &[T]) -> [T; 3] {
        let (phi, _) = self.phi_and_grad(x);
        let w = self.vector(x);
        [phi * w[0], phi * w[1], phi * w[2]]
    }

    /// `(da)_jk = ∂_j a_k - ∂_k a_j`.
    pub fn exterior_derivative(&self, x: &[T]) -> Components<T> {
        let (phi, g) = self.phi_and_grad(x);
        let mut b = [[T::zero(); 3]; 3];
        if phi == T::zero() && g.iter().all(|&v| v == T::zero()) {
            return b;
        }
        let w = self.vector(x);
        for j in 0..3 {
            for k in 0..3 {
                b[j][k] = g[j] * w[k] - g[k] * w[j] + phi * (self.linear[k][j] - self.linear[j][k]);
            }
        }
        b
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Shape<T> {
    Zero,
    /// Each bump stores its normalization constant `c_i`.
    Bumps(Vec<(Bump<T>, T)>),
    Exact(BumpOneForm<T>),
}

/// A closed, compactly supported 2-form on ℝ^d, d ∈ {2, 3}.
#[derive(Debug, Clone, PartialEq)]
pub struct MagneticField<T> {
    dimension: usize,
    shape: Shape<T>,
    support_radius: T,
    sup_norm: T,
    radial: bool,
}

/// `∫₀¹ exp(-1/(1-t)) dt`, the flux integral of the unit bump profile.
pub fn bump_integral<T: Real>() -> T {
    GaussLegendre::<T>::new(48).integrate_composite(T::zero(), T::one(), 8, bump)
}

impl<T: Real> MagneticField<T> {
    /// The zero field.
    pub fn zero(dimension: usize) -> Result<Self> {
        check_dimension(dimension)?;
        Ok(Self {
            dimension,
            shape: Shape::Zero,
            support_radius: T::one(),
            sup_norm: T::zero(),
            radial: dimension == 2,
        })
    }

    /// Superposition of planar bumps with prescribed individual fluxes.
    pub fn bumps(bumps: Vec<Bump<T>>) -> Result<Self> {
        if bumps.is_empty() {
            return Self::zero(2);
        }
        let e = bump_integral::<T>();
        let mut support = T::zero();
        let mut sup = T::zero();
        let mut stored = Vec::with_capacity(bumps.len());
        for b in bumps {
            if !(b.radius > T::zero()) {
                return Err(invalid("radius", "bump radius must be positive"));
            }
            if !b.flux.is_finite() || !b.center.iter().all(|c| c.is_finite()) {
                return Err(invalid("flux", "flux and centers must be finite"));
            }
            // flux = c R² E / 2
            let c = lit::<T>(2.0) * b.flux / (b.radius * b.radius * e);
            support = support.max(b.center[0].hypot(b.center[1]) + b.radius);
            sup += c.abs() * (-T::one()).exp();
            stored.push((b, c));
        }
        let radial = stored.len() == 1
            && stored[0].0.center[0] == T::zero()
            && stored[0].0.center[1] == T::zero();
        Ok(Self {
            dimension: 2,
            shape: Shape::Bumps(stored),
            support_radius: support,
            sup_norm: sup,
            radial,
        })
    }

    /// `B = da` in ℝ³.
    pub fn exact(form: BumpOneForm<T>) -> Result<Self> {
        if !(form.width > T::zero()) {
            return Err(invalid("radius", "1-form support radius must be positive"));
        }
        let c = form.center;
        let support = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt() + form.width;
        let mut field = Self {
            dimension: 3,
            shape: Shape::Exact(form),
            support_radius: support,
            sup_norm: T::zero(),
            radial: false,
        };
        field.sup_norm = field.sampled_sup_norm(40) * lit(1.1);
        Ok(field)
    }

    fn sampled_sup_norm(&self, n: usize) -> T {
        let Shape::Exact(form) = &self.shape else {
            return self.sup_norm;
        };
        let mut best = T::zero();
        let h = form.width * lit(2.0) / from_usize(n);
        for i in 0..=n {
            for j in 0..=n {
                for k in 0..=n {
                    let x = [
                        form.center[0] - form.width + h * from_usize(i),
                        form.center[1] - form.width + h * from_usize(j),
                        form.center[2] - form.width + h * from_usize(k),
                    ];
                    best = best.max(pointwise_norm(3, &form.exterior_derivative(&x)));
                }
            }
        }
        best
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Radius `R` with `B = 0` outside the ball `D_R`.
    pub fn support_radius(&self) -> T {
        self.support_radius
    }

    /// Upper bound on `sup_x |B(x)|` (operator norm of the component matrix).
    pub fn sup_norm(&self) -> T {
        self.sup_norm
    }

    /// True iff d = 2 and `*B` depends only on `|x|`.
    pub fn is_radial(&self) -> bool {
        self.radial
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.shape, Shape::Zero)
    }

    /// The bump 1-form of an `Exact3d` field.
    pub fn one_form(&self) -> Option<&BumpOneForm<T>> {
        match &self.shape {
            Shape::Exact(f) => Some(f),
            _ => None,
        }
    }

    /// Same field multiplied by `factor`.
    pub fn scaled(&self, factor: T) -> Self {
        let mut out = self.clone();
        match &mut out.shape {
            Shape::Zero => {}
            Shape::Bumps(list) => {
                for (b, c) in list.iter_mut() {
                    b.flux *= factor;
                    *c *= factor;
                }
            }
            Shape::Exact(form) => form.amplitude *= factor,
        }
        out.sup_norm = self.sup_norm * factor.abs();
        out
    }

    /// Support balls `(center, radius)` covering the support of `B`.
    pub fn support_balls(&self) -> Vec<([T; 3], T)> {
        match &self.shape {
            Shape::Zero => Vec::new(),
            Shape::Bumps(list) => list
                .iter()
                .map(|(b, _)| ([b.center[0], b.center[1], T::zero()], b.radius))
                .collect(),
            Shape::Exact(form) => vec![(form.center, form.width)],
        }
    }

    /// Components `B_jk(x)`; `x` has length `d`.
    pub fn components(&self, x: &[T]) -> Components<T> {
        let z = T::zero();
        match &self.shape {
            Shape::Zero => [[z; 3]; 3],
            Shape::Bumps(list) => {
                let mut s = z;
                for (b, c) in list {
                    let dx = x[0] - b.center[0];
                    let dy = x[1] - b.center[1];
                    let t = (dx * dx + dy * dy) / (b.radius * b.radius);
                    if t < T::one() {
                        s += *c * bump(t);
                    }
                }
                [[z, s, z], [-s, z, z], [z, z, z]]
            }
            Shape::Exact(form) => form.exterior_derivative(x),
        }
    }

    /// `*B` for d = 2 (the scalar `B_12`).
    pub fn star_scalar(&self, x: &[T]) -> T {
        self.components(x)[0][1]
    }
}

/// Operator norm of an antisymmetric `d × d` block, d ∈ {2, 3}.
pub fn pointwise_norm<T: Real>(d: usize, b: &Components<T>) -> T {
    if d == 2 {
        b[0][1].abs()
    } else {
        (b[1][2] * b[1][2] + b[2][0] * b[2][0] + b[0][1] * b[0][1]).sqrt()
    }
}

pub(crate) fn check_dimension(d: usize) -> Result<()> {
    if d == 2 || d == 3 {
        Ok(())
    } else {
        Err(MagheatError::UnsupportedDimension(d))
    }
}

/// Builds a preset field.
pub fn make_field<T: Real>(dimension: usize, spec: &FieldSpec<T>) -> Result<MagneticField<T>> {
    check_dimension(dimension)?;
    if !(spec.radius > T::zero()) || !spec.radius.is_finite() {
        return Err(invalid("radius", "must be a positive finite number"));
    }
    if !spec.flux.is_finite() || !spec.amplitude.is_finite() {
        return Err(invalid("flux", "flux and amplitude must be finite"));
    }
    let need = |d: usize| {
        if dimension == d {
            Ok(())
        } else {
            Err(MagheatError::DimensionMismatch {
                expected: d,
                found: dimension,
            })
        }
    };
    match spec.preset {
        FieldPreset::Zero => MagneticField::zero(dimension),
        FieldPreset::RadialBump => {
            need(2)?;
            MagneticField::bumps(vec![Bump {
                center: [T::zero(), T::zero()],
                radius: spec.radius,
                flux: spec.flux * spec.amplitude,
            }])
        }
        FieldPreset::TwoBump => {
            need(2)?;
            if spec.centers.is_empty() {
                return Err(invalid("centers", "two-bump preset needs at least one center"));
            }
            let share = spec.flux * spec.amplitude / from_usize(spec.centers.len());
            MagneticField::bumps(
                spec.centers
                    .iter()
                    .map(|c| Bump {
                        center: [c[0], c[1]],
                        radius: spec.radius,
                        flux: share,
                    })
                    .collect(),
            )
        }
        FieldPreset::Exact3d => {
            need(3)?;
            let center = spec.centers.first().copied().unwrap_or([T::zero(); 3]);
            MagneticField::exact(BumpOneForm::standard(spec.amplitude, center, spec.radius))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_integral_matches_closed_form() {
        // e^{-1} - E1(1) with E1(1) = 0.219383934395520...
        let exact = (-1.0f64).exp() - 0.219_383_934_395_520_3;
        assert!((bump_integral::<f64>() - exact).abs() < 1e-14);
    }

    #[test]
    fn presets_are_skew_and_compact() {
        let fields = [
            make_field(2, &FieldSpec::radial_bump(0.5, 1.0)).unwrap(),
            make_field(2, &FieldSpec::two_bump(0.8, 1.5)).unwrap(),
            make_field(3, &FieldSpec::exact_3d(1.0, 1.0)).unwrap(),
        ];
        for f in &fields {
            let d = f.dimension();
            let r = f.support_radius();
            for k in 0..50 {
                let t = k as f64 * 0.37;
                let mut x = [t.cos() * 0.8 * r, t.sin() * 0.6 * r, 0.0];
                x[2] = (t * 1.7).sin() * 0.3 * r;
                let b = f.components(&x[..d]);
                for j in 0..3 {
                    for l in 0..3 {
                        assert_eq!(b[j][l], -b[l][j]);
                    }
                }
                let far: Vec<f64> = x[..d].iter().map(|v| v / (v.abs() + 1e-3) * 3.0 * r).collect();
                let bf = f.components(&far);
                assert!(bf.iter().flatten().all(|&v| v == 0.0));
            }
        }
    }

    #[test]
    fn errors() {
        assert!(matches!(
            make_field(4, &FieldSpec::<f64>::zero()),
            Err(MagheatError::UnsupportedDimension(4))
        ));
        assert!(make_field(2, &FieldSpec::radial_bump(0.5, -1.0)).is_err());
        assert!(make_field(3, &FieldSpec::radial_bump(0.5, 1.0)).is_err());
        assert!("nope".parse::<FieldPreset>().is_err());
    }
}
