//! Randomized checks of the one-dimensional auxiliary inequalities, the
//! diamagnetic inequality and the free Hardy inequality.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Result};
use crate::field_forms::GaugePotential;
use crate::quadrature::GaussLegendre;
use crate::real::{from_usize, lit, Real};
use crate::special::bessel_j0_first_zero;

const TERMS: usize = 8;
const PANELS: usize = 64;

/// Worst ratios found for the two auxiliary inequalities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuxReport<T> {
    /// `min ∫₀^{r0}|f'|² r / ∫₀^{r0}|f|² r`.
    pub worst_inner: T,
    /// `(j₀,₁/r₀)²`.
    pub gamma_inner: T,
    /// `min ∫|f'|² r / ∫|f|²/(r log²(r/r0))` over `(r0, r0 e^T)`.
    pub worst_outer: T,
    /// `1/4`.
    pub gamma_outer: T,
    pub trials: usize,
}

impl<T: Real> AuxReport<T> {
    /// `min{(j₀,₁/r₀)², 1/4}`.
    pub fn gamma(&self) -> T {
        self.gamma_inner.min(self.gamma_outer)
    }

    pub fn holds(&self, slack: T) -> bool {
        self.worst_inner >= self.gamma_inner * (T::one() - slack) && self.worst_outer >= self.gamma_outer * (T::one() - slack)
    }
}

fn coefficients<T: Real>(rng: &mut ChaCha8Rng) -> Vec<T> {
    // decaying random amplitudes; redraw on the (measure zero) all-zero case
    loop {
        let c: Vec<T> = (1..=TERMS)
            .map(|k| lit::<T>(rng.random_range(-1.0..1.0) / k as f64))
            .collect();
        if c.iter().any(|v| v.abs() > lit(1e-6)) {
            return c;
        }
    }
}

/// Random trials `f = Σ_{k≥0} c_k cos((k+½)πr/r0)` on `(0, r0)` and
/// `f = Σ_{k≥1} c_k sin(kπt/T)`, `t = log(r/r0)`, on `(r0, r0 e^T)`; both vanish at `r0`.
pub fn aux_inequality_check<T: Real>(r0: T, trials: usize, seed: u64) -> Result<AuxReport<T>> {
    if !(r0 > T::zero()) {
        return Err(invalid("r0", "must be positive"));
    }
    if trials == 0 {
        return Err(invalid("trials", "need at least one trial"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rule = GaussLegendre::<T>::new(8);
    let span: T = lit(8.0);
    let mut worst_inner = T::infinity();
    let mut worst_outer = T::infinity();
    for _ in 0..trials {
        let c = coefficients::<T>(&mut rng);
        let freq = |k: usize| (from_usize::<T>(k) + lit(0.5)) * T::PI() / r0;
        let f = |r: T| c.iter().enumerate().map(|(k, &a)| a * (freq(k) * r).cos()).sum::<T>();
        let df = |r: T| -c.iter().enumerate().map(|(k, &a)| a * freq(k) * (freq(k) * r).sin()).sum::<T>();
        let num = rule.integrate_composite(T::zero(), r0, PANELS, |r| df(r).powi(2) * r);
        let den = rule.integrate_composite(T::zero(), r0, PANELS, |r| f(r).powi(2) * r);
        worst_inner = worst_inner.min(num / den);

        // in t = log(r/r0): ∫|f'|² r dr = ∫|f_t|² dt and ∫|f|²/(r² log²) r dr = ∫|f|²/t² dt
        let c = coefficients::<T>(&mut rng);
        let w = |k: usize| from_usize::<T>(k + 1) * T::PI() / span;
        let g = |t: T| c.iter().enumerate().map(|(k, &a)| a * (w(k) * t).sin()).sum::<T>();
        let dg = |t: T| c.iter().enumerate().map(|(k, &a)| a * w(k) * (w(k) * t).cos()).sum::<T>();
        let num = rule.integrate_composite(T::zero(), span, PANELS, |t| dg(t).powi(2));
        let den = rule.integrate_composite(T::zero(), span, PANELS, |t| (g(t) / t).powi(2));
        worst_outer = worst_outer.min(num / den);
    }
    let j = bessel_j0_first_zero::<T>() / r0;
    Ok(AuxReport {
        worst_inner,
        gamma_inner: j * j,
        worst_outer,
        gamma_outer: lit(0.25),
        trials,
    })
}

/// Outcome of [`diamagnetic_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiamagneticReport<T> {
    /// `max (|∇|ψ|| - |(∇ - iA)ψ|)` over all samples.
    pub max_violation: T,
    pub samples: usize,
}

/// `(|(∇ - iA)ψ|, |∇|ψ||)` at `x` by central differences with step `h`.
pub fn diamagnetic_sides<T, F>(gauge: &GaugePotential<T>, psi: F, x: &[T], h: T) -> (T, T)
where
    T: Real,
    F: Fn(&[T]) -> Complex<T>,
{
    let a = gauge.eval(x);
    let p = psi(x);
    let mut cov = T::zero();
    let mut grad_abs = T::zero();
    let mut y = x.to_vec();
    for j in 0..x.len() {
        y[j] = x[j] + h;
        let (pp, ap) = (psi(&y), psi(&y).norm());
        y[j] = x[j] - h;
        let (pm, am) = (psi(&y), psi(&y).norm());
        y[j] = x[j];
        let two_h = h + h;
        let d = (pp - pm) / two_h - Complex::new(T::zero(), a[j]) * p;
        cov += d.norm_sqr();
        grad_abs += ((ap - am) / two_h).powi(2);
    }
    (cov.sqrt(), grad_abs.sqrt())
}

/// Random `ψ = G e^{iS}` with `G = e^{-a|x-c|²}(1 + 0.3 cos(p·x))` and
/// `S = k·x + b sin(q·x)`, evaluated at `points` random locations per trial
/// in the ball of radius `2R` (at least 1), at `h = 1e-5`.
pub fn diamagnetic_check<T: Real>(gauge: &GaugePotential<T>, trials: usize, points: usize, seed: u64) -> Result<DiamagneticReport<T>> {
    if trials == 0 || points == 0 {
        return Err(invalid("trials", "need at least one trial and one point"));
    }
    let d = gauge.dimension();
    let box_r = (gauge.field().support_radius() * lit(2.0)).max(T::one());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |lo: f64, hi: f64| lit::<T>(rng.random_range(lo..hi));
    let mut worst = T::neg_infinity();
    for _ in 0..trials {
        let a = draw(0.2, 2.0);
        let b = draw(-2.0, 2.0);
        let vecs: Vec<[T; 3]> = (0..4)
            .map(|_| [draw(-1.0, 1.0), draw(-1.0, 1.0), draw(-1.0, 1.0)])
            .collect();
        let (c, p, k, q) = (vecs[0], vecs[1], vecs[2], vecs[3]);
        let c = c.map(|v| v * box_r * lit(0.5));
        let dot = |u: &[T; 3], x: &[T]| x.iter().zip(u).map(|(&a, &b)| a * b).sum::<T>();
        let psi = |x: &[T]| {
            let dist2 = x.iter().zip(&c).map(|(&a, &b)| (a - b) * (a - b)).sum::<T>();
            let g = (-a * dist2).exp() * (T::one() + lit::<T>(0.3) * dot(&p, x).cos());
            let s = dot(&k, x) + b * dot(&q, x).sin();
            Complex::from_polar(g, s)
        };
        for _ in 0..points {
            let x: Vec<T> = loop {
                let x: Vec<T> = (0..d).map(|_| draw(-1.0, 1.0)).collect();
                if x.iter().map(|&v| v * v).sum::<T>() <= T::one() {
                    break x.into_iter().map(|v| v * box_r).collect();
                }
            };
            let (lhs, rhs) = diamagnetic_sides(gauge, psi, &x, lit(1e-5));
            worst = worst.max(rhs - lhs);
        }
    }
    Ok(DiamagneticReport {
        max_violation: worst,
        samples: trials * points,
    })
}

/// `∫|f'|² r^{d-1} dr / ∫|f|² r^{d-3} dr` over `(lo, hi)` for radial `ψ = f(|x|)`.
///
/// Integrated in `t = log r` with `panels` Gauss–Legendre panels.
pub fn free_hardy_quotient<T, F, G>(d: usize, f: F, df: G, lo: T, hi: T, panels: usize) -> Result<T>
where
    T: Real,
    F: Fn(T) -> T,
    G: Fn(T) -> T,
{
    if !(lo > T::zero() && hi > lo) {
        return Err(invalid("interval", "need 0 < lo < hi"));
    }
    let rule = GaussLegendre::<T>::new(8);
    let e = from_usize::<T>(d);
    let (a, b) = (lo.ln(), hi.ln());
    let num = rule.integrate_composite(a, b, panels, |t| {
        let r = t.exp();
        df(r).powi(2) * r.powf(e)
    });
    let den = rule.integrate_composite(a, b, panels, |t| {
        let r = t.exp();
        f(r).powi(2) * r.powf(e - lit(2.0))
    });
    if !(den > T::zero()) {
        return Err(invalid("f", "trial function vanishes identically"));
    }
    Ok(num / den)
}

/// Quotient of `ψ = r^{-1/2} sin(π log r / T)` on `(1, e^T)` in d = 3;
/// equals `1/4 + π²/T²`.
pub fn hardy_minimizing_quotient<T: Real>(span: T) -> Result<T> {
    let w = T::PI() / span;
    let half: T = lit(0.5);
    free_hardy_quotient(
        3,
        |r: T| r.powf(-half) * (w * r.ln()).sin(),
        |r: T| r.powf(-half - T::one()) * (w * (w * r.ln()).cos() - half * (w * r.ln()).sin()),
        T::one(),
        span.exp(),
        256,
    )
}

/// Smallest free Hardy quotient over random radial trials
/// `(Σ_{k<5} c_k r^k) e^{-a r²}` in dimension `d`.
pub fn free_hardy_trials<T: Real>(d: usize, trials: usize, seed: u64) -> Result<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = T::infinity();
    for _ in 0..trials {
        let a = lit::<T>(rng.random_range(0.2..2.0));
        let c: Vec<T> = (0..5).map(|_| lit(rng.random_range(-1.0..1.0))).collect();
        let poly = |r: T| c.iter().rev().fold(T::zero(), |acc, &v| acc * r + v);
        let dpoly = |r: T| {
            c.iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(T::zero(), |acc, (k, &v)| acc * r + v * from_usize(k))
        };
        let gauss = |r: T| (-a * r * r).exp();
        let q = free_hardy_quotient(
            d,
            |r| poly(r) * gauss(r),
            |r| (dpoly(r) - lit::<T>(2.0) * a * r * poly(r)) * gauss(r),
            lit(1e-8),
            lit(40.0),
            256,
        )?;
        worst = worst.min(q);
    }
    Ok(worst)
}
