//! Special functions: generalised Laguerre polynomials, Bessel `J0`, and the
//! compact bump profile used by the field presets.

use crate::real::{from_usize, lit, Real};

/// Generalised Laguerre polynomial `L_n^alpha(x)` by the three-term recurrence.
pub fn laguerre<T: Real>(n: usize, alpha: T, x: T) -> T {
    let mut prev = T::one();
    if n == 0 {
        return prev;
    }
    let mut cur = T::one() + alpha - x;
    for k in 1..n {
        let kf: T = from_usize(k);
        let next = ((lit::<T>(2.0) * kf + T::one() + alpha - x) * cur - (kf + alpha) * prev)
            / (kf + T::one());
        prev = cur;
        cur = next;
    }
    cur
}

/// Bessel function of the first kind of order zero (power series; accurate for `|x| <= 12`).
pub fn bessel_j0<T: Real>(x: T) -> T {
    bessel_series(0, x)
}

/// Bessel function of the first kind of order one.
pub fn bessel_j1<T: Real>(x: T) -> T {
    bessel_series(1, x)
}

fn bessel_series<T: Real>(order: usize, x: T) -> T {
    let half = x * lit(0.5);
    let q = -half * half;
    let mut term = if order == 0 { T::one() } else { half };
    let mut sum = term;
    for k in 1..200 {
        let kf: T = from_usize(k);
        term = term * q / (kf * (kf + from_usize(order)));
        sum += term;
        if term.abs() <= T::epsilon() * sum.abs() * lit(0.01) {
            break;
        }
    }
    sum
}

/// First positive zero of `J0`, refined by Newton iteration from 2.4.
pub fn bessel_j0_first_zero<T: Real>() -> T {
    let mut x: T = lit(2.4);
    for _ in 0..50 {
        let dx = bessel_j0(x) / (-bessel_j1(x));
        x -= dx;
        if dx.abs() < T::epsilon() * lit(4.0) {
            break;
        }
    }
    x
}

/// Compact `C^∞` bump `exp(-1/(1 - t))` for `t = |x|²/R² < 1`, zero otherwise.
#[inline]
pub fn bump<T: Real>(t: T) -> T {
    if t >= T::one() {
        T::zero()
    } else {
        (-(T::one() / (T::one() - t))).exp()
    }
}

/// Derivative of [`bump`] with respect to `t`.
#[inline]
pub fn bump_dt<T: Real>(t: T) -> T {
    if t >= T::one() {
        T::zero()
    } else {
        let u = T::one() - t;
        -bump(t) / (u * u)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laguerre_low_degrees() {
        assert_eq!(laguerre(0, 0.3f64, 1.7), 1.0);
        assert!((laguerre(1, 0.3f64, 1.7) - (1.0 + 0.3 - 1.7)).abs() < 1e-15);
        // L_2^a(x) = ((x^2) - 2(a+2)x + (a+1)(a+2)) / 2
        let (a, x) = (0.5f64, 2.0f64);
        let l2 = (x * x - 2.0 * (a + 2.0) * x + (a + 1.0) * (a + 2.0)) / 2.0;
        assert!((laguerre(2, a, x) - l2).abs() < 1e-14);
    }

    #[test]
    fn laguerre_in_single_precision() {
        let v: f32 = laguerre(3, 0.0, 1.0);
        // L_3(1) = (-1 + 9 - 18 + 6)/6 = -2/3
        assert!((v + 2.0 / 3.0).abs() < 1e-6);
    }

    #[test]
    fn j0_known_values() {
        assert!((bessel_j0(1.0f64) - 0.765_197_686_557_966_6).abs() < 1e-15);
        assert!((bessel_j1(1.0f64) - 0.440_050_585_744_933_5).abs() < 1e-15);
        let z: f64 = bessel_j0_first_zero();
        assert!((z - 2.404_825_557_695_773).abs() < 1e-13);
    }

    #[test]
    fn bump_vanishes_outside() {
        assert_eq!(bump(1.0f64), 0.0);
        assert_eq!(bump(2.0f64), 0.0);
        assert!((bump(0.0f64) - (-1.0f64).exp()).abs() < 1e-16);
        let h = 1e-6;
        let fd = (bump(0.3 + h) - bump(0.3 - h)) / (2.0 * h);
        assert!((fd - bump_dt(0.3f64)).abs() < 1e-8);
    }
}
