//! Symmetric tridiagonal matrices and generalized pencils `(K, M)`.

use num_complex::Complex;

use crate::error::{MagheatError, Result};
use crate::real::{lit, Real};

/// Real symmetric tridiagonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiag<T> {
    pub diag: Vec<T>,
    /// `off[i]` couples rows `i` and `i + 1`.
    pub off: Vec<T>,
}

impl<T: Real> SymTridiag<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            diag: vec![T::zero(); n],
            off: vec![T::zero(); n.saturating_sub(1)],
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// `self + alpha * other`.
    pub fn axpy(&self, alpha: T, other: &Self) -> Self {
        Self {
            diag: self.diag.iter().zip(&other.diag).map(|(&a, &b)| a + alpha * b).collect(),
            off: self.off.iter().zip(&other.off).map(|(&a, &b)| a + alpha * b).collect(),
        }
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        let n = self.len();
        let mut y = vec![T::zero(); n];
        for i in 0..n {
            let mut acc = self.diag[i] * x[i];
            if i > 0 {
                acc += self.off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                acc += self.off[i] * x[i + 1];
            }
            y[i] = acc;
        }
        y
    }

    pub fn mul_vec_complex(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        let n = self.len();
        let mut y = vec![Complex::new(T::zero(), T::zero()); n];
        for i in 0..n {
            let mut acc = x[i] * self.diag[i];
            if i > 0 {
                acc += x[i - 1] * self.off[i - 1];
            }
            if i + 1 < n {
                acc += x[i + 1] * self.off[i];
            }
            y[i] = acc;
        }
        y
    }

    /// Quadratic form `xᵀ A x`.
    pub fn quad_form(&self, x: &[T]) -> T {
        let n = self.len();
        let mut acc = T::zero();
        for i in 0..n {
            acc += self.diag[i] * x[i] * x[i];
            if i + 1 < n {
                acc += lit::<T>(2.0) * self.off[i] * x[i] * x[i + 1];
            }
        }
        acc
    }

    /// Hermitian form `xᴴ A x` for complex `x`.
    pub fn herm_form(&self, x: &[Complex<T>]) -> T {
        let n = self.len();
        let mut acc = T::zero();
        for i in 0..n {
            acc += self.diag[i] * x[i].norm_sqr();
            if i + 1 < n {
                acc += lit::<T>(2.0) * self.off[i] * (x[i].conj() * x[i + 1]).re;
            }
        }
        acc
    }

    /// `LDLᵀ` factorization without pivoting.
    pub fn factor(&self) -> Result<TridiagFactor<T>> {
        let n = self.len();
        let mut d = Vec::with_capacity(n);
        let mut l = Vec::with_capacity(n.saturating_sub(1));
        let scale = self.diag.iter().fold(T::zero(), |m, &v| m.max(v.abs()));
        for i in 0..n {
            let mut di = self.diag[i];
            if i > 0 {
                let li = self.off[i - 1] / d[i - 1];
                di -= li * self.off[i - 1];
                l.push(li);
            }
            if di.abs() <= T::epsilon() * scale * lit(1e-3) || !di.is_finite() {
                return Err(MagheatError::Singular(format!("zero pivot at row {i}")));
            }
            d.push(di);
        }
        Ok(TridiagFactor { d, l })
    }
}

/// `LDLᵀ` factors of a symmetric tridiagonal matrix.
#[derive(Debug, Clone)]
pub struct TridiagFactor<T> {
    d: Vec<T>,
    l: Vec<T>,
}

impl<T: Real> TridiagFactor<T> {
    pub fn solve_in_place(&self, b: &mut [T]) {
        let n = self.d.len();
        for i in 1..n {
            let prev = b[i - 1];
            b[i] -= self.l[i - 1] * prev;
        }
        for i in 0..n {
            b[i] /= self.d[i];
        }
        for i in (0..n.saturating_sub(1)).rev() {
            let next = b[i + 1];
            b[i] -= self.l[i] * next;
        }
    }

    pub fn solve_complex_in_place(&self, b: &mut [Complex<T>]) {
        let n = self.d.len();
        for i in 1..n {
            let prev = b[i - 1];
            b[i] -= prev * self.l[i - 1];
        }
        for i in 0..n {
            b[i] /= self.d[i];
        }
        for i in (0..n.saturating_sub(1)).rev() {
            let next = b[i + 1];
            b[i] -= next * self.l[i];
        }
    }
}

/// Generalized symmetric-definite pencil `K x = λ M x` with tridiagonal `K` and `M`.
#[derive(Debug, Clone)]
pub struct TridiagPencil<T> {
    pub stiffness: SymTridiag<T>,
    pub mass: SymTridiag<T>,
}

impl<T: Real> TridiagPencil<T> {
    pub fn new(stiffness: SymTridiag<T>, mass: SymTridiag<T>) -> Self {
        assert_eq!(stiffness.len(), mass.len());
        Self { stiffness, mass }
    }

    pub fn len(&self) -> usize {
        self.stiffness.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stiffness.is_empty()
    }

    /// Number of eigenvalues strictly below `sigma` (Sylvester inertia of `K - σM`).
    pub fn count_below(&self, sigma: T) -> usize {
        let k = &self.stiffness;
        let m = &self.mass;
        let n = k.len();
        let tiny = T::min_positive_value().sqrt();
        let mut count = 0;
        let mut d_prev = T::one();
        for i in 0..n {
            let a = k.diag[i] - sigma * m.diag[i];
            let d = if i == 0 {
                a
            } else {
                let b = k.off[i - 1] - sigma * m.off[i - 1];
                a - b * b / d_prev
            };
            let d = if d == T::zero() { -tiny } else { d };
            if d < T::zero() {
                count += 1;
            }
            d_prev = d;
        }
        count
    }

    /// Upper bound for the spectrum from Gershgorin discs of `K` and the smallest lumped mass.
    fn spectral_upper_bound(&self) -> T {
        let k = &self.stiffness;
        let n = k.len();
        let mut gmax = T::zero();
        let mut mmin = T::infinity();
        for i in 0..n {
            let mut r = k.diag[i].abs();
            if i > 0 {
                r += k.off[i - 1].abs();
            }
            if i + 1 < n {
                r += k.off[i].abs();
            }
            gmax = gmax.max(r);
            // consistent P1 mass satisfies λ_min(M) >= min_i (m_ii - |m_i,i±1|) > 0
            let mut row = self.mass.diag[i];
            if i > 0 {
                row -= self.mass.off[i - 1].abs();
            }
            if i + 1 < n {
                row -= self.mass.off[i].abs();
            }
            mmin = mmin.min(row.max(self.mass.diag[i] * lit(1e-3)));
        }
        gmax / mmin
    }

    /// The `index`-th smallest eigenvalue (0-based) by bisection on the inertia count.
    pub fn eigenvalue(&self, index: usize, lower: T, tol: T) -> Result<T> {
        if index >= self.len() {
            return Err(crate::error::invalid(
                "index",
                format!("{index} out of range for {} unknowns", self.len()),
            ));
        }
        let mut lo = lower;
        if self.count_below(lo) > index {
            return Err(crate::error::invalid(
                "lower",
                "lower bracket exceeds the requested eigenvalue",
            ));
        }
        let mut hi = T::one().max(lo + T::one());
        let cap = self.spectral_upper_bound() * lit(2.0) + T::one();
        while self.count_below(hi) <= index {
            hi *= lit(2.0);
            if hi > cap * lit(4.0) {
                return Err(MagheatError::NoConvergence {
                    iterations: 0,
                    residual: f64::INFINITY,
                });
            }
        }
        for _ in 0..200 {
            let mid = (lo + hi) * lit(0.5);
            if self.count_below(mid) > index {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= tol * (T::one() + lo.abs()) {
                break;
            }
        }
        Ok((lo + hi) * lit(0.5))
    }

    /// Eigenvector for an (approximate) eigenvalue by inverse iteration, `M`-normalized.
    pub fn eigenvector(&self, lambda: T) -> Result<Vec<T>> {
        let n = self.len();
        let scale = T::one() + lambda.abs();
        let mut shift = lambda - scale * lit(1e-10);
        let mut factor = None;
        for _ in 0..8 {
            match self.stiffness.axpy(-shift, &self.mass).factor() {
                Ok(f) => {
                    factor = Some(f);
                    break;
                }
                Err(_) => shift -= scale * lit(1e-9),
            }
        }
        let factor = factor.ok_or_else(|| MagheatError::Singular("shifted pencil".into()))?;
        let mut x: Vec<T> = (0..n)
            .map(|i| T::one() + lit::<T>(0.01) * T::from_usize(i % 7).unwrap_or(T::zero()))
            .collect();
        for _ in 0..6 {
            let mut y = self.mass.mul_vec(&x);
            factor.solve_in_place(&mut y);
            let norm = self.mass.quad_form(&y).sqrt();
            x = y.into_iter().map(|v| v / norm).collect();
        }
        Ok(x)
    }

    /// Rayleigh quotient `xᵀKx / xᵀMx`.
    pub fn rayleigh(&self, x: &[T]) -> T {
        self.stiffness.quad_form(x) / self.mass.quad_form(x)
    }
}
