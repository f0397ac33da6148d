//! Cholesky factorization of Hermitian positive definite band matrices.

use num_complex::Complex;

use crate::error::{MagheatError, Result};
use crate::linalg::sparse::CsrMatrix;
use crate::real::Real;

/// `A = L Lᴴ` with `L` lower triangular of half-bandwidth `b`.
///
/// Row `i` of `L` is stored in `band[i*(b+1)..(i+1)*(b+1)]`, column `j` at offset `b + j - i`.
#[derive(Debug, Clone)]
pub struct BandCholesky<T> {
    n: usize,
    b: usize,
    band: Vec<Complex<T>>,
}

impl<T: Real> BandCholesky<T> {
    /// Factors `A - σ diag(m)`.
    pub fn factor(a: &CsrMatrix<T>, sigma: T, m: &[T]) -> Result<Self> {
        let n = a.dim();
        let b = a.bandwidth();
        let w = b + 1;
        let zero = Complex::new(T::zero(), T::zero());
        let mut band = vec![zero; n * w];
        for i in 0..n {
            for (j, v) in a.row(i) {
                if j <= i {
                    band[i * w + b + j - i] = v;
                }
            }
            band[i * w + b] -= Complex::new(sigma * m[i], T::zero());
        }
        for j in 0..n {
            let lo = j.saturating_sub(b);
            let mut d = band[j * w + b].re;
            for k in lo..j {
                d -= band[j * w + b + k - j].norm_sqr();
            }
            if !(d > T::zero()) {
                return Err(MagheatError::Singular(format!("band Cholesky pivot {j} is not positive")));
            }
            let d = d.sqrt();
            band[j * w + b] = Complex::new(d, T::zero());
            for i in j + 1..(j + w).min(n) {
                let lo_i = i.saturating_sub(b).max(lo);
                let mut acc = band[i * w + b + j - i];
                for k in lo_i..j {
                    acc -= band[i * w + b + k - i] * band[j * w + b + k - j].conj();
                }
                band[i * w + b + j - i] = acc / d;
            }
        }
        Ok(Self { n, b, band })
    }

    pub fn solve(&self, rhs: &[Complex<T>]) -> Vec<Complex<T>> {
        let (n, b, w) = (self.n, self.b, self.b + 1);
        let mut y = rhs.to_vec();
        for i in 0..n {
            let mut acc = y[i];
            for k in i.saturating_sub(b)..i {
                acc -= self.band[i * w + b + k - i] * y[k];
            }
            y[i] = acc / self.band[i * w + b].re;
        }
        for i in (0..n).rev() {
            let mut acc = y[i];
            for k in i + 1..(i + w).min(n) {
                acc -= self.band[k * w + b + i - k].conj() * y[k];
            }
            y[i] = acc / self.band[i * w + b].re;
        }
        y
    }
}
