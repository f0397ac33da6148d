//! Lowest eigenpairs of sparse Hermitian pencils `K x = λ M x` with diagonal `M`.
//!
//! The production path is shifted block inverse iteration: each sweep solves
//! `(K - σM) Y = M X` column by column, `M`-orthonormalizes `Y`, and performs a
//! Rayleigh–Ritz step on the block. The solves use a band Cholesky factor when
//! the band fits in memory and Jacobi-preconditioned conjugate gradients
//! otherwise. A dense Jacobi solver backs up small problems when the iteration
//! stalls.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{MagheatError, Result};
use crate::linalg::banded::BandCholesky;
use crate::linalg::sparse::CsrMatrix;
use crate::real::{lit, Real};

type C<T> = Complex<T>;

fn czero<T: Real>() -> C<T> {
    C::new(T::zero(), T::zero())
}

/// Largest band storage (complex entries) for the direct solver.
const BAND_LIMIT: usize = 1 << 23;

/// Hermitian stiffness matrix with a positive diagonal mass (measure) matrix.
#[derive(Debug, Clone)]
pub struct HermitianPencil<T> {
    pub stiffness: CsrMatrix<T>,
    pub mass: Vec<T>,
}

/// Settings for [`HermitianPencil::lowest`].
#[derive(Debug, Clone, Copy)]
pub struct EigenSettings<T> {
    pub shift: T,
    pub tol: T,
    pub max_iter: usize,
    /// Problems up to this size may fall back to the dense solver.
    pub dense_fallback: usize,
}

impl<T: Real> Default for EigenSettings<T> {
    fn default() -> Self {
        Self {
            shift: lit(-0.1),
            tol: lit(1e-10),
            max_iter: 10_000,
            dense_fallback: 512,
        }
    }
}

/// Converged eigenpairs, ascending.
#[derive(Debug, Clone)]
pub struct Eigenpairs<T> {
    pub values: Vec<T>,
    /// `M`-orthonormal eigenvectors.
    pub vectors: Vec<Vec<C<T>>>,
    pub iterations: usize,
    pub residual: T,
}

impl<T: Real> HermitianPencil<T> {
    pub fn new(stiffness: CsrMatrix<T>, mass: Vec<T>) -> Self {
        assert_eq!(stiffness.dim(), mass.len());
        Self { stiffness, mass }
    }

    pub fn dim(&self) -> usize {
        self.mass.len()
    }

    pub fn rayleigh(&self, x: &[C<T>]) -> T {
        self.stiffness.herm_form(x) / self.mass_norm_sqr(x)
    }

    pub fn mass_norm_sqr(&self, x: &[C<T>]) -> T {
        x.iter().zip(&self.mass).map(|(v, &m)| v.norm_sqr() * m).sum()
    }

    fn mass_inner(&self, x: &[C<T>], y: &[C<T>]) -> C<T> {
        x.iter()
            .zip(y)
            .zip(&self.mass)
            .fold(czero(), |acc, ((a, b), &m)| acc + a.conj() * b * m)
    }

    /// Solves `(K - σM) y = b` by preconditioned conjugate gradients.
    pub fn solve_shifted(&self, sigma: T, b: &[C<T>], tol: T) -> Result<Vec<C<T>>> {
        let n = self.dim();
        let diag: Vec<T> = self
            .stiffness
            .diagonal()
            .iter()
            .zip(&self.mass)
            .map(|(&k, &m)| k - sigma * m)
            .collect();
        if diag.iter().any(|&d| d <= T::zero()) {
            return Err(MagheatError::Singular(
                "shifted pencil is not positive definite".into(),
            ));
        }
        let apply = |x: &[C<T>], out: &mut [C<T>]| {
            self.stiffness.mul_vec_into(x, out);
            for i in 0..n {
                out[i] -= x[i] * (sigma * self.mass[i]);
            }
        };
        let bnorm = b.iter().map(|v| v.norm_sqr()).sum::<T>().sqrt();
        let mut x = vec![czero(); n];
        if bnorm == T::zero() {
            return Ok(x);
        }
        let mut r = b.to_vec();
        let mut z: Vec<C<T>> = r.iter().zip(&diag).map(|(v, &d)| v / d).collect();
        let mut p = z.clone();
        let mut ap = vec![czero(); n];
        let mut rz: T = r.iter().zip(&z).map(|(a, b)| (a.conj() * b).re).sum();
        let max_iter = 20 * n + 100;
        for _ in 0..max_iter {
            apply(&p, &mut ap);
            let pap: T = p.iter().zip(&ap).map(|(a, b)| (a.conj() * b).re).sum();
            if pap <= T::zero() {
                return Err(MagheatError::Singular("CG breakdown".into()));
            }
            let alpha = rz / pap;
            for i in 0..n {
                x[i] += p[i] * alpha;
                r[i] -= ap[i] * alpha;
            }
            let rnorm = r.iter().map(|v| v.norm_sqr()).sum::<T>().sqrt();
            if rnorm <= tol * bnorm {
                return Ok(x);
            }
            for i in 0..n {
                z[i] = r[i] / diag[i];
            }
            let rz_new: T = r.iter().zip(&z).map(|(a, b)| (a.conj() * b).re).sum();
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..n {
                p[i] = z[i] + p[i] * beta;
            }
        }
        Err(MagheatError::NoConvergence {
            iterations: max_iter,
            residual: f64::NAN,
        })
    }

    fn orthonormalize(&self, block: &mut Vec<Vec<C<T>>>) {
        let mut kept: Vec<Vec<C<T>>> = Vec::with_capacity(block.len());
        for mut v in block.drain(..) {
            for _ in 0..2 {
                for q in &kept {
                    let c = self.mass_inner(q, &v);
                    for (vi, qi) in v.iter_mut().zip(q) {
                        *vi -= qi * c;
                    }
                }
            }
            let nrm = self.mass_norm_sqr(&v).sqrt();
            if nrm > T::epsilon() * lit(1e3) {
                for vi in v.iter_mut() {
                    *vi /= nrm;
                }
                kept.push(v);
            }
        }
        *block = kept;
    }

    fn residual_norm(&self, x: &[C<T>], theta: T) -> T {
        let kx = self.stiffness.mul_vec(x);
        kx.iter()
            .zip(x)
            .zip(&self.mass)
            .map(|((a, b), &m)| (a - b * (theta * m)).norm_sqr() / m)
            .sum::<T>()
            .sqrt()
    }

    /// The `count` lowest eigenpairs.
    pub fn lowest(&self, count: usize, settings: &EigenSettings<T>) -> Result<Eigenpairs<T>> {
        match self.lowest_iterative(count, settings) {
            Ok(p) => Ok(p),
            Err(e) if self.dim() <= settings.dense_fallback => {
                self.lowest_dense(count).map_err(|_| e)
            }
            Err(e) => Err(e),
        }
    }

    fn lowest_iterative(&self, count: usize, settings: &EigenSettings<T>) -> Result<Eigenpairs<T>> {
        let n = self.dim();
        let count = count.min(n);
        let block_size = (count + 3).min(n);
        // random start: structured vectors (constants, pure Fourier modes) can be
        // exact eigenvectors of a higher level and stop the iteration on it
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let mut block: Vec<Vec<C<T>>> = (0..block_size)
            .map(|_| {
                (0..n)
                    .map(|_| C::new(lit(rng.random_range(-1.0..1.0)), lit(rng.random_range(-1.0..1.0))))
                    .collect()
            })
            .collect();
        self.orthonormalize(&mut block);
        let mut last_res = T::infinity();
        let cg_tol: T = lit::<T>(1e-3).min(settings.tol * lit(1e-2)).max(T::epsilon() * lit(10.0));
        let direct = if n * (self.stiffness.bandwidth() + 1) <= BAND_LIMIT {
            Some(BandCholesky::factor(&self.stiffness, settings.shift, &self.mass)?)
        } else {
            None
        };
        for it in 1..=settings.max_iter {
            let mut next = Vec::with_capacity(block.len());
            for x in &block {
                let rhs: Vec<C<T>> = x.iter().zip(&self.mass).map(|(v, &m)| v * m).collect();
                next.push(match &direct {
                    Some(f) => f.solve(&rhs),
                    None => self.solve_shifted(settings.shift, &rhs, cg_tol)?,
                });
            }
            self.orthonormalize(&mut next);
            let p = next.len();
            let kx: Vec<Vec<C<T>>> = next.iter().map(|v| self.stiffness.mul_vec(v)).collect();
            let mut h = vec![vec![czero::<T>(); p]; p];
            for a in 0..p {
                for b in 0..p {
                    h[a][b] = next[a]
                        .iter()
                        .zip(&kx[b])
                        .fold(czero(), |acc, (u, w)| acc + u.conj() * w);
                }
            }
            let (theta, coeffs) = hermitian_eigen(&h);
            block = (0..p)
                .map(|j| {
                    let mut v = vec![czero(); n];
                    for (a, col) in next.iter().enumerate() {
                        let c = coeffs[j][a];
                        for (vi, ci) in v.iter_mut().zip(col) {
                            *vi += ci * c;
                        }
                    }
                    v
                })
                .collect();
            let res = (0..count)
                .map(|j| self.residual_norm(&block[j], theta[j]) / (T::one() + theta[j].abs()))
                .fold(T::zero(), |m, r| m.max(r));
            last_res = res;
            if res <= settings.tol {
                return Ok(Eigenpairs {
                    values: theta[..count].to_vec(),
                    vectors: block[..count].to_vec(),
                    iterations: it,
                    residual: res,
                });
            }
        }
        Err(MagheatError::NoConvergence {
            iterations: settings.max_iter,
            residual: crate::real::to_f64(last_res),
        })
    }

    /// Dense solve of `M^{-1/2} K M^{-1/2}`.
    pub fn lowest_dense(&self, count: usize) -> Result<Eigenpairs<T>> {
        let n = self.dim();
        let s: Vec<T> = self.mass.iter().map(|&m| T::one() / m.sqrt()).collect();
        let a = self.stiffness.scale_symmetric(&s).to_dense();
        let (vals, vecs) = hermitian_eigen(&a);
        let count = count.min(n);
        let vectors = vecs[..count]
            .iter()
            .map(|v| v.iter().zip(&s).map(|(x, &si)| x * si).collect())
            .collect();
        Ok(Eigenpairs {
            values: vals[..count].to_vec(),
            vectors,
            iterations: 0,
            residual: T::zero(),
        })
    }
}

/// Eigen-decomposition of a real symmetric matrix by cyclic Jacobi rotations.
///
/// Returns ascending eigenvalues and the matching eigenvectors.
pub fn symmetric_eigen<T: Real>(a: &[Vec<T>]) -> (Vec<T>, Vec<Vec<T>>) {
    let n = a.len();
    let mut a: Vec<Vec<T>> = a.to_vec();
    let mut v = vec![vec![T::zero(); n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = T::one();
    }
    for _sweep in 0..100 {
        let off: T = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        let total: T = (0..n).map(|i| a[i][i] * a[i][i]).sum::<T>() + off;
        if off <= T::epsilon() * T::epsilon() * total || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p][q];
                if apq == T::zero() {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (lit::<T>(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let vkp = row[p];
                    let vkq = row[q];
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i][i].partial_cmp(&a[j][j]).unwrap_or(std::cmp::Ordering::Equal));
    let vals = order.iter().map(|&i| a[i][i]).collect();
    let vecs = order
        .iter()
        .map(|&j| (0..n).map(|k| v[k][j]).collect())
        .collect();
    (vals, vecs)
}

/// Eigen-decomposition of a complex Hermitian matrix through its real `2n × 2n` embedding.
pub fn hermitian_eigen<T: Real>(a: &[Vec<C<T>>]) -> (Vec<T>, Vec<Vec<C<T>>>) {
    let n = a.len();
    let mut big = vec![vec![T::zero(); 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            let z = a[i][j];
            big[i][j] = z.re;
            big[i][j + n] = -z.im;
            big[i + n][j] = z.im;
            big[i + n][j + n] = z.re;
        }
    }
    let (vals, vecs) = symmetric_eigen(&big);
    // every eigenvalue appears twice; pick a complex-independent representative
    let mut out_vals = Vec::with_capacity(n);
    let mut out_vecs: Vec<Vec<C<T>>> = Vec::with_capacity(n);
    for (lam, v) in vals.into_iter().zip(vecs) {
        if out_vecs.len() == n {
            break;
        }
        let mut z: Vec<C<T>> = (0..n).map(|k| C::new(v[k], v[k + n])).collect();
        for _ in 0..2 {
            for q in &out_vecs {
                let c = q.iter().zip(&z).fold(czero(), |acc, (a, b)| acc + a.conj() * b);
                for (zi, qi) in z.iter_mut().zip(q) {
                    *zi -= qi * c;
                }
            }
        }
        let nrm = z.iter().map(|x| x.norm_sqr()).sum::<T>().sqrt();
        if nrm > lit(1e-6) {
            for zi in z.iter_mut() {
                *zi /= nrm;
            }
            out_vals.push(lam);
            out_vecs.push(z);
        }
    }
    (out_vals, out_vecs)
}

/// Operator norm of an operator that is self-adjoint in the inner product `inner`,
/// estimated by power iteration on `‖D x‖ / ‖x‖`.
pub fn self_adjoint_norm<T, F, G>(
    mut apply: F,
    inner: G,
    start: Vec<T>,
    tol: T,
    max_iter: usize,
) -> Result<T>
where
    T: Real,
    F: FnMut(&[T]) -> Result<Vec<T>>,
    G: Fn(&[T], &[T]) -> T,
{
    let mut x = start;
    let nx = inner(&x, &x).sqrt();
    if nx == T::zero() {
        return Ok(T::zero());
    }
    x.iter_mut().for_each(|v| *v /= nx);
    let mut est = T::zero();
    for _ in 0..max_iter {
        let y = apply(&x)?;
        let ny = inner(&y, &y).sqrt();
        if ny == T::zero() {
            return Ok(T::zero());
        }
        let converged = (ny - est).abs() <= tol * ny;
        est = ny;
        x = y.into_iter().map(|v| v / ny).collect();
        if converged {
            break;
        }
    }
    Ok(est)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::sparse::TripletBuilder;

    fn ring(n: usize, flux: f64) -> HermitianPencil<f64> {
        let h = 2.0 * std::f64::consts::PI / n as f64;
        let mut b = TripletBuilder::new(n);
        for j in 0..n {
            b.add_link(j, (j + 1) % n, 1.0 / h, flux * h);
        }
        HermitianPencil::new(b.build(), vec![h; n])
    }

    #[test]
    fn ring_spectrum_matches_dispersion() {
        let n = 64;
        let flux = 0.3;
        let h = 2.0 * std::f64::consts::PI / n as f64;
        let p = ring(n, flux);
        let got = p.lowest(3, &EigenSettings::default()).unwrap();
        let mut exact: Vec<f64> = (-5i32..=5)
            .map(|k| (2.0 / h * ((k as f64 - flux) * h / 2.0).sin()).powi(2))
            .collect();
        exact.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for j in 0..3 {
            assert!((got.values[j] - exact[j]).abs() < 1e-9, "{:?} {:?}", got.values, exact);
        }
    }

    #[test]
    fn dense_and_iterative_agree() {
        let p = ring(40, 0.45);
        let a = p.lowest(2, &EigenSettings::default()).unwrap();
        let b = p.lowest_dense(2).unwrap();
        for j in 0..2 {
            assert!((a.values[j] - b.values[j]).abs() < 1e-9);
        }
    }

    #[test]
    fn jacobi_real_symmetric() {
        let a = vec![vec![2.0, 1.0, 0.0], vec![1.0, 2.0, 1.0], vec![0.0, 1.0, 2.0]];
        let (vals, _) = symmetric_eigen(&a);
        let s = 2f64.sqrt();
        assert!((vals[0] - (2.0 - s)).abs() < 1e-14);
        assert!((vals[1] - 2.0).abs() < 1e-14);
        assert!((vals[2] - (2.0 + s)).abs() < 1e-14);
    }

    #[test]
    fn power_norm_of_diagonal() {
        let d = [0.5, -3.0, 2.0];
        let norm = self_adjoint_norm(
            |x: &[f64]| Ok(x.iter().zip(&d).map(|(a, b)| a * b).collect()),
            |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum(),
            vec![1.0, 1.0, 1.0],
            1e-14,
            500,
        )
        .unwrap();
        assert!((norm - 3.0).abs() < 1e-10);
    }
}
