//! Compressed-row Hermitian matrices assembled from link contributions.

use std::collections::BTreeMap;

use num_complex::Complex;

use crate::real::Real;

/// Sparse complex matrix in CSR layout (both triangles stored).
#[derive(Debug, Clone)]
pub struct CsrMatrix<T> {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex<T>>,
}

/// Accumulates `(row, col, value)` contributions, summing duplicates.
#[derive(Debug, Clone)]
pub struct TripletBuilder<T> {
    n: usize,
    rows: Vec<BTreeMap<usize, Complex<T>>>,
}

impl<T: Real> TripletBuilder<T> {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            rows: vec![BTreeMap::new(); n],
        }
    }

    pub fn add(&mut self, row: usize, col: usize, v: Complex<T>) {
        *self.rows[row]
            .entry(col)
            .or_insert_with(|| Complex::new(T::zero(), T::zero())) += v;
    }

    /// Adds the Hermitian form `w |e^{-iα} x_b - x_a|²`.
    pub fn add_link(&mut self, a: usize, b: usize, weight: T, phase: T) {
        let z = Complex::from_polar(weight, -phase);
        self.add(a, a, Complex::new(weight, T::zero()));
        self.add(b, b, Complex::new(weight, T::zero()));
        self.add(a, b, -z);
        self.add(b, a, -z.conj());
    }

    pub fn build(self) -> CsrMatrix<T> {
        let mut row_ptr = Vec::with_capacity(self.n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for row in self.rows {
            for (c, v) in row {
                cols.push(c);
                vals.push(v);
            }
            row_ptr.push(cols.len());
        }
        CsrMatrix {
            n: self.n,
            row_ptr,
            cols,
            vals,
        }
    }
}

impl<T: Real> CsrMatrix<T> {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn mul_vec_into(&self, x: &[Complex<T>], y: &mut [Complex<T>]) {
        for i in 0..self.n {
            let mut acc = Complex::new(T::zero(), T::zero());
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            y[i] = acc;
        }
    }

    pub fn mul_vec(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        let mut y = vec![Complex::new(T::zero(), T::zero()); self.n];
        self.mul_vec_into(x, &mut y);
        y
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.n)
            .map(|i| {
                (self.row_ptr[i]..self.row_ptr[i + 1])
                    .find(|&k| self.cols[k] == i)
                    .map(|k| self.vals[k].re)
                    .unwrap_or(T::zero())
            })
            .collect()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        (self.row_ptr[i]..self.row_ptr[i + 1])
            .find(|&k| self.cols[k] == j)
            .map(|k| self.vals[k])
            .unwrap_or(Complex::new(T::zero(), T::zero()))
    }

    /// Largest `|A_ij - conj(A_ji)|`.
    pub fn hermiticity_defect(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.cols[k];
                worst = worst.max((self.vals[k] - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    /// `xᴴ A x` (real part; the imaginary part vanishes for Hermitian `A`).
    pub fn herm_form(&self, x: &[Complex<T>]) -> T {
        let y = self.mul_vec(x);
        x.iter().zip(&y).map(|(a, b)| (a.conj() * b).re).sum()
    }

    /// Dense copy, row-major.
    pub fn to_dense(&self) -> Vec<Vec<Complex<T>>> {
        let mut d = vec![vec![Complex::new(T::zero(), T::zero()); self.n]; self.n];
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                d[i][self.cols[k]] = self.vals[k];
            }
        }
        d
    }

    /// `max |i - j|` over stored entries.
    pub fn bandwidth(&self) -> usize {
        (0..self.n)
            .flat_map(|i| (self.row_ptr[i]..self.row_ptr[i + 1]).map(move |k| (i, k)))
            .map(|(i, k)| i.abs_diff(self.cols[k]))
            .max()
            .unwrap_or(0)
    }

    /// Stored `(column, value)` pairs of row `i`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, Complex<T>)> + '_ {
        (self.row_ptr[i]..self.row_ptr[i + 1]).map(move |k| (self.cols[k], self.vals[k]))
    }

    /// `D A D` for a real diagonal `D`.
    pub fn scale_symmetric(&self, d: &[T]) -> Self {
        let mut out = self.clone();
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                out.vals[k] = self.vals[k] * (d[i] * d[self.cols[k]]);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn links_build_hermitian_psd_forms() {
        let mut b = TripletBuilder::<f64>::new(3);
        b.add_link(0, 1, 1.0, 0.3);
        b.add_link(1, 2, 2.0, -0.7);
        b.add_link(2, 0, 0.5, 1.1);
        let a = b.build();
        assert!(a.hermiticity_defect() < 1e-15);
        let x = vec![
            Complex::new(1.0, 0.2),
            Complex::new(-0.3, 0.5),
            Complex::new(0.1, -1.0),
        ];
        let direct = 1.0 * (Complex::from_polar(1.0, -0.3) * x[1] - x[0]).norm_sqr()
            + 2.0 * (Complex::from_polar(1.0, 0.7) * x[2] - x[1]).norm_sqr()
            + 0.5 * (Complex::from_polar(1.0, -1.1) * x[0] - x[2]).norm_sqr();
        assert!((a.herm_form(&x) - direct).abs() < 1e-13);
    }
}
