//! Small dense complex matrices and a Cholesky log-determinant.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// `A A^H`, a `rows x rows` Hermitian matrix.
    pub fn gram(&self) -> CMatrix {
        let n = self.rows;
        let mut out = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let v: Complex64 = self
                    .row(i)
                    .iter()
                    .zip(self.row(j))
                    .map(|(a, b)| a * b.conj())
                    .sum();
                out[(i, j)] = v;
                out[(j, i)] = v.conj();
            }
        }
        out
    }

    /// `A^H A`, a `cols x cols` Hermitian matrix.
    pub fn gram_cols(&self) -> CMatrix {
        let n = self.cols;
        let mut out = CMatrix::zeros(n, n);
        for r in 0..self.rows {
            let row = self.row(r);
            for i in 0..n {
                let ai = row[i].conj();
                for (j, &aj) in row[..=i].iter().enumerate() {
                    out.data[i * n + j] += ai * aj;
                }
            }
        }
        for i in 0..n {
            for j in 0..i {
                out.data[j * n + i] = out.data[i * n + j].conj();
            }
        }
        out
    }

    pub fn scale(&mut self, s: f64) {
        for v in &mut self.data {
            *v *= s;
        }
    }

    pub fn scale_row(&mut self, i: usize, s: f64) {
        for v in &mut self.data[i * self.cols..(i + 1) * self.cols] {
            *v *= s;
        }
    }

    pub fn add_diagonal(&mut self, s: f64) {
        for i in 0..self.rows.min(self.cols) {
            self.data[i * self.cols + i] += s;
        }
    }

    pub fn add_assign(&mut self, other: &CMatrix) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
    }

    /// Natural log of the determinant of a Hermitian positive-definite
    /// matrix, via an in-place Cholesky factorization. Only the lower
    /// triangle is read.
    pub fn hpd_log_det(mut self) -> Result<f64> {
        assert_eq!(self.rows, self.cols, "log-det of a non-square matrix");
        let n = self.rows;
        let mut log_det = 0.0;
        for j in 0..n {
            let mut d = self.data[j * n + j].re;
            for k in 0..j {
                d -= self.data[j * n + k].norm_sqr();
            }
            if !(d > 0.0 && d.is_finite()) {
                return Err(Error::Numerical(format!(
                    "matrix not positive definite at pivot {j} (value {d})"
                )));
            }
            let l_jj = d.sqrt();
            self.data[j * n + j] = Complex64::new(l_jj, 0.0);
            log_det += 2.0 * l_jj.ln();
            for i in j + 1..n {
                let mut s = self.data[i * n + j];
                for k in 0..j {
                    s -= self.data[i * n + k] * self.data[j * n + k].conj();
                }
                self.data[i * n + j] = s / l_jj;
            }
        }
        Ok(log_det)
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// `ln det(I + A A^H)`, factoring whichever Gram matrix is smaller.
pub fn log_det_identity_plus_gram(a: &CMatrix) -> Result<f64> {
    if a.rows() == 0 || a.cols() == 0 {
        return Ok(0.0);
    }
    let mut g = if a.rows() <= a.cols() { a.gram() } else { a.gram_cols() };
    g.add_diagonal(1.0);
    g.hpd_log_det()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn log_det_of_2x2_hermitian() {
        // [[4, 1+i], [1-i, 3]] has determinant 12 - 2 = 10
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 0)] = c(4.0, 0.0);
        m[(0, 1)] = c(1.0, 1.0);
        m[(1, 0)] = c(1.0, -1.0);
        m[(1, 1)] = c(3.0, 0.0);
        assert_relative_eq!(m.hpd_log_det().unwrap(), 10f64.ln(), epsilon = 1e-14);
    }

    #[test]
    fn indefinite_matrix_is_an_error() {
        let mut m = CMatrix::identity(2);
        m[(1, 1)] = c(-1.0, 0.0);
        assert!(matches!(m.hpd_log_det(), Err(Error::Numerical(_))));
    }

    #[test]
    fn sylvester_identity_for_both_shapes() {
        let mut a = CMatrix::zeros(2, 3);
        let vals = [c(0.3, -0.1), c(1.2, 0.4), c(-0.5, 0.9), c(0.0, 0.7), c(2.0, 0.0), c(-0.2, -0.3)];
        for (k, v) in vals.iter().enumerate() {
            a[(k / 3, k % 3)] = *v;
        }
        let mut small = a.gram();
        small.add_diagonal(1.0);
        let mut big = a.gram_cols();
        big.add_diagonal(1.0);
        let x = small.hpd_log_det().unwrap();
        assert_relative_eq!(x, big.hpd_log_det().unwrap(), epsilon = 1e-12);
        assert_relative_eq!(x, log_det_identity_plus_gram(&a).unwrap(), epsilon = 1e-14);
    }

    #[test]
    fn empty_dimensions_give_zero() {
        assert_eq!(log_det_identity_plus_gram(&CMatrix::zeros(3, 0)).unwrap(), 0.0);
        assert_eq!(log_det_identity_plus_gram(&CMatrix::zeros(0, 4)).unwrap(), 0.0);
    }
}
