//! Minimal dense complex linear algebra: row-major matrices with a
//! partial-pivoting LU solve and a normal-equations least-squares solve.
//! Systems here never exceed a few dozen unknowns, so no external
//! factorization library is warranted.

use num_complex::Complex;

use crate::{Error, Result, Scalar};

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix<S: Scalar> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<S>>,
}

impl<S: Scalar> CMatrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex::new(S::zero(), S::zero()); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::new(S::one(), S::zero());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> S {
        self.data
            .iter()
            .map(|z| z.norm())
            .fold(S::zero(), |a, b| a.max(b))
    }

    /// Largest entry-wise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> S {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(S::zero(), |a, b| a.max(b))
    }

    /// Conjugate transpose.
    pub fn hermitian_transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out[(c, r)] = self[(r, c)].conj();
            }
        }
        out
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, v: &[Complex<S>]) -> Vec<Complex<S>> {
        debug_assert_eq!(self.cols, v.len());
        let mut out = vec![Complex::new(S::zero(), S::zero()); self.rows];
        for r in 0..self.rows {
            let mut acc = Complex::new(S::zero(), S::zero());
            for c in 0..self.cols {
                acc = acc + self[(r, c)] * v[c];
            }
            out[r] = acc;
        }
        out
    }

    /// Matrix product `self * other`.
    pub fn mul_mat(&self, other: &Self) -> Self {
        debug_assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                for c in 0..other.cols {
                    out[(r, c)] = out[(r, c)] + a * other[(k, c)];
                }
            }
        }
        out
    }

    /// Solves the square system `self * x = b` by row-equilibrated LU with
    /// partial pivoting. Fails with [`Error::SingularJacobian`] when a pivot
    /// falls below the numerical-rank threshold. Row equilibration matters
    /// here: Jacobians of systems with mixed component degrees have rows of
    /// wildly different scales at large arguments.
    pub fn solve(&self, b: &[Complex<S>]) -> Result<Vec<Complex<S>>> {
        debug_assert_eq!(self.rows, self.cols);
        debug_assert_eq!(self.rows, b.len());
        let n = self.rows;
        let mut a = self.data.clone();
        let mut x: Vec<Complex<S>> = b.to_vec();

        for r in 0..n {
            let row_scale = a[r * n..(r + 1) * n]
                .iter()
                .map(|z| z.norm())
                .fold(S::zero(), |m, v| m.max(v));
            if row_scale <= S::zero() || !row_scale.is_finite() {
                return Err(Error::SingularJacobian);
            }
            let inv = S::one() / row_scale;
            for c in 0..n {
                a[r * n + c] = a[r * n + c].scale(inv);
            }
            x[r] = x[r].scale(inv);
        }
        let pivot_floor = S::epsilon() * S::of(n as f64) * S::of(8.0);

        for col in 0..n {
            // pivot selection
            let mut best = col;
            let mut best_norm = a[col * n + col].norm();
            for r in (col + 1)..n {
                let nr = a[r * n + col].norm();
                if nr > best_norm {
                    best = r;
                    best_norm = nr;
                }
            }
            if best_norm <= pivot_floor || !best_norm.is_finite() {
                return Err(Error::SingularJacobian);
            }
            if best != col {
                for c in 0..n {
                    a.swap(col * n + c, best * n + c);
                }
                x.swap(col, best);
            }
            let inv_pivot = a[col * n + col].inv();
            for r in (col + 1)..n {
                let factor = a[r * n + col] * inv_pivot;
                if factor.norm() == S::zero() {
                    continue;
                }
                for c in (col + 1)..n {
                    let sub = factor * a[col * n + c];
                    a[r * n + c] = a[r * n + c] - sub;
                }
                let sub = factor * x[col];
                x[r] = x[r] - sub;
            }
        }
        // back substitution
        for col in (0..n).rev() {
            let mut acc = x[col];
            for c in (col + 1)..n {
                acc = acc - a[col * n + c] * x[c];
            }
            x[col] = acc / a[col * n + col];
        }
        Ok(x)
    }

    /// Least-squares solve of the overdetermined system `self * x = b` via
    /// the normal equations. Adequate for the well-conditioned deflated
    /// systems it serves.
    pub fn solve_least_squares(&self, b: &[Complex<S>]) -> Result<Vec<Complex<S>>> {
        debug_assert!(self.rows >= self.cols);
        debug_assert_eq!(self.rows, b.len());
        let at = self.hermitian_transpose();
        let ata = at.mul_mat(self);
        let atb = at.mul_vec(b);
        ata.solve(&atb)
    }
}

impl<S: Scalar> std::ops::Index<(usize, usize)> for CMatrix<S> {
    type Output = Complex<S>;

    fn index(&self, (r, c): (usize, usize)) -> &Complex<S> {
        &self.data[r * self.cols + c]
    }
}

impl<S: Scalar> std::ops::IndexMut<(usize, usize)> for CMatrix<S> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex<S> {
        &mut self.data[r * self.cols + c]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn solve_small_complex_system() {
        let mut a = CMatrix::<f64>::zeros(2, 2);
        a[(0, 0)] = Complex64::new(2.0, 0.0);
        a[(0, 1)] = Complex64::new(1.0, 0.0);
        a[(1, 0)] = Complex64::new(-2.0, 0.0);
        a[(1, 1)] = Complex64::new(0.0, 1.0);
        let b = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        let x = a.solve(&b).unwrap();
        let back = a.mul_vec(&x);
        assert!((back[0] - b[0]).norm() < 1e-14);
        assert!((back[1] - b[1]).norm() < 1e-14);
    }

    #[test]
    fn singular_matrix_detected() {
        let mut a = CMatrix::<f64>::zeros(2, 2);
        a[(0, 0)] = Complex64::new(1.0, 0.0);
        a[(0, 1)] = Complex64::new(2.0, 0.0);
        a[(1, 0)] = Complex64::new(2.0, 0.0);
        a[(1, 1)] = Complex64::new(4.0, 0.0);
        let b = [Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)];
        assert!(matches!(a.solve(&b), Err(Error::SingularJacobian)));
    }

    #[test]
    fn least_squares_recovers_exact_solution() {
        // 3x2 system with an exact solution
        let mut a = CMatrix::<f64>::zeros(3, 2);
        a[(0, 0)] = Complex64::new(1.0, 0.0);
        a[(1, 1)] = Complex64::new(1.0, 0.0);
        a[(2, 0)] = Complex64::new(1.0, 0.0);
        a[(2, 1)] = Complex64::new(1.0, 0.0);
        let x_true = [Complex64::new(0.5, -1.0), Complex64::new(2.0, 0.25)];
        let b = a.mul_vec(&x_true);
        let x = a.solve_least_squares(&b).unwrap();
        assert!((x[0] - x_true[0]).norm() < 1e-12);
        assert!((x[1] - x_true[1]).norm() < 1e-12);
    }
}
