//! Small dense matrices over a coefficient field, plus symmetric eigen helpers.

use nalgebra::{DMatrix, SymmetricEigen};

use super::coeff::Coeff;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<C: Coeff> {
    rows: usize,
    cols: usize,
    data: Vec<C>,
}

impl<C: Coeff> Matrix<C> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![C::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, C::one());
        }
        m
    }

    pub fn diag(values: &[C]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, v) in values.iter().enumerate() {
            m.set(i, i, v.clone());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<C>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged matrix rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &C {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C) {
        self.data[i * self.cols + j] = v;
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = C::zero();
                for k in 0..self.cols {
                    acc = acc + self.get(i, k).clone() * other.get(k, j).clone();
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[C]) -> Vec<C> {
        (0..self.rows)
            .map(|i| {
                (0..self.cols).fold(C::zero(), |acc, j| acc + self.get(i, j).clone() * v[j].clone())
            })
            .collect()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn is_diagonal(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.get(i, j).is_zero()))
    }

    pub fn diagonal(&self) -> Vec<C> {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i).clone()).collect()
    }

    /// Pivots of the LDLᵀ factorization without pivoting; None if one vanishes.
    fn ldl_pivots(&self) -> Option<Vec<C>> {
        let n = self.rows;
        let mut a = self.clone();
        let mut pivots = Vec::with_capacity(n);
        for k in 0..n {
            let p = a.get(k, k).clone();
            if p.is_zero() {
                return None;
            }
            for i in k + 1..n {
                let f = a.get(i, k).clone() / p.clone();
                for j in k + 1..n {
                    let v = a.get(i, j).clone() - f.clone() * a.get(k, j).clone();
                    a.set(i, j, v);
                }
            }
            pivots.push(p);
        }
        Some(pivots)
    }

    /// Symmetric positive definite, checked exactly in rational mode.
    pub fn is_positive_definite(&self) -> bool {
        self.is_symmetric()
            && self
                .ldl_pivots()
                .is_some_and(|p| p.iter().all(|v| *v > C::zero()))
    }

    pub fn determinant(&self) -> C {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.clone();
        let mut det = C::one();
        for k in 0..n {
            let Some(piv) = (k..n).find(|&i| !a.get(i, k).is_zero()) else {
                return C::zero();
            };
            if piv != k {
                for j in 0..n {
                    let t = a.get(k, j).clone();
                    a.set(k, j, a.get(piv, j).clone());
                    a.set(piv, j, t);
                }
                det = -det;
            }
            let p = a.get(k, k).clone();
            det = det * p.clone();
            for i in k + 1..n {
                let f = a.get(i, k).clone() / p.clone();
                for j in k..n {
                    let v = a.get(i, j).clone() - f.clone() * a.get(k, j).clone();
                    a.set(i, j, v);
                }
            }
        }
        det
    }

    /// Gauss–Jordan inverse.
    pub fn inverse(&self) -> Result<Self> {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for k in 0..n {
            let piv = if C::EXACT {
                (k..n).find(|&i| !a.get(i, k).is_zero())
            } else {
                (k..n).max_by(|&i, &j| {
                    a.get(i, k).to_f64().abs().total_cmp(&a.get(j, k).to_f64().abs())
                })
            };
            let piv = match piv {
                Some(p) if !a.get(p, k).is_zero() => p,
                _ => return Err(Error::Singular { min: 0.0, max: 0.0 }),
            };
            if piv != k {
                for j in 0..n {
                    let t = a.get(k, j).clone();
                    a.set(k, j, a.get(piv, j).clone());
                    a.set(piv, j, t);
                    let t = inv.get(k, j).clone();
                    inv.set(k, j, inv.get(piv, j).clone());
                    inv.set(piv, j, t);
                }
            }
            let p = a.get(k, k).clone();
            for j in 0..n {
                a.set(k, j, a.get(k, j).clone() / p.clone());
                inv.set(k, j, inv.get(k, j).clone() / p.clone());
            }
            for i in 0..n {
                if i == k || a.get(i, k).is_zero() {
                    continue;
                }
                let f = a.get(i, k).clone();
                for j in 0..n {
                    a.set(i, j, a.get(i, j).clone() - f.clone() * a.get(k, j).clone());
                    inv.set(i, j, inv.get(i, j).clone() - f.clone() * inv.get(k, j).clone());
                }
            }
        }
        Ok(inv)
    }

    pub fn to_f64(&self) -> Matrix<f64> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|c| c.to_f64()).collect() }
    }

    pub fn to_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).to_f64())
    }

    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Matrix<D> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }
}

impl Matrix<f64> {
    pub fn from_nalgebra(m: &DMatrix<f64>) -> Self {
        Matrix::from_rows((0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Eigenpairs of a symmetric matrix: ascending eigenvalues, eigenvectors as
/// columns with the first nonzero component of each made positive.
#[derive(Clone, Debug)]
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: Matrix<f64>,
}

pub fn sym_eigen<C: Coeff>(m: &Matrix<C>) -> Result<SymEigen> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch { expected: m.rows(), found: m.cols() });
    }
    let n = m.rows();
    let a = m.to_nalgebra();
    let a = (&a + a.transpose()) * 0.5;
    let eig = SymmetricEigen::new(a);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]).then(i.cmp(&j)));
    let mut vectors = Matrix::zeros(n, n);
    let mut values = Vec::with_capacity(n);
    for (col, &k) in order.iter().enumerate() {
        values.push(eig.eigenvalues[k]);
        let v = eig.eigenvectors.column(k);
        let sign = v
            .iter()
            .find(|x| x.abs() > 1e-12)
            .map_or(1.0, |x| x.signum());
        for i in 0..n {
            vectors.set(i, col, sign * v[i]);
        }
    }
    Ok(SymEigen { values, vectors })
}

/// Symmetric square root of a PSD matrix; tiny negative eigenvalues from
/// rounding are clamped, clearly negative ones rejected.
pub fn sym_sqrt<C: Coeff>(m: &Matrix<C>) -> Result<Matrix<f64>> {
    let e = sym_eigen(m)?;
    let n = m.rows();
    let scale = e.values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if e.values.iter().any(|&v| v < -1e-12 * scale.max(1e-300)) {
        return Err(Error::NotPositiveDefinite);
    }
    let mut out = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let v: f64 = (0..n)
                .map(|k| e.vectors.get(i, k) * e.values[k].max(0.0).sqrt() * e.vectors.get(j, k))
                .sum();
            out.set(i, j, v);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::coeff::{rational, Rational};

    #[test]
    fn exact_inverse_and_determinant() {
        let m: Matrix<Rational> = Matrix::from_rows(vec![
            vec![rational(2, 1), rational(1, 1)],
            vec![rational(1, 1), rational(3, 1)],
        ]);
        assert_eq!(m.determinant(), rational(5, 1));
        assert_eq!(m.matmul(&m.inverse().unwrap()), Matrix::identity(2));
        assert!(m.is_positive_definite());
        let bad: Matrix<Rational> = Matrix::from_rows(vec![
            vec![rational(1, 1), rational(2, 1)],
            vec![rational(2, 1), rational(1, 1)],
        ]);
        assert!(!bad.is_positive_definite());
    }

    #[test]
    fn square_root_squares_back() {
        let m = Matrix::from_rows(vec![vec![2.0, 0.5], vec![0.5, 1.0]]);
        let s = sym_sqrt(&m).unwrap();
        let back = s.matmul(&s);
        for i in 0..2 {
            for j in 0..2 {
                assert!((back.get(i, j) - m.get(i, j)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn eigenvector_sign_convention() {
        let m = Matrix::from_rows(vec![vec![1.0, 0.3], vec![0.3, 2.0]]);
        let e = sym_eigen(&m).unwrap();
        assert!(e.values[0] < e.values[1]);
        for c in 0..2 {
            assert!(*e.vectors.get(0, c) > 0.0);
        }
    }
}
