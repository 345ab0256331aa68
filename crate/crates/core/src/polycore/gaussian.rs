//! Exact Gaussian moments by Isserlis pairing.

use std::collections::HashMap;

use super::coeff::Coeff;
use super::matrix::Matrix;
use super::multi_index::MultiIndex;
use super::polynomial::Polynomial;
use crate::error::{Error, Result};

/// Memoized moments E[x^α] under N(0, Σ). The memo key is the exponent
/// vector, i.e. the sorted index multiset of the pairing.
#[derive(Clone, Debug)]
pub struct GaussianMoments<C: Coeff> {
    sigma: Matrix<C>,
    memo: HashMap<MultiIndex, C>,
}

impl<C: Coeff> GaussianMoments<C> {
    pub fn new(sigma: &Matrix<C>) -> Result<Self> {
        if !sigma.is_positive_definite() {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(GaussianMoments { sigma: sigma.clone(), memo: HashMap::new() })
    }

    pub fn dim(&self) -> usize {
        self.sigma.rows()
    }

    pub fn moment(&mut self, alpha: &MultiIndex) -> C {
        assert_eq!(alpha.dim(), self.dim());
        let order = alpha.order();
        if order % 2 == 1 {
            return C::zero();
        }
        if order == 0 {
            return C::one();
        }
        if self.sigma.is_diagonal() {
            return self.diagonal_moment(alpha);
        }
        if let Some(v) = self.memo.get(alpha) {
            return v.clone();
        }
        let i = alpha.exponents().iter().position(|&a| a > 0).unwrap();
        let rest = alpha.lowered(i).unwrap();
        let mut acc = C::zero();
        for j in 0..self.dim() {
            let count = rest.get(j);
            if count == 0 || self.sigma.get(i, j).is_zero() {
                continue;
            }
            let sub = rest.lowered(j).unwrap();
            let term = self.moment(&sub) * self.sigma.get(i, j).clone() * C::from_i64(count as i64);
            acc = acc + term;
        }
        self.memo.insert(alpha.clone(), acc.clone());
        acc
    }

    /// Product of independent marginals: ∏ (α_j − 1)!! λ_j^{α_j/2}.
    fn diagonal_moment(&self, alpha: &MultiIndex) -> C {
        let mut acc = C::one();
        for (j, &a) in alpha.exponents().iter().enumerate() {
            if a % 2 == 1 {
                return C::zero();
            }
            let mut k = a as i64 - 1;
            while k > 1 {
                acc = acc * C::from_i64(k);
                k -= 2;
            }
            acc = acc * self.sigma.get(j, j).powi(a / 2);
        }
        acc
    }

    /// ∫ p φ_Σ.
    pub fn expectation(&mut self, p: &Polynomial<C>) -> C {
        let terms: Vec<(MultiIndex, C)> = p.terms().map(|(a, c)| (a.clone(), c.clone())).collect();
        terms
            .into_iter()
            .fold(C::zero(), |acc, (a, c)| acc + c * self.moment(&a))
    }

    /// ∫ p q φ_Σ.
    pub fn inner(&mut self, p: &Polynomial<C>, q: &Polynomial<C>) -> Result<C> {
        Ok(self.expectation(&p.try_mul(q)?))
    }
}

pub fn gaussian_moment<C: Coeff>(alpha: &MultiIndex, sigma: &Matrix<C>) -> Result<C> {
    if alpha.dim() != sigma.rows() {
        return Err(Error::DimensionMismatch { expected: sigma.rows(), found: alpha.dim() });
    }
    Ok(GaussianMoments::new(sigma)?.moment(alpha))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::coeff::{rational, Rational};

    #[test]
    fn textbook_moments() {
        let s2 = Matrix::from_rows(vec![
            vec![rational(2, 1), rational(1, 2)],
            vec![rational(1, 2), rational(3, 1)],
        ]);
        assert_eq!(gaussian_moment(&MultiIndex::from([1, 0]), &s2).unwrap(), rational(0, 1));
        let one = Matrix::<Rational>::identity(1);
        assert_eq!(gaussian_moment(&MultiIndex::from([4]), &one).unwrap(), rational(3, 1));
        let d = Matrix::diag(&[rational(7, 3), rational(5, 1)]);
        assert_eq!(gaussian_moment(&MultiIndex::from([2, 0]), &d).unwrap(), rational(7, 3));
        // E[x1^2 x2^2] = Σ11 Σ22 + 2 Σ12^2
        assert_eq!(
            gaussian_moment(&MultiIndex::from([2, 2]), &s2).unwrap(),
            rational(6, 1) + rational(1, 2)
        );
    }

    #[test]
    fn rejects_indefinite() {
        let bad = Matrix::from_rows(vec![vec![1.0, 2.0], vec![2.0, 1.0]]);
        assert_eq!(gaussian_moment(&MultiIndex::from([2, 0]), &bad), Err(Error::NotPositiveDefinite));
    }

    #[test]
    fn pairing_matches_diagonal_shortcut() {
        let d = Matrix::diag(&[rational(2, 1), rational(3, 1)]);
        let mut fast = GaussianMoments::new(&d).unwrap();
        let mut nearly = d.clone();
        nearly.set(0, 1, rational(0, 1));
        for a in MultiIndex::up_to(2, 0, 6) {
            let v = fast.moment(&a);
            let expected: Rational = a
                .exponents()
                .iter()
                .enumerate()
                .map(|(j, &e)| {
                    if e % 2 == 1 {
                        rational(0, 1)
                    } else {
                        let df: i64 = (1..e as i64).step_by(2).product();
                        rational(df, 1) * d.get(j, j).powi(e / 2)
                    }
                })
                .fold(rational(1, 1), |x, y| x * y);
            assert_eq!(v, expected);
        }
    }
}
