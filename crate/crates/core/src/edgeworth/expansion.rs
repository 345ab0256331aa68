//! Characteristic-function polynomials P_k and Edgeworth polynomials Q_k.

use super::moments::CumulantSet;
use crate::error::{Error, Result};
use crate::polycore::{
    hermite_tensor, sym_eigen, Coeff, EpsSeries, HermiteConvention, Matrix, MultiIndex, Polynomial,
};

fn factorial<C: Coeff>(alpha: &MultiIndex) -> C {
    alpha
        .exponents()
        .iter()
        .flat_map(|&a| 1..=a as i64)
        .fold(C::one(), |acc, k| acc * C::from_i64(k))
}

/// P_1..P_r as real polynomials in w = iz: the coefficient of w^α is b_α.
pub fn build_p<C: Coeff>(c: &CumulantSet<C>, r: usize) -> Result<Vec<Polynomial<C>>> {
    if r == 0 {
        return Ok(Vec::new());
    }
    let needed = r + 2;
    if (c.order() as usize) < needed {
        return Err(Error::InsufficientOrder { needed, have: c.order() as usize });
    }
    let dim = c.dim();
    let mut coeffs = vec![Polynomial::zero(dim); r + 1];
    for (alpha, mu) in c.entries() {
        let k = alpha.order() as usize;
        if k >= 3 && k - 2 <= r {
            let term = Polynomial::monomial(alpha.clone(), mu.clone() / factorial::<C>(alpha));
            coeffs[k - 2] = &coeffs[k - 2] + &term;
        }
    }
    let series = EpsSeries::from_coeffs(coeffs)?.exp()?;
    Ok((1..=r).map(|k| series.coeff(k)).collect())
}

/// Σ_α b_α ∏ λ_j^{-α_j/2} H_{α_j}(x_j/√λ_j) for a polynomial in w = iz.
fn hermite_image<C: Coeff>(p: &Polynomial<C>, lambdas: &[C]) -> Result<Polynomial<C>> {
    let mut q = Polynomial::zero(p.dim());
    for (alpha, b) in p.terms() {
        let h = hermite_tensor(alpha, lambdas, HermiteConvention::Edgeworth)?;
        q = &q + &h.scale(b);
    }
    Ok(q)
}

/// Orthogonal frame of Σ = A Λ Aᵀ in the coefficient field, if representable.
pub(crate) struct Frame<C: Coeff> {
    pub rotation: Matrix<C>,
    pub lambdas: Vec<C>,
}

pub(crate) fn diagonal_frame<C: Coeff>(c: &CumulantSet<C>) -> Result<Option<Frame<C>>> {
    c.require_nonsingular()?;
    let sigma = c.covariance();
    if sigma.is_diagonal() {
        return Ok(None);
    }
    let eig = sym_eigen(sigma)?;
    let lift = |v: f64| C::from_f64(v).ok_or(Error::ExactNeedsDiagonal);
    let n = sigma.rows();
    let mut rotation = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            rotation.set(i, j, lift(*eig.vectors.get(i, j))?);
        }
    }
    let lambdas = eig.values.iter().map(|&v| lift(v)).collect::<Result<_>>()?;
    Ok(Some(Frame { rotation, lambdas }))
}

/// Q_1..Q_r with φ_Σ·Q_k the inverse Fourier transform of e^{-z·Σz/2}P_k(z).
pub fn build_q<C: Coeff>(c: &CumulantSet<C>, r: usize) -> Result<Vec<Polynomial<C>>> {
    let frame = diagonal_frame(c)?;
    let ps = build_p(c, r)?;
    match frame {
        None => {
            let lambdas = c.covariance().diagonal();
            ps.iter().map(|p| hermite_image(p, &lambdas)).collect()
        }
        Some(Frame { rotation, lambdas }) => {
            let back = rotation.transpose();
            ps.iter()
                .map(|p| {
                    let rotated = p.compose_linear(&rotation)?;
                    hermite_image(&rotated, &lambdas)?.compose_linear(&back)
                })
                .collect()
        }
    }
}

/// Density of N(0, Σ), evaluated in doubles.
#[derive(Clone, Debug)]
pub struct GaussianDensity {
    sigma_inv: Matrix<f64>,
    log_norm: f64,
}

impl GaussianDensity {
    pub fn new<C: Coeff>(sigma: &Matrix<C>) -> Result<Self> {
        let s = sigma.to_f64();
        if !s.is_positive_definite() {
            return Err(Error::NotPositiveDefinite);
        }
        let det = s.determinant();
        let q = s.rows() as f64;
        Ok(GaussianDensity {
            sigma_inv: s.inverse()?,
            log_norm: -0.5 * (q * (2.0 * std::f64::consts::PI).ln() + det.ln()),
        })
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let y = self.sigma_inv.mul_vec(x);
        let quad: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        (self.log_norm - 0.5 * quad).exp()
    }
}

/// The signed density φ_Σ(1 + Σ_k ε^k Q_k) with Q_k precomputed.
#[derive(Clone, Debug)]
pub struct EdgeworthExpansion<C: Coeff> {
    pub p: Vec<Polynomial<C>>,
    pub q: Vec<Polynomial<C>>,
    gaussian: GaussianDensity,
}

impl<C: Coeff> EdgeworthExpansion<C> {
    pub fn new(c: &CumulantSet<C>, r: usize) -> Result<Self> {
        let q = build_q(c, r)?;
        Ok(EdgeworthExpansion { p: build_p(c, r)?, q, gaussian: GaussianDensity::new(c.covariance())? })
    }

    pub fn order(&self) -> usize {
        self.q.len()
    }

    pub fn density(&self, r: usize, eps: f64, x: &[f64]) -> f64 {
        let correction: f64 = self
            .q
            .iter()
            .take(r)
            .enumerate()
            .map(|(k, q)| eps.powi(k as i32 + 1) * q.eval_f64(x))
            .sum();
        self.gaussian.eval(x) * (1.0 + correction)
    }
}

pub fn edgeworth_density<C: Coeff>(c: &CumulantSet<C>, r: usize, eps: f64, x: &[f64]) -> Result<f64> {
    Ok(EdgeworthExpansion::new(c, r)?.density(r, eps, x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::{hermite_1d, rational, GaussianMoments, Rational};
    use std::collections::BTreeMap;

    fn cumulants(dim: usize, order: u32, entries: &[(&[u32], Rational)]) -> CumulantSet<Rational> {
        let mu: BTreeMap<_, _> = entries.iter().map(|(a, v)| (MultiIndex::new(a.to_vec()), v.clone())).collect();
        CumulantSet::new(dim, order, mu).unwrap()
    }

    fn bivariate_cubic(m: [i64; 4]) -> CumulantSet<Rational> {
        cumulants(
            2,
            3,
            &[
                (&[2, 0], rational(1, 1)),
                (&[0, 2], rational(1, 1)),
                (&[3, 0], rational(m[0], 1)),
                (&[2, 1], rational(m[1], 1)),
                (&[1, 2], rational(m[2], 1)),
                (&[0, 3], rational(m[3], 1)),
            ],
        )
    }

    #[test]
    fn cubic_p1_in_two_dimensions() {
        let c = bivariate_cubic([2, 3, 5, 7]);
        let p1 = &build_p(&c, 1).unwrap()[0];
        // 6 P1 = μ30 w1³ + 3μ21 w1²w2 + 3μ12 w1w2² + μ03 w2³ with w = iz
        let six_p1 = p1.scale(&rational(6, 1));
        assert_eq!(six_p1.coeff(&MultiIndex::from([3, 0])), rational(2, 1));
        assert_eq!(six_p1.coeff(&MultiIndex::from([2, 1])), rational(9, 1));
        assert_eq!(six_p1.coeff(&MultiIndex::from([1, 2])), rational(15, 1));
        assert_eq!(six_p1.coeff(&MultiIndex::from([0, 3])), rational(7, 1));
        assert_eq!(six_p1.len(), 4);
    }

    #[test]
    fn cubic_q1_in_two_dimensions() {
        let c = bivariate_cubic([2, 3, 5, 7]);
        let q1 = &build_q(&c, 1).unwrap()[0];
        let h = |j: usize, n: u32| {
            hermite_1d::<Rational>(n).substitute(&[Polynomial::var(2, j)]).unwrap()
        };
        let expected = [
            h(0, 3).scale(&rational(2, 1)),
            (&h(0, 2) * &h(1, 1)).scale(&rational(9, 1)),
            (&h(0, 1) * &h(1, 2)).scale(&rational(15, 1)),
            h(1, 3).scale(&rational(7, 1)),
        ]
        .iter()
        .fold(Polynomial::zero(2), |acc, t| &acc + t)
        .scale(&rational(1, 6));
        assert_eq!(q1, &expected);
    }

    #[test]
    fn one_dimensional_p1_and_q1() {
        let c = cumulants(1, 3, &[(&[2], rational(1, 1)), (&[3], rational(6, 1))]);
        let p1 = &build_p(&c, 1).unwrap()[0];
        assert_eq!(p1, &Polynomial::monomial(MultiIndex::from([3]), rational(1, 1)));

        let lambda = rational(4, 1);
        let c = cumulants(1, 3, &[(&[2], lambda.clone()), (&[3], rational(3, 1))]);
        let q1 = &build_q(&c, 1).unwrap()[0];
        // (μ3/6) λ^{-3/2} H3(x/√λ) = (1/2)(x³/λ³ − 3x/λ²)
        let x = Polynomial::<Rational>::var(1, 0);
        let expected = &(&(&x * &x) * &x).scale(&rational(1, 128)) - &x.scale(&rational(3, 32));
        assert_eq!(q1, &expected);
    }

    #[test]
    fn gaussian_cumulants_give_nothing() {
        let c = cumulants(2, 5, &[(&[2, 0], rational(2, 1)), (&[0, 2], rational(1, 1)), (&[1, 1], rational(1, 2))]);
        for q in build_q(&c.to_f64(), 3).unwrap() {
            assert!(q.is_zero());
        }
        for p in build_p(&c, 3).unwrap() {
            assert!(p.is_zero());
        }
    }

    #[test]
    fn insufficient_order_is_rejected() {
        let c = cumulants(1, 3, &[(&[2], rational(1, 1))]);
        assert_eq!(build_p(&c, 2), Err(Error::InsufficientOrder { needed: 4, have: 3 }));
    }

    #[test]
    fn exact_mode_refuses_rotation() {
        let c = cumulants(2, 3, &[(&[2, 0], rational(2, 1)), (&[0, 2], rational(1, 1)), (&[1, 1], rational(1, 2))]);
        assert_eq!(build_q(&c, 1), Err(Error::ExactNeedsDiagonal));
    }

    #[test]
    fn q_is_orthogonal_and_degree_bounded() {
        let c = cumulants(
            2,
            5,
            &[
                (&[2, 0], rational(2, 1)),
                (&[0, 2], rational(1, 3)),
                (&[3, 0], rational(1, 2)),
                (&[1, 2], rational(-2, 1)),
                (&[2, 2], rational(3, 5)),
                (&[4, 1], rational(1, 7)),
            ],
        );
        let mut g = GaussianMoments::new(c.covariance()).unwrap();
        for (k, q) in build_q(&c, 3).unwrap().iter().enumerate() {
            let k = k as u32 + 1;
            assert_eq!(g.expectation(q), rational(0, 1));
            assert!(q.degree() <= 3 * k);
        }
        for (k, p) in build_p(&c, 3).unwrap().iter().enumerate() {
            let k = k as u32 + 1;
            assert!(p.degree() <= 3 * k);
            assert!(p.min_degree().unwrap() >= k + 2);
        }
    }

    #[test]
    fn density_examples() {
        let c = cumulants(1, 3, &[(&[2], rational(1, 1)), (&[3], rational(1, 1))]);
        let e = EdgeworthExpansion::new(&c, 1).unwrap();
        let phi1 = (-0.5f64).exp() / (2.0 * std::f64::consts::PI).sqrt();
        assert!((e.density(0, 0.1, &[1.0]) - phi1).abs() < 1e-15);
        assert!((e.density(1, 0.1, &[1.0]) - phi1 * (1.0 - 1.0 / 30.0)).abs() < 1e-15);
        // Q1 vanishes at the roots of H3.
        let root = 3f64.sqrt();
        let phi = (-1.5f64).exp() / (2.0 * std::f64::consts::PI).sqrt();
        assert!((e.density(1, 0.3, &[root]) - phi).abs() < 1e-15);
    }
}
