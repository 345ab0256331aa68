//! Gaussian and perturbed-normal vectors.

use super::RngStream;
use crate::perturbation::GradientPolyMap;
use crate::polycore::{sym_sqrt, Coeff, Matrix, Polynomial};
use crate::{Error, Result};

/// `N(0, Σ)` as `Σ^{1/2} ξ` with the symmetric eigen square root.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianSampler {
    root: Matrix<f64>,
}

impl GaussianSampler {
    pub fn new<C: Coeff>(sigma: &Matrix<C>) -> Result<Self> {
        Ok(GaussianSampler { root: sym_sqrt(sigma)? })
    }

    pub fn dim(&self) -> usize {
        self.root.rows()
    }

    pub fn root(&self) -> &Matrix<f64> {
        &self.root
    }

    pub fn sample(&self, rng: &mut RngStream) -> Vec<f64> {
        let mut z = vec![0.0; self.dim()];
        rng.fill_normal(&mut z);
        self.root.mul_vec(&z)
    }
}

pub fn sample_gaussian<C: Coeff>(sigma: &Matrix<C>, rng: &mut RngStream) -> Result<Vec<f64>> {
    Ok(GaussianSampler::new(sigma)?.sample(rng))
}

/// Polynomial flattened to `(exponents, coefficient)` rows for fast f64
/// evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct CompiledPoly {
    terms: Vec<(Vec<u32>, f64)>,
    max_exp: u32,
}

impl CompiledPoly {
    pub fn new<C: Coeff>(p: &Polynomial<C>) -> Self {
        let terms: Vec<(Vec<u32>, f64)> =
            p.terms().map(|(a, c)| (a.exponents().to_vec(), c.to_f64())).collect();
        let max_exp = terms.iter().flat_map(|(a, _)| a.iter().copied()).max().unwrap_or(0);
        CompiledPoly { terms, max_exp }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `powers[j][e] = x_j^e` must cover every exponent in the polynomial.
    fn eval_with(&self, powers: &[Vec<f64>]) -> f64 {
        self.terms
            .iter()
            .map(|(a, c)| a.iter().enumerate().fold(*c, |acc, (j, &e)| acc * powers[j][e as usize]))
            .sum()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.eval_with(&power_table(x, self.max_exp))
    }
}

fn power_table(x: &[f64], max_exp: u32) -> Vec<Vec<f64>> {
    x.iter()
        .map(|&xj| {
            let mut row = Vec::with_capacity(max_exp as usize + 1);
            let mut v = 1.0;
            for _ in 0..=max_exp {
                row.push(v);
                v *= xj;
            }
            row
        })
        .collect()
}

/// Draws `ξ + Σ_{k<=r} ε^k p_k(ξ)` with `ξ ~ N(0, Σ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PerturbedNormalSampler {
    gaussian: GaussianSampler,
    fields: Vec<Vec<CompiledPoly>>,
    max_exp: u32,
}

impl PerturbedNormalSampler {
    pub fn new<C: Coeff>(map: &GradientPolyMap<C>, r: usize) -> Result<Self> {
        if r > map.order() {
            return Err(Error::InsufficientOrder { needed: r, have: map.order() });
        }
        let fields: Vec<Vec<CompiledPoly>> = map.gradients()[..r]
            .iter()
            .map(|field| field.iter().map(CompiledPoly::new).collect())
            .collect();
        let max_exp = fields.iter().flatten().map(|p| p.max_exp).max().unwrap_or(0);
        Ok(PerturbedNormalSampler { gaussian: GaussianSampler::new(map.covariance())?, fields, max_exp })
    }

    pub fn dim(&self) -> usize {
        self.gaussian.dim()
    }

    /// The polynomial map applied to a given Gaussian point.
    pub fn transform(&self, eps: f64, xi: &[f64]) -> Vec<f64> {
        let mut out = xi.to_vec();
        let powers = power_table(xi, self.max_exp);
        let mut weight = 1.0;
        for field in &self.fields {
            weight *= eps;
            for (o, p) in out.iter_mut().zip(field) {
                if !p.is_zero() {
                    *o += weight * p.eval_with(&powers);
                }
            }
        }
        out
    }

    pub fn sample(&self, eps: f64, rng: &mut RngStream) -> Vec<f64> {
        let xi = self.gaussian.sample(rng);
        self.transform(eps, &xi)
    }
}

pub fn sample_perturbed_normal<C: Coeff>(
    map: &GradientPolyMap<C>,
    eps: f64,
    r: usize,
    rng: &mut RngStream,
) -> Result<Vec<f64>> {
    Ok(PerturbedNormalSampler::new(map, r)?.sample(eps, rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::edgeworth::CumulantSet;
    use crate::perturbation::perturbation_from_cumulants;
    use crate::polycore::MultiIndex;
    use std::collections::BTreeMap;

    #[test]
    fn zero_covariance_gives_origin() {
        let mut rng = RngStream::new(1, 1);
        let s = GaussianSampler::new(&Matrix::<f64>::zeros(3, 3)).unwrap();
        for _ in 0..10 {
            assert_eq!(s.sample(&mut rng), vec![0.0; 3]);
        }
    }

    #[test]
    fn standard_normal_mean() {
        let mut rng = RngStream::new(2, 9);
        let s = GaussianSampler::new(&Matrix::<f64>::identity(2)).unwrap();
        let n = 1_000_000;
        let mut m = [0.0; 2];
        for _ in 0..n {
            let x = s.sample(&mut rng);
            m[0] += x[0];
            m[1] += x[1];
        }
        for v in m {
            assert!((v / n as f64).abs() < 4.0 / (n as f64).sqrt());
        }
    }

    #[test]
    fn diagonal_covariance_recovered() {
        let mut rng = RngStream::new(3, 0);
        let s = GaussianSampler::new(&Matrix::diag(&[1.0, 4.0])).unwrap();
        let n = 100_000;
        let mut c = [0.0; 3];
        for _ in 0..n {
            let x = s.sample(&mut rng);
            c[0] += x[0] * x[0];
            c[1] += x[1] * x[1];
            c[2] += x[0] * x[1];
        }
        let nf = n as f64;
        assert!((c[0] / nf - 1.0).abs() < 0.05);
        assert!((c[1] / nf - 4.0).abs() < 0.2);
        assert!((c[2] / nf).abs() < 0.05);
    }

    #[test]
    fn non_psd_rejected() {
        let m = Matrix::from_rows(vec![vec![1.0, 2.0], vec![2.0, 1.0]]);
        assert!(GaussianSampler::new(&m).is_err());
    }

    #[test]
    fn identity_map_is_bit_identical_to_gaussian() {
        let sigma = Matrix::from_rows(vec![vec![2.0, 0.5], vec![0.5, 1.0]]);
        let map = GradientPolyMap::identity(&sigma, 2);
        let mut a = RngStream::new(5, 5);
        let mut b = RngStream::new(5, 5);
        let p = PerturbedNormalSampler::new(&map, 2).unwrap();
        let g = GaussianSampler::new(&sigma).unwrap();
        for _ in 0..100 {
            assert_eq!(p.sample(0.3, &mut a), g.sample(&mut b));
        }
        let p0 = PerturbedNormalSampler::new(&map, 0).unwrap();
        assert_eq!(p0.sample(0.3, &mut a), g.sample(&mut b));
    }

    #[test]
    fn third_moment_matches_edgeworth() {
        let mut mu = BTreeMap::new();
        mu.insert(MultiIndex::new(vec![2]), 1.0);
        mu.insert(MultiIndex::new(vec![3]), 1.0);
        let c = CumulantSet::new(1, 3, mu).unwrap();
        let map = perturbation_from_cumulants(&c, 1).unwrap();
        let s = PerturbedNormalSampler::new(&map, 1).unwrap();
        let mut rng = RngStream::new(8, 3);
        let eps = 0.05;
        let n = 1_000_000;
        let (mut m3, mut m6) = (0.0, 0.0);
        for _ in 0..n {
            let x = s.sample(eps, &mut rng)[0];
            m3 += x.powi(3);
            m6 += x.powi(6);
        }
        let nf = n as f64;
        let mean3 = m3 / nf;
        let se = ((m6 / nf - mean3 * mean3) / nf).sqrt();
        assert!((mean3 - eps).abs() < 3.0 * se, "{mean3} vs {eps} (se {se})");
    }

    #[test]
    fn compiled_matches_polynomial() {
        let p = Polynomial::<f64>::from_terms(
            2,
            vec![(MultiIndex::new(vec![2, 1]), 1.5), (MultiIndex::new(vec![0, 3]), -2.0), (MultiIndex::zero(2), 0.25)],
        )
        .unwrap();
        let x = [0.7, -1.3];
        assert!((CompiledPoly::new(&p).eval(&x) - p.eval_f64(&x)).abs() < 1e-14);
    }
}
