//! Probabilists' Hermite polynomials and their tensor products.

use super::coeff::Coeff;
use super::multi_index::MultiIndex;
use super::polynomial::Polynomial;
use crate::error::{Error, Result};

/// Scaling of ∏_j H_{α_j}(x_j/√λ_j).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HermiteConvention {
    /// (α!)^{-1/2} ∏ H_{α_j}(x_j/√λ_j): orthonormal under N(0, diag λ).
    Normalized,
    /// ∏ λ_j^{-α_j/2} H_{α_j}(x_j/√λ_j): the form multiplying the Gaussian
    /// density in the Edgeworth polynomials. Rational in λ.
    Edgeworth,
    /// ∏ λ_j^{α_j/2} H_{α_j}(x_j/√λ_j): leading coefficient 1. Rational in λ.
    Monic,
}

/// Coefficients of H_j in descending powers: H_j = Σ_k c_k x^{j-2k}.
fn hermite_descending<C: Coeff>(j: u32) -> Vec<C> {
    let mut prev: Vec<C> = vec![];
    let mut cur: Vec<C> = vec![C::one()];
    for n in 0..j {
        // H_{n+1} = x H_n - n H_{n-1}; in descending-power storage the x-shift is free.
        let len = (n as usize).div_ceil(2) + 1;
        let mut next = vec![C::zero(); len];
        for (k, c) in cur.iter().enumerate() {
            next[k] = next[k].clone() + c.clone();
        }
        for (k, c) in prev.iter().enumerate() {
            next[k + 1] = next[k + 1].clone() - C::from_i64(n as i64) * c.clone();
        }
        prev = cur;
        cur = next;
    }
    cur
}

pub fn hermite_1d<C: Coeff>(j: u32) -> Polynomial<C> {
    let terms = hermite_descending::<C>(j)
        .into_iter()
        .enumerate()
        .map(|(k, c)| (MultiIndex::new(vec![j - 2 * k as u32]), c));
    Polynomial::from_terms(1, terms).expect("one-dimensional indices")
}

/// λ^{j/2} H_j(x/√λ) as (power, coefficient) pairs.
fn monic_scaled<C: Coeff>(j: u32, lambda: &C) -> Vec<(u32, C)> {
    hermite_descending::<C>(j)
        .into_iter()
        .enumerate()
        .map(|(k, c)| (j - 2 * k as u32, c * lambda.powi(k as u32)))
        .collect()
}

pub fn hermite_tensor<C: Coeff>(
    alpha: &MultiIndex,
    lambdas: &[C],
    convention: HermiteConvention,
) -> Result<Polynomial<C>> {
    let dim = alpha.dim();
    if lambdas.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: lambdas.len() });
    }
    if lambdas.iter().any(|l| *l <= C::zero()) {
        return Err(Error::NonPositiveScale);
    }
    let mut out = Polynomial::one(dim);
    for (j, lambda) in lambdas.iter().enumerate() {
        let n = alpha.get(j);
        if n == 0 {
            continue;
        }
        let factor = Polynomial::from_terms(
            dim,
            monic_scaled(n, lambda).into_iter().map(|(e, c)| {
                let mut idx = vec![0; dim];
                idx[j] = e;
                (MultiIndex::new(idx), c)
            }),
        )?;
        out = out.try_mul(&factor)?;
    }
    let lambda_pow = lambdas
        .iter()
        .zip(alpha.exponents())
        .fold(C::one(), |acc, (l, &a)| acc * l.powi(a));
    let scale = match convention {
        HermiteConvention::Monic => C::one(),
        HermiteConvention::Edgeworth => C::one() / lambda_pow,
        HermiteConvention::Normalized => {
            let fact = (0..dim)
                .flat_map(|j| 1..=alpha.get(j))
                .fold(C::one(), |acc, k| acc * C::from_i64(k as i64));
            let norm = (fact * lambda_pow)
                .sqrt_exact()
                .ok_or(Error::Irrational("normalized Hermite scale"))?;
            C::one() / norm
        }
    };
    Ok(out.scale(&scale))
}
