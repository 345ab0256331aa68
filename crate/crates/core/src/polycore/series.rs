//! Truncated power series in ε with polynomial coefficients.

use super::coeff::Coeff;
use super::polynomial::Polynomial;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct EpsSeries<C: Coeff> {
    coeffs: Vec<Polynomial<C>>,
}

impl<C: Coeff> EpsSeries<C> {
    pub fn zero(dim: usize, order: usize) -> Self {
        EpsSeries { coeffs: vec![Polynomial::zero(dim); order + 1] }
    }

    pub fn one(dim: usize, order: usize) -> Self {
        let mut s = Self::zero(dim, order);
        s.coeffs[0] = Polynomial::one(dim);
        s
    }

    /// Series with the given coefficients; truncation order is `coeffs.len() - 1`.
    pub fn from_coeffs(coeffs: Vec<Polynomial<C>>) -> Result<Self> {
        let Some(first) = coeffs.first() else {
            return Err(Error::InvalidParameter("empty series".into()));
        };
        let dim = first.dim();
        if let Some(bad) = coeffs.iter().find(|p| p.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: bad.dim() });
        }
        Ok(EpsSeries { coeffs })
    }

    /// p·ε^k truncated at `order`.
    pub fn term(p: Polynomial<C>, k: usize, order: usize) -> Self {
        let mut s = Self::zero(p.dim(), order);
        if k <= order {
            s.coeffs[k] = p;
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.coeffs[0].dim()
    }

    /// Coefficient of ε^k (zero past the truncation order).
    pub fn coeff(&self, k: usize) -> Polynomial<C> {
        self.coeffs.get(k).cloned().unwrap_or_else(|| Polynomial::zero(self.dim()))
    }

    pub fn coeffs(&self) -> &[Polynomial<C>] {
        &self.coeffs
    }

    pub fn truncated(&self, order: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(order + 1, Polynomial::zero(self.dim()));
        EpsSeries { coeffs }
    }

    pub fn add(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        EpsSeries { coeffs: (0..=order).map(|k| &self.coeffs[k] + &other.coeffs[k]).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        EpsSeries { coeffs: (0..=order).map(|k| &self.coeffs[k] - &other.coeffs[k]).collect() }
    }

    pub fn scale(&self, c: &C) -> Self {
        EpsSeries { coeffs: self.coeffs.iter().map(|p| p.scale(c)).collect() }
    }

    pub fn mul_poly(&self, p: &Polynomial<C>) -> Result<Self> {
        Ok(EpsSeries { coeffs: self.coeffs.iter().map(|c| c.try_mul(p)).collect::<Result<_>>()? })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let order = self.order().min(other.order());
        let dim = self.dim();
        let mut coeffs = vec![Polynomial::zero(dim); order + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(order + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(order + 1 - i) {
                if !b.is_zero() {
                    coeffs[i + j] = &coeffs[i + j] + &a.try_mul(b)?;
                }
            }
        }
        Ok(EpsSeries { coeffs })
    }

    pub fn pow(&self, e: u32) -> Result<Self> {
        let mut acc = Self::one(self.dim(), self.order());
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// exp(s) for s with vanishing ε⁰ coefficient.
    pub fn exp(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::SeriesNotNilpotent);
        }
        let order = self.order();
        let mut acc = Self::one(self.dim(), order);
        let mut power = Self::one(self.dim(), order);
        for n in 1..=order {
            power = power.mul(self)?.scale(&(C::one() / C::from_i64(n as i64)));
            acc = acc.add(&power);
        }
        Ok(acc)
    }

    /// 1/s. The ε⁰ coefficient must be 1 in exact mode and a nonzero
    /// constant in numeric mode.
    pub fn reciprocal(&self) -> Result<Self> {
        let c0 = &self.coeffs[0];
        let lead = c0.constant_term();
        let constant = c0.len() == 1 && !lead.is_zero();
        if !constant || (C::EXACT && !lead.is_one()) {
            return Err(Error::SeriesNotInvertible);
        }
        let inv = C::one() / lead;
        let normalized = self.scale(&inv);
        let mut rest = normalized.clone();
        rest.coeffs[0] = Polynomial::zero(self.dim());
        let neg = rest.scale(&(-C::one()));
        let order = self.order();
        let mut acc = Self::one(self.dim(), order);
        let mut power = Self::one(self.dim(), order);
        for _ in 1..=order {
            power = power.mul(&neg)?;
            acc = acc.add(&power);
        }
        Ok(acc.scale(&inv))
    }

    /// Evaluates the truncated series at ε = eps and point x.
    pub fn eval_f64(&self, eps: f64, x: &[f64]) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, p| acc * eps + p.eval_f64(x))
    }
}

/// Series expansion of S(x + Σ_k ε^k U_k(x)) to the given truncation order.
/// `displacement[k-1]` is the vector field U_k.
pub fn taylor_shift<C: Coeff>(
    s: &Polynomial<C>,
    displacement: &[Vec<Polynomial<C>>],
    order: usize,
) -> Result<EpsSeries<C>> {
    let dim = s.dim();
    for u in displacement {
        if u.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: u.len() });
        }
        if let Some(bad) = u.iter().find(|p| p.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: bad.dim() });
        }
    }
    let shifted: Vec<EpsSeries<C>> = (0..dim)
        .map(|j| {
            let mut coeffs = vec![Polynomial::zero(dim); order + 1];
            coeffs[0] = Polynomial::var(dim, j);
            for (k, u) in displacement.iter().enumerate() {
                if k < order {
                    coeffs[k + 1] = u[j].clone();
                }
            }
            EpsSeries { coeffs }
        })
        .collect();
    let mut powers: Vec<Vec<EpsSeries<C>>> = vec![vec![EpsSeries::one(dim, order)]; dim];
    let mut out = EpsSeries::zero(dim, order);
    for (alpha, c) in s.terms() {
        let mut m = EpsSeries::term(Polynomial::constant(dim, c.clone()), 0, order);
        for (j, &e) in alpha.exponents().iter().enumerate() {
            while powers[j].len() <= e as usize {
                let next = powers[j].last().unwrap().mul(&shifted[j])?;
                powers[j].push(next);
            }
            m = m.mul(&powers[j][e as usize])?;
        }
        out = out.add(&m);
    }
    Ok(out)
}
