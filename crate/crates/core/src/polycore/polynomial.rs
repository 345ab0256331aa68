use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::coeff::Coeff;
use super::matrix::Matrix;
use super::multi_index::MultiIndex;
use crate::error::{Error, Result};

pub const DEGREE_CAP: u32 = 64;

/// Sparse multivariate polynomial in canonical form (no stored zeros).
#[derive(Clone, PartialEq)]
pub struct Polynomial<C: Coeff> {
    dim: usize,
    terms: BTreeMap<MultiIndex, C>,
}

impl<C: Coeff> Polynomial<C> {
    pub fn zero(dim: usize) -> Self {
        Polynomial { dim, terms: BTreeMap::new() }
    }

    pub fn constant(dim: usize, c: C) -> Self {
        Self::monomial(MultiIndex::zero(dim), c)
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, C::one())
    }

    /// The coordinate function x_j (0-based).
    pub fn var(dim: usize, j: usize) -> Self {
        Self::monomial(MultiIndex::unit(dim, j), C::one())
    }

    pub fn monomial(alpha: MultiIndex, c: C) -> Self {
        let dim = alpha.dim();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(alpha, c);
        }
        Polynomial { dim, terms }
    }

    pub fn from_terms<I>(dim: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, C)>,
    {
        let mut p = Self::zero(dim);
        for (alpha, c) in terms {
            if alpha.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: alpha.dim() });
            }
            if alpha.order() > DEGREE_CAP {
                return Err(Error::DegreeCap(alpha.order()));
            }
            p.add_term(alpha, c);
        }
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&MultiIndex, &C)> {
        self.terms.iter()
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> C {
        self.terms.get(alpha).cloned().unwrap_or_else(C::zero)
    }

    pub fn constant_term(&self) -> C {
        self.coeff(&MultiIndex::zero(self.dim))
    }

    /// Total degree; 0 for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().next_back().map_or(0, |a| a.order())
    }

    /// Smallest total degree among stored terms.
    pub fn min_degree(&self) -> Option<u32> {
        self.terms.keys().next().map(|a| a.order())
    }

    fn add_term(&mut self, alpha: MultiIndex, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&alpha) {
            Some(v) => {
                let sum = v.clone() + c;
                if sum.is_zero() {
                    self.terms.remove(&alpha);
                } else {
                    *v = sum;
                }
            }
            None => {
                self.terms.insert(alpha, c);
            }
        }
    }

    fn check_dim(&self, other: &Self) {
        assert_eq!(self.dim, other.dim, "polynomial dimension mismatch");
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero(self.dim);
        }
        let mut out = Self::zero(self.dim);
        for (a, v) in &self.terms {
            out.add_term(a.clone(), v.clone() * c.clone());
        }
        out
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other);
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.dim));
        }
        let deg = self.degree() + other.degree();
        if deg > DEGREE_CAP {
            return Err(Error::DegreeCap(deg));
        }
        let mut out = Self::zero(self.dim);
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                out.add_term(a.add(b), x.clone() * y.clone());
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> Result<Self> {
        let mut acc = Self::one(self.dim);
        for _ in 0..e {
            acc = acc.try_mul(self)?;
        }
        Ok(acc)
    }

    /// ∂/∂x_j.
    pub fn partial(&self, j: usize) -> Self {
        let mut out = Self::zero(self.dim);
        for (a, c) in &self.terms {
            let e = a.get(j);
            if let Some(lower) = a.lowered(j) {
                out.add_term(lower, c.clone() * C::from_i64(e as i64));
            }
        }
        out
    }

    pub fn gradient(&self) -> Vec<Self> {
        (0..self.dim).map(|j| self.partial(j)).collect()
    }

    pub fn laplacian(&self) -> Self {
        let mut out = Self::zero(self.dim);
        for j in 0..self.dim {
            out = &out + &self.partial(j).partial(j);
        }
        out
    }

    pub fn hessian(&self) -> Vec<Vec<Self>> {
        let g = self.gradient();
        g.iter().map(|gi| (0..self.dim).map(|j| gi.partial(j)).collect()).collect()
    }

    pub fn eval(&self, x: &[C]) -> C {
        assert_eq!(x.len(), self.dim);
        let mut acc = C::zero();
        for (a, c) in &self.terms {
            let mut m = c.clone();
            for (xj, &e) in x.iter().zip(a.exponents()) {
                m = m * xj.powi(e);
            }
            acc = acc + m;
        }
        acc
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dim);
        self.terms
            .iter()
            .map(|(a, c)| {
                a.exponents()
                    .iter()
                    .zip(x)
                    .fold(c.to_f64(), |m, (&e, xj)| m * f64::powi(*xj, e as i32))
            })
            .sum()
    }

    /// Substitutes x_j ↦ images[j]; the images may live in another dimension.
    pub fn substitute(&self, images: &[Polynomial<C>]) -> Result<Self> {
        if images.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: images.len() });
        }
        let out_dim = images.first().map_or(0, |p| p.dim);
        if images.iter().any(|p| p.dim != out_dim) {
            return Err(Error::DimensionMismatch { expected: out_dim, found: 0 });
        }
        let mut powers: Vec<Vec<Polynomial<C>>> = images.iter().map(|p| vec![Self::one(p.dim)]).collect();
        let mut out = Self::zero(out_dim);
        for (a, c) in &self.terms {
            let mut m = Self::constant(out_dim, c.clone());
            for (j, &e) in a.exponents().iter().enumerate() {
                while powers[j].len() <= e as usize {
                    let next = powers[j].last().unwrap().try_mul(&images[j])?;
                    powers[j].push(next);
                }
                m = m.try_mul(&powers[j][e as usize])?;
            }
            out = &out + &m;
        }
        Ok(out)
    }

    /// p(Ax) for a square matrix A.
    pub fn compose_linear(&self, a: &Matrix<C>) -> Result<Self> {
        if a.rows() != self.dim || a.cols() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: a.rows() });
        }
        let images: Vec<Self> = (0..self.dim)
            .map(|i| {
                let terms = (0..self.dim).map(|j| (MultiIndex::unit(self.dim, j), a.get(i, j).clone()));
                Self::from_terms(self.dim, terms).expect("unit indices")
            })
            .collect();
        self.substitute(&images)
    }

    /// Drops all terms of total degree above `max_degree`.
    pub fn truncate(&self, max_degree: u32) -> Self {
        Polynomial {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|(a, _)| a.order() <= max_degree)
                .map(|(a, c)| (a.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn homogeneous_part(&self, degree: u32) -> Self {
        Polynomial {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|(a, _)| a.order() == degree)
                .map(|(a, c)| (a.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Polynomial<D> {
        let mut out = Polynomial::<D>::zero(self.dim);
        for (a, c) in &self.terms {
            out.add_term(a.clone(), f(c));
        }
        out
    }

    pub fn to_f64(&self) -> Polynomial<f64> {
        self.map_coeffs(|c| c.to_f64())
    }

    /// Largest absolute coefficient, as a double.
    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.to_f64().abs()).fold(0.0, f64::max)
    }

    /// Zero test: exact in rational mode, relative tolerance in numeric mode.
    pub fn is_negligible(&self, scale: f64) -> bool {
        self.terms.values().all(|c| c.is_negligible(scale))
    }

    /// Text form, leading term first.
    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (a, c)) in self.terms.iter().rev().enumerate() {
            let neg = *c < C::zero();
            let mag = c.abs_val();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono = render_monomial(a);
            if mono.is_empty() {
                out.push_str(&mag.render());
            } else if mag.is_one() {
                out.push_str(&mono);
            } else {
                out.push_str(&mag.render());
                out.push('*');
                out.push_str(&mono);
            }
        }
        out
    }
}

fn render_monomial(a: &MultiIndex) -> String {
    let parts: Vec<String> = a
        .exponents()
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(j, &e)| if e == 1 { format!("x{}", j + 1) } else { format!("x{}^{}", j + 1, e) })
        .collect();
    parts.join("*")
}

impl<C: Coeff> fmt::Display for Polynomial<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl<C: Coeff> fmt::Debug for Polynomial<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial[{}]({})", self.dim, self.render())
    }
}

impl<C: Coeff> Add for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn add(self, rhs: &Polynomial<C>) -> Polynomial<C> {
        self.check_dim(rhs);
        let mut out = self.clone();
        for (a, c) in &rhs.terms {
            out.add_term(a.clone(), c.clone());
        }
        out
    }
}

impl<C: Coeff> Sub for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn sub(self, rhs: &Polynomial<C>) -> Polynomial<C> {
        self.check_dim(rhs);
        let mut out = self.clone();
        for (a, c) in &rhs.terms {
            out.add_term(a.clone(), -c.clone());
        }
        out
    }
}

impl<C: Coeff> Neg for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn neg(self) -> Polynomial<C> {
        self.scale(&(-C::one()))
    }
}

/// Panics past the degree cap; use [`Polynomial::try_mul`] on untrusted input.
impl<C: Coeff> Mul for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn mul(self, rhs: &Polynomial<C>) -> Polynomial<C> {
        self.try_mul(rhs).expect("polynomial degree cap exceeded")
    }
}

/// Divergence of a polynomial vector field.
pub fn divergence<C: Coeff>(field: &[Polynomial<C>]) -> Polynomial<C> {
    let dim = field.first().map_or(0, |p| p.dim());
    let mut out = Polynomial::zero(dim);
    for (j, fj) in field.iter().enumerate() {
        out = &out + &fj.partial(j);
    }
    out
}

/// Σ_j a_j b_j for polynomial vectors.
pub fn dot<C: Coeff>(a: &[Polynomial<C>], b: &[Polynomial<C>]) -> Polynomial<C> {
    let dim = a.first().map_or(0, |p| p.dim());
    let mut out = Polynomial::zero(dim);
    for (x, y) in a.iter().zip(b) {
        out = &out + &(x * y);
    }
    out
}

/// M·v for a constant matrix and polynomial vector.
pub fn mat_vec<C: Coeff>(m: &Matrix<C>, v: &[Polynomial<C>]) -> Vec<Polynomial<C>> {
    let dim = v.first().map_or(0, |p| p.dim());
    (0..m.rows())
        .map(|i| {
            let mut acc = Polynomial::zero(dim);
            for (j, vj) in v.iter().enumerate() {
                let c = m.get(i, j);
                if !c.is_zero() {
                    acc = &acc + &vj.scale(c);
                }
            }
            acc
        })
        .collect()
}

/// The vector (x_1, …, x_q).
pub fn coordinates<C: Coeff>(dim: usize) -> Vec<Polynomial<C>> {
    (0..dim).map(|j| Polynomial::var(dim, j)).collect()
}
