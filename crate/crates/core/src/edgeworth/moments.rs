//! Moment and cumulant sets, conversions between them, and the cumulant text format.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::polycore::{parse_rational, sym_eigen, Coeff, GaussianMoments, Matrix, MultiIndex, Polynomial, Rational};

fn factorial<C: Coeff>(alpha: &MultiIndex) -> C {
    alpha
        .exponents()
        .iter()
        .flat_map(|&a| 1..=a as i64)
        .fold(C::one(), |acc, k| acc * C::from_i64(k))
}

/// Raw moments E[X^α] of a mean-zero law for 1 ≤ |α| ≤ order.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentSet<C: Coeff> {
    dim: usize,
    order: u32,
    values: BTreeMap<MultiIndex, C>,
}

impl<C: Coeff> MomentSet<C> {
    pub fn new(dim: usize, order: u32, values: BTreeMap<MultiIndex, C>) -> Result<Self> {
        if order < 2 {
            return Err(Error::InsufficientOrder { needed: 2, have: order as usize });
        }
        for a in values.keys() {
            if a.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: a.dim() });
            }
        }
        for a in MultiIndex::up_to(dim, 1, order) {
            let Some(v) = values.get(&a) else {
                return Err(Error::MissingMoment(a.to_string()));
            };
            if a.order() == 1 && !v.is_zero() {
                return Err(Error::NonZeroMean);
            }
        }
        let values = values.into_iter().filter(|(a, _)| (1..=order).contains(&a.order())).collect();
        let m = MomentSet { dim, order, values };
        if !m.covariance().is_positive_definite() {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(m)
    }

    /// Moments of N(0, Σ) up to `order`.
    pub fn gaussian(sigma: &Matrix<C>, order: u32) -> Result<Self> {
        let mut g = GaussianMoments::new(sigma)?;
        let values = MultiIndex::up_to(sigma.rows(), 1, order)
            .into_iter()
            .map(|a| {
                let v = g.moment(&a);
                (a, v)
            })
            .collect();
        Self::new(sigma.rows(), order, values)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn get(&self, alpha: &MultiIndex) -> C {
        if alpha.order() == 0 {
            return C::one();
        }
        self.values.get(alpha).cloned().unwrap_or_else(C::zero)
    }

    pub fn values(&self) -> &BTreeMap<MultiIndex, C> {
        &self.values
    }

    pub fn covariance(&self) -> Matrix<C> {
        covariance_from(self.dim, |a| self.get(a))
    }

    /// E|X|^M for even M ≤ order, by expanding (Σ x_j²)^{M/2}.
    pub fn abs_moment_even(&self, m: u32) -> Option<C> {
        if m % 2 == 1 || m > self.order {
            return None;
        }
        let sq = (0..self.dim).fold(Polynomial::zero(self.dim), |acc, j| {
            let x = Polynomial::<C>::var(self.dim, j);
            &acc + &(&x * &x)
        });
        let p = sq.pow(m / 2).ok()?;
        Some(p.terms().fold(C::zero(), |acc, (a, c)| acc + c.clone() * self.get(a)))
    }
}

fn covariance_from<C: Coeff>(dim: usize, get: impl Fn(&MultiIndex) -> C) -> Matrix<C> {
    let mut s = Matrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            let mut idx = vec![0; dim];
            idx[i] += 1;
            idx[j] += 1;
            s.set(i, j, get(&MultiIndex::new(idx)));
        }
    }
    s
}

/// Cumulants μ_α for 2 ≤ |α| ≤ order; absent entries are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct CumulantSet<C: Coeff> {
    dim: usize,
    order: u32,
    mu: BTreeMap<MultiIndex, C>,
    sigma: Matrix<C>,
    eigenvalues: Vec<f64>,
}

impl<C: Coeff> CumulantSet<C> {
    pub fn new(dim: usize, order: u32, mu: BTreeMap<MultiIndex, C>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        for a in mu.keys() {
            if a.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: a.dim() });
            }
            if a.order() < 2 || a.order() > order {
                return Err(Error::InvalidParameter(format!("cumulant index {a} outside orders 2..={order}")));
            }
        }
        let mu: BTreeMap<_, _> = mu.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        let sigma = covariance_from(dim, |a| mu.get(a).cloned().unwrap_or_else(C::zero));
        let eigenvalues = sym_eigen(&sigma)?.values;
        Ok(CumulantSet { dim, order, mu, sigma, eigenvalues })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn get(&self, alpha: &MultiIndex) -> C {
        self.mu.get(alpha).cloned().unwrap_or_else(C::zero)
    }

    /// Nonzero entries.
    pub fn entries(&self) -> &BTreeMap<MultiIndex, C> {
        &self.mu
    }

    pub fn covariance(&self) -> &Matrix<C> {
        &self.sigma
    }

    /// Ascending eigenvalues of Σ.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn require_nonsingular(&self) -> Result<()> {
        let min = self.eigenvalues[0];
        let max = *self.eigenvalues.last().unwrap();
        if !(min > 0.0) || min < 1e-10 * max || !self.sigma.is_symmetric() {
            return Err(Error::Singular { min, max });
        }
        Ok(())
    }

    /// Cumulants of the normalized sum m^{-1/2}(X_1+…+X_m) with ε = m^{-1/2}:
    /// μ_α ε^{|α|-2}.
    pub fn rescaled(&self, eps: &C) -> Self {
        let mu = self
            .mu
            .iter()
            .map(|(a, v)| (a.clone(), v.clone() * eps.powi(a.order() - 2)))
            .collect();
        Self::new(self.dim, self.order, mu).expect("rescaling preserves validity")
    }

    pub fn to_f64(&self) -> CumulantSet<f64> {
        CumulantSet {
            dim: self.dim,
            order: self.order,
            mu: self.mu.iter().map(|(a, v)| (a.clone(), v.to_f64())).collect(),
            sigma: self.sigma.to_f64(),
            eigenvalues: self.eigenvalues.clone(),
        }
    }

    /// One line per nonzero entry: exponents then value.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (a, v) in &self.mu {
            let idx: Vec<String> = a.exponents().iter().map(|e| e.to_string()).collect();
            let _ = writeln!(out, "{} {}", idx.join(" "), v.render());
        }
        out
    }
}

impl CumulantSet<Rational> {
    /// Parses lines `a_1 … a_q value`; `#` starts a comment. The order is the
    /// largest |α| present unless an `# order N` directive raises it.
    pub fn parse(text: &str) -> Result<Self> {
        let mut dim = None;
        let mut order = 2;
        let mut mu = BTreeMap::new();
        for (ln, raw) in text.lines().enumerate() {
            let line_no = ln + 1;
            let trimmed = raw.trim();
            if let Some(directive) = trimmed.strip_prefix('#') {
                let mut words = directive.split_whitespace();
                if words.next() == Some("order") {
                    let n = words.next().and_then(|w| w.parse::<u32>().ok()).ok_or(Error::Parse {
                        line: line_no,
                        msg: "bad order directive".into(),
                    })?;
                    order = order.max(n);
                }
                continue;
            }
            let line = trimmed.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() < 2 {
                return Err(Error::Parse { line: line_no, msg: "expected exponents and a value".into() });
            }
            let q = fields.len() - 1;
            if *dim.get_or_insert(q) != q {
                return Err(Error::Parse { line: line_no, msg: "inconsistent number of exponents".into() });
            }
            let exps = fields[..q]
                .iter()
                .map(|f| f.parse::<u32>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Parse { line: line_no, msg: e.to_string() })?;
            let value = parse_rational(fields[q])
                .ok_or_else(|| Error::Parse { line: line_no, msg: format!("bad rational '{}'", fields[q]) })?;
            let alpha = MultiIndex::new(exps);
            if alpha.order() < 2 {
                return Err(Error::Parse { line: line_no, msg: "cumulant orders start at 2".into() });
            }
            order = order.max(alpha.order());
            if mu.insert(alpha, value).is_some() {
                return Err(Error::Parse { line: line_no, msg: "duplicate multi-index".into() });
            }
        }
        let dim = dim.ok_or(Error::Parse { line: 0, msg: "no cumulant entries".into() })?;
        Self::new(dim, order, mu)
    }
}

/// Moment generating polynomial Σ m_α t^α/α! (without the constant 1).
fn generating_tail<C: Coeff>(dim: usize, order: u32, get: impl Fn(&MultiIndex) -> C) -> Polynomial<C> {
    let terms = MultiIndex::up_to(dim, 1, order).into_iter().map(|a| {
        let v = get(&a) / factorial::<C>(&a);
        (a, v)
    });
    Polynomial::from_terms(dim, terms).expect("indices share the dimension")
}

pub fn moments_to_cumulants<C: Coeff>(m: &MomentSet<C>) -> Result<CumulantSet<C>> {
    let n = m.order();
    let tail = generating_tail(m.dim(), n, |a| m.get(a));
    // log(1 + L) = Σ (-1)^{l+1} L^l / l, truncated at total degree n.
    let mut log = Polynomial::zero(m.dim());
    let mut power = Polynomial::one(m.dim());
    for l in 1..=n {
        power = power.try_mul(&tail)?.truncate(n);
        if power.is_zero() {
            break;
        }
        let sign = if l % 2 == 1 { C::one() } else { -C::one() };
        log = &log + &power.scale(&(sign / C::from_i64(l as i64)));
    }
    let mu = log
        .terms()
        .filter(|(a, _)| a.order() >= 2)
        .map(|(a, c)| (a.clone(), c.clone() * factorial::<C>(a)))
        .collect();
    CumulantSet::new(m.dim(), n, mu)
}

pub fn cumulants_to_moments<C: Coeff>(c: &CumulantSet<C>) -> Result<MomentSet<C>> {
    let n = c.order();
    let k = generating_tail(c.dim(), n, |a| c.get(a));
    let mut exp = Polynomial::one(c.dim());
    let mut power = Polynomial::one(c.dim());
    for l in 1..=n {
        power = power.try_mul(&k)?.truncate(n).scale(&(C::one() / C::from_i64(l as i64)));
        if power.is_zero() {
            break;
        }
        exp = &exp + &power;
    }
    let values = MultiIndex::up_to(c.dim(), 1, n)
        .into_iter()
        .map(|a| {
            let v = exp.coeff(&a) * factorial::<C>(&a);
            (a, v)
        })
        .collect();
    MomentSet::new(c.dim(), n, values)
}
