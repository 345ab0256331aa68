//! The inverse map from Edgeworth polynomials to perturbing gradient fields.

use super::formal::compute_s_tilde;
use super::operator::{apply_l, solve_hermite_pde};
use crate::edgeworth::{build_q, CumulantSet};
use crate::error::{Error, Result};
use crate::polycore::{sym_eigen, Coeff, GaussianMoments, Matrix, Polynomial};

/// Potentials u_1..u_r, their gradients p_k = ∇u_k, and the density
/// corrections S̃_k met along the recursion.
#[derive(Clone, Debug, PartialEq)]
pub struct GradientPolyMap<C: Coeff> {
    sigma: Matrix<C>,
    targets: Vec<Polynomial<C>>,
    potentials: Vec<Polynomial<C>>,
    gradients: Vec<Vec<Polynomial<C>>>,
    s_tilde: Vec<Polynomial<C>>,
}

impl<C: Coeff> GradientPolyMap<C> {
    pub fn dim(&self) -> usize {
        self.sigma.rows()
    }

    pub fn order(&self) -> usize {
        self.potentials.len()
    }

    pub fn covariance(&self) -> &Matrix<C> {
        &self.sigma
    }

    pub fn targets(&self) -> &[Polynomial<C>] {
        &self.targets
    }

    pub fn potentials(&self) -> &[Polynomial<C>] {
        &self.potentials
    }

    /// p_k as vectors of polynomials, k = 1..r.
    pub fn gradients(&self) -> &[Vec<Polynomial<C>>] {
        &self.gradients
    }

    /// S̃_1..S̃_r (S̃_1 = 0).
    pub fn s_tilde(&self) -> &[Polynomial<C>] {
        &self.s_tilde
    }

    /// The next correction S̃_{r+1}: the leading density error of the map.
    pub fn next_correction(&self) -> Result<Polynomial<C>> {
        compute_s_tilde(&self.potentials, &self.targets, &self.sigma)
    }

    /// −Δu_k + x·Σ⁻¹∇u_k − (Q_k − S̃_k) for every level.
    pub fn pde_residuals(&self) -> Result<Vec<Polynomial<C>>> {
        self.potentials
            .iter()
            .zip(self.targets.iter().zip(&self.s_tilde))
            .map(|(u, (q, s))| {
                let lhs = -&apply_l(u, &self.sigma)?;
                Ok(&(&lhs - q) + s)
            })
            .collect()
    }

    /// ∂_i (p_k)_j = ∂_j (p_k)_i for all k, i, j.
    pub fn is_curl_free(&self) -> bool {
        self.gradients.iter().all(|g| {
            (0..g.len()).all(|i| (0..i).all(|j| (&g[i].partial(j) - &g[j].partial(i)).is_negligible(1.0)))
        })
    }

    pub fn to_f64(&self) -> GradientPolyMap<f64> {
        GradientPolyMap {
            sigma: self.sigma.to_f64(),
            targets: self.targets.iter().map(|p| p.to_f64()).collect(),
            potentials: self.potentials.iter().map(|p| p.to_f64()).collect(),
            gradients: self.gradients.iter().map(|g| g.iter().map(|p| p.to_f64()).collect()).collect(),
            s_tilde: self.s_tilde.iter().map(|p| p.to_f64()).collect(),
        }
    }

    /// The identity map of order r in dimension of Σ.
    pub fn identity(sigma: &Matrix<C>, r: usize) -> Self {
        let dim = sigma.rows();
        let zero = Polynomial::zero(dim);
        GradientPolyMap {
            sigma: sigma.clone(),
            targets: vec![zero.clone(); r],
            potentials: vec![zero.clone(); r],
            gradients: vec![vec![zero.clone(); dim]; r],
            s_tilde: vec![zero; r],
        }
    }
}

fn invert_diagonal<C: Coeff>(q: &[Polynomial<C>], sigma: &Matrix<C>) -> Result<GradientPolyMap<C>> {
    let lambdas = sigma.diagonal();
    let dim = sigma.rows();
    let mut potentials = Vec::with_capacity(q.len());
    let mut s_tilde = vec![Polynomial::zero(dim)];
    for k in 0..q.len() {
        let rhs = &q[k] - &s_tilde[k];
        potentials.push(solve_hermite_pde(&rhs, &lambdas)?);
        if k + 1 < q.len() {
            s_tilde.push(compute_s_tilde(&potentials, &q[..=k], sigma)?);
        }
    }
    s_tilde.truncate(q.len());
    let gradients = potentials.iter().map(|u| u.gradient()).collect();
    Ok(GradientPolyMap { sigma: sigma.clone(), targets: q.to_vec(), potentials, gradients, s_tilde })
}

/// Potentials u_k with ∇u_k pushing N(0, Σ) onto φ_Σ(1 + Σ ε^k Q_k) up to
/// O(ε^{r+1}). Non-diagonal Σ is solved in its eigenframe (numeric mode only).
pub fn invert_s_map<C: Coeff>(q: &[Polynomial<C>], sigma: &Matrix<C>) -> Result<GradientPolyMap<C>> {
    let dim = sigma.rows();
    if let Some(p) = q.iter().find(|p| p.dim() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, found: p.dim() });
    }
    let mut gauss = GaussianMoments::new(sigma)?;
    for p in q {
        if !gauss.expectation(p).is_negligible(p.max_abs_coeff()) {
            return Err(Error::NotOrthogonal);
        }
    }
    if sigma.is_diagonal() {
        return invert_diagonal(q, sigma);
    }
    let eig = sym_eigen(sigma)?;
    let lift = |v: f64| C::from_f64(v).ok_or(Error::ExactNeedsDiagonal);
    let mut rotation = Matrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            rotation.set(i, j, lift(*eig.vectors.get(i, j))?);
        }
    }
    let lambdas: Vec<C> = eig.values.iter().map(|&v| lift(v)).collect::<Result<_>>()?;
    let back = rotation.transpose();
    let rotated: Vec<Polynomial<C>> = q.iter().map(|p| p.compose_linear(&rotation)).collect::<Result<_>>()?;
    let inner = invert_diagonal(&rotated, &Matrix::diag(&lambdas))?;
    let unrotate = |p: &Polynomial<C>| p.compose_linear(&back);
    let potentials: Vec<Polynomial<C>> = inner.potentials.iter().map(unrotate).collect::<Result<_>>()?;
    let s_tilde = inner.s_tilde.iter().map(unrotate).collect::<Result<_>>()?;
    let gradients = potentials.iter().map(|u| u.gradient()).collect();
    Ok(GradientPolyMap { sigma: sigma.clone(), targets: q.to_vec(), potentials, gradients, s_tilde })
}

/// build_q followed by invert_s_map.
pub fn perturbation_from_cumulants<C: Coeff>(c: &CumulantSet<C>, r: usize) -> Result<GradientPolyMap<C>> {
    let q = build_q(c, r)?;
    invert_s_map(&q, c.covariance())
}
