//! The operator U ↦ ∇·U − x·Σ⁻¹U and the Hermite-type equation it induces.

use crate::error::{Error, Result};
use crate::polycore::{
    coordinates, divergence, dot, hermite_tensor, mat_vec, Coeff, GaussianMoments, HermiteConvention, Matrix,
    MultiIndex, Polynomial,
};

fn inverse_checked<C: Coeff>(sigma: &Matrix<C>) -> Result<Matrix<C>> {
    if !sigma.is_positive_definite() {
        return Err(Error::Singular { min: 0.0, max: 0.0 });
    }
    sigma.inverse()
}

/// ∇·U − x·Σ⁻¹U for a polynomial vector field U.
pub fn apply_l_field<C: Coeff>(field: &[Polynomial<C>], sigma: &Matrix<C>) -> Result<Polynomial<C>> {
    let dim = sigma.rows();
    if field.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: field.len() });
    }
    let sigma_inv = inverse_checked(sigma)?;
    let drift = dot(&coordinates::<C>(dim), &mat_vec(&sigma_inv, field));
    Ok(&divergence(field) - &drift)
}

/// Δu − x·Σ⁻¹∇u.
pub fn apply_l<C: Coeff>(u: &Polynomial<C>, sigma: &Matrix<C>) -> Result<Polynomial<C>> {
    apply_l_field(&u.gradient(), sigma)
}

/// Enumeration order of the Hermite basis inside the solver.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisOrder {
    GradedLex,
    Reversed,
}

/// Solves −Δu + x·Σ⁻¹∇u = rhs for Σ = diag(lambdas), returning the solution
/// with zero constant term.
pub fn solve_hermite_pde<C: Coeff>(rhs: &Polynomial<C>, lambdas: &[C]) -> Result<Polynomial<C>> {
    solve_hermite_pde_ordered(rhs, lambdas, BasisOrder::GradedLex)
}

pub fn solve_hermite_pde_ordered<C: Coeff>(
    rhs: &Polynomial<C>,
    lambdas: &[C],
    order: BasisOrder,
) -> Result<Polynomial<C>> {
    let dim = rhs.dim();
    if lambdas.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: lambdas.len() });
    }
    if lambdas.iter().any(|l| *l <= C::zero()) {
        let min = lambdas.iter().map(|l| l.to_f64()).fold(f64::INFINITY, f64::min);
        return Err(Error::Singular { min, max: 0.0 });
    }
    let mut gauss = GaussianMoments::new(&Matrix::diag(lambdas))?;
    let scale = rhs.max_abs_coeff();
    if !gauss.expectation(rhs).is_negligible(scale) {
        return Err(Error::NotOrthogonal);
    }
    let mut basis = MultiIndex::up_to(dim, 1, rhs.degree());
    if order == BasisOrder::Reversed {
        basis.reverse();
    }
    let mut u = Polynomial::zero(dim);
    for alpha in basis {
        // Monic tensor Hermite polynomials are orthogonal with squared norm α! λ^α.
        let h = hermite_tensor(&alpha, lambdas, HermiteConvention::Monic)?;
        let projection = gauss.inner(rhs, &h)?;
        if projection.is_zero() {
            continue;
        }
        let norm = alpha
            .exponents()
            .iter()
            .zip(lambdas)
            .fold(C::one(), |acc, (&a, l)| {
                let fact = (1..=a as i64).fold(C::one(), |f, k| f * C::from_i64(k));
                acc * fact * l.powi(a)
            });
        let eigenvalue = alpha
            .exponents()
            .iter()
            .zip(lambdas)
            .fold(C::zero(), |acc, (&a, l)| acc + C::from_i64(a as i64) / l.clone());
        u = &u + &h.scale(&(projection / (norm * eigenvalue)));
    }
    let c0 = u.constant_term();
    Ok(&u - &Polynomial::constant(dim, c0))
}
