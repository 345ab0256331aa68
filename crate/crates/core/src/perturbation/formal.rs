//! S̃_{k+1} from the formal ε-series identity for the pushforward density.

use crate::error::{Error, Result};
use crate::polycore::{coordinates, dot, mat_vec, taylor_shift, Coeff, EpsSeries, GaussianMoments, Matrix, Polynomial};

/// det(M) for a matrix of series whose diagonal starts at 1 and whose
/// off-diagonal entries vanish at ε⁰; elimination needs no pivoting.
fn series_det<C: Coeff>(mut m: Vec<Vec<EpsSeries<C>>>) -> Result<EpsSeries<C>> {
    let n = m.len();
    let dim = m[0][0].dim();
    let order = m[0][0].order();
    let mut det = EpsSeries::one(dim, order);
    for k in 0..n {
        let pivot = m[k][k].clone();
        det = det.mul(&pivot)?;
        if k + 1 == n {
            break;
        }
        let inv = pivot.reciprocal()?;
        for i in k + 1..n {
            let f = m[i][k].mul(&inv)?;
            for j in k + 1..n {
                let update = f.mul(&m[k][j])?;
                m[i][j] = m[i][j].sub(&update);
            }
        }
    }
    Ok(det)
}

/// Given potentials u_1..u_k that realize targets S_1..S_k, returns the
/// ε^{k+1} correction S̃_{k+1} of the pushforward density.
pub fn compute_s_tilde<C: Coeff>(
    potentials: &[Polynomial<C>],
    targets: &[Polynomial<C>],
    sigma: &Matrix<C>,
) -> Result<Polynomial<C>> {
    let dim = sigma.rows();
    let k = potentials.len();
    if targets.len() != k {
        return Err(Error::DimensionMismatch { expected: k, found: targets.len() });
    }
    if let Some(p) = potentials.iter().chain(targets).find(|p| p.dim() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, found: p.dim() });
    }
    if k == 0 {
        return Ok(Polynomial::zero(dim));
    }
    if !sigma.is_positive_definite() {
        return Err(Error::Singular { min: 0.0, max: 0.0 });
    }
    let order = k + 1;
    let sigma_inv = sigma.inverse()?;
    let grads: Vec<Vec<Polynomial<C>>> = potentials.iter().map(|u| u.gradient()).collect();

    // V = Σ_j ε^j ∇u_j, one series per coordinate.
    let v: Vec<EpsSeries<C>> = (0..dim)
        .map(|i| {
            let mut coeffs = vec![Polynomial::zero(dim); order + 1];
            for (j, g) in grads.iter().enumerate() {
                coeffs[j + 1] = g[i].clone();
            }
            EpsSeries::from_coeffs(coeffs)
        })
        .collect::<Result<_>>()?;

    // Exponent x·Σ⁻¹V + ½ V·Σ⁻¹V.
    let x = coordinates::<C>(dim);
    let sx = mat_vec(&sigma_inv, &x);
    let mut exponent = EpsSeries::zero(dim, order);
    for j in 1..=k {
        let lin = dot(&sx, &grads[j - 1]);
        exponent = exponent.add(&EpsSeries::term(lin, j, order));
    }
    let half = C::one() / C::from_i64(2);
    for i in 0..dim {
        for l in 0..dim {
            let c = sigma_inv.get(i, l);
            if c.is_zero() {
                continue;
            }
            let prod = v[i].mul(&v[l])?;
            exponent = exponent.add(&prod.scale(&(c.clone() * half.clone())));
        }
    }

    // det(I + Σ_j ε^j D²u_j).
    let hessians: Vec<Vec<Vec<Polynomial<C>>>> = potentials.iter().map(|u| u.hessian()).collect();
    let jac: Vec<Vec<EpsSeries<C>>> = (0..dim)
        .map(|a| {
            (0..dim)
                .map(|b| {
                    let mut coeffs = vec![Polynomial::zero(dim); order + 1];
                    if a == b {
                        coeffs[0] = Polynomial::one(dim);
                    }
                    for (j, hess) in hessians.iter().enumerate() {
                        coeffs[j + 1] = hess[a][b].clone();
                    }
                    EpsSeries::from_coeffs(coeffs)
                })
                .collect::<Result<_>>()
        })
        .collect::<Result<_>>()?;
    let det = series_det(jac)?;
    let rhs = exponent.exp()?.mul(&det.reciprocal()?)?;

    // Left side: Σ_j ε^j S_j(x + V(x)).
    let shifts: Vec<EpsSeries<C>> = targets
        .iter()
        .map(|s| taylor_shift(s, &grads, order))
        .collect::<Result<_>>()?;
    let scale = rhs.coeffs().iter().map(|p| p.max_abs_coeff()).fold(1.0, f64::max);
    for level in 1..=order {
        let mut acc = rhs.coeff(level);
        for (j, w) in shifts.iter().enumerate().take(level.min(k)) {
            acc = &acc - &w.coeff(level - (j + 1));
        }
        if level <= k {
            if !acc.is_negligible(scale) {
                return Err(Error::Inconsistent(level));
            }
        } else {
            let mut gauss = GaussianMoments::new(sigma)?;
            if !gauss.expectation(&acc).is_negligible(acc.max_abs_coeff()) {
                return Err(Error::NotOrthogonal);
            }
            return Ok(acc);
        }
    }
    unreachable!("loop returns at level k + 1")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perturbation::operator::solve_hermite_pde;
    use crate::polycore::{hermite_1d, rational, Rational};

    #[test]
    fn identity_map_has_no_correction() {
        let sigma = Matrix::<Rational>::identity(2);
        let zero = Polynomial::zero(2);
        let s = compute_s_tilde(&[zero.clone(), zero.clone()], &[zero.clone(), zero.clone()], &sigma).unwrap();
        assert!(s.is_zero());
    }

    #[test]
    fn inconsistent_targets_are_detected() {
        let sigma = Matrix::<Rational>::identity(1);
        let u = hermite_1d::<Rational>(3).scale(&rational(1, 18));
        let wrong = hermite_1d::<Rational>(3).scale(&rational(1, 5));
        assert_eq!(compute_s_tilde(&[u], &[wrong], &sigma), Err(Error::Inconsistent(1)));
    }

    #[test]
    fn second_order_correction_is_degree_bounded() {
        let sigma = Matrix::<Rational>::identity(1);
        let q1 = hermite_1d::<Rational>(3).scale(&rational(1, 6));
        let u1 = solve_hermite_pde(&q1, &[rational(1, 1)]).unwrap();
        let s2 = compute_s_tilde(&[u1], &[q1], &sigma).unwrap();
        assert!(s2.degree() <= 6);
        assert!(!s2.is_zero());
    }
}
