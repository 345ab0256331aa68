//! Moments of the truncated signed density `φ_Σ(1 + Σ_k ε^k Q_k)` set
//! against those of the normalized sum with the same cumulants.

use super::{build_q, cumulants_to_moments, CumulantSet};
use crate::polycore::{Coeff, GaussianMoments, MultiIndex, Polynomial};
use crate::Result;

#[derive(Clone, Debug, PartialEq)]
pub struct MomentComparison<C: Coeff> {
    pub alpha: MultiIndex,
    pub expansion: C,
    pub sum: C,
}

impl<C: Coeff> MomentComparison<C> {
    pub fn matches(&self) -> bool {
        self.expansion == self.sum
    }
}

/// All moments of order `1..=n` (`n` the cumulant order), using the first
/// `n - 2` correction terms at expansion parameter `eps`.
pub fn moment_comparison<C: Coeff>(c: &CumulantSet<C>, eps: &C) -> Result<Vec<MomentComparison<C>>> {
    let n = c.order();
    let dim = c.dim();
    let q = if n > 2 { build_q(c, n as usize - 2)? } else { Vec::new() };
    let mut weight = Polynomial::one(dim);
    let mut power = C::one();
    for qk in &q {
        power = power * eps.clone();
        weight = &weight + &qk.scale(&power);
    }
    let sum_moments = cumulants_to_moments(&c.rescaled(eps))?;
    let mut gauss = GaussianMoments::new(c.covariance())?;
    MultiIndex::up_to(dim, 1, n)
        .into_iter()
        .map(|alpha| {
            let integrand = Polynomial::monomial(alpha.clone(), C::one()).try_mul(&weight)?;
            Ok(MomentComparison { expansion: gauss.expectation(&integrand), sum: sum_moments.get(&alpha), alpha })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::{rational, Rational};
    use std::collections::BTreeMap;

    #[test]
    fn exponential_sum_moments_match() {
        // centered Exp(1): κ_k = (k-1)!
        let mu: BTreeMap<MultiIndex, Rational> =
            [(2, 1), (3, 2), (4, 6), (5, 24)].iter().map(|&(k, v)| (MultiIndex::new(vec![k]), rational(v, 1))).collect();
        let c = CumulantSet::new(1, 5, mu).unwrap();
        let rows = moment_comparison(&c, &rational(1, 3)).unwrap();
        assert_eq!(rows.len(), 5);
        assert!(rows.iter().all(MomentComparison::matches), "{rows:?}");
    }

    #[test]
    fn dropping_a_term_breaks_the_match() {
        let mu: BTreeMap<MultiIndex, Rational> =
            [(2, 1), (3, 2), (4, 6)].iter().map(|&(k, v)| (MultiIndex::new(vec![k]), rational(v, 1))).collect();
        let c = CumulantSet::new(1, 4, mu).unwrap();
        let eps = rational(1, 2);
        let q = build_q(&c, 1).unwrap();
        let weight = &Polynomial::one(1) + &q[0].scale(&eps);
        let mut g = GaussianMoments::new(c.covariance()).unwrap();
        let a4 = MultiIndex::new(vec![4]);
        let truncated = g.expectation(&Polynomial::monomial(a4.clone(), rational(1, 1)).try_mul(&weight).unwrap());
        let full = moment_comparison(&c, &eps).unwrap().into_iter().find(|r| r.alpha == a4).unwrap();
        assert!(full.matches());
        assert_ne!(truncated, full.sum);
    }
}
