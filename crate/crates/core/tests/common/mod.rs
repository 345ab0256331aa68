#![allow(dead_code)]

use std::collections::BTreeMap;

use levy_edgeworth::edgeworth::CumulantSet;
use levy_edgeworth::polycore::{rational, MultiIndex, Rational};
use levy_edgeworth::sampling::RngStream;

fn pick(rng: &mut RngStream, lo: i64, hi: i64) -> i64 {
    lo + (rng.uniform() * (hi - lo + 1) as f64).floor() as i64
}

/// Random rational with numerator in `[lo, hi]` and denominator in `1..=6`.
pub fn random_rational(rng: &mut RngStream, lo: i64, hi: i64) -> Rational {
    rational(pick(rng, lo, hi), pick(rng, 1, 6))
}

/// Cumulants with a random positive diagonal covariance and random
/// higher-order entries, roughly a third of them zero.
pub fn random_cumulants(seed: u64, dim: usize, order: u32) -> CumulantSet<Rational> {
    let mut rng = RngStream::new(seed, 0xC0);
    let mut mu = BTreeMap::new();
    for j in 0..dim {
        let mut a = vec![0; dim];
        a[j] = 2;
        mu.insert(MultiIndex::new(a), random_rational(&mut rng, 1, 8));
    }
    for alpha in MultiIndex::up_to(dim, 3, order) {
        if rng.uniform() < 0.33 {
            continue;
        }
        mu.insert(alpha, random_rational(&mut rng, -5, 5));
    }
    CumulantSet::new(dim, order, mu).expect("diagonal positive covariance")
}
