//! Uniform law on the unit sphere `S^{q-1}`.

use statrs::function::beta::beta_reg;
use statrs::function::gamma::gamma;

use crate::polycore::MultiIndex;
use crate::quadrature::CompositeRule;
use crate::sampling::RngStream;

/// Surface measure of the unit sphere in `R^q`.
pub fn sphere_area(q: usize) -> f64 {
    let h = q as f64 / 2.0;
    2.0 * std::f64::consts::PI.powf(h) / gamma(h)
}

/// `E[θ^α]` for θ uniform on the sphere: zero unless every exponent is even,
/// otherwise `∏(α_j-1)!! / (q(q+2)...(q+|α|-2))`.
pub fn sphere_moment(alpha: &MultiIndex) -> f64 {
    if !alpha.is_even() {
        return 0.0;
    }
    let q = alpha.dim() as f64;
    let mut num = 1.0;
    for &a in alpha.exponents() {
        let mut k = a as i64 - 1;
        while k > 1 {
            num *= k as f64;
            k -= 2;
        }
    }
    let mut den = 1.0;
    for k in 0..alpha.order() / 2 {
        den *= q + 2.0 * k as f64;
    }
    num / den
}

pub fn uniform_direction(q: usize, rng: &mut RngStream) -> Vec<f64> {
    loop {
        let mut v = vec![0.0; q];
        rng.fill_normal(&mut v);
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-300 {
            v.iter_mut().for_each(|x| *x /= n);
            return v;
        }
    }
}

/// CDF of the first coordinate of a uniform direction, with the atom at
/// `-1` for `q = 1` assigned to the lowest cell.
pub fn first_coordinate_cdf(q: usize, u: f64) -> f64 {
    if u >= 1.0 {
        return 1.0;
    }
    if u <= -1.0 {
        return 0.0;
    }
    if q == 1 {
        return 0.5;
    }
    let tail = beta_reg(0.5, (q as f64 - 1.0) / 2.0, u * u);
    0.5 * (1.0 + u.signum() * tail)
}

pub fn first_coordinate_quantile(q: usize, p: f64) -> f64 {
    if q == 1 {
        return if p <= 0.5 { -1.0 } else { 1.0 };
    }
    let (mut lo, mut hi) = (-1.0, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if first_coordinate_cdf(q, mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// `E[cos(t θ_1)]`, the characteristic function of a uniform direction
/// at a vector of norm `t`.
pub fn spherical_char_fn(q: usize, t: f64, rule: &CompositeRule) -> f64 {
    match q {
        1 => t.cos(),
        3 => {
            if t.abs() < 1e-8 {
                1.0 - t * t / 6.0
            } else {
                t.sin() / t
            }
        }
        _ => {
            let k = q as f64;
            let norm = gamma(k / 2.0) / (std::f64::consts::PI.sqrt() * gamma((k - 1.0) / 2.0));
            let panels = (t.abs() / 3.0).ceil() as usize + 2;
            norm * rule.integrate(
                |phi| (t * phi.cos()).cos() * phi.sin().powi(q as i32 - 2),
                0.0,
                std::f64::consts::PI,
                panels,
            )
        }
    }
}
