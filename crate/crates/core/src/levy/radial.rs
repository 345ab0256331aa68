//! Rotation-invariant measures whose radial intensity is piecewise a power
//! law, which covers the stable-like family and log-log tabulated profiles.

use super::sphere::{
    first_coordinate_cdf, spherical_char_fn, sphere_area, sphere_moment, uniform_direction,
};
use super::LevyMeasure;
use crate::polycore::{Matrix, MultiIndex};
use crate::quadrature::CompositeRule;
use crate::sampling::RngStream;
use crate::{Error, Result};

/// Radial intensity `coef * ρ^exponent` on `(lo, hi]`, i.e. the mass per
/// unit radius after integrating over directions.
#[derive(Clone, Debug, PartialEq)]
struct Piece {
    lo: f64,
    hi: f64,
    coef: f64,
    exponent: f64,
}

/// `∫_l^h ρ^g dρ`.
fn power_integral(g: f64, l: f64, h: f64) -> f64 {
    if h <= l {
        return 0.0;
    }
    let g1 = g + 1.0;
    if g1.abs() < 1e-12 {
        return if l == 0.0 { f64::INFINITY } else { (h / l).ln() };
    }
    if l == 0.0 {
        return if g1 > 0.0 { h.powf(g1) / g1 } else { f64::INFINITY };
    }
    (h.powf(g1) - l.powf(g1)) / g1
}

impl Piece {
    fn overlap(&self, lo: f64, hi: f64) -> Option<(f64, f64)> {
        let l = self.lo.max(lo);
        let h = self.hi.min(hi);
        (h > l).then_some((l, h))
    }

    fn integral(&self, k: f64, lo: f64, hi: f64) -> f64 {
        self.overlap(lo, hi)
            .map_or(0.0, |(l, h)| self.coef * power_integral(self.exponent + k, l, h))
    }

    /// Inverse CDF of the normalized intensity on `(l, h]` at `v`.
    fn quantile(&self, l: f64, h: f64, v: f64) -> f64 {
        let g1 = self.exponent + 1.0;
        let rho = if g1.abs() < 1e-12 {
            l * (h / l).powf(v)
        } else {
            let (a, b) = (l.powf(g1), h.powf(g1));
            (a + v * (b - a)).powf(1.0 / g1)
        };
        rho.clamp(l, h)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum RadialKind {
    /// Density exactly `|z|^{-q-α}` on `0 < |z| <= τ`.
    StableLike { alpha: f64, tau: f64 },
    /// Density interpolated log-log between knots, zero past the last knot.
    Tabulated,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RadialMeasure {
    dim: usize,
    kind: RadialKind,
    pieces: Vec<Piece>,
}

fn check_dim(q: usize) -> Result<()> {
    if (1..=10).contains(&q) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("dimension {q} outside 1..=10")))
    }
}

impl RadialMeasure {
    pub fn stable_like(q: usize, alpha: f64, tau: f64) -> Result<Self> {
        check_dim(q)?;
        if !(alpha > 0.0 && alpha < 2.0) {
            return Err(Error::InvalidParameter(format!("alpha {alpha} outside (0, 2)")));
        }
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::InvalidParameter(format!("tau {tau} must be positive")));
        }
        Ok(RadialMeasure {
            dim: q,
            kind: RadialKind::StableLike { alpha, tau },
            pieces: vec![Piece { lo: 0.0, hi: tau, coef: sphere_area(q), exponent: -1.0 - alpha }],
        })
    }

    /// Knots `(radius, density)` of the density per unit volume. Below the
    /// first knot the first segment's power law is extended to 0.
    pub fn tabulated(q: usize, knots: &[(f64, f64)]) -> Result<Self> {
        check_dim(q)?;
        if knots.len() < 2 {
            return Err(Error::InvalidParameter("need at least two radial knots".into()));
        }
        for w in knots.windows(2) {
            if !(w[0].0 > 0.0 && w[1].0 > w[0].0) {
                return Err(Error::InvalidParameter("knot radii must increase from above 0".into()));
            }
        }
        if knots.iter().any(|&(_, g)| !(g > 0.0 && g.is_finite())) {
            return Err(Error::InvalidParameter("knot densities must be positive".into()));
        }
        let s = sphere_area(q);
        let intensity = |(rho, g): (f64, f64)| s * rho.powi(q as i32 - 1) * g;
        let mut pieces = Vec::with_capacity(knots.len());
        for w in knots.windows(2) {
            let (f0, f1) = (intensity(w[0]), intensity(w[1]));
            let exponent = (f1 / f0).ln() / (w[1].0 / w[0].0).ln();
            let coef = f0 / w[0].0.powf(exponent);
            pieces.push(Piece { lo: w[0].0, hi: w[1].0, coef, exponent });
        }
        let first = pieces[0].clone();
        if first.exponent + 3.0 <= 0.0 {
            return Err(Error::InvalidParameter(
                "density near 0 too singular for a finite second moment".into(),
            ));
        }
        pieces.insert(0, Piece { lo: 0.0, hi: first.lo, ..first });
        Ok(RadialMeasure { dim: q, kind: RadialKind::Tabulated, pieces })
    }

    pub fn kind(&self) -> &RadialKind {
        &self.kind
    }

    pub fn stability_index(&self) -> Option<f64> {
        match self.kind {
            RadialKind::StableLike { alpha, .. } => Some(alpha),
            RadialKind::Tabulated => None,
        }
    }

    /// `∫_{lo<|z|<=hi} |z|^k ν(dz)`.
    pub fn radial_integral(&self, k: f64, lo: f64, hi: f64) -> f64 {
        self.pieces.iter().map(|p| p.integral(k, lo, hi)).sum()
    }

    /// A radius drawn from the normalized radial law on `(lo, hi]`.
    pub fn sample_radius(&self, lo: f64, hi: f64, u: f64) -> f64 {
        let masses: Vec<f64> = self.pieces.iter().map(|p| p.integral(0.0, lo, hi)).collect();
        let total: f64 = masses.iter().sum();
        let mut target = u * total;
        let mut chosen = masses.iter().rposition(|&m| m > 0.0).unwrap_or(0);
        for (i, &m) in masses.iter().enumerate() {
            if m > 0.0 && target <= m {
                chosen = i;
                break;
            }
            target -= m;
        }
        let piece = &self.pieces[chosen];
        let (l, h) = piece.overlap(lo, hi).unwrap_or((lo, hi));
        let v = (target / masses[chosen]).clamp(0.0, 1.0);
        piece.quantile(l, h, v)
    }
}

fn add_direction(q: usize, rho: f64, rng: &mut RngStream, acc: &mut [f64]) {
    if q == 1 {
        acc[0] += if rng.normal() < 0.0 { -rho } else { rho };
        return;
    }
    let mut buf = [0.0f64; 10];
    let v = &mut buf[..q];
    loop {
        rng.fill_normal(v);
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-300 {
            for (a, x) in acc.iter_mut().zip(v.iter()) {
                *a += rho * x / n;
            }
            return;
        }
    }
}

impl LevyMeasure for RadialMeasure {
    fn dim(&self) -> usize {
        self.dim
    }

    fn is_rotation_invariant(&self) -> bool {
        true
    }

    fn support_radius(&self) -> f64 {
        self.pieces.last().map_or(0.0, |p| p.hi)
    }

    fn shell_mass(&self, lo: f64, hi: f64) -> f64 {
        self.radial_integral(0.0, lo, hi)
    }

    fn shell_mean(&self, _lo: f64, _hi: f64) -> Vec<f64> {
        vec![0.0; self.dim]
    }

    fn shell_second_moment(&self, lo: f64, hi: f64) -> Matrix<f64> {
        let v = self.radial_integral(2.0, lo, hi) / self.dim as f64;
        Matrix::diag(&vec![v; self.dim])
    }

    fn shell_moment(&self, alpha: &MultiIndex, lo: f64, hi: f64) -> f64 {
        let angular = sphere_moment(alpha);
        if angular == 0.0 {
            return 0.0;
        }
        self.radial_integral(alpha.order() as f64, lo, hi) * angular
    }

    fn mass_in_region(&self, lo: f64, hi: f64, u_lo: f64, u_hi: f64) -> f64 {
        let q = self.dim;
        let frac = first_coordinate_cdf(q, u_hi) - first_coordinate_cdf(q, u_lo);
        self.shell_mass(lo, hi) * frac.max(0.0)
    }

    fn sample_shell(&self, lo: f64, hi: f64, rng: &mut RngStream) -> Vec<f64> {
        let rho = self.sample_radius(lo, hi, rng.uniform());
        let mut dir = uniform_direction(self.dim, rng);
        dir.iter_mut().for_each(|x| *x *= rho);
        dir
    }

    fn add_shell_samples(&self, lo: f64, hi: f64, count: u64, rng: &mut RngStream, acc: &mut [f64]) {
        let inside: Vec<&Piece> = self.pieces.iter().filter(|p| p.overlap(lo, hi).is_some()).collect();
        if inside.len() != 1 {
            for _ in 0..count {
                let rho = self.sample_radius(lo, hi, rng.uniform());
                add_direction(self.dim, rho, rng, acc);
            }
            return;
        }
        // single power-law piece: closed-form inverse CDF with hoisted constants
        let piece = inside[0];
        let (l, h) = piece.overlap(lo, hi).expect("filtered above");
        let g1 = piece.exponent + 1.0;
        let log_form = g1.abs() < 1e-12;
        let (a, span) = if log_form { (l, (h / l).ln()) } else { (l.powf(g1), h.powf(g1) - l.powf(g1)) };
        for _ in 0..count {
            let v = rng.uniform();
            let rho = if log_form { a * (v * span).exp() } else { (a + v * span).powf(1.0 / g1) };
            add_direction(self.dim, rho.clamp(l, h), rng, acc);
        }
    }

    fn shell_char_fn(&self, lo: f64, hi: f64, s: &[f64]) -> Result<(f64, f64)> {
        let mass = self.shell_mass(lo, hi);
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "shell ({lo}, {hi}] has mass {mass}, no conditional law"
            )));
        }
        let t = s.iter().map(|x| x * x).sum::<f64>().sqrt();
        let rule = CompositeRule::new(16);
        let mut value = 0.0;
        for p in &self.pieces {
            let Some((l, h)) = p.overlap(lo, hi) else { continue };
            let f = |rho: f64| p.coef * rho.powf(p.exponent) * spherical_char_fn(self.dim, t * rho, &rule);
            let mut panels = ((t * (h - l)) / 2.0).ceil() as usize + 4;
            let mut prev = rule.integrate(f, l, h, panels);
            let mut converged = false;
            for _ in 0..8 {
                panels *= 2;
                let next = rule.integrate(f, l, h, panels);
                let done = (next - prev).abs() <= 1e-11 * mass;
                prev = next;
                if done {
                    converged = true;
                    break;
                }
            }
            if !converged {
                return Err(Error::Quadrature(format!(
                    "radial characteristic function at |s|={t} did not settle"
                )));
            }
            value += prev;
        }
        Ok((value / mass, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy::small_jump_covariance;
    use crate::quadrature::integrate_adaptive;
    use std::f64::consts::PI;

    #[test]
    fn annulus_mass_example() {
        let m = RadialMeasure::stable_like(2, 1.5, 1.0).unwrap();
        let closed = 2.0 * PI * (2f64.powf(1.5) - 1.0) * 2f64.powf(4.5) / 1.5;
        // independent radial quadrature of 2πρ·ρ^{-3.5}
        let quad = integrate_adaptive(|r| 2.0 * PI * r.powf(-2.5), 1.0 / 16.0, 0.125, 1e-13, 0.0)
            .unwrap()
            .value;
        let got = m.annulus_mass(3);
        assert!((got - closed).abs() < 1e-10 * closed);
        assert!((got - quad).abs() < 1e-9 * closed);
        assert!((got - 173.30).abs() < 0.01, "{got}");
    }

    #[test]
    fn annulus_outside_support_is_empty() {
        let m = RadialMeasure::stable_like(2, 1.5, 0.3).unwrap();
        assert_eq!(m.annulus_mass(0), 0.0);
        assert_eq!(m.annulus_mass(-3), 0.0);
        // partial overlap integrates (1/4, 0.3]
        let partial = m.annulus_mass(1);
        assert!(partial > 0.0);
        assert!((partial - m.shell_mass(0.25, 0.3)).abs() < 1e-12);
    }

    #[test]
    fn dyadic_mass_ratio() {
        let m = RadialMeasure::stable_like(3, 1.2, 1.0).unwrap();
        for r in 1..12 {
            let ratio = m.annulus_mass(r + 1) / m.annulus_mass(r);
            assert!((ratio - 2f64.powf(1.2)).abs() < 1e-12);
        }
    }

    #[test]
    fn small_jump_covariance_example() {
        let m = RadialMeasure::stable_like(2, 1.5, 1.0).unwrap();
        let c = small_jump_covariance(&m, 0.25).unwrap();
        assert!(!c.clamped);
        assert!((c.matrix.get(0, 0) - PI).abs() < 1e-12);
        assert!((c.matrix.get(1, 1) - PI).abs() < 1e-12);
        assert_eq!(*c.matrix.get(0, 1), 0.0);
        // quadrature oracle for the trace: ∫ ρ²·2πρ·ρ^{-3.5} over (0, 1/4]
        let tr = integrate_adaptive(|r| 2.0 * PI * r.powf(-0.5), 0.0, 0.25, 1e-12, 0.0)
            .unwrap()
            .value;
        assert!((tr - 2.0 * PI).abs() < 1e-8, "{tr}");
        // Σ_ε = 2π ε^{1/2} I here, so ε = 2^-40 still gives about 6e-6
        let small = small_jump_covariance(&m, 2f64.powi(-40)).unwrap();
        assert!((small.matrix.get(0, 0) - 2.0 * PI * 2f64.powi(-20)).abs() < 1e-18);
        let tiny = small_jump_covariance(&m, 2f64.powi(-90)).unwrap();
        assert!(tiny.matrix.frobenius() < 1e-12);
        let big = small_jump_covariance(&m, 2.0).unwrap();
        assert!(big.clamped);
    }

    #[test]
    fn mass_times_radius_grows() {
        let m = RadialMeasure::stable_like(2, 1.5, 1.0).unwrap();
        let seq: Vec<f64> = (5..=20).map(|r| m.annulus_mass(r) * 2f64.powi(-r)).collect();
        assert!(seq.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn tabulated_power_law_matches_stable_like() {
        let q = 2;
        let knots: Vec<(f64, f64)> =
            [0.1, 0.4, 1.0].iter().map(|&r: &f64| (r, r.powf(-3.5))).collect();
        let t = RadialMeasure::tabulated(q, &knots).unwrap();
        let s = RadialMeasure::stable_like(q, 1.5, 1.0).unwrap();
        for r in 0..8 {
            let (a, b) = (t.annulus_mass(r), s.annulus_mass(r));
            assert!((a - b).abs() < 1e-9 * b, "r={r}: {a} vs {b}");
        }
        assert!((t.support_radius() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn radius_sampler_hits_shell() {
        let m = RadialMeasure::stable_like(2, 1.5, 1.0).unwrap();
        for u in [1e-9, 0.3, 0.5, 0.999_999] {
            let r = m.sample_radius(0.125, 0.25, u);
            assert!((0.125..=0.25).contains(&r));
        }
        // median of the radial law on the shell
        let r = m.sample_radius(0.125, 0.25, 0.5);
        let half = m.shell_mass(0.125, r) / m.shell_mass(0.125, 0.25);
        assert!((half - 0.5).abs() < 1e-12);
    }

    #[test]
    fn shell_moments_match_second_moment() {
        let m = RadialMeasure::stable_like(3, 0.7, 2.0).unwrap();
        let c = m.shell_second_moment(0.1, 1.0);
        let v = m.shell_moment(&[0, 2, 0].into(), 0.1, 1.0);
        assert!((v - c.get(1, 1)).abs() < 1e-12 * v);
        assert_eq!(m.shell_moment(&[1, 1, 0].into(), 0.1, 1.0), 0.0);
    }
}
