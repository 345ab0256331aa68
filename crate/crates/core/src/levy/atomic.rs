//! Finite Lévy measures made of weighted atoms; the empty one is `ν ≡ 0`.

use super::LevyMeasure;
use crate::polycore::{Matrix, MultiIndex};
use crate::sampling::RngStream;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct AtomicMeasure {
    dim: usize,
    atoms: Vec<(Vec<f64>, f64)>,
}

fn norm(z: &[f64]) -> f64 {
    z.iter().map(|x| x * x).sum::<f64>().sqrt()
}

impl AtomicMeasure {
    pub fn null(q: usize) -> Self {
        AtomicMeasure { dim: q, atoms: Vec::new() }
    }

    pub fn new(q: usize, atoms: Vec<(Vec<f64>, f64)>) -> Result<Self> {
        for (z, w) in &atoms {
            if z.len() != q {
                return Err(Error::DimensionMismatch { expected: q, found: z.len() });
            }
            if !(*w > 0.0 && w.is_finite()) || norm(z) == 0.0 {
                return Err(Error::InvalidParameter("atoms need positive weight off the origin".into()));
            }
        }
        Ok(AtomicMeasure { dim: q, atoms })
    }

    fn in_shell(&self, lo: f64, hi: f64) -> impl Iterator<Item = &(Vec<f64>, f64)> {
        self.atoms.iter().filter(move |(z, _)| {
            let r = norm(z);
            r > lo && r <= hi
        })
    }
}

impl LevyMeasure for AtomicMeasure {
    fn dim(&self) -> usize {
        self.dim
    }

    fn is_rotation_invariant(&self) -> bool {
        self.atoms.is_empty()
    }

    fn support_radius(&self) -> f64 {
        self.atoms.iter().map(|(z, _)| norm(z)).fold(0.0, f64::max)
    }

    fn shell_mass(&self, lo: f64, hi: f64) -> f64 {
        self.in_shell(lo, hi).map(|(_, w)| w).sum()
    }

    fn shell_mean(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut m = vec![0.0; self.dim];
        for (z, w) in self.in_shell(lo, hi) {
            for (mi, zi) in m.iter_mut().zip(z) {
                *mi += w * zi;
            }
        }
        m
    }

    fn shell_second_moment(&self, lo: f64, hi: f64) -> Matrix<f64> {
        let mut c = Matrix::zeros(self.dim, self.dim);
        for (z, w) in self.in_shell(lo, hi) {
            for i in 0..self.dim {
                for j in 0..self.dim {
                    let v = c.get(i, j) + w * z[i] * z[j];
                    c.set(i, j, v);
                }
            }
        }
        c
    }

    fn shell_moment(&self, alpha: &MultiIndex, lo: f64, hi: f64) -> f64 {
        self.in_shell(lo, hi)
            .map(|(z, w)| w * z.iter().zip(alpha.exponents()).map(|(x, &e)| x.powi(e as i32)).product::<f64>())
            .sum()
    }

    fn mass_in_region(&self, lo: f64, hi: f64, u_lo: f64, u_hi: f64) -> f64 {
        self.in_shell(lo, hi)
            .filter(|(z, _)| {
                let u = z[0] / norm(z);
                (u > u_lo || u_lo <= -1.0) && u <= u_hi
            })
            .map(|(_, w)| w)
            .sum()
    }

    fn sample_shell(&self, lo: f64, hi: f64, rng: &mut RngStream) -> Vec<f64> {
        let total = self.shell_mass(lo, hi);
        let mut target = rng.uniform() * total;
        let mut last = None;
        for (z, w) in self.in_shell(lo, hi) {
            last = Some(z);
            if target <= *w {
                return z.clone();
            }
            target -= w;
        }
        last.cloned().unwrap_or_else(|| vec![0.0; self.dim])
    }

    fn shell_char_fn(&self, lo: f64, hi: f64, s: &[f64]) -> Result<(f64, f64)> {
        let total = self.shell_mass(lo, hi);
        if total <= 0.0 {
            return Err(Error::InvalidParameter(format!("shell ({lo}, {hi}] carries no atoms")));
        }
        let (mut re, mut im) = (0.0, 0.0);
        for (z, w) in self.in_shell(lo, hi) {
            let phase: f64 = z.iter().zip(s).map(|(a, b)| a * b).sum();
            re += w * phase.cos();
            im += w * phase.sin();
        }
        Ok((re / total, im / total))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn null_measure_is_empty() {
        let m = AtomicMeasure::null(2);
        assert_eq!(m.annulus_mass(0), 0.0);
        assert_eq!(m.big_jump_mass(0.1), 0.0);
        assert_eq!(m.shell_second_moment(0.0, 1.0).frobenius(), 0.0);
    }

    #[test]
    fn shell_bookkeeping() {
        let m = AtomicMeasure::new(2, vec![(vec![0.3, 0.0], 2.0), (vec![0.0, -0.2], 1.0)]).unwrap();
        assert_eq!(m.annulus_mass(1), 2.0);
        assert_eq!(m.annulus_mass(2), 1.0);
        assert_eq!(m.shell_mean(0.0, 1.0), vec![0.6, -0.2]);
        assert!((m.shell_second_moment(0.0, 1.0).get(1, 1) - 0.04).abs() < 1e-15);
        assert_eq!(m.mass_in_region(0.0, 1.0, 0.5, 1.0), 2.0);
        assert_eq!(m.mass_in_region(0.0, 1.0, -1.0, 0.5), 1.0);
    }
}
