//! Bounded Lipschitz coefficient fields `σ: R^d -> R^{d×q}`.

use std::fmt;
use std::sync::Arc;

use crate::polycore::Matrix;
use crate::{Error, Result};

type Callback = Arc<dyn Fn(&[f64], &mut [f64]) + Send + Sync>;

#[derive(Clone)]
enum Kind {
    Zero,
    Constant(Matrix<f64>),
    InverseQuadratic,
    Trig,
    Custom(Callback),
}

/// A coefficient field with declared sup-norm and Lipschitz bounds.
#[derive(Clone)]
pub struct SigmaFn {
    d: usize,
    q: usize,
    kind: Kind,
    sup_bound: f64,
    lipschitz: f64,
}

impl fmt::Debug for SigmaFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match &self.kind {
            Kind::Zero => "zero",
            Kind::Constant(_) => "constant",
            Kind::InverseQuadratic => "inverse-quadratic",
            Kind::Trig => "trig",
            Kind::Custom(_) => "custom",
        };
        write!(f, "SigmaFn({name}, {}x{})", self.d, self.q)
    }
}

impl SigmaFn {
    pub fn zero(d: usize, q: usize) -> Self {
        SigmaFn { d, q, kind: Kind::Zero, sup_bound: 0.0, lipschitz: 0.0 }
    }

    pub fn constant(m: Matrix<f64>) -> Self {
        let sup = m.frobenius();
        SigmaFn { d: m.rows(), q: m.cols(), kind: Kind::Constant(m), sup_bound: sup, lipschitz: 0.0 }
    }

    /// `I / (1 + |x|²)`.
    pub fn inverse_quadratic(d: usize) -> Self {
        // |∇(1/(1+r²))| = 2r/(1+r²)² peaks at 3√3/8
        let lip = (d as f64).sqrt() * 3.0 * 3f64.sqrt() / 8.0;
        SigmaFn { d, q: d, kind: Kind::InverseQuadratic, sup_bound: (d as f64).sqrt(), lipschitz: lip }
    }

    /// `diag(1 + sin(x_i)/2)`.
    pub fn trig(d: usize) -> Self {
        SigmaFn { d, q: d, kind: Kind::Trig, sup_bound: 1.5 * (d as f64).sqrt(), lipschitz: 0.5 }
    }

    /// `f(x, out)` writes `σ(x)` row-major into `out` (length `d·q`).
    pub fn custom(
        d: usize,
        q: usize,
        sup_bound: f64,
        lipschitz: f64,
        f: impl Fn(&[f64], &mut [f64]) + Send + Sync + 'static,
    ) -> Result<Self> {
        if !(sup_bound >= 0.0 && sup_bound.is_finite() && lipschitz >= 0.0 && lipschitz.is_finite()) {
            return Err(Error::InvalidParameter("declared σ bounds must be finite".into()));
        }
        Ok(SigmaFn { d, q, kind: Kind::Custom(Arc::new(f)), sup_bound, lipschitz })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn sup_bound(&self) -> f64 {
        self.sup_bound
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    /// True when σ does not depend on the state.
    pub fn is_constant(&self) -> bool {
        matches!(self.kind, Kind::Zero | Kind::Constant(_))
    }

    pub fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        match &self.kind {
            Kind::Zero => {}
            Kind::Constant(m) => out.copy_from_slice(m.as_slice()),
            Kind::InverseQuadratic => {
                let v = 1.0 / (1.0 + x.iter().map(|t| t * t).sum::<f64>());
                for i in 0..self.d {
                    out[i * self.q + i] = v;
                }
            }
            Kind::Trig => {
                for i in 0..self.d {
                    out[i * self.q + i] = 1.0 + 0.5 * x[i].sin();
                }
            }
            Kind::Custom(f) => f(x, out),
        }
    }

    /// `x += σ(x_at) · dz`, with `buf` of length `d·q` as scratch.
    pub fn apply(&self, x_at: &[f64], dz: &[f64], x: &mut [f64], buf: &mut [f64]) {
        self.eval_into(x_at, buf);
        for i in 0..self.d {
            let row = &buf[i * self.q..(i + 1) * self.q];
            x[i] += row.iter().zip(dz).map(|(s, z)| s * z).sum::<f64>();
        }
    }
}
