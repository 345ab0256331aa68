//! Exact polynomial algebra: sparse multivariate polynomials, ε-series,
//! Hermite polynomials and Gaussian moments.

pub mod coeff;
pub mod gaussian;
pub mod hermite;
pub mod matrix;
pub mod multi_index;
pub mod polynomial;
pub mod series;

pub use coeff::{parse_rational, rational, Coeff, Rational};
pub use gaussian::{gaussian_moment, GaussianMoments};
pub use hermite::{hermite_1d, hermite_tensor, HermiteConvention};
pub use matrix::{sym_eigen, sym_sqrt, Matrix, SymEigen};
pub use multi_index::MultiIndex;
pub use polynomial::{coordinates, divergence, dot, mat_vec, Polynomial, DEGREE_CAP};
pub use series::{taylor_shift, EpsSeries};
