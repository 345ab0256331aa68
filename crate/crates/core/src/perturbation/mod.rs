//! Perturbing gradient fields: the Hermite-type equation, the formal-series
//! corrections S̃_k, and the recursion tying them together.

pub mod formal;
pub mod map;
pub mod operator;
pub mod pushforward;

pub use formal::compute_s_tilde;
pub use map::{invert_s_map, perturbation_from_cumulants, GradientPolyMap};
pub use operator::{apply_l, apply_l_field, solve_hermite_pde, solve_hermite_pde_ordered, BasisOrder};
pub use pushforward::{pushforward_sup_error, Pushforward1d};
