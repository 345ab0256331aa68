//! Moments, cumulants, Edgeworth polynomials and their diagnostics.

pub mod diagnostics;
pub mod expansion;
pub mod matching;
pub mod moments;

pub use diagnostics::{kappa, kappa_from_moments, kappa_from_samples, min_m_heuristic};
pub use expansion::{build_p, build_q, edgeworth_density, EdgeworthExpansion, GaussianDensity};
pub use matching::{moment_comparison, MomentComparison};
pub use moments::{cumulants_to_moments, moments_to_cumulants, CumulantSet, MomentSet};
