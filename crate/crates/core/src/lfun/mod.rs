//! Elliptic curves over ℚ, their Dirichlet coefficients and periods, and
//! central values of twisted L-functions.

mod coeffs;
mod curve;
mod lvalue;
mod periods;

use thiserror::Error;

pub use coeffs::{ap_brute_force, ap_point_count, cache_path, CoefficientTable};
pub use curve::EllipticCurveData;
pub use lvalue::{
    afe_scale, l_value_afe, l_value_with_table, terms_needed, twist_sign, LValue, N_MAX_CAP,
};
pub use periods::{agm, compute_periods};

#[derive(Debug, Error)]
pub enum LfunError {
    #[error("curve {0} is singular")]
    SingularCurve(String),
    #[error("curve config: {0}")]
    Config(String),
    #[error("coefficient cache: {0}")]
    Cache(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("conductor {q} shares a factor with N_E = {n}")]
    ConductorNotCoprime { q: u64, n: u64 },
    #[error("tolerance needs {needed} terms, above the cap of {cap}")]
    ToleranceUnreachable { needed: usize, cap: usize },
    #[error("coefficient table has {have} terms, {needed} needed")]
    TableTooShort { needed: usize, have: usize },
}
