//! Similarity solutions of the one-phase Stefan problem with a convective
//! condition `k T_x(0,t) = (h/√t)(T(0,t) + Θ∞)` at the fixed face.
//!
//! The exact solution is of erf type, `T = −AΘ∞ + BΘ∞ erf(x/(2√(αt)))` with
//! free boundary `s(t) = 2ξ√(αt)`. Four integral-balance approximations with a
//! quadratic profile reduce `ξ` to a polynomial root; each has a closed form
//! in the Dirichlet limit `Bi → ∞`.
//!
//! ```
//! use stefan_hbim::{solve, Case, Scheme, SolveSettings};
//!
//! let case = Case::convective(1.0, 10.0).unwrap();
//! let exact = solve(Scheme::Exact, case, &SolveSettings::default()).unwrap();
//! let p2 = solve(Scheme::P2, case, &SolveSettings::default()).unwrap();
//! assert!((p2.xi - exact.xi).abs() / exact.xi < 0.05);
//! ```

pub mod analysis;
pub mod error;
pub mod exact;
pub mod hbim;
pub mod model;
pub mod numerics;
mod par;
pub mod verify;

pub use error::{Error, Result};
pub use exact::{free_boundary_position, solve_exact, solve_exact_dirichlet, TemperatureField};
pub use hbim::{residual_suite, solve_approx, solve_approx_limit, CoefficientConvention, ResidualReport};
pub use model::{
    dimensionless_from_physical, Biot, Boundary, Case, DimensionlessParams, Diffusivity, MethodId, PhysicalParams,
    Scheme, SimilaritySolution,
};
pub use numerics::{erf, solve_bracketed, Bracket, SolveSettings};
pub use par::Execution;

/// Solves any scheme for either boundary variant.
pub fn solve(scheme: Scheme, case: Case, settings: &SolveSettings) -> Result<SimilaritySolution> {
    match (scheme, case) {
        (Scheme::Exact, _) => exact::solve_case(case, settings),
        (_, Case::Convective(params)) => hbim::solve_approx(scheme, params, settings),
        (_, Case::DirichletLimit { ste }) => hbim::solve_approx_limit(scheme, ste),
    }
}

/// [`solve`] with a choice of P1/P2 coefficient convention.
pub fn solve_with(
    scheme: Scheme,
    case: Case,
    settings: &SolveSettings,
    convention: CoefficientConvention,
) -> Result<SimilaritySolution> {
    match (scheme, case) {
        (Scheme::P1 | Scheme::P2, Case::Convective(params)) => {
            hbim::solve_approx_with(scheme, params, settings, convention)
        }
        _ => solve(scheme, case, settings),
    }
}
